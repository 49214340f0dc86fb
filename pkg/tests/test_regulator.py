import pytest

from tasks.cournot import two_stage_equilibrium
from tasks.distributions import UNIFORM, DistributionKind, UserTypeDistribution
from tasks.market import MarketParams, simulate_market
from tasks.oracle import brute_force_welfare
from tasks.regulator import interval_welfare, regulator_revenue, sweep_tax, user_welfare


def test_interval_welfare_example():
    assert interval_welfare(UNIFORM, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0) == pytest.approx(1.0 / 18.0)
    assert interval_welfare(UNIFORM, 0.6, 0.4, 0.1) == 0.0


def test_welfare_matches_brute_force():
    eq = two_stage_equilibrium(0.1)
    params = MarketParams(k_i=eq.k_i, k_j=eq.k_j)
    expected = brute_force_welfare(params, eq.p_i, eq.p_j)
    assert user_welfare(eq) == pytest.approx(expected, abs=1e-4)


def test_uniform_welfare_is_half_the_squared_demands():
    # both served intervals start at the operator's own price
    eq = two_stage_equilibrium(0.1)
    out = simulate_market(MarketParams(k_i=eq.k_i, k_j=eq.k_j), eq.p_i, eq.p_j)
    assert user_welfare(eq) == pytest.approx((out.d_i ** 2 + out.d_j ** 2) / 2.0)


def test_infeasible_market_has_no_welfare(caplog):
    eq = two_stage_equilibrium(0.3)
    assert user_welfare(eq) == 0.0
    assert "infeasible" in caplog.text


def test_welfare_needs_uniform_users():
    params = MarketParams(dist=UserTypeDistribution(DistributionKind.TRIANGULAR))
    with pytest.raises(ValueError):
        user_welfare(two_stage_equilibrium(0.1), params)


def test_regulator_revenue_signs():
    eq = two_stage_equilibrium(0.15)
    assert regulator_revenue(eq, 0.05) == pytest.approx(0.05 * (eq.k_i + eq.k_j))
    assert regulator_revenue(eq, -0.02) < 0.0
    assert regulator_revenue(eq, 0.0) == 0.0
    assert regulator_revenue(two_stage_equilibrium(0.3), 0.2) == 0.0


# TAX SWEEP
def test_reference_sweep():
    sweep = sweep_tax()
    assert len(sweep.points) == 41
    assert sweep.points[0].gamma_t == pytest.approx(-0.05)
    assert sweep.points[-1].gamma_t == pytest.approx(0.15)

    assert sweep.revenue_argmax.gamma_t == pytest.approx(0.065, abs=0.005)
    assert sweep.welfare_argmax.gamma_t == pytest.approx(-0.05)
    assert not sweep.points[-1].feasible
    assert len(sweep.feasible_points()) == 40


def test_sweep_welfare_falls_as_the_tax_rises():
    sweep = sweep_tax()
    welfare = [p.welfare_per_M for p in sweep.points]
    assert all(a >= b for a, b in zip(welfare, welfare[1:]))
    assert all(w >= 0.0 for w in welfare)


def test_subsidies_cost_the_regulator():
    sweep = sweep_tax()
    for point in sweep.feasible_points():
        if point.gamma_t < 0:
            assert point.revenue_per_M < 0.0
        elif point.gamma_t > 0:
            assert point.revenue_per_M > 0.0


def test_single_point_sweep():
    sweep = sweep_tax(0.1, (0.0, 0.0), 0.005)
    assert len(sweep.points) == 1
    assert sweep.revenue_argmax is sweep.points[0]
    assert sweep.points[0].gamma == pytest.approx(0.1)


@pytest.mark.parametrize("gamma_c, gamma_t_range", [
    (0.1, (0.1, 0.0)),
    (0.1, (-0.2, 0.0)),
    (0.0, (0.0, 0.1)),
])
def test_sweep_rejects_bad_ranges(gamma_c, gamma_t_range):
    with pytest.raises(ValueError):
        sweep_tax(gamma_c, gamma_t_range, 0.005)


def test_sweep_needs_uniform_users():
    params = MarketParams(dist=UserTypeDistribution(DistributionKind.INCREASING_LINEAR))
    with pytest.raises(ValueError):
        sweep_tax(params=params)


def test_revenue_has_a_single_peak_on_the_feasible_region():
    revenue = [p.revenue_per_M for p in sweep_tax().feasible_points()]
    peak = revenue.index(max(revenue))
    assert 0 < peak < len(revenue) - 1
    assert all(a < b for a, b in zip(revenue[:peak], revenue[1:peak + 1]))
    assert all(a > b for a, b in zip(revenue[peak:], revenue[peak + 1:]))
