"""Tests for the four user-type densities."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tasks.distributions import DistributionKind, UserTypeDistribution

KINDS = list(DistributionKind)


def _midpoint_integral(fn, a, b, n=20000):
    xs = a + (np.arange(n) + 0.5) * (b - a) / n
    return float(np.sum(fn(xs)) * (b - a) / n)


@pytest.mark.parametrize("kind", KINDS)
def test_cumulative_endpoints(kind):
    dist = UserTypeDistribution(kind)
    assert dist.cumulative(0.0) == 0.0
    assert dist.cumulative(1.0) == pytest.approx(1.0)
    assert dist.cumulative(-0.3) == 0.0
    assert dist.cumulative(1.7) == pytest.approx(1.0)


@pytest.mark.parametrize("kind", KINDS)
def test_density_is_nonnegative_and_zero_outside(kind):
    dist = UserTypeDistribution(kind)
    alphas = np.linspace(0.0, 1.0, 101)
    assert np.all(dist.density(alphas) >= 0.0)
    assert dist.density(-0.1) == 0.0
    assert dist.density(1.1) == 0.0


@pytest.mark.parametrize("kind", KINDS)
def test_cumulative_is_nondecreasing(kind):
    dist = UserTypeDistribution(kind)
    values = dist.cumulative(np.linspace(0.0, 1.0, 1001))
    assert np.all(np.diff(values) >= 0.0)


@pytest.mark.parametrize("kind", KINDS)
def test_scalar_and_array_cumulative_agree(kind):
    dist = UserTypeDistribution(kind)
    alphas = np.linspace(0.0, 1.0, 37)
    array_values = dist.cumulative(alphas)
    for a, c in zip(alphas, array_values):
        assert dist.cumulative(float(a)) == pytest.approx(float(c), abs=1e-15)


@pytest.mark.parametrize("kind, mean", [
    (DistributionKind.UNIFORM, 0.5),
    (DistributionKind.DECREASING_LINEAR, 1.0 / 3.0),
    (DistributionKind.INCREASING_LINEAR, 2.0 / 3.0),
    (DistributionKind.TRIANGULAR, 0.5),
])
def test_mean_over_whole_support(kind, mean):
    assert UserTypeDistribution(kind).mean_between(0.0, 1.0) == pytest.approx(mean)


def test_triangular_is_continuous_at_the_peak():
    dist = UserTypeDistribution(DistributionKind.TRIANGULAR)
    assert dist.cumulative(0.5) == pytest.approx(0.5)
    assert dist.density(0.5) == pytest.approx(2.0)
    assert dist.mean_between(0.0, 0.5) == pytest.approx(1.0 / 6.0)


def test_empty_interval_has_no_mass():
    dist = UserTypeDistribution(DistributionKind.INCREASING_LINEAR)
    assert dist.mass_between(0.6, 0.4) == 0.0
    assert dist.mean_between(0.6, 0.6) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    kind=st.sampled_from(KINDS),
    a=st.floats(min_value=0.0, max_value=1.0),
    b=st.floats(min_value=0.0, max_value=1.0),
)
def test_closed_forms_match_numeric_integrals(kind, a, b):
    a, b = min(a, b), max(a, b)
    dist = UserTypeDistribution(kind)

    mass = _midpoint_integral(dist.density, a, b)
    mean = _midpoint_integral(lambda x: x * dist.density(x), a, b)

    assert dist.mass_between(a, b) == pytest.approx(mass, abs=1e-6)
    assert dist.mean_between(a, b) == pytest.approx(mean, abs=1e-6)


@pytest.mark.parametrize("name, kind", [
    ("uniform", DistributionKind.UNIFORM),
    ("f1", DistributionKind.DECREASING_LINEAR),
    ("F2", DistributionKind.INCREASING_LINEAR),
    ("f3", DistributionKind.TRIANGULAR),
    ("triangular", DistributionKind.TRIANGULAR),
    ("DECREASING_LINEAR", DistributionKind.DECREASING_LINEAR),
])
def test_from_name(name, kind):
    assert UserTypeDistribution.from_name(name).kind is kind


def test_from_name_rejects_unknown_kind():
    with pytest.raises(ValueError):
        UserTypeDistribution.from_name("lognormal")
