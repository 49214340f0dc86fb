import logging
from dataclasses import dataclass
from typing import List, Optional

from tasks.cournot import TwoStageEquilibrium, gamma_grid, two_stage_equilibrium
from tasks.market import MarketParams, Operator, simulate_market
from tasks.market_tables import (
    DEFAULT_GAMMA_C,
    DEFAULT_GAMMA_T_MAX,
    DEFAULT_GAMMA_T_MIN,
    DEFAULT_GAMMA_T_STEP,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolicyPoint:
    gamma_c: float
    gamma_t: float
    equilibrium: TwoStageEquilibrium
    welfare_per_M: float
    revenue_per_M: float

    @property
    def feasible(self):
        return self.equilibrium.feasible

    @property
    def gamma(self):
        return self.gamma_c + self.gamma_t


@dataclass(frozen=True)
class TaxSweep:
    gamma_c: float
    points: List[PolicyPoint]

    def feasible_points(self):
        return [p for p in self.points if p.feasible]

    @property
    def revenue_argmax(self) -> Optional[PolicyPoint]:
        return _argmax(self.points, lambda p: p.revenue_per_M)

    @property
    def welfare_argmax(self) -> Optional[PolicyPoint]:
        return _argmax(self.points, lambda p: p.welfare_per_M)


def _argmax(points, key):
    best = None
    for point in points:
        if best is None or key(point) > key(best):
            best = point
    return best


# USER WELFARE
def interval_welfare(dist, lower, upper, price):
    """Integral of (alpha - price) f(alpha) over [lower, upper]."""
    if upper <= lower:
        return 0.0
    return dist.mean_between(lower, upper) - price * dist.mass_between(lower, upper)


def user_welfare(eq, params=None):
    """
    Net utility of all subscribers, per M, at an equilibrium.

    Each operator contributes the utilities of the users in the alpha
    interval it serves; everyone else gets zero.
    """
    params = params or MarketParams()
    if not params.dist.is_uniform:
        raise ValueError(f"welfare is defined for uniform users only, got {params.dist.name}")

    if not eq.feasible:
        logger.warning("welfare of an infeasible market (gamma=%.4f) is 0", eq.gamma)
        return 0.0

    market = params.with_capacities(eq.k_i, eq.k_j)
    outcome = simulate_market(market, eq.p_i, eq.p_j)

    welfare = 0.0
    for op in Operator:
        interval = outcome.served_interval(op)
        if interval is None:
            continue
        lower, upper = interval
        welfare += interval_welfare(params.dist, lower, upper, outcome.price(op))

    return welfare


# REGULATOR REVENUE
def regulator_revenue(eq, gamma_t):
    """Tax (or subsidy, when negative) per unit capacity times total capacity, per M."""
    if not eq.feasible:
        return 0.0
    return gamma_t * eq.total_capacity


# TAX SWEEP
def sweep_tax(gamma_c=DEFAULT_GAMMA_C,
              gamma_t_range=(DEFAULT_GAMMA_T_MIN, DEFAULT_GAMMA_T_MAX),
              step=DEFAULT_GAMMA_T_STEP,
              params=None,
              last_mover=Operator.J):
    if not gamma_c > 0:
        raise ValueError(f"gamma_c must be positive, got {gamma_c}")

    lower, upper = gamma_t_range
    taxes = gamma_grid(lower, upper, step)

    for gamma_t in taxes:
        if not gamma_c + gamma_t > 0:
            raise ValueError(
                f"gamma_c + gamma_t must stay positive, got {gamma_c} + {gamma_t}"
            )

    points = []
    for gamma_t in taxes:
        eq = two_stage_equilibrium(gamma_c + gamma_t, last_mover)
        points.append(PolicyPoint(
            gamma_c=gamma_c,
            gamma_t=gamma_t,
            equilibrium=eq,
            welfare_per_M=user_welfare(eq, params) if eq.feasible else 0.0,
            revenue_per_M=regulator_revenue(eq, gamma_t),
        ))

    sweep = TaxSweep(gamma_c=gamma_c, points=points)
    best = sweep.revenue_argmax
    logger.info(
        "tax sweep over %d points: revenue peaks at gamma_t=%.4f (%.6f per M)",
        len(points), best.gamma_t, best.revenue_per_M,
    )
    return sweep
