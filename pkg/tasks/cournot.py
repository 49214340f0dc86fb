import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from tasks.market import Operator
from tasks.market_tables import DEVIATION_RTOL, FEASIBILITY_TOL, GRID_DECIMALS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwoStageEquilibrium:
    """
    Capacities and prices of the capacity-then-price game at unit cost gamma.
    Capacities and prices are None when the market is infeasible.
    """
    gamma: float
    F_value: float
    feasible: bool
    last_mover: Operator = Operator.J
    k_i: Optional[float] = None
    k_j: Optional[float] = None
    p_i: Optional[float] = None
    p_j: Optional[float] = None

    @property
    def total_capacity(self):
        if not self.feasible:
            return 0.0
        return self.k_i + self.k_j

    @property
    def price_gap(self):
        if not self.feasible:
            return None
        return abs(self.p_j - self.p_i)


def _require_positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def _depressed_cubic_root(p, r):
    """
    Real root of y^3 + p*y - r = 0 for p, r > 0.

    The second cube root of the textbook formula equals -p/(3u), which
    avoids subtracting two nearly equal cube roots.
    """
    u = float(np.cbrt(r / 2.0 + math.sqrt(r * r / 4.0 + p ** 3 / 27.0)))
    return u - p / (3.0 * u)


# CAPACITY OPTIMISERS
def solve_ratio_linear(a, b, c):
    """argmax over x >= 0 of b*x/(x+a) - c*x."""
    _require_positive(a=a, b=b, c=c)
    return max(0.0, math.sqrt(a * b / c) - a)


def solve_ratio_quadratic(a, b, c):
    """
    argmax over 0 <= x <= a of b*x/(x+a)^2 - c*x.

    With y = x + a the first-order condition is y^3 + (b/c)*y - 2ab/c = 0.
    """
    _require_positive(a=a, b=b, c=c)
    y = _depressed_cubic_root(b / c, 2.0 * a * b / c)
    return min(a, max(0.0, y - a))


def feasibility(gamma):
    """F(gamma), the root of gamma*F^3 + F - 4 = 0. The market is feasible iff F > 2."""
    _require_positive(gamma=gamma)
    return _depressed_cubic_root(1.0 / gamma, 4.0 / gamma)


# STAGE PROFITS (per M)
def cournot_profits(k_i, k_j, gamma):
    """
    Capacity-stage profits when j holds the last price change, using the
    regulated price map: k_i <= 2k_j gives i the low price 1/(k_i+2),
    otherwise j sits at 1/2.
    """
    if k_i < 0 or k_j < 0:
        raise ValueError(f"capacities must be nonnegative, got ({k_i}, {k_j})")

    if k_i <= 2.0 * k_j:
        revenue_i = k_i / (k_i + 2.0) ** 2
        revenue_j = (k_i + 1.0) / (k_i + 2.0) ** 2 * k_j / (k_j + 1.0)
    else:
        revenue_i = (2.0 * k_j + 1.0) / (4.0 * (k_j + 1.0) ** 2) * k_i / (k_i + 1.0)
        revenue_j = k_j / (4.0 * (k_j + 1.0))

    return revenue_i - gamma * k_i, revenue_j - gamma * k_j


def case2_candidate(gamma):
    """
    Optimisers under the assumption k_i >= 2k_j: j best-responds as a
    price-1/2 operator, i against it. The result always has k_i < 2k_j
    (for gamma < 1/4), so this case never yields an equilibrium.
    """
    _require_positive(gamma=gamma)
    k_j = solve_ratio_linear(1.0, 0.25, gamma)
    k_i = solve_ratio_linear(1.0, (2.0 * k_j + 1.0) / (4.0 * (k_j + 1.0) ** 2), gamma)
    return k_i, k_j


# EQUILIBRIUM CHECK
def find_profitable_deviation(gamma, k_lead, k_last):
    """
    A profitable unilateral capacity change of either operator, or None.

    Both profit functions are concave on each side of the k_lead = 2k_last
    switch, so each side's optimum (clamped to that side) plus k = 0 are
    the only candidates. Returns (role, capacity, gain) for the first
    candidate that beats the current profit.
    """
    base_lead, base_last = cournot_profits(k_lead, k_last, gamma)

    share = (k_lead + 1.0) / (k_lead + 2.0) ** 2
    coef = (2.0 * k_last + 1.0) / (4.0 * (k_last + 1.0) ** 2)
    lead_candidates = [
        0.0,
        min(solve_ratio_quadratic(2.0, 1.0, gamma), 2.0 * k_last),
        max(solve_ratio_linear(1.0, coef, gamma), 2.0 * k_last * (1.0 + 1e-9)),
    ]
    last_candidates = [
        0.0,
        max(solve_ratio_linear(1.0, share, gamma), 0.5 * k_lead),
        min(solve_ratio_linear(1.0, 0.25, gamma), 0.5 * k_lead * (1.0 - 1e-9)),
    ]

    for k in lead_candidates:
        gain = cournot_profits(k, k_last, gamma)[0] - base_lead
        if gain > DEVIATION_RTOL * max(abs(base_lead), 1e-9):
            return "leader", k, gain
    for k in last_candidates:
        gain = cournot_profits(k_lead, k, gamma)[1] - base_last
        if gain > DEVIATION_RTOL * max(abs(base_last), 1e-9):
            return "last mover", k, gain
    return None


# TWO-STAGE EQUILIBRIUM
def two_stage_equilibrium(gamma, last_mover=Operator.J):
    _require_positive(gamma=gamma)
    last_mover = Operator.parse(last_mover)

    F = feasibility(gamma)
    if not F > 2.0 + FEASIBILITY_TOL:
        logger.debug("gamma=%.4f infeasible (F=%.9f)", gamma, F)
        return TwoStageEquilibrium(gamma=gamma, F_value=F, feasible=False, last_mover=last_mover)

    k_lead = F - 2.0
    k_last = math.sqrt((k_lead + 1.0) / ((k_lead + 2.0) ** 2 * gamma)) - 1.0
    p_lead = 1.0 / F
    p_last = 1.0 - 1.0 / F

    if k_lead > 2.0 * k_last:
        logger.warning(
            "gamma=%.4f: leader capacity %.6f exceeds twice the follower's %.6f",
            gamma, k_lead, k_last,
        )

    deviation = find_profitable_deviation(gamma, k_lead, k_last)
    if deviation is not None:
        role, k, gain = deviation
        raise RuntimeError(
            f"gamma={gamma}: {role} gains {gain:.3g} by moving capacity to {k:.6f}"
        )

    if last_mover is Operator.J:
        k_i, k_j, p_i, p_j = k_lead, k_last, p_lead, p_last
    else:
        k_i, k_j, p_i, p_j = k_last, k_lead, p_last, p_lead

    return TwoStageEquilibrium(
        gamma=gamma, F_value=F, feasible=True, last_mover=last_mover,
        k_i=k_i, k_j=k_j, p_i=p_i, p_j=p_j,
    )


def gamma_grid(lower, upper, step):
    """lower, lower+step, ... up to upper (inclusive), rounded to kill drift."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if upper < lower:
        raise ValueError(f"empty range [{lower}, {upper}]")
    n = int(math.floor((upper - lower) / step + 1e-9))
    return [round(lower + i * step, GRID_DECIMALS) for i in range(n + 1)]


def equilibrium_sweep(gammas, last_mover=Operator.J):
    gammas = list(gammas)
    if not gammas:
        raise ValueError("gamma grid is empty")

    points = [two_stage_equilibrium(g, last_mover) for g in gammas]
    logger.info(
        "equilibrium sweep: %d points, %d feasible",
        len(points), sum(p.feasible for p in points),
    )
    return points
