"""
Brute-force reference implementations.

Nothing here calls the closed forms or the demand fixed point in
tasks.market: users are a weighted alpha grid and every quantity is a sum
over the users an operator actually keeps.
"""
import logging
from dataclasses import dataclass

import numpy as np

from tasks.market import MarketOutcome
from tasks.market_tables import GRID_DECIMALS

logger = logging.getLogger(__name__)


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    alpha_step: float = 1e-5
    price_step: float = 0.01
    capacity_step: float = 1e-4
    capacity_max: float = 5.0

    def __post_init__(self):
        for name in ("alpha_step", "price_step", "capacity_step", "capacity_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.alpha_step > 0.5 or self.price_step > 1.0:
            raise ValueError("grid steps must fit inside [0, 1]")
        # cell weights are alpha_step, so the cells must tile [0, 1] exactly
        n = round(1.0 / self.alpha_step)
        if abs(n * self.alpha_step - 1.0) > 1e-9:
            raise ValueError(f"alpha_step must divide 1, got {self.alpha_step}")

    def alphas(self):
        """Cell midpoints of the user-type grid."""
        n = int(round(1.0 / self.alpha_step))
        return (np.arange(n) + 0.5) / n

    def prices(self):
        n = int(np.floor(1.0 / self.price_step + 1e-9))
        return np.round(np.arange(n + 1) * self.price_step, GRID_DECIMALS)


# USER ASSIGNMENT
def _keep_stable_prefix(alphas, weights, k, M):
    """
    Users are candidates sorted by alpha. A prefix of n of them is stable
    when the top one still meets its QoS under the prefix's congestion:
    alpha_n <= 1 - W_n/(kM). The violation grows with n, so the stable
    subscriber set is the longest prefix with no violation.
    """
    if k <= 0 or alphas.size == 0:
        return 0

    load = np.cumsum(weights)
    violation = alphas - (1.0 - load / (k * M))

    if np.any(np.diff(violation) < -1e-12):
        raise OracleError("QoS violation is not monotone along the candidate users")

    return int(np.count_nonzero(violation <= 0.0))


def _assign(params, p_i, p_j, grid):
    """Boolean masks over the alpha grid: subscribers of i and of j."""
    if p_i == p_j:
        raise ValueError(f"equal prices are excluded, got p_i = p_j = {p_i}")

    alphas = grid.alphas()
    weights = params.dist.density(alphas) * grid.alpha_step * params.M

    low_is_i = p_i < p_j
    p_low, p_high = (p_i, p_j) if low_is_i else (p_j, p_i)
    k_low, k_high = (params.k_i, params.k_j) if low_is_i else (params.k_j, params.k_i)

    low_mask = np.zeros(alphas.size, dtype=bool)
    candidates = np.flatnonzero(alphas >= p_low)
    kept = _keep_stable_prefix(alphas[candidates], weights[candidates], k_low, params.M)
    low_mask[candidates[:kept]] = True

    top_low = alphas[candidates[kept - 1]] if kept else -np.inf
    high_mask = np.zeros(alphas.size, dtype=bool)
    candidates = np.flatnonzero((alphas >= p_high) & (alphas > top_low))
    kept = _keep_stable_prefix(alphas[candidates], weights[candidates], k_high, params.M)
    high_mask[candidates[:kept]] = True

    if low_is_i:
        return alphas, weights, low_mask, high_mask
    return alphas, weights, high_mask, low_mask


def _qos(M, k, d):
    return 1.0 - d / (k * M) if k > 0 else 0.0


def brute_force_market(params, p_i, p_j, grid=None):
    """
    Users on the alpha grid pick the cheapest operator whose price they
    accept and whose QoS they still get once everyone else has settled.
    """
    grid = grid or GridSpec()
    alphas, weights, mask_i, mask_j = _assign(params, p_i, p_j, grid)

    d_i = float(weights[mask_i].sum())
    d_j = float(weights[mask_j].sum())
    q_i = _qos(params.M, params.k_i, d_i)
    q_j = _qos(params.M, params.k_j, d_j)

    lower_i = float(alphas[mask_i].min()) if d_i > 0 else p_i
    lower_j = float(alphas[mask_j].min()) if d_j > 0 else p_j

    return MarketOutcome(
        M=params.M,
        p_i=p_i, p_j=p_j,
        d_i=d_i, d_j=d_j,
        q_i=q_i, q_j=q_j,
        r_i=p_i * d_i, r_j=p_j * d_j,
        lower_i=lower_i, lower_j=lower_j,
    )


def brute_force_best_response(params, k_i, k_j, p_j, grid=None):
    """Price-grid argmax of i's brute-force revenue; the lower price wins ties."""
    grid = grid or GridSpec()
    market = params.with_capacities(k_i, k_j)

    best_price, best_revenue = None, -np.inf
    for price in grid.prices():
        price = float(price)
        if abs(price - p_j) < 1e-12:
            continue
        revenue = brute_force_market(market, price, p_j, grid).r_i
        if revenue > best_revenue:
            best_price, best_revenue = price, revenue

    return best_price


def brute_force_welfare(params, p_i, p_j, grid=None):
    """Sum of (alpha - price) over every subscriber, per M."""
    grid = grid or GridSpec()
    alphas, weights, mask_i, mask_j = _assign(params, p_i, p_j, grid)

    welfare = np.sum((alphas[mask_i] - p_i) * weights[mask_i])
    welfare += np.sum((alphas[mask_j] - p_j) * weights[mask_j])
    return float(welfare) / params.M


# GENERIC ORACLES
def grid_argmax(objective, lower, upper, step):
    """argmax of objective on lower, lower+step, ..., upper; first maximum wins."""
    if not step > 0 or upper < lower:
        raise ValueError(f"bad grid [{lower}, {upper}] step {step}")

    n = int(np.floor((upper - lower) / step + 1e-9))
    xs = lower + np.arange(n + 1) * step
    values = np.array([objective(float(x)) for x in xs])
    return float(xs[int(np.argmax(values))])


def bisect_root(fn, lower, upper, tol=1e-13, max_iterations=200):
    """Root of a function that changes sign on [lower, upper]."""
    f_lower, f_upper = fn(lower), fn(upper)
    if f_lower == 0:
        return lower
    if f_upper == 0:
        return upper
    if (f_lower > 0) == (f_upper > 0):
        raise ValueError(f"no sign change on [{lower}, {upper}]")

    for _ in range(max_iterations):
        mid = 0.5 * (lower + upper)
        f_mid = fn(mid)
        if f_mid == 0 or upper - lower < tol:
            return mid
        if (f_mid > 0) == (f_lower > 0):
            lower, f_lower = mid, f_mid
        else:
            upper = mid

    logger.debug("bisection stopped at max_iterations=%d", max_iterations)
    return 0.5 * (lower + upper)
