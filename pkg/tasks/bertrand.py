import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from tasks.market import Operator, demand_low_price, simulate_market
from tasks.market_tables import GRID_DECIMALS, PARETO_TOL, REVENUE_TIE_RTOL

logger = logging.getLogger(__name__)

# QoS boundary must sit this far below a price before it counts as unconstrained
_BOUNDARY_TOL = 1e-9


class Branch(Enum):
    MONOPOLY_HALF = "monopoly_half"
    UNDERCUT = "undercut"
    LONG_JUMP = "long_jump"


class RegulationCase(Enum):
    KI_LESS_THAN_2KJ = "ki<2kj"
    KI_EQUALS_2KJ = "ki=2kj"
    KI_GREATER_THAN_2KJ = "ki>2kj"


@dataclass(frozen=True)
class BestResponse:
    price: float
    branch: Branch
    expected_revenue: float


@dataclass(frozen=True)
class RegulatedEquilibrium:
    """
    Closed-form end point of price-change-limited play.

    p_i / p_j are physical labels. For the tie case k_i = 2k_j the second
    valid point is kept in `alternative`.
    """
    p_i: float
    p_j: float
    last_mover: Operator
    case: RegulationCase
    alternative: Optional[Tuple[float, float]] = None

    @property
    def prices(self):
        return self.p_i, self.p_j


# PRICE GRID
def snap_to_grid(price, epsilon):
    """Nearest multiple of epsilon inside [0, 1]."""
    ticks = round(price / epsilon)
    return min(1.0, max(0.0, round(ticks * epsilon, GRID_DECIMALS)))


def price_grid(epsilon):
    """Candidate prices 0, eps, 2*eps, ... up to 1."""
    n = int(math.floor(1.0 / epsilon + 1e-9))
    grid = [round(t * epsilon, GRID_DECIMALS) for t in range(n + 1)]
    if grid[-1] < 1.0:
        grid.append(1.0)
    return grid


def undercut(p_opp, epsilon):
    """One tick below the opponent; stays on the grid when p_opp is on it."""
    return max(0.0, round(p_opp - epsilon, GRID_DECIMALS))


def is_strictly_better(revenue, best_revenue):
    """Revenue comparison with a relative tie band; ties keep the incumbent."""
    scale = max(abs(revenue), abs(best_revenue))
    return revenue - best_revenue > REVENUE_TIE_RTOL * scale


# SINGLE-SIDED OPTIMA (uniform users)
def best_response_low(k_i, p_j, epsilon):
    """Best price for i when it stays below p_j."""
    if p_j > 0.5:
        return 0.5
    return undercut(p_j, epsilon)


def best_response_high(k_j, p_j):
    """Best price for i when it stays above p_j."""
    if p_j >= (1.0 - k_j) / 2.0:
        return (k_j + p_j) / (k_j + 1.0)
    return 0.5


# CLOSED-FORM BEST RESPONSE (uniform users)
def best_response(params, k_i, k_j, p_j):
    """
    Piecewise best reply of an operator with capacity k_i to price p_j of
    an opponent with capacity k_j:

        p_j > 1/2                       -> 1/2
        1/(k_j+2) < p_j <= 1/2          -> p_j - eps
        p_j < (1-k_j)/2   (k_j < 1)     -> 1/2
        otherwise                       -> (k_j + p_j)/(k_j + 1)

    Undercuts sit exactly one eps below p_j, long jumps are exact.
    """
    if not params.dist.is_uniform:
        raise ValueError(
            f"closed-form best response needs uniform users, got {params.dist.name}"
        )

    eps = params.epsilon

    if p_j > 0.5:
        price, branch = 0.5, Branch.MONOPOLY_HALF
    elif p_j > 1.0 / (k_j + 2.0):
        price, branch = undercut(p_j, eps), Branch.UNDERCUT
    elif k_j < 1.0 and p_j < (1.0 - k_j) / 2.0:
        price, branch = 0.5, Branch.MONOPOLY_HALF
    else:
        price, branch = (k_j + p_j) / (k_j + 1.0), Branch.LONG_JUMP

    # only reachable with k_j = 0 and p_j = 1/2
    if price == p_j:
        price, branch = undercut(p_j, eps), Branch.UNDERCUT

    market = params.with_capacities(k_i, k_j)
    revenue = simulate_market(market, price, p_j).r_i

    return BestResponse(price=price, branch=branch, expected_revenue=revenue)


# GRID BEST RESPONSE (any distribution)
def _monopoly_revenue(market, k, price):
    if not 0.0 <= price <= 1.0:
        return -math.inf
    return price * demand_low_price(market, k, price)


def _classify_numeric(market, k_i, p_j, price):
    eps = market.epsilon

    if price < p_j:
        here = _monopoly_revenue(market, k_i, price)
        above = _monopoly_revenue(market, k_i, price + eps)
        if above <= here:
            return Branch.MONOPOLY_HALF
        return Branch.UNDERCUT

    q_opp = simulate_market(market, price, p_j).q_j
    if q_opp < price - _BOUNDARY_TOL:
        here = _monopoly_revenue(market, k_i, price)
        if (_monopoly_revenue(market, k_i, price - eps) <= here
                and _monopoly_revenue(market, k_i, price + eps) <= here):
            return Branch.MONOPOLY_HALF
    return Branch.LONG_JUMP


def best_response_numeric(params, k_i, k_j, p_j):
    """
    Revenue argmax over the price grid {0, eps, ..., 1} minus p_j, scored
    with simulate_market. Ties go to the lower price.
    """
    market = params.with_capacities(k_i, k_j)

    best_price = None
    best_revenue = -math.inf

    for price in price_grid(params.epsilon):
        if abs(price - p_j) < 1e-12:
            continue

        revenue = simulate_market(market, price, p_j).r_i

        if best_price is None or is_strictly_better(revenue, best_revenue):
            best_price = price
            best_revenue = revenue

    branch = _classify_numeric(market, k_i, p_j, best_price)
    logger.debug("numeric BR to %.4f: %.4f (%s)", p_j, best_price, branch.value)

    return BestResponse(price=best_price, branch=branch, expected_revenue=best_revenue)


def respond(params, k_i, k_j, p_j, numeric=False):
    """Closed form for uniform users unless numeric is forced."""
    if numeric or not params.dist.is_uniform:
        return best_response_numeric(params, k_i, k_j, p_j)
    return best_response(params, k_i, k_j, p_j)


@dataclass(frozen=True)
class BestResponseRow:
    p_opponent: float
    reply_i: BestResponse
    reply_j: BestResponse


def best_response_table(params, numeric=False):
    """Each operator's reply to every grid price the other could charge."""
    rows = []
    for p in price_grid(params.epsilon):
        rows.append(BestResponseRow(
            p_opponent=p,
            reply_i=respond(params, params.k_i, params.k_j, p, numeric=numeric),
            reply_j=respond(params, params.k_j, params.k_i, p, numeric=numeric),
        ))
    logger.info("best-response table: %d opponent prices", len(rows))
    return rows


# NO PURE EQUILIBRIUM
def find_pure_equilibria(params, k_i, k_j):
    """
    Scan every grid price of j, let i reply, and keep the pairs where j's
    reply to that price is p_j again.
    """
    found = []
    for p_j in price_grid(params.epsilon):
        p_i = best_response(params, k_i, k_j, p_j).price
        reply = best_response(params, k_j, k_i, p_i).price
        if abs(reply - p_j) < 1e-12:
            found.append((p_i, p_j))

    if found:
        logger.info("pure equilibria at k=(%g, %g): %s", k_i, k_j, found)
    return found


# PRICE-CHANGE REGULATION
def check_epsilon_dominance(k_j, epsilon):
    """False (with a warning) when eps is too coarse for the final-move analysis."""
    bound = k_j / (2.0 * (k_j + 1.0))
    if epsilon >= bound:
        logger.warning(
            "epsilon %.4g >= k_j/(2(k_j+1)) = %.4g: undercut-then-jump may "
            "no longer be dominated in the final two moves", epsilon, bound
        )
        return False
    return True


def _leader_price(k_lead, k_last):
    if k_lead <= 2.0 * k_last:
        return 1.0 / (k_lead + 2.0)
    return (2.0 * k_last + 1.0) / (2.0 * (k_last + 1.0))


def regulated_equilibrium(k_i, k_j, last_mover=Operator.J):
    """
    End point of regulated play.

    The operator with the last price change is "j" in the formulas; when
    last_mover is I the capacities are swapped and the result mapped back.
    """
    if k_i <= 0 or k_j <= 0:
        raise ValueError(f"capacities must be positive, got ({k_i}, {k_j})")

    last_mover = Operator.parse(last_mover)
    if last_mover is Operator.J:
        k_lead, k_last = k_i, k_j
    else:
        k_lead, k_last = k_j, k_i

    low = (1.0 / (k_lead + 2.0), (k_lead + 1.0) / (k_lead + 2.0))
    high = ((2.0 * k_last + 1.0) / (2.0 * (k_last + 1.0)), 0.5)

    alternative = None
    if math.isclose(k_lead, 2.0 * k_last, rel_tol=1e-12, abs_tol=1e-15):
        case, (p_lead, p_last), alternative = RegulationCase.KI_EQUALS_2KJ, low, high
    elif k_lead < 2.0 * k_last:
        case, (p_lead, p_last) = RegulationCase.KI_LESS_THAN_2KJ, low
    else:
        case, (p_lead, p_last) = RegulationCase.KI_GREATER_THAN_2KJ, high

    if last_mover is Operator.J:
        return RegulatedEquilibrium(p_lead, p_last, last_mover, case, alternative)

    if alternative is not None:
        alternative = (alternative[1], alternative[0])
    return RegulatedEquilibrium(p_last, p_lead, last_mover, case, alternative)


def is_pareto_optimal(k_l, k_h, p_l, p_h):
    """
    Sufficient condition only: p_l <= 1/2 <= p_h and p_h is at or above
    the low operator's QoS level. False means "not certified".
    """
    if p_l >= p_h:
        raise ValueError(f"p_l must be below p_h, got {p_l} >= {p_h}")

    return (
        p_l <= 0.5 + PARETO_TOL
        and p_h >= 0.5 - PARETO_TOL
        and p_h >= (k_l + p_l) / (k_l + 1.0) - PARETO_TOL
    )
