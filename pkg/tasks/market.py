import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from scipy.optimize import brentq

from tasks.distributions import UNIFORM, UserTypeDistribution
from tasks.market_tables import (
    DEFAULT_CAPACITY,
    DEFAULT_EPSILON,
    DEFAULT_POPULATION,
    DEMAND_XTOL,
)

logger = logging.getLogger(__name__)


class Operator(Enum):
    I = "i"
    J = "j"

    @property
    def other(self):
        return Operator.J if self is Operator.I else Operator.I

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for op in cls:
            if op.value == key:
                return op
        raise ValueError(f"operator must be 'i' or 'j', got {value!r}")


@dataclass(frozen=True)
class MarketParams:
    """
    The static world of one duopoly market.

    M       : user population (real scale factor, results are often per M)
    k_i, k_j: capacities normalised by the reference capacity
    epsilon : minimum unit of a price change
    dist    : user-type distribution
    """
    M: float = DEFAULT_POPULATION
    k_i: float = DEFAULT_CAPACITY
    k_j: float = DEFAULT_CAPACITY
    epsilon: float = DEFAULT_EPSILON
    dist: UserTypeDistribution = field(default=UNIFORM)

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError(f"M must be positive, got {self.M}")
        if self.k_i < 0 or self.k_j < 0:
            raise ValueError(f"capacities must be nonnegative, got ({self.k_i}, {self.k_j})")
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")
        if not isinstance(self.dist, UserTypeDistribution):
            raise ValueError(f"dist must be a UserTypeDistribution, got {self.dist!r}")

    def capacity(self, op):
        return self.k_i if Operator.parse(op) is Operator.I else self.k_j

    def with_capacities(self, k_i, k_j):
        return replace(self, k_i=k_i, k_j=k_j)

    def swapped(self):
        return replace(self, k_i=self.k_j, k_j=self.k_i)


@dataclass(frozen=True)
class MarketOutcome:
    """
    Demand, QoS and revenue of both operators at one price pair.

    lower_i / lower_j are the lower ends of the alpha interval each operator
    serves: its own price, or the competitor's QoS level when that is higher.
    """
    M: float
    p_i: float
    p_j: float
    d_i: float
    d_j: float
    q_i: float
    q_j: float
    r_i: float
    r_j: float
    lower_i: float
    lower_j: float

    def price(self, op):
        return self.p_i if Operator.parse(op) is Operator.I else self.p_j

    def demand(self, op):
        return self.d_i if Operator.parse(op) is Operator.I else self.d_j

    def qos(self, op):
        return self.q_i if Operator.parse(op) is Operator.I else self.q_j

    def revenue(self, op):
        return self.r_i if Operator.parse(op) is Operator.I else self.r_j

    @property
    def low_price_operator(self):
        return Operator.I if self.p_i < self.p_j else Operator.J

    def served_interval(self, op):
        """Alpha interval [lower, q] served by op, or None when it has no users."""
        op = Operator.parse(op)
        if self.demand(op) <= 0.0:
            return None
        lower = self.lower_i if op is Operator.I else self.lower_j
        return lower, self.qos(op)

    @property
    def is_segmented(self):
        """True when the high-price operator's lower limit is its own price."""
        high = self.low_price_operator.other
        lower = self.lower_i if high is Operator.I else self.lower_j
        return lower == self.price(high)

    def mirrored(self):
        return MarketOutcome(
            M=self.M,
            p_i=self.p_j, p_j=self.p_i,
            d_i=self.d_j, d_j=self.d_i,
            q_i=self.q_j, q_j=self.q_i,
            r_i=self.r_j, r_j=self.r_i,
            lower_i=self.lower_j, lower_j=self.lower_i,
        )

    def check_invariants(self, tol=1e-9):
        """Raise ValueError if demand, QoS or revenue leave their bounds."""
        for op in Operator:
            d, q, r, p = self.demand(op), self.qos(op), self.revenue(op), self.price(op)
            if not -tol * self.M <= d <= self.M * (1 + tol):
                raise ValueError(f"demand of {op.value} out of [0, M]: {d}")
            if not -tol <= q <= 1 + tol:
                raise ValueError(f"QoS of {op.value} out of [0, 1]: {q}")
            if abs(r - p * d) > tol * self.M:
                raise ValueError(f"revenue of {op.value} is not price x demand: {r} vs {p * d}")


# DEMAND FIXED POINT
def solve_demand_fixed_point(dist, M, k, lower_limit):
    """
    Solve d = M * (F(1 - d/(kM)) - F(lower_limit)) for d in [0, min(M, kM)].

    The residual d - M*(F(q) - F(lower)) is strictly increasing in d, so the
    bracket always holds a single root. Zero capacity or a lower limit at or
    above 1 gives zero demand.
    """
    if k <= 0 or lower_limit >= 1.0:
        logger.debug("zero demand: k=%g, lower limit=%g", k, lower_limit)
        return 0.0

    lower_limit = max(lower_limit, 0.0)
    base = dist.cumulative(lower_limit)
    if base >= 1.0:
        return 0.0

    kM = k * M
    upper = min(M, kM)

    def residual(d):
        q = 1.0 - d / kM
        return d - M * max(0.0, dist.cumulative(q) - base)

    if residual(upper) <= 0.0:
        logger.debug("demand clamped at min(M, kM) = %g", upper)
        return upper

    return brentq(residual, 0.0, upper, xtol=DEMAND_XTOL * M)


def _qos(M, k, d):
    if k <= 0:
        return 0.0
    return min(1.0, max(0.0, 1.0 - d / (k * M)))


# LOW-PRICE OPERATOR
def demand_low_price(params, k, p):
    """
    Demand of the cheaper operator: it is a monopolist on [p, q].
    Uniform users use d = k(1-p)M/(k+1); other kinds go to the fixed point.
    """
    if k <= 0 or p >= 1.0:
        return 0.0
    p = max(p, 0.0)

    if params.dist.is_uniform:
        return k * (1.0 - p) * params.M / (k + 1.0)

    return solve_demand_fixed_point(params.dist, params.M, k, p)


# HIGH-PRICE OPERATOR
def demand_high_price(params, p_high, p_low):
    """
    Market outcome when operator i charges p_high and operator j p_low.

    The cheaper operator j keeps its monopoly demand. Operator i serves
    users from max(p_high, q_j) up to its own QoS level q_i.
    """
    if p_high <= p_low:
        raise ValueError(f"p_high must exceed p_low, got {p_high} <= {p_low}")

    M = params.M
    k_high, k_low = params.k_i, params.k_j

    d_low = demand_low_price(params, k_low, p_low)

    if k_low > 0:
        q_low = 1.0 - d_low / (k_low * M)
        lower = max(p_high, q_low)
    else:
        lower = p_high

    if k_high <= 0 or p_high >= 1.0:
        d_high = 0.0
    elif params.dist.is_uniform:
        segmented = k_high * (1.0 - p_high) * M / (k_high + 1.0)
        if k_low > 0:
            d_high = min(segmented, k_high * d_low / ((k_high + 1.0) * k_low))
        else:
            d_high = segmented
        d_high = max(d_high, 0.0)
    else:
        d_high = solve_demand_fixed_point(params.dist, M, k_high, lower)

    return MarketOutcome(
        M=M,
        p_i=p_high, p_j=p_low,
        d_i=d_high, d_j=d_low,
        q_i=_qos(M, k_high, d_high), q_j=_qos(M, k_low, d_low),
        r_i=p_high * d_high, r_j=p_low * d_low,
        lower_i=lower, lower_j=max(p_low, 0.0),
    )


# MARKET SIMULATION (routes by price order)
def simulate_market(params, p_i, p_j):
    if p_i == p_j:
        raise ValueError(f"equal prices are excluded, got p_i = p_j = {p_i}")
    for name, p in (("p_i", p_i), ("p_j", p_j)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {p}")

    if p_i > p_j:
        return demand_high_price(params, p_i, p_j)

    return demand_high_price(params.swapped(), p_j, p_i).mirrored()
