import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from tasks.bertrand import (
    Branch,
    _leader_price,
    best_response,
    best_response_numeric,
    check_epsilon_dominance,
    is_strictly_better,
    price_grid,
    respond,
    snap_to_grid,
)
from tasks.market import MarketOutcome, Operator, simulate_market
from tasks.market_tables import (
    DEFAULT_INITIAL_PRICE,
    DEFAULT_MAX_CHANGES,
    DEFAULT_MAX_MOVES,
)

logger = logging.getLogger(__name__)


class VerdictKind(Enum):
    CYCLE = "cycle"
    CONVERGED = "converged"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    period: Optional[int] = None
    prices: Optional[Tuple[float, float]] = None

    @classmethod
    def cycle(cls, period):
        return cls(VerdictKind.CYCLE, period=period)

    @classmethod
    def converged(cls, p_i, p_j):
        return cls(VerdictKind.CONVERGED, prices=(p_i, p_j))

    @classmethod
    def truncated(cls):
        return cls(VerdictKind.TRUNCATED)

    @property
    def label(self):
        if self.kind is VerdictKind.CYCLE:
            return f"cycle period={self.period}"
        if self.kind is VerdictKind.CONVERGED:
            return f"converged p_i={self.prices[0]:.9f} p_j={self.prices[1]:.9f}"
        return "truncated"


@dataclass(frozen=True)
class Move:
    step: int
    mover: Operator
    price: float
    revenue: float
    previous_price: float
    branch: Optional[Branch]
    outcome: MarketOutcome

    @property
    def is_upward(self):
        return self.price > self.previous_price


@dataclass(frozen=True)
class DynamicsTrace:
    p_i0: float
    p_j0: float
    moves: Tuple[Move, ...]
    verdict: Verdict

    @property
    def final_prices(self):
        if not self.moves:
            return self.p_i0, self.p_j0
        last = self.moves[-1].outcome
        return last.p_i, last.p_j

    @property
    def period(self):
        return self.verdict.period

    def upward_moves(self):
        return [m for m in self.moves if m.is_upward]

    def prices_after(self, step):
        """(p_i, p_j) once move `step` has been played (0 = initial prices)."""
        if step == 0:
            return self.p_i0, self.p_j0
        outcome = self.moves[step - 1].outcome
        return outcome.p_i, outcome.p_j


def _play(params, prices, mover, step, reply):
    previous = prices[mover]
    prices[mover] = reply.price
    outcome = simulate_market(params, prices[Operator.I], prices[Operator.J])
    move = Move(
        step=step,
        mover=mover,
        price=reply.price,
        revenue=outcome.revenue(mover),
        previous_price=previous,
        branch=reply.branch,
        outcome=outcome,
    )
    logger.debug(
        "move %d: %s -> %.6f (%s), prices (%.6f, %.6f)",
        step, mover.value, reply.price,
        reply.branch.value if reply.branch else "-",
        outcome.p_i, outcome.p_j,
    )
    return move


def _myopic_reply(params, prices, mover, numeric):
    k_mover = params.capacity(mover)
    k_opp = params.capacity(mover.other)
    return respond(params, k_mover, k_opp, prices[mover.other], numeric=numeric)


# UNREGULATED PRICE WAR
def run_dynamics(params, p_i0=DEFAULT_INITIAL_PRICE, p_j0=DEFAULT_INITIAL_PRICE,
                 first_mover=Operator.I, max_moves=DEFAULT_MAX_MOVES, numeric=False):
    """
    Alternating myopic best responses.

    Stops on a repeated (p_i, p_j, next mover) state (cycle), on two
    consecutive moves that leave prices unchanged (converged), or after
    max_moves moves (truncated).
    """
    if max_moves < 1:
        raise ValueError(f"max_moves must be at least 1, got {max_moves}")

    eps = params.epsilon
    numeric = numeric or not params.dist.is_uniform
    prices = {Operator.I: snap_to_grid(p_i0, eps), Operator.J: snap_to_grid(p_j0, eps)}
    mover = Operator.parse(first_mover)

    seen = {(prices[Operator.I], prices[Operator.J], mover): 0}
    moves = []
    unchanged = 0
    verdict = Verdict.truncated()

    for step in range(1, max_moves + 1):
        reply = _myopic_reply(params, prices, mover, numeric)
        move = _play(params, prices, mover, step, reply)
        moves.append(move)
        mover = mover.other

        unchanged = unchanged + 1 if move.price == move.previous_price else 0
        if unchanged >= 2:
            verdict = Verdict.converged(prices[Operator.I], prices[Operator.J])
            break

        state = (prices[Operator.I], prices[Operator.J], mover)
        if state in seen:
            verdict = Verdict.cycle(step - seen[state])
            break
        seen[state] = step

    logger.info("dynamics stopped after %d moves: %s", len(moves), verdict.label)
    return DynamicsTrace(
        p_i0=snap_to_grid(p_i0, eps), p_j0=snap_to_grid(p_j0, eps),
        moves=tuple(moves), verdict=verdict,
    )


# PRICE-CHANGE-LIMITED PLAY
def first_mover_for(last_mover, max_changes):
    """Who opens so that move number max_changes belongs to last_mover."""
    last_mover = Operator.parse(last_mover)
    return last_mover if max_changes % 2 == 1 else last_mover.other


@dataclass(frozen=True)
class _Commitment:
    price: float
    branch: Optional[Branch] = None


def _final_pair_closed_form(params, lead, last, p_last_now):
    k_lead, k_last = params.capacity(lead), params.capacity(last)

    p_lead = _leader_price(k_lead, k_last)
    # the intermediate market needs two distinct prices
    if p_lead == p_last_now:
        p_lead = snap_to_grid(p_lead - params.epsilon, params.epsilon)

    last_reply = best_response(params, k_last, k_lead, p_lead)
    return _Commitment(p_lead), last_reply


def _final_pair_numeric(params, lead, last, p_last_now):
    """
    Backward induction on the grid: the leader tries every price, predicts
    the last mover's grid best response, and keeps its best outcome.
    """
    k_lead, k_last = params.capacity(lead), params.capacity(last)

    best = None
    best_revenue = -math.inf

    for p_lead in price_grid(params.epsilon):
        if p_lead == p_last_now:
            continue
        reply = best_response_numeric(params, k_last, k_lead, p_lead)
        prices = {lead: p_lead, last: reply.price}
        revenue = simulate_market(params, prices[Operator.I], prices[Operator.J]).revenue(lead)

        if best is None or is_strictly_better(revenue, best_revenue):
            best = (p_lead, reply)
            best_revenue = revenue

    p_lead, last_reply = best
    return _Commitment(p_lead), last_reply


def run_regulated_dynamics(params, p_i0=DEFAULT_INITIAL_PRICE, p_j0=DEFAULT_INITIAL_PRICE,
                           max_changes=DEFAULT_MAX_CHANGES, last_mover=Operator.J,
                           numeric=False):
    """
    Price war under a cap of max_changes price moves.

    Moves 1 .. max_changes-2 are myopic best responses. The last two are
    backward induction: the leader commits to the price that is best given
    the last mover's reply, then the last mover replies.
    """
    if max_changes < 2:
        raise ValueError(f"max_changes must be at least 2, got {max_changes}")

    eps = params.epsilon
    last_mover = Operator.parse(last_mover)
    lead = last_mover.other
    numeric = numeric or not params.dist.is_uniform

    check_epsilon_dominance(params.capacity(last_mover), eps)

    prices = {Operator.I: snap_to_grid(p_i0, eps), Operator.J: snap_to_grid(p_j0, eps)}
    mover = first_mover_for(last_mover, max_changes)
    moves = []

    for step in range(1, max_changes - 1):
        reply = _myopic_reply(params, prices, mover, numeric)
        moves.append(_play(params, prices, mover, step, reply))
        mover = mover.other

    if numeric:
        lead_reply, last_reply = _final_pair_numeric(params, lead, last_mover, prices[last_mover])
    else:
        lead_reply, last_reply = _final_pair_closed_form(params, lead, last_mover, prices[last_mover])

    moves.append(_play(params, prices, lead, max_changes - 1, lead_reply))
    moves.append(_play(params, prices, last_mover, max_changes, last_reply))

    final = moves[-1].outcome
    verdict = Verdict.converged(final.p_i, final.p_j)

    if not final.is_segmented:
        logger.warning("regulated end point (%.4f, %.4f) is not segmented", final.p_i, final.p_j)
    logger.info("regulated dynamics: %s", verdict.label)

    return DynamicsTrace(
        p_i0=snap_to_grid(p_i0, eps), p_j0=snap_to_grid(p_j0, eps),
        moves=tuple(moves), verdict=verdict,
    )
