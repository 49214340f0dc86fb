import logging
import math
import sys

import pandas as pd

from tasks.market_tables import CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)

DYNAMICS_COLUMNS = ["step", "mover", "p_i", "p_j", "d_i", "d_j", "r_i", "r_j"]
EQUILIBRIUM_COLUMNS = ["gamma", "F", "feasible", "k_i", "k_j", "p_i", "p_j"]
POLICY_COLUMNS = ["gamma_t", "feasible", "welfare_per_M", "revenue_per_M"]
BEST_RESPONSE_COLUMNS = ["p_opponent", "reply_i", "branch_i", "reply_j", "branch_j"]


# FRAMES
def dynamics_frame(trace):
    rows = []
    for move in trace.moves:
        try:
            move.outcome.check_invariants()
        except ValueError as exc:
            raise RuntimeError(f"move {move.step}: {exc}") from exc

        o = move.outcome
        rows.append({
            "step": move.step, "mover": move.mover.value,
            "p_i": o.p_i, "p_j": o.p_j,
            "d_i": o.d_i, "d_j": o.d_j,
            "r_i": o.r_i, "r_j": o.r_j,
        })
    return pd.DataFrame(rows, columns=DYNAMICS_COLUMNS)


def best_response_frame(rows):
    records = []
    for row in rows:
        for reply in (row.reply_i, row.reply_j):
            if not 0.0 <= reply.price <= 1.0:
                raise RuntimeError(f"reply {reply.price} to {row.p_opponent} outside [0, 1]")
        records.append({
            "p_opponent": row.p_opponent,
            "reply_i": row.reply_i.price, "branch_i": row.reply_i.branch.value,
            "reply_j": row.reply_j.price, "branch_j": row.reply_j.branch.value,
        })
    return pd.DataFrame(records, columns=BEST_RESPONSE_COLUMNS)


def _check_equilibrium(eq):
    if not eq.feasible:
        return
    if eq.k_i < 0 or eq.k_j < 0:
        raise RuntimeError(f"gamma={eq.gamma}: negative capacity ({eq.k_i}, {eq.k_j})")
    for p in (eq.p_i, eq.p_j):
        if not 0.0 <= p <= 1.0:
            raise RuntimeError(f"gamma={eq.gamma}: price {p} outside [0, 1]")


def equilibrium_frame(points):
    rows = []
    for eq in points:
        _check_equilibrium(eq)
        rows.append({
            "gamma": eq.gamma, "F": eq.F_value, "feasible": eq.feasible,
            "k_i": eq.k_i, "k_j": eq.k_j, "p_i": eq.p_i, "p_j": eq.p_j,
        })
    return pd.DataFrame(rows, columns=EQUILIBRIUM_COLUMNS)


def policy_frame(sweep):
    rows = []
    for point in sweep.points:
        _check_equilibrium(point.equilibrium)
        if point.welfare_per_M < -1e-12 or math.isnan(point.welfare_per_M):
            raise RuntimeError(f"gamma_t={point.gamma_t}: negative welfare {point.welfare_per_M}")
        rows.append({
            "gamma_t": point.gamma_t, "feasible": point.feasible,
            "welfare_per_M": point.welfare_per_M, "revenue_per_M": point.revenue_per_M,
        })
    return pd.DataFrame(rows, columns=POLICY_COLUMNS)


# RENDERING
def _footer_line(label, value, width):
    return ",".join([label, value] + [""] * (width - 2))


def render_csv(frame, footer=()):
    """
    CSV text with 9 digits after the point. Footer rows are (label, value)
    pairs padded to the frame's width.
    """
    text = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    width = len(frame.columns)
    for label, value in footer:
        text += _footer_line(label, value, width) + "\n"
    return text


def render_dynamics(trace):
    return render_csv(dynamics_frame(trace), footer=[("verdict", trace.verdict.label)])


def render_best_responses(rows):
    return render_csv(best_response_frame(rows))


def render_equilibria(points):
    return render_csv(equilibrium_frame(points))


def render_policy(sweep):
    footer = []
    best = sweep.revenue_argmax
    if best is not None:
        footer.append(("revenue_argmax", CSV_FLOAT_FORMAT % best.gamma_t))
    best = sweep.welfare_argmax
    if best is not None:
        footer.append(("welfare_argmax", CSV_FLOAT_FORMAT % best.gamma_t))
    return render_csv(policy_frame(sweep), footer=footer)


def write_output(text, path=None):
    """Write the whole rendered text at once; stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("wrote %d lines to %s", text.count("\n"), path)
