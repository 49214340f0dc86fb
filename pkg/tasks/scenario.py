import logging
from dataclasses import dataclass
from typing import Optional

from tasks.cournot import gamma_grid
from tasks.distributions import UserTypeDistribution
from tasks.market import MarketParams, Operator
from tasks.market_tables import (
    DEFAULT_CAPACITY,
    DEFAULT_EPSILON,
    DEFAULT_GAMMA_C,
    DEFAULT_GAMMA_MAX,
    DEFAULT_GAMMA_MIN,
    DEFAULT_GAMMA_STEP,
    DEFAULT_GAMMA_T_MAX,
    DEFAULT_GAMMA_T_MIN,
    DEFAULT_GAMMA_T_STEP,
    DEFAULT_INITIAL_PRICE,
    DEFAULT_MAX_CHANGES,
    DEFAULT_MAX_MOVES,
    DEFAULT_POPULATION,
)

logger = logging.getLogger(__name__)


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario configuration."""


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class Scenario:
    """
    Everything one CLI run needs. Defaults reproduce the reference setup:
    eps = 0.01, k_i = k_j = 1, both prices start at 0.01, 80 changes.
    """
    M: float = DEFAULT_POPULATION
    k_i: float = DEFAULT_CAPACITY
    k_j: float = DEFAULT_CAPACITY
    epsilon: float = DEFAULT_EPSILON
    distribution: str = "uniform"

    p_i0: float = DEFAULT_INITIAL_PRICE
    p_j0: float = DEFAULT_INITIAL_PRICE
    first_mover: Operator = Operator.I
    last_mover: Operator = Operator.J
    max_moves: int = DEFAULT_MAX_MOVES
    max_changes: int = DEFAULT_MAX_CHANGES
    regulated: bool = False
    numeric: bool = False

    gamma_min: float = DEFAULT_GAMMA_MIN
    gamma_max: float = DEFAULT_GAMMA_MAX
    gamma_step: float = DEFAULT_GAMMA_STEP

    gamma_c: float = DEFAULT_GAMMA_C
    gamma_t_min: float = DEFAULT_GAMMA_T_MIN
    gamma_t_max: float = DEFAULT_GAMMA_T_MAX
    gamma_t_step: float = DEFAULT_GAMMA_T_STEP

    output: Optional[str] = None

    def __post_init__(self):
        try:
            self.user_types()
            self.market_params()
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

        for name in ("p_i0", "p_j0"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ScenarioError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if self.max_moves < 1:
            raise ScenarioError(f"max_moves must be at least 1, got {self.max_moves}")
        if self.max_changes < 2:
            raise ScenarioError(f"max_changes must be at least 2, got {self.max_changes}")

    def user_types(self):
        return UserTypeDistribution.from_name(self.distribution)

    def market_params(self):
        return MarketParams(
            M=self.M, k_i=self.k_i, k_j=self.k_j,
            epsilon=self.epsilon, dist=self.user_types(),
        )

    # per-command checks
    def validate_for(self, command):
        if command in ("dynamics", "best-response"):
            return
        if command == "equilibrium":
            if not self.user_types().is_uniform:
                raise ScenarioError("equilibrium needs uniform users (capacity stage is uniform-only)")
            self.gammas()
            return
        if command == "sweep-tax":
            if not self.user_types().is_uniform:
                raise ScenarioError("sweep-tax needs uniform users (welfare is uniform-only)")
            self.taxes()
            return
        raise ScenarioError(f"unknown command {command!r}")

    def gammas(self):
        if self.gamma_min <= 0:
            raise ScenarioError(f"gamma_min must be positive, got {self.gamma_min}")
        try:
            return gamma_grid(self.gamma_min, self.gamma_max, self.gamma_step)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    def taxes(self):
        if self.gamma_c <= 0:
            raise ScenarioError(f"gamma_c must be positive, got {self.gamma_c}")
        try:
            taxes = gamma_grid(self.gamma_t_min, self.gamma_t_max, self.gamma_t_step)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
        if self.gamma_c + taxes[0] <= 0:
            raise ScenarioError(
                f"gamma_c + gamma_t must stay positive, got {self.gamma_c} + {taxes[0]}"
            )
        return taxes


# KEY = VALUE CONFIG
def _convert(name, kind, raw):
    text = raw.strip()
    try:
        if kind is bool:
            key = text.lower()
            if key in _TRUE:
                return True
            if key in _FALSE:
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is Operator:
            return Operator.parse(text)
        return text
    except ValueError as exc:
        raise ScenarioError(f"bad value for {name}: {exc}") from exc


_FIELD_TYPES = {
    "M": float, "k_i": float, "k_j": float, "epsilon": float, "distribution": str,
    "p_i0": float, "p_j0": float, "first_mover": Operator, "last_mover": Operator,
    "max_moves": int, "max_changes": int, "regulated": bool, "numeric": bool,
    "gamma_min": float, "gamma_max": float, "gamma_step": float,
    "gamma_c": float, "gamma_t_min": float, "gamma_t_max": float, "gamma_t_step": float,
    "output": str,
}


def parse_config_text(text):
    """
    Parse `key = value` lines. `#` starts a comment, blank lines are
    skipped, unknown or repeated keys are errors.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key = value, got {line!r}")

        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ScenarioError(f"line {lineno}: {key} given twice")
        if not raw:
            raise ScenarioError(f"line {lineno}: empty value for {key}")

        values[key] = _convert(key, _FIELD_TYPES[key], raw)
    return values


def load_scenario(path=None, overrides=None):
    """Defaults, then the config file, then command-line overrides."""
    values = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as exc:
            raise ScenarioError(f"cannot read config {path}: {exc}") from exc
        values.update(parse_config_text(text))
        logger.debug("config %s: %s", path, values)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ScenarioError(f"unknown setting {key!r}")
        values[key] = value

    return Scenario(**values)

