from dataclasses import dataclass
from enum import Enum

import numpy as np


class DistributionKind(Enum):
    UNIFORM = "uniform"
    DECREASING_LINEAR = "f1"   # 2 - 2a, mass at low user types
    INCREASING_LINEAR = "f2"   # 2a, mass at high user types
    TRIANGULAR = "f3"          # 4a / 4 - 4a, mass around 1/2


# CLI / config spellings
_ALIASES = {
    "uniform": DistributionKind.UNIFORM,
    "f1": DistributionKind.DECREASING_LINEAR,
    "decreasing": DistributionKind.DECREASING_LINEAR,
    "decreasing_linear": DistributionKind.DECREASING_LINEAR,
    "f2": DistributionKind.INCREASING_LINEAR,
    "increasing": DistributionKind.INCREASING_LINEAR,
    "increasing_linear": DistributionKind.INCREASING_LINEAR,
    "f3": DistributionKind.TRIANGULAR,
    "triangular": DistributionKind.TRIANGULAR,
}


def _scalar_or_array(values, original):
    if np.ndim(original) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class UserTypeDistribution:
    """
    Density f(a) of the user type a on [0, 1].

    Every kind has a closed-form density, cumulative and first moment, so
    nothing here integrates numerically. Methods accept a float or a numpy
    array (the oracle evaluates whole grids at once).
    """
    kind: DistributionKind = DistributionKind.UNIFORM

    @classmethod
    def from_name(cls, name):
        key = str(name).strip().lower()
        if key in _ALIASES:
            return cls(_ALIASES[key])
        for kind in DistributionKind:
            if kind.name.lower() == key:
                return cls(kind)
        raise ValueError(f"unknown user-type distribution: {name!r}")

    @property
    def is_uniform(self):
        return self.kind is DistributionKind.UNIFORM

    @property
    def name(self):
        return self.kind.value

    def density(self, alpha):
        a = np.asarray(alpha, dtype=float)
        inside = (a >= 0.0) & (a <= 1.0)

        if self.kind is DistributionKind.UNIFORM:
            f = np.ones_like(a)
        elif self.kind is DistributionKind.DECREASING_LINEAR:
            f = 2.0 - 2.0 * a
        elif self.kind is DistributionKind.INCREASING_LINEAR:
            f = 2.0 * a
        else:
            f = np.where(a <= 0.5, 4.0 * a, 4.0 - 4.0 * a)

        return _scalar_or_array(np.where(inside, f, 0.0), alpha)

    def cumulative(self, alpha):
        """P(type <= alpha); arguments outside [0, 1] are clipped."""
        if np.ndim(alpha) == 0:
            return self._cumulative_scalar(float(alpha))

        a = np.clip(np.asarray(alpha, dtype=float), 0.0, 1.0)

        if self.kind is DistributionKind.UNIFORM:
            c = a
        elif self.kind is DistributionKind.DECREASING_LINEAR:
            c = 2.0 * a - a * a
        elif self.kind is DistributionKind.INCREASING_LINEAR:
            c = a * a
        else:
            c = np.where(a <= 0.5, 2.0 * a * a, 1.0 - 2.0 * (1.0 - a) ** 2)

        return c

    # root finders call this once per iteration, keep it free of numpy
    def _cumulative_scalar(self, a):
        a = min(max(a, 0.0), 1.0)

        if self.kind is DistributionKind.UNIFORM:
            return a
        if self.kind is DistributionKind.DECREASING_LINEAR:
            return 2.0 * a - a * a
        if self.kind is DistributionKind.INCREASING_LINEAR:
            return a * a
        if a <= 0.5:
            return 2.0 * a * a
        return 1.0 - 2.0 * (1.0 - a) ** 2

    def _moment_antiderivative(self, alpha):
        a = min(max(float(alpha), 0.0), 1.0)

        if self.kind is DistributionKind.UNIFORM:
            return a * a / 2.0
        if self.kind is DistributionKind.DECREASING_LINEAR:
            return a * a - 2.0 * a ** 3 / 3.0
        if self.kind is DistributionKind.INCREASING_LINEAR:
            return 2.0 * a ** 3 / 3.0
        if a <= 0.5:
            return 4.0 * a ** 3 / 3.0
        return 2.0 * a * a - 4.0 * a ** 3 / 3.0 - 1.0 / 6.0

    def mass_between(self, a, b):
        if b <= a:
            return 0.0
        return self.cumulative(b) - self.cumulative(a)

    def mean_between(self, a, b):
        """Integral of alpha * f(alpha) over [a, b] (0 for an empty interval)."""
        if b <= a:
            return 0.0
        return self._moment_antiderivative(b) - self._moment_antiderivative(a)


UNIFORM = UserTypeDistribution(DistributionKind.UNIFORM)
