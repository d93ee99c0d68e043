"""Tail risk measures computed from the empirical loss distribution.

Everything here operates on a LossSample: an ascending-sorted array where a
positive value is an actual loss and a negative value is a profit. A long
position loses when returns fall and a short position loses when they rise;
to_losses applies that sign convention.

No distribution is fitted. Value at risk is a loss quantile, expected
shortfall averages the worst tail beyond it, and the spectral measure is a
weighted average of every ordered loss with weights that rise in the loss
rank. The exponential weighting family is supplied; its steepness parameter
(the coefficient of absolute risk aversion) controls how hard the weights
lean on the far tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ingest import ReturnSeries

# Rank guard: keeps ceil() from jumping a whole rank when alpha * n lands a
# few ulps above an integer.
_RANK_FUZZ = 1e-9

# Below this the exponential weights are flat to machine precision.
MIN_RISK_AVERSION = 1e-8


class Position(Enum):
    LONG = "long"
    SHORT = "short"


class QuantileMethod(Enum):
    ORDER_STATISTIC = "order"
    LINEAR_INTERPOLATION = "interp"


# ----------------------------------------------------------------------
# loss samples
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LossSample:
    """Ascending-sorted losses for one instrument and position.

    Construction sorts the values and rejects empty or non-finite input, so
    every LossSample in circulation is safe to index by rank.
    """

    values: np.ndarray
    position: Position = Position.LONG
    label: str = ""

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float))
        if values.size == 0:
            raise ValueError("loss sample is empty")
        if not np.all(np.isfinite(values)):
            raise ValueError("loss sample contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size


def to_losses(series: ReturnSeries, position: Position) -> LossSample:
    """Map a return series to losses for the given position.

    A long position loses when the return is negative, so losses are the
    negated returns; a short position loses when the return is positive, so
    losses are the returns unchanged. Either way the output is positive for
    an actual loss and negative for a profit.
    """
    r = np.asarray(series.returns, dtype=float)
    losses = -r if position is Position.LONG else r
    return LossSample(values=losses, position=position, label=series.label)


# ----------------------------------------------------------------------
# quantile and tail estimators
# ----------------------------------------------------------------------

def _check_alpha(alpha):
    try:
        ok = math.isfinite(alpha) and 0.0 < alpha < 1.0
    except TypeError:
        ok = False
    if not ok:
        raise ValueError(
            f"confidence level must lie strictly between 0 and 1, got {alpha!r}")


def _order_stat_rank(alpha: float, n: int) -> int:
    """Smallest rank r with r >= alpha * n, clamped to 1..n."""
    r = math.ceil(alpha * n - _RANK_FUZZ)
    return min(max(r, 1), n)


def _tail_count(alpha: float, n: int) -> int:
    """Number of worst losses beyond the alpha quantile, always at least 1."""
    m = math.ceil((1.0 - alpha) * n - _RANK_FUZZ)
    return min(max(m, 1), n)


def _quantile_sorted(values: np.ndarray, alpha: float, method: QuantileMethod) -> float:
    n = values.size
    if method is QuantileMethod.ORDER_STATISTIC:
        return float(values[_order_stat_rank(alpha, n) - 1])
    if method is QuantileMethod.LINEAR_INTERPOLATION:
        h = 1.0 + alpha * (n - 1)  # fractional rank, 1-indexed
        i = int(math.floor(h))
        if i >= n:
            return float(values[-1])
        frac = h - i
        lo = values[i - 1]
        return float(lo + frac * (values[i] - lo))
    raise ValueError(f"unknown quantile method {method!r}")


def empirical_quantile(sample: LossSample, alpha: float,
                       method: QuantileMethod = QuantileMethod.ORDER_STATISTIC) -> float:
    """Loss quantile at confidence level alpha.

    Parameters:
    - sample: the loss sample.
    - alpha: confidence level, strictly between 0 and 1.
    - method: ORDER_STATISTIC returns the ceil(alpha * n)-th smallest loss;
      LINEAR_INTERPOLATION interpolates between the two order statistics
      around the fractional rank 1 + alpha * (n - 1).
    """
    _check_alpha(alpha)
    return _quantile_sorted(sample.values, alpha, method)


def value_at_risk(sample: LossSample, alpha: float,
                  method: QuantileMethod = QuantileMethod.ORDER_STATISTIC) -> float:
    """Value at risk: the loss exceeded with probability at most 1 - alpha."""
    return empirical_quantile(sample, alpha, method)


def expected_shortfall(sample: LossSample, alpha: float) -> float:
    """Average of the worst ceil((1 - alpha) * n) losses.

    At least one observation is always averaged, so the measure degenerates
    to the sample maximum when (1 - alpha) * n falls below 1. Never smaller
    than value_at_risk at the same level.
    """
    _check_alpha(alpha)
    m = _tail_count(alpha, sample.n)
    return float(sample.values[sample.n - m:].mean())


# ----------------------------------------------------------------------
# spectral weighting
# ----------------------------------------------------------------------

class ExponentialWeighting:
    """Exponential risk-aversion profile phi(p) = k e^(-k(1-p)) / (1 - e^(-k)).

    phi is a density over quantile levels p in [0, 1] describing how much a
    risk-averse holder cares about each loss quantile. It is nonnegative,
    integrates to one and never decreases in p, so worse outcomes always
    receive at least as much weight; those three properties are what make
    the resulting measure coherent. The steepness k sets the tilt toward
    the far tail: phi(1) / phi(0) = e^k.

    Alternative profiles only need density() and interval_mass(); the
    discrete weights are the mass each rank's probability cell receives, so
    nothing downstream assumes this particular family.
    """

    def __init__(self, k: float):
        try:
            ok = math.isfinite(k) and k > 0.0
        except TypeError:
            ok = False
        if not ok:
            raise ValueError(f"risk aversion must be a positive finite number, got {k!r}")
        if k < MIN_RISK_AVERSION:
            raise ValueError(
                f"risk aversion {k!r} is below {MIN_RISK_AVERSION:g}; the weights are "
                "numerically flat there and the measure collapses to the plain mean of "
                "losses, which should be used directly instead")
        self.k = float(k)

    def density(self, p):
        """phi(p) for p in [0, 1]; accepts scalars or arrays."""
        arr = np.asarray(p, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise ValueError("quantile level must lie in [0, 1]")
        k = self.k
        out = k * np.exp(-k * (1.0 - arr)) / -np.expm1(-k)
        return float(out) if np.isscalar(p) else out

    def interval_mass(self, lo, hi):
        """Closed-form integral of phi over [lo, hi]."""
        lo_arr = np.asarray(lo, dtype=float)
        hi_arr = np.asarray(hi, dtype=float)
        if np.any(lo_arr > hi_arr) or np.any(lo_arr < 0.0) or np.any(hi_arr > 1.0):
            raise ValueError("need 0 <= lo <= hi <= 1")
        k = self.k
        out = np.exp(-k * (1.0 - hi_arr)) * -np.expm1(-k * (hi_arr - lo_arr)) / -np.expm1(-k)
        return float(out) if np.isscalar(lo) and np.isscalar(hi) else out

    def cell_weights(self, n: int) -> np.ndarray:
        """Mass of each of the n equal probability cells, in ascending rank.

        Weight i is the exact integral of phi over ((i-1)/n, i/n], so the
        weights inherit nonnegativity and monotonicity from phi and sum to
        one by telescoping.
        """
        if n < 1:
            raise ValueError(f"need at least one cell, got {n}")
        k = self.k
        i = np.arange(1, n + 1, dtype=float)
        return np.exp(-k * (1.0 - i / n)) * (np.expm1(-k / n) / np.expm1(-k))


def exponential_weight(p: float, k: float) -> float:
    """Pointwise exponential weight phi(p); see ExponentialWeighting."""
    return ExponentialWeighting(k).density(p)


def spectral_weights(n: int, k: float) -> np.ndarray:
    """Discrete spectral weights for a sample of n losses at risk aversion k."""
    return ExponentialWeighting(k).cell_weights(n)


def spectral_risk_measure(sample: LossSample, aversion) -> float:
    """Weighted average of the ordered losses.

    Parameters:
    - sample: the loss sample.
    - aversion: either a positive risk-aversion coefficient (exponential
      profile) or any weighting object exposing cell_weights(n).

    Rising weights keep the value between the sample mean and the sample
    maximum; it approaches the mean as k -> 0 and the maximum as k -> inf.
    """
    if hasattr(aversion, "cell_weights"):
        w = aversion.cell_weights(sample.n)
    else:
        w = ExponentialWeighting(aversion).cell_weights(sample.n)
    return float(w @ sample.values)


@dataclass(frozen=True)
class WeightingReport:
    """Coherence check of a discrete weight vector.

    first_violation is the 1-based rank of the earliest cell breaking
    either nonnegativity or monotonicity, or None if both hold.
    """

    nonnegative: bool
    sums_to_one: bool
    nondecreasing: bool
    total_mass: float
    first_violation: int | None

    @property
    def coherent(self) -> bool:
        return self.nonnegative and self.sums_to_one and self.nondecreasing


def validate_weighting(weights, tol: float = 1e-12) -> WeightingReport:
    """Check the three coherence conditions on a discrete weight vector:
    no negative weight, total mass 1 within tol, and no decrease in rank.
    """
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise ValueError("weight vector is empty")
    negative = np.flatnonzero(w < 0.0)
    decreasing = np.flatnonzero(np.diff(w) < 0.0)
    total = float(w.sum())
    violations = []
    if negative.size:
        violations.append(int(negative[0]) + 1)
    if decreasing.size:
        violations.append(int(decreasing[0]) + 2)  # rank of the offending later cell
    return WeightingReport(
        nonnegative=negative.size == 0,
        sums_to_one=abs(total - 1.0) <= tol,
        nondecreasing=decreasing.size == 0,
        total_mass=total,
        first_violation=min(violations) if violations else None)
