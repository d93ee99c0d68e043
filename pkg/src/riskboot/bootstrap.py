"""Vanilla bootstrap precision for the tail risk measures.

Each estimate is resampled B times with replacement, nothing fancier: no
bias adjustment, no blocking. The resample estimates give the reported
point estimate (their mean), its standard error, the coefficient of
variation (point estimate over standard error) and a standardized
percentile confidence interval (interval bounds divided by the point
estimate).

Reproducibility is strict. Every grid cell, meaning one sample with one
measure at one parameter, draws from its own counter-based stream keyed on
the master seed and the cell coordinates, so results are bit-identical for
a given seed no matter how many workers share the grid or in what order
cells run.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .measures import (
    LossSample,
    Position,
    QuantileMethod,
    _order_stat_rank,
    _quantile_sorted,
    _tail_count,
    spectral_weights,
)

# Rows of resample indices drawn per generator call. Fixed, so the draw
# sequence of a cell never depends on scheduling or worker count.
_CHUNK_ROWS = 512


class Measure(Enum):
    VAR = "var"
    ES = "es"
    SRM = "srm"


_MEASURE_ID = {Measure.VAR: 1, Measure.ES: 2, Measure.SRM: 3}


@dataclass(frozen=True)
class EstimatorSpec:
    """One measure at one parameter: confidence level for VAR and ES,
    risk aversion for SRM."""

    measure: Measure
    parameter: float


@dataclass(frozen=True)
class BootstrapConfig:
    resamples: int = 5000
    master_seed: int = 0
    quantile_method: QuantileMethod = QuantileMethod.ORDER_STATISTIC
    ci_coverage: float = 0.90

    def __post_init__(self):
        if self.resamples < 2:
            raise ValueError(f"need at least 2 resamples for a standard error, got {self.resamples}")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError(f"master seed must fit in an unsigned 64-bit integer, got {self.master_seed!r}")
        if not 0.0 < self.ci_coverage < 1.0:
            raise ValueError(f"interval coverage must lie strictly between 0 and 1, got {self.ci_coverage!r}")


@dataclass(frozen=True)
class BootstrapResult:
    """Precision summary of one bootstrapped estimate.

    point_estimate is the mean of the resample estimates; plug_in_estimate
    is the measure evaluated once on the original sample. coeff_variation
    is point_estimate / std_error and is None when the resample
    distribution is degenerate (zero standard error) or the point estimate
    is zero. ci_standardized holds the percentile interval of the resample
    estimates divided through by the point estimate; a degenerate resample
    distribution gives (1.0, 1.0).
    """

    point_estimate: float
    plug_in_estimate: float
    std_error: float
    coeff_variation: float | None
    ci_standardized: tuple[float, float]
    resamples: int


# ----------------------------------------------------------------------
# streams and resampling
# ----------------------------------------------------------------------

def cell_stream(master_seed: int, sample_index: int, measure: Measure,
                param_index: int) -> np.random.Generator:
    """Independent generator for one grid cell.

    The Philox key packs (master_seed, sample_index, measure, param_index),
    so streams are a pure function of the coordinates: splitting the grid
    across workers, or running cells in any order, cannot change a draw.
    """
    if not 0 <= int(master_seed) < 2 ** 64:
        raise ValueError(f"master seed must fit in an unsigned 64-bit integer, got {master_seed!r}")
    if not 0 <= sample_index < 2 ** 32:
        raise ValueError(f"sample index out of range: {sample_index!r}")
    if not 0 <= param_index < 2 ** 24:
        raise ValueError(f"parameter index out of range: {param_index!r}")
    tag = (sample_index << 32) | (_MEASURE_ID[measure] << 24) | param_index
    key = np.array([master_seed, tag], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def resample(sample: LossSample, stream: np.random.Generator) -> LossSample:
    """One bootstrap resample: n draws with replacement, re-sorted."""
    idx = stream.integers(0, sample.n, size=sample.n)
    return LossSample(values=sample.values[idx], position=sample.position,
                      label=sample.label)


def _estimate_rows(block: np.ndarray, spec: EstimatorSpec,
                   method: QuantileMethod, srm_w: np.ndarray | None) -> np.ndarray:
    """Evaluate the estimator on each row of a (rows, n) sorted block."""
    n = block.shape[1]
    if spec.measure is Measure.VAR:
        if method is QuantileMethod.ORDER_STATISTIC:
            return block[:, _order_stat_rank(spec.parameter, n) - 1]
        h = 1.0 + spec.parameter * (n - 1)
        i = int(math.floor(h))
        if i >= n:
            return block[:, n - 1]
        frac = h - i
        lo = block[:, i - 1]
        return lo + frac * (block[:, i] - lo)
    if spec.measure is Measure.ES:
        return block[:, n - _tail_count(spec.parameter, n):].mean(axis=1)
    return block @ srm_w


def _plug_in(sample: LossSample, spec: EstimatorSpec,
             method: QuantileMethod, srm_w: np.ndarray | None) -> float:
    if spec.measure is Measure.VAR:
        return _quantile_sorted(sample.values, spec.parameter, method)
    if spec.measure is Measure.ES:
        m = _tail_count(spec.parameter, sample.n)
        return float(sample.values[sample.n - m:].mean())
    return float(srm_w @ sample.values)


def bootstrap_estimate(sample: LossSample, estimator: EstimatorSpec,
                       config: BootstrapConfig,
                       stream: np.random.Generator | None = None) -> BootstrapResult:
    """Bootstrap one measure on one sample.

    Draws config.resamples samples with replacement, evaluates the
    estimator on each and summarizes the resulting distribution. When no
    stream is given, the cell stream for coordinates (0, measure, 0) under
    the config's master seed is used, so a bare call is still reproducible.
    """
    if estimator.measure in (Measure.VAR, Measure.ES):
        if not 0.0 < estimator.parameter < 1.0:
            raise ValueError(
                f"confidence level must lie strictly between 0 and 1, got {estimator.parameter!r}")
    if stream is None:
        stream = cell_stream(config.master_seed, 0, estimator.measure, 0)

    srm_w = spectral_weights(sample.n, estimator.parameter) \
        if estimator.measure is Measure.SRM else None

    b = config.resamples
    n = sample.n
    values = sample.values
    estimates = np.empty(b, dtype=float)
    done = 0
    while done < b:
        rows = min(_CHUNK_ROWS, b - done)
        idx = stream.integers(0, n, size=(rows, n))
        block = values[idx]
        block.sort(axis=1)
        estimates[done:done + rows] = _estimate_rows(
            block, estimator, config.quantile_method, srm_w)
        done += rows

    point = float(estimates.mean())
    std_error = float(estimates.std(ddof=1))
    plug_in = _plug_in(sample, estimator, config.quantile_method, srm_w)

    if std_error > 0.0 and point != 0.0:
        coeff_variation = point / std_error
    else:
        coeff_variation = None

    if std_error == 0.0:
        ci = (1.0, 1.0)
    else:
        tail = (1.0 - config.ci_coverage) / 2.0
        ordered = np.sort(estimates)
        lo = _quantile_sorted(ordered, tail, config.quantile_method)
        hi = _quantile_sorted(ordered, 1.0 - tail, config.quantile_method)
        if point == 0.0:
            ci = (math.nan, math.nan)  # standardization undefined
        else:
            lo, hi = lo / point, hi / point
            ci = (min(lo, hi), max(lo, hi))

    return BootstrapResult(
        point_estimate=point,
        plug_in_estimate=plug_in,
        std_error=std_error,
        coeff_variation=coeff_variation,
        ci_standardized=ci,
        resamples=b)


# ----------------------------------------------------------------------
# the estimation grid
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridCell:
    """One (sample, measure, parameter) cell. Exactly one of result and
    error is set; a failed cell never aborts the rest of the grid."""

    sample_index: int
    sample_label: str
    position: Position
    measure: Measure
    parameter: float
    param_index: int
    result: BootstrapResult | None
    error: str | None


@dataclass(frozen=True)
class ResultGrid:
    cells: tuple[GridCell, ...]

    def get(self, sample_index: int, measure: Measure, parameter: float) -> GridCell:
        for cell in self.cells:
            if (cell.sample_index == sample_index and cell.measure is measure
                    and cell.parameter == parameter):
                return cell
        raise KeyError(f"no cell for sample {sample_index}, {measure.value}, {parameter!r}")

    @property
    def failed(self) -> tuple[GridCell, ...]:
        return tuple(c for c in self.cells if c.error is not None)


def run_grid(samples, grid, config: BootstrapConfig, workers: int = 1) -> ResultGrid:
    """Bootstrap every (sample, measure, parameter) combination.

    Parameters:
    - samples: sequence of LossSample.
    - grid: mapping of Measure to its parameter list, e.g.
      {Measure.VAR: [0.95, 0.99], Measure.SRM: [5, 20]}.
    - workers: worker threads sharing the cells. Results are bit-identical
      for any worker count because each cell owns its stream and writes to
      its own slot.

    A cell whose estimator raises is recorded with the error message and
    the rest of the grid still runs.
    """
    samples = list(samples)
    if workers < 1:
        raise ValueError(f"need at least 1 worker, got {workers}")
    jobs = []
    for sample_index, sample in enumerate(samples):
        for measure in Measure:
            if measure not in grid:
                continue
            for param_index, parameter in enumerate(grid[measure]):
                jobs.append((sample_index, sample, measure, float(parameter), param_index))

    def run_cell(job):
        sample_index, sample, measure, parameter, param_index = job
        stream = cell_stream(config.master_seed, sample_index, measure, param_index)
        spec = EstimatorSpec(measure=measure, parameter=parameter)
        try:
            result, error = bootstrap_estimate(sample, spec, config, stream), None
        except Exception as exc:
            result, error = None, f"{type(exc).__name__}: {exc}"
        return GridCell(
            sample_index=sample_index,
            sample_label=sample.label,
            position=sample.position,
            measure=measure,
            parameter=parameter,
            param_index=param_index,
            result=result,
            error=error)

    if workers == 1:
        cells = [run_cell(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(run_cell, jobs))
    return ResultGrid(cells=tuple(cells))
