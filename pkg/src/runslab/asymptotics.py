"""Limit-theory predictions for process maxima and their covariances.

Three ingredients:

* a Monte Carlo sampler for the mean of max_t (B(t) - t^2/2) over two-sided
  Brownian motion -- the constant that multiplies every n^(1/3) second-order
  correction; the literature value 0.996193 is kept as a reference and the
  sampler is the in-house oracle for it;
* first- and second-order predictions for the mean and variance of the
  maxima of the runs, queue, and general window-pattern processes;
* the closed-form limit covariances of the centered processes, as
  comparison targets for empirical covariance grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ._rng import StreamPool, mix_key
from .patterns import AsymptoticSummary, PatternFunctional, fluctuation_covariance
from .stats import MomentAccumulator

__all__ = [
    "BROWNIAN_PARABOLA_MEAN",
    "VSamplerConfig",
    "VEstimate",
    "parabola_path_max",
    "sample_parabola_max",
    "DiscretizationCheck",
    "discretization_self_check",
    "predict_max_mean",
    "predict_max_var",
    "local_drift_model",
    "correction_scale_from_drift",
    "CovarianceModel",
    "limit_covariance",
    "pattern_covariance_model",
    "COVARIANCE_MODELS",
]

# Reference mean of max over t of (two-sided Brownian motion minus t^2/2).
BROWNIAN_PARABOLA_MEAN = 0.996193


@dataclass(frozen=True)
class VSamplerConfig:
    """Discretization and sampling plan for the parabola-max constant.

    The negative quadratic drift confines the argmax; with horizon >= 3 the
    mass beyond the truncation is negligible next to the +-0.02 use case,
    and the step bound keeps the discretization bias O(sqrt(step)) small.
    Both limits are validated, not silently accepted.
    """

    step: float = 1e-3
    horizon: float = 4.0
    paths: int = 100_000
    base_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.step <= 0.01:
            raise ValueError(f"step must be in (0, 0.01], got {self.step}")
        if self.horizon < 3.0:
            raise ValueError(f"horizon must be >= 3, got {self.horizon}")
        if self.paths < 2:
            raise ValueError(f"need at least 2 paths, got {self.paths}")

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.step))


@dataclass(frozen=True)
class VEstimate:
    mean: float
    sd: float
    se: float
    paths: int
    step: float
    horizon: float

    def ci(self, multiple: float = 3.0) -> Tuple[float, float]:
        return self.mean - multiple * self.se, self.mean + multiple * self.se


def parabola_path_max(rng: np.random.Generator, steps: int, step: float) -> float:
    """Max of B(t) - t^2/2 on one two-sided discretized path (>= 0: t=0 term).

    Increments are drawn step-major (a (steps, 2) draw), so extending the
    horizon on the same stream extends the same path -- the basis of the
    horizon-monotonicity property test.
    """
    increments = rng.standard_normal((steps, 2)) * math.sqrt(step)
    both_sides = np.cumsum(increments, axis=0)
    t = step * np.arange(1, steps + 1)
    both_sides -= (0.5 * t * t)[:, None]
    return max(0.0, float(both_sides.max()))


def sample_parabola_max(config: VSamplerConfig) -> VEstimate:
    """Monte Carlo estimate of the parabola-max mean, one stream per path."""
    pool = StreamPool(config.base_seed)
    steps = config.steps
    acc = MomentAccumulator()
    for index in range(config.paths):
        acc.add(parabola_path_max(pool.get(index), steps, config.step))
    return VEstimate(
        mean=acc.mean,
        sd=acc.sd(),
        se=acc.se(),
        paths=config.paths,
        step=config.step,
        horizon=config.horizon,
    )


@dataclass(frozen=True)
class DiscretizationCheck:
    """Halved-step consistency: estimates must agree within summed CIs."""

    coarse: VEstimate
    fine: VEstimate
    band: float

    @property
    def consistent(self) -> bool:
        return abs(self.coarse.mean - self.fine.mean) <= self.band


def discretization_self_check(
    config: VSamplerConfig, multiple: float = 3.0,
    coarse: Optional[VEstimate] = None,
) -> DiscretizationCheck:
    """Run the sampler at step and step/2 on distinct stream families.

    Pass a previously computed `coarse` estimate (from this exact config) to
    pay for only the fine run.
    """
    if coarse is None:
        coarse = sample_parabola_max(config)
    fine_config = replace(
        config, step=config.step / 2.0, base_seed=mix_key(config.base_seed, 1)
    )
    fine = sample_parabola_max(fine_config)
    band = multiple * (coarse.se + fine.se)
    return DiscretizationCheck(coarse=coarse, fine=fine, band=band)


# -- first/second-order predictions ------------------------------------------

_MODEL_FAMILY = {
    "runs": "runs",
    "runs-linear": "runs",
    "runs-cyclic": "runs",
    "runs-time": "runs",
    "queue": "queue",
    "pq": "queue",
    "priority-queue": "queue",
    "lazy-hash": "queue",
    "pattern": "pattern",
}


def _family(model: str) -> str:
    try:
        return _MODEL_FAMILY[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}") from None


def predict_max_mean(
    model: str,
    n: int,
    *,
    summary: Optional[AsymptoticSummary] = None,
    v_mean: float = BROWNIAN_PARABOLA_MEAN,
) -> float:
    """Leading term plus the n^(1/3) correction for the expected maximum.

    runs: n/4 + (1/2) v n^(1/3); queue: n/2 + v n^(1/3); pattern: peak mean
    times n plus correction_scale * v * n^(1/3) from the given summary.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    family = _family(model)
    cube = float(n) ** (1.0 / 3.0)
    if family == "runs":
        return n / 4.0 + 0.5 * v_mean * cube
    if family == "queue":
        return n / 2.0 + v_mean * cube
    if summary is None:
        raise ValueError("pattern predictions need an AsymptoticSummary")
    return summary.peak_mean * n + summary.correction_scale * v_mean * cube


def predict_max_var(
    model: str, n: int, *, summary: Optional[AsymptoticSummary] = None
) -> float:
    """Leading-order variance of the maximum: n/16, n/4, or variance_rate*n."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    family = _family(model)
    if family == "runs":
        return n / 16.0
    if family == "queue":
        return n / 4.0
    if summary is None:
        raise ValueError("pattern predictions need an AsymptoticSummary")
    return summary.variance_rate * n


def local_drift_model(model, *, summary: Optional[AsymptoticSummary] = None):
    """(diffusion, curvature coefficient) of the n^(1/3)-scale local limit.

    Near its peak the centered process looks like diffusion * B(x) minus
    curvature_coefficient * x^2.  Accepts the family names plus
    "run-length-1"; a pattern summary supplies the general case.
    """
    if summary is not None:
        return math.sqrt(summary.jump_variance), abs(summary.peak_curvature) / 2.0
    if model == "run-length-1":
        return math.sqrt(80.0 / 81.0), 1.0
    family = _family(model)
    if family == "runs":
        return 1.0 / math.sqrt(2.0), 1.0
    if family == "queue":
        return math.sqrt(2.0), 2.0
    raise ValueError("pattern drift models need an AsymptoticSummary")


def correction_scale_from_drift(diffusion: float, curvature_coefficient: float) -> float:
    """Scale of the cube-root correction implied by a local drift model.

    (diffusion^4 / (2 * curvature_coefficient))^(1/3); with the runs model's
    (2^-1/2, 1) this is 1/2, with the queue's (2^1/2, 2) it is 1.
    """
    if curvature_coefficient <= 0:
        raise ValueError("curvature coefficient must be positive")
    return (diffusion**4 / (2.0 * curvature_coefficient)) ** (1.0 / 3.0)


# -- limit covariance models -------------------------------------------------


@dataclass(frozen=True)
class CovarianceModel:
    """A closed-form bivariate covariance on [0,1]^2, symmetric by design."""

    name: str
    note: str
    func: Callable[[float, float], float]

    def __call__(self, s: float, t: float) -> float:
        if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
            raise ValueError(f"times must lie in [0,1], got ({s}, {t})")
        lo, hi = (s, t) if s <= t else (t, s)
        return self.func(lo, hi)

    def grid_matrix(self, grid: Sequence[float]) -> np.ndarray:
        pts = [float(t) for t in grid]
        return np.array([[self(s, t) for t in pts] for s in pts])

    def min_grid_eigenvalue(self, grid: Sequence[float]) -> float:
        return float(np.linalg.eigvalsh(self.grid_matrix(grid)).min())


COVARIANCE_MODELS: Dict[str, CovarianceModel] = {}


def _register(name: str, note: str):
    def wrap(func):
        COVARIANCE_MODELS[name] = CovarianceModel(name=name, note=note, func=func)
        return func

    return wrap


@_register("centered-products-1", "centered occupancy sum (bridge-like)")
def _cov_products_1(s: float, t: float) -> float:
    return s * (1.0 - t)


@_register("runs-discrete", "step-indexed run counts sampled at steps round(t*n)")
def _cov_runs_discrete(s: float, t: float) -> float:
    return (s * (1.0 - t)) ** 2


@_register("centered-products-3", "third-order centered product sum")
def _cov_products_3(s: float, t: float) -> float:
    return (s * (1.0 - t)) ** 3


@_register("runs-time", "run counts under independent uniform arrival times")
def _cov_runs_time(s: float, t: float) -> float:
    return s * (1.0 - t) * (1.0 - s - 2.0 * t + 3.0 * s * t)


@_register("queue-discrete", "queue occupancy sampled at steps round(t*2n)")
def _cov_queue_discrete(s: float, t: float) -> float:
    return 4.0 * (s * (1.0 - t)) ** 2


@_register("queue-time", "queue occupancy at fixed times")
def _cov_queue_time(s: float, t: float) -> float:
    return 2.0 * s * (1.0 - t) - 4.0 * s * (1.0 - s) * t * (1.0 - t)


def limit_covariance(name: str) -> CovarianceModel:
    try:
        return COVARIANCE_MODELS[name]
    except KeyError:
        raise ValueError(
            f"unknown covariance model {name!r}; choose from {sorted(COVARIANCE_MODELS)}"
        ) from None


def pattern_covariance_model(pattern: PatternFunctional) -> CovarianceModel:
    """Limit covariance of a window functional's centered randomized-time sum."""

    def func(s: float, t: float) -> float:
        return float(fluctuation_covariance(pattern, s, t))

    return CovarianceModel(
        name="pattern-time",
        note=f"window functional of length {pattern.length} at fixed times",
        func=func,
    )
