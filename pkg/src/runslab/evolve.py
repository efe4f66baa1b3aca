"""Simulators for evolving runs, window patterns, and queue occupancy.

Three model families share one sweep harness:

* runs of 1s in a 0/1 row filled in random order (linear or cyclic), driven
  by the constant-time increment 1 - occupied(left) - occupied(right);
* an arbitrary window functional summed over the row, updated incrementally
  through the <= 2L-1 windows that contain the inserted cell;
* queue occupancy: n insert/delete pairs swept in event order, equivalently
  a hash table with lazy deletions whose arrival/departure pairs are the
  ordered statistics of two uniforms.

Every repetition draws from its own counter-based stream keyed by
(base seed, repetition index), so sweeps are reproducible bit for bit and
independent of how work is chunked across processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ._rng import StreamPool, stream
from .patterns import PatternFunctional
from .stats import CoMomentAccumulator, MomentAccumulator

__all__ = [
    "MODELS",
    "DEFAULT_TIME_GRID",
    "Trajectory",
    "SimConfig",
    "SweepResult",
    "simulate_runs",
    "runs_from_order",
    "simulate_runs_randomized_time",
    "simulate_pattern",
    "pattern_from_order",
    "simulate_priority_queue",
    "simulate_lazy_hash",
    "run_sweep",
]

MODELS = (
    "runs-linear",
    "runs-cyclic",
    "runs-time",
    "pattern",
    "priority-queue",
    "lazy-hash",
)

DEFAULT_TIME_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

# Below this size the pure-Python bitmask kernels beat the vectorized ones
# (array setup dominates); both paths produce identical output and the
# equality is pinned by tests, so the cutoff is a pure speed knob.
_SMALL_N_CUTOFF = 128

# Reps per chunk are chosen from (n, reps) alone -- never from the worker
# count -- so chunk boundaries, and therefore merged floating-point results,
# do not depend on parallelism.
_CHUNK_CELL_BUDGET = 1 << 22


@dataclass(frozen=True)
class Trajectory:
    """One realized evolution, summarized.

    `argmax` is the first step index attaining the maximum for step-indexed
    models, and the first attaining arrival time for "runs-time".
    `mid_value` is the value at step ceil(n/2) (runs/pattern), after the
    n-th event (queues), or at t = 1/2 (runs-time).  `values` holds the full
    path (length n+1, or 2n+1 for queues) when requested.
    """

    model: str
    n: int
    max_value: float
    argmax: float
    mid_value: float
    grid: Optional[Tuple[float, ...]] = None
    samples: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None


def _require_positive(n: int) -> None:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")


def _check_cyclic_size(cyclic: bool, n: int) -> None:
    # A lone occupied cell on a 1-cycle is its own neighbor, so the ascent
    # count and the insertion increments stop agreeing; rule the case out.
    if cyclic and n < 2:
        raise ValueError("cyclic mode needs n >= 2")


# -- runs kernels ------------------------------------------------------------


def _runs_values_vectorized(order: np.ndarray, cyclic: bool) -> np.ndarray:
    n = order.size
    inserted_at = np.empty(n, dtype=np.int64)
    inserted_at[order] = np.arange(n, dtype=np.int64)
    delta = np.ones(n, dtype=np.int64)
    if cyclic:
        delta -= np.roll(inserted_at, 1) < inserted_at
        delta -= np.roll(inserted_at, -1) < inserted_at
    else:
        earlier = inserted_at[:-1] < inserted_at[1:]
        delta[1:] -= earlier       # left neighbor already present
        delta[:-1] -= inserted_at[1:] < inserted_at[:-1]
    values = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(delta[order], out=values[1:])
    return values


def _runs_values_loop(order: Sequence[int], cyclic: bool) -> np.ndarray:
    n = len(order)
    values = np.zeros(n + 1, dtype=np.int64)
    occupied = 0
    x = 0
    if cyclic:
        for m, c in enumerate(order, 1):
            x += 1 - ((occupied >> ((c - 1) % n)) & 1) - ((occupied >> ((c + 1) % n)) & 1)
            values[m] = x
            occupied |= 1 << c
    else:
        for m, c in enumerate(order, 1):
            left = (occupied >> (c - 1)) & 1 if c > 0 else 0
            right = (occupied >> (c + 1)) & 1 if c < n - 1 else 0
            x += 1 - left - right
            values[m] = x
            occupied |= 1 << int(c)
    return values


def _runs_values(order: np.ndarray, cyclic: bool) -> np.ndarray:
    if order.size < _SMALL_N_CUTOFF:
        return _runs_values_loop(order.tolist(), cyclic)
    return _runs_values_vectorized(order, cyclic)


def _summary_from_values(values: np.ndarray, n: int):
    argmax = int(np.argmax(values))  # first index attaining the max
    return values[argmax], argmax, values[(n + 1) // 2]


def _check_step_grid(grid: Sequence[int], n: int) -> np.ndarray:
    idx = np.asarray(grid, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() > n):
        raise ValueError(f"step grid must lie in 0..{n}")
    return idx


def runs_from_order(
    order: Sequence[int], *, cyclic: bool = False, grid: Optional[Sequence[int]] = None,
    keep_values: bool = False,
) -> Trajectory:
    """Run counts along an explicit insertion order (the identity order
    keeps a single growing run, which pins the increment logic in tests)."""
    order = np.asarray(order, dtype=np.int64)
    n = order.size
    _require_positive(n)
    _check_cyclic_size(cyclic, n)
    if not np.array_equal(np.bincount(order, minlength=n), np.ones(n, dtype=np.int64)):
        raise ValueError("order must be a permutation of 0..n-1")
    values = _runs_values(order, cyclic)
    maxv, argmax, mid = _summary_from_values(values, n)
    samples = values[_check_step_grid(grid, n)] if grid is not None else None
    return Trajectory(
        model="runs-cyclic" if cyclic else "runs-linear",
        n=n,
        max_value=int(maxv),
        argmax=argmax,
        mid_value=int(mid),
        grid=tuple(grid) if grid is not None else None,
        samples=samples,
        values=values if keep_values else None,
    )


def simulate_runs(
    n: int, seed: int, *, cyclic: bool = False, grid: Optional[Sequence[int]] = None,
    keep_values: bool = False,
) -> Trajectory:
    """One uniformly random insertion order; summary per `Trajectory`."""
    _require_positive(n)
    _check_cyclic_size(cyclic, n)
    order = stream(seed).permutation(n)
    return runs_from_order(order, cyclic=cyclic, grid=grid, keep_values=keep_values)


def simulate_runs_randomized_time(
    n: int, seed: int, *, grid: Optional[Sequence[float]] = None, cyclic: bool = False,
    keep_values: bool = False,
) -> Trajectory:
    """Runs process with independent uniform arrival times per cell.

    The path visits exactly the states of the step-indexed process (in
    arrival order), so its max equals the step-indexed max; samples are
    taken at fill fractions t by counting arrivals up to t.
    """
    _require_positive(n)
    rng = stream(seed)
    times = rng.random(n)
    order = np.argsort(times, kind="stable")
    values = _runs_values(order, cyclic)
    sorted_times = times[order]
    maxv, argmax_step, _ = _summary_from_values(values, n)
    grid_t = DEFAULT_TIME_GRID if grid is None else tuple(float(t) for t in grid)
    counts = np.searchsorted(sorted_times, np.asarray(grid_t), side="right")
    samples = values[counts]
    mid = values[int(np.searchsorted(sorted_times, 0.5, side="right"))]
    return Trajectory(
        model="runs-time",
        n=n,
        max_value=int(maxv),
        argmax=0.0 if argmax_step == 0 else float(sorted_times[argmax_step - 1]),
        mid_value=int(mid),
        grid=grid_t,
        samples=samples,
        values=values if keep_values else None,
    )


# -- window-pattern kernels --------------------------------------------------


def _pattern_values_vectorized(
    table: np.ndarray, ell: int, order: np.ndarray, cyclic: bool
) -> np.ndarray:
    n = order.size
    inserted_at = np.empty(n, dtype=np.int64)
    inserted_at[order] = np.arange(n, dtype=np.int64)
    earlier = {}
    for d in range(-(ell - 1), ell):
        if d:
            # cell k+d (mod n) occupied before cell k's own insertion
            earlier[d] = (np.roll(inserted_at, -d) < inserted_at).astype(np.int64)
    delta = np.zeros(n, dtype=np.float64)
    for o in range(ell):
        inserted_bit = 1 << (ell - 1 - o)
        mask = np.zeros(n, dtype=np.int64)
        for i in range(ell):
            if i != o:
                mask |= earlier[i - o] << (ell - 1 - i)
        contrib = table[mask | inserted_bit] - table[mask]
        if cyclic:
            delta += contrib
        else:
            # window start k-o must stay within 0..n-ell
            delta[o : n - ell + o + 1] += contrib[o : n - ell + o + 1]
    base = table[0] * (n if cyclic else n - ell + 1)
    values = np.empty(n + 1, dtype=np.float64)
    values[0] = 0.0
    np.cumsum(delta[order], out=values[1:])
    values += base
    return values


def _pattern_values_loop(
    table: np.ndarray, ell: int, order: Sequence[int], cyclic: bool
) -> np.ndarray:
    n = len(order)
    values = np.empty(n + 1, dtype=np.float64)
    running = table[0] * (n if cyclic else n - ell + 1)
    values[0] = running
    occupied = 0
    for m, c in enumerate(order, 1):
        delta = 0.0
        for o in range(ell):
            start = c - o
            if not cyclic and not 0 <= start <= n - ell:
                continue
            mask = 0
            for i in range(ell):
                if i == o:
                    continue
                if (occupied >> ((start + i) % n)) & 1:
                    mask |= 1 << (ell - 1 - i)
            delta += table[mask | (1 << (ell - 1 - o))] - table[mask]
        running += delta
        values[m] = running
        occupied |= 1 << int(c)
    return values


def _pattern_values(table: np.ndarray, ell: int, order: np.ndarray, cyclic: bool) -> np.ndarray:
    if order.size < _SMALL_N_CUTOFF:
        return _pattern_values_loop(table, ell, order.tolist(), cyclic)
    return _pattern_values_vectorized(table, ell, order, cyclic)


def _check_pattern_size(pattern: PatternFunctional, n: int) -> None:
    if n < 2 * pattern.length:
        raise ValueError(
            f"need n >= twice the window length ({2 * pattern.length}), got {n}"
        )


def pattern_from_order(
    pattern: PatternFunctional, order: Sequence[int], *, cyclic: bool = True,
    grid: Optional[Sequence[int]] = None, keep_values: bool = False,
) -> Trajectory:
    """Windowed sum along an explicit insertion order."""
    order = np.asarray(order, dtype=np.int64)
    n = order.size
    _check_pattern_size(pattern, n)
    if not np.array_equal(np.bincount(order, minlength=n), np.ones(n, dtype=np.int64)):
        raise ValueError("order must be a permutation of 0..n-1")
    values = _pattern_values(pattern.table_float(), pattern.length, order, cyclic)
    maxv, argmax, mid = _summary_from_values(values, n)
    samples = values[_check_step_grid(grid, n)] if grid is not None else None
    return Trajectory(
        model="pattern",
        n=n,
        max_value=float(maxv),
        argmax=argmax,
        mid_value=float(mid),
        grid=tuple(grid) if grid is not None else None,
        samples=samples,
        values=values if keep_values else None,
    )


def simulate_pattern(
    pattern: PatternFunctional, n: int, seed: int, *, cyclic: bool = True,
    grid: Optional[Sequence[int]] = None, keep_values: bool = False,
) -> Trajectory:
    """One random insertion order for an arbitrary window functional."""
    _check_pattern_size(pattern, n)
    order = stream(seed).permutation(n)
    return pattern_from_order(pattern, order, cyclic=cyclic, grid=grid, keep_values=keep_values)


# -- queue kernels -----------------------------------------------------------


def _queue_events_minmax(rng: np.random.Generator, n: int):
    first = rng.random(n)
    second = rng.random(n)
    return np.minimum(first, second), np.maximum(first, second)


def _queue_events_inverse(rng: np.random.Generator, n: int):
    # Arrival is the min of two uniforms drawn by inverse CDF; departure is
    # then uniform on (arrival, 1).  Same joint law as the min/max pairing,
    # by an independent construction.
    u = rng.random(n)
    v = rng.random(n)
    arrive = 1.0 - np.sqrt(1.0 - u)
    depart = arrive + (1.0 - arrive) * v
    return arrive, depart


def _queue_trajectory(
    model: str, arrive: np.ndarray, depart: np.ndarray,
    grid: Optional[Sequence[float]], keep_values: bool,
) -> Trajectory:
    n = arrive.size
    times = np.concatenate([arrive, depart])
    steps = np.concatenate([np.ones(n, dtype=np.int64), -np.ones(n, dtype=np.int64)])
    event_order = np.argsort(times, kind="stable")
    values = np.zeros(2 * n + 1, dtype=np.int64)
    np.cumsum(steps[event_order], out=values[1:])
    argmax = int(np.argmax(values))
    samples = None
    grid_t = None
    if grid is not None:
        grid_t = tuple(float(t) for t in grid)
        pts = np.asarray(grid_t)
        samples = (
            np.searchsorted(np.sort(arrive), pts, side="right")
            - np.searchsorted(np.sort(depart), pts, side="right")
        )
    return Trajectory(
        model=model,
        n=n,
        max_value=int(values[argmax]),
        argmax=argmax,
        mid_value=int(values[n]),
        grid=grid_t,
        samples=samples,
        values=values if keep_values else None,
    )


def simulate_priority_queue(
    n: int, seed: int, *, grid: Optional[Sequence[float]] = None, keep_values: bool = False,
) -> Trajectory:
    """Occupancy of a queue under n insert/delete pairs in random order.

    Each item holds two independent uniform times; it enters at the earlier
    and leaves at the later.  The 2n events are swept exactly in time order
    (no discretization); the path starts and ends at 0.
    """
    _require_positive(n)
    arrive, depart = _queue_events_minmax(stream(seed), n)
    return _queue_trajectory("priority-queue", arrive, depart, grid, keep_values)


def simulate_lazy_hash(
    n: int, seed: int, *, grid: Optional[Sequence[float]] = None, keep_values: bool = False,
) -> Trajectory:
    """Hash-table-with-lazy-deletion occupancy; same law as the queue model.

    Kept as a genuinely independent implementation (inverse-CDF draw of the
    arrival, conditional draw of the departure) so the distributional
    equivalence stays a testable claim rather than shared code.
    """
    _require_positive(n)
    arrive, depart = _queue_events_inverse(stream(seed), n)
    return _queue_trajectory("lazy-hash", arrive, depart, grid, keep_values)


# -- sweep harness -----------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """One sweep: model, size, repetitions, seed, and what to collect.

    `grid` entries are fill fractions in (0, 1); step-indexed models sample
    step round(t * n).  `cyclic` only affects the pattern model (the runs
    flavor is in the model tag).
    """

    model: str
    n: int
    reps: int
    base_seed: int
    grid: Optional[Tuple[float, ...]] = None
    pattern: Optional[PatternFunctional] = None
    cyclic: bool = True
    jobs: int = 1
    keep_max_samples: bool = False
    keep_grid_samples: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        _require_positive(self.n)
        _check_cyclic_size(self.model == "runs-cyclic", self.n)
        if self.reps < 1:
            raise ValueError(f"need reps >= 1, got {self.reps}")
        if self.jobs < 1:
            raise ValueError(f"need jobs >= 1, got {self.jobs}")
        if self.model == "pattern":
            if self.pattern is None:
                raise ValueError("pattern model needs a PatternFunctional")
            _check_pattern_size(self.pattern, self.n)
        elif self.pattern is not None:
            raise ValueError(f"model {self.model!r} does not take a pattern")
        if self.grid is not None:
            grid = tuple(float(t) for t in self.grid)
            if any(not 0.0 < t < 1.0 for t in grid):
                raise ValueError("grid entries must lie strictly between 0 and 1")
            object.__setattr__(self, "grid", grid)


@dataclass
class SweepResult:
    """Aggregates over one sweep; raw samples only when asked for."""

    config: SimConfig
    max_stats: MomentAccumulator
    argmax_stats: MomentAccumulator
    mid_stats: MomentAccumulator
    grid_stats: Optional[CoMomentAccumulator] = None
    max_samples: Optional[np.ndarray] = None
    grid_samples: Optional[np.ndarray] = None


def _chunk_size(n: int, reps: int) -> int:
    return max(1, min(reps, _CHUNK_CELL_BUDGET // max(n, 1)))


def _grid_step_indices(grid: Tuple[float, ...], n: int) -> np.ndarray:
    return np.asarray([int(round(t * n)) for t in grid], dtype=np.int64)


def _sweep_chunk(config: SimConfig, start: int, count: int):
    """Run reps start..start+count-1 and return their per-rep summaries."""
    pool = StreamPool(config.base_seed)
    model = config.model
    n = config.n
    grid = config.grid
    maxes = np.empty(count, dtype=np.float64)
    argmaxes = np.empty(count, dtype=np.float64)
    mids = np.empty(count, dtype=np.float64)
    grid_rows = None
    if grid is not None:
        grid_rows = np.empty((count, len(grid)), dtype=np.float64)

    if model in ("runs-linear", "runs-cyclic"):
        cyclic = model == "runs-cyclic"
        step_idx = _grid_step_indices(grid, n) if grid is not None else None
        for j in range(count):
            order = pool.get(start + j).permutation(n)
            values = _runs_values(order, cyclic)
            maxv, argmax, mid = _summary_from_values(values, n)
            maxes[j], argmaxes[j], mids[j] = maxv, argmax, mid
            if step_idx is not None:
                grid_rows[j] = values[step_idx]
    elif model == "runs-time":
        pts = np.asarray(grid) if grid is not None else None
        for j in range(count):
            rng = pool.get(start + j)
            times = rng.random(n)
            order = np.argsort(times, kind="stable")
            values = _runs_values(order, False)
            sorted_times = times[order]
            argmax_step = int(np.argmax(values))
            maxes[j] = values[argmax_step]
            argmaxes[j] = 0.0 if argmax_step == 0 else sorted_times[argmax_step - 1]
            mids[j] = values[int(np.searchsorted(sorted_times, 0.5, side="right"))]
            if pts is not None:
                counts = np.searchsorted(sorted_times, pts, side="right")
                grid_rows[j] = values[counts]
    elif model == "pattern":
        table = config.pattern.table_float()
        ell = config.pattern.length
        step_idx = _grid_step_indices(grid, n) if grid is not None else None
        for j in range(count):
            order = pool.get(start + j).permutation(n)
            values = _pattern_values(table, ell, order, config.cyclic)
            maxv, argmax, mid = _summary_from_values(values, n)
            maxes[j], argmaxes[j], mids[j] = maxv, argmax, mid
            if step_idx is not None:
                grid_rows[j] = values[step_idx]
    elif model in ("priority-queue", "lazy-hash"):
        draw = _queue_events_minmax if model == "priority-queue" else _queue_events_inverse
        pts = np.asarray(grid) if grid is not None else None
        for j in range(count):
            arrive, depart = draw(pool.get(start + j), n)
            times = np.concatenate([arrive, depart])
            steps = np.concatenate(
                [np.ones(n, dtype=np.int64), -np.ones(n, dtype=np.int64)]
            )
            values = np.zeros(2 * n + 1, dtype=np.int64)
            np.cumsum(steps[np.argsort(times, kind="stable")], out=values[1:])
            argmax = int(np.argmax(values))
            maxes[j], argmaxes[j], mids[j] = values[argmax], argmax, values[n]
            if pts is not None:
                grid_rows[j] = np.searchsorted(
                    np.sort(arrive), pts, side="right"
                ) - np.searchsorted(np.sort(depart), pts, side="right")
    else:  # pragma: no cover - guarded by SimConfig validation
        raise ValueError(f"unknown model {model!r}")

    return maxes, argmaxes, mids, grid_rows


def _chunk_args(config: SimConfig):
    size = _chunk_size(config.n, config.reps)
    start = 0
    while start < config.reps:
        count = min(size, config.reps - start)
        yield start, count
        start += count


def run_sweep(config: SimConfig) -> SweepResult:
    """Execute the sweep; deterministic for fixed config regardless of jobs.

    Work is split into chunks whose boundaries depend only on (n, reps);
    chunk outputs are merged in chunk order, so the result is bit-identical
    whether chunks run serially or across a process pool.
    """
    result = SweepResult(
        config=config,
        max_stats=MomentAccumulator(),
        argmax_stats=MomentAccumulator(),
        mid_stats=MomentAccumulator(),
        grid_stats=CoMomentAccumulator(len(config.grid)) if config.grid else None,
        max_samples=None,
        grid_samples=None,
    )
    kept_max = [] if config.keep_max_samples else None
    kept_grid = [] if config.keep_grid_samples and config.grid else None

    args = list(_chunk_args(config))
    if config.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outputs = list(
                pool.map(_sweep_chunk, *zip(*((config, s, c) for s, c in args)))
            )
    else:
        outputs = [_sweep_chunk(config, s, c) for s, c in args]

    for maxes, argmaxes, mids, grid_rows in outputs:
        result.max_stats.add_batch(maxes)
        result.argmax_stats.add_batch(argmaxes)
        result.mid_stats.add_batch(mids)
        if result.grid_stats is not None and grid_rows is not None:
            result.grid_stats.add_batch(grid_rows)
        if kept_max is not None:
            kept_max.append(maxes)
        if kept_grid is not None and grid_rows is not None:
            kept_grid.append(grid_rows)

    if kept_max is not None:
        result.max_samples = np.concatenate(kept_max)
    if kept_grid is not None:
        result.grid_samples = np.concatenate(kept_grid)
    return result
