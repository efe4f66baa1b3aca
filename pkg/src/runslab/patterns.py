"""Window functionals of 0/1 rows and their random-fill asymptotics.

A window functional assigns a real value to every 0/1 window of a fixed
length and is summed over all windows of a row (cyclically by default).  As
the row fills in random order the summed statistic rises and falls; this
module computes, exactly over the rationals, the quantities that govern its
behaviour at large n:

* the per-cell mean rate as a polynomial in the fill fraction t, and the
  interior peak t* of that polynomial (certified unique via Sturm chains);
* the decomposition of the statistic into centered window-product sums
  indexed by support patterns, an exact algebraic identity per realization;
* the per-cell variance rate of values near the peak and the variance of the
  single-insertion jump at the peak -- each by two independent routes that
  must agree;
* the scale of the cube-root correction to the running maximum.

Everything returned to the caller is plain float; internally the arithmetic
is `fractions.Fraction` so route agreement is not at the mercy of rounding.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

from .polys import Polynomial, real_roots_in_interval

__all__ = [
    "MAX_WINDOW_LEN",
    "MAX_ANALYSIS_WINDOW",
    "PatternFunctional",
    "NoInteriorPeakError",
    "runs_pattern",
    "run_length_pattern",
    "constant_pattern",
    "parse_pattern_text",
    "format_pattern_text",
    "load_pattern",
    "save_pattern",
    "mean_rate",
    "FluctuationDecomposition",
    "decompose_fluctuations",
    "centered_product_sum",
    "peak_time",
    "variance_rate",
    "jump_variance",
    "correction_scale",
    "insertion_jump_moments",
    "fluctuation_covariance",
    "window_lag_covariance",
    "AsymptoticSummary",
    "summarize",
    "run_length_reference_constants",
]

MAX_WINDOW_LEN = 16       # table size cap for simulation (2^16 window values)
MAX_ANALYSIS_WINDOW = 10  # cap for the exact decomposition machinery
MAX_JUMP_WINDOW = 8       # cap for the jump-enumeration route (2^(2l-2) configs)

_ROOT_WIDTH = Fraction(1, 10**24)
_PEAK_MARGIN = Fraction(1, 10**9)
_TINY = Fraction(1, 10**18)

Rational = Union[int, float, Fraction]


class NoInteriorPeakError(ValueError):
    """The mean rate has no admissible strict interior maximum."""


def _to_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a number")


@dataclass(frozen=True)
class PatternFunctional:
    """A real-valued function on 0/1 windows of a fixed length.

    `values[w]` is the value of the window whose cells, read left to right,
    are the binary digits of w (most significant digit = leftmost cell).
    Values are stored as exact rationals; floats are converted exactly.
    """

    length: int
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if not 1 <= self.length <= MAX_WINDOW_LEN:
            raise ValueError(f"window length must be in 1..{MAX_WINDOW_LEN}, got {self.length}")
        if len(self.values) != 1 << self.length:
            raise ValueError(
                f"need {1 << self.length} window values for length {self.length}, got {len(self.values)}"
            )
        object.__setattr__(self, "values", tuple(_to_fraction(v) for v in self.values))

    @classmethod
    def from_table(cls, values: Iterable[Rational]) -> "PatternFunctional":
        vals = tuple(values)
        length = (len(vals)).bit_length() - 1
        return cls(length, vals)

    def value_at(self, window: Sequence[int]) -> Fraction:
        w = 0
        for bit in window:
            w = (w << 1) | (1 if bit else 0)
        return self.values[w]

    def table_float(self) -> np.ndarray:
        return np.array([float(v) for v in self.values], dtype=np.float64)

    def shifted(self, c: Rational) -> "PatternFunctional":
        """The same functional with a constant added to every window value."""
        cf = _to_fraction(c)
        return PatternFunctional(self.length, tuple(v + cf for v in self.values))


def runs_pattern() -> PatternFunctional:
    """Ascent counter: value 1 on the window 01, else 0.

    Summed cyclically this counts maximal blocks of 1s (the all-ones row
    scores 0); summed linearly it misses a left-boundary block.
    """
    return PatternFunctional(2, (0, 1, 0, 0))

def run_length_pattern(d: int) -> PatternFunctional:
    """Counter of runs of 1s of length exactly d: value 1 on 0 1^d 0."""
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    ell = d + 2
    if ell > MAX_WINDOW_LEN:
        raise ValueError(f"run length {d} needs window {ell} > cap {MAX_WINDOW_LEN}")
    values = [0] * (1 << ell)
    values[((1 << d) - 1) << 1] = 1
    return PatternFunctional(ell, tuple(values))

def constant_pattern(c: Rational, length: int = 1) -> PatternFunctional:
    return PatternFunctional(length, tuple([c] * (1 << length)))


# -- text format -------------------------------------------------------------
#
# Line 1: the window length L.  Then 2^L lines "bitstring value", bitstrings
# in lexicographic order.  Values may be rationals ("3/4"), decimals, or
# scientific notation.

def parse_pattern_text(text: str) -> PatternFunctional:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty window-table text")
    try:
        ell = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the window length, got {lines[0]!r}") from None
    if not 1 <= ell <= MAX_WINDOW_LEN:
        raise ValueError(f"window length must be in 1..{MAX_WINDOW_LEN}, got {ell}")
    body = lines[1:]
    if len(body) != 1 << ell:
        raise ValueError(f"expected {1 << ell} table lines, got {len(body)}")
    values = []
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"table line {i + 1} must be 'bits value', got {ln!r}")
        bits, raw = parts
        expected = format(i, f"0{ell}b")
        if bits != expected:
            raise ValueError(f"table line {i + 1}: expected bitstring {expected}, got {bits}")
        try:
            values.append(Fraction(raw))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"table line {i + 1}: cannot parse value {raw!r}") from None
    return PatternFunctional(ell, tuple(values))


def format_pattern_text(pattern: PatternFunctional) -> str:
    ell = pattern.length
    lines = [str(ell)]
    for w, v in enumerate(pattern.values):
        lines.append(f"{format(w, f'0{ell}b')} {v}")
    return "\n".join(lines) + "\n"


def load_pattern(path: Union[str, os.PathLike]) -> PatternFunctional:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pattern_text(fh.read())


def save_pattern(pattern: PatternFunctional, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_pattern_text(pattern))


# -- exact decomposition -----------------------------------------------------


@dataclass(frozen=True)
class FluctuationDecomposition:
    """Exact split of the windowed sum into mean part and centered products.

    For any row and any t, the windowed sum over n cyclic windows equals

        n * mean_rate(t) + sum over patterns a of terms[a](t) * S_a(row, t)

    where S_a is the cyclic sum over start cells of the product of
    (cell value - t) at the 1-positions of a.  Pattern keys are 0/1 strings
    that begin and end with '1'.
    """

    window_length: int
    mean_rate: Polynomial
    terms: Mapping[str, Polynomial]


def _check_analysis_length(ell: int) -> None:
    if ell > MAX_ANALYSIS_WINDOW:
        raise ValueError(
            f"exact analysis capped at window length {MAX_ANALYSIS_WINDOW}, got {ell}"
        )


def decompose_fluctuations(pattern: PatternFunctional) -> FluctuationDecomposition:
    """Expand the window value in centered cell variables, exactly.

    Writes each cell indicator as t + (indicator - t) and multilinearly
    expands; one in-place butterfly pass per cell, entries are polynomials
    in t.  The empty-product coefficient is the mean rate.
    """
    ell = pattern.length
    _check_analysis_length(ell)
    t = Polynomial.identity()
    one_minus_t = Polynomial((1, -1))
    zero = Polynomial()
    coeffs = [Polynomial.constant(v) for v in pattern.values]
    for cell in range(ell):
        bit = 1 << (ell - 1 - cell)
        for mask in range(1 << ell):
            if mask & bit:
                continue
            lo = coeffs[mask]
            hi = coeffs[mask | bit]
            if lo.is_zero() and hi.is_zero():
                continue
            coeffs[mask] = one_minus_t * lo + t * hi
            coeffs[mask | bit] = hi - lo

    terms: Dict[str, Polynomial] = {}
    for mask in range(1, 1 << ell):
        poly = coeffs[mask]
        if poly.is_zero():
            continue
        bits = [(mask >> (ell - 1 - i)) & 1 for i in range(ell)]
        first = bits.index(1)
        last = ell - 1 - bits[::-1].index(1)
        alpha = "".join("1" if bits[i] else "0" for i in range(first, last + 1))
        terms[alpha] = terms.get(alpha, zero) + poly
    terms = {a: p for a, p in terms.items() if not p.is_zero()}
    return FluctuationDecomposition(ell, coeffs[0], terms)


def mean_rate(pattern: PatternFunctional) -> Polynomial:
    """Expected window value at fill fraction t, as an exact polynomial."""
    ell = pattern.length
    _check_analysis_length(ell)
    t = Polynomial.identity()
    one_minus_t = Polynomial((1, -1))
    out = Polynomial()
    for w, v in enumerate(pattern.values):
        if v == 0:
            continue
        ones = bin(w).count("1")
        out = out + v * t**ones * one_minus_t ** (ell - ones)
    return out


def centered_product_sum(row: Sequence[int], alpha: str, t: Rational) -> Fraction:
    """S_a(row, t): cyclic sum of products of (cell - t) over a's 1-cells."""
    tf = _to_fraction(t)
    n = len(row)
    offsets = [j for j, ch in enumerate(alpha) if ch == "1"]
    total = Fraction(0)
    for k in range(n):
        prod = Fraction(1)
        for j in offsets:
            prod *= row[(k + j) % n] - tf
        total += prod
    return total


# -- peak of the mean rate ---------------------------------------------------


def _peak_point(g: Polynomial) -> Fraction:
    """The unique admissible interior maximizer of g on (0, 1), exactly.

    Returns either the exact rational root of g' or the midpoint of a
    bracket of width < 1e-24.  Raises NoInteriorPeakError when the peak is
    absent, non-unique within a 1e-9 value margin, attained at the boundary,
    or has non-negative curvature.
    """
    d1 = g.derivative()
    if d1.is_zero():
        raise NoInteriorPeakError("mean rate is constant; no interior peak")
    roots = real_roots_in_interval(d1, 0, 1, width=_ROOT_WIDTH)
    if not roots:
        raise NoInteriorPeakError("mean rate has no interior critical point")
    points = [(a + b) / 2 for a, b in roots]
    vals = [g(pt) for pt in points]
    best = max(range(len(points)), key=vals.__getitem__)
    for i, v in enumerate(vals):
        if i != best and v > vals[best] - _PEAK_MARGIN:
            raise NoInteriorPeakError(
                "mean rate has multiple near-maximal critical values; peak not unique"
            )
    if vals[best] <= max(g(Fraction(0)), g(Fraction(1))) + _TINY:
        raise NoInteriorPeakError("mean rate is maximized at the boundary, not inside (0, 1)")
    if d1.derivative()(points[best]) >= -_TINY:
        raise NoInteriorPeakError("degenerate curvature at the mean-rate peak")
    return points[best]


def peak_time(pattern: PatternFunctional) -> float:
    """The fill fraction maximizing the mean rate, certified unique."""
    return float(_peak_point(mean_rate(pattern)))


# -- variance rate and jump variance, two routes each ------------------------


def _variance_rate_from_terms(dec: FluctuationDecomposition, t: Fraction) -> Fraction:
    q = t * (1 - t)
    total = Fraction(0)
    for alpha, poly in dec.terms.items():
        nu = alpha.count("1")
        total += poly(t) ** 2 * q**nu
    return total


def _jump_variance_from_terms(dec: FluctuationDecomposition, t: Fraction) -> Fraction:
    q = t * (1 - t)
    total = Fraction(0)
    for alpha, poly in dec.terms.items():
        nu = alpha.count("1")
        total += nu * poly(t) ** 2 * q ** (nu - 1)
    return total


def _window_mean_direct(values: Sequence[Fraction], ell: int, t: Fraction) -> Fraction:
    total = Fraction(0)
    for w, v in enumerate(values):
        if v == 0:
            continue
        ones = bin(w).count("1")
        total += v * t**ones * (1 - t) ** (ell - ones)
    return total


def _pair_expectation(
    values: Sequence[Fraction], ell: int, lag: int, tl: Fraction, tr: Fraction
) -> Fraction:
    """E[left window value at fill tl  *  value lag cells right at fill tr].

    Cells fill at independent uniform times, so a cell seen at two fill
    fractions is (1,1) with probability min, (0,0) with 1 - max, and only
    the earlier look can be 0 when the later is 1.
    """
    joint = (
        (1 - max(tl, tr), max(Fraction(0), tr - tl)),  # left bit 0: right 0 / 1
        (max(Fraction(0), tl - tr), min(tl, tr)),      # left bit 1: right 0 / 1
    )
    total = Fraction(0)
    for w1, v1 in enumerate(values):
        if v1 == 0:
            continue
        for w2, v2 in enumerate(values):
            if v2 == 0:
                continue
            prob = Fraction(1)
            # overlap: cells lag..ell-1 of the left window
            for c in range(lag, ell):
                a = (w1 >> (ell - 1 - c)) & 1
                b = (w2 >> (ell - 1 - (c - lag))) & 1
                prob *= joint[a][b]
                if prob == 0:
                    break
            if prob == 0:
                continue
            for c in range(0, min(lag, ell)):  # cells only in the left window
                a = (w1 >> (ell - 1 - c)) & 1
                prob *= tl if a else 1 - tl
            for c in range(max(ell - lag, 0), ell):  # cells only in the right window
                b = (w2 >> (ell - 1 - c)) & 1
                prob *= tr if b else 1 - tr
            total += v1 * v2 * prob
    return total


def window_lag_covariance(pattern: PatternFunctional, s: Rational, t: Rational) -> Fraction:
    """Bivariate covariance rate by direct summation over window lags.

    Sum over lags j of Cov(window value at cell 0 and fill s, window value
    at cell j and fill t).  Independent of the decomposition machinery; for
    rows of length at least twice the window this is exactly n^-1 times the
    covariance of the two windowed sums in the randomized-time model.
    """
    sf = _to_fraction(s)
    tf = _to_fraction(t)
    ell = pattern.length
    values = pattern.values
    mu = _window_mean_direct(values, ell, sf) * _window_mean_direct(values, ell, tf)
    total = Fraction(0)
    for j in range(-(ell - 1), ell):
        if j >= 0:
            e = _pair_expectation(values, ell, j, sf, tf)
        else:
            e = _pair_expectation(values, ell, -j, tf, sf)
        total += e - mu
    return total


def fluctuation_covariance(
    source: Union[PatternFunctional, FluctuationDecomposition], s: Rational, t: Rational
) -> Fraction:
    """The same covariance rate from the centered decomposition.

    Sum over patterns a of terms[a](s) * terms[a](t) * (min(s,t)(1-max(s,t)))^nu(a).
    Agrees with `window_lag_covariance` identically; the pair is kept as a
    deliberate cross-check.
    """
    dec = source if isinstance(source, FluctuationDecomposition) else decompose_fluctuations(source)
    sf = _to_fraction(s)
    tf = _to_fraction(t)
    base = min(sf, tf) * (1 - max(sf, tf))
    total = Fraction(0)
    for alpha, poly in dec.terms.items():
        nu = alpha.count("1")
        total += poly(sf) * poly(tf) * base**nu
    return total


def insertion_jump_moments(pattern: PatternFunctional, t: Rational) -> Tuple[float, float]:
    """Mean and variance of the windowed-sum jump when one empty cell fills.

    The 2(L-1) neighbor cells are independently occupied with probability t;
    the jump is the sum over the L windows through the filled cell of the
    value change 0 -> 1.  Plain enumeration of all neighbor configurations,
    in float64 -- this is the check route, kept deliberately naive.
    """
    ell = pattern.length
    if ell > MAX_JUMP_WINDOW:
        raise ValueError(f"jump enumeration capped at window length {MAX_JUMP_WINDOW}, got {ell}")
    tval = float(t)
    values = pattern.table_float()
    if ell == 1:
        jump = float(values[1] - values[0])
        return jump, 0.0

    nb = 2 * ell - 2  # neighbor cells, relative positions -(L-1)..-1, 1..L-1

    def cfg_index(rel: int) -> int:
        return rel + ell - 1 if rel < 0 else rel + ell - 2

    cfgs = np.arange(1 << nb, dtype=np.int64)
    jump = np.zeros(cfgs.size, dtype=np.float64)
    for o in range(ell):  # window starting o cells left of the filled cell
        sub = np.zeros(cfgs.size, dtype=np.int64)
        center_bit = 1 << (ell - 1 - o)
        for j in range(ell - 1):  # the window's non-center cells
            i = j if j < o else j + 1
            idx = cfg_index(i - o)
            sub |= ((cfgs >> idx) & 1) << (ell - 1 - i)
        jump += values[sub | center_bit] - values[sub]
    ones = np.bitwise_count(cfgs.astype(np.uint64)).astype(np.int64)
    probs = tval**ones * (1.0 - tval) ** (nb - ones)
    e1 = float(np.dot(probs, jump))
    e2 = float(np.dot(probs, jump * jump))
    return e1, e2 - e1 * e1


def _route_gap(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def variance_rate(pattern: PatternFunctional) -> float:
    """Per-cell variance rate of the windowed sum at the mean-rate peak.

    Computed from the centered decomposition and, independently, from the
    window-lag covariance sum; the two must agree to 1e-10 or this raises.
    """
    dec = decompose_fluctuations(pattern)
    t0 = _peak_point(dec.mean_rate)
    route_a = _variance_rate_from_terms(dec, t0)
    route_b = window_lag_covariance(pattern, t0, t0)
    if _route_gap(float(route_a), float(route_b)) > 1e-10:
        raise ArithmeticError(
            f"variance-rate routes disagree: {float(route_a)} vs {float(route_b)}"
        )
    return float(route_a)


def jump_variance(pattern: PatternFunctional) -> float:
    """Variance of the single-insertion jump at the mean-rate peak.

    Decomposition route checked against plain neighbor enumeration when the
    window is small enough to enumerate; disagreement beyond 1e-10 raises.
    """
    dec = decompose_fluctuations(pattern)
    t0 = _peak_point(dec.mean_rate)
    route_a = _jump_variance_from_terms(dec, t0)
    if pattern.length <= MAX_JUMP_WINDOW:
        _, route_b = insertion_jump_moments(pattern, float(t0))
        if _route_gap(float(route_a), route_b) > 1e-10:
            raise ArithmeticError(
                f"jump-variance routes disagree: {float(route_a)} vs {route_b}"
            )
    return float(route_a)


def correction_scale(pattern: PatternFunctional) -> float:
    """Scale of the cube-root correction to the running maximum.

    (jump variance squared over absolute peak curvature) to the power 1/3.
    """
    return summarize(pattern).correction_scale


@dataclass(frozen=True)
class AsymptoticSummary:
    """Everything the limit theory needs about one window functional."""

    peak_time: float
    peak_mean: float        # mean rate at the peak (leading coefficient per cell)
    peak_curvature: float   # second derivative of the mean rate there (< 0)
    variance_rate: float    # per-cell variance of values at the peak
    jump_variance: float    # variance of the single-insertion jump at the peak
    correction_scale: float  # multiplies the parabola-max mean times n^(1/3)


def summarize(pattern: PatternFunctional) -> AsymptoticSummary:
    """Full asymptotic summary with both routes cross-checked."""
    dec = decompose_fluctuations(pattern)
    g = dec.mean_rate
    t0 = _peak_point(g)
    curv = g.derivative().derivative()(t0)

    vr_a = _variance_rate_from_terms(dec, t0)
    vr_b = window_lag_covariance(pattern, t0, t0)
    if _route_gap(float(vr_a), float(vr_b)) > 1e-10:
        raise ArithmeticError(f"variance-rate routes disagree: {float(vr_a)} vs {float(vr_b)}")

    jv_a = _jump_variance_from_terms(dec, t0)
    if pattern.length <= MAX_JUMP_WINDOW:
        _, jv_b = insertion_jump_moments(pattern, float(t0))
        if _route_gap(float(jv_a), jv_b) > 1e-10:
            raise ArithmeticError(f"jump-variance routes disagree: {float(jv_a)} vs {jv_b}")

    scale_cubed = jv_a * jv_a / (-curv)
    return AsymptoticSummary(
        peak_time=float(t0),
        peak_mean=float(g(t0)),
        peak_curvature=float(curv),
        variance_rate=float(vr_a),
        jump_variance=float(jv_a),
        correction_scale=float(scale_cubed) ** (1.0 / 3.0),
    )


def run_length_reference_constants(d: int) -> Dict[str, Fraction]:
    """Closed-form summary constants for the run-length-d counter.

    Used as an independent reference for `summarize(run_length_pattern(d))`;
    exact rationals, `correction_scale` given cubed to stay rational.
    """
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    dd = d**d
    base = d + 2
    peak_mean = Fraction(4 * dd, base ** (d + 2))
    ratio = Fraction(dd, base ** (d + 1))
    return {
        "peak_time": Fraction(d, base),
        "peak_mean": peak_mean,
        "peak_curvature": -Fraction(2 * d ** (d - 1), base ** (d - 1)),
        "variance_rate": peak_mean * (1 - (d + 1) * peak_mean),
        "jump_variance": 8 * ratio * (1 + ratio),
        "correction_scale_cubed": Fraction(32 * d ** (d + 1), base ** (d + 3)) * (1 + ratio) ** 2,
    }
