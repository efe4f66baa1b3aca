"""Parabola-max sampler, second-order predictions, and limit covariances.

The sampler tests lean on two structural facts: streams are per-path (so
estimates are reproducible and merge-order free), and increments are drawn
step-major (so a longer horizon extends the same discretized path, making
the path maximum monotone in the horizon).
"""

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from runslab._rng import mix_key
from runslab.asymptotics import (
    BROWNIAN_PARABOLA_MEAN,
    COVARIANCE_MODELS,
    VSamplerConfig,
    correction_scale_from_drift,
    discretization_self_check,
    limit_covariance,
    local_drift_model,
    parabola_path_max,
    pattern_covariance_model,
    predict_max_mean,
    predict_max_var,
    sample_parabola_max,
)
from runslab.patterns import run_length_pattern, runs_pattern, summarize

SMALL = VSamplerConfig(step=0.01, horizon=3.0, paths=150, base_seed=7)


# -- parabola-max sampler ----------------------------------------------------


def test_sampler_is_deterministic_per_config():
    first = sample_parabola_max(SMALL)
    second = sample_parabola_max(SMALL)
    assert first == second
    assert sample_parabola_max(replace(SMALL, base_seed=8)).mean != first.mean


def test_path_max_nonnegative_and_monotone_in_horizon():
    # Same stream, longer draw: the first rows coincide, so the max over the
    # longer path dominates the max over the shorter one.
    for seed in range(5):
        short = parabola_path_max(np.random.default_rng(seed), 300, 0.01)
        long = parabola_path_max(np.random.default_rng(seed), 600, 0.01)
        assert 0.0 <= short <= long


def test_small_sample_lands_near_reference():
    # 150 paths is deliberately rough; just confirm the right ballpark and
    # that the spread fields are coherent.
    est = sample_parabola_max(SMALL)
    assert 0.7 < est.mean < 1.3
    assert est.se == pytest.approx(est.sd / math.sqrt(est.paths))
    lo, hi = est.ci()
    assert lo == pytest.approx(est.mean - 3 * est.se)
    assert hi == pytest.approx(est.mean + 3 * est.se)
    lo1, hi1 = est.ci(multiple=1.0)
    assert hi1 - lo1 == pytest.approx(2 * est.se)


def test_sampler_config_validation():
    with pytest.raises(ValueError):
        VSamplerConfig(step=0.0)
    with pytest.raises(ValueError):
        VSamplerConfig(step=0.02)  # too coarse for the bias budget
    with pytest.raises(ValueError):
        VSamplerConfig(horizon=2.0)
    with pytest.raises(ValueError):
        VSamplerConfig(paths=1)
    assert VSamplerConfig(step=1e-3, horizon=4.0).steps == 4000
    assert SMALL.steps == 300


def test_discretization_check_structure_and_reuse():
    coarse = sample_parabola_max(SMALL)
    check = discretization_self_check(SMALL, coarse=coarse)
    assert check.coarse is coarse
    assert check.fine.step == pytest.approx(SMALL.step / 2)
    assert check.band == pytest.approx(3.0 * (check.coarse.se + check.fine.se))
    assert check.consistent == (abs(check.coarse.mean - check.fine.mean) <= check.band)
    # the fine run must come from the documented sibling stream family
    sibling = replace(SMALL, step=SMALL.step / 2, base_seed=mix_key(SMALL.base_seed, 1))
    assert check.fine == sample_parabola_max(sibling)


# -- mean / variance predictions ---------------------------------------------


def test_predicted_mean_formulas():
    n = 1000
    cube = n ** (1 / 3)
    runs = predict_max_mean("runs", n)
    assert runs == pytest.approx(n / 4 + 0.5 * BROWNIAN_PARABOLA_MEAN * cube)
    assert predict_max_mean("runs-linear", n) == runs
    assert predict_max_mean("runs-cyclic", n) == runs
    assert predict_max_mean("runs-time", n) == runs
    queue = predict_max_mean("queue", n)
    assert queue == pytest.approx(n / 2 + BROWNIAN_PARABOLA_MEAN * cube)
    assert predict_max_mean("pq", n) == queue
    assert predict_max_mean("priority-queue", n) == queue
    assert predict_max_mean("lazy-hash", n) == queue
    # overriding the constant shifts only the correction term
    bumped = predict_max_mean("runs", n, v_mean=1.0)
    assert bumped - runs == pytest.approx(0.5 * (1.0 - BROWNIAN_PARABOLA_MEAN) * cube)


def test_predicted_variance_formulas():
    assert predict_max_var("runs", 160) == 10.0
    assert predict_max_var("queue", 160) == 40.0
    summary = summarize(run_length_pattern(1))
    assert predict_max_var("pattern", 729, summary=summary) == pytest.approx(76.0)


def test_pattern_predictions_require_summary():
    with pytest.raises(ValueError):
        predict_max_mean("pattern", 100)
    with pytest.raises(ValueError):
        predict_max_var("pattern", 100)
    with pytest.raises(ValueError):
        predict_max_mean("no-such-model", 100)
    with pytest.raises(ValueError):
        predict_max_mean("runs", 0)
    with pytest.raises(ValueError):
        predict_max_var("runs", 0)


def test_pattern_mean_prediction_uses_summary_scale():
    summary = summarize(runs_pattern())
    n = 8000
    via_pattern = predict_max_mean("pattern", n, summary=summary)
    assert via_pattern == pytest.approx(predict_max_mean("runs", n), rel=1e-12)


# -- local drift models and the correction scale -----------------------------


def test_drift_models_reproduce_known_scales():
    d, c = local_drift_model("runs")
    assert (d, c) == (1 / math.sqrt(2), 1.0)
    assert correction_scale_from_drift(d, c) == pytest.approx(0.5, rel=1e-12)
    d, c = local_drift_model("queue")
    assert (d, c) == (math.sqrt(2), 2.0)
    assert correction_scale_from_drift(d, c) == pytest.approx(1.0, rel=1e-12)
    d, c = local_drift_model("run-length-1")
    assert d == pytest.approx(math.sqrt(80 / 81))
    assert c == 1.0


def test_drift_model_from_summary_closes_the_loop():
    # summary -> (diffusion, curvature) -> correction scale must reproduce
    # the summary's own correction scale.
    for pattern in (runs_pattern(), run_length_pattern(1), run_length_pattern(3)):
        summary = summarize(pattern)
        d, c = local_drift_model("pattern", summary=summary)
        assert correction_scale_from_drift(d, c) == pytest.approx(
            summary.correction_scale, rel=1e-12
        )


def test_drift_model_validation():
    with pytest.raises(ValueError):
        local_drift_model("pattern")
    with pytest.raises(ValueError):
        correction_scale_from_drift(1.0, 0.0)
    with pytest.raises(ValueError):
        correction_scale_from_drift(1.0, -2.0)


# -- limit covariance models -------------------------------------------------

GRID9 = [k / 10 for k in range(1, 10)]


def test_registry_contents():
    assert set(COVARIANCE_MODELS) == {
        "centered-products-1",
        "runs-discrete",
        "centered-products-3",
        "runs-time",
        "queue-discrete",
        "queue-time",
    }
    with pytest.raises(ValueError):
        limit_covariance("no-such-kernel")


@pytest.mark.parametrize("name", sorted(COVARIANCE_MODELS))
def test_models_are_symmetric_and_psd_on_grid(name):
    model = limit_covariance(name)
    for s in GRID9:
        for t in GRID9:
            assert model(s, t) == model(t, s)
    assert model.min_grid_eigenvalue(GRID9) > -1e-10
    matrix = model.grid_matrix(GRID9)
    assert matrix.shape == (9, 9)
    assert np.all(np.diag(matrix) >= 0)


def test_model_closed_forms_spot_values():
    assert limit_covariance("runs-discrete")(0.2, 0.6) == pytest.approx(0.0064)
    assert limit_covariance("centered-products-1")(0.2, 0.6) == pytest.approx(0.08)
    assert limit_covariance("centered-products-3")(0.2, 0.6) == pytest.approx(0.08**3)
    s, t = 0.3, 0.7
    assert limit_covariance("runs-time")(s, t) == pytest.approx(
        s * (1 - t) * (1 - s - 2 * t + 3 * s * t)
    )
    assert limit_covariance("queue-discrete")(s, t) == pytest.approx(
        4 * (s * (1 - t)) ** 2
    )
    assert limit_covariance("queue-time")(s, t) == pytest.approx(
        2 * s * (1 - t) - 4 * s * (1 - s) * t * (1 - t)
    )


def test_model_rejects_times_outside_unit_interval():
    model = limit_covariance("runs-time")
    with pytest.raises(ValueError):
        model(-0.1, 0.5)
    with pytest.raises(ValueError):
        model(0.5, 1.2)


def test_pattern_covariance_model_matches_runs_kernel():
    model = pattern_covariance_model(runs_pattern())
    reference = limit_covariance("runs-time")
    for s in GRID9:
        for t in GRID9:
            assert model(s, t) == pytest.approx(reference(s, t), abs=1e-12)
    assert "length 2" in model.note


def test_pattern_covariance_model_diagonal_against_lag_route():
    # On the diagonal the kernel must agree with the independent
    # window-lag covariance route.
    from runslab.patterns import window_lag_covariance

    pattern = run_length_pattern(1)
    model = pattern_covariance_model(pattern)
    for t in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        lag = float(window_lag_covariance(pattern, t, t))
        assert model(float(t), float(t)) == pytest.approx(lag, abs=1e-12)
