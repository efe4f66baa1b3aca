"""Verification harness plumbing at the quick scale.

The full scale is exercised (and timed) by the acceptance suite; here we
only need the quick tier green, the override hook live, and the check
registry stable.
"""

import pytest

from runslab.verify import REFERENCES, check_names, run_checks

QUICK_NAMES = [
    "exact-moments",
    "small-max-exact",
    "pattern-closed-forms",
    "random-route-agreement",
    "limit-model-identities",
]


def test_check_registry_names():
    assert check_names("quick") == QUICK_NAMES
    full = check_names("full")
    assert full[: len(QUICK_NAMES)] == QUICK_NAMES
    assert set(full) - set(QUICK_NAMES) == {
        "small-max-mc",
        "reference-maxima",
        "desk-scale-max",
        "parabola-mean",
        "covariance-grids",
        "queues",
        "pattern-max-mc",
    }


def test_quick_scale_passes():
    result = run_checks("quick")
    assert result.passed, [r.describe() for r in result.failures]
    assert result.scale == "quick"
    assert result.base_seed == 0
    assert result.elapsed > 0
    assert {r.quantity for r in result.reports} >= {
        "exact-pmf-enumeration-failures",
        "small-max-enumeration-vs-dp-failures",
        "runs-peak-mean",
        "random-window-route-failures",
        "exact-moments-runtime-seconds",
    }


def test_progress_callback_sees_every_check():
    seen = []
    run_checks("quick", progress=lambda name, reports: seen.append(name))
    assert seen == QUICK_NAMES


def test_override_injects_a_failure():
    # Shifting a closed-form reference must break the comparison: the
    # harness is not allowed to pass vacuously.
    result = run_checks("quick", overrides={"runs-variance-rate": 1 / 8})
    assert not result.passed
    failing = {r.quantity for r in result.failures}
    assert "runs-variance-rate" in failing


def test_unknown_override_and_scale_rejected():
    with pytest.raises(ValueError):
        run_checks("quick", overrides={"no-such-reference": 1.0})
    with pytest.raises(ValueError):
        run_checks("medium")


def test_references_table_spot_values():
    assert REFERENCES["brownian-parabola-mean"] == pytest.approx(0.996193)
    assert REFERENCES["runs-variance-rate"] == pytest.approx(1 / 16)
    assert REFERENCES["run-length-1-variance-rate"] == pytest.approx(76 / 729)
    assert REFERENCES["run-length-1-jump-variance"] == pytest.approx(80 / 81)
