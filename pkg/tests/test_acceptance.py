"""Acceptance tests: the ten checks of the built-in verification suite,
with their runtime budgets, plus byte-identity of the full report."""

import time

from coverage_lab.verify import run_criterion, run_suite

SEED = 0


def _run(number: int, limit_seconds: float | None = None):
    start = time.monotonic()
    passed, title, lines = run_criterion(number, seed=SEED)
    elapsed = time.monotonic() - start
    assert passed, f"criterion {number} ({title}) failed:\n" + "\n".join(lines)
    if limit_seconds is not None:
        assert elapsed < limit_seconds, (
            f"criterion {number} took {elapsed:.1f}s, limit {limit_seconds}s")


def test_criterion_1_coverage_disparity():
    _run(1, limit_seconds=10.0)


def test_criterion_2_exceeds_every_cap():
    _run(2, limit_seconds=30.0)


def test_criterion_3_zero_boundary_coverage():
    _run(3, limit_seconds=10.0)


def test_criterion_4_oracle_equivalence():
    _run(4, limit_seconds=300.0)


def test_criterion_5_downward_closure():
    _run(5)


def test_criterion_6_direction_recovery():
    _run(6)


def test_criterion_7_structure_verdicts():
    _run(7, limit_seconds=120.0)


def test_criterion_8_no_refined_linear_with_three_labels():
    _run(8)


def test_criterion_9_generalized_binary_linear():
    _run(9)


def test_criterion_10_report_determinism():
    _run(10)


def test_full_suite_passes_and_is_byte_identical():
    ok1, report1 = run_suite(seed=SEED)
    ok2, report2 = run_suite(seed=SEED)
    assert ok1 and ok2
    assert report1 == report2
    assert report1.rstrip().endswith("overall: pass")
