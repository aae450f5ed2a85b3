"""Unit tests for the classifier model, labeling, validation, serialization."""

import json

import numpy as np
import pytest

from coverage_lab.data import BUILTIN_SPECS, load_builtin
from coverage_lab.errors import (AmbiguousLabel, DimensionMismatch, NoLabel,
                                 SchemaError, SpecParseError)
from coverage_lab.geometry import Halfspace, HPolytope
from coverage_lab.model import (REFINEMENT, AnalyticRegion, Classifier,
                                UnionOfPolytopes, analytic,
                                classifier_from_dict, classifier_to_dict,
                                label_of, load_spec, save_spec,
                                validate_partition)


def binary_linear() -> Classifier:
    return Classifier(dimension=2, labels={
        "pos": Halfspace([0.0, 1.0], 0.0, False),   # x2 < 0 ... normal points up
        "neg": Halfspace([0.0, -1.0], 0.0, True),   # x2 >= 0
    })


# --- construction -----------------------------------------------------------

def test_classifier_requires_labels():
    with pytest.raises(ValueError):
        Classifier(dimension=2, labels={})


def test_classifier_dimension_checks():
    with pytest.raises(DimensionMismatch):
        Classifier(dimension=3, labels={"a": Halfspace([1.0, 0.0], 0.0)})
    with pytest.raises(DimensionMismatch):
        Classifier(dimension=2, labels={"a": Halfspace([1.0, 0.0], 0.0)},
                   refinement_set=Halfspace([1.0, 0.0, 0.0], 0.0))


def test_default_domain_box_and_diameter():
    C = binary_linear()
    assert C.domain_box.shape == (2, 2)
    assert np.allclose(C.domain_box, [[-20, -20], [20, 20]])
    assert abs(C.diameter - np.sqrt(3200.0)) < 1e-12


def test_bad_domain_box():
    with pytest.raises(ValueError):
        Classifier(dimension=2, labels={"a": Halfspace([1.0, 0.0], 0.0)},
                   domain_box=[[0.0, 0.0], [0.0, 1.0]])


def test_union_of_polytopes_membership():
    left = HPolytope((Halfspace([1.0, 0.0], 0.0, False),))
    right = HPolytope((Halfspace([-1.0, 0.0], -1.0),))
    u = UnionOfPolytopes((left, right))
    assert u.contains([-1.0, 0.0]) and u.contains([2.0, 0.0])
    assert not u.contains([0.5, 0.0])
    pts = np.array([[-1.0, 0.0], [0.5, 0.0], [2.0, 0.0]])
    assert np.array_equal(u.contains_many(pts), [True, False, True])


def test_analytic_region():
    r = analytic("x1 * x1 + x2 * x2 < 1", 2)
    assert isinstance(r, AnalyticRegion)
    assert r.contains([0.5, 0.5]) and not r.contains([1.0, 0.5])


# --- labeling ---------------------------------------------------------------

def test_label_of_unique():
    C = binary_linear()
    assert label_of(C, [0.0, -1.0]) == "pos"
    assert label_of(C, [0.0, 0.0]) == "neg"


def test_label_of_refinement_and_errors():
    strip = HPolytope((Halfspace([0.0, 1.0], 0.0), Halfspace([0.0, -1.0], 0.0)))
    C = Classifier(dimension=2, labels={
        "up": Halfspace([0.0, -1.0], 0.0, False),
        "down": Halfspace([0.0, 1.0], 0.0, False),
    }, refinement_set=strip)
    assert label_of(C, [3.0, 0.0]) == REFINEMENT

    overlapping = Classifier(dimension=2, labels={
        "a": Halfspace([1.0, 0.0], 1.0),
        "b": Halfspace([-1.0, 0.0], 1.0),
    })
    with pytest.raises(AmbiguousLabel):
        label_of(overlapping, [0.0, 0.0])

    gappy = Classifier(dimension=2, labels={
        "a": Halfspace([1.0, 0.0], 0.0, False),
        "b": Halfspace([-1.0, 0.0], -1.0, False),
    })
    with pytest.raises(NoLabel):
        label_of(gappy, [0.5, 0.0])


def test_label_of_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        label_of(binary_linear(), [0.0, 0.0, 0.0])


# --- partition validation ---------------------------------------------------

def test_validate_partition_clean():
    report = validate_partition(binary_linear(), budget=20_000, seed=0)
    assert report.verdict == "unfalsified"
    assert report.violation_count == 0
    assert report.samples == 20_000


def test_validate_partition_finds_overlap_and_gap():
    overlapping = Classifier(dimension=2, labels={
        "a": Halfspace([1.0, 0.0], 1.0),
        "b": Halfspace([-1.0, 0.0], 1.0),
    })
    rep = validate_partition(overlapping, budget=2000, seed=1)
    assert rep.verdict == "violated"
    point, claimers = rep.violations[0]
    assert set(claimers) == {"a", "b"}

    gappy = Classifier(dimension=2, labels={
        "a": Halfspace([1.0, 0.0], -10.0, False),
        "b": Halfspace([-1.0, 0.0], -10.0, False),
    })
    rep = validate_partition(gappy, budget=2000, seed=1)
    assert rep.verdict == "violated"
    assert any(claimers == () for _, claimers in rep.violations)


def test_validate_partition_includes_probe_points():
    C = Classifier(dimension=2, labels={
        "a": Halfspace([1.0, 0.0], 0.0, False),
        "b": Halfspace([-1.0, 0.0], 0.0, False),  # gap only on the line x1=0
    }, probe_points=[[0.0, 3.0]])
    rep = validate_partition(C, budget=100, seed=0)
    assert rep.verdict == "violated"  # the probe point is unclaimed
    assert rep.samples == 101


def test_validate_partition_shipped_specs_unfalsified():
    for name in BUILTIN_SPECS:
        C = load_builtin(name)
        rep = validate_partition(C, budget=100_000, seed=0)
        assert rep.verdict == "unfalsified", (name, rep.violations[:3])


# --- serialization ----------------------------------------------------------

def test_round_trip_all_region_kinds(tmp_path):
    strip = HPolytope((Halfspace([0.0, 1.0], 1.0), Halfspace([0.0, -1.0], 1.0)))
    C = Classifier(
        dimension=2,
        labels={
            "half": Halfspace([1.0, 2.0], 3.0, False),
            "poly": strip,
            "union": UnionOfPolytopes((strip, HPolytope((Halfspace([1.0, 0.0], -5.0),)))),
            "curve": analytic("10 * sin(0.1 * x1) < x2", 2),
        },
        refinement_set=strip,
        domain_box=[[-30.0, -10.0], [30.0, 10.0]],
        probe_points=[[1.0, 0.5]],
    )
    path = tmp_path / "spec.json"
    save_spec(C, path)
    D = load_spec(path)
    assert classifier_to_dict(D) == classifier_to_dict(C)
    rng = np.random.default_rng(4)
    pts = rng.uniform(-30, 30, (500, 2))
    for name in C.labels:
        assert np.array_equal(C.labels[name].contains_many(pts),
                              D.labels[name].contains_many(pts))


def test_builtin_specs_round_trip(tmp_path):
    for name in BUILTIN_SPECS:
        C = load_builtin(name)
        path = tmp_path / name
        save_spec(C, path)
        D = load_spec(path)
        assert classifier_to_dict(C) == classifier_to_dict(D)


def test_schema_errors():
    with pytest.raises(SchemaError) as exc:
        classifier_from_dict({"labels": {"a": {"halfspace": {"a": [1.0], "b": 0.0}}}})
    assert exc.value.field == "dimension"
    with pytest.raises(SchemaError):
        classifier_from_dict({"dimension": 0, "labels": {}})
    with pytest.raises(SchemaError):
        classifier_from_dict({"dimension": 2, "labels": {}})
    with pytest.raises(SchemaError):
        classifier_from_dict({"dimension": 2,
                              "labels": {"a": {"mystery": {}}}})
    with pytest.raises(SchemaError):
        classifier_from_dict({"dimension": 2,
                              "labels": {"a": {"polytope": {"halfspaces": []}}}})
    with pytest.raises(SchemaError):
        classifier_from_dict({"dimension": 2,
                              "labels": {"a": {"halfspace": {"a": [1, 0]}}}})


def test_spec_parse_error_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"dimension": 2,\n  "labels": }', encoding="utf-8")
    with pytest.raises(SpecParseError) as exc:
        load_spec(path)
    assert "line 2" in str(exc.value)


def test_builtin_unknown_name():
    with pytest.raises(KeyError):
        load_builtin("nope.json")


def test_builtin_specs_are_valid_json():
    from coverage_lab.data import builtin_spec_text
    for name in BUILTIN_SPECS:
        data = json.loads(builtin_spec_text(name))
        assert "dimension" in data and "labels" in data
