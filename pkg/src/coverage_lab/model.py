"""Classifiers as labeled partitions of R^n with an optional refinement set.

A classifier is a named map of label regions plus an optional refinement
set region, claimed to partition space. Disjointness/exhaustiveness cannot
be decided exactly for analytic regions, so validation is sampled
falsification with witnesses.

Spec file format (JSON):

    {
      "dimension": 2,
      "domain_box": [[-20, -20], [20, 20]],          # optional, rows = lows, highs
      "labels": {"M": <region>, ...},
      "refinement_set": <region>,                    # optional
      "probe_points": [[0, 0], ...]                  # optional
    }

Region encodings:

    {"halfspace": {"a": [...], "b": r, "closed": bool}}
    {"polytope": {"halfspaces": [<halfspace body>, ...]}}
    {"union": [<polytope body>, ...]}
    {"analytic": "expr string"}
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from . import dsl
from .errors import (AmbiguousLabel, DimensionMismatch, NoLabel, SchemaError,
                     SpecParseError)
from .geometry import Halfspace, HPolytope, as_point

REFINEMENT = "refinement"

DEFAULT_BOX_HALFWIDTH = 20.0


@dataclasses.dataclass(frozen=True, eq=False)
class UnionOfPolytopes:
    polytopes: tuple

    def __post_init__(self):
        ps = tuple(self.polytopes)
        if not ps:
            raise ValueError("union must contain at least one polytope")
        n = ps[0].dimension
        for p in ps:
            if p.dimension != n:
                raise DimensionMismatch("inconsistent polytope dimensions in union")
        object.__setattr__(self, "polytopes", ps)

    @property
    def dimension(self) -> int:
        return self.polytopes[0].dimension

    def contains(self, x) -> bool:
        return any(p.contains(x) for p in self.polytopes)

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(X.shape[0], dtype=bool)
        for p in self.polytopes:
            out |= p.contains_many(X)
        return out


@dataclasses.dataclass(frozen=True, eq=False)
class AnalyticRegion:
    predicate: dsl.Predicate

    @property
    def dimension(self) -> int:
        return self.predicate.dimension

    def contains(self, x) -> bool:
        return self.predicate.evaluate(as_point(x))

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        return self.predicate.evaluate_many(X)


LabelRegion = Halfspace | HPolytope | UnionOfPolytopes | AnalyticRegion


def analytic(text: str, dimension: int) -> AnalyticRegion:
    return AnalyticRegion(dsl.Predicate(dsl.parse(text, dimension), dimension))


@dataclasses.dataclass(frozen=True, eq=False)
class PartitionReport:
    samples: int
    violations: tuple  # of (point, tuple of claiming names; empty tuple = unclaimed)
    violation_count: int

    @property
    def verdict(self) -> str:
        return "unfalsified" if self.violation_count == 0 else "violated"


@dataclasses.dataclass(frozen=True, eq=False)
class Classifier:
    dimension: int
    labels: dict  # name -> LabelRegion, insertion-ordered
    refinement_set: LabelRegion | None = None
    domain_box: np.ndarray | None = None  # shape (2, n): rows are lows, highs
    probe_points: tuple = ()

    def __post_init__(self):
        if not self.labels:
            raise ValueError("classifier needs at least one label")
        for name, region in self.labels.items():
            if region.dimension != self.dimension:
                raise DimensionMismatch(
                    f"label {name!r} has dimension {region.dimension}, "
                    f"classifier declares {self.dimension}")
        if self.refinement_set is not None and self.refinement_set.dimension != self.dimension:
            raise DimensionMismatch("refinement set dimension mismatch")
        if self.domain_box is None:
            box = np.array([[-DEFAULT_BOX_HALFWIDTH] * self.dimension,
                            [DEFAULT_BOX_HALFWIDTH] * self.dimension])
        else:
            box = np.asarray(self.domain_box, dtype=float)
            if box.shape != (2, self.dimension) or np.any(box[1] <= box[0]):
                raise ValueError(f"domain_box must be 2x{self.dimension} with lows < highs")
        object.__setattr__(self, "domain_box", box)
        object.__setattr__(self, "probe_points",
                           tuple(as_point(p) for p in self.probe_points))

    @property
    def ordinary(self) -> bool:
        return self.refinement_set is None

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.domain_box[1] - self.domain_box[0]))

    def regions(self):
        """(name, region) pairs including the refinement set."""
        yield from self.labels.items()
        if self.refinement_set is not None:
            yield REFINEMENT, self.refinement_set


def label_of(C: Classifier, x) -> str:
    """Name of the unique region containing x; REFINEMENT when only the
    refinement set claims it. Raises AmbiguousLabel / NoLabel on malformed
    partitions."""
    x = as_point(x)
    if x.shape[0] != C.dimension:
        raise DimensionMismatch(
            f"point dimension {x.shape[0]} vs classifier dimension {C.dimension}")
    claimers = [name for name, region in C.regions() if region.contains(x)]
    if len(claimers) == 1:
        return claimers[0]
    if not claimers:
        raise NoLabel(x)
    raise AmbiguousLabel(x, claimers)


def sample_box(box: np.ndarray, rng: np.random.Generator, m: int) -> np.ndarray:
    lo, hi = box
    return lo + (hi - lo) * rng.random((m, lo.shape[0]))


def validate_partition(C: Classifier, budget: int, seed: int = 0,
                       box: np.ndarray | None = None,
                       max_recorded: int = 20) -> PartitionReport:
    """Sampled partition falsification: every sampled point (plus any
    declared probe points) must be claimed by exactly one region."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    box = C.domain_box if box is None else np.asarray(box, dtype=float)
    rng = np.random.default_rng(seed)
    pts = sample_box(box, rng, budget)
    if C.probe_points:
        pts = np.vstack([pts, np.array(C.probe_points)])
    counts = np.zeros(pts.shape[0], dtype=int)
    masks = []
    names = []
    for name, region in C.regions():
        mask = region.contains_many(pts)
        counts += mask
        masks.append(mask)
        names.append(name)
    bad = np.flatnonzero(counts != 1)
    violations = []
    for idx in bad[:max_recorded]:
        claiming = tuple(names[j] for j, m in enumerate(masks) if m[idx])
        violations.append((pts[idx], claiming))
    return PartitionReport(samples=pts.shape[0], violations=tuple(violations),
                           violation_count=int(bad.size))


# --- serialization ---------------------------------------------------------

def _halfspace_to_dict(h: Halfspace) -> dict:
    return {"a": [float(v) for v in h.a], "b": float(h.b), "closed": bool(h.closed)}


def region_to_dict(region: LabelRegion) -> dict:
    if isinstance(region, Halfspace):
        return {"halfspace": _halfspace_to_dict(region)}
    if isinstance(region, HPolytope):
        return {"polytope": {"halfspaces": [_halfspace_to_dict(h) for h in region.halfspaces]}}
    if isinstance(region, UnionOfPolytopes):
        return {"union": [{"halfspaces": [_halfspace_to_dict(h) for h in p.halfspaces]}
                          for p in region.polytopes]}
    if isinstance(region, AnalyticRegion):
        return {"analytic": region.predicate.source}
    raise TypeError(f"not a region: {region!r}")


def _halfspace_from_dict(body: dict, where: str) -> Halfspace:
    if not isinstance(body, dict) or "a" not in body or "b" not in body:
        raise SchemaError(where, f"halfspace at {where} needs fields 'a' and 'b'")
    return Halfspace(np.asarray(body["a"], dtype=float), float(body["b"]),
                     bool(body.get("closed", True)))


def region_from_dict(body: dict, dimension: int, where: str) -> LabelRegion:
    if not isinstance(body, dict) or len(body) != 1:
        raise SchemaError(where, f"region at {where} must be a single-key object")
    kind, payload = next(iter(body.items()))
    if kind == "halfspace":
        return _halfspace_from_dict(payload, where)
    if kind == "polytope":
        hs = payload.get("halfspaces") if isinstance(payload, dict) else None
        if not hs:
            raise SchemaError(where, f"polytope at {where} needs nonempty 'halfspaces'")
        return HPolytope(tuple(_halfspace_from_dict(h, where) for h in hs))
    if kind == "union":
        if not isinstance(payload, list) or not payload:
            raise SchemaError(where, f"union at {where} must be a nonempty list")
        polys = []
        for p in payload:
            hs = p.get("halfspaces") if isinstance(p, dict) else None
            if not hs:
                raise SchemaError(where, f"union member at {where} needs 'halfspaces'")
            polys.append(HPolytope(tuple(_halfspace_from_dict(h, where) for h in hs)))
        return UnionOfPolytopes(tuple(polys))
    if kind == "analytic":
        if not isinstance(payload, str):
            raise SchemaError(where, f"analytic region at {where} must be a string")
        return analytic(payload, dimension)
    raise SchemaError(where, f"unknown region kind {kind!r} at {where}")


def classifier_to_dict(C: Classifier) -> dict:
    out = {
        "dimension": C.dimension,
        "domain_box": [[float(v) for v in row] for row in C.domain_box],
        "labels": {name: region_to_dict(region) for name, region in C.labels.items()},
    }
    if C.refinement_set is not None:
        out["refinement_set"] = region_to_dict(C.refinement_set)
    if C.probe_points:
        out["probe_points"] = [[float(v) for v in p] for p in C.probe_points]
    return out


def classifier_from_dict(data: dict) -> Classifier:
    if "dimension" not in data:
        raise SchemaError("dimension")
    try:
        dimension = int(data["dimension"])
    except (TypeError, ValueError):
        raise SchemaError("dimension", "field 'dimension' must be an integer")
    if dimension < 1:
        raise SchemaError("dimension", "dimension must be >= 1")
    if "labels" not in data or not isinstance(data["labels"], dict) or not data["labels"]:
        raise SchemaError("labels")
    labels = {name: region_from_dict(body, dimension, f"labels.{name}")
              for name, body in data["labels"].items()}
    refinement = None
    if "refinement_set" in data and data["refinement_set"] is not None:
        refinement = region_from_dict(data["refinement_set"], dimension, "refinement_set")
    box = None
    if "domain_box" in data and data["domain_box"] is not None:
        box = np.asarray(data["domain_box"], dtype=float)
        if box.shape != (2, dimension):
            raise SchemaError("domain_box", f"domain_box must be 2x{dimension}")
    probes = tuple(np.asarray(p, dtype=float) for p in data.get("probe_points", ()))
    return Classifier(dimension=dimension, labels=labels, refinement_set=refinement,
                      domain_box=box, probe_points=probes)


def load_spec(path) -> Classifier:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    return classifier_from_dict(data)


def save_spec(C: Classifier, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(classifier_to_dict(C), fh, indent=2)
        fh.write("\n")
