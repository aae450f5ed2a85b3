"""Structural analysis of classifiers: boundary refinement, asymptotic
direction estimation, halfspace certificates, the refined-linear structure
classifier, negligibility, and generalized-binary-linear recognition.

All "infinite coverage" talk here means ExceedsCap at the configured cap:
verdicts are empirical evidence gathered from finitely many probes, not
proofs, and they carry the cap used.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import dsl
from .engine import (Anchor, CoverageResult, coverage_at, default_cap,
                     default_tol)
from .errors import (DegenerateSequence, RefinementPoint, UnsupportedRegion)
from .geometry import Certificate, Halfspace, HPolytope, Hyperplane, as_point
from .model import (REFINEMENT, AnalyticRegion, Classifier, UnionOfPolytopes,
                    label_of, sample_box)


# --- verdict types ---------------------------------------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class StructureVerdict:
    """RefinedLinear | NotRefinedLinear | TrivialClassifier | Inconclusive."""

    kind: str  # "refined_linear" | "not_refined_linear" | "trivial" | "inconclusive"
    cap: float | None = None
    hyperplane: Hyperplane | None = None
    label_pair: tuple | None = None
    witness: np.ndarray | None = None
    coverage: CoverageResult | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.cap is not None:
            out["cap"] = float(self.cap)
        if self.hyperplane is not None:
            u, c = self.hyperplane.unit()
            out["hyperplane"] = {"a": [float(v) for v in u], "b": float(c)}
        if self.label_pair is not None:
            out["labels"] = list(self.label_pair)
        if self.witness is not None:
            out["witness"] = [float(v) for v in self.witness]
        if self.coverage is not None:
            out["witness_coverage"] = self.coverage.describe()
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclasses.dataclass(frozen=True, eq=False)
class DirectionEstimate:
    direction: np.ndarray  # unit vector
    residual_angles: tuple  # radians, one per anchor


@dataclasses.dataclass(frozen=True, eq=False)
class GeneralizedLinearVerdict:
    is_generalized_binary_linear: bool
    hyperplane: Hyperplane | None = None
    reason: str | None = None


# --- boundary refinement ---------------------------------------------------

def _hyperplane_piece(a: np.ndarray, b: float, extra=()) -> HPolytope:
    """Degenerate polytope {a.x = b} intersected with extra closed constraints."""
    eq = (Halfspace(a, b, True), Halfspace(-a, -b, True))
    return HPolytope(eq + tuple(Halfspace(h.a, h.b, True) for h in extra))


def _piece_signature(p: HPolytope):
    """Canonical signature of a hyperplane-shaped piece (no side constraints),
    or None if the piece is not a bare hyperplane."""
    if len(p.halfspaces) != 2:
        return None
    h1, h2 = p.halfspaces
    u1, o1 = h1.a / h1.norm, h1.b / h1.norm
    u2, o2 = h2.a / h2.norm, h2.b / h2.norm
    if float(u1 @ u2) > -1.0 + 1e-12 or abs(o1 + o2) > 1e-9:
        return None
    return Hyperplane(h1.a, h1.b).unit()


def _strictify_expr(e):
    if isinstance(e, dsl.Cmp):
        op = {"<=": "<", ">=": ">"}.get(e.op, e.op)
        if op == "==":
            raise UnsupportedRegion("cannot refine an equality predicate label")
        return dsl.Cmp(op, e.left, e.right)
    if isinstance(e, dsl.BoolOp):
        return dsl.BoolOp(e.op, _strictify_expr(e.left), _strictify_expr(e.right))
    if isinstance(e, dsl.Not):
        raise UnsupportedRegion("cannot refine predicates containing 'not'")
    if isinstance(e, dsl.BoolLit):
        return e
    raise UnsupportedRegion(f"cannot refine predicate node {type(e).__name__}")


def _closure_expr(e):
    if isinstance(e, dsl.Cmp):
        op = {"<": "<=", ">": ">="}.get(e.op, e.op)
        return dsl.Cmp(op, e.left, e.right)
    if isinstance(e, dsl.BoolOp):
        return dsl.BoolOp(e.op, _closure_expr(e.left), _closure_expr(e.right))
    if isinstance(e, dsl.BoolLit):
        return e
    raise UnsupportedRegion(f"cannot refine predicate node {type(e).__name__}")


def _polytope_open(p: HPolytope) -> HPolytope:
    return HPolytope(tuple(Halfspace(h.a, h.b, False) for h in p.halfspaces))


def _polytope_boundary_pieces(p: HPolytope):
    pieces = []
    for i, h in enumerate(p.halfspaces):
        others = tuple(o for j, o in enumerate(p.halfspaces) if j != i)
        pieces.append(_hyperplane_piece(h.a, h.b, extra=others))
    return pieces


def refine_boundary(C: Classifier) -> Classifier:
    """Replace each label by its strict-inequality (interior-style) version
    and collect the former boundary pieces into the refinement set.

    label_of agrees with the input everywhere off the new refinement set.
    Feeding an already-refined classifier whose refinement set equals the
    label boundaries returns it unchanged.
    """
    analytic_labels = [isinstance(r, AnalyticRegion) for r in C.labels.values()]
    if any(analytic_labels):
        if not all(analytic_labels):
            raise UnsupportedRegion("cannot mix analytic and polytope labels in refine")
        return _refine_analytic(C)

    new_labels = {}
    pieces = []
    for name, region in C.labels.items():
        if isinstance(region, Halfspace):
            new_labels[name] = Halfspace(region.a, region.b, False)
            pieces.append(_hyperplane_piece(region.a, region.b))
        elif isinstance(region, HPolytope):
            new_labels[name] = _polytope_open(region)
            pieces.extend(_polytope_boundary_pieces(region))
        elif isinstance(region, UnionOfPolytopes):
            new_labels[name] = UnionOfPolytopes(
                tuple(_polytope_open(p) for p in region.polytopes))
            for p in region.polytopes:
                pieces.extend(_polytope_boundary_pieces(p))
        else:
            raise UnsupportedRegion(f"cannot refine region {type(region).__name__}")

    existing = []
    if C.refinement_set is not None:
        if isinstance(C.refinement_set, UnionOfPolytopes):
            existing = list(C.refinement_set.polytopes)
        elif isinstance(C.refinement_set, HPolytope):
            existing = [C.refinement_set]
        else:
            raise UnsupportedRegion("existing refinement set must be polytopal")

    # dedupe bare-hyperplane pieces against each other and the existing set
    def dedupe(seq, seen):
        out = []
        for p in seq:
            sig = _piece_signature(p)
            if sig is not None:
                key = (tuple(np.round(sig[0], 9)), round(sig[1], 9))
                if key in seen:
                    continue
                seen.add(key)
            out.append(p)
        return out

    seen = set()
    kept_existing = dedupe(existing, seen)
    new_pieces = dedupe(pieces, seen)
    if existing and not new_pieces:
        return C  # refinement set already covers every boundary piece
    all_pieces = tuple(kept_existing + new_pieces)
    refinement = all_pieces[0] if len(all_pieces) == 1 else UnionOfPolytopes(all_pieces)
    return Classifier(dimension=C.dimension, labels=new_labels,
                      refinement_set=refinement, domain_box=C.domain_box,
                      probe_points=C.probe_points)


def _refine_analytic(C: Classifier) -> Classifier:
    from .model import analytic  # late import to avoid cycle at module load

    new_labels = {}
    boundary_terms = []
    for name, region in C.labels.items():
        expr = region.predicate.expr
        strict = _strictify_expr(expr)
        new_labels[name] = AnalyticRegion(
            dsl.Predicate(strict, C.dimension))
        boundary_terms.append(
            dsl.BoolOp("and", _closure_expr(expr), dsl.Not(strict)))
    combined = boundary_terms[0]
    for term in boundary_terms[1:]:
        combined = dsl.BoolOp("or", combined, term)
    refinement = AnalyticRegion(dsl.Predicate(combined, C.dimension))
    return Classifier(dimension=C.dimension, labels=new_labels,
                      refinement_set=refinement, domain_box=C.domain_box,
                      probe_points=C.probe_points)


# --- asymptotic direction --------------------------------------------------

def estimate_asymptotic_direction(anchors, x) -> DirectionEstimate:
    """Unit directions from x to the anchor centers, with residual angles
    against the final direction."""
    x = as_point(x)
    anchors = list(anchors)
    if len(anchors) < 3:
        raise DegenerateSequence(f"need at least 3 anchors, got {len(anchors)}")
    radii = [a.ball.radius for a in anchors]
    if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValueError("anchor radii must be strictly increasing")
    dirs = []
    for a in anchors:
        if not a.ball.contains(x):
            raise ValueError("every anchor must contain the query point")
        v = a.ball.center - x
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            raise DegenerateSequence("anchor centered exactly at the query point")
        dirs.append(v / nrm)
    s_star = dirs[-1]
    residuals = tuple(
        float(np.arccos(np.clip(d @ s_star, -1.0, 1.0))) for d in dirs)
    return DirectionEstimate(direction=s_star, residual_angles=residuals)


# --- halfspace certificates ------------------------------------------------

def _halfspace_in_constraint(x, d, h: Halfspace):
    """Is H = {p : d.(p - x) > 0} inside the constraint a.p <(=) b?

    Returns (True, None) or (False, witness point in H violating it).
    """
    a, b = h.a, h.b
    au = a / h.norm
    if float(au @ d) <= -1.0 + 1e-9:
        # a antiparallel to d: sup of a.p over H is a.x (approached, never attained)
        if float(a @ x) <= b + 1e-9 * (1 + abs(b)):
            return True, None
        t = (float(a @ x) - b) / (2 * h.norm ** 2)
        return False, x + 1e-6 * d - t * 0  # any H point near x violates already
    # a.p is unbounded above on H: push along the part of a compatible with H
    w = a - float(a @ d) * d
    wn = float(np.linalg.norm(w))
    step = d if wn < 1e-12 else w / wn
    base = x + 1e-3 * d
    deficit = b - float(a @ base)
    t = max(1.0, (deficit + 1.0 + abs(b)) / max(float(a @ step), 1e-12))
    return False, base + t * step


def halfspace_certificate(C: Classifier, x, direction, budget: int = 20_000,
                          seed: int = 0) -> Certificate:
    """Test whether the open halfspace {p : direction.(p - x) > 0} lies
    inside the label region of x: exact for convex labels, sampled (box
    plus far field) otherwise."""
    x = as_point(x)
    name = label_of(C, x)
    if name == REFINEMENT:
        raise RefinementPoint("certificate base point lies in the refinement set")
    region = C.labels[name]
    d = as_point(direction)
    d = d / float(np.linalg.norm(d))

    if isinstance(region, (Halfspace, HPolytope)):
        hs = (region,) if isinstance(region, Halfspace) else region.halfspaces
        for h in hs:
            ok, witness = _halfspace_in_constraint(x, d, h)
            if not ok:
                return Certificate("refuted", witness=witness)
        return Certificate("proven")

    rng = np.random.default_rng(seed)
    diam = C.diameter
    n_box = max(budget * 9 // 10, 1)
    pts = sample_box(C.domain_box, rng, n_box)
    keep = (pts - x) @ d > 0
    pts = pts[keep]
    n_far = max(budget - n_box, budget // 10)
    u = rng.standard_normal((n_far, C.dimension))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    sign = np.sign(u @ d)
    sign[sign == 0] = 1.0
    far = x + (10.0 * diam) * (u * sign[:, None])
    for batch in (pts, far):
        if batch.shape[0] == 0:
            continue
        inside = region.contains_many(batch)
        if not np.all(inside):
            idx = int(np.flatnonzero(~inside)[0])
            return Certificate("refuted", witness=batch[idx],
                               samples=budget, seed=seed)
    return Certificate("unfalsified", samples=budget, seed=seed)


# --- structure classification ----------------------------------------------

def _feature_space_probes(C: Classifier, count: int, rng) -> list:
    """(point, label) pairs for `count` feature-space points, skipping
    refinement-set points."""
    probes = []
    attempts = 0
    while len(probes) < count and attempts < 50 * count + 1000:
        batch = sample_box(C.domain_box, rng, count)
        for p in batch:
            attempts += 1
            try:
                name = label_of(C, p)
            except Exception:
                continue
            if name == REFINEMENT:
                continue
            probes.append((p, name))
            if len(probes) == count:
                break
    return probes


def _bisect_boundary(C: Classifier, pa, pb, la, lb):
    """Boundary point on segment pa->pb whose endpoints carry labels la, lb.
    Returns (point, None) or (point, other_label) when a third label shows up."""
    lo, hi = 0.0, 1.0
    seg = pb - pa
    for _ in range(60):
        if hi - lo <= 1e-14:
            break
        mid = 0.5 * (lo + hi)
        p = pa + mid * seg
        try:
            name = label_of(C, p)
        except Exception:
            name = None
        if name == la:
            lo = mid
        elif name == lb:
            hi = mid
        elif name == REFINEMENT or name is None:
            return p, None
        else:
            return p, name
    return pa + 0.5 * (lo + hi) * seg, None


def _fit_hyperplane(points: np.ndarray):
    centroid = points.mean(axis=0)
    centered = points - centroid
    _, svals, vt = np.linalg.svd(centered, full_matrices=True)
    normal = vt[-1]
    residual = float(svals[-1]) / np.sqrt(points.shape[0]) if svals.size >= points.shape[1] else 0.0
    if points.shape[0] <= points.shape[1]:
        residual = 0.0
    return Hyperplane(normal, float(normal @ centroid)), residual


def classify_structure(C: Classifier, probe_count: int = 30,
                       cap: float | None = None, budget: int = 20_000,
                       seed: int = 0, tol: float | None = None) -> StructureVerdict:
    """Empirical refined-linear test: probe coverage everywhere, then (if
    every probe exceeds the cap with exactly two labels) recover the
    separating hyperplane from bisection-located boundary points."""
    cap = default_cap(C) if cap is None else float(cap)
    tol = default_tol(C) if tol is None else float(tol)
    rng = np.random.default_rng(seed)
    probes = _feature_space_probes(C, probe_count, rng)
    if not probes:
        return StructureVerdict("inconclusive", cap=cap,
                                reason="no feature-space probes found")
    seen = []
    for _, name in probes:
        if name not in seen:
            seen.append(name)
    if len(seen) == 1:
        return StructureVerdict("trivial", cap=cap, label_pair=(seen[0],))

    results = []
    for i, (p, name) in enumerate(probes):
        res = coverage_at(C, p, cap=cap, budget=budget, seed=seed * 1_000_003 + i, tol=tol)
        results.append(res)
        if res.kind in ("zero", "bounded"):
            return StructureVerdict("not_refined_linear", cap=cap, witness=p,
                                    coverage=res, reason="bounded coverage at probe")

    if len(seen) > 2:
        third = seen[2]
        idx = next(i for i, (_, n) in enumerate(probes) if n == third)
        return StructureVerdict("not_refined_linear", cap=cap,
                                witness=probes[idx][0], coverage=results[idx],
                                reason=f"more than two labels observed ({seen})")

    la, lb = seen
    group_a = [p for p, n in probes if n == la]
    group_b = [p for p, n in probes if n == lb]
    want = max(C.dimension + 1, 8)
    boundary_pts = []
    for k in range(want):
        pa = group_a[k % len(group_a)]
        pb = group_b[k % len(group_b)]
        pt, other = _bisect_boundary(C, pa, pb, la, lb)
        if other is not None:
            res = coverage_at(C, pt, cap=cap, budget=budget, seed=seed, tol=tol) \
                if other != REFINEMENT else None
            return StructureVerdict("not_refined_linear", cap=cap, witness=pt,
                                    coverage=res,
                                    reason=f"third label {other!r} on boundary segment")
        boundary_pts.append(pt)
    hyp, residual = _fit_hyperplane(np.array(boundary_pts))
    fit_tol = 1e-6 * C.diameter
    if residual > fit_tol:
        return StructureVerdict("inconclusive", cap=cap,
                                reason=f"boundary points not coplanar "
                                       f"(residual {residual:.3g} > {fit_tol:.3g})")

    # side-consistency on fresh probes
    fresh = _feature_space_probes(C, 2 * probe_count, rng)
    side_label = {}
    for p, name in fresh:
        s = hyp.signed_distance(p)
        if abs(s) <= 1e-9 * C.diameter:
            continue
        side = 1 if s > 0 else -1
        if side in side_label:
            if side_label[side] != name:
                return StructureVerdict(
                    "inconclusive", cap=cap,
                    reason="labels not consistent with hyperplane sides")
        else:
            side_label[side] = name
    if len(side_label) == 2 and side_label[1] == side_label[-1]:
        return StructureVerdict("inconclusive", cap=cap,
                                reason="labels not separated by fitted hyperplane")
    pair = (side_label.get(1, la), side_label.get(-1, lb))
    return StructureVerdict("refined_linear", cap=cap, hyperplane=hyp,
                            label_pair=pair)


# --- negligibility and generalized binary linear ---------------------------

def _polytope_forced_hyperplane(p: HPolytope, atol: float = 1e-9):
    """Hyperplane forced by an anti-parallel zero-gap constraint pair, or
    None when the piece is full-dimensional (as far as pair checks see)."""
    hs = p.halfspaces
    for i in range(len(hs)):
        ui, oi = hs[i].a / hs[i].norm, hs[i].b / hs[i].norm
        for j in range(i + 1, len(hs)):
            uj, oj = hs[j].a / hs[j].norm, hs[j].b / hs[j].norm
            if float(ui @ uj) < -1.0 + 1e-12 and abs(oi + oj) <= atol:
                return Hyperplane(hs[i].a, hs[i].b)
    return None


def is_negligible_region(region) -> bool:
    """True iff every polytope piece has affine dimension < n, detected
    structurally via forced-equality constraint pairs."""
    if isinstance(region, Hyperplane):
        return True
    if isinstance(region, Halfspace):
        return False
    if isinstance(region, HPolytope):
        return _polytope_forced_hyperplane(region) is not None
    if isinstance(region, UnionOfPolytopes):
        return all(_polytope_forced_hyperplane(p) is not None
                   for p in region.polytopes)
    raise UnsupportedRegion(
        f"negligibility undecidable for {type(region).__name__}")


def _sample_point_in(C: Classifier, region, rng, attempts: int = 200):
    for _ in range(attempts):
        batch = sample_box(C.domain_box, rng, 64)
        mask = region.contains_many(batch)
        idx = np.flatnonzero(mask)
        if idx.size:
            return batch[int(idx[0])]
    return None


def _label_boundary_hyperplane(C: Classifier, name: str, rng,
                               cap: float, budget: int, tol: float):
    """Boundary of the maximal open halfspace inside the label, or None."""
    region = C.labels[name]
    if isinstance(region, Halfspace):
        return Hyperplane(region.a, region.b)
    x = _sample_point_in(C, region, rng)
    if x is None:
        return None
    res = coverage_at(C, x, cap=cap, budget=budget, seed=int(rng.integers(2**32)), tol=tol)
    if res.kind != "exceeds_cap" or len(res.witnesses) < 3:
        return None
    d = estimate_asymptotic_direction(res.witnesses, x).direction
    cert = halfspace_certificate(C, x, d, budget=budget, seed=int(rng.integers(2**32)))
    if not cert.ok:
        return None

    def contained(offset: float) -> bool:
        base = x + (offset - float(d @ x)) * d
        try:
            return halfspace_certificate(C, base, d, budget=budget,
                                         seed=int(rng.integers(2**32))).ok
        except Exception:
            # base point may fall outside the label; test containment directly
            rng2 = np.random.default_rng(int(rng.integers(2**32)))
            pts = sample_box(C.domain_box, rng2, budget)
            keep = pts @ d > offset
            return bool(np.all(region.contains_many(pts[keep]))) if keep.any() else False

    c0 = float(d @ x)
    step = max(tol, 1e-3 * C.diameter)
    lo = c0
    while contained(lo - step) and step < 1e3 * C.diameter:
        lo -= step
        step *= 2
    hi = lo
    lo2 = lo - step
    for _ in range(40):
        if hi - lo2 <= max(tol, 1e-6 * C.diameter):
            break
        mid = 0.5 * (lo2 + hi)
        if contained(mid):
            hi = mid
        else:
            lo2 = mid
    return Hyperplane(d, hi)


def _same_hyperplane(h1: Hyperplane, h2: Hyperplane, scale: float,
                     angle_tol: float = 1e-6) -> bool:
    u1, c1 = h1.unit()
    u2, c2 = h2.unit()
    return (float(np.linalg.norm(u1 - u2)) <= angle_tol
            and abs(c1 - c2) <= max(angle_tol * scale, 1e-9))


def is_generalized_binary_linear(C: Classifier, probe_count: int = 100,
                                 seed: int = 0, cap: float | None = None,
                                 budget: int = 20_000,
                                 tol: float | None = None) -> GeneralizedLinearVerdict:
    """True iff exactly two labels are full-dimensional, each contains a
    maximal open halfspace, the two halfspace boundaries coincide, and all
    negligible labels lie inside that shared hyperplane."""
    if not C.ordinary:
        raise ValueError("generalized-binary-linear test expects an ordinary classifier")
    cap = default_cap(C) if cap is None else float(cap)
    tol = default_tol(C) if tol is None else float(tol)
    rng = np.random.default_rng(seed)

    negligible, full = [], []
    for name, region in C.labels.items():
        (negligible if is_negligible_region(region) else full).append(name)
    if len(full) != 2:
        return GeneralizedLinearVerdict(
            False, reason=f"{len(full)} full-dimensional labels, need exactly 2")

    hyps = []
    for name in full:
        hyp = _label_boundary_hyperplane(C, name, rng, cap, budget, tol)
        if hyp is None:
            return GeneralizedLinearVerdict(
                False, reason=f"label {name!r} admits no open-halfspace certificate")
        hyps.append(hyp)
    if not _same_hyperplane(hyps[0], hyps[1], C.diameter, angle_tol=1e-3):
        return GeneralizedLinearVerdict(
            False, reason="halfspace boundaries do not coincide")
    main = hyps[0]

    for name in negligible:
        region = C.labels[name]
        pieces = (region.polytopes if isinstance(region, UnionOfPolytopes)
                  else (region,))
        for piece in pieces:
            forced = _polytope_forced_hyperplane(piece)
            if forced is None or not _same_hyperplane(forced, main, C.diameter,
                                                      angle_tol=1e-6):
                return GeneralizedLinearVerdict(
                    False, reason=f"negligible label {name!r} lies off the "
                                  f"separating hyperplane")
    return GeneralizedLinearVerdict(True, hyperplane=main)
