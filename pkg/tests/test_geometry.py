"""Unit tests for the geometric primitives."""

import numpy as np
import pytest

from coverage_lab.errors import DimensionMismatch, EmptyPolytope, ExactUnsupported
from coverage_lab.geometry import (Ball, Halfspace, HPolytope, Hyperplane,
                                   ball_in_halfspace_exact, ball_in_region,
                                   project_onto_polytope, sample_in_ball,
                                   shrink_polytope)


def unit_box(n: int, closed: bool = True) -> HPolytope:
    hs = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hs.append(Halfspace(e, 1.0, closed))
        hs.append(Halfspace(-e, 0.0, closed))
    return HPolytope(tuple(hs))


# --- Ball -------------------------------------------------------------------

def test_ball_is_open():
    b = Ball([0.0, 0.0], 1.0)
    assert b.contains([0.5, 0.0])
    assert not b.contains([1.0, 0.0])  # boundary point excluded
    assert not b.contains([1.5, 0.0])


def test_ball_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        Ball([0.0], 0.0)
    with pytest.raises(ValueError):
        Ball([0.0], -1.0)


def test_ball_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Ball([0.0, 0.0], 1.0).contains([0.0, 0.0, 0.0])


def test_sample_in_ball_stays_inside():
    rng = np.random.default_rng(7)
    b = Ball([3.0, -2.0, 1.0], 2.5)
    for surface in (False, True):
        pts = sample_in_ball(b.center, b.radius, rng, 500, surface=surface)
        d = np.linalg.norm(pts - b.center, axis=1)
        assert np.all(d < b.radius)
        if surface:
            assert np.all(d > 0.99 * b.radius)


# --- Halfspace / Hyperplane -------------------------------------------------

def test_halfspace_open_vs_closed():
    a = np.array([1.0, 0.0])
    assert Halfspace(a, 1.0, True).contains([1.0, 5.0])
    assert not Halfspace(a, 1.0, False).contains([1.0, 5.0])
    assert Halfspace(a, 1.0, False).contains([0.999, 5.0])


def test_halfspace_contains_many_matches_scalar():
    rng = np.random.default_rng(0)
    h = Halfspace(rng.standard_normal(3), 0.7, False)
    pts = rng.uniform(-2, 2, (200, 3))
    many = h.contains_many(pts)
    assert all(many[i] == h.contains(pts[i]) for i in range(len(pts)))


def test_halfspace_project_lands_on_boundary():
    h = Halfspace([0.0, 2.0], 4.0)  # x2 <= 2
    z = h.project(np.array([1.0, 5.0]))
    assert np.allclose(z, [1.0, 2.0])
    inside = np.array([1.0, 1.0])
    assert np.allclose(h.project(inside), inside)


def test_hyperplane_unit_canonical_sign():
    h1 = Hyperplane([0.0, 2.0], 6.0)
    h2 = Hyperplane([0.0, -1.0], -3.0)
    u1, c1 = h1.unit()
    u2, c2 = h2.unit()
    assert np.allclose(u1, u2) and abs(c1 - c2) < 1e-12


def test_hyperplane_signed_distance():
    h = Hyperplane([3.0, 0.0], 6.0)  # x1 = 2
    assert abs(h.signed_distance([5.0, 1.0]) - 3.0) < 1e-12
    assert abs(h.signed_distance([-1.0, 9.0]) + 3.0) < 1e-12
    assert h.contains([2.0, 123.0])


# --- HPolytope and shrinking ------------------------------------------------

def test_unit_box_membership():
    P = unit_box(2)
    assert P.contains([0.5, 0.5])
    assert P.contains([1.0, 1.0])  # closed faces
    assert not P.contains([1.1, 0.5])
    open_P = unit_box(2, closed=False)
    assert not open_P.contains([1.0, 0.5])


def test_shrink_polytope_characterizes_ball_containment():
    # B(c, r) in P iff c in shrink(P, r), over random cases
    rng = np.random.default_rng(1)
    P = unit_box(2)
    for _ in range(200):
        c = rng.uniform(-0.2, 1.2, 2)
        r = float(rng.uniform(0.05, 0.6))
        via_shrink = shrink_polytope(P, r).contains(c)
        direct = ball_in_region(Ball(c, r), P, "exact").ok
        # the exact check allows a hair of tangency slack; only demand
        # agreement away from exact tangency
        margin = min((h.b - float(h.a @ c)) / h.norm for h in P.halfspaces) - r
        if abs(margin) > 1e-7:
            assert via_shrink == direct


def test_shrink_rejects_negative_radius():
    with pytest.raises(ValueError):
        shrink_polytope(unit_box(2), -0.1)


def test_max_violation():
    P = unit_box(2)
    assert P.max_violation(np.array([0.5, 0.5])) == 0.0
    assert abs(P.max_violation(np.array([1.5, 0.5])) - 0.5) < 1e-12


# --- tangency convention ----------------------------------------------------

def test_tangent_ball_allowed_even_against_open_halfspace():
    # open ball tangent to the boundary has no interior point on it
    h_open = Halfspace([1.0, 0.0], 1.0, False)
    b = Ball([0.0, 0.0], 1.0)
    assert ball_in_halfspace_exact(b, h_open)
    assert not ball_in_halfspace_exact(Ball([0.1, 0.0], 1.0), h_open)


def test_ball_in_region_exact_refutation_witness():
    P = unit_box(2)
    cert = ball_in_region(Ball([0.9, 0.5], 0.5), P, "exact")
    assert cert.kind == "refuted"
    assert cert.witness is not None
    # witness lies inside the ball and outside the region
    assert np.linalg.norm(cert.witness - [0.9, 0.5]) < 0.5
    assert not P.contains(cert.witness)


def test_ball_in_region_exact_unsupported_kind():
    class Blob:
        pass

    with pytest.raises(ExactUnsupported):
        ball_in_region(Ball([0.0], 1.0), Blob(), "exact")


def test_ball_in_region_sampled():
    P = unit_box(2)
    good = ball_in_region(Ball([0.5, 0.5], 0.4), P, ("sampled", 2000, 0))
    assert good.kind == "unfalsified"
    assert good.samples == 2000 and good.seed == 0
    bad = ball_in_region(Ball([0.9, 0.5], 0.5), P, ("sampled", 2000, 0))
    assert bad.kind == "refuted"
    assert not P.contains(bad.witness)


# --- projection -------------------------------------------------------------

def test_projection_inside_is_identity():
    P = unit_box(3)
    x = np.array([0.25, 0.5, 0.75])
    z, d = project_onto_polytope(x, P, 1e-9)
    assert np.allclose(z, x) and d < 1e-9


def test_projection_onto_box_clips_coordinates():
    P = unit_box(3)
    x = np.array([2.0, -1.0, 0.5])
    z, d = project_onto_polytope(x, P, 1e-9)
    assert np.allclose(z, [1.0, 0.0, 0.5], atol=1e-8)
    assert abs(d - np.sqrt(2.0)) < 1e-8


def test_projection_onto_corner():
    P = unit_box(2)
    z, d = project_onto_polytope(np.array([3.0, 3.0]), P, 1e-9)
    assert np.allclose(z, [1.0, 1.0], atol=1e-8)
    assert abs(d - np.sqrt(8.0)) < 1e-8


def test_projection_empty_polytope_raises():
    empty = HPolytope((Halfspace([1.0, 0.0], 0.0), Halfspace([-1.0, 0.0], -1.0)))
    with pytest.raises(EmptyPolytope):
        project_onto_polytope(np.array([0.5, 0.5]), empty, 1e-9)


def test_projection_matches_halfspace_formula_randomly():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        a = rng.standard_normal(n)
        b = float(rng.uniform(-2, 2))
        P = HPolytope((Halfspace(a, b),))
        x = rng.uniform(-3, 3, n)
        z, d = project_onto_polytope(x, P, 1e-9)
        expected = max(0.0, (float(a @ x) - b) / np.linalg.norm(a))
        assert abs(d - expected) < 1e-8
        assert P.closure_contains(z, atol=1e-8)


def test_projection_distance_is_minimal_among_samples():
    # no sampled feasible point is closer than the reported projection
    rng = np.random.default_rng(9)
    for _ in range(20):
        hs = [Halfspace(rng.standard_normal(2), float(rng.uniform(0.5, 2.0)))
              for _ in range(4)]
        for i in range(2):
            e = np.zeros(2)
            e[i] = 1.0
            hs += [Halfspace(e, 3.0), Halfspace(-e, 3.0)]
        P = HPolytope(tuple(hs))
        x = rng.uniform(-6, 6, 2)
        try:
            z, d = project_onto_polytope(x, P, 1e-9)
        except EmptyPolytope:
            continue
        pts = rng.uniform(-3, 3, (4000, 2))
        feas = P.contains_many(pts)
        if feas.any():
            closest = np.min(np.linalg.norm(pts[feas] - x, axis=1))
            assert d <= closest + 1e-6
