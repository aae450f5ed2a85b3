"""Numeric primitives: points, balls, halfspaces, hyperplanes and H-polytopes.

Conventions
-----------
* A halfspace is ``{x : a.x < b}`` (open) or ``{x : a.x <= b}`` (closed).
* Balls are open: membership is ``||x - c|| < r``.
* An open ball is contained in a halfspace exactly when
  ``a.c <= b - r * ||a||``; equality is permitted even against an open
  halfspace, because tangency contributes no interior point.

No feature rescaling happens anywhere in this module; radii and distances
are in raw feature units.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import DimensionMismatch, EmptyPolytope, ExactUnsupported

DYKSTRA_MAX_CYCLES = 100_000


def as_point(x) -> np.ndarray:
    """Coerce to a finite 1-D float vector."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DimensionMismatch(f"point must be a 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite entries: {p}")
    return p


def _check_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def sample_in_ball(center: np.ndarray, radius: float, rng: np.random.Generator,
                   m: int, surface: bool = False) -> np.ndarray:
    """Uniform samples from an open ball, or from just inside its surface.

    Surface samples sit at radius ``r * (1 - 1e-9)`` so they are interior
    points of the open ball; they concentrate checks where containment
    violations of near-tangent balls live.
    """
    n = center.shape[0]
    d = rng.standard_normal((m, n))
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    d /= norms
    if surface:
        scale = radius * (1.0 - 1e-9)
        return center + scale * d
    u = rng.random((m, 1)) ** (1.0 / n)
    return center + (radius * (1.0 - 1e-12)) * u * d


@dataclasses.dataclass(frozen=True, eq=False)
class Ball:
    """Open ball B(center, radius)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0.0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def contains(self, x) -> bool:
        x = as_point(x)
        _check_dim(x, self.center)
        return float(np.linalg.norm(x - self.center)) < self.radius

    def sample(self, rng: np.random.Generator, m: int, surface: bool = False) -> np.ndarray:
        return sample_in_ball(self.center, self.radius, rng, m, surface=surface)


@dataclasses.dataclass(frozen=True, eq=False)
class Halfspace:
    """``{x : a.x < b}`` when open, ``{x : a.x <= b}`` when closed."""

    a: np.ndarray
    b: float
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not np.linalg.norm(self.a) > 0.0:
            raise ValueError("halfspace normal must be nonzero")

    @property
    def dimension(self) -> int:
        return self.a.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.a))

    def contains(self, x) -> bool:
        x = as_point(x)
        _check_dim(x, self.a)
        v = float(self.a @ x)
        return v <= self.b if self.closed else v < self.b

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        v = X @ self.a
        return v <= self.b if self.closed else v < self.b

    def closure_contains(self, x, atol: float = 0.0) -> bool:
        x = as_point(x)
        return float(self.a @ x) <= self.b + atol

    def shrink(self, r: float) -> "Halfspace":
        return Halfspace(self.a, self.b - r * self.norm, self.closed)

    def boundary(self) -> "Hyperplane":
        return Hyperplane(self.a, self.b)

    def project(self, x: np.ndarray) -> np.ndarray:
        """Euclidean projection of x onto the closure of the halfspace."""
        v = float(self.a @ x) - self.b
        if v <= 0.0:
            return x
        return x - (v / (self.norm ** 2)) * self.a


@dataclasses.dataclass(frozen=True, eq=False)
class Hyperplane:
    """``{x : a.x = b}``."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not np.linalg.norm(self.a) > 0.0:
            raise ValueError("hyperplane normal must be nonzero")

    @property
    def dimension(self) -> int:
        return self.a.shape[0]

    def unit(self) -> tuple[np.ndarray, float]:
        """Canonical (unit normal, offset) pair with a sign convention.

        The first nonzero coordinate of the unit normal is made positive so
        that equal hyperplanes compare equal regardless of stored sign.
        """
        nrm = float(np.linalg.norm(self.a))
        u = self.a / nrm
        c = self.b / nrm
        nz = np.flatnonzero(np.abs(u) > 1e-12)
        if nz.size and u[nz[0]] < 0:
            u, c = -u, -c
        return u, c

    def signed_distance(self, x) -> float:
        x = as_point(x)
        return (float(self.a @ x) - self.b) / float(np.linalg.norm(self.a))

    def contains(self, x, atol: float = 1e-9) -> bool:
        return abs(self.signed_distance(x)) <= atol

    def contains_many(self, X: np.ndarray, atol: float = 1e-9) -> np.ndarray:
        d = (X @ self.a - self.b) / float(np.linalg.norm(self.a))
        return np.abs(d) <= atol


@dataclasses.dataclass(frozen=True, eq=False)
class HPolytope:
    """Intersection of finitely many halfspaces; may be unbounded or empty."""

    halfspaces: tuple

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise ValueError("HPolytope needs at least one halfspace")
        n = hs[0].dimension
        for h in hs:
            if h.dimension != n:
                raise DimensionMismatch("inconsistent halfspace dimensions")
        object.__setattr__(self, "halfspaces", hs)

    @property
    def dimension(self) -> int:
        return self.halfspaces[0].dimension

    def contains(self, x) -> bool:
        x = as_point(x)
        _check_dim(x, self.halfspaces[0].a)
        return all(h.contains(x) for h in self.halfspaces)

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        out = np.ones(X.shape[0], dtype=bool)
        for h in self.halfspaces:
            out &= h.contains_many(X)
        return out

    def closure_contains(self, x, atol: float = 0.0) -> bool:
        x = as_point(x)
        return all(h.closure_contains(x, atol=atol * h.norm) for h in self.halfspaces)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest normalized constraint violation of the closure at x."""
        return max(
            max(0.0, (float(h.a @ x) - h.b) / h.norm) for h in self.halfspaces
        )


def shrink_polytope(P: HPolytope, r: float) -> HPolytope:
    """Inner parallel body: each a.x <= b becomes a.x <= b - r*||a||.

    B(c, r) lies inside P exactly when c lies in the shrunken polytope
    (tangency against the original boundary allowed).
    """
    if r < 0:
        raise ValueError(f"shrink radius must be nonnegative, got {r}")
    return HPolytope(tuple(h.shrink(r) for h in P.halfspaces))


def _antiparallel_infeasible(P: HPolytope, slack: float = 0.0) -> bool:
    """Cheap sound infeasibility check: anti-parallel constraints whose
    normalized offsets leave a negative gap."""
    hs = P.halfspaces
    units = [h.a / h.norm for h in hs]
    offs = [h.b / h.norm for h in hs]
    for i in range(len(hs)):
        for j in range(i + 1, len(hs)):
            if float(units[i] @ units[j]) < -1.0 + 1e-12:
                if offs[i] + offs[j] < -slack:
                    return True
    return False


def _project_active_set(x: np.ndarray, A: np.ndarray, b: np.ndarray):
    """Exact projection onto {c : A c <= b} (rows of A unit-normalized) by
    KKT enumeration over constraint subsets of size <= n.

    Returns the projection, or None when no subset satisfies the KKT
    conditions — which, up to numerical tolerance, means the set is empty.
    """
    import itertools

    m, n = A.shape
    scale = 1.0 + float(np.linalg.norm(x)) + float(np.max(np.abs(b)))
    eps = 1e-9 * scale
    if np.all(A @ x <= b + eps):
        return x
    for k in range(1, min(m, n) + 1):
        for S in itertools.combinations(range(m), k):
            A_S = A[list(S)]
            rhs = A_S @ x - b[list(S)]
            gram = A_S @ A_S.T
            try:
                lam = np.linalg.solve(gram, rhs)
            except np.linalg.LinAlgError:
                continue
            if np.any(lam < -eps):
                continue
            c = x - A_S.T @ lam
            if np.all(A @ c <= b + eps):
                return c
    return None


def project_onto_polytope(x, P: HPolytope, tol: float):
    """Nearest point of closure(P) to x and its distance.

    Small systems (subset count manageable) are solved exactly by active-set
    KKT enumeration; larger ones fall back to Dykstra's cyclic alternating
    projections. Raises EmptyPolytope when the constraint set is empty.
    """
    x = as_point(x)
    _check_dim(x, P.halfspaces[0].a)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if _antiparallel_infeasible(P):
        raise EmptyPolytope("anti-parallel constraints with negative gap")
    hs = P.halfspaces
    if len(hs) == 1:
        z = hs[0].project(x)
        return z, float(np.linalg.norm(x - z))

    m, n = len(hs), x.shape[0]
    if math.comb(m, min(m, n)) * min(m, n) <= 50_000:
        A = np.array([h.a / h.norm for h in hs])
        b = np.array([h.b / h.norm for h in hs])
        z = _project_active_set(x, A, b)
        if z is None:
            raise EmptyPolytope("no KKT point found; constraint set is empty")
        return z, float(np.linalg.norm(x - z))

    z = x.copy()
    corrections = [np.zeros_like(x) for _ in hs]
    eps = tol * 1e-2
    for _ in range(DYKSTRA_MAX_CYCLES):
        z_prev = z
        for i, h in enumerate(hs):
            y = z + corrections[i]
            z = h.project(y)
            corrections[i] = y - z
        if np.linalg.norm(z - z_prev) <= eps and P.max_violation(z) <= eps:
            return z, float(np.linalg.norm(x - z))
    if P.max_violation(z) > tol:
        raise EmptyPolytope("projection residual stalled above tol; set is empty "
                            "or numerically degenerate")
    return z, float(np.linalg.norm(x - z))


@dataclasses.dataclass(frozen=True)
class Certificate:
    """Outcome of a containment check.

    kind is one of 'proven', 'refuted', 'unfalsified'. A refutation carries
    a witness point; an unfalsified sampled check records (samples, seed).
    """

    kind: str
    witness: np.ndarray | None = None
    samples: int = 0
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return self.kind in ("proven", "unfalsified")


def _exact_ball_slack(h: Halfspace, B: Ball) -> float:
    return 1e-9 * (1.0 + abs(h.b) + B.radius * h.norm + h.norm * float(np.linalg.norm(B.center)))


def ball_in_halfspace_exact(B: Ball, h: Halfspace) -> bool:
    """Open-ball containment with tangency permitted: a.c <= b - r*||a||."""
    return float(h.a @ B.center) <= h.b - B.radius * h.norm + _exact_ball_slack(h, B)


def ball_in_region(B: Ball, region, method="exact") -> Certificate:
    """Certify B inside `region`.

    method='exact' supports Halfspace and HPolytope only and returns
    proven/refuted. method=('sampled', m, seed) draws m uniform interior
    points (half of them just inside the surface) and refutes on the first
    point outside the region, else returns unfalsified.
    """
    if method == "exact":
        if isinstance(region, Halfspace):
            hs = (region,)
        elif isinstance(region, HPolytope):
            hs = region.halfspaces
        else:
            raise ExactUnsupported(
                f"exact ball containment unsupported for {type(region).__name__}")
        for h in hs:
            if not ball_in_halfspace_exact(B, h):
                # witness just inside the ball, in the violated direction
                w = B.center + (B.radius * (1.0 - 1e-9) / h.norm) * h.a
                return Certificate("refuted", witness=w)
        return Certificate("proven")

    kind, m, seed = method
    if kind != "sampled":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    m_int = m // 2
    m_surf = m - m_int
    for pts in (B.sample(rng, m_int), B.sample(rng, m_surf, surface=True)):
        if pts.shape[0] == 0:
            continue
        inside = region.contains_many(pts)
        if not np.all(inside):
            idx = int(np.flatnonzero(~inside)[0])
            return Certificate("refuted", witness=pts[idx], samples=m, seed=seed)
    return Certificate("unfalsified", samples=m, seed=seed)
