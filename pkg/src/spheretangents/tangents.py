"""Finite common-tangent problems and the point-to-tangent-line map.

Both finite problems reduce to intersecting two conics in a projective
plane: tangent lines of a circle form a conic in the dual plane, and lines
through a point tangent to a sphere form a conic in the plane of
directions.  :func:`conic_intersections` handles both.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import (AllCoefficientsZero, DegenerateInput, IdenticalCones,
                     IdenticalSections, NotOnSphere, PointOnSphere, SpecialPoint,
                     ValidationError)
from .exactpoly import CLUSTER_RADIUS, LinearForm4, solve_real_coeff_quartic
from .plucker import (INCIDENCE_TOL, PAIRS, Plane, PluckerLine, Sphere, affine_parts,
                      hom, minors, normalize, pencil_frame, point_line_distance)

REAL_TOL = CLUSTER_RADIUS


def _make_frames(n=8, seed=20240607):
    rng = np.random.default_rng(seed)
    frames = [np.eye(3)]
    for _ in range(n - 1):
        q, r = np.linalg.qr(rng.normal(size=(3, 3)))
        frames.append(q * np.sign(np.diag(r)))
    return frames


_FRAMES = _make_frames()


def _normalize_complex(v):
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    return v / v[k]


def _is_real(v, tol=REAL_TOL):
    return bool(np.max(np.abs(np.imag(_normalize_complex(v)))) <= tol)


def _conic_in_x(C):
    """Coefficients of ``C(x, y, 1)`` as a quadratic in ``x`` with polys in ``y``."""
    p2 = np.array([C[0, 0]])
    p1 = np.array([2 * C[0, 1], 2 * C[0, 2]])
    p0 = np.array([C[1, 1], 2 * C[1, 2], C[2, 2]])
    return p2, p1, p0


def _resultant_quartic(A, B):
    a2, a1, a0 = _conic_in_x(A)
    b2, b1, b0 = _conic_in_x(B)
    u = np.polysub(np.polymul(a2, b0), np.polymul(b2, a0))
    v = np.polysub(np.polymul(a2, b1), np.polymul(b2, a1))
    w = np.polysub(np.polymul(a1, b0), np.polymul(b1, a0))
    res = np.polysub(np.polymul(u, u), np.polymul(v, w))
    res = np.concatenate((np.zeros(5 - res.size), res))
    return res


def conic_intersections(A, B):
    """Intersection points of two conics in the projective plane.

    Parameters
    ----------
    A, B : (3, 3) array
        Real symmetric matrices.

    Returns
    -------
    list of (point, multiplicity)
        ``point`` is a complex 3-vector normalized so its largest entry is
        1.  Multiplicities add up to 4 for conics without a common
        component.

    Raises
    ------
    AllCoefficientsZero
        If the conics share a component (infinitely many intersections).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    A = A / np.linalg.norm(A)
    B = B / np.linalg.norm(B)
    if min(np.linalg.norm(A - B), np.linalg.norm(A + B)) < 1e-12:
        raise AllCoefficientsZero("conics coincide")
    best = None
    for H in _FRAMES:
        Ah = H.T @ A @ H
        Bh = H.T @ B @ H
        res = _resultant_quartic(Ah, Bh)
        big = np.max(np.abs(res))
        if big < 1e-11:
            # the pair may only look degenerate in this frame
            continue
        score = min(abs(res[0]) / big, abs(Ah[0, 0]), abs(Bh[0, 0]))
        if best is None or score > best[0]:
            best = (score, H, Ah, Bh, res)
        if score > 0.05:
            break
    if best is None:
        raise AllCoefficientsZero("conics share a component")
    _, H, Ah, Bh, res = best
    roots = solve_real_coeff_quartic(res, atol=1e-14)
    scale = max([1.0] + [abs(r.value) for r in roots])
    out = []
    for root in roots:
        y = root.value
        pa = np.array([Ah[0, 0], 2 * (Ah[0, 1] * y + Ah[0, 2]),
                       Ah[1, 1] * y * y + 2 * Ah[1, 2] * y + Ah[2, 2]])
        xs = np.roots(pa) if abs(pa[0]) > 1e-14 else np.roots(pa[1:])
        cands = []
        for x in xs:
            v = np.array([x, y, 1.0], dtype=complex)
            q = abs(v @ Bh @ v) / (1.0 + abs(x) ** 2 + abs(y) ** 2)
            cands.append((q, complex(x), v))
        cands.sort(key=lambda c: c[0])
        k = root.multiplicity
        if (k >= 2 and len(cands) == 2 and cands[1][0] <= 1e-7
                and abs(cands[0][1] - cands[1][1]) > 1e-6 * scale):
            parts = [(cands[0][2], (k + 1) // 2), (cands[1][2], k // 2)]
        else:
            parts = [(cands[0][2], k)]
        for v, m in parts:
            out.append((_normalize_complex(H @ v), m))
    return out


# ---------------------------------------------------------------------------
# result containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tangent:
    """A (possibly complex) line with its multiplicity as a solution."""

    coords: np.ndarray
    multiplicity: int
    is_real: bool

    @property
    def line(self) -> PluckerLine:
        if not self.is_real:
            raise ValueError("complex tangent has no real line")
        return PluckerLine(self.coords.real, check=False)


@dataclass(frozen=True)
class TangentSet:
    tangents: tuple

    @property
    def lines(self):
        """``(complex Plücker vector, multiplicity)`` pairs."""
        return [(t.coords, t.multiplicity) for t in self.tangents]

    @property
    def total_multiplicity(self) -> int:
        return sum(t.multiplicity for t in self.tangents)

    @property
    def real_count(self) -> int:
        """Number of distinct real lines."""
        return sum(1 for t in self.tangents if t.is_real)

    def real_lines(self):
        return [(t.line, t.multiplicity) for t in self.tangents if t.is_real]

    def __len__(self):
        return len(self.tangents)

    def __iter__(self):
        return iter(self.tangents)


def _tangent(coords) -> tuple:
    c = _normalize_complex(coords)
    real = bool(np.max(np.abs(c.imag)) <= REAL_TOL)
    if real:
        c = c.real.astype(complex)
    return c, real


# ---------------------------------------------------------------------------
# circles in a plane
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanarChart:
    """Orthonormal chart ``origin + u*e1 + v*e2`` on an affine plane."""

    origin: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    @classmethod
    def for_plane(cls, pl: Plane) -> "PlanarChart":
        n = pl.normal
        origin = -pl.offset * n
        for axis in np.eye(3):
            e1 = axis - (axis @ n) * n
            if np.linalg.norm(e1) > 0.3:
                break
        e1 = e1 / np.linalg.norm(e1)
        return cls(origin, e1, np.cross(n, e1))

    def to_plane(self, point) -> np.ndarray:
        d = np.asarray(point, dtype=float) - self.origin
        return np.array([d @ self.e1, d @ self.e2])

    def lift_hom(self, uvw) -> np.ndarray:
        """Homogeneous chart point ``(u, v, w)`` -> homogeneous 3-space point."""
        u, v, w = uvw
        return np.concatenate(([w], w * self.origin + u * self.e1 + v * self.e2))


@dataclass(frozen=True)
class PlanarCircle:
    plane: Plane
    chart: PlanarChart
    center2d: tuple
    radius_sq: float

    @property
    def center(self) -> np.ndarray:
        u, v = self.center2d
        return self.chart.origin + u * self.chart.e1 + v * self.chart.e2

    def dual_conic(self) -> np.ndarray:
        """Matrix of ``(a u0 + b v0 + c)^2 - R (a^2 + b^2)`` in line coordinates."""
        u0, v0 = self.center2d
        L = np.array([u0, v0, 1.0])
        return np.outer(L, L) - self.radius_sq * np.diag([1.0, 1.0, 0.0])


def intersect_sphere_plane(s: Sphere, pl: Plane, chart: PlanarChart | None = None) -> PlanarCircle:
    """Section of a sphere by a plane, in the plane's chart.

    ``radius_sq`` is zero for a tangent plane and negative when the plane
    misses the sphere (imaginary circle).
    """
    chart = chart or PlanarChart.for_plane(pl)
    h = pl.signed_distance(s.center)
    foot = s.center - h * pl.normal
    uv = chart.to_plane(foot)
    return PlanarCircle(pl, chart, (float(uv[0]), float(uv[1])), s.radius ** 2 - h * h)


def _dual_point_to_line(xi, chart: PlanarChart) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    basis = np.eye(3)
    spans = sorted((np.cross(xi, e) for e in basis), key=lambda v: -np.linalg.norm(v))
    P1 = chart.lift_hom(spans[0])
    P2 = chart.lift_hom(spans[1])
    return minors(P1, P2)


def bitangents_in_plane(s1: Sphere, s2: Sphere, pl: Plane) -> TangentSet:
    """Common tangents of two spheres lying in a plane.

    Returns four lines counted with multiplicity (complex ones included).

    Raises
    ------
    IdenticalSections
        If the plane cuts both spheres in the same circle.
    DegenerateInput
        If the two dual conics share a component for any other reason.
    """
    chart = PlanarChart.for_plane(pl)
    c1 = intersect_sphere_plane(s1, pl, chart)
    c2 = intersect_sphere_plane(s2, pl, chart)
    scale = max(1.0, s1.radius, s2.radius, float(np.max(np.abs(s1.center))),
                float(np.max(np.abs(s2.center))))
    if (np.hypot(c1.center2d[0] - c2.center2d[0], c1.center2d[1] - c2.center2d[1]) <= 1e-12 * scale
            and abs(c1.radius_sq - c2.radius_sq) <= 1e-12 * scale ** 2):
        raise IdenticalSections("the plane cuts both spheres in the same circle")
    try:
        pts = conic_intersections(c1.dual_conic(), c2.dual_conic())
    except AllCoefficientsZero as exc:
        raise DegenerateInput(str(exc)) from exc
    out = []
    for xi, m in pts:
        real = _is_real(xi)
        if real:
            xi = np.real(_normalize_complex(xi))
        coords, real2 = _tangent(_dual_point_to_line(xi, chart))
        out.append(Tangent(coords, m, real and real2))
    return TangentSet(tuple(out))


def direction_conic(s: Sphere, p) -> np.ndarray:
    """Directions ``u`` of lines through ``p`` tangent to ``s``: ``u^T C u = 0``."""
    w = s.center - np.asarray(p, dtype=float)
    return (w @ w - s.radius ** 2) * np.eye(3) - np.outer(w, w)


def tangents_through_point(s1: Sphere, s2: Sphere, p) -> TangentSet:
    """Common tangents of two spheres passing through a point.

    Raises
    ------
    PointOnSphere
        If ``p`` lies on either sphere.
    IdenticalCones
        If both spheres subtend the same tangent cone from ``p``.
    """
    p = np.asarray(p, dtype=float)
    for s in (s1, s2):
        if abs(np.linalg.norm(s.center - p) - s.radius) <= 1e-9 * max(1.0, s.radius):
            raise PointOnSphere("point lies on a sphere")
    try:
        pts = conic_intersections(direction_conic(s1, p), direction_conic(s2, p))
    except AllCoefficientsZero as exc:
        raise IdenticalCones("tangent cones from the point coincide") from exc
    out = []
    P = hom(p).astype(complex)
    for u, m in pts:
        real = _is_real(u)
        if real:
            u = np.real(_normalize_complex(u))
        coords, real2 = _tangent(minors(P, np.concatenate(([0.0], u))))
        out.append(Tangent(coords, m, real and real2))
    return TangentSet(tuple(out))


# ---------------------------------------------------------------------------
# the correspondence between sphere points and tangent lines meeting a line
# ---------------------------------------------------------------------------

def _line_planes(ell: PluckerLine):
    a, _, n1, n2 = pencil_frame(ell)
    return n1, float(n1 @ a), n2, float(n2 @ a)


def phi_tangent_at(s: Sphere, ell: PluckerLine, q) -> PluckerLine:
    """The tangent line to ``s`` at ``q`` that meets ``ell``.

    Raises
    ------
    NotOnSphere
        If ``q`` is not on the sphere.
    SpecialPoint
        If the tangent plane at ``q`` does not meet ``ell`` in exactly one
        finite point.
    """
    q = np.asarray(q, dtype=float)
    M = q - s.center
    if abs(np.linalg.norm(M) - s.radius) > 1e-9 * max(1.0, s.radius):
        raise NotOnSphere("point is not on the sphere")
    mu = s.radius ** 2 + M @ s.center
    n1, l1, n2, l2 = _line_planes(ell)
    det = float(M @ np.cross(n1, n2))
    N = mu * np.cross(n1, n2) + l1 * np.cross(n2, M) + l2 * np.cross(M, n1)
    phi = minors(hom(q), np.concatenate(([det], N)))
    scale = (1.0 + np.linalg.norm(q)) * (abs(det) + np.linalg.norm(N))
    if abs(det) <= 1e-9 * np.linalg.norm(M):
        if np.linalg.norm(phi) > 1e-9 * scale:
            raise SpecialPoint("tangent plane is parallel to the line",
                               projective_line=PluckerLine(phi, check=False))
        raise SpecialPoint("tangent plane contains the line")
    if np.linalg.norm(phi) <= 1e-9 * scale:
        raise SpecialPoint("point lies on the line")
    return PluckerLine(phi, check=False)


@dataclass(frozen=True)
class SpecialPointInfo:
    point: np.ndarray  # homogeneous, complex
    tag: str           # "on_line", "tangent_plane_touch" or "tangency"
    is_real: bool

    @property
    def affine(self):
        """Affine coordinates, or None for a point at infinity."""
        if abs(self.point[0]) <= 1e-12 * np.max(np.abs(self.point)):
            return None
        return self.point[1:] / self.point[0]


@dataclass(frozen=True)
class SpecialPoints:
    points: tuple

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def real_points(self):
        return [p for p in self.points if p.is_real]


def _solve_binary_quadratic(a, b, c):
    """Roots ``(u : v)`` of ``a u^2 + b u v + c v^2``."""
    if abs(a) >= abs(c):
        return [(complex(z), 1.0) for z in np.roots([a, b, c])]
    return [(1.0, complex(z)) for z in np.roots([c, b, a])]


def special_points(s: Sphere, ell: PluckerLine) -> SpecialPoints:
    """Points of ``s`` on ``ell`` or whose tangent plane contains ``ell``."""
    a, d = affine_parts(ell)
    d = d / np.linalg.norm(d)
    if abs(point_line_distance(s.center, ell) - s.radius) <= 1e-9 * max(1.0, s.radius):
        foot = a + ((s.center - a) @ d) * d
        return SpecialPoints((SpecialPointInfo(hom(foot).astype(complex), "tangency", True),))
    pts = []
    w = a - s.center
    for t in np.roots([1.0, 2 * (d @ w), w @ w - s.radius ** 2]):
        x = np.concatenate(([1.0], a + t * d)).astype(complex)
        pts.append(SpecialPointInfo(x, "on_line", _is_real(x, 1e-9)))
    _, _, n1, n2 = pencil_frame(ell)
    pi1 = np.concatenate(([-(n1 @ a)], n1))
    pi2 = np.concatenate(([-(n2 @ a)], n2))
    Qi = np.linalg.inv(s.quadric())
    for u, v in _solve_binary_quadratic(pi1 @ Qi @ pi1, 2 * pi1 @ Qi @ pi2, pi2 @ Qi @ pi2):
        touch = _normalize_complex(Qi @ (u * pi1 + v * pi2))
        pts.append(SpecialPointInfo(touch, "tangent_plane_touch", _is_real(touch, 1e-9)))
    return SpecialPoints(tuple(pts))


# ---------------------------------------------------------------------------
# exact forms
# ---------------------------------------------------------------------------

class RationalLine(NamedTuple):
    point: tuple
    direction: tuple

    @classmethod
    def of(cls, point, direction) -> "RationalLine":
        return cls(tuple(Fraction(c) for c in point), tuple(Fraction(c) for c in direction))

    def to_plucker(self) -> PluckerLine:
        a = np.array([float(c) for c in self.point])
        d = np.array([float(c) for c in self.direction])
        return PluckerLine(minors(hom(a), hom(a + d)), check=False)


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def rational_line_planes(ell: RationalLine):
    """Two rational planes ``n . x = lam`` whose intersection is ``ell``."""
    d = ell.direction
    if all(c == 0 for c in d):
        raise ValidationError("zero direction")
    k = min(range(3), key=lambda i: abs(d[i]))
    e = tuple(Fraction(int(i == k)) for i in range(3))
    n1 = _cross(d, e)
    n2 = _cross(d, n1)
    lam1 = sum(x * y for x, y in zip(n1, ell.point))
    lam2 = sum(x * y for x, y in zip(n2, ell.point))
    return n1, lam1, n2, lam2


def phi_forms(center, radius_sq, ell: RationalLine):
    """Six exact quadratic forms in ``(w, x, y, z)`` defining the map.

    At a sphere point ``(1, q)`` the forms give the Plücker vector of the
    tangent line at ``q`` meeting ``ell`` (up to scale); all six vanish
    exactly at the special points.  Ordered as ``PAIRS``.
    """
    c = tuple(Fraction(v) for v in center)
    r2 = Fraction(radius_sq)
    n1, lam1, n2, lam2 = rational_line_planes(ell)
    zero = Fraction(0)
    e = [LinearForm4(tuple(Fraction(int(i == j)) for j in range(4))) for i in range(4)]
    M = [e[j + 1] - e[0].scale(c[j]) for j in range(3)]
    mu = LinearForm4((r2 - sum(v * v for v in c),) + c)
    n12 = _cross(n1, n2)

    def cross_const_form(u, F):
        # u x F with u constant and F a triple of linear forms
        return (F[2].scale(u[1]) - F[1].scale(u[2]),
                F[0].scale(u[2]) - F[2].scale(u[0]),
                F[1].scale(u[0]) - F[0].scale(u[1]))

    det = LinearForm4((zero,) * 4)
    for j in range(3):
        det = det + M[j].scale(n12[j])
    c2M = cross_const_form(n2, M)                 # n2 x M
    c1M = cross_const_form(n1, M)                 # n1 x M = -(M x n1)
    N = [mu.scale(n12[j]) + c2M[j].scale(lam1) - c1M[j].scale(lam2) for j in range(3)]
    A = e
    B = [det] + N
    return tuple(A[i] * B[j] - A[j] * B[i] for i, j in PAIRS)


def evaluate_forms(forms, q) -> np.ndarray:
    """Numeric value of the forms at the affine point ``q``."""
    pt = np.concatenate(([1.0], np.asarray(q, dtype=float)))
    return np.array([f.evaluate_float(pt) for f in forms], dtype=float)
