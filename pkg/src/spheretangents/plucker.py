"""Lines, planes and spheres in Plücker coordinates.

Homogeneous points are 4-vectors ``(w, x, y, z)`` with ``w`` the
homogenizing coordinate.  A line spanned by points ``x`` and ``y`` has the
Plücker vector ``(p01, p02, p03, p12, p13, p23)`` with
``pij = x_i y_j - x_j y_i``.  For affine points ``(1, a)`` and ``(1, b)``
this gives direction ``(p01, p02, p03) = b - a`` and moment
``a x b = (p23, -p13, p12)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CoincidentPoints, LineAtInfinity, ValidationError

#: Index pairs of the Plücker coordinates, in storage order.
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

INCIDENCE_TOL = 1e-9
RESIDUAL_TOL = 1e-7
PLUCKER_TOL = 1e-12


def normalize(v):
    """Scale a projective vector so its largest-magnitude entry is 1."""
    v = np.asarray(v)
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        raise ValueError("zero vector has no projective normalization")
    return v / v[k]


def hom(p) -> np.ndarray:
    """Affine point -> homogeneous 4-vector with ``w = 1``."""
    p = np.asarray(p, dtype=float)
    return np.concatenate(([1.0], p))


def dehom(x) -> np.ndarray:
    x = np.asarray(x)
    return x[1:] / x[0]


def plucker_residual(p) -> float:
    p = np.asarray(p)
    return p[2] * p[3] - p[1] * p[4] + p[0] * p[5]


class PluckerLine:
    """A real line stored as a normalized Plücker 6-vector."""

    __slots__ = ("_p",)

    def __init__(self, coords, check: bool = True):
        p = np.array(coords, dtype=float).reshape(6)
        if not np.all(np.isfinite(p)) or not np.any(p):
            raise ValidationError("Plücker vector must be finite and nonzero")
        p = normalize(p)
        if check and abs(plucker_residual(p)) > 1e-9:
            raise ValidationError(
                f"not on the Klein quadric (residual {plucker_residual(p):.3g})")
        p.setflags(write=False)
        self._p = p

    @property
    def coords(self) -> np.ndarray:
        return self._p

    p01 = property(lambda self: self._p[0])
    p02 = property(lambda self: self._p[1])
    p03 = property(lambda self: self._p[2])
    p12 = property(lambda self: self._p[3])
    p13 = property(lambda self: self._p[4])
    p23 = property(lambda self: self._p[5])

    @property
    def direction(self) -> np.ndarray:
        return self._p[:3].copy()

    @property
    def moment(self) -> np.ndarray:
        """``a x d`` for any affine point ``a`` on the line."""
        p = self._p
        return np.array([p[5], -p[4], p[3]])

    @property
    def residual(self) -> float:
        return plucker_residual(self._p)

    def is_at_infinity(self, tol: float = INCIDENCE_TOL) -> bool:
        return float(np.linalg.norm(self._p[:3])) <= tol

    def unit(self) -> np.ndarray:
        return self._p / np.linalg.norm(self._p)

    def __eq__(self, other):
        return isinstance(other, PluckerLine) and bool(np.all(self._p == other._p))

    def __hash__(self):
        return hash(self._p.tobytes())

    def __repr__(self):
        return "PluckerLine(" + ", ".join(f"{c:.6g}" for c in self._p) + ")"


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(3)
        if not np.all(np.isfinite(c)):
            raise ValidationError("sphere center must be finite")
        r = float(self.radius)
        if not np.isfinite(r) or r <= 0:
            raise ValidationError(f"sphere radius must be positive, got {self.radius!r}")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def quadric(self) -> np.ndarray:
        """Symmetric 4x4 matrix of the sphere in ``(w, x, y, z)``."""
        x0, y0, z0 = self.center
        Q = np.eye(4)
        Q[0, 0] = x0 * x0 + y0 * y0 + z0 * z0 - self.radius ** 2
        Q[0, 1:] = Q[1:, 0] = -self.center
        return Q

    def __eq__(self, other):
        return (isinstance(other, Sphere) and self.radius == other.radius
                and bool(np.all(self.center == other.center)))

    def __hash__(self):
        return hash((self.center.tobytes(), self.radius))


@dataclass(frozen=True)
class Plane:
    """Plane ``a0 w + a1 x + a2 y + a3 z = 0``."""

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=float).reshape(4)
        if not np.any(a[1:]):
            raise ValidationError("plane at infinity is not an affine plane")
        a = a / np.linalg.norm(a[1:])
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    @classmethod
    def from_point_normal(cls, point, normal) -> "Plane":
        n = np.asarray(normal, dtype=float)
        return cls(np.concatenate(([-float(n @ np.asarray(point, dtype=float))], n)))

    @property
    def normal(self) -> np.ndarray:
        """Unit normal."""
        return self.coeffs[1:].copy()

    @property
    def offset(self) -> float:
        return float(self.coeffs[0])

    def signed_distance(self, point) -> float:
        return float(self.coeffs[0] + self.coeffs[1:] @ np.asarray(point, dtype=float))

    def __eq__(self, other):
        return isinstance(other, Plane) and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def minors(x, y) -> np.ndarray:
    """Plücker minors of two homogeneous points (complex input allowed)."""
    x = np.asarray(x)
    y = np.asarray(y)
    return np.array([x[i] * y[j] - x[j] * y[i] for i, j in PAIRS])


def line_through_points(p, q, tol: float = PLUCKER_TOL) -> PluckerLine:
    """Line spanned by two points (homogeneous 4-vectors or affine 3-vectors).

    Raises
    ------
    CoincidentPoints
        If the points are projectively equal.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.size == 3:
        p = hom(p)
    if q.size == 3:
        q = hom(q)
    m = minors(p, q)
    scale = np.linalg.norm(p) * np.linalg.norm(q)
    if scale == 0 or np.max(np.abs(m)) <= tol * scale:
        raise CoincidentPoints("points do not span a line")
    return PluckerLine(m, check=False)


def line_from_point_direction(point, direction) -> PluckerLine:
    d = np.asarray(direction, dtype=float)
    a = np.asarray(point, dtype=float)
    if np.linalg.norm(d) == 0:
        raise CoincidentPoints("zero direction")
    return line_through_points(hom(a), hom(a + d))


def line_matrix(m) -> np.ndarray:
    """Skew 4x4 matrix ``L`` with ``L[i, j] = p_ij``."""
    p = m.coords if isinstance(m, PluckerLine) else np.asarray(m)
    L = np.zeros((4, 4), dtype=p.dtype)
    for (i, j), v in zip(PAIRS, p):
        L[i, j] = v
        L[j, i] = -v
    return L


# ---------------------------------------------------------------------------
# forms and predicates
# ---------------------------------------------------------------------------

def meet_form(a, b) -> float:
    """Bilinear incidence form; zero iff the lines meet (projectively)."""
    p = a.coords if isinstance(a, PluckerLine) else np.asarray(a)
    q = b.coords if isinstance(b, PluckerLine) else np.asarray(b)
    return (p[0] * q[5] - p[1] * q[4] + p[2] * q[3]
            + p[3] * q[2] - p[4] * q[1] + p[5] * q[0])


def wedge2_matrix(s: Sphere) -> np.ndarray:
    """6x6 matrix of the tangency quadric of ``s`` on Plücker space."""
    x0, y0, z0 = s.center
    r2 = s.radius ** 2
    return np.array([
        [y0 * y0 + z0 * z0 - r2, -x0 * y0, -x0 * z0, y0, z0, 0.0],
        [-x0 * y0, x0 * x0 + z0 * z0 - r2, -y0 * z0, -x0, 0.0, z0],
        [-x0 * z0, -y0 * z0, x0 * x0 + y0 * y0 - r2, 0.0, -x0, -y0],
        [y0, -x0, 0.0, 1.0, 0.0, 0.0],
        [z0, 0.0, -x0, 0.0, 1.0, 0.0],
        [0.0, z0, -y0, 0.0, 0.0, 1.0],
    ])


def tangency_residual(m, s: Sphere) -> float:
    """``p^T (wedge2 Q) p`` on the normalized Plücker vector of ``m``."""
    p = m.coords if isinstance(m, PluckerLine) else normalize(np.asarray(m))
    W = wedge2_matrix(s)
    if np.iscomplexobj(p):
        return complex(p @ W @ p)
    return float(kernels.quadratic_forms(p.reshape(1, 6), W)[0])


def tangency_residuals(lines, s: Sphere) -> np.ndarray:
    """Batched :func:`tangency_residual` over an ``(n, 6)`` array."""
    P = np.asarray(lines, dtype=float).reshape(-1, 6)
    return kernels.quadratic_forms(P, wedge2_matrix(s))


def affine_parts(m: PluckerLine, tol: float = INCIDENCE_TOL):
    """``(point, direction)`` with ``point`` the foot from the origin.

    Raises
    ------
    LineAtInfinity
        If the line has no affine direction.
    """
    d = m.direction
    dd = float(d @ d)
    if np.sqrt(dd) <= tol:
        raise LineAtInfinity("line lies at infinity")
    return np.cross(d, m.moment) / dd, d


def point_line_distance(p, m: PluckerLine) -> float:
    a, d = affine_parts(m)
    return float(np.linalg.norm(np.cross(np.asarray(p, dtype=float) - a, d)) / np.linalg.norm(d))


def line_line_distance(a: PluckerLine, b: PluckerLine) -> float:
    """Euclidean distance between two affine lines."""
    pa, da = affine_parts(a)
    pb, db = affine_parts(b)
    n = np.cross(da, db)
    nn = np.linalg.norm(n)
    w = pb - pa
    if nn <= INCIDENCE_TOL * np.linalg.norm(da) * np.linalg.norm(db):
        return float(np.linalg.norm(np.cross(w, da)) / np.linalg.norm(da))
    return float(abs(w @ n) / nn)


def are_parallel(a: PluckerLine, b: PluckerLine, tol: float = INCIDENCE_TOL) -> bool:
    da = a.direction / np.linalg.norm(a.direction)
    db = b.direction / np.linalg.norm(b.direction)
    return float(np.linalg.norm(np.cross(da, db))) < tol


def plane_incidence(m, pl: Plane) -> np.ndarray:
    """The four linear conditions for ``m`` to lie in ``pl``."""
    L = line_matrix(m)
    return L @ pl.coeffs


def point_incidence(m, x) -> np.ndarray:
    """The four linear conditions for homogeneous point ``x`` to lie on ``m``."""
    p = m.coords if isinstance(m, PluckerLine) else np.asarray(m)
    p01, p02, p03, p12, p13, p23 = p
    x = np.asarray(x)
    x = x / np.max(np.abs(x))
    return np.array([
        x[0] * p12 - x[1] * p02 + x[2] * p01,
        x[0] * p13 - x[1] * p03 + x[3] * p01,
        x[0] * p23 - x[2] * p03 + x[3] * p02,
        x[1] * p23 - x[2] * p13 + x[3] * p12,
    ])


def line_in_plane(m, pl: Plane, tol: float = INCIDENCE_TOL) -> bool:
    return bool(np.max(np.abs(plane_incidence(m, pl))) <= tol)


def line_through_point(m, p, tol: float = INCIDENCE_TOL) -> bool:
    return bool(np.max(np.abs(point_incidence(m, p))) <= tol)


def meet_line_plane(m, pl: Plane) -> np.ndarray:
    """Homogeneous intersection point; zero vector if the line lies in the plane."""
    return line_matrix(m) @ pl.coeffs


def is_affine_transversal(m: PluckerLine, ell: PluckerLine, tol: float = INCIDENCE_TOL) -> bool:
    """``m`` meets ``ell`` at a finite point (parallel lines are excluded)."""
    return abs(meet_form(m, ell)) <= tol and not are_parallel(m, ell, tol)


def plane_through_line_and_point(m: PluckerLine, point) -> Plane:
    a, d = affine_parts(m)
    n = np.cross(d, np.asarray(point, dtype=float) - a)
    if np.linalg.norm(n) <= INCIDENCE_TOL * np.linalg.norm(d):
        raise CoincidentPoints("point lies on the line")
    return Plane.from_point_normal(a, n)


def pencil_frame(m: PluckerLine):
    """Point on ``m``, unit direction, and two unit normals spanning its pencil."""
    a, d = affine_parts(m)
    d = d / np.linalg.norm(d)
    k = int(np.argmin(np.abs(d)))
    e = np.zeros(3)
    e[k] = 1.0
    n1 = np.cross(d, e)
    n1 /= np.linalg.norm(n1)
    n2 = np.cross(d, n1)
    return a, d, n1, n2


def pencil_plane(m: PluckerLine, theta: float) -> Plane:
    """Plane through ``m`` at angle ``theta`` in its pencil (period pi)."""
    a, _, n1, n2 = pencil_frame(m)
    return Plane.from_point_normal(a, np.cos(theta) * n1 + np.sin(theta) * n2)
