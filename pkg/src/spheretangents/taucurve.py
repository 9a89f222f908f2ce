"""The curve of common tangents to two spheres that meet a fixed line.

Tracing over the pencil of planes through the line, a degree estimate,
descriptors of the low-degree components with membership residuals, the
exact rational quartic of the tangent-spheres configuration, and the
degree of the proper transform of a rational curve on a sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import (ForbiddenRatio, GeometryError, NotOnSphere, SpecialLine,
                     ValidationError)
from .exactpoly import HPoly2, LinearForm4, hp_gcd_many, sphere_form
from .plucker import (INCIDENCE_TOL, Plane, PluckerLine, Sphere, affine_parts,
                      hom, line_from_point_direction, line_through_points,
                      meet_form, minors, pencil_frame, pencil_plane, point_line_distance)
from .tangents import (RationalLine, bitangents_in_plane, phi_forms,
                       rational_line_planes, tangents_through_point)


# ---------------------------------------------------------------------------
# scenes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scene2:
    """A line and two spheres."""

    ell: PluckerLine
    s1: Sphere
    s2: Sphere

    def __post_init__(self):
        if self.ell.is_at_infinity():
            raise ValidationError("the line must be affine")
        if self.s1 == self.s2:
            raise ValidationError("the spheres must be distinct")

    @property
    def spheres(self):
        return (self.s1, self.s2)

    @property
    def scale(self) -> float:
        a, _ = affine_parts(self.ell)
        pts = [self.s1.center, self.s2.center, a]
        return max(1.0, self.s1.radius, self.s2.radius,
                   max(float(np.linalg.norm(p)) for p in pts))


def octic_scene() -> Scene2:
    """Spheres at ``(0, 2, 0)`` and ``(0, -2, 0)`` with radii 1 and sqrt(3); the x-axis."""
    return Scene2(line_through_points([0, 0, 0], [1, 0, 0]),
                  Sphere([0, 2, 0], 1.0), Sphere([0, -2, 0], math.sqrt(3.0)))


def mult4_scene(r=2) -> Scene2:
    """Spheres tangent at the origin with centres ``(1,0,0)``, ``(-r,0,0)``; the z-axis."""
    r = float(r)
    return Scene2(line_through_points([0, 0, 0], [0, 0, 1]),
                  Sphere([1, 0, 0], 1.0), Sphere([-r, 0, 0], abs(r)))


# ---------------------------------------------------------------------------
# the exact quartic
# ---------------------------------------------------------------------------

def _rational_sqrt(r: Fraction):
    n, d = r.numerator, r.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _check_ratio(r):
    if isinstance(r, float):
        r = Fraction(r).limit_denominator(10 ** 12) if r == r else r
    r = Fraction(r)
    if r in (-1, 0, 1):
        raise ForbiddenRatio(f"r = {r} is excluded")
    if r < 0:
        raise ForbiddenRatio("r < 0 (internal tangency) is not supported")
    return r


def _sqrt_r(r: Fraction):
    root = _rational_sqrt(r)
    return root if root is not None else math.sqrt(r)


def quartic_parametrize(r, s, t):
    """Plücker vector of the quartic family of common tangents.

    Exact (``Fraction`` entries) when ``r`` is the square of a rational,
    floating point otherwise.

    Raises
    ------
    ForbiddenRatio
        For ``r`` in ``{-1, 0, 1}`` or ``r < 0``.
    """
    r = _check_ratio(r)
    q = _sqrt_r(r)
    if isinstance(q, float):
        r, s, t = float(r), float(s), float(t)
    else:
        s, t = Fraction(s), Fraction(t)
    a = s * s + t * t
    b = s * s - t * t
    return (2 * q * a * b, 4 * q * s * t * a, (r - 1) * a * a,
            0 * a, 2 * r * b * b, 4 * r * s * t * b)


def quartic_line_matrix(r, s, t):
    """The two spanning points of the quartic family's line."""
    r = _check_ratio(r)
    q = _sqrt_r(r)
    if isinstance(q, float):
        r, s, t = float(r), float(s), float(t)
    else:
        s, t = Fraction(s), Fraction(t)
    a = s * s + t * t
    b = s * s - t * t
    return ((a, 0 * a, 0 * a, -q * b), (0 * a, 2 * q * b, 4 * q * s * t, (r - 1) * a))


def quartic_forms(r):
    """The three quadrics cutting out the tangent-spheres curve (besides ``p12``)."""
    r = Fraction(r) if not isinstance(r, float) else r

    def g(p):
        return p[2] * p[3] - p[1] * p[4] + p[0] * p[5]

    def q1(p):
        return (-p[0] ** 2 - 2 * (p[1] * p[3] + p[2] * p[4])
                + p[3] ** 2 + p[4] ** 2 + p[5] ** 2)

    def q2(p):
        return (-r * r * p[0] ** 2 + 2 * r * (p[1] * p[3] + p[2] * p[4])
                + p[3] ** 2 + p[4] ** 2 + p[5] ** 2)

    return g, q1, q2


def verify_quartic(r, pairs) -> bool:
    """True if every polynomial of the system vanishes at every ``(s, t)``."""
    g, q1, q2 = quartic_forms(r)
    for s, t in pairs:
        p = quartic_parametrize(r, s, t)
        if p[3] != 0 or g(p) != 0 or q1(p) != 0 or q2(p) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# tracing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TauSample:
    theta: float
    lines: tuple            # (PluckerLine, multiplicity)
    branch_ids: tuple = ()
    degenerate: bool = False


def _unit(coords) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    return c / np.linalg.norm(c)


def _same_line(a: PluckerLine, b: PluckerLine, tol=1e-5) -> bool:
    u, v = _unit(a.coords), _unit(b.coords)
    return min(np.linalg.norm(u - v), np.linalg.norm(u + v)) <= tol


def tau_in_plane(scene: Scene2, theta: float, drop_ell: bool = True) -> TauSample:
    """Real lines of the curve lying in the plane at angle ``theta`` of the pencil."""
    pl = pencil_plane(scene.ell, theta)
    try:
        ts = bitangents_in_plane(scene.s1, scene.s2, pl)
    except GeometryError:
        return TauSample(theta, (), (), True)
    lines = []
    for m, k in ts.real_lines():
        if drop_ell and _same_line(m, scene.ell):
            continue
        lines.append((m, k))
    return TauSample(theta, tuple(lines))


def trace_tau(scene: Scene2, n_planes: int = 180, drop_ell: bool = True) -> list:
    """Sample the real points of the curve over a uniform pencil of planes.

    Plane ``k`` has angle ``k*pi/n_planes``.  Lines equal to the fixed line
    itself are dropped by default (it lies in every plane of the pencil).
    Each line receives a branch id by nearest-neighbour continuation from
    the previous plane.
    """
    if n_planes < 2:
        raise ValidationError("n_planes must be at least 2")
    raw = [tau_in_plane(scene, k * np.pi / n_planes, drop_ell) for k in range(n_planes)]
    out = []
    prev = np.zeros((0, 6))
    prev_ids: list = []
    next_id = 0
    for smp in raw:
        cur = np.array([_unit(m.coords) for m, _ in smp.lines]).reshape(-1, 6)
        match = kernels.match_nearest(prev, cur, 0.2)
        ids = []
        for j in match:
            if j >= 0:
                ids.append(prev_ids[j])
            else:
                ids.append(next_id)
                next_id += 1
        out.append(TauSample(smp.theta, smp.lines, tuple(ids), smp.degenerate))
        prev, prev_ids = cur, ids
    return out


def branch_groups(samples, threshold: float = 0.5, window: int = 3) -> dict:
    """Group branch ids into real topological components.

    A branch ends either at a fold, where it merges with another branch as
    the pair of real tangents turns complex, or at a missed continuation.
    Endpoints (first and last sample of each branch) that lie within
    ``window`` planes and ``threshold`` of each other are joined, closest
    pairs first.  Branches alive at angle pi continue into those at angle
    0.  Returns ``{branch_id: group_index}`` with groups numbered from 0 in
    order of first appearance.
    """
    n = len(samples)
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def join(a, b):
        parent[find(a)] = find(b)

    first: dict = {}
    last: dict = {}
    for k, smp in enumerate(samples):
        for (m, _), b in zip(smp.lines, smp.branch_ids):
            find(b)
            v = _unit(m.coords)
            first.setdefault(b, (k, v))
            last[b] = (k, v)

    # wrap-around: the plane at angle pi is the plane at angle 0
    skip_end, skip_start = set(), set()
    if n >= 2:
        ends = [b for b, (k, _) in last.items() if k == n - 1]
        starts = [b for b, (k, _) in first.items() if k == 0]
        if ends and starts:
            A = np.array([last[b][1] for b in ends])
            B = np.array([first[b][1] for b in starts])
            match = kernels.match_nearest(A, B, 0.2)
            for jb, ja in enumerate(match):
                if ja >= 0:
                    join(ends[ja], starts[jb])
                    skip_end.add(ends[ja])
                    skip_start.add(starts[jb])

    points = [(b, k, v) for b, (k, v) in last.items() if b not in skip_end]
    points += [(b, k, v) for b, (k, v) in first.items() if b not in skip_start]
    cand = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            bi, ki, vi = points[i]
            bj, kj, vj = points[j]
            if bi == bj:
                continue
            gap = abs(ki - kj)
            gap = min(gap, n - gap)
            if gap > window:
                continue
            dist = min(np.linalg.norm(vi - vj), np.linalg.norm(vi + vj))
            if dist <= threshold:
                cand.append((dist, i, j))
    used = set()
    for dist, i, j in sorted(cand):
        if i in used or j in used:
            continue
        used.update((i, j))
        join(points[i][0], points[j][0])

    roots: dict = {}
    out = {}
    for smp in samples:
        for b in smp.branch_ids:
            r = find(b)
            if r not in roots:
                roots[r] = len(roots)
            out[b] = roots[r]
    return out


def lines_per_plane(samples) -> list:
    """Real line count (with multiplicity) of each sample."""
    return [sum(k for _, k in smp.lines) for smp in samples]


# ---------------------------------------------------------------------------
# degree
# ---------------------------------------------------------------------------

def degree_estimate(scene: Scene2, trials: int = 20, seed: int = 0, max_retries: int = 50) -> int:
    """Estimate the degree of the curve by counting lines meeting an auxiliary line.

    An auxiliary line ``m`` meeting the fixed line at ``p`` spans a plane
    with it; the curve's lines meeting ``m`` are the tangents in that plane
    plus those through ``p``, both counted with multiplicity.  The maximum
    over ``trials`` random choices is returned, clamped at 8.  Draws that
    hit a degenerate configuration are redrawn.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    a, d, _, _ = pencil_frame(scene.ell)
    scale = scene.scale
    best = 0
    for _ in range(trials):
        for _ in range(max_retries):
            theta = rng.uniform(0.0, np.pi)
            p = a + rng.normal() * scale * d
            try:
                n_plane = bitangents_in_plane(scene.s1, scene.s2,
                                              pencil_plane(scene.ell, theta)).total_multiplicity
                n_point = tangents_through_point(scene.s1, scene.s2, p).total_multiplicity
            except GeometryError:
                continue
            best = max(best, n_plane + n_point)
            break
    return min(best, 8)


# ---------------------------------------------------------------------------
# components
# ---------------------------------------------------------------------------

def _affine_unit(m):
    if not isinstance(m, PluckerLine):
        m = PluckerLine(m, check=False)
    a, d = affine_parts(m)
    return a, d / np.linalg.norm(d)


def _orthobasis(axis):
    axis = axis / np.linalg.norm(axis)
    k = int(np.argmin(np.abs(axis)))
    e = np.zeros(3)
    e[k] = 1.0
    b1 = np.cross(axis, e)
    b1 /= np.linalg.norm(b1)
    return axis, b1, np.cross(axis, b1)


class ComponentDescriptor:
    """A family of lines; ``residual`` is zero exactly on members."""

    kind = "component"
    degree = 0

    def residual(self, m) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def sample(self, n: int, rng=None) -> list:  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Pencil(ComponentDescriptor):
    """Lines through ``point`` in ``plane``."""

    point: np.ndarray
    plane: Plane
    kind = "pencil"
    degree = 1

    def residual(self, m) -> float:
        a, d = _affine_unit(m)
        dist = np.linalg.norm(np.cross(self.point - a, d))
        n = self.plane.normal
        return float(max(dist, abs(self.plane.signed_distance(a)), abs(d @ n)))

    def sample(self, n, rng=None):
        rng = rng or np.random.default_rng(0)
        _, b1, b2 = _orthobasis(self.plane.normal)
        out = []
        for phi in rng.uniform(0, np.pi, n):
            out.append(line_from_point_direction(self.point, np.cos(phi) * b1 + np.sin(phi) * b2))
        return out

    def describe(self):
        return {"kind": self.kind, "point": self.point.tolist(),
                "normal": self.plane.normal.tolist()}


@dataclass(frozen=True)
class ConeRuling(ComponentDescriptor):
    """Rulings of the cone with ``apex``, ``axis`` and ``half_angle``."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float
    kind = "cone"
    degree = 2

    def residual(self, m) -> float:
        a, d = _affine_unit(m)
        dist = np.linalg.norm(np.cross(self.apex - a, d))
        ax = self.axis / np.linalg.norm(self.axis)
        return float(max(dist, abs(abs(d @ ax) - np.cos(self.half_angle))))

    def sample(self, n, rng=None):
        rng = rng or np.random.default_rng(0)
        ax, b1, b2 = _orthobasis(self.axis)
        c, s = np.cos(self.half_angle), np.sin(self.half_angle)
        return [line_from_point_direction(self.apex, c * ax + s * (np.cos(p) * b1 + np.sin(p) * b2))
                for p in rng.uniform(0, 2 * np.pi, n)]

    def describe(self):
        return {"kind": self.kind, "apex": self.apex.tolist(), "axis": self.axis.tolist(),
                "half_angle": self.half_angle}


@dataclass(frozen=True)
class PlaneCircleTangents(ComponentDescriptor):
    """Lines in ``plane`` tangent to the circle of ``center`` and ``radius``."""

    plane: Plane
    center: np.ndarray
    radius: float
    kind = "plane_circle"
    degree = 2

    def residual(self, m) -> float:
        a, d = _affine_unit(m)
        n = self.plane.normal
        dist = np.linalg.norm(np.cross(self.center - a, d))
        return float(max(abs(self.plane.signed_distance(a)), abs(d @ n), abs(dist - self.radius)))

    def sample(self, n, rng=None):
        rng = rng or np.random.default_rng(0)
        _, b1, b2 = _orthobasis(self.plane.normal)
        out = []
        for phi in rng.uniform(0, 2 * np.pi, n):
            u = np.cos(phi) * b1 + np.sin(phi) * b2
            out.append(line_from_point_direction(self.center + self.radius * u,
                                                 -np.sin(phi) * b1 + np.cos(phi) * b2))
        return out

    def describe(self):
        return {"kind": self.kind, "center": self.center.tolist(),
                "normal": self.plane.normal.tolist(), "radius": self.radius}


def _throat(axis_pt, axis_dir, a, d):
    """Axis parameter and point on the line closest to the axis."""
    w = a - axis_pt
    b = axis_dir @ d
    den = 1.0 - b * b
    if den <= 1e-15:
        return 0.0, a
    s = ((axis_dir @ w) - b * (d @ w)) / den
    t = (b * (axis_dir @ w) - (d @ w)) / den
    return s, a + t * d


@dataclass(frozen=True)
class HyperboloidRuling(ComponentDescriptor):
    """One ruling of the hyperboloid swept by rotating ``generator`` about ``axis``.

    With ``opposite=True`` (the default) the family is the ruling that does
    not contain the generator; these are the lines meeting it.
    """

    axis: PluckerLine
    generator: PluckerLine
    opposite: bool = True
    kind = "hyperboloid"
    degree = 2

    def _frame(self):
        c, e = _affine_unit(self.axis)
        return c, e

    def _invariants(self, m):
        c, e = self._frame()
        a, d = _affine_unit(m)
        dist = line_distance_affine(c, e, a, d)
        cosang = abs(d @ e)
        twist = ((c - a) @ np.cross(e, d)) * np.sign(d @ e)
        s, _ = _throat(c, e, a, d)
        return dist, cosang, twist, s

    def ruling_side(self, m) -> int:
        """+1 if ``m`` twists like the generator, -1 otherwise."""
        t = self._invariants(m)[2]
        t0 = self._invariants(self.generator)[2]
        return 1 if t * t0 > 0 else -1

    def residual(self, m) -> float:
        dist, cosang, twist, s = self._invariants(m)
        g_dist, g_cos, g_twist, g_s = self._invariants(self.generator)
        target = -g_twist if self.opposite else g_twist
        return float(max(abs(dist - g_dist), abs(cosang - g_cos), abs(twist - target), abs(s - g_s)))

    def sample(self, n, rng=None):
        rng = rng or np.random.default_rng(0)
        c, e = self._frame()
        a, d = _affine_unit(self.generator)
        _, foot = _throat(c, e, a, d)
        if self.opposite:
            # reflect in the plane through the axis and the throat point
            radial = foot - c - ((foot - c) @ e) * e
            nrm = np.cross(e, radial)
            nrm /= np.linalg.norm(nrm)
            d = d - 2 * (d @ nrm) * nrm
        out = []
        for phi in rng.uniform(0, 2 * np.pi, n):
            R = _rotation(e, phi)
            out.append(line_from_point_direction(c + R @ (foot - c), R @ d))
        return out

    def describe(self):
        c, e = self._frame()
        return {"kind": self.kind, "axis_point": c.tolist(), "axis_direction": e.tolist(),
                "generator": self.generator.coords.tolist(), "opposite": self.opposite}


def line_distance_affine(a1, d1, a2, d2) -> float:
    n = np.cross(d1, d2)
    nn = np.linalg.norm(n)
    if nn <= 1e-12:
        return float(np.linalg.norm(np.cross(a2 - a1, d1)) / np.linalg.norm(d1))
    return float(abs((a2 - a1) @ n) / nn)


def _rotation(axis, phi) -> np.ndarray:
    k = axis / np.linalg.norm(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(phi) * K + (1 - np.cos(phi)) * K @ K


@dataclass(frozen=True)
class SimilarityFrame:
    """Maps canonical coordinates ``y`` to scene coordinates ``origin + scale * R y``."""

    origin: np.ndarray
    R: np.ndarray
    scale: float

    def to_scene(self, y):
        return self.origin + self.scale * (self.R @ np.asarray(y, dtype=float))

    def to_canonical(self, x):
        return self.R.T @ (np.asarray(x, dtype=float) - self.origin) / self.scale

    def line_to_canonical(self, m) -> PluckerLine:
        a, d = _affine_unit(m)
        return line_through_points(self.to_canonical(a), self.to_canonical(a + d))

    def line_to_scene(self, m) -> PluckerLine:
        a, d = _affine_unit(m)
        return line_through_points(self.to_scene(a), self.to_scene(a + d))


def _quartic_unit(r, phi):
    return _unit(np.array(quartic_parametrize(r, np.cos(phi), np.sin(phi)), dtype=float))


@dataclass(frozen=True)
class RationalQuartic(ComponentDescriptor):
    """The quartic family for spheres tangent at a point of the line.

    ``frame`` carries the canonical configuration (spheres centred at
    ``(1,0,0)`` and ``(-r,0,0)``, line = z-axis) to the scene.
    """

    frame: SimilarityFrame
    r: float
    kind = "rational_quartic"
    degree = 4

    def residual(self, m) -> float:
        u = _unit(self.frame.line_to_canonical(m).coords)

        def dist(phi):
            v = _quartic_unit(self.r, phi)
            return min(np.linalg.norm(u - v), np.linalg.norm(u + v))

        grid = np.linspace(0.0, np.pi, 181)
        vals = [dist(p) for p in grid]
        k = int(np.argmin(vals))
        h = grid[1] - grid[0]
        # search the offset from the grid point: the bounded method's
        # tolerance is relative to the argument
        res = minimize_scalar(lambda x: dist(grid[k] + x), bounds=(-h, h), method="bounded",
                              options={"xatol": 1e-14})
        return float(min(res.fun, vals[k]))

    def sample(self, n, rng=None):
        rng = rng or np.random.default_rng(0)
        out = []
        for phi in rng.uniform(0, np.pi, n):
            p = np.array(quartic_parametrize(self.r, np.cos(phi), np.sin(phi)), dtype=float)
            out.append(self.frame.line_to_scene(PluckerLine(p, check=False)))
        return out

    def describe(self):
        return {"kind": self.kind, "r": self.r, "origin": self.frame.origin.tolist(),
                "scale": self.frame.scale}


@dataclass(frozen=True)
class SymmetricQuartic(ComponentDescriptor):
    """Lines meeting ``ell`` at right angles and tangent to both spheres.

    This is the quartic component for two equal spheres exchanged by the
    half-turn about ``ell``.
    """

    ell: PluckerLine
    s1: Sphere
    s2: Sphere
    kind = "symmetric_quartic"
    degree = 4

    def residual(self, m) -> float:
        a, d = _affine_unit(m)
        la, ld = _affine_unit(self.ell)
        meet = abs(meet_form(_unit_affine(a, d), _unit_affine(la, ld)))
        t1 = abs(point_line_distance(self.s1.center, PluckerLine(minors(hom(a), hom(a + d)), check=False))
                 - self.s1.radius)
        t2 = abs(point_line_distance(self.s2.center, PluckerLine(minors(hom(a), hom(a + d)), check=False))
                 - self.s2.radius)
        return float(max(meet, t1, t2, abs(d @ ld)))

    def sample(self, n, rng=None):
        rng = rng or np.random.default_rng(0)
        la, ld = _affine_unit(self.ell)
        c, r = self.s1.center, self.s1.radius
        t0 = (c - la) @ ld
        out = []
        while len(out) < n:
            t = t0 + rng.uniform(-2.0, 2.0) * max(r, 1.0)
            p = la + t * ld
            ctr = c - ((c - p) @ ld) * ld       # centre of the section in the plane through p
            R2 = r * r - ((c - p) @ ld) ** 2
            w = ctr - p
            dw = np.linalg.norm(w)
            if R2 <= 0 or dw * dw <= R2 * (1 + 1e-9):
                continue
            # tangents from p to the circle (ctr, sqrt(R2)) inside the plane
            R = math.sqrt(R2)
            alpha = math.asin(R / dw)
            e = w / dw
            f = np.cross(ld, e)
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            u = math.cos(alpha) * e + sign * math.sin(alpha) * f
            out.append(line_from_point_direction(p, u))
        return out

    def describe(self):
        return {"kind": self.kind}


def _unit_affine(a, d):
    return minors(hom(a), hom(a + d))


def component_membership(m, c: ComponentDescriptor) -> float:
    """Nonnegative residual, zero iff ``m`` belongs to the family ``c``."""
    return c.residual(m)


def is_member(m, c: ComponentDescriptor, tol: float = 1e-8) -> bool:
    return component_membership(m, c) <= tol


def canonical_frame(p, c1, c2, ell_dir) -> tuple:
    """Frame and ratio for spheres externally tangent at ``p`` with the line through ``p``.

    Returns ``(SimilarityFrame, r)`` mapping the canonical configuration of
    radius ratio ``r = r2 / r1`` onto the scene.
    """
    p = np.asarray(p, dtype=float)
    e1 = np.asarray(c1, dtype=float) - p
    r1 = np.linalg.norm(e1)
    e1 = e1 / r1
    e3 = np.asarray(ell_dir, dtype=float)
    e3 = e3 - (e3 @ e1) * e1
    e3 /= np.linalg.norm(e3)
    e2 = np.cross(e3, e1)
    R = np.column_stack((e1, e2, e3))
    r = np.linalg.norm(np.asarray(c2, dtype=float) - p) / r1
    return SimilarityFrame(p, R, r1), float(r)


def detect_components(scene: Scene2, tol: float = 1e-9) -> list:
    """Known low-degree components of the curve for this scene.

    Returns every match (no tie-breaking) as component descriptors.
    """
    s1, s2, ell = scene.s1, scene.s2, scene.ell
    a, d = _affine_unit(ell)
    scale = scene.scale
    tol_s = tol * scale
    c1, c2, r1, r2 = s1.center, s2.center, s1.radius, s2.radius
    dc = c2 - c1
    dist_c = float(np.linalg.norm(dc))
    out: list = []

    def on_ell(x):
        return np.linalg.norm(np.cross(x - a, d)) <= tol_s

    # spheres tangent at a point
    tangent_point = None
    external = False
    if dist_c > tol_s:
        u = dc / dist_c
        if abs(dist_c - (r1 + r2)) <= tol_s:
            tangent_point, external = c1 + r1 * u, True
        elif abs(dist_c - abs(r1 - r2)) <= tol_s:
            tangent_point = c1 - r1 * u if r1 > r2 else c1 + r1 * u
    if tangent_point is not None:
        pl = Plane.from_point_normal(tangent_point, dc)
        in_plane = abs(pl.signed_distance(a)) <= tol_s and abs(d @ pl.normal) <= tol
        if on_ell(tangent_point) or in_plane:
            out.append(Pencil(tangent_point, pl))
        if external and on_ell(tangent_point) and in_plane and abs(r1 - r2) > tol_s:
            frame, r = canonical_frame(tangent_point, c1, c2, d)
            out.append(RationalQuartic(frame, r))

    # cones from homothety centres on the line
    if dist_c > tol_s:
        centres = [(r2 * c1 + r1 * c2) / (r1 + r2)]
        if abs(r1 - r2) > tol_s:
            centres.append((r2 * c1 - r1 * c2) / (r2 - r1))
        for h in centres:
            w = c1 - h
            if (on_ell(h) and np.linalg.norm(w) > r1 + tol_s
                    and np.linalg.norm(c2 - h) > r2 + tol_s):
                out.append(ConeRuling(h, w / np.linalg.norm(w),
                                      float(math.asin(r1 / np.linalg.norm(w)))))

    # common circle in a plane through the line
    if dist_c > tol_s:
        u = dc / dist_c
        x = (dist_c ** 2 + r1 ** 2 - r2 ** 2) / (2 * dist_c)
        rad2 = r1 ** 2 - x * x
        if rad2 > tol_s:
            ctr = c1 + x * u
            pl = Plane.from_point_normal(ctr, u)
            if abs(pl.signed_distance(a)) <= tol_s and abs(d @ u) <= tol:
                out.append(PlaneCircleTangents(pl, ctr, float(math.sqrt(rad2))))

    # hyperboloid: the line is tangent to both and skew to the line of centres
    if dist_c > tol_s:
        t1 = abs(point_line_distance(c1, ell) - r1) <= tol_s
        t2 = abs(point_line_distance(c2, ell) - r2) <= tol_s
        axis = line_through_points(c1, c2)
        skew = (line_distance_affine(c1, dc / dist_c, a, d) > tol_s
                and np.linalg.norm(np.cross(dc / dist_c, d)) > tol)
        if t1 and t2 and skew:
            out.append(HyperboloidRuling(axis, ell))

    # equal spheres exchanged by the half-turn about the line
    if abs(r1 - r2) <= tol_s and dist_c > tol_s:
        mid = (c1 + c2) / 2
        if on_ell(mid) and abs(dc @ d) <= tol_s and not on_ell(c1):
            out.append(SymmetricQuartic(ell, s1, s2))
    return out


# ---------------------------------------------------------------------------
# proper transform degree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalCurveOnSphere:
    """Homogeneous parametrization ``(w, x, y, z)`` of a rational curve."""

    nu: tuple

    def __post_init__(self):
        nu = tuple(self.nu)
        if len(nu) != 4:
            raise ValidationError("nu needs four binary forms")
        degs = {p.degree for p in nu if not p.is_zero()}
        if len(degs) != 1:
            raise ValidationError("the forms of nu must share one degree")
        object.__setattr__(self, "nu", nu)

    @property
    def degree(self) -> int:
        return next(p.degree for p in self.nu if not p.is_zero())


class DegreeResult(NamedTuple):
    computed: int
    predicted: int


def _rat_vec(v):
    return tuple(Fraction(x) for x in v)


def _mult_at_point(nu, P) -> int:
    """Number of parameter values (with multiplicity) mapping to ``P``."""
    mins = []
    for i in range(4):
        for j in range(i + 1, 4):
            f = nu[i] * P[j] - nu[j] * P[i]
            mins.append(f)
    nonzero = [f for f in mins if not f.is_zero()]
    if not nonzero:
        raise SpecialLine("curve is constant")
    return hp_gcd_many(nonzero).degree


def _gcd_deg(forms) -> int:
    nonzero = [f for f in forms if not f.is_zero()]
    if not nonzero:
        raise ValidationError("curve lies in a special locus")
    return hp_gcd_many(nonzero).degree


def proper_transform_degree(gamma: RationalCurveOnSphere, center, radius_sq,
                            ell: RationalLine) -> DegreeResult:
    """Degree of the image of ``gamma`` under the point-to-tangent map.

    ``computed`` cancels the exact gcd of the pulled-back forms;
    ``predicted`` is ``2d`` minus the multiplicities of ``gamma`` at the
    special points (twice the multiplicity at the point of tangency when
    the line touches the sphere).

    Raises
    ------
    NotOnSphere
        If ``gamma`` does not lie on the sphere.
    SpecialLine
        If every pulled-back form vanishes identically.
    """
    nu = gamma.nu
    d = gamma.degree
    if _gcd_deg(nu) != 0:
        raise ValidationError("the forms of nu must be coprime")
    center = _rat_vec(center)
    r2 = Fraction(radius_sq)
    if not sphere_form(center, r2).compose(nu).is_zero():
        raise NotOnSphere("curve is not on the sphere")
    psi = [f.compose(nu) for f in phi_forms(center, r2, ell)]
    if all(p.is_zero() for p in psi):
        raise SpecialLine("every pulled-back form vanishes")
    computed = 2 * d - hp_gcd_many(psi).degree

    a, dvec = ell.point, ell.direction
    w = tuple(c - x for c, x in zip(center, a))
    dd = sum(x * x for x in dvec)
    t = sum(x * y for x, y in zip(w, dvec)) / dd
    foot = tuple(x + t * y for x, y in zip(a, dvec))
    dist2 = sum((c - f) ** 2 for c, f in zip(center, foot))
    if dist2 == r2:
        predicted = 2 * d - 2 * _mult_at_point(nu, (Fraction(1),) + foot)
    else:
        n1, lam1, n2, lam2 = rational_line_planes(ell)
        L1 = LinearForm4((-lam1,) + n1)
        L2 = LinearForm4((-lam2,) + n2)
        on_line = _gcd_deg([L1.compose(nu), L2.compose(nu)])
        A = (Fraction(1),) + a
        B = (Fraction(1),) + tuple(x + y for x, y in zip(a, dvec))
        polars = [_polar(center, r2, P).compose(nu) for P in (A, B)]
        touch = _gcd_deg(polars)
        predicted = 2 * d - on_line - touch
    return DegreeResult(computed, predicted)


def _polar(center, r2, P) -> LinearForm4:
    """Polar plane of the homogeneous point ``P`` with respect to the sphere."""
    c = center
    w, x = P[0], P[1:]
    c0 = w * (sum(v * v for v in c) - r2) - sum(ci * xi for ci, xi in zip(c, x))
    return LinearForm4((c0,) + tuple(xi - w * ci for xi, ci in zip(x, c)))


def lemma_instances() -> dict:
    """Exact reference instances ``name -> (gamma, center, radius_sq, ell, expected)``.

    ``conic``: the circle ``y = 3/5`` on the unit sphere, missing every
    special point of the x-axis.  ``simple``: the circle ``y = z`` on the
    unit sphere through one of the two points where the line ``x + y = 1``
    meets it.  ``double``: the same circle with the x-axis, through both
    points on the line.  ``tangent``: a conic through the point where the
    x-axis touches the sphere centred at ``(0, 1, 0)``.
    """
    s, t = HPoly2.s(), HPoly2.t()
    a = s * s + t * t
    b = s * s - t * t
    conic = RationalCurveOnSphere((a, b * Fraction(4, 5), a * Fraction(3, 5), s * t * Fraction(8, 5)))
    yz = RationalCurveOnSphere((s * s + t * t * 2, s * s - t * t * 2, s * t * 2, s * t * 2))
    tangent = RationalCurveOnSphere((s * s * 2 + t * t, s * t * 2, t * t * 2, s * t * 2))
    x_axis = RationalLine.of((0, 0, 0), (1, 0, 0))
    return {
        "conic": (conic, (0, 0, 0), 1, x_axis, 4),
        "simple": (yz, (0, 0, 0), 1, RationalLine.of((1, 0, 0), (-1, 1, 0)), 3),
        "double": (yz, (0, 0, 0), 1, x_axis, 2),
        "tangent": (tangent, (0, 1, 0), 1, x_axis, 2),
    }
