"""Decide when one line and three spheres have infinitely many common tangents.

The four configurations (a common point of tangency, a common tangent cone
with apex on the line, a common circle in a plane containing the line, and
collinear centres with the line tangent to all spheres) are checked
independently.  Length tolerances are relative to half the diameter of the
bounding box of the centres, so results do not depend on the scene's scale.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateScene, ValidationError
from .plucker import (Plane, PluckerLine, Sphere, affine_parts, line_through_points,
                      meet_form, point_line_distance, tangency_residual)
from .taucurve import (ConeRuling, HyperboloidRuling, Pencil, PlaneCircleTangents,
                       line_distance_affine)

DEFAULT_TOL = 1e-6
CASES = ("Ia", "Ib", "II", "III", "IV")


@dataclass(frozen=True)
class Scene3:
    """A line and three spheres."""

    ell: PluckerLine
    spheres: tuple

    def __post_init__(self):
        sp = tuple(self.spheres)
        if len(sp) != 3:
            raise ValidationError("exactly three spheres are required")
        if self.ell.is_at_infinity():
            raise ValidationError("the line must be affine")
        object.__setattr__(self, "spheres", sp)

    @property
    def length_scale(self) -> float:
        """Half the diameter of the bounding box of the centres."""
        C = np.array([s.center for s in self.spheres])
        diam = float(np.linalg.norm(C.max(axis=0) - C.min(axis=0)))
        if diam <= 1e-300:
            diam = 2 * max(s.radius for s in self.spheres)
        return diam / 2

    def transformed(self, R=None, t=None, scale: float = 1.0) -> "Scene3":
        """Image under ``x -> scale * R x + t``."""
        R = np.eye(3) if R is None else np.asarray(R, dtype=float)
        t = np.zeros(3) if t is None else np.asarray(t, dtype=float)
        a, d = affine_parts(self.ell)
        f = lambda x: scale * (R @ x) + t  # noqa: E731
        ell = line_through_points(f(a), f(a + d))
        return Scene3(ell, tuple(Sphere(f(s.center), scale * s.radius) for s in self.spheres))


class CaseI(NamedTuple):
    point: np.ndarray
    plane: Plane
    is_ia: bool
    is_ib: bool
    residual: float


class CaseII(NamedTuple):
    apex: np.ndarray | None      # None for a cylinder
    axis: np.ndarray
    half_angle: float           # radius for a cylinder
    residual: float
    cylinder: bool = False


class CaseIII(NamedTuple):
    plane: Plane
    center: np.ndarray
    radius: float
    residual: float


class CaseIV(NamedTuple):
    axis: PluckerLine
    residual: float


@dataclass(frozen=True)
class ClassificationResult:
    cases: frozenset
    witnesses: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def families(self) -> dict:
        """Line family of each matched case as a component descriptor."""
        out = {}
        for case, w in self.witnesses.items():
            if case in ("Ia", "Ib"):
                out[case] = Pencil(w.point, w.plane)
            elif case == "II" and not w.cylinder:
                out[case] = ConeRuling(w.apex, w.axis, w.half_angle)
            elif case == "III":
                out[case] = PlaneCircleTangents(w.plane, w.center, w.radius)
            elif case == "IV":
                out[case] = HyperboloidRuling(w.axis, self._ell, opposite=True)
        return out

    _ell: PluckerLine | None = None


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _centre_line(scene: Scene3):
    """Point and unit direction of the centre line, and the collinearity defect."""
    C = [s.center for s in scene.spheres]
    pairs = list(itertools.combinations(range(3), 2))
    i, j = max(pairs, key=lambda ij: np.linalg.norm(C[ij[0]] - C[ij[1]]))
    span = float(np.linalg.norm(C[j] - C[i]))
    if span <= 1e-300:
        return C[0], None, 0.0
    u = (C[j] - C[i]) / span
    area2 = np.linalg.norm(np.cross(C[1] - C[0], C[2] - C[0]))
    return C[i], u, float(area2 / (2 * span))


def _check_distinct(scene: Scene3, tol):
    L = scene.length_scale
    for s, t in itertools.combinations(scene.spheres, 2):
        if (np.linalg.norm(s.center - t.center) <= tol * L
                and abs(s.radius - t.radius) <= tol * L):
            raise DegenerateScene("two spheres coincide")


def _ell(scene):
    a, d = affine_parts(scene.ell)
    return a, d / np.linalg.norm(d)


# ---------------------------------------------------------------------------
# the four checks
# ---------------------------------------------------------------------------

def check_case_i(scene: Scene3, tol: float = DEFAULT_TOL):
    """Common point of tangency with the line through it or in its tangent plane."""
    L = scene.length_scale
    c0, u, defect = _centre_line(scene)
    if u is None or defect > tol * L:
        return None
    a, d = _ell(scene)
    best = None
    for signs in itertools.product((1.0, -1.0), repeat=3):
        pts = np.array([s.center + sg * s.radius * u for s, sg in zip(scene.spheres, signs)])
        p = pts.mean(axis=0)
        spread = float(np.max(np.linalg.norm(pts - p, axis=1))) / L
        if spread > tol:
            continue
        through = float(np.linalg.norm(np.cross(p - a, d))) / L
        in_plane = max(abs((a - p) @ u) / L, abs(d @ u))
        is_ia, is_ib = through <= tol, in_plane <= tol
        if not (is_ia or is_ib):
            continue
        res = max(spread, min(through if is_ia else np.inf, in_plane if is_ib else np.inf))
        cand = CaseI(p, Plane.from_point_normal(p, u), is_ia, is_ib, float(res))
        if best is None or cand.residual < best.residual:
            best = cand
    return best


def check_case_ii(scene: Scene3, tol: float = DEFAULT_TOL, projective: bool = False):
    """Common tangent cone (same nappe) whose apex lies on the line."""
    L = scene.length_scale
    c0, u, defect = _centre_line(scene)
    if u is None or defect > tol * L:
        return None
    a, d = _ell(scene)
    sp = scene.spheres
    i, j = max(itertools.combinations(range(3), 2),
               key=lambda ij: abs(sp[ij[0]].radius - sp[ij[1]].radius))
    ri, rj = sp[i].radius, sp[j].radius
    if abs(ri - rj) <= tol * L:
        if not projective:
            return None
        # cylinder: equal radii and the line parallel to the axis
        para = float(np.linalg.norm(np.cross(d, u)))
        if para > tol:
            return None
        return CaseII(None, u, float(ri), para, True)
    apex = (rj * sp[i].center - ri * sp[j].center) / (rj - ri)
    ks, sides = [], []
    for s in sp:
        w = s.center - apex
        dist = float(np.linalg.norm(w))
        if dist <= s.radius + tol * L:
            return None                       # apex inside or on a sphere
        ks.append(s.radius / dist)
        sides.append(w @ u)
    if not (all(x > 0 for x in sides) or all(x < 0 for x in sides)):
        return None                           # spheres on both nappes
    k = float(np.mean(ks))
    kdev = max(abs(x - k) for x in ks)
    on_line = float(np.linalg.norm(np.cross(apex - a, d))) / L
    if kdev > tol or on_line > tol or not 0.0 < k < 1.0:
        return None
    axis = u if sides[0] > 0 else -u
    return CaseII(apex, axis, float(math.asin(k)), max(kdev, on_line))


def check_case_iii(scene: Scene3, tol: float = DEFAULT_TOL):
    """Common real circle whose plane contains the line."""
    L = scene.length_scale
    c0, u, defect = _centre_line(scene)
    if u is None or defect > tol * L:
        return None
    t = [float((s.center - c0) @ u) / L for s in scene.spheres]
    r = [s.radius / L for s in scene.spheres]
    planes = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if abs(t[j] - t[i]) <= tol:
            return None                       # concentric pair
        planes.append((t[j] ** 2 - t[i] ** 2 + r[i] ** 2 - r[j] ** 2) / (2 * (t[j] - t[i])))
    ts = float(np.mean(planes))
    dev = max(abs(x - ts) for x in planes)
    rad2 = r[0] ** 2 - (ts - t[0]) ** 2
    if dev > tol or rad2 <= tol:
        return None
    a, d = _ell(scene)
    ctr = c0 + ts * L * u
    inplane = max(abs((a - ctr) @ u) / L, abs(d @ u))
    if inplane > tol:
        return None
    return CaseIII(Plane.from_point_normal(ctr, u), ctr, float(math.sqrt(rad2) * L), max(dev, inplane))


def check_case_iv(scene: Scene3, tol: float = DEFAULT_TOL):
    """Collinear centres and the line tangent to every sphere, skew to the centre line."""
    L = scene.length_scale
    c0, u, defect = _centre_line(scene)
    if u is None or defect > tol * L:
        return None
    dev = max(abs(point_line_distance(s.center, scene.ell) - s.radius) for s in scene.spheres) / L
    if dev > tol:
        return None
    a, d = _ell(scene)
    if line_distance_affine(c0, u, a, d) / L <= tol or np.linalg.norm(np.cross(u, d)) <= tol:
        return None
    return CaseIV(line_through_points(c0, c0 + u), float(dev))


def classify(scene: Scene3, tol: float = DEFAULT_TOL, projective: bool = False) -> ClassificationResult:
    """Every case of the classification that the scene satisfies.

    An empty case set means only finitely many lines meet the line and are
    tangent to all three spheres.

    Raises
    ------
    DegenerateScene
        If two spheres coincide within ``tol``.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    _check_distinct(scene, tol)
    cases, wit, res = set(), {}, {}
    w = check_case_i(scene, tol)
    if w is not None:
        for flag, name in ((w.is_ia, "Ia"), (w.is_ib, "Ib")):
            if flag:
                cases.add(name)
                wit[name] = w
                res[name] = w.residual
    for name, fn in (("II", lambda: check_case_ii(scene, tol, projective)),
                     ("III", lambda: check_case_iii(scene, tol)),
                     ("IV", lambda: check_case_iv(scene, tol))):
        w = fn()
        if w is not None:
            cases.add(name)
            wit[name] = w
            res[name] = w.residual
    return ClassificationResult(frozenset(cases), wit, res, scene.ell)


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def witness_lines(result: ClassificationResult, case: str, n: int = 50, seed: int = 0) -> list:
    """``n`` lines of the case's family that meet the line affinely.

    Lines parallel to the fixed line are skipped.
    """
    fam = result.families()[case]
    ell = result._ell
    _, d = affine_parts(ell)
    d = d / np.linalg.norm(d)
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        for m in fam.sample(n, rng):
            _, dm = affine_parts(m)
            if np.linalg.norm(np.cross(dm / np.linalg.norm(dm), d)) > 1e-6:
                out.append(m)
    return out[:n]


def witness_residual(scene: Scene3, lines) -> float:
    """Largest tangency or incidence defect of ``lines`` for the scene."""
    worst = 0.0
    for m in lines:
        for s in scene.spheres:
            worst = max(worst, abs(tangency_residual(m, s)))
        worst = max(worst, abs(meet_form(m.coords, scene.ell.coords)))
    return worst


# ---------------------------------------------------------------------------
# golden scenes
# ---------------------------------------------------------------------------

def _z_axis():
    return line_through_points([0, 0, 0], [0, 0, 1])


def golden_scenes() -> dict:
    """Named reference scenes with their case sets and their expected case sets."""
    s2, s6 = math.sqrt(2.0), math.sqrt(6.0)
    tangent = (Sphere([1, 0, 0], 1), Sphere([-2, 0, 0], 2), Sphere([3, 0, 0], 3))
    return {
        "tangent_point_in_plane": (Scene3(_z_axis(), tangent), frozenset({"Ib"})),
        "tangent_point_through": (Scene3(line_through_points([0, 0, 0], [1, 0, 0]), tangent),
                                  frozenset({"Ia"})),
        "cone": (Scene3(_z_axis(), (Sphere([2, 0, 0], 1), Sphere([4, 0, 0], 2),
                                     Sphere([6, 0, 0], 3))), frozenset({"II"})),
        "circle": (Scene3(line_through_points([0, 2, 0], [1, 2, 0]),
                          tuple(Sphere([0, 0, c], math.sqrt(1 + c * c)) for c in (-1, 0, 1))),
                   frozenset({"III"})),
        "hyperboloid": (Scene3(line_through_points([1, 0, 0], [1, 1, 1]),
                               (Sphere([0, 0, 0], 1), Sphere([0, 0, s2], s2),
                                Sphere([0, 0, s6], 2))), frozenset({"IV"})),
    }


def perturbed(scene: Scene3, index: int = 0, delta=(1e-3, 0.0, 0.0)) -> Scene3:
    """The scene with one centre moved by ``delta``."""
    sp = list(scene.spheres)
    s = sp[index]
    sp[index] = Sphere(s.center + np.asarray(delta, dtype=float), s.radius)
    return Scene3(scene.ell, tuple(sp))
