import math
from fractions import Fraction

import numpy as np
import pytest

from spheretangents.errors import ForbiddenRatio, NotOnSphere, ValidationError
from spheretangents.exactpoly import HPoly2
from spheretangents.plucker import (Sphere, line_through_points, meet_form, normalize,
                                    tangency_residual)
from spheretangents.taucurve import (ConeRuling, HyperboloidRuling, Pencil, PlaneCircleTangents,
                                     RationalCurveOnSphere, RationalQuartic, Scene2,
                                     SymmetricQuartic, branch_groups, canonical_frame,
                                     component_membership, degree_estimate, detect_components,
                                     octic_scene, lemma_instances, lines_per_plane, mult4_scene,
                                     proper_transform_degree, quartic_forms, quartic_line_matrix,
                                     quartic_parametrize, trace_tau, verify_quartic)
from spheretangents.tangents import RationalLine

Z_AXIS = line_through_points([0, 0, 0], [0, 0, 1])
X_AXIS = line_through_points([0, 0, 0], [1, 0, 0])


def exact_minors(a, b):
    return tuple(a[i] * b[j] - a[j] * b[i] for i, j in
                 ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


def proportional(u, v):
    k = next(i for i, x in enumerate(v) if x != 0)
    lam = u[k] / v[k]
    return lam != 0 and all(x == lam * y for x, y in zip(u, v))


def rational_pairs(rng, n):
    return [(Fraction(int(a), int(b)), Fraction(int(c), int(d)))
            for a, b, c, d in zip(rng.integers(-9, 10, n), rng.integers(1, 8, n),
                                  rng.integers(-9, 10, n), rng.integers(1, 8, n))
            if a or c]


# ---------------------------------------------------------------------------
# exact quartic
# ---------------------------------------------------------------------------

def test_quartic_r2_at_10():
    p = np.array(quartic_parametrize(2, 1, 0), dtype=float)
    assert np.allclose(p, [2 * math.sqrt(2), 0, 1, 0, 4, 0], atol=1e-14)
    for f in quartic_forms(2.0):
        assert abs(f(p)) <= 1e-12


def test_quartic_at_11_lies_in_plane_x0():
    p = quartic_parametrize(4, 1, 1)
    assert p[0] == 0 and p[4] == 0 and p[5] == 0


def test_quartic_01_and_10_distinct_in_y0():
    a, b = quartic_parametrize(4, 0, 1), quartic_parametrize(4, 1, 0)
    for p in (a, b):
        assert p[1] == 0 and p[5] == 0
    assert not proportional(a, b)


@pytest.mark.parametrize("r", [-1, 0, 1, -2, Fraction(-1, 3)])
def test_forbidden_ratio(r):
    with pytest.raises(ForbiddenRatio):
        quartic_parametrize(r, 1, 0)


@pytest.mark.parametrize("r", [4, 9, Fraction(16, 9), Fraction(25, 4)])
def test_quartic_identity_exact(r, rng):
    pairs = rational_pairs(rng, 30)
    assert len(pairs) >= 25
    assert verify_quartic(r, pairs)
    assert all(isinstance(x, Fraction) for x in quartic_parametrize(r, *pairs[0]))


@pytest.mark.parametrize("r", [2, 3, 0.5, 7.25])
def test_quartic_identity_irrational_root(r, rng):
    g, q1, q2 = quartic_forms(float(r))
    for s, t in rng.normal(size=(50, 2)):
        p = np.array(quartic_parametrize(r, s, t), dtype=float)
        p /= np.max(np.abs(p))
        assert max(abs(g(p)), abs(q1(p)), abs(q2(p)), abs(p[3])) <= 1e-10


def test_verify_quartic_detects_wrong_ratio():
    g, q1, q2 = quartic_forms(9)
    p = quartic_parametrize(4, 1, 2)
    assert q2(p) != 0


def test_line_matrix_r2():
    rows = np.array(quartic_line_matrix(2, 1, 0), dtype=float)
    k = math.sqrt(2)
    assert np.allclose(rows, [[1, 0, 0, -k], [0, 2 * k, 0, 1]], atol=1e-14)


def test_line_matrix_spans_parametrized_line(rng):
    for r in (4, Fraction(16, 9)):
        for s, t in rational_pairs(rng, 60)[:50]:
            a, b = quartic_line_matrix(r, s, t)
            assert proportional(exact_minors(a, b), quartic_parametrize(r, s, t))


def test_no_parameter_gives_z_axis():
    for phi in np.linspace(0, np.pi, 721):
        p = np.abs(np.array(quartic_parametrize(2, np.cos(phi), np.sin(phi)), dtype=float))
        assert max(p[0], p[1], p[4], p[5]) > 1e-3 * max(p)


# ---------------------------------------------------------------------------
# tracing
# ---------------------------------------------------------------------------

def check_samples(scene, samples):
    for smp in samples:
        assert sum(k for _, k in smp.lines) <= 4
        for m, _ in smp.lines:
            assert abs(meet_form(m.coords, scene.ell.coords)) <= 1e-9
            for s in scene.spheres:
                assert abs(tangency_residual(m, s)) <= 1e-7


def test_trace_octic_two_components():
    scene = octic_scene()
    samples = trace_tau(scene, 180)
    check_samples(scene, samples)
    assert [s.theta for s in samples] == sorted(s.theta for s in samples)
    assert len(set(branch_groups(samples).values())) == 2


def test_trace_quartic_scene_two_per_plane():
    samples = trace_tau(mult4_scene(2), 180)
    check_samples(mult4_scene(2), samples)
    counts = [c for c, smp in zip(lines_per_plane(samples), samples) if not smp.degenerate]
    assert len(counts) >= 178
    assert set(counts) == {2}


def test_trace_generic_at_most_four(rng):
    for _ in range(5):
        scene = Scene2(line_through_points(rng.normal(size=3), rng.normal(size=3)),
                       Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2)),
                       Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2)))
        check_samples(scene, trace_tau(scene, 36))


def test_trace_rejects_single_plane():
    with pytest.raises(ValidationError):
        trace_tau(octic_scene(), 1)


def test_centres_on_line_symmetric_pairs():
    scene = Scene2(X_AXIS, Sphere([0, 0, 0], 1), Sphere([4, 0, 0], 2))
    for smp in trace_tau(scene, 12):
        assert sum(k for _, k in smp.lines) == 4
        # reflection in the line pairs the lines up
        for m, _ in smp.lines:
            c = m.coords
            mirrored = normalize(np.array([c[0], -c[1], -c[2], -c[3], -c[4], c[5]]))
            assert any(np.allclose(mirrored, o.coords, atol=1e-8) for o, _ in smp.lines)
    kinds = sorted(c.kind for c in detect_components(scene))
    assert kinds == ["cone", "cone"]


# ---------------------------------------------------------------------------
# degree
# ---------------------------------------------------------------------------

def test_degree_octic():
    assert degree_estimate(octic_scene(), trials=20, seed=0) == 8


def test_degree_quartic_scene():
    assert degree_estimate(mult4_scene(2), trials=20, seed=0) == 8


def test_degree_is_deterministic():
    scene = octic_scene()
    assert degree_estimate(scene, 5, seed=3) == degree_estimate(scene, 5, seed=3)


# ---------------------------------------------------------------------------
# components
# ---------------------------------------------------------------------------

def test_cone_generator_member():
    cone = ConeRuling(np.zeros(3), np.array([1.0, 0, 0]), math.pi / 6)
    gen = line_through_points([0, 0, 0], [math.cos(math.pi / 6), math.sin(math.pi / 6), 0])
    assert component_membership(gen, cone) <= 1e-12
    assert component_membership(X_AXIS, cone) > 0.1


def test_hyperboloid_generator_ruling():
    axis = Z_AXIS
    ell = line_through_points([1, 0, 0], [1, 1, 1])
    opposite = HyperboloidRuling(axis, ell)
    same = HyperboloidRuling(axis, ell, opposite=False)
    assert component_membership(ell, same) <= 1e-12
    assert component_membership(ell, opposite) > 0.1
    assert same.ruling_side(ell) == 1
    for m in opposite.sample(20, np.random.default_rng(1)):
        assert component_membership(m, opposite) <= 1e-9
        assert opposite.ruling_side(m) == -1


def test_quartic_member_by_construction():
    frame, r = canonical_frame([0, 0, 0], [1, 0, 0], [-2, 0, 0], [0, 0, 1])
    rq = RationalQuartic(frame, r)
    m = np.array(quartic_parametrize(2, 1, 0), dtype=float)
    assert component_membership(m, rq) <= 1e-10
    assert component_membership(X_AXIS, rq) > 1e-3


def kinds(scene):
    return sorted(c.kind for c in detect_components(scene))


def test_detect_quartic_scene():
    comps = detect_components(mult4_scene(2))
    assert sorted(c.kind for c in comps) == ["pencil", "rational_quartic"]
    pencil = next(c for c in comps if isinstance(c, Pencil))
    assert np.allclose(pencil.point, 0)
    assert np.allclose(np.abs(pencil.plane.normal), [1, 0, 0])


def test_detect_symmetric_separated():
    scene = Scene2(Z_AXIS, Sphere([2, 0, 1], 1), Sphere([-2, 0, 1], 1))
    assert kinds(scene) == ["cone", "symmetric_quartic"]


def test_detect_symmetric_overlapping():
    scene = Scene2(Z_AXIS, Sphere([2, 0, 1], 3), Sphere([-2, 0, 1], 3))
    assert kinds(scene) == ["plane_circle", "symmetric_quartic"]


def test_detect_generic_empty(rng):
    for _ in range(10):
        scene = Scene2(line_through_points(rng.normal(size=3), rng.normal(size=3)),
                       Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2)),
                       Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2)))
        assert detect_components(scene) == []


SCENES = {
    "quartic": mult4_scene(2),
    "quartic_r3": mult4_scene(3),
    "separated": Scene2(Z_AXIS, Sphere([2, 0, 1], 1), Sphere([-2, 0, 1], 1)),
    "overlapping": Scene2(Z_AXIS, Sphere([2, 0, 1], 3), Sphere([-2, 0, 1], 3)),
    "centres_on_line": Scene2(X_AXIS, Sphere([0, 0, 0], 1), Sphere([4, 0, 0], 2)),
    "hyperboloid": Scene2(line_through_points([1, 0, 0], [1, 1, 1]),
                          Sphere([0, 0, 0], 1), Sphere([0, 0, math.sqrt(2)], math.sqrt(2))),
}


@pytest.mark.parametrize("name", sorted(SCENES))
def test_detected_components_sample_members(name):
    scene = SCENES[name]
    comps = detect_components(scene)
    assert comps
    rng = np.random.default_rng(7)
    for c in comps:
        for m in c.sample(100, rng):
            assert component_membership(m, c) <= 1e-8
            for s in scene.spheres:
                assert abs(tangency_residual(m, s)) <= 1e-8
            assert abs(meet_form(m.coords, scene.ell.coords)) <= 1e-8


# ---------------------------------------------------------------------------
# proper transform degree
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["conic", "simple", "double", "tangent"])
def test_proper_transform_instances(name):
    gamma, center, r2, ell, expected = lemma_instances()[name]
    res = proper_transform_degree(gamma, center, r2, ell)
    assert res.computed == res.predicted == expected


def test_proper_transform_rejects_off_sphere():
    s, t = HPoly2.s(), HPoly2.t()
    gamma = RationalCurveOnSphere((s * s + t * t, s * s, t * t, s * t))
    with pytest.raises(NotOnSphere):
        proper_transform_degree(gamma, (0, 0, 0), 1, RationalLine.of((0, 0, 0), (1, 0, 0)))
