from fractions import Fraction

import numpy as np
import pytest

from spheretangents.errors import IdenticalCones, IdenticalSections, NotOnSphere, SpecialPoint
from spheretangents.plucker import (Plane, Sphere, affine_parts, line_in_plane,
                                    line_through_point, line_through_points, meet_form, normalize,
                                    point_line_distance, tangency_residual)
from spheretangents.tangents import (RationalLine, bitangents_in_plane, direction_conic,
                                     evaluate_forms, intersect_sphere_plane, phi_forms,
                                     phi_tangent_at, special_points, tangents_through_point)

Z0 = Plane.from_point_normal([0, 0, 0], [0, 0, 1])
X_AXIS = line_through_points([0, 0, 0], [1, 0, 0])
UNIT = Sphere([0, 0, 0], 1.0)


def same_line(a, b, tol=1e-10):
    return np.allclose(normalize(np.asarray(a)), normalize(np.asarray(b)), atol=tol)


def conjugate_closed(ts):
    cplx = [c for c, _ in ts.lines if np.max(np.abs(np.imag(c))) > 1e-7]
    for c in cplx:
        if not any(np.allclose(np.conj(c), d, atol=1e-6) for d in cplx):
            return False
    return True


# ---------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("center,plane_z,uv,r2", [
    ([0, 0, 0], 0.0, (0, 0), 1.0),
    ([0, 0, 0], 1.0, (0, 0), 0.0),
    ([0, 2, 0], 0.0, (0, 2), 1.0),
])
def test_intersect_sphere_plane(center, plane_z, uv, r2):
    pl = Plane.from_point_normal([0, 0, plane_z], [0, 0, 1])
    circ = intersect_sphere_plane(Sphere(center, 1.0), pl)
    assert circ.radius_sq == pytest.approx(r2, abs=1e-12)
    assert np.allclose(circ.center, np.array([uv[0], uv[1], plane_z]), atol=1e-12)


# ---------------------------------------------------------------------------
# four tangents in a plane
# ---------------------------------------------------------------------------

def test_bitangents_two_unit_circles():
    ts = bitangents_in_plane(Sphere([2, 0, 0], 1), Sphere([-2, 0, 0], 1), Z0)
    assert ts.total_multiplicity == 4 and ts.real_count == 4
    k = 1 / np.sqrt(3)
    expected = [line_through_points([0, 1, 0], [1, 1, 0]),
                line_through_points([0, -1, 0], [1, -1, 0]),
                line_through_points([0, 0, 0], [1, k, 0]),
                line_through_points([0, 0, 0], [1, -k, 0])]
    got = [m.coords for m, _ in ts.real_lines()]
    for e in expected:
        assert sum(same_line(e.coords, g) for g in got) == 1


def test_bitangents_concentric_circles_complex():
    ts = bitangents_in_plane(Sphere([0, 0, 0], 1), Sphere([0, 0, 0], 2), Z0)
    assert ts.total_multiplicity == 4
    assert ts.real_count == 0
    assert conjugate_closed(ts)


def test_bitangents_touching_circles_double_line():
    ts = bitangents_in_plane(Sphere([1, 0, 0], 1), Sphere([-1, 0, 0], 1), Z0)
    assert ts.total_multiplicity == 4
    y_axis = line_through_points([0, 0, 0], [0, 1, 0])
    mults = [m for line, m in ts.real_lines() if same_line(line.coords, y_axis.coords, 1e-6)]
    assert mults == [2]


def test_bitangents_identical_sections():
    pl = Plane.from_point_normal([0, 0, 0], [0, 0, 1])
    with pytest.raises(IdenticalSections):
        bitangents_in_plane(Sphere([0, 0, 1], np.sqrt(2)), Sphere([0, 0, -1], np.sqrt(2)), pl)


def test_bitangents_random_properties(rng):
    done = 0
    while done < 60:
        s1 = Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2))
        s2 = Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2))
        pl = Plane.from_point_normal(rng.normal(size=3), rng.normal(size=3))
        ts = bitangents_in_plane(s1, s2, pl)
        assert ts.total_multiplicity == 4
        assert conjugate_closed(ts)
        for m, _ in ts.real_lines():
            assert abs(tangency_residual(m, s1)) <= 1e-7
            assert abs(tangency_residual(m, s2)) <= 1e-7
            assert line_in_plane(m, pl)
        done += 1


# ---------------------------------------------------------------------------
# four tangents through a point
# ---------------------------------------------------------------------------

def test_tangents_through_origin_oracle():
    s1, s2 = Sphere([0, 4, 0], 2), Sphere([3, 0, 0], 1)
    ts = tangents_through_point(s1, s2, [0, 0, 0])
    assert ts.total_multiplicity == 4
    C1, C2 = direction_conic(s1, [0, 0, 0]), direction_conic(s2, [0, 0, 0])
    for coords, _ in ts.lines:
        u = np.asarray(coords)[:3]          # direction part of a line through the origin
        u = u / np.linalg.norm(u)
        assert abs(u @ C1 @ u) <= 1e-8 and abs(u @ C2 @ u) <= 1e-8
    for m, _ in ts.real_lines():
        assert abs(tangency_residual(m, s1)) <= 1e-8
        assert abs(tangency_residual(m, s2)) <= 1e-8


def test_tangents_through_point_identical_cones():
    with pytest.raises(IdenticalCones):
        tangents_through_point(Sphere([0, 4, 0], 2), Sphere([0, -4, 0], 2), [0, 0, 0])


def test_tangents_through_homothety_centre():
    # origin is the external homothety centre of these spheres: one common cone
    with pytest.raises(IdenticalCones):
        tangents_through_point(Sphere([2, 0, 0], 1), Sphere([4, 0, 0], 2), [0, 0, 0])


def test_tangents_through_point_on_centre_line():
    ts = tangents_through_point(Sphere([2, 0, 0], 1), Sphere([5, 0, 0], 1), [0, 0, 0])
    assert ts.total_multiplicity == 4
    assert conjugate_closed(ts)


def test_tangents_through_point_random(rng):
    for _ in range(60):
        s1 = Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2))
        s2 = Sphere(rng.normal(size=3) * 2, rng.uniform(0.5, 2))
        p = rng.normal(size=3) * 3
        ts = tangents_through_point(s1, s2, p)
        assert ts.total_multiplicity == 4
        assert conjugate_closed(ts)
        for m, _ in ts.real_lines():
            assert abs(tangency_residual(m, s1)) <= 1e-7
            assert abs(tangency_residual(m, s2)) <= 1e-7
            assert line_through_point(m, np.concatenate(([1.0], p)))


# ---------------------------------------------------------------------------
# the point-to-line map
# ---------------------------------------------------------------------------

def test_phi_parallel_tangent_plane_top_point():
    with pytest.raises(SpecialPoint) as info:
        phi_tangent_at(Sphere([0, 1, 0], 1), X_AXIS, [0, 2, 0])
    assert info.value.projective_line is not None


def test_phi_parallel_tangent_plane_high_line():
    ell = line_through_points([0, 0, 2], [1, 0, 2])
    with pytest.raises(SpecialPoint):
        phi_tangent_at(UNIT, ell, [0, 0, 1])


def test_phi_vertical_tangent():
    ell = line_through_points([0, 0, 2], [1, 0, 2])
    m = phi_tangent_at(UNIT, ell, [1, 0, 0])
    assert same_line(m.coords, line_through_points([1, 0, 0], [1, 0, 2]).coords)


def test_phi_point_on_line_is_special():
    with pytest.raises(SpecialPoint):
        phi_tangent_at(UNIT, X_AXIS, [1, 0, 0])


def test_phi_rejects_point_off_sphere():
    with pytest.raises(NotOnSphere):
        phi_tangent_at(UNIT, X_AXIS, [0, 0, 2])


def test_phi_postconditions(rng):
    s = Sphere([0.5, -1, 2], 1.5)
    ell = line_through_points([3, 0, 0], [0, 3, 1])
    for _ in range(100):
        u = rng.normal(size=3)
        q = s.center + s.radius * u / np.linalg.norm(u)
        m = phi_tangent_at(s, ell, q)
        assert abs(meet_form(m.coords, ell.coords)) <= 1e-9
        assert abs(tangency_residual(m, s)) <= 1e-9
        assert line_through_point(m, np.concatenate(([1.0], q)))


# ---------------------------------------------------------------------------
# special points
# ---------------------------------------------------------------------------

def test_special_points_tangent_line():
    sp = special_points(UNIT, line_through_points([0, 0, 1], [1, 0, 1]))
    assert sp.count == 1
    assert np.allclose(sp.points[0].affine, [0, 0, 1])


def test_special_points_secant_axis():
    sp = special_points(UNIT, X_AXIS)
    assert sp.count == 4
    on = sorted(p.affine.real[0] for p in sp.points if p.tag == "on_line")
    assert np.allclose(on, [-1, 1])
    assert all(p.is_real for p in sp.points if p.tag == "on_line")
    assert not any(p.is_real for p in sp.points if p.tag == "tangent_plane_touch")
    assert len(sp.real_points) == 2


def test_special_points_offset_sphere():
    sp = special_points(Sphere([0, 2, 0], 1), X_AXIS)
    assert sp.count == 4
    assert not any(p.is_real for p in sp.points if p.tag == "on_line")
    touch = [p for p in sp.points if p.tag == "tangent_plane_touch"]
    assert all(p.is_real for p in touch)
    for p in touch:
        x = p.affine.real
        assert abs(np.linalg.norm(x - [0, 2, 0]) - 1) <= 1e-9
        # tangent plane at x contains the x-axis: normal orthogonal to x-axis and to x
        assert abs((x - [0, 2, 0]) @ x) <= 1e-9
    assert len(sp.real_points) == 2


def test_special_points_two_real_in_general(rng):
    for _ in range(50):
        s = Sphere(rng.normal(size=3), rng.uniform(0.5, 2))
        ell = line_through_points(rng.normal(size=3) * 2, rng.normal(size=3) * 2)
        sp = special_points(s, ell)
        assert sp.count == 4
        assert len(sp.real_points) == 2


# ---------------------------------------------------------------------------
# exact forms
# ---------------------------------------------------------------------------

CASE_II_ELL = RationalLine.of((0, 0, 0), (1, 0, 0))


def test_phi_forms_case_ii_frame(rng):
    forms = phi_forms((0, 1, 0), 1, CASE_II_ELL)
    ratios = []
    for _ in range(20):
        u = rng.normal(size=3)
        x, y, z = np.array([0, 1, 0]) + u / np.linalg.norm(u)
        v = evaluate_forms(forms, [x, y, z])
        ratios.append((v[0] / ((x * x - y * y - z * z) / 2), v[2] / (x * z)))
    ratios = np.array(ratios)
    assert np.allclose(ratios, ratios[0, 0], rtol=1e-9)


def exact_value(form, p):
    return sum(v * p[i] * p[j] for (i, j), v in form.terms.items())


def test_phi_forms_exact_in_frame():
    f01, _, f03 = phi_forms((0, 1, 0), 1, CASE_II_ELL)[:3]
    pts = [(1, 0, 1, 0), (1, 1, 1, 0), (1, 1, 0, 1), (2, 3, 5, 7)]
    v01 = [exact_value(f01, p) for p in pts]
    v03 = [exact_value(f03, p) for p in pts]
    # (w, x, y, z) monomials: w*y - x^2 and -x*z
    ref01 = [Fraction(w * y - x * x) for w, x, y, z in pts]
    ref03 = [Fraction(-x * z) for w, x, y, z in pts]
    k = v01[-1] / ref01[-1]
    assert k != 0
    assert v01 == [k * r for r in ref01]
    assert v03 == [k * r for r in ref03]


def test_phi_forms_vanish_at_special_points():
    s = Sphere([0, 2, 0], 1)
    forms = phi_forms((0, 2, 0), 1, CASE_II_ELL)
    for p in special_points(s, X_AXIS).points:
        vals = [f.evaluate_float(p.point) for f in forms]  # complex homogeneous input
        assert np.max(np.abs(vals)) <= 1e-9


def test_phi_forms_match_phi_tangent_at(rng):
    center, r2 = (Fraction(1, 2), Fraction(-1), Fraction(2)), Fraction(9, 4)
    ell = RationalLine.of((3, 0, 0), (-3, 3, 1))
    forms = phi_forms(center, r2, ell)
    s = Sphere([float(c) for c in center], 1.5)
    for _ in range(100):
        u = rng.normal(size=3)
        q = s.center + 1.5 * u / np.linalg.norm(u)
        v = evaluate_forms(forms, q)
        m = phi_tangent_at(s, ell.to_plucker(), q)
        assert np.allclose(normalize(v), m.coords, rtol=1e-9, atol=1e-9)
