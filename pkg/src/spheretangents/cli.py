"""Command-line interface: scene files, dispatch, key=value output, OBJ export.

Exit codes: 0 on success, 2 for invalid input, 3 for degenerate geometry.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .classify import Scene3, classify
from .errors import CoincidentPoints, EmptyMesh, GeometryError, ParseError, ValidationError
from .exactpoly import HPoly2
from .plucker import PluckerLine, Sphere, affine_parts, line_through_points, pencil_frame, pencil_plane
from .tangents import RationalLine, bitangents_in_plane, tangents_through_point
from .taucurve import (RationalCurveOnSphere, Scene2, branch_groups, degree_estimate,
                       detect_components, octic_scene, lemma_instances, mult4_scene,
                       proper_transform_degree, quartic_forms, quartic_parametrize,
                       trace_tau, verify_quartic)

SCENE_VERSION = 1


# ---------------------------------------------------------------------------
# scene files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SceneFile:
    """Parsed scene file; ``line`` keeps the form it was written in."""

    line: dict
    spheres: tuple
    tol: float | None = None
    seed: int | None = None

    def scene(self):
        ell = _line_from_fields(self.line)
        spheres = tuple(Sphere(c, r) for c, r in self.spheres)
        if len(spheres) == 2:
            return Scene2(ell, *spheres)
        return Scene3(ell, spheres)

    def dumps(self) -> str:
        doc = {"version": SCENE_VERSION, "line": self.line,
               "spheres": [{"center": list(c), "radius": r} for c, r in self.spheres]}
        if self.tol is not None:
            doc["tol"] = self.tol
        if self.seed is not None:
            doc["seed"] = self.seed
        return json.dumps(doc, indent=2) + "\n"


def _vec3(value, what):
    if not isinstance(value, list) or len(value) != 3:
        raise ValidationError(f"{what} must be a list of three numbers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValidationError(f"{what} must be a list of three numbers")
        out.append(float(v))
    if not np.all(np.isfinite(out)):
        raise ValidationError(f"{what} must be finite")
    return tuple(out)


def _line_from_fields(fields: dict) -> PluckerLine:
    try:
        if "point" in fields:
            a = np.array(fields["point"])
            return line_through_points(a, a + np.array(fields["direction"]))
        return line_through_points(fields["p1"], fields["p2"])
    except CoincidentPoints as exc:
        raise ValidationError("line points must be distinct (direction must be nonzero)") from exc


def parse_scene(text: str) -> SceneFile:
    """Parse and validate scene text.

    Raises
    ------
    ParseError
        If the text is not valid JSON (with line and column).
    ValidationError
        If a field is missing or violates an invariant.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise ValidationError("scene must be a JSON object")
    if doc.get("version") != SCENE_VERSION:
        raise ValidationError(f"unsupported scene version {doc.get('version')!r}")
    line = doc.get("line")
    if not isinstance(line, dict):
        raise ValidationError("missing line")
    if set(line) == {"point", "direction"}:
        line = {"point": list(_vec3(line["point"], "line.point")),
                "direction": list(_vec3(line["direction"], "line.direction"))}
    elif set(line) == {"p1", "p2"}:
        line = {"p1": list(_vec3(line["p1"], "line.p1")), "p2": list(_vec3(line["p2"], "line.p2"))}
    else:
        raise ValidationError("line needs either point+direction or p1+p2")
    spheres = doc.get("spheres")
    if not isinstance(spheres, list) or len(spheres) not in (2, 3):
        raise ValidationError("spheres must be a list of 2 or 3 entries")
    sp = []
    for k, s in enumerate(spheres):
        if not isinstance(s, dict) or "center" not in s or "radius" not in s:
            raise ValidationError(f"sphere {k} needs center and radius")
        r = s["radius"]
        if isinstance(r, bool) or not isinstance(r, (int, float)) or not r > 0 or not np.isfinite(r):
            raise ValidationError(f"sphere {k}: radius must be positive")
        sp.append((_vec3(s["center"], f"sphere {k} center"), float(r)))
    tol = doc.get("tol")
    if tol is not None and (not isinstance(tol, (int, float)) or not tol > 0):
        raise ValidationError("tol must be positive")
    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ValidationError("seed must be an integer")
    out = SceneFile(line, tuple(sp), None if tol is None else float(tol), seed)
    _line_from_fields(line)
    return out


def read_scene_file(path) -> SceneFile:
    with open(path, encoding="utf-8") as fh:
        return parse_scene(fh.read())


def load_scene(path):
    """Scene2 or Scene3 from a scene file."""
    return read_scene_file(path).scene()


# ---------------------------------------------------------------------------
# meshes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RuledMesh:
    vertices: np.ndarray        # (n, 3)
    faces: tuple                # 0-based vertex index quads
    face_groups: tuple          # group label of each face
    vertex_groups: tuple

    @property
    def groups(self):
        return sorted(set(self.face_groups) | set(self.vertex_groups))


def envelope_mesh(lines, bbox, groups: dict | None = None) -> RuledMesh:
    """Ruled surface through clipped lines.

    Parameters
    ----------
    lines : sequence of (PluckerLine, branch_id)
        In sweep order.  Consecutive lines of one branch are joined by a
        quad.
    bbox : six floats ``(xmin, ymin, zmin, xmax, ymax, zmax)``
    groups : dict, optional
        Branch id to group label; defaults to the branch id.

    Raises
    ------
    EmptyMesh
        If no line meets the box.
    """
    lo = np.asarray(bbox[:3], dtype=float)
    hi = np.asarray(bbox[3:], dtype=float)
    if np.any(hi <= lo):
        raise ValidationError("bbox must have max > min on every axis")
    groups = groups or {}
    A, D, ids = [], [], []
    last_dir: dict = {}
    for m, b in lines:
        a, d = affine_parts(m)
        d = d / np.linalg.norm(d)
        if b in last_dir and d @ last_dir[b] < 0:
            d = -d
        last_dir[b] = d
        A.append(a)
        D.append(d)
        ids.append(b)
    if not A:
        raise EmptyMesh("no lines")
    smin, smax, hit = kernels.clip_lines(np.array(A), np.array(D), lo, hi)
    verts, faces, fgroups, vgroups = [], [], [], []
    prev: dict = {}
    for k, b in enumerate(ids):
        if not hit[k]:
            prev.pop(b, None)
            continue
        i0 = len(verts)
        verts.append(A[k] + smin[k] * D[k])
        verts.append(A[k] + smax[k] * D[k])
        g = groups.get(b, b)
        vgroups += [g, g]
        if b in prev:
            j0 = prev[b]
            faces.append((j0, j0 + 1, i0 + 1, i0))
            fgroups.append(g)
        prev[b] = i0
    if not verts:
        raise EmptyMesh("no line meets the bounding box")
    return RuledMesh(np.array(verts), tuple(faces), tuple(fgroups), tuple(vgroups))


def write_obj(mesh: RuledMesh) -> str:
    """Wavefront OBJ text with ``v``, ``g`` and ``f`` records only."""
    out = [f"v {x:.9f} {y:.9f} {z:.9f}" for x, y, z in mesh.vertices]
    for g in sorted(set(mesh.face_groups)):
        out.append(f"g branch_{g}")
        for f, fg in zip(mesh.faces, mesh.face_groups):
            if fg == g:
                out.append("f " + " ".join(str(i + 1) for i in f))
    return "\n".join(out) + "\n"


def samples_to_lines(samples):
    return [(m, b) for smp in samples for (m, _), b in zip(smp.lines, smp.branch_ids)]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def emit(stream, /, **fields):
    stream.write(" ".join(f"{k}={_fmt(v)}" for k, v in fields.items()) + "\n")


def _fmt_complex_line(coords):
    coords = np.asarray(coords, dtype=complex)
    eps = 1e-14 * np.max(np.abs(coords))
    parts = []
    for z in coords:
        z = complex(z.real if abs(z.real) > eps else 0.0, z.imag if abs(z.imag) > eps else 0.0)
        parts.append(_fmt(z.real) if z.imag == 0 else f"{z.real:.12g}{z.imag:+.12g}j")
    return ",".join(parts)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

PRESETS = {"octic": octic_scene, "quartic": lambda: mult4_scene(2)}


def _scene2(args):
    if getattr(args, "preset", None):
        return PRESETS[args.preset]()
    if not args.scene:
        raise ValidationError("a scene file or --preset is required")
    sc = load_scene(args.scene)
    if isinstance(sc, Scene3):
        sc = Scene2(sc.ell, sc.spheres[0], sc.spheres[1])
    return sc


def _seed(args, default=0):
    if args.seed is not None:
        return args.seed
    if getattr(args, "scene", None):
        s = read_scene_file(args.scene).seed
        if s is not None:
            return s
    return default


def cmd_classify(args, out):
    sf = read_scene_file(args.scene)
    sc = sf.scene()
    if not isinstance(sc, Scene3):
        raise ValidationError("classify needs three spheres")
    tol = args.tol if args.tol is not None else (sf.tol or 1e-6)
    res = classify(sc, tol, projective=args.projective)
    emit(out, cases=",".join(c for c in ("Ia", "Ib", "II", "III", "IV") if c in res.cases) or "none")
    for case in ("Ia", "Ib", "II", "III", "IV"):
        if case not in res.cases:
            continue
        w = res.witnesses[case]
        if case in ("Ia", "Ib"):
            emit(out, case=case, point=w.point, normal=w.plane.normal, residual=w.residual)
        elif case == "II" and w.cylinder:
            emit(out, case=case, cylinder=True, axis=w.axis, radius=w.half_angle, residual=w.residual)
        elif case == "II":
            emit(out, case=case, apex=w.apex, axis=w.axis, half_angle=w.half_angle, residual=w.residual)
        elif case == "III":
            emit(out, case=case, center=w.center, normal=w.plane.normal, radius=w.radius,
                 residual=w.residual)
        else:
            a, d = affine_parts(w.axis)
            emit(out, case=case, axis_point=a, axis_direction=d / np.linalg.norm(d),
                 residual=w.residual)


def _emit_tangents(ts, out):
    emit(out, total_multiplicity=ts.total_multiplicity, real=ts.real_count)
    for t in ts:
        out.write(f"line={_fmt_complex_line(t.coords)} multiplicity={t.multiplicity} "
                  f"real={_fmt(t.is_real)}\n")


def cmd_tangents_plane(args, out):
    sc = _scene2(args)
    _emit_tangents(bitangents_in_plane(sc.s1, sc.s2, pencil_plane(sc.ell, args.theta)), out)


def cmd_tangents_point(args, out):
    sc = _scene2(args)
    a, d, _, _ = pencil_frame(sc.ell)
    _emit_tangents(tangents_through_point(sc.s1, sc.s2, a + args.at * d), out)


def cmd_tau_trace(args, out):
    sc = _scene2(args)
    samples = trace_tau(sc, args.planes)
    groups = branch_groups(samples)
    emit(out, planes=args.planes, lines=sum(len(s.lines) for s in samples),
         branches=len(groups), groups=len(set(groups.values())),
         degenerate_planes=sum(s.degenerate for s in samples))
    target = open(args.out, "w", encoding="utf-8") if args.out else None
    try:
        for smp in samples:
            for (m, k), b in zip(smp.lines, smp.branch_ids):
                rec = f"theta={_fmt(smp.theta)} branch={b} group={groups[b]} multiplicity={k} " \
                      f"line={_fmt(m.coords)}\n"
                if target:
                    target.write(rec)
                elif args.verbose:
                    out.write(rec)
    finally:
        if target:
            target.close()


def cmd_tau_degree(args, out):
    sc = _scene2(args)
    emit(out, degree=degree_estimate(sc, args.trials, _seed(args)))


def cmd_detect(args, out):
    sc = _scene2(args)
    comps = detect_components(sc)
    emit(out, components=len(comps))
    for c in comps:
        emit(out, **{k: v for k, v in c.describe().items() if not isinstance(v, dict)},
             degree=c.degree)


def cmd_envelope(args, out):
    sc = _scene2(args)
    samples = trace_tau(sc, args.planes)
    groups = branch_groups(samples)
    mesh = envelope_mesh(samples_to_lines(samples), args.bbox, groups)
    text = write_obj(mesh)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    emit(out, vertices=len(mesh.vertices), faces=len(mesh.faces),
         groups=len(set(mesh.face_groups)), out=args.out or "-")
    if not args.out:
        out.write(text)


def _parse_ratio(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"--r expects a rational p/q, got {text!r}") from exc


def cmd_verify_quartic(args, out):
    r = _parse_ratio(args.r)
    quartic_parametrize(r, 1, 0)     # rejects forbidden ratios
    rng = np.random.default_rng(_seed(args))
    pairs = [(Fraction(int(a), int(b)), Fraction(int(c), int(e)))
             for a, b, c, e in zip(rng.integers(-50, 51, args.samples), rng.integers(1, 20, args.samples),
                                   rng.integers(-50, 51, args.samples), rng.integers(1, 20, args.samples))]
    p0 = quartic_parametrize(r, 1, 0)
    if isinstance(p0[0], Fraction):
        ok = verify_quartic(r, pairs)
        emit(out, r=str(r), samples=len(pairs), exact=True, ok=ok)
        out.write("all identities exact\n" if ok else "identity violated\n")
        return 0 if ok else 1
    fr = float(r)
    g, q1, q2 = quartic_forms(fr)
    worst = 0.0
    for s, t in pairs:
        p = np.array(quartic_parametrize(r, s, t), dtype=float)
        p = p / np.max(np.abs(p))
        worst = max(worst, abs(p[3]), abs(g(p)), abs(q1(p)), abs(q2(p)))
    ok = worst <= 1e-10
    emit(out, r=str(r), samples=len(pairs), exact=False, max_residual=worst, ok=ok)
    out.write("all identities hold numerically\n" if ok else "identity violated\n")
    return 0 if ok else 1


def _parse_lemma_file(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    try:
        nu = RationalCurveOnSphere(tuple(HPoly2(tuple(Fraction(str(c)) for c in f)) for f in doc["nu"]))
        center = tuple(Fraction(str(c)) for c in doc["sphere"]["center"])
        r2 = Fraction(str(doc["sphere"]["radius_sq"]))
        ell = RationalLine.of([Fraction(str(c)) for c in doc["line"]["point"]],
                              [Fraction(str(c)) for c in doc["line"]["direction"]])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad lemma instance: {exc}") from exc
    return nu, center, r2, ell


def cmd_lemma_degree(args, out):
    if args.file:
        items = [("file",) + _parse_lemma_file(args.file)]
    else:
        inst = lemma_instances()
        names = [args.preset] if args.preset else sorted(inst)
        items = [(n,) + inst[n][:4] for n in names]
    ok = True
    for name, nu, c, r2, ell in items:
        res = proper_transform_degree(nu, c, r2, ell)
        ok &= res.computed == res.predicted
        emit(out, instance=name, curve_degree=nu.degree, computed=res.computed,
             predicted=res.predicted, match=res.computed == res.predicted)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _bbox(values):
    return [float(v) for v in values]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spheretangents",
                                description="Common tangent lines to spheres meeting a line.")
    p.add_argument("--backend", action="store_true", help="print the kernel backend and exit")
    sub = p.add_subparsers(dest="command")

    def scene_cmd(name, help_, preset=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scene", nargs="?", help="scene file (JSON)")
        if preset:
            sp.add_argument("--preset", choices=sorted(PRESETS), help="built-in scene instead of a file")
        sp.add_argument("--seed", type=int, default=None)
        return sp

    sp = sub.add_parser("classify", help="classify a line and three spheres")
    sp.add_argument("scene")
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--projective", action="store_true", help="accept cylinders parallel to the line")
    sp.set_defaults(func=cmd_classify)

    sp = scene_cmd("tangents-plane", "common tangents in a plane through the line")
    sp.add_argument("--theta", type=float, default=0.0, help="angle of the plane in the pencil")
    sp.set_defaults(func=cmd_tangents_plane)

    sp = scene_cmd("tangents-point", "common tangents through a point of the line")
    sp.add_argument("--at", type=float, default=0.0, help="arc-length parameter along the line")
    sp.set_defaults(func=cmd_tangents_point)

    sp = scene_cmd("tau-trace", "trace the real tangents meeting the line")
    sp.add_argument("--planes", type=int, default=360)
    sp.add_argument("--out", default=None)
    sp.add_argument("--verbose", action="store_true", help="print every sampled line")
    sp.set_defaults(func=cmd_tau_trace)

    sp = scene_cmd("tau-degree", "estimate the degree of the tangent curve")
    sp.add_argument("--trials", type=int, default=20)
    sp.set_defaults(func=cmd_tau_degree)

    sp = scene_cmd("detect-components", "known low-degree components")
    sp.set_defaults(func=cmd_detect)

    sp = scene_cmd("envelope", "OBJ mesh of the ruled envelope")
    sp.add_argument("--planes", type=int, default=360)
    sp.add_argument("--bbox", nargs=6, type=float, default=[-4, -4, -4, 4, 4, 4],
                    metavar=("XMIN", "YMIN", "ZMIN", "XMAX", "YMAX", "ZMAX"))
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_envelope)

    sp = sub.add_parser("verify-quartic", help="check the tangent-spheres quartic identities")
    sp.add_argument("--r", default="4", help="ratio as p/q")
    sp.add_argument("--samples", type=int, default=25)
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_verify_quartic)

    sp = sub.add_parser("lemma-degree", help="degree of the image of a rational curve")
    sp.add_argument("file", nargs="?", help="instance file (JSON)")
    sp.add_argument("--preset", choices=sorted(lemma_instances()), default=None)
    sp.set_defaults(func=cmd_lemma_degree)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        emit(out, backend=kernels.BACKEND)
        return 0
    if not args.command:
        parser.print_help(out)
        return 2
    for flag in ("planes", "trials", "samples"):
        v = getattr(args, flag, None)
        if v is not None and v < 1:
            print(f"error: --{flag} must be positive", file=sys.stderr)
            return 2
    try:
        rc = args.func(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"degenerate geometry: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
