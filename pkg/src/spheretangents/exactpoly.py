"""Exact homogeneous bivariate polynomials and a small numeric root solver.

Exact arithmetic is done with :class:`fractions.Fraction` (aliased here as
``Rat``).  A binary form ``HPoly2`` of degree ``d`` stores ``d + 1``
coefficients; coefficient ``k`` multiplies ``s**(d - k) * t**k``.  The
coefficient tuple is therefore also the dense, highest-power-first list of
the dehomogenized polynomial ``p(s, 1)``.

The module also carries linear and quadratic forms in four homogeneous
variables ``(w, x, y, z)`` so that polynomial maps into projective 3-space
can be composed with parametrizations exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import AllCoefficientsZero

Rat = Fraction

#: Roots closer than this (times the largest root magnitude) are merged.
CLUSTER_RADIUS = 1e-7


def _rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are accepted only when they are exactly representable
        return Fraction(value)
    return Fraction(value)


# ---------------------------------------------------------------------------
# univariate helpers (dense lists, highest power first)
# ---------------------------------------------------------------------------

def _strip(p: list) -> list:
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _is_zero(p: Sequence) -> bool:
    return all(c == 0 for c in p)


def _pseudo_remainder(f: list, g: list) -> list:
    """prem(f, g) = lc(g)**(deg f - deg g + 1) * f  mod  g."""
    df, dg = len(f) - 1, len(g) - 1
    lc = g[0]
    r = list(f)
    steps = df - dg + 1
    done = 0
    while len(r) - 1 >= dg and not _is_zero(r):
        head = r[0]
        r = [lc * c for c in r]
        for i, gc in enumerate(g):
            r[i] -= head * gc
        r = _strip(r[1:] if len(r) > 1 else [Fraction(0)])
        done += 1
    if done < steps:
        r = [c * lc ** (steps - done) for c in r]
    return r


def subresultant_prs(f: list, g: list) -> list[list]:
    """Subresultant polynomial remainder sequence of ``f`` and ``g``.

    Both arguments are dense coefficient lists with ``deg f >= deg g`` and
    ``g`` nonzero.  Every division performed is exact.
    """
    R = [f, g]
    n, m = len(f) - 1, len(g) - 1
    d = n - m
    b = Fraction((-1) ** (d + 1))
    h = [c * b for c in _pseudo_remainder(f, g)]
    lc = g[0]
    c = lc ** d
    c = -c
    while not _is_zero(h):
        k = len(h) - 1
        R.append(h)
        f, g, m, d = g, h, k, m - k
        b = -lc * c ** d
        h = [x / b for x in _pseudo_remainder(f, g)]
        lc = g[0]
        if d > 1:
            c = (-lc) ** d / c ** (d - 1)
        else:
            c = -lc
    return R


def univariate_gcd(f: Sequence, g: Sequence) -> list[Fraction]:
    """Monic gcd over the rationals of two dense univariate polynomials."""
    f = _strip([_rat(c) for c in f])
    g = _strip([_rat(c) for c in g])
    if _is_zero(f) and _is_zero(g):
        raise ValueError("gcd(0, 0) is undefined")
    if _is_zero(f):
        f, g = g, f
    if _is_zero(g):
        h = f
    else:
        if len(f) < len(g):
            f, g = g, f
        h = subresultant_prs(f, g)[-1]
    return [c / h[0] for c in h]


def _udivmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [Fraction(0)], a
    q = []
    for _ in range(len(a) - db):
        coef = a[0] / b[0]
        q.append(coef)
        for i, bc in enumerate(b):
            a[i] -= coef * bc
        a = a[1:]
    return q, (_strip(a) if a else [Fraction(0)])


# ---------------------------------------------------------------------------
# binary forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HPoly2:
    """Binary form with exact rational coefficients.

    ``coeffs[k]`` multiplies ``s**(d-k) * t**k``.  The zero form is stored as
    ``(0,)`` with degree 0.
    """

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(_rat(c) for c in self.coeffs)
        if not cs:
            cs = (Fraction(0),)
        if all(c == 0 for c in cs):
            cs = (Fraction(0),)
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def zero(cls) -> "HPoly2":
        return cls((0,))

    @classmethod
    def const(cls, c) -> "HPoly2":
        return cls((c,))

    @classmethod
    def s(cls) -> "HPoly2":
        return cls((1, 0))

    @classmethod
    def t(cls) -> "HPoly2":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (Fraction(0),)

    def __repr__(self):
        if self.is_zero():
            return "HPoly2(0)"
        d = self.degree
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "".join(
                v if e == 1 else f"{v}^{e}" for v, e in (("s", d - k), ("t", k)) if e
            )
            terms.append(f"{c}{'*' + mono if mono else ''}")
        return "HPoly2(" + " + ".join(terms) + ")"

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, HPoly2):
            return other
        return HPoly2.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        return HPoly2(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return HPoly2(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, HPoly2):
            c = _rat(other)
            return HPoly2(tuple(c * a for a in self.coeffs))
        if self.is_zero() or other.is_zero():
            return HPoly2.zero()
        out = [Fraction(0)] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return HPoly2(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = HPoly2.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, HPoly2):
            other = HPoly2.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, s, t):
        return hp_eval(self, s, t)

    # structure -----------------------------------------------------------
    def t_valuation(self) -> int:
        """Largest ``v`` with ``t**v`` dividing the form."""
        if self.is_zero():
            return 0
        v = 0
        while self.coeffs[v] == 0:
            v += 1
        return v

    def monic(self) -> "HPoly2":
        """Scale so the first nonzero coefficient is 1."""
        if self.is_zero():
            return self
        lead = self.coeffs[self.t_valuation()]
        return HPoly2(tuple(c / lead for c in self.coeffs))

    def exact_div(self, other: "HPoly2") -> "HPoly2":
        """Quotient ``self / other``; raises ``ValueError`` if inexact."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero form")
        if self.is_zero():
            return HPoly2.zero()
        va, vb = self.t_valuation(), other.t_valuation()
        if va < vb:
            raise ValueError("inexact division (power of t)")
        q, r = _udivmod(list(self.coeffs[va:]), list(other.coeffs[vb:]))
        if not _is_zero(r):
            raise ValueError("inexact division")
        quo = HPoly2(tuple([0] * (va - vb)) + tuple(q))
        if quo.degree != self.degree - other.degree:
            raise ValueError("inexact division (degree)")
        return quo

    def divides(self, other: "HPoly2") -> bool:
        try:
            other.exact_div(self)
        except ValueError:
            return False
        return True


def hp_eval(p: HPoly2, s, t) -> Fraction:
    """Exact value of ``p`` at ``(s, t)``."""
    s, t = _rat(s), _rat(t)
    d = p.degree
    return sum((c * s ** (d - k) * t ** k for k, c in enumerate(p.coeffs)), Fraction(0))


def hp_gcd(a: HPoly2, b: HPoly2) -> HPoly2:
    """Monic greatest common divisor of two binary forms.

    The forms are dehomogenized at ``t = 1`` after removing their powers of
    ``t``; the univariate gcd comes from the subresultant remainder sequence
    and the common power of ``t`` is restored afterwards.
    """
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if b.is_zero():
        return a.monic()
    if a.is_zero():
        return b.monic()
    va, vb = a.t_valuation(), b.t_valuation()
    g = univariate_gcd(a.coeffs[va:], b.coeffs[vb:])
    return HPoly2(tuple([0] * min(va, vb)) + tuple(g))


def hp_gcd_many(polys: Iterable[HPoly2]) -> HPoly2:
    out = None
    for p in polys:
        if p.is_zero():
            continue
        out = p.monic() if out is None else hp_gcd(out, p)
    if out is None:
        raise ValueError("all forms are zero")
    return out


# ---------------------------------------------------------------------------
# forms in (w, x, y, z)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearForm4:
    """``c0*w + c1*x + c2*y + c3*z`` with rational coefficients."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_rat(c) for c in self.coeffs))

    def __add__(self, other):
        return LinearForm4(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return LinearForm4(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c) -> "LinearForm4":
        c = _rat(c)
        return LinearForm4(tuple(c * a for a in self.coeffs))

    def __mul__(self, other: "LinearForm4") -> "QuadForm4":
        terms: dict = {}
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                key = (min(i, j), max(i, j))
                terms[key] = terms.get(key, Fraction(0)) + a * b
        return QuadForm4(terms)

    def __call__(self, point):
        return sum((c * _rat(v) for c, v in zip(self.coeffs, point)), Fraction(0))

    def compose(self, nu: Sequence[HPoly2]) -> HPoly2:
        out = HPoly2.zero()
        for c, p in zip(self.coeffs, nu):
            if c != 0:
                out = out + p * c
        return out


class QuadForm4:
    """Quadratic form in ``(w, x, y, z)``; monomials keyed by index pairs."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: _rat(v) for k, v in (terms or {}).items() if v != 0}

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return QuadForm4(out)

    def __neg__(self):
        return QuadForm4({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "QuadForm4":
        c = _rat(c)
        return QuadForm4({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, QuadForm4) and self.terms == other.terms

    def __repr__(self):
        names = "wxyz"
        parts = [f"{v}*{names[i]}{names[j]}" for (i, j), v in sorted(self.terms.items())]
        return "QuadForm4(" + (" + ".join(parts) or "0") + ")"

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, point):
        pt = [_rat(v) for v in point]
        return sum((v * pt[i] * pt[j] for (i, j), v in self.terms.items()), Fraction(0))

    def evaluate_float(self, point) -> complex:
        return sum(float(v) * point[i] * point[j] for (i, j), v in self.terms.items())

    def compose(self, nu: Sequence[HPoly2]) -> HPoly2:
        out = HPoly2.zero()
        for (i, j), v in self.terms.items():
            out = out + nu[i] * nu[j] * v
        return out


def sphere_form(center, radius_sq) -> QuadForm4:
    """Homogeneous sphere equation ``|q - w c|**2 - r**2 w**2``."""
    a = [_rat(c) for c in center]
    terms = {(1, 1): 1, (2, 2): 1, (3, 3): 1}
    terms[(0, 0)] = sum(c * c for c in a) - _rat(radius_sq)
    for i, c in enumerate(a, start=1):
        terms[(0, i)] = -2 * c
    return QuadForm4(terms)


# ---------------------------------------------------------------------------
# numeric roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexRoot:
    value: complex
    multiplicity: int

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0.0


def _polish(coeffs: np.ndarray, z: complex, order: int, radius: float) -> complex:
    """Newton refinement of a root of the ``order``-th derivative."""
    p = np.polyder(coeffs, order) if order else coeffs
    if len(p) < 2:
        return z
    dp = np.polyder(p)
    z0 = z
    best = abs(np.polyval(p, z))
    for _ in range(8):
        d = np.polyval(dp, z)
        if d == 0:
            break
        step = np.polyval(p, z) / d
        cand = z - step
        val = abs(np.polyval(p, cand))
        if val >= best or abs(cand - z0) > max(radius, 1e-300):
            break
        z, best = cand, val
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def cluster_roots(roots, coeffs=None, radius=CLUSTER_RADIUS, real_input=True):
    """Merge numerically coincident roots into roots with multiplicity."""
    roots = [complex(r) for r in roots]
    if not roots:
        return []
    scale = max(abs(r) for r in roots)
    rad = radius * scale if scale > 0 else 0.0
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= rad:
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(roots[i])
    out = []
    for members in groups.values():
        z = complex(np.mean(members))
        k = len(members)
        if coeffs is not None:
            z = _polish(coeffs, z, k - 1, rad)
        if real_input and abs(z.imag) <= rad:
            z = complex(z.real, 0.0)
        out.append(ComplexRoot(complex(z), k))
    out.sort(key=lambda r: (r.value.real, r.value.imag))
    return out


def solve_real_coeff_quartic(coeffs, atol: float = 1e-12, radius: float = CLUSTER_RADIUS):
    """All complex roots of a real polynomial of degree at most four.

    ``coeffs`` lists the coefficients from the highest power down (length
    at most 5).  Vanishing leading coefficients lower the degree.  Roots
    closer than ``radius`` times the largest root magnitude are reported
    once with their multiplicity.

    Raises
    ------
    AllCoefficientsZero
        If every coefficient is at most ``atol`` in absolute value.
    """
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0 or np.all(np.abs(c) <= atol):
        raise AllCoefficientsZero("every coefficient vanishes")
    if c.size > 5:
        raise ValueError("at most five coefficients")
    big = np.max(np.abs(c))
    i = 0
    while i < c.size - 1 and abs(c[i]) <= 1e-13 * big:
        i += 1
    c = c[i:] / big
    if c.size == 1:
        return []
    raw = np.roots(c)
    out = cluster_roots(raw, c, radius)
    return out
