"""Tame automorphisms of the rank-two algebras.

An automorphism is a word in elementary factors: the letter swap tau,
invertible affine maps (ax+cy+e, bx+dy+f), and triangular maps
(alpha*x + p(y), beta*y + eta).  Words compose right-to-left: in a factor
list the rightmost entry acts first.  to_simplified computes the
alternating normal form rho_n tau ... tau rho_1 tau rho_0 with every
rho_i for i >= 1 a shear (x + p_i(y), y), p_i(0) = 0, and all interior
shears of degree at least two, so the tau count n is minimal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .commalg import CommPoly, UniPoly, as_scalar, substitute
from .freealg import FREE_X, FREE_Y, FreePoly, free_substitute


@dataclass(frozen=True)
class Tau:
    """The letter swap (y, x)."""

    def __repr__(self):
        return "tau"


TAU = Tau()


@dataclass(frozen=True)
class Affine:
    """(a*x + c*y + e, b*x + d*y + f), invertible."""

    a: Fraction
    c: Fraction
    e: Fraction
    b: Fraction
    d: Fraction
    f: Fraction

    def __init__(self, a, c, e, b, d, f):
        for name, val in zip("acebdf", (a, c, e, b, d, f)):
            object.__setattr__(self, name, as_scalar(val))
        if self.det() == 0:
            raise ValueError("affine map not invertible")

    def det(self) -> Fraction:
        return self.a * self.d - self.c * self.b

    def is_triangular(self) -> bool:
        return self.b == 0


@dataclass(frozen=True)
class Triangular:
    """(alpha*x + p(y), beta*y + eta)."""

    alpha: Fraction
    p: UniPoly
    beta: Fraction
    eta: Fraction

    def __init__(self, alpha, p: UniPoly, beta, eta):
        object.__setattr__(self, "alpha", as_scalar(alpha))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "beta", as_scalar(beta))
        object.__setattr__(self, "eta", as_scalar(eta))
        if self.alpha == 0 or self.beta == 0:
            raise ValueError("triangular map not invertible")

    def in_affine(self) -> bool:
        return self.p.degree <= 1

    def is_identity(self) -> bool:
        return self.alpha == 1 and self.beta == 1 and self.eta == 0 and self.p.is_zero()


ElementaryAut = Union[Tau, Affine, Triangular]

TRI_ID = Triangular(1, UniPoly(), 1, 0)


@dataclass(frozen=True)
class AutWord:
    """Composition of elementary factors; factors[0] acts last."""

    factors: tuple[ElementaryAut, ...]

    @staticmethod
    def identity() -> "AutWord":
        return AutWord(())


Autlike = Union[ElementaryAut, AutWord]


def _factors(phi: Autlike) -> tuple[ElementaryAut, ...]:
    if isinstance(phi, AutWord):
        return phi.factors
    return (phi,)


def compose(*auts: Autlike) -> AutWord:
    """Left-to-right outermost first: compose(psi, phi) acts as psi after phi."""
    out: list[ElementaryAut] = []
    for a in auts:
        out.extend(_factors(a))
    return AutWord(tuple(out))


def free_images(phi: Autlike) -> tuple[FreePoly, FreePoly]:
    ix, iy = FREE_X, FREE_Y
    for f in reversed(_factors(phi)):
        fx, fy = _single_free_images(f)
        ix = free_substitute(ix, fx, fy)
        iy = free_substitute(iy, fx, fy)
    return ix, iy


def _single_free_images(f: ElementaryAut) -> tuple[FreePoly, FreePoly]:
    if isinstance(f, Tau):
        return FREE_Y, FREE_X
    if isinstance(f, Affine):
        return (FREE_X * f.a + FREE_Y * f.c + f.e, FREE_X * f.b + FREE_Y * f.d + f.f)
    ix = FREE_X * f.alpha
    for k in range(f.p.degree + 1):
        if f.p[k] != 0:
            ix = ix + FREE_Y ** k * f.p[k]
    return ix, FREE_Y * f.beta + f.eta


def comm_images(phi: Autlike) -> tuple[CommPoly, CommPoly]:
    fx, fy = free_images(phi)
    return _free_to_comm(fx), _free_to_comm(fy)


def _free_to_comm(u: FreePoly) -> CommPoly:
    terms: dict[tuple[int, int], Fraction] = {}
    for w, c in u.terms.items():
        key = (w.deg_x(), w.deg_y())
        s = terms.get(key, Fraction(0)) + c
        if s == 0:
            terms.pop(key, None)
        else:
            terms[key] = s
    return CommPoly.make(("x", "y"), terms)


def apply(phi: Autlike, u):
    """Apply the automorphism, factor by factor, rightmost factor first."""
    if isinstance(u, FreePoly):
        for f in reversed(_factors(phi)):
            fx, fy = _single_free_images(f)
            u = free_substitute(u, fx, fy)
        return u
    if isinstance(u, CommPoly):
        for f in reversed(_factors(phi)):
            fx, fy = _single_free_images(f)
            u = substitute(u, _free_to_comm(fx), _free_to_comm(fy))
        return u
    raise TypeError("apply expects FreePoly or CommPoly")


def theta(phi: Autlike) -> Fraction:
    """Determinant of the linear part; multiplicative over composition."""
    out = Fraction(1)
    for f in _factors(phi):
        if isinstance(f, Tau):
            out = -out
        elif isinstance(f, Affine):
            out = out * f.det()
        else:
            out = out * f.alpha * f.beta
    return out


def invert(phi: Autlike) -> Autlike:
    if isinstance(phi, AutWord):
        return AutWord(tuple(invert(f) for f in reversed(phi.factors)))
    if isinstance(phi, Tau):
        return TAU
    if isinstance(phi, Affine):
        det = phi.det()
        a, c, b, d = phi.d / det, -phi.c / det, -phi.b / det, phi.a / det
        return Affine(a, c, -(a * phi.e + c * phi.f), b, d, -(b * phi.e + d * phi.f))
    ainv = 1 / phi.alpha
    binv = 1 / phi.beta
    return Triangular(ainv, -phi.p.compose_linear(binv, -phi.eta * binv) * ainv, binv, -phi.eta * binv)


def compose_tri(outer: Triangular, inner: Triangular) -> Triangular:
    """outer after inner, both triangular; the result is again triangular."""
    p = inner.p.compose_linear(outer.beta, outer.eta) + outer.p * inner.alpha
    return Triangular(
        inner.alpha * outer.alpha,
        p,
        inner.beta * outer.beta,
        inner.beta * outer.eta + inner.eta,
    )


def tri_of_affine(f: Affine) -> Triangular:
    assert f.is_triangular(), "affine factor has a lower-left entry"
    return Triangular(f.a, UniPoly((f.e, f.c)), f.d, f.f)


def affine_of_tri(t: Triangular) -> Affine:
    assert t.in_affine(), "triangular factor of degree above one"
    return Affine(t.alpha, t.p[1], t.p[0], 0, t.beta, t.eta)


def tau_conjugate_c(t: Triangular) -> Affine:
    """tau o t o tau for t with deg p <= 1: (beta*x + eta, p1*x + alpha*y + p0)."""
    assert t.in_affine()
    return Affine(t.beta, 0, t.eta, t.p[1], t.alpha, t.p[0])


def bruhat_split(f: Affine) -> tuple[Triangular, Triangular]:
    """For b != 0 write f = c1 o tau o c2 with c1, c2 triangular-affine."""
    assert f.b != 0
    c1 = Triangular(1, UniPoly((0, f.d / f.b)), 1, 0)
    c2 = Triangular((f.c * f.b - f.a * f.d) / f.b, UniPoly((f.e, f.a)), f.b, f.f)
    return c1, c2


@dataclass(frozen=True)
class SimplifiedForm:
    """phi = rhos[n] o tau o ... o tau o rhos[0]; rhos[0] may be Affine when n = 0."""

    rhos: tuple[Union[Triangular, Affine], ...]

    @property
    def n(self) -> int:
        return len(self.rhos) - 1

    def as_word(self) -> AutWord:
        factors: list[ElementaryAut] = []
        for rho in reversed(self.rhos):
            factors.append(rho)
            factors.append(TAU)
        factors.pop()
        return AutWord(tuple(factors))

    def is_identity(self) -> bool:
        return self.n == 0 and isinstance(self.rhos[0], Triangular) and self.rhos[0].is_identity()


def _push_triangular(rhos: list[Triangular], t: Triangular) -> None:
    rhos[-1] = compose_tri(t, rhos[-1])


def _push_tau(rhos: list[Triangular]) -> None:
    if len(rhos) >= 2 and rhos[-1].in_affine():
        c = rhos.pop()
        a = tau_conjugate_c(c)
        if a.is_triangular():
            _push_triangular(rhos, tri_of_affine(a))
        else:
            c1, c2 = bruhat_split(a)
            _push_triangular(rhos, c2)
            rhos.append(c1)
    else:
        rhos.append(TRI_ID)


def _split_constants(t: Triangular) -> tuple[Triangular, Triangular]:
    """t = shear o c with shear = (x + q(y), y), q(0) = 0, c affine triangular."""
    q = (t.p - UniPoly.const(t.p[0])) * (1 / t.alpha)
    shear = Triangular(1, q, 1, 0)
    c = Triangular(t.alpha, UniPoly.const(t.p[0]), t.beta, t.eta)
    return shear, c


def to_simplified(phi: Autlike) -> SimplifiedForm:
    rhos: list[Triangular] = [TRI_ID]
    for f in reversed(_factors(phi)):
        if isinstance(f, Tau):
            _push_tau(rhos)
        elif isinstance(f, Triangular):
            _push_triangular(rhos, f)
        elif f.is_triangular():
            _push_triangular(rhos, tri_of_affine(f))
        else:
            c1, c2 = bruhat_split(f)
            _push_triangular(rhos, c2)
            _push_tau(rhos)
            _push_triangular(rhos, c1)

    out: list[Union[Triangular, Affine]]
    if len(rhos) == 2 and rhos[0].in_affine() and rhos[1].in_affine():
        # an affine word that is not triangular: collapse to a single factor
        m1 = affine_of_tri(rhos[1])
        m0 = affine_of_tri(rhos[0])
        swap = Affine(0, 1, 0, 1, 0, 0)
        out = [_compose_affine(_compose_affine(m1, swap), m0)]
    else:
        for i in range(len(rhos) - 1, 0, -1):
            shear, c = _split_constants(rhos[i])
            rhos[i] = shear
            rhos[i - 1] = compose_tri(tau_conjugate_tri(c), rhos[i - 1])
        out = list(rhos)

    form = SimplifiedForm(tuple(out))
    fx, fy = free_images(phi)
    gx, gy = free_images(form.as_word())
    assert (fx, fy) == (gx, gy), "simplified form disagrees with input"
    return form


def tau_conjugate_tri(c: Triangular) -> Triangular:
    """tau o c o tau for c with constant p: (beta*x + eta, alpha*y + p0)."""
    assert c.p.degree <= 0
    return Triangular(c.beta, UniPoly.const(c.eta), c.alpha, c.p[0])


def _compose_affine(outer: Affine, inner: Affine) -> Affine:
    return Affine(
        inner.a * outer.a + inner.c * outer.b,
        inner.a * outer.c + inner.c * outer.d,
        inner.a * outer.e + inner.c * outer.f + inner.e,
        inner.b * outer.a + inner.d * outer.b,
        inner.b * outer.c + inner.d * outer.d,
        inner.b * outer.e + inner.d * outer.f + inner.f,
    )


def _nonzero(rng: random.Random, bound: int) -> int:
    v = rng.randint(1, bound)
    return v if rng.random() < 0.5 else -v


def random_tame(seed: int, max_factors: int, max_p_degree: int, coeff_bound: int) -> AutWord:
    """Reproducible word of valid elementary factors."""
    assert max_factors > 0 and max_p_degree >= 0 and coeff_bound > 0
    rng = random.Random(seed)
    factors: list[ElementaryAut] = []
    for _ in range(rng.randint(1, max_factors)):
        kind = rng.choice(("tau", "affine", "tri", "tri"))
        if kind == "tau":
            factors.append(TAU)
        elif kind == "affine":
            while True:
                vals = [rng.randint(-coeff_bound, coeff_bound) for _ in range(6)]
                if vals[0] * vals[4] - vals[1] * vals[3] != 0:
                    factors.append(Affine(*vals))
                    break
        else:
            deg = rng.randint(0, max_p_degree)
            coeffs = [Fraction(rng.randint(-coeff_bound, coeff_bound)) for _ in range(deg)]
            coeffs.append(Fraction(_nonzero(rng, coeff_bound)))
            factors.append(
                Triangular(
                    _nonzero(rng, coeff_bound),
                    UniPoly(coeffs),
                    _nonzero(rng, coeff_bound),
                    rng.randint(-coeff_bound, coeff_bound),
                )
            )
    return AutWord(tuple(factors))


def random_shear(rng: random.Random, max_deg: int, coeff_bound: int, min_deg: int = 2) -> Triangular:
    """Normalized interior factor (x + q(y), y), q(0) = 0, deg q >= min_deg."""
    deg = rng.randint(min_deg, max(min_deg, max_deg))
    coeffs = [Fraction(0)] + [Fraction(rng.randint(-coeff_bound, coeff_bound)) for _ in range(deg - 1)]
    coeffs.append(Fraction(_nonzero(rng, coeff_bound)))
    return Triangular(1, UniPoly(coeffs), 1, 0)


# -- rendering (CLI literal grammar) ---------------------------------------


def _fmt_scalar(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def format_aut(phi: Autlike) -> str:
    factors = _factors(phi)
    if not factors:
        return "affine(1,0,0; 0,1,0)"
    return " . ".join(_format_single(f) for f in factors)


def _format_single(f: ElementaryAut) -> str:
    if isinstance(f, Tau):
        return "tau"
    if isinstance(f, Affine):
        return "affine(%s,%s,%s; %s,%s,%s)" % tuple(
            _fmt_scalar(v) for v in (f.a, f.c, f.e, f.b, f.d, f.f)
        )
    return "tri(%s; %s; %s; %s)" % (
        _fmt_scalar(f.alpha),
        f.p.format("y"),
        _fmt_scalar(f.beta),
        _fmt_scalar(f.eta),
    )
