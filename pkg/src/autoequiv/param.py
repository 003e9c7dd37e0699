"""Free polynomials with unknown (parametric) coefficients.

Coefficients are commutative polynomials in named parameter slots.  An
unknown triangular map with slot index j has images
(xi{j}*x + sum om{j}_k y^k, eta{j}*y + etap{j}); an unknown affine map uses
slots ax{j}, ay{j}, ac{j}, bx{j}, by{j}, bc{j}.  extract_equations turns an
image that must drop to a target quotient degree into the coefficient
equations: over-degree unbalanced words vanish, balanced components match a
fresh multiple of the corresponding commutator power.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .autgroup import Affine, Tau, Triangular, _single_free_images
from .commalg import CommPoly, UniPoly
from .freealg import FreePoly, Word, X_LETTER, Y_LETTER, comm_power

ParamScalar = CommPoly


def _const(c) -> CommPoly:
    return CommPoly.const(c)


class ParamFreePoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict[Word, CommPoly]] = None):
        self.terms = terms if terms is not None else {}

    @staticmethod
    def make(terms: dict[Word, CommPoly]) -> "ParamFreePoly":
        return ParamFreePoly({w: c for w, c in terms.items() if not c.is_zero()})

    @staticmethod
    def zero() -> "ParamFreePoly":
        return ParamFreePoly({})

    @staticmethod
    def from_free(u: FreePoly) -> "ParamFreePoly":
        return ParamFreePoly({w: _const(c) for w, c in u.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def max_degree(self) -> int:
        return max((w.length for w in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, ParamFreePoly):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "ParamFreePoly") -> "ParamFreePoly":
        terms = dict(self.terms)
        for w, c in other.terms.items():
            s = terms.get(w, CommPoly.zero()) + c
            if s.is_zero():
                terms.pop(w, None)
            else:
                terms[w] = s
        return ParamFreePoly(terms)

    def __sub__(self, other: "ParamFreePoly") -> "ParamFreePoly":
        return self + other.scale(Fraction(-1))

    def scale(self, c) -> "ParamFreePoly":
        if not isinstance(c, CommPoly):
            c = _const(c)
        if c.is_zero():
            return ParamFreePoly.zero()
        return ParamFreePoly.make({w: k * c for w, k in self.terms.items()})

    def add_scaled_free(self, u: FreePoly, c: CommPoly) -> "ParamFreePoly":
        terms = dict(self.terms)
        for w, k in u.terms.items():
            s = terms.get(w, CommPoly.zero()) + c * k
            if s.is_zero():
                terms.pop(w, None)
            else:
                terms[w] = s
        return ParamFreePoly(terms)

    def __mul__(self, other: "ParamFreePoly") -> "ParamFreePoly":
        terms: dict[Word, CommPoly] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1.concat(w2)
                s = terms.get(w, CommPoly.zero()) + c1 * c2
                if s.is_zero():
                    terms.pop(w, None)
                else:
                    terms[w] = s
        return ParamFreePoly(terms)

    def __pow__(self, k: int) -> "ParamFreePoly":
        if k < 0:
            raise ValueError("negative exponent")
        out = ParamFreePoly({Word.empty(): _const(1)})
        for _ in range(k):
            out = out * self
        return out

    def swap_letters(self) -> "ParamFreePoly":
        return ParamFreePoly({w.swap(): c for w, c in self.terms.items()})

    def support_params(self) -> set[str]:
        out: set[str] = set()
        for c in self.terms.values():
            out |= c.support_vars()
        return out

    def specialize(self, point) -> FreePoly:
        return FreePoly.make({w: c.evaluate(point) for w, c in self.terms.items()})

    def truncate(self, max_deg: int) -> "ParamFreePoly":
        return ParamFreePoly({w: c for w, c in self.terms.items() if w.length <= max_deg})

    def degree_slice(self, deg: int) -> "ParamFreePoly":
        return ParamFreePoly({w: c for w, c in self.terms.items() if w.length == deg})


@dataclass(frozen=True)
class TriangularTemplate:
    """Unknown (xi*x + p(y), eta*y + etap) with deg p <= p_degree."""

    index: int
    p_degree: int
    require_nonaffine: bool = False

    @property
    def xi(self) -> str:
        return "xi%d" % self.index

    @property
    def eta(self) -> str:
        return "eta%d" % self.index

    @property
    def etap(self) -> str:
        return "etap%d" % self.index

    def om(self, k: int) -> str:
        return "om%d_%d" % (self.index, k)

    def param_names(self) -> list[str]:
        return [self.xi] + [self.om(k) for k in range(self.p_degree + 1)] + [self.eta, self.etap]

    def images(self) -> tuple[ParamFreePoly, ParamFreePoly]:
        ix = {Word(1, X_LETTER): CommPoly.var(self.xi)}
        for k in range(self.p_degree + 1):
            ix[Word.from_letters([Y_LETTER] * k)] = CommPoly.var(self.om(k))
        iy = {Word(1, Y_LETTER): CommPoly.var(self.eta), Word.empty(): CommPoly.var(self.etap)}
        return ParamFreePoly(ix), ParamFreePoly(iy)


@dataclass(frozen=True)
class AffineTemplate:
    """Unknown (ax*x + ay*y + ac, bx*x + by*y + bc)."""

    index: int

    def name(self, slot: str) -> str:
        return "%s%d" % (slot, self.index)

    def param_names(self) -> list[str]:
        return [self.name(s) for s in ("ax", "ay", "ac", "bx", "by", "bc")]

    def images(self) -> tuple[ParamFreePoly, ParamFreePoly]:
        x, y, e = Word(1, X_LETTER), Word(1, Y_LETTER), Word.empty()
        ix = {x: CommPoly.var(self.name("ax")), y: CommPoly.var(self.name("ay")), e: CommPoly.var(self.name("ac"))}
        iy = {x: CommPoly.var(self.name("bx")), y: CommPoly.var(self.name("by")), e: CommPoly.var(self.name("bc"))}
        return ParamFreePoly(ix), ParamFreePoly(iy)


ParamAut = Union[TriangularTemplate, AffineTemplate, Tau, Triangular, Affine]


def _aut_images(rho: ParamAut) -> tuple[ParamFreePoly, ParamFreePoly]:
    if isinstance(rho, (TriangularTemplate, AffineTemplate)):
        return rho.images()
    fx, fy = _single_free_images(rho)
    return ParamFreePoly.from_free(fx), ParamFreePoly.from_free(fy)


def expansion_cost(rho: ParamAut, u: ParamFreePoly) -> int:
    """Upper bound on the term count of param_apply(rho, u)."""
    ix, iy = _aut_images(rho)
    nx, ny = max(len(ix.terms), 1), max(len(iy.terms), 1)
    total = 0
    for w in u.terms:
        dx = w.deg_x()
        total += nx ** dx * ny ** (w.length - dx)
    return total


def param_apply(rho: ParamAut, u: ParamFreePoly) -> ParamFreePoly:
    if isinstance(rho, Tau):
        return u.swap_letters()
    ix, iy = _aut_images(rho)
    images = (ix, iy)
    pow_cache: dict[tuple[int, int], ParamFreePoly] = {}
    out = ParamFreePoly.zero()
    for w, c in u.terms.items():
        term = ParamFreePoly({Word.empty(): c})
        for l, n in w.runs():
            p = pow_cache.get((l, n))
            if p is None:
                p = images[l] ** n
                pow_cache[(l, n)] = p
            term = term * p
        out = out + term
    return out


def extract_equations(
    w: ParamFreePoly,
    target_qdeg: int,
    hard_degree_cap: int,
    fresh_theta_namer: Callable[[int], str],
) -> list[CommPoly]:
    """Equations forcing every component above target_qdeg into the commutator line."""
    assert target_qdeg <= hard_degree_cap
    out: list[CommPoly] = []
    by_degree: dict[int, list[Word]] = {}
    for word in w.terms:
        if word.length > target_qdeg:
            by_degree.setdefault(word.length, []).append(word)
    for s in sorted(by_degree):
        if s > hard_degree_cap:
            raise AssertionError("degree cap violated upstream")
        words = by_degree[s]
        balanced = [word for word in words if 2 * word.deg_x() == s]
        for word in words:
            if 2 * word.deg_x() != s:
                out.append(w.terms[word])
        if not balanced:
            continue
        theta = CommPoly.var(fresh_theta_namer(s))
        ck = comm_power(s // 2)
        support = set(balanced) | set(ck.terms)
        for word in sorted(support, key=Word.key):
            coeff = w.terms.get(word, CommPoly.zero())
            out.append(coeff - theta * ck.terms.get(word, Fraction(0)))
    return out


def kill_above_degree(w: ParamFreePoly, target: int) -> list[CommPoly]:
    """Commutative analogue: every coefficient above target must vanish."""
    return [c for word, c in w.terms.items() if word.length > target]


def nondegeneracy(rho_templates) -> CommPoly:
    out = CommPoly.const(1)
    for rho in rho_templates:
        if isinstance(rho, TriangularTemplate):
            out = out * CommPoly.var(rho.xi) * CommPoly.var(rho.eta)
            if rho.require_nonaffine:
                out = out * CommPoly.var(rho.om(rho.p_degree))
        elif isinstance(rho, AffineTemplate):
            det = CommPoly.var(rho.name("ax")) * CommPoly.var(rho.name("by")) - CommPoly.var(
                rho.name("ay")
            ) * CommPoly.var(rho.name("bx"))
            out = out * det
    return out


def specialize_aut(rho: ParamAut, point) -> Union[Triangular, Affine, Tau]:
    if isinstance(rho, TriangularTemplate):
        coeffs = [point[rho.om(k)] for k in range(rho.p_degree + 1)]
        return Triangular(point[rho.xi], UniPoly(coeffs), point[rho.eta], point[rho.etap])
    if isinstance(rho, AffineTemplate):
        vals = [point[rho.name(s)] for s in ("ax", "ay", "ac", "bx", "by", "bc")]
        return Affine(*vals)
    return rho


def template_params(rho_templates) -> list[str]:
    out: list[str] = []
    for rho in rho_templates:
        if isinstance(rho, (TriangularTemplate, AffineTemplate)):
            out.extend(rho.param_names())
    return out
