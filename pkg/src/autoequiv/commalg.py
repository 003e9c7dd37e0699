"""Exact rational arithmetic and commutative polynomials.

Polynomials are sparse maps from exponent tuples to nonzero Fraction
coefficients, over an ordered tuple of variable names.  The two-variable
ring K[x,y] and the rings of unknown coefficients used by the decision
drivers are both instances of the same type.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

Scalar = Fraction


def as_scalar(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError("not a scalar: %r" % (c,))


class CommPoly:
    """Commutative polynomial with exact rational coefficients.

    Immutable by convention.  Variables are kept sorted so that values over
    different variable sets can be aligned cheaply; the zero polynomial has
    an empty term map.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple[str, ...], terms: dict[tuple[int, ...], Fraction]):
        self.vars = vars
        self.terms = terms

    # -- construction ------------------------------------------------------

    @staticmethod
    def make(vars: Iterable[str], terms: Mapping[tuple[int, ...], Fraction | int]) -> "CommPoly":
        vs = tuple(vars)
        assert vs == tuple(sorted(vs)), "variables must be sorted"
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in terms.items():
            c = as_scalar(c)
            if c == 0:
                continue
            exps = tuple(exps)
            assert len(exps) == len(vs)
            clean[exps] = clean.get(exps, Fraction(0)) + c
            if clean[exps] == 0:
                del clean[exps]
        return CommPoly(vs, clean)

    @staticmethod
    def const(c, vars: Iterable[str] = ()) -> "CommPoly":
        vs = tuple(sorted(vars))
        c = as_scalar(c)
        if c == 0:
            return CommPoly(vs, {})
        return CommPoly(vs, {(0,) * len(vs): c})

    @staticmethod
    def zero(vars: Iterable[str] = ()) -> "CommPoly":
        return CommPoly(tuple(sorted(vars)), {})

    @staticmethod
    def var(name: str) -> "CommPoly":
        return CommPoly((name,), {(1,): Fraction(1)})

    # -- variable alignment ------------------------------------------------

    def with_vars(self, vars: tuple[str, ...]) -> "CommPoly":
        """Reindex onto a superset variable tuple (sorted)."""
        if vars == self.vars:
            return self
        pos = []
        for v in self.vars:
            # every old variable must appear in the new tuple
            pos.append(vars.index(v))
        n = len(vars)
        terms: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            out = [0] * n
            for p, e in zip(pos, exps):
                out[p] = e
            terms[tuple(out)] = c
        return CommPoly(vars, terms)

    @staticmethod
    def _aligned(a: "CommPoly", b: "CommPoly"):
        if a.vars == b.vars:
            return a, b
        merged = tuple(sorted(set(a.vars) | set(b.vars)))
        return a.with_vars(merged), b.with_vars(merged)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def support_vars(self) -> set[str]:
        used = set()
        for exps in self.terms:
            for v, e in zip(self.vars, exps):
                if e:
                    used.add(v)
        return used

    def _key(self):
        items = []
        for exps, c in self.terms.items():
            mono = tuple((v, e) for v, e in zip(self.vars, exps) if e)
            items.append((mono, c))
        items.sort()
        return tuple(items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CommPoly):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "CommPoly":
        if isinstance(other, (int, Fraction)):
            other = CommPoly.const(other, self.vars)
        a, b = CommPoly._aligned(self, other)
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            s = terms.get(exps, Fraction(0)) + c
            if s == 0:
                terms.pop(exps, None)
            else:
                terms[exps] = s
        return CommPoly(a.vars, terms)

    __radd__ = __add__

    def __neg__(self) -> "CommPoly":
        return CommPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "CommPoly":
        if isinstance(other, (int, Fraction)):
            other = CommPoly.const(other, self.vars)
        return self + (-other)

    def __rsub__(self, other) -> "CommPoly":
        return (-self) + other

    def __mul__(self, other) -> "CommPoly":
        if isinstance(other, (int, Fraction)):
            c = as_scalar(other)
            if c == 0:
                return CommPoly(self.vars, {})
            return CommPoly(self.vars, {e: k * c for e, k in self.terms.items()})
        a, b = CommPoly._aligned(self, other)
        n = len(a.vars)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(e1[i] + e2[i] for i in range(n))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return CommPoly(a.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CommPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("negative exponent")
        out = CommPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def scale(self, c) -> "CommPoly":
        return self * as_scalar(c)

    # -- degrees -----------------------------------------------------------

    def total_degree(self) -> int:
        if self.is_zero():
            raise ValueError("degree of zero undefined")
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        """Largest exponent of one variable, 0 when the variable is absent."""
        if self.is_zero():
            raise ValueError("degree of zero undefined")
        if name not in self.vars:
            return 0
        i = self.vars.index(name)
        return max(e[i] for e in self.terms)

    def homogeneous_part(self, d: int) -> "CommPoly":
        return CommPoly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def coefficient_of(self, name: str, power: int) -> "CommPoly":
        """Coefficient of name**power, a polynomial in the remaining variables."""
        if name not in self.vars:
            if power == 0:
                return self
            return CommPoly(self.vars, {})
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        terms: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            if exps[i] == power:
                terms[exps[:i] + exps[i + 1:]] = c
        return CommPoly(rest, terms)

    # -- substitution ------------------------------------------------------

    def subst(self, images: Mapping[str, "CommPoly"]) -> "CommPoly":
        """Substitute polynomials for variables; unmapped variables persist."""
        out = CommPoly.zero()
        pow_cache: dict[tuple[str, int], CommPoly] = {}
        for exps, c in self.terms.items():
            term = CommPoly.const(c)
            for name, e in zip(self.vars, exps):
                if e == 0:
                    continue
                key = (name, e)
                p = pow_cache.get(key)
                if p is None:
                    img = images.get(name)
                    if img is None:
                        img = CommPoly.var(name)
                    p = img ** e
                    pow_cache[key] = p
                term = term * p
            out = out + term
        return out

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        images = {v: CommPoly.const(assignment[v]) for v in self.vars if v in assignment}
        r = self.subst(images)
        return r.constant_value()

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        return format_comm(self)

    def __repr__(self) -> str:
        return "CommPoly(%s)" % format_comm(self)


class DegreeInfo(NamedTuple):
    total: int
    deg_x: int
    deg_y: int
    leading_form: CommPoly
    biased: bool


def degree_calculus(u: CommPoly) -> DegreeInfo:
    """Total degree, per-variable degrees, leading form and bias of u in K[x,y]."""
    if u.is_zero():
        raise ValueError("degree of zero undefined")
    if not u.support_vars() <= {"x", "y"}:
        raise ValueError("degree calculus requires a polynomial in x, y")
    d = u.total_degree()
    lead = u.homogeneous_part(d)
    lx = lead.degree_in("x")
    ly = lead.degree_in("y")
    return DegreeInfo(d, u.degree_in("x"), u.degree_in("y"), lead, lx >= ly)


def substitute(u: CommPoly, image_x: CommPoly, image_y: CommPoly) -> CommPoly:
    return u.subst({"x": image_x, "y": image_y})


def partial(u: CommPoly, name: str) -> CommPoly:
    if name not in u.vars:
        return CommPoly.zero(u.vars)
    i = u.vars.index(name)
    terms: dict[tuple[int, ...], Fraction] = {}
    for exps, c in u.terms.items():
        e = exps[i]
        if e == 0:
            continue
        dexps = exps[:i] + (e - 1,) + exps[i + 1:]
        terms[dexps] = terms.get(dexps, Fraction(0)) + c * e
    return CommPoly.make(u.vars, terms)


def partials(u: CommPoly) -> tuple[CommPoly, CommPoly]:
    return partial(u, "x"), partial(u, "y")


# -- printing contract -----------------------------------------------------


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def format_comm(u: CommPoly) -> str:
    """Terms in decreasing lexicographic order of exponent tuples."""
    if u.is_zero():
        return "0"
    parts = []
    for exps in sorted(u.terms, reverse=True):
        c = u.terms[exps]
        factors = []
        for v, e in zip(u.vars, exps):
            if e == 0:
                continue
            factors.append(v if e == 1 else "%s^%d" % (v, e))
        mag = abs(c)
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(mag)] + factors)
        parts.append((c < 0, body))
    out = []
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out.append("-" + body if neg else body)
        else:
            out.append(" - " + body if neg else " + " + body)
    return "".join(out)


# -- univariate polynomials ------------------------------------------------


class UniPoly:
    """Dense univariate polynomial, coefficients lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int] = ()):
        cs = [as_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def const(c) -> "UniPoly":
        return UniPoly([as_scalar(c)])

    @staticmethod
    def x() -> "UniPoly":
        return UniPoly([0, 1])

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if self.is_zero():
            raise ValueError("degree of zero undefined")
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly.const(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "UniPoly":
        return (-self) + other

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            c = as_scalar(other)
            return UniPoly([k * c for k in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        if k < 0:
            raise ValueError("negative exponent")
        out = UniPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, k: int) -> "UniPoly":
        """Multiply by x**k."""
        if self.is_zero():
            return self
        return UniPoly([Fraction(0)] * k + list(self.coeffs))

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = UniPoly()
        r = self
        d = other.degree
        lc = other.leading()
        while not r.is_zero() and r.degree >= d:
            k = r.degree - d
            c = r.leading() / lc
            q = q + UniPoly.const(c).shift(k)
            r = r - other.shift(k) * c
        return q, r

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * (1 / self.leading())

    def eval_at(self, a: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def compose_linear(self, a: Fraction, b: Fraction) -> "UniPoly":
        """The polynomial p(a*t + b)."""
        lin = UniPoly([b, a])
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def to_comm(self, name: str) -> CommPoly:
        return CommPoly.make((name,), {(i,): c for i, c in enumerate(self.coeffs)})

    @staticmethod
    def from_comm(p: CommPoly, name: str) -> "UniPoly":
        if not p.support_vars() <= {name}:
            raise ValueError("polynomial is not univariate in %s" % name)
        d = 0 if p.is_zero() else p.degree_in(name)
        out = [Fraction(0)] * (d + 1)
        if name in p.vars:
            i = p.vars.index(name)
            for exps, c in p.terms.items():
                out[exps[i]] = c
        elif not p.is_zero():
            out[0] = p.constant_value()
        return UniPoly(out)

    def format(self, name: str = "w") -> str:
        return format_comm(self.to_comm(name))

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return "UniPoly(%s)" % self.format()


def euclid_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    """Monic greatest common divisor by the Euclidean algorithm."""
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0,0) undefined")
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def split_valuation(f: UniPoly) -> tuple[int, UniPoly]:
    """Write f = x**v * g with g(0) != 0; returns (v, g)."""
    if f.is_zero():
        return 0, f
    v = 0
    while f[v] == 0:
        v += 1
    return v, UniPoly(f.coeffs[v:])


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)


def rational_roots(f: UniPoly) -> list[Fraction]:
    """All rational roots of f, sorted; f must be nonzero."""
    if f.is_zero():
        raise ValueError("rational roots of zero undefined")
    v, g = split_valuation(f)
    roots = set()
    if v > 0:
        roots.add(Fraction(0))
    if g.degree >= 1:
        # integerize: clear denominators, then strip integer content
        from math import gcd, lcm
        den = lcm(*[c.denominator for c in g.coeffs]) if len(g.coeffs) > 1 else g.coeffs[0].denominator
        ints = [int(c * den) for c in g.coeffs]
        content = 0
        for c in ints:
            content = gcd(content, c)
        ints = [c // content for c in ints]
        a0, an = ints[0], ints[-1]
        for p in _divisors(a0):
            for q in _divisors(an):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if g.eval_at(cand) == 0:
                        roots.add(cand)
    return sorted(roots)


# -- bivariate gcd ---------------------------------------------------------


def _y_coeffs(u: CommPoly) -> dict[int, UniPoly]:
    out: dict[int, UniPoly] = {}
    top = u.degree_in("y") if not u.is_zero() else 0
    for j in range(top + 1):
        c = u.coefficient_of("y", j)
        if not c.is_zero():
            out[j] = UniPoly.from_comm(c, "x")
    return out


def _from_y_coeffs(cs: dict[int, UniPoly]) -> CommPoly:
    terms: dict[tuple[int, int], Fraction] = {}
    for j, p in cs.items():
        for i, c in enumerate(p.coeffs):
            if c != 0:
                terms[(i, j)] = c
    return CommPoly.make(("x", "y"), terms)


def _content_y(u: CommPoly) -> UniPoly:
    cs = _y_coeffs(u)
    it = iter(cs.values())
    g = next(it)
    for p in it:
        g = euclid_gcd(g, p)
        if g.degree == 0:
            break
    return g.monic()


def _div_content(u: CommPoly, content: UniPoly) -> CommPoly:
    out: dict[int, UniPoly] = {}
    for j, p in _y_coeffs(u).items():
        q, r = p.divmod(content)
        assert r.is_zero(), "content division must be exact"
        out[j] = q
    return _from_y_coeffs(out)


def _prem_y(f: CommPoly, g: CommPoly) -> CommPoly:
    """Pseudo-remainder of f by g as polynomials in y over Q[x]."""
    dg = g.degree_in("y")
    lcg = g.coefficient_of("y", dg).with_vars(("x", "y"))
    y = CommPoly.var("y")
    r = f
    while not r.is_zero() and r.degree_in("y") >= dg:
        dr = r.degree_in("y")
        lcr = r.coefficient_of("y", dr).with_vars(("x", "y"))
        r = lcg * r - lcr * (y ** (dr - dg)) * g
    return r


def _monic_lex(u: CommPoly) -> CommPoly:
    if u.is_zero():
        return u
    u2 = u.with_vars(tuple(sorted(set(u.vars) | {"x", "y"})))
    lead = max(u2.terms)
    return u2 * (1 / u2.terms[lead])


def bivariate_gcd(u: CommPoly, v: CommPoly) -> CommPoly:
    """GCD in Q[x,y] by the subresultant route, monic in lex leading term."""
    if u.is_zero() and v.is_zero():
        raise ValueError("gcd(0,0) undefined")
    if u.is_zero():
        return _monic_lex(v)
    if v.is_zero():
        return _monic_lex(u)
    u = u.with_vars(tuple(sorted(set(u.vars) | {"x", "y"})))
    v = v.with_vars(u.vars)
    if not (set(u.support_vars()) | set(v.support_vars())) <= {"x", "y"}:
        raise ValueError("bivariate gcd requires polynomials in x, y")
    du, dv = u.degree_in("y"), v.degree_in("y")
    if du == 0 and dv == 0:
        g = euclid_gcd(UniPoly.from_comm(u, "x"), UniPoly.from_comm(v, "x"))
        return _monic_lex(g.to_comm("x"))
    if dv == 0:
        g = euclid_gcd(_content_y(u), UniPoly.from_comm(v, "x"))
        return _monic_lex(g.to_comm("x"))
    if du == 0:
        g = euclid_gcd(_content_y(v), UniPoly.from_comm(u, "x"))
        return _monic_lex(g.to_comm("x"))
    cu, cv = _content_y(u), _content_y(v)
    cg = euclid_gcd(cu, cv)
    f, g = _div_content(u, cu), _div_content(v, cv)
    if f.degree_in("y") < g.degree_in("y"):
        f, g = g, f
    pp = CommPoly.const(1, ("x", "y"))
    while True:
        if g.is_zero():
            pp = f if f.degree_in("y") > 0 else pp
            break
        if g.degree_in("y") == 0:
            # y-free nonzero remainder: the primitive parts are coprime
            break
        r = _prem_y(f, g)
        if not r.is_zero() and r.degree_in("y") > 0:
            r = _div_content(r, _content_y(r))
        f, g = g, r
    return _monic_lex(cg.to_comm("x") * pp)
