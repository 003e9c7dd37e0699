"""Buchberger engine over the rationals with triviality, radical membership,
elimination, closure solvability, and best-effort rational witnesses.

Polynomials enter and leave as CommPoly; internally a polynomial is a dict
from exponent tuples aligned with the order's variable list to nonzero
Fractions.  Solvability over the algebraic closure with one inequation f0
is decided through the ideal I + (1 - z*f0) with a fresh variable z.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .commalg import CommPoly, UniPoly, rational_roots

Mono = tuple[int, ...]


class BudgetExceeded(Exception):
    """Raised when a computation outgrows its pair or node budget."""


@dataclass(frozen=True)
class MonomialOrder:
    kind: str  # lex | grevlex | block
    variables: tuple[str, ...]
    split: int = 0  # block: this many leading variables get eliminated first

    def __post_init__(self):
        assert self.kind in ("lex", "grevlex", "block")
        assert len(set(self.variables)) == len(self.variables)

    def key(self, m: Mono):
        if self.kind == "lex":
            return m
        if self.kind == "grevlex":
            return (sum(m), tuple(-e for e in reversed(m)))
        a, b = m[: self.split], m[self.split :]
        return (sum(a), tuple(-e for e in reversed(a)), sum(b), tuple(-e for e in reversed(b)))


def lex_order(variables: Sequence[str]) -> MonomialOrder:
    return MonomialOrder("lex", tuple(variables))


def grevlex_order(variables: Sequence[str]) -> MonomialOrder:
    return MonomialOrder("grevlex", tuple(variables))


def block_order(eliminate_vars: Sequence[str], keep_vars: Sequence[str]) -> MonomialOrder:
    return MonomialOrder("block", tuple(eliminate_vars) + tuple(keep_vars), len(tuple(eliminate_vars)))


class Poly:
    """Internal polynomial bound to an order's variable list."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: dict[Mono, Fraction], order: MonomialOrder):
        self.terms = terms
        self.order = order

    def is_zero(self) -> bool:
        return not self.terms

    def lead(self) -> tuple[Mono, Fraction]:
        m = max(self.terms, key=self.order.key)
        return m, self.terms[m]

    def copy(self) -> "Poly":
        return Poly(dict(self.terms), self.order)


def to_internal(p: CommPoly, order: MonomialOrder) -> Poly:
    missing = p.support_vars() - set(order.variables)
    assert not missing, "polynomial mentions undeclared variables: %s" % sorted(missing)
    idx = {v: i for i, v in enumerate(order.variables)}
    n = len(order.variables)
    terms: dict[Mono, Fraction] = {}
    for exps, c in p.terms.items():
        m = [0] * n
        for v, e in zip(p.vars, exps):
            if e:
                m[idx[v]] = e
        terms[tuple(m)] = terms.get(tuple(m), Fraction(0)) + c
    return Poly({m: c for m, c in terms.items() if c != 0}, order)


def to_comm(p: Poly) -> CommPoly:
    svars = tuple(sorted(p.order.variables))
    idx = {v: i for i, v in enumerate(p.order.variables)}
    terms = {}
    for m, c in p.terms.items():
        terms[tuple(m[idx[v]] for v in svars)] = c
    return CommPoly.make(svars, terms)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _mono_divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_div(a: Mono, b: Mono) -> Mono:
    return tuple(x - y for x, y in zip(a, b))


def _mono_lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def _add_scaled(dst: dict[Mono, Fraction], src: dict[Mono, Fraction], mono: Mono, coeff: Fraction):
    for m, c in src.items():
        k = _mono_mul(m, mono)
        s = dst.get(k, Fraction(0)) + c * coeff
        if s == 0:
            dst.pop(k, None)
        else:
            dst[k] = s


def reduce_poly(p: Poly, basis: Sequence[Poly]) -> Poly:
    """Full normal form of p modulo basis."""
    order = p.order
    work = dict(p.terms)
    out: dict[Mono, Fraction] = {}
    leads = [(g.lead(), g) for g in basis if not g.is_zero()]
    while work:
        m = max(work, key=order.key)
        c = work[m]
        hit = None
        for (lm, lc), g in leads:
            if _mono_divides(lm, m):
                hit = (lm, lc, g)
                break
        if hit is None:
            out[m] = c
            del work[m]
        else:
            lm, lc, g = hit
            _add_scaled(work, g.terms, _mono_div(m, lm), -c / lc)
    return Poly(out, order)


def _primitive(p: Poly) -> Poly:
    if p.is_zero():
        return p
    den = math.lcm(*(c.denominator for c in p.terms.values()))
    num = math.gcd(*(abs(c.numerator) for c in p.terms.values()))
    scale = Fraction(den, num)
    if p.lead()[1] < 0:
        scale = -scale
    return Poly({m: c * scale for m, c in p.terms.items()}, p.order)


def _monic(p: Poly) -> Poly:
    if p.is_zero():
        return p
    _, lc = p.lead()
    return Poly({m: c / lc for m, c in p.terms.items()}, p.order)


def buchberger_internal(gens: list[Poly], order: MonomialOrder, max_pairs: Optional[int] = None, deadline: Optional[float] = None) -> list[Poly]:
    basis = [_primitive(g) for g in gens if not g.is_zero()]
    one = Poly({(0,) * len(order.variables): Fraction(1)}, order)
    if any(not any(g.lead()[0]) for g in basis):
        return [one]
    lead = [g.lead()[0] for g in basis]
    # normal selection: smallest lcm first, kept in a heap since leads are static
    heap: list[tuple] = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            heap.append((order.key(_mono_lcm(lead[i], lead[j])), i, j))
    heapq.heapify(heap)
    done: set[tuple[int, int]] = set()
    reductions = 0
    while heap:
        _, i, j = heapq.heappop(heap)
        done.add((i, j))
        lcm = _mono_lcm(lead[i], lead[j])
        if _mono_mul(lead[i], lead[j]) == lcm:
            continue  # coprime leading monomials
        skip = False
        for k in range(len(basis)):
            if k in (i, j) or not _mono_divides(lead[k], lcm):
                continue
            ik, jk = tuple(sorted((i, k))), tuple(sorted((j, k)))
            if ik in done and jk in done:
                skip = True
                break
        if skip:
            continue
        reductions += 1
        if max_pairs is not None and reductions > max_pairs:
            raise BudgetExceeded("pair budget exhausted")
        if deadline is not None and time.time() > deadline:
            raise BudgetExceeded("time budget exhausted")
        mi, ci = lead[i], basis[i].terms[lead[i]]
        mj, cj = lead[j], basis[j].terms[lead[j]]
        s: dict[Mono, Fraction] = {}
        _add_scaled(s, basis[i].terms, _mono_div(lcm, mi), Fraction(1) / ci)
        _add_scaled(s, basis[j].terms, _mono_div(lcm, mj), Fraction(-1) / cj)
        r = reduce_poly(Poly(s, order), basis)
        if r.is_zero():
            continue
        r = _primitive(r)
        if not any(r.lead()[0]):
            return [one]  # a constant appeared, the ideal is the whole ring
        basis.append(r)
        lead.append(r.lead()[0])
        t = len(basis) - 1
        for k in range(t):
            heapq.heappush(heap, (order.key(_mono_lcm(lead[k], lead[t])), k, t))
    return _autoreduce(basis, order)


def _autoreduce(basis: list[Poly], order: MonomialOrder) -> list[Poly]:
    basis = [g for g in basis if not g.is_zero()]
    # drop generators whose lead is a multiple of another lead
    keep: list[Poly] = []
    leads = [g.lead()[0] for g in basis]
    for i, g in enumerate(basis):
        li = leads[i]
        if any(j != i and _mono_divides(leads[j], li) and (leads[j] != li or j < i) for j in range(len(basis))):
            continue
        keep.append(g)
    out: list[Poly] = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1 :]
        r = reduce_poly(g, others)
        if not r.is_zero():
            out.append(_monic(r))
    out.sort(key=lambda g: order.key(g.lead()[0]), reverse=True)
    return out


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple[CommPoly, ...]
    order: MonomialOrder


def buchberger(generators: Iterable[CommPoly], order: MonomialOrder, max_pairs: Optional[int] = None, deadline: Optional[float] = None) -> GroebnerBasis:
    gens = [to_internal(g, order) for g in generators]
    basis = buchberger_internal(gens, order, max_pairs, deadline)
    return GroebnerBasis(tuple(to_comm(g) for g in basis), order)


def ideal_is_trivial(gb: GroebnerBasis) -> bool:
    return any(g.is_constant() and not g.is_zero() for g in gb.generators)


def _fresh_var(taken: Iterable[str]) -> str:
    taken = set(taken)
    if "z" not in taken:
        return "z"
    k = 0
    while "z%d" % k in taken:
        k += 1
    return "z%d" % k


def _collect_vars(polys: Iterable[CommPoly], declared: Sequence[str] = ()) -> list[str]:
    vs = set(declared)
    for p in polys:
        vs |= p.support_vars()
    return sorted(vs)


def radical_member(f0: CommPoly, generators: Sequence[CommPoly], max_pairs: Optional[int] = None, deadline: Optional[float] = None) -> bool:
    if f0.is_zero():
        return True
    variables = _collect_vars(list(generators) + [f0])
    z = _fresh_var(variables)
    zpoly = CommPoly.var(z)
    gens = list(generators) + [CommPoly.const(1) - zpoly * f0]
    order = grevlex_order(variables + [z])
    return ideal_is_trivial(buchberger(gens, order, max_pairs, deadline))


@dataclass(frozen=True)
class AlgebraicSystem:
    equations: tuple[CommPoly, ...]
    inequation: Optional[CommPoly]
    variables: tuple[str, ...]

    def __post_init__(self):
        polys = list(self.equations) + ([self.inequation] if self.inequation is not None else [])
        for p in polys:
            extra = p.support_vars() - set(self.variables)
            assert not extra, "system polynomial mentions undeclared variables: %s" % sorted(extra)


def system(equations: Iterable[CommPoly], inequation: Optional[CommPoly] = None, variables: Optional[Sequence[str]] = None) -> AlgebraicSystem:
    eqs = tuple(equations)
    if variables is None:
        variables = _collect_vars(list(eqs) + ([inequation] if inequation is not None else []))
    return AlgebraicSystem(eqs, inequation, tuple(variables))


def _subst_var(p: CommPoly, v: str, value: CommPoly) -> CommPoly:
    if v not in p.support_vars():
        return p
    images = {name: CommPoly.var(name) for name in p.vars}
    images[v] = value
    return p.subst(images)


class _Unsat(Exception):
    pass


def _presolve(eqs: list[CommPoly], neq: Optional[CommPoly], variables: list[str]):
    """Eliminate variables that occur linearly with constant coefficient.

    Returns (eqs, neq, variables, assignments); assignments map eliminated
    variables to CommPoly expressions in surviving variables.  Raises _Unsat
    on a visibly inconsistent equation.
    """
    eqs = [e for e in eqs if not e.is_zero()]
    assignments: dict[str, CommPoly] = {}
    changed = True
    while changed:
        changed = False
        for e in eqs:
            if e.is_zero():
                continue
            if e.is_constant():
                raise _Unsat
            for v in sorted(e.support_vars()):
                if e.degree_in(v) != 1:
                    continue
                coeff = e.coefficient_of(v, 1)
                if not coeff.is_constant():
                    continue
                c = coeff.constant_value()
                rest = e - CommPoly.var(v) * c
                value = rest.scale(Fraction(-1) / c)
                eqs = [x for x in (_subst_var(f, v, value) for f in eqs) if not x.is_zero()]
                if neq is not None:
                    neq = _subst_var(neq, v, value)
                for w in list(assignments):
                    assignments[w] = _subst_var(assignments[w], v, value)
                assignments[v] = value
                variables = [w for w in variables if w != v]
                changed = True
                break
            if changed:
                break
    for e in eqs:
        if e.is_constant() and not e.is_zero():
            raise _Unsat
    return eqs, neq, variables, assignments


def _interreduce_rows(eqs: list[CommPoly]) -> list[CommPoly]:
    """Gaussian elimination treating monomials as columns.

    Coefficient extraction tends to emit many linearly dependent equations;
    collapsing them first keeps the pair queue small.  The span, and hence
    the ideal, is unchanged.
    """
    if len(eqs) <= 1:
        return [e for e in eqs if not e.is_zero()]
    vset: set[str] = set()
    for e in eqs:
        vset |= set(e.vars)
    vars = tuple(sorted(vset))
    key = lambda m: (sum(m), m)
    pivots: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
    for e in eqs:
        row = dict(e.with_vars(vars).terms)
        while row:
            lm = max(row, key=key)
            piv = pivots.get(lm)
            if piv is None:
                c = row[lm]
                pivots[lm] = {m: cc / c for m, cc in row.items()}
                break
            c = row.pop(lm)
            for m, cc in piv.items():
                if m == lm:
                    continue
                s = row.get(m, Fraction(0)) - c * cc
                if s == 0:
                    row.pop(m, None)
                else:
                    row[m] = s
    for lm in sorted(pivots, key=key):
        row = pivots[lm]
        hit = True
        while hit:
            hit = False
            for m in sorted((m for m in row if m != lm and m in pivots), key=key, reverse=True):
                c = row.pop(m)
                for m2, cc in pivots[m].items():
                    if m2 == m:
                        continue
                    s = row.get(m2, Fraction(0)) - c * cc
                    if s == 0:
                        row.pop(m2, None)
                    else:
                        row[m2] = s
                hit = True
                break
    out = [CommPoly.make(vars, row) for _, row in sorted(pivots.items(), key=lambda kv: key(kv[0]))]
    return [e for e in out if not e.is_zero()]


def solvable(sys: AlgebraicSystem, max_pairs: Optional[int] = None, deadline: Optional[float] = None) -> bool:
    """Common zero over the algebraic closure with the inequation nonzero."""
    try:
        eqs, neq, variables, _ = _presolve(list(sys.equations), sys.inequation, list(sys.variables))
    except _Unsat:
        return False
    eqs = _interreduce_rows(eqs)
    if any(e.is_constant() and not e.is_zero() for e in eqs):
        return False
    if neq is not None:
        if neq.is_zero():
            return False
        if neq.is_constant():
            neq = None
    if neq is None:
        if not eqs:
            return True
        return not ideal_is_trivial(buchberger(eqs, grevlex_order(variables), max_pairs, deadline))
    return not radical_member(neq, eqs, max_pairs, deadline)


def eliminate(generators: Sequence[CommPoly], keep: Iterable[str], max_pairs: Optional[int] = None) -> list[CommPoly]:
    keep = set(keep)
    variables = _collect_vars(generators)
    drop = [v for v in variables if v not in keep]
    order = block_order(drop, [v for v in variables if v in keep])
    gb = buchberger(generators, order, max_pairs)
    return [g for g in gb.generators if g.support_vars() <= keep]


_GRID = [Fraction(v) for v in (1, 0, -1, 2, -2)] + [Fraction(1, 2), Fraction(-1, 2), Fraction(3), Fraction(-3)]


def _univariate_in(p: CommPoly, v: str) -> Optional[UniPoly]:
    if p.support_vars() <= {v}:
        return UniPoly.from_comm(p, v) if not p.is_zero() else None
    return None


def _search_point(eqs: list[CommPoly], neq: Optional[CommPoly], variables: list[str], nodes: list[int], max_pairs: Optional[int], max_nodes: int, deadline: Optional[float], use_gb: bool) -> Optional[dict[str, Fraction]]:
    nodes[0] += 1
    if nodes[0] > max_nodes:
        raise BudgetExceeded("rational point search budget exhausted")
    if deadline is not None and time.time() > deadline:
        raise BudgetExceeded("time budget exhausted")
    try:
        eqs, neq, variables, assignments = _presolve(eqs, neq, variables)
    except _Unsat:
        return None
    if neq is not None and neq.is_zero():
        return None

    def finish(point: dict[str, Fraction]) -> dict[str, Fraction]:
        for w, expr in assignments.items():
            point[w] = expr.evaluate(point)
        return point

    if not variables:
        return finish({})
    eqs = _interreduce_rows(eqs)
    if any(e.is_constant() and not e.is_zero() for e in eqs):
        return None
    basis = list(eqs)
    if use_gb and eqs:
        # lex bases carry eliminants but blow up in many variables
        order = lex_order(variables) if len(variables) <= 4 else grevlex_order(variables)
        gb = buchberger(eqs, order, max_pairs, deadline)
        if ideal_is_trivial(gb):
            return None
        basis = list(gb.generators)
    v = variables[-1]
    elim = None
    for w in reversed(variables):
        best = None
        for g in basis:
            uni = _univariate_in(g, w)
            if uni is not None and (best is None or uni.degree < best.degree):
                best = uni
        if best is not None and (elim is None or best.degree < elim.degree):
            v, elim = w, best
    if elim is not None:
        candidates = rational_roots(elim)
        if not candidates:
            return None
    else:
        # guessing into a short row triggers the longest propagation cascades
        short = min((e for e in basis if e.support_vars()),
                    key=lambda e: (len(e.terms), e.total_degree()), default=None)
        if short is not None:
            inside = [w for w in variables if w in short.support_vars()]
            if inside:
                v = inside[-1]
        candidates = list(_GRID)
    rest = [w for w in variables if w != v]
    for val in candidates:
        cval = CommPoly.const(val)
        sub_eqs = [_subst_var(e, v, cval) for e in basis]
        sub_neq = _subst_var(neq, v, cval) if neq is not None else None
        found = _search_point(sub_eqs, sub_neq, rest, nodes, max_pairs, max_nodes, deadline, use_gb)
        if found is not None:
            found[v] = val
            return finish(found)
    return None


def search_point(sys: AlgebraicSystem, max_pairs: Optional[int] = None, max_nodes: int = 4000, deadline: Optional[float] = None, use_gb: bool = True) -> Optional[dict[str, Fraction]]:
    """Grid and eliminant search without a solvability precheck.

    A returned point is always a verified solution with the inequation
    nonzero; None proves nothing.
    """
    try:
        found = _search_point(list(sys.equations), sys.inequation, list(sys.variables), [0], max_pairs, max_nodes, deadline, use_gb)
    except BudgetExceeded:
        return None
    if found is None:
        return None
    point = {v: found[v] for v in sys.variables}
    for e in sys.equations:
        assert e.evaluate(point) == 0, "search returned a non-solution"
    if sys.inequation is not None:
        assert sys.inequation.evaluate(point) != 0, "search returned a point on the inequation"
    return point


def rational_point(sys: AlgebraicSystem, max_pairs: Optional[int] = None) -> Optional[dict[str, Fraction]]:
    """Best-effort rational witness; None when none is found over the grid."""
    if not solvable(sys, max_pairs):
        raise ValueError("no solution exists")
    return search_point(sys, max_pairs)


def format_system(sys: AlgebraicSystem) -> str:
    from .commalg import format_comm

    lines = ["vars: " + " ".join(sys.variables)]
    for e in sys.equations:
        lines.append("eq: " + format_comm(e))
    if sys.inequation is not None:
        lines.append("neq: " + format_comm(sys.inequation))
    return "\n".join(lines)
