"""Decision drivers for automorphic equivalence and semiinvariance.

Both questions reduce to the same skeleton.  Elements of the commutator
line are dispatched to a univariate gcd computation.  Everything else is
searched through valley-shaped degree sequences: each candidate shape is
turned into an algebraic system over the unknown factor coefficients, and
Groebner machinery decides solvability.  A rational solution is folded
back into a concrete automorphism and verified by direct application
before any positive verdict leaves this module.
"""

import heapq
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .autgroup import (
    TAU,
    Affine,
    AutWord,
    Tau,
    Triangular,
    apply,
    compose,
    format_aut,
    free_images,
    invert,
    theta,
)
from .commalg import (
    CommPoly,
    UniPoly,
    bivariate_gcd,
    euclid_gcd,
    partials,
    rational_roots,
    split_valuation,
)
from .freealg import (
    FREE_X,
    FREE_Y,
    FreePoly,
    Word,
    _rewrite,
    comm_power,
    quotient_degrees,
    v_membership,
    v_split,
)
from .groebner import (
    AlgebraicSystem,
    BudgetExceeded,
    format_system,
    search_point,
    solvable,
    system,
)
from .param import (
    ParamFreePoly,
    TriangularTemplate,
    expansion_cost,
    extract_equations,
    kill_above_degree,
    nondegeneracy,
    param_apply,
    specialize_aut,
    template_params,
)

EQUIVALENT = "EQUIVALENT"
NOT_EQUIVALENT = "NOT_EQUIVALENT"
SEMIINVARIANT = "SEMIINVARIANT"
NOT_SEMIINVARIANT = "NOT_SEMIINVARIANT"
UNKNOWN = "UNKNOWN"


@dataclass
class Budget:
    """Resource limits; blowing any of them withholds the verdict."""

    max_seqs: int = 300
    max_pairs: int = 60000
    timeout_secs: float = 120.0
    max_expansion: int = 300000

    def start(self) -> float:
        self._wall_end = time.time() + self.timeout_secs
        return time.monotonic()

    def timed_out(self, t0: float) -> bool:
        return time.monotonic() - t0 > self.timeout_secs

    def slice_deadline(self) -> float:
        """Wall-clock cutoff for one sequence; groebner deadlines use time.time()."""
        end = time.time() + max(2.0, self.timeout_secs / 8.0)
        return min(end, getattr(self, "_wall_end", end))


@dataclass
class Certificate:
    verdict: str
    witness: Optional[AutWord] = None
    witness_lambda: Optional[Fraction] = None
    witness_ideal: Optional[AlgebraicSystem] = None
    trace: list = field(default_factory=list)


def format_certificate(cert: Certificate) -> str:
    lines = ["RESULT: " + cert.verdict]
    if cert.witness is not None:
        lines.append("WITNESS: " + format_aut(cert.witness))
    if cert.witness_lambda is not None:
        lines.append("LAMBDA: " + str(cert.witness_lambda))
    if cert.witness_ideal is not None:
        lines.append("IDEAL:")
        lines.extend("  " + l for l in format_system(cert.witness_ideal).splitlines())
    for entry in cert.trace:
        lines.append("TRACE: " + entry)
    return "\n".join(lines)


# -- degree sequences ------------------------------------------------------


@dataclass(frozen=True)
class DegreeSequence:
    """Valley-shaped walk degrees d(-1), d(0), ..., d(n).

    valley_index points at the lowest level; flat marks a repeated bottom
    d(m) = d(m+1) inside the walk.  The end flags request an affine factor
    at the corresponding end of the factorization.
    """

    values: tuple
    valley_index: int
    flat: bool
    affine_start: bool
    affine_end: bool

    @property
    def n(self) -> int:
        return len(self.values) - 2

    def d(self, j: int) -> int:
        return self.values[j + 1]

    def describe(self) -> str:
        ends = ("a" if self.affine_start else "t") + ("a" if self.affine_end else "t")
        kind = "flat" if self.flat else "strict"
        return "n=%d %s m=%d ends=%s %s" % (self.n, self.values, self.valley_index, ends, kind)


def _descents(top: int, steps: int) -> list:
    # strictly decreasing chains top = c_0 > ... > c_steps >= 1
    if steps == 0:
        return [[top]]
    out = []
    for nxt in range(top - 1, 0, -1):
        for rest in _descents(nxt, steps - 1):
            out.append([top] + rest)
    return out


def _valley_chains(s: int, e: int, length: int) -> list:
    """Chains of `length` steps from s down to a bottom and back up to e.

    Returns (values, bottom position, has_flat) triples; the split into
    descents, optional repeat and ascents makes every chain appear once.
    """
    out = []
    for a in range(0, length + 1):
        for f in (0, 1):
            b = length - a - f
            if b < 0:
                continue
            for down in _descents(s, a):
                bottom = down[-1]
                flat_part = [bottom] if f else []
                if b == 0:
                    if bottom != e:
                        continue
                    out.append((down + flat_part, a, bool(f)))
                    continue
                if bottom >= e:
                    continue
                for mids in itertools.combinations(range(bottom + 1, e), b - 1):
                    out.append((down + flat_part + list(mids) + [e], a, bool(f)))
    return out


def _shape_sequences(d_start: int, d_end: int, affine_start: bool, affine_end: bool):
    """All sequences for one end shape, shorter n first then lexicographic."""
    n_max = d_start + d_end
    for n in range(0, n_max + 1):
        if n == 0:
            if affine_start == affine_end and (not affine_start or d_start == d_end):
                yield DegreeSequence((d_start, d_end), 0, False, affine_start, affine_end)
            continue
        lo = 0 if affine_start else -1
        hi = n - 1 if affine_end else n
        batch = []
        for chain, pos, has_flat in _valley_chains(d_start, d_end, hi - lo):
            vals = [0] * (n + 2)
            for t, c in enumerate(chain):
                vals[lo + t + 1] = c
            if affine_start:
                vals[0] = d_start
            if affine_end:
                vals[n + 1] = d_end
            j_v = lo + pos
            if has_flat and j_v >= 0:
                m, flat = j_v, True
            else:
                m, flat = max(j_v, 0), False
            batch.append(DegreeSequence(tuple(vals), m, flat, affine_start, affine_end))
        yield from sorted(batch, key=lambda q: q.values)


def enumerate_sequences(d_start: int, d_end: int, end_shape: tuple):
    """Stream of valley sequences for one end shape, deterministic order."""
    if d_start < 1 or d_end < 1:
        raise ValueError("degrees must be positive")
    affine_start, affine_end = end_shape
    return _shape_sequences(d_start, d_end, affine_start, affine_end)


_END_SHAPES = ((False, False), (True, False), (False, True), (True, True))


def _all_shapes(d_start: int, d_end: int):
    """Merge the four end-shape streams, shallow valleys before deep ones.

    Images of an equivalent pair rarely dip far below the end degrees, so
    trying shallow middles first finds witnesses sooner; refutations visit
    every shape anyway.
    """

    def tagged(idx, shape):
        for _, batch in itertools.groupby(_shape_sequences(d_start, d_end, *shape), key=lambda q: q.n):
            for q in sorted(batch, key=lambda q: (-min(q.values), q.values)):
                yield (q.n, -min(q.values), q.values, idx), q

    streams = [tagged(idx, shape) for idx, shape in enumerate(_END_SHAPES)]
    for _, q in heapq.merge(*streams, key=lambda item: item[0]):
        yield q


# -- walk states -----------------------------------------------------------


@dataclass
class _State:
    """Truncated image plus the commutator tail it has shed.

    poly holds the words of degree <= level; tails maps k to the
    coefficient riding on the k-th commutator power for 2k > level.
    """

    poly: ParamFreePoly
    tails: dict
    level: int


def _init_state(u: FreePoly) -> _State:
    rep, vpart = v_split(u)
    level = rep.max_degree()
    poly = ParamFreePoly.from_free(rep)
    tails = {}
    for k, c in vpart.items():
        if 2 * k <= level:
            poly = poly.add_scaled_free(comm_power(k), CommPoly.const(c))
        else:
            tails[k] = CommPoly.const(c)
    return _State(poly, tails, level)


def _state_tau(s: _State) -> _State:
    tails = {k: c * Fraction((-1) ** k) for k, c in s.tails.items()}
    return _State(s.poly.swap_letters(), tails, s.level)


def _state_scale(s: _State, c: CommPoly) -> _State:
    return _State(s.poly.scale(c), {k: t * c for k, t in s.tails.items()}, s.level)


def _step(state: _State, rho: TriangularTemplate, target: int, tag: str, theta_names: list, guard: int):
    """Apply one factor and pin the image below target, shedding tails."""
    if expansion_cost(rho, state.poly) > guard:
        raise BudgetExceeded("expansion guard tripped at factor %s" % tag)
    w = param_apply(rho, state.poly)
    cov = CommPoly.var(rho.xi) * CommPoly.var(rho.eta)
    carried = {k: c * cov ** k for k, c in state.tails.items()}
    for k in sorted(carried):
        if 2 * k <= target:
            w = w.add_scaled_free(comm_power(k), carried.pop(k))
    created = {}

    def fresh(s: int) -> str:
        name = "th_%s_%d" % (tag, s)
        created[s] = name
        theta_names.append(name)
        return name

    eqs = extract_equations(w, target, max(target, w.max_degree()), fresh)
    tails = dict(carried)
    for s, name in created.items():
        k = s // 2
        tails[k] = tails[k] + CommPoly.var(name) if k in tails else CommPoly.var(name)
    return _State(w.truncate(target), tails, target), eqs


def _equate(a: _State, b: _State) -> list:
    assert a.level == b.level
    eqs = []
    for word in sorted(set(a.poly.terms) | set(b.poly.terms), key=Word.key):
        eqs.append(a.poly.terms.get(word, CommPoly.zero()) - b.poly.terms.get(word, CommPoly.zero()))
    for k in sorted(set(a.tails) | set(b.tails)):
        eqs.append(a.tails.get(k, CommPoly.zero()) - b.tails.get(k, CommPoly.zero()))
    return [e for e in eqs if not e.is_zero()]


def _all_a_zero(u: FreePoly) -> bool:
    """True when no free letter x survives outside the commutator factors."""
    acc = {}
    for w, c in u.terms.items():
        for sym, q in _rewrite(tuple(w.letters())).items():
            if 0 in sym:
                acc[sym] = acc.get(sym, Fraction(0)) + c * q
    return all(q == 0 for q in acc.values())


def _irregular(u: FreePoly, qdeg: int) -> bool:
    # representative words above the quotient degree make the end meets lossy
    return v_split(u)[0].max_degree() > qdeg


# -- degree peeling --------------------------------------------------------
#
# High-degree inputs make the parametric towers explode, so before the
# sequence search each element is ground down by concrete reducing factors
# found one at a time.  Any factor found is an invertible change of
# coordinates: the orbit question is untouched while the degrees shrink.
# A failed hunt costs a few seconds and proves nothing, which is fine.
#
# When the degree actually came from below, the top homogeneous part is
# rigid: a degree-raising triangular factor collapses every maximal word
# into a power of y, and whatever acts afterwards is linear on that power.
# The top is then c * (b*x + d*y)^{tensor D}, up to one multiple of the
# commutator power when D is even, and b and d can be read off two
# coefficients.  Undoing the linear form first means the parametric hunt
# only ever needs a single triangular slot, which stays affordable even
# when the element itself is huge.


def _top_power_form(rep: FreePoly):
    """Concrete factors turning a tensor-power top into a y-led one.

    Returns None when the top is already y-led or does not factor.
    """
    D = rep.max_degree()
    top = {w: c for w, c in rep.terms.items() if w.length == D}
    half = comm_power(D // 2).terms if D >= 2 and D % 2 == 0 else {}

    def fits(scale, ratio, table):
        mu = None
        for w, coeff in table.items():
            want = scale * ratio ** w.deg_x()
            if coeff == want:
                continue
            pat = half.get(w)
            if pat is None:
                return False
            m = (coeff - want) / pat
            if mu is None:
                mu = m
            elif m != mu:
                return False
        return True

    def shear(ratio):
        # sends ratio*x + y to y while fixing x
        return Affine(Fraction(1), Fraction(0), Fraction(0),
                      -ratio, Fraction(1), Fraction(0))

    y_top = top.get(Word.from_letters((1,) * D))
    if y_top:
        b = top.get(Word.from_letters((0,) + (1,) * (D - 1)), Fraction(0)) / y_top
        if b != 0 and fits(y_top, b, top):
            return shear(b)
        return None
    x_top = top.get(Word.from_letters((0,) * D))
    if x_top:
        swapped = {w.swap(): c for w, c in top.items()}
        d = swapped.get(Word.from_letters((0,) + (1,) * (D - 1)), Fraction(0)) / x_top
        if d == 0:
            return TAU
        if fits(x_top, d, swapped):
            return compose(shear(d), TAU)
    return None


def _peel_build(rep: FreePoly, k: int, mixing: bool, guard: int):
    """Parametric image of rep under one reducing factor, with kill equations.

    Demanding that every coefficient above the current level vanishes keeps
    the reduced element available by direct specialization, so nothing big
    is recomputed once a point is found.
    """
    level = rep.max_degree()
    w = ParamFreePoly.from_free(rep)
    templates = []
    if mixing:
        inner = TriangularTemplate(0, 1)
        if expansion_cost(inner, w) > guard:
            raise BudgetExceeded("peel build too large")
        templates.append(inner)
        w = param_apply(inner, w).swap_letters()
    outer = TriangularTemplate(1, k)
    if expansion_cost(outer, w) > guard:
        raise BudgetExceeded("peel build too large")
    templates.append(outer)
    w = param_apply(outer, w)
    eqs = kill_above_degree(w, level - 1)
    return system(eqs, nondegeneracy(templates), template_params(templates)), templates, w


def _peel_point(sys: AlgebraicSystem, deadline: float):
    point = search_point(sys, 600, max_nodes=250,
                         deadline=min(deadline, time.time() + 1.5), use_gb=False)
    if point is not None:
        return point
    try:
        if not solvable(sys, 20000, deadline=min(deadline, time.time() + 2.0)):
            return None
    except BudgetExceeded:
        pass
    return search_point(sys, 20000, max_nodes=2500, deadline=deadline, use_gb=False)


def _peel_patterns(rep: FreePoly, tails, limits: "Budget", deadline: float,
                   mixing_ok: bool):
    level = rep.max_degree()
    guard = 5 * limits.max_expansion
    # a cap of 1 keeps the composite linear, which cannot lose the top
    for k in range(2, level + 1):
        for mixing in ((False, True) if mixing_ok else (False,)):
            if time.time() > deadline:
                return None
            try:
                sys, templates, img = _peel_build(rep, k, mixing, guard)
            except BudgetExceeded:
                continue
            point = _peel_point(sys, deadline)
            if point is None:
                continue
            if mixing:
                factors = [specialize_aut(templates[1], point), TAU,
                           specialize_aut(templates[0], point)]
            else:
                factors = [specialize_aut(templates[0], point)]
            sigma = compose(*factors)
            out = img.specialize(point)
            if out.max_degree() >= level:
                continue
            lam = theta(sigma)
            for j, c in tails.items():
                out = out + comm_power(j) * (c * lam ** j)
            return sigma, out
    return None


def _peel_once(w: FreePoly, rep: FreePoly, tails, limits: "Budget", deadline: float):
    lead = _top_power_form(rep)
    if lead is not None:
        g_rep, g_tails = v_split(apply(lead, w))
        hit = _peel_patterns(g_rep, g_tails, limits, deadline, mixing_ok=False)
        if hit is not None:
            sigma, out = hit
            return compose(sigma, lead), out
    return _peel_patterns(rep, tails, limits, deadline,
                          mixing_ok=rep.max_degree() <= 8)


def _peel_pair(u: FreePoly, v: FreePoly, limits: "Budget"):
    """Reduce both elements below the tower blowup threshold if possible."""
    pre_u: list = []
    pre_v: list = []
    trace: list = []
    su, sv = v_split(u), v_split(v)
    stop = time.time() + limits.timeout_secs * 0.45
    while time.time() < stop:
        du = su[0].max_degree()
        dv = sv[0].max_degree()
        sides = ("v", "u") if dv >= du else ("u", "v")
        hit = hit_side = None
        for side in sides:
            w, (rep, tails) = (v, sv) if side == "v" else (u, su)
            if rep.max_degree() < 4:  # small towers are cheaper to search directly
                continue
            slot = min(stop, time.time() + max(3.0, limits.timeout_secs / 10.0))
            hit = _peel_once(w, rep, tails, limits, slot)
            if hit is not None:
                hit_side = side
                break
        if hit is None:
            break
        sigma, out = hit
        if hit_side == "v":
            v, sv = out, v_split(out)
            pre_v.append(sigma)
        else:
            u, su = out, v_split(out)
            pre_u.append(sigma)
        trace.append("peel %s down to degree %d" % (hit_side, sv[0].max_degree()
                     if hit_side == "v" else su[0].max_degree()))
    return u, v, pre_u, pre_v, trace


# -- two-sided system construction -----------------------------------------


@dataclass
class _Plan:
    seq: DegreeSequence
    slots: dict  # j -> (template, inverted flag)

    def witness(self, point) -> AutWord:
        order = []
        for j in range(0, self.seq.n + 1):
            if j > 0:
                order.append(TAU)
            tpl, inv = self.slots[j]
            rho = specialize_aut(tpl, point)
            order.append(invert(rho) if inv else rho)
        return compose(*reversed(order))


def _u_side_cap(seq: DegreeSequence, j: int) -> int:
    if j == 0 and seq.affine_start:
        return 1
    return seq.d(j - 1)


def _v_side_cap(seq: DegreeSequence, j: int) -> int:
    if j == seq.n and seq.affine_end:
        return 1
    if j == 0 and seq.affine_start:
        return 1
    return max(seq.d(j), seq.d(j - 1))


def _build_equiv(u: FreePoly, v: FreePoly, seq: DegreeSequence, guard: int):
    if quotient_degrees(u)[0] != seq.d(-1) or quotient_degrees(v)[0] != seq.d(seq.n):
        raise ValueError("sequence mismatch")
    m, n = seq.valley_index, seq.n
    theta_names: list = []
    eqs: list = []
    templates: list = []
    slots: dict = {}

    def tri(idx: int, cap: int) -> TriangularTemplate:
        tpl = TriangularTemplate(idx, cap)
        templates.append(tpl)
        return tpl

    # descent from u through the slots below the valley
    w1 = _init_state(u)
    for j in range(0, m):
        if j > 0:
            w1 = _state_tau(w1)
        tpl = tri(j, _u_side_cap(seq, j))
        slots[j] = (tpl, False)
        w1, step_eqs = _step(w1, tpl, seq.d(j), "u%d" % j, theta_names, guard)
        eqs.extend(step_eqs)

    # descent from v through inverted slots down to the meet; in the strict
    # m = 0 case the last image must equal u itself, stray words included,
    # so that step keeps u's own level instead of the quotient degree
    v_stop = m + 1 if seq.flat else m
    w2 = _init_state(v)
    for j in range(n, v_stop - 1, -1):
        if j < n:
            w2 = _state_tau(w2)
        tpl = tri(j, _v_side_cap(seq, j))
        slots[j] = (tpl, True)
        target = seq.d(j - 1)
        if j == 0 and not seq.flat and m == 0:
            target = w1.level
        w2, step_eqs = _step(w2, tpl, target, "v%d" % j, theta_names, guard)
        eqs.extend(step_eqs)

    if seq.flat:
        # the valley factor stays on the u side and keeps its direction
        s = _state_tau(w1) if m > 0 else w1
        if m == 0 and _all_a_zero(u):
            cap = -1  # no free x to feed the p slot, so p may be dropped
        elif m == 0:
            cap = 1 if seq.affine_start else seq.d(-1)
        else:
            cap = seq.d(m - 1)
        tpl = tri(m, cap)
        slots[m] = (tpl, False)
        s, step_eqs = _step(s, tpl, seq.d(m), "f", theta_names, guard)
        eqs.extend(step_eqs)
        eqs.extend(_equate(_state_tau(s), w2))
    elif m > 0:
        eqs.extend(_equate(w2, _state_tau(w1)))
    else:
        eqs.extend(_equate(w2, w1))

    variables = template_params(templates) + sorted(theta_names)
    sys = system(eqs, nondegeneracy(templates), variables)
    return sys, _Plan(seq, slots)


def build_two_sided_system(u: FreePoly, v: FreePoly, seq: DegreeSequence) -> AlgebraicSystem:
    sys, _ = _build_equiv(u, v, seq, Budget().max_expansion)
    return sys


# -- commutator line case --------------------------------------------------


def _unipoly_in(p: UniPoly, name: str) -> CommPoly:
    out = CommPoly.zero()
    for i, c in enumerate(p.coeffs):
        out = out + CommPoly.const(c) * CommPoly.var(name) ** i
    return out


def case1_decide(lam: list, mu: list) -> Certificate:
    """Equivalence inside the commutator line via a common scale factor."""
    size = max(len(lam), len(mu), 1)
    lam = list(lam) + [Fraction(0)] * (size - len(lam))
    mu = list(mu) + [Fraction(0)] * (size - len(mu))
    if lam == mu:
        return Certificate(EQUIVALENT, witness=AutWord.identity(), trace=["equal elements"])
    ts = []
    for k in range(size):
        if lam[k] == 0 and mu[k] == 0:
            continue
        t = UniPoly([-mu[k]] + [0] * (k - 1) + [lam[k]]) if k else UniPoly([lam[0] - mu[0]])
        if not t.is_zero():
            ts.append(t)
    g = ts[0]
    for t in ts[1:]:
        g = euclid_gcd(g, t)
    _, g = split_valuation(g)  # the scale factor must be invertible
    if g.degree < 1:
        return Certificate(NOT_EQUIVALENT, trace=["no common nonzero scale factor"])
    roots = rational_roots(g)
    if not roots:
        ideal = system([_unipoly_in(g, "om")], CommPoly.var("om"), ["om"])
        return Certificate(EQUIVALENT, witness_ideal=ideal,
                           trace=["scale factor exists over the closure only"])
    om0 = Fraction(1) if Fraction(1) in roots else sorted(roots, key=lambda r: (abs(r), r < 0))[0]
    for k in range(size):
        assert lam[k] * om0 ** k == mu[k]
    wit = compose(Triangular(1, UniPoly(), om0, 0))
    return Certificate(EQUIVALENT, witness=wit, trace=["scale factor %s" % om0])


# -- equivalence driver ----------------------------------------------------


def verify_witness(phi, u, v) -> bool:
    return apply(phi, u) == v


def _is_identity(phi) -> bool:
    ix, iy = free_images(phi)
    return ix == FREE_X and iy == FREE_Y


def _clip_trace(trace: list, cap: int = 64) -> list:
    if len(trace) <= cap:
        return trace
    return trace[:cap] + ["(%d more lines)" % (len(trace) - cap)]


def _solve_sequence(sys: AlgebraicSystem, limits: "Budget"):
    """Point-first attack on one sequence system.

    A verified point proves solvability without an exact basis, which is
    the common case for genuinely equivalent inputs.  Returns (sat, point);
    BudgetExceeded from the exact check propagates to the caller, so a
    sequence whose basis outgrows its time slice counts as skipped.
    """
    slice_end = limits.slice_deadline()
    point = search_point(sys, min(limits.max_pairs, 600), max_nodes=150,
                         deadline=min(slice_end, time.time() + 1.5), use_gb=False)
    if point is not None:
        return True, point
    try:
        sat = solvable(sys, limits.max_pairs, deadline=min(slice_end, time.time() + 4.0))
    except BudgetExceeded:
        # refutation resists; a deeper probe often settles it positively
        point = search_point(sys, min(limits.max_pairs, 2000), max_nodes=1500,
                             deadline=min(slice_end, time.time() + 8.0), use_gb=False)
        if point is not None:
            return True, point
        sat = solvable(sys, limits.max_pairs, deadline=slice_end)
    if not sat:
        return False, None
    point = search_point(sys, limits.max_pairs, deadline=slice_end)
    if point is None:
        # solvable is settled; a witness is worth one more dig
        point = search_point(sys, min(limits.max_pairs, 2000), max_nodes=4000,
                             deadline=time.time() + 6.0, use_gb=False)
    return True, point


def equiv_decide(u: FreePoly, v: FreePoly, limits: Optional[Budget] = None) -> Certificate:
    limits = limits or Budget()
    lam_u, lam_v = v_membership(u), v_membership(v)
    if lam_u is not None and lam_v is not None:
        cert = case1_decide(lam_u, lam_v)
        if cert.witness is not None:
            assert verify_witness(cert.witness, u, v)
        return cert
    if lam_u is not None or lam_v is not None:
        return Certificate(NOT_EQUIVALENT,
                           trace=["exactly one element lies in the commutator line"])
    if u == v:
        return Certificate(EQUIVALENT, witness=AutWord.identity(), trace=["equal elements"])

    t0 = limits.start()
    u1, v1, pre_u, pre_v, trace = _peel_pair(u, v, limits)

    def lift(phi0) -> AutWord:
        return compose(*([invert(s) for s in pre_v] + [phi0] + list(reversed(pre_u))))

    if (pre_u or pre_v) and u1 == v1:
        phi = lift(AutWord.identity())
        assert verify_witness(phi, u, v)
        trace.append("equal after peeling")
        return Certificate(EQUIVALENT, witness=phi, trace=_clip_trace(trace))

    du, dv = quotient_degrees(u1)[0], quotient_degrees(v1)[0]
    u_pinned = _all_a_zero(u1)  # the first factor then cannot move the degree
    v_pinned = _all_a_zero(v1)
    irregular = _irregular(u1, du) or _irregular(v1, dv)
    tried = skipped = 0
    fallback = None
    for seq in _all_shapes(du, dv):
        if u_pinned and seq.d(0) != seq.d(-1):
            continue
        if v_pinned and seq.d(seq.n - 1) != seq.d(seq.n):
            continue
        if tried + skipped >= limits.max_seqs or limits.timed_out(t0):
            trace.append("budget: stopped after %d sequences" % (tried + skipped))
            if fallback is not None:
                return Certificate(EQUIVALENT, witness_ideal=fallback, trace=_clip_trace(trace))
            return Certificate(UNKNOWN, trace=_clip_trace(trace))
        try:
            sys, plan = _build_equiv(u1, v1, seq, limits.max_expansion)
            sat, point = _solve_sequence(sys, limits)
            if not sat:
                tried += 1
                trace.append(seq.describe() + " -> unsolvable")
                continue
        except BudgetExceeded as e:
            skipped += 1
            trace.append(seq.describe() + " -> skipped (%s)" % e)
            continue
        if point is None:
            # solvable over the closure; keep hunting for a rational witness
            tried += 1
            trace.append(seq.describe() + " -> solvable, no rational point yet")
            if fallback is None:
                fallback = sys
            continue
        trace.append(seq.describe() + " -> solvable")
        phi = lift(plan.witness(point))
        assert verify_witness(phi, u, v)
        return Certificate(EQUIVALENT, witness=phi, trace=_clip_trace(trace))
    if fallback is not None:
        trace.append("solvable over the closure; no rational witness found")
        return Certificate(EQUIVALENT, witness_ideal=fallback, trace=_clip_trace(trace))
    if skipped:
        trace.append("budget: %d sequences skipped, verdict withheld" % skipped)
        return Certificate(UNKNOWN, trace=_clip_trace(trace))
    if irregular:
        trace.append("degree-irregular input; exhaustion is not conclusive")
        return Certificate(UNKNOWN, trace=_clip_trace(trace))
    trace.append("all %d sequences exhausted" % tried)
    return Certificate(NOT_EQUIVALENT, trace=_clip_trace(trace))


# -- semiinvariance --------------------------------------------------------


SHEAR = Triangular(1, UniPoly([0, 0, 1]), 1, 0)  # (x + y^2, y)

_MID_INDEX = 999  # never collides with walk slot indices


def _scalar_ratio(img, u) -> Optional[Fraction]:
    if isinstance(u, CommPoly):
        img, u = img.with_vars(("x", "y")), u.with_vars(("x", "y"))
        w = min(u.terms)
    else:
        w = min(u.terms, key=Word.key)
    lam = img.terms.get(w, Fraction(0)) / u.terms[w]
    return lam if img == u * lam else None


def _scaling_witness(u):
    """A coordinate scaling that eats u whole, when one exists."""
    for c in (Triangular(2, UniPoly(), 1, 0), Triangular(1, UniPoly(), 2, 0)):
        lam = _scalar_ratio(apply(c, u), u)
        if lam is not None:
            return compose(c), lam
    return None


def _build_eigen(u: FreePoly, seq: DegreeSequence, mode: str, guard: int):
    """Eigen system for a conjugated middle factor along the walk of seq.

    Mode A conjugates one triangular factor, mode B a triangular factor
    followed by the swap; the walk is applied to u, the middle factor to
    the walked image, and the result must be a scalar multiple of it.
    """
    n = seq.n
    bottom = seq.d(n)
    theta_names: list = []
    eqs: list = []
    templates: list = []
    walk: list = []
    s = _init_state(u)
    for j in range(0, n + 1):
        if j > 0:
            s = _state_tau(s)
        flagged = (j == 0 and seq.affine_start) or (j == n and seq.affine_end)
        cap = 1 if flagged else max(seq.d(j - 1), seq.d(j))
        tpl = TriangularTemplate(j, cap)
        templates.append(tpl)
        walk.append(tpl)
        s, step_eqs = _step(s, tpl, seq.d(j), "w%d" % j, theta_names, guard)
        eqs.extend(step_eqs)
    s = _state_tau(s)

    mid = TriangularTemplate(_MID_INDEX, bottom if mode == "A" else 1)
    templates.append(mid)
    out, step_eqs = _step(s, mid, bottom, "m", theta_names, guard)
    eqs.extend(step_eqs)
    if mode == "B":
        out = _state_tau(out)
    eqs.extend(_equate(out, _state_scale(s, CommPoly.var("lam"))))

    variables = template_params(templates) + sorted(theta_names) + ["lam"]
    ineq = nondegeneracy(templates) * CommPoly.var("lam")
    return system(eqs, ineq, variables), walk, mid


def _eigen_witness(walk, mid, mode: str, point) -> AutWord:
    conj = []
    for tpl in walk:
        conj.extend([specialize_aut(tpl, point), TAU])
    middle = [specialize_aut(mid, point)] + ([TAU] if mode == "B" else [])
    back = [TAU if isinstance(f, Tau) else invert(f) for f in reversed(conj)]
    order = conj + middle + back
    return compose(*reversed(order))


def _id_branch_polys(mid: TriangularTemplate) -> list:
    outs = [CommPoly.var(mid.xi) - 1, CommPoly.var(mid.eta) - 1, CommPoly.var(mid.etap)]
    outs.extend(CommPoly.var(mid.om(k)) for k in range(mid.p_degree + 1))
    return outs


def _eigen_candidates(d: int) -> list:
    cands = []
    for bottom in range(1, d + 1):
        for idx, shape in enumerate(_END_SHAPES):
            for seq in _shape_sequences(d, bottom, *shape):
                # the restricted branch is far cheaper to solve, try it first
                for mode in ("B", "A"):
                    cands.append(((seq.n, bottom, seq.values, idx, mode == "A"), seq, mode))
    cands.sort(key=lambda c: c[0])
    return [(seq, mode) for _, seq, mode in cands]


def semiinv_decide(u: FreePoly, limits: Optional[Budget] = None) -> Certificate:
    limits = limits or Budget()
    if u.is_zero():
        raise ValueError("zero element")
    lam = v_membership(u)
    if lam is not None:
        active = [k for k, c in enumerate(lam) if c != 0]
        if len(active) == 1:
            k0 = active[0]
            wit = compose(Triangular(2, UniPoly(), 1, 0))
            lam0 = Fraction(2) ** k0
            trace = ["lambda = theta(phi)^%d for every phi; the witness scales x by 2" % k0]
        else:
            wit = compose(SHEAR)
            lam0 = Fraction(1)
            trace = ["fixed by every phi with theta(phi) = 1"]
        assert apply(wit, u) == u * lam0
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=lam0, trace=trace)
    scaled = _scaling_witness(u)
    if scaled is not None:
        wit, lam0 = scaled
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=lam0,
                           trace=["eaten whole by a coordinate scaling"])
    if _all_a_zero(u):
        wit = compose(SHEAR)
        assert apply(wit, u) == u
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=Fraction(1),
                           trace=["no free x outside commutators; a shear in y fixes the element"])
    if _all_a_zero(u.swap_letters()):
        wit = compose(TAU, SHEAR, TAU)
        assert apply(wit, u) == u
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=Fraction(1),
                           trace=["no free y outside commutators; a swapped shear fixes the element"])

    d = quotient_degrees(u)[0]
    irregular = _irregular(u, d)
    t0 = limits.start()
    tried = skipped = 0
    trace = []
    fallback = None
    for seq, mode in _eigen_candidates(d):
        if tried + skipped >= limits.max_seqs or limits.timed_out(t0):
            trace.append("budget: stopped after %d systems" % (tried + skipped))
            if fallback is not None:
                return Certificate(SEMIINVARIANT, witness_ideal=fallback, trace=_clip_trace(trace))
            return Certificate(UNKNOWN, trace=_clip_trace(trace))
        try:
            sys, walk, mid = _build_eigen(u, seq, mode, limits.max_expansion)
            hit = point = None
            if mode == "B":
                sat, point = _solve_sequence(sys, limits)
                if sat:
                    hit = sys
            else:
                # mode A admits the identity; demand some slot away from it
                if solvable(sys, limits.max_pairs, deadline=limits.slice_deadline()):
                    for g in _id_branch_polys(mid):
                        branch = system(sys.equations, sys.inequation * g, sys.variables)
                        sat, point = _solve_sequence(branch, limits)
                        if sat:
                            hit = branch
                            break
        except BudgetExceeded as e:
            skipped += 1
            trace.append(seq.describe() + " mode=%s -> skipped (%s)" % (mode, e))
            continue
        tried += 1
        if hit is None:
            trace.append(seq.describe() + " mode=%s -> no nontrivial solution" % mode)
            continue
        if point is None:
            trace.append(seq.describe() + " mode=%s -> solvable, no rational point yet" % mode)
            if fallback is None:
                fallback = hit
            continue
        trace.append(seq.describe() + " mode=%s -> solvable" % mode)
        phi = _eigen_witness(walk, mid, mode, point)
        lam0 = point["lam"]
        assert not _is_identity(phi)
        assert apply(phi, u) == u * lam0
        return Certificate(SEMIINVARIANT, witness=phi, witness_lambda=lam0,
                           trace=_clip_trace(trace))
    if fallback is not None:
        trace.append("solvable over the closure; no rational witness found")
        return Certificate(SEMIINVARIANT, witness_ideal=fallback, trace=_clip_trace(trace))
    if skipped:
        trace.append("budget: %d systems skipped, verdict withheld" % skipped)
        return Certificate(UNKNOWN, trace=_clip_trace(trace))
    if irregular:
        trace.append("degree-irregular input; exhaustion is not conclusive")
        return Certificate(UNKNOWN, trace=_clip_trace(trace))
    trace.append("all %d systems exhausted" % tried)
    return Certificate(NOT_SEMIINVARIANT, trace=_clip_trace(trace))


# -- commuting-variable engine ---------------------------------------------


class _PC:
    """Parametric polynomial in two commuting variables, exponents to coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {e: c for e, c in (terms or {}).items() if not c.is_zero()}

    @staticmethod
    def from_comm(u: CommPoly) -> "_PC":
        aligned = u.with_vars(("x", "y"))
        return _PC({e: CommPoly.const(c) for e, c in aligned.terms.items()})

    def __add__(self, other: "_PC") -> "_PC":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return _PC(out)

    def __mul__(self, other: "_PC") -> "_PC":
        out = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                e = (i1 + i2, j1 + j2)
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return _PC(out)

    def __pow__(self, k: int) -> "_PC":
        out = _PC({(0, 0): CommPoly.const(1)})
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: CommPoly) -> "_PC":
        return _PC({e: t * c for e, t in self.terms.items()})

    def swap(self) -> "_PC":
        return _PC({(j, i): c for (i, j), c in self.terms.items()})

    def truncate(self, cap: int) -> "_PC":
        return _PC({e: c for e, c in self.terms.items() if e[0] + e[1] <= cap})

    def size(self) -> int:
        return sum(len(c.terms) for c in self.terms.values())


def _pc_template_images(rho: TriangularTemplate) -> tuple:
    ix = {(1, 0): CommPoly.var(rho.xi)}
    for k in range(rho.p_degree + 1):
        ix[(0, k)] = CommPoly.var(rho.om(k))
    iy = {(0, 1): CommPoly.var(rho.eta), (0, 0): CommPoly.var(rho.etap)}
    return _PC(ix), _PC(iy)


def _pc_step(s: _PC, rho: TriangularTemplate, target: int, tag: str, guard: int):
    ix, iy = _pc_template_images(rho)
    pow_cache: dict = {}
    w = _PC({})
    for (i, j), c in s.terms.items():
        p = pow_cache.get(("x", i))
        if p is None:
            p = ix ** i
            pow_cache[("x", i)] = p
        q = pow_cache.get(("y", j))
        if q is None:
            q = iy ** j
            pow_cache[("y", j)] = q
        w = w + (p * q).scale(c)
        if w.size() > guard:
            raise BudgetExceeded("expansion guard tripped at factor %s" % tag)
    eqs = [c for e, c in sorted(w.terms.items()) if e[0] + e[1] > target]
    return w.truncate(target), eqs


def _pc_equate(a: _PC, b: _PC) -> list:
    eqs = []
    for e in sorted(set(a.terms) | set(b.terms)):
        eqs.append(a.terms.get(e, CommPoly.zero()) - b.terms.get(e, CommPoly.zero()))
    return [e for e in eqs if not e.is_zero()]


def _comm_degree(u: CommPoly) -> int:
    return u.with_vars(("x", "y")).total_degree()


def _x_free(u: CommPoly) -> bool:
    return all(e[0] == 0 for e in u.with_vars(("x", "y")).terms)


def _y_free(u: CommPoly) -> bool:
    return all(e[1] == 0 for e in u.with_vars(("x", "y")).terms)


def _build_comm_equiv(u: CommPoly, v: CommPoly, seq: DegreeSequence, guard: int):
    if _comm_degree(u) != seq.d(-1) or _comm_degree(v) != seq.d(seq.n):
        raise ValueError("sequence mismatch")
    m, n = seq.valley_index, seq.n
    eqs: list = []
    templates: list = []
    slots: dict = {}

    def tri(idx: int, cap: int) -> TriangularTemplate:
        tpl = TriangularTemplate(idx, cap)
        templates.append(tpl)
        return tpl

    w1 = _PC.from_comm(u)
    for j in range(0, m):
        if j > 0:
            w1 = w1.swap()
        tpl = tri(j, _u_side_cap(seq, j))
        slots[j] = (tpl, False)
        w1, step_eqs = _pc_step(w1, tpl, seq.d(j), "u%d" % j, guard)
        eqs.extend(step_eqs)

    v_stop = m + 1 if seq.flat else m
    w2 = _PC.from_comm(v)
    for j in range(n, v_stop - 1, -1):
        if j < n:
            w2 = w2.swap()
        tpl = tri(j, _v_side_cap(seq, j))
        slots[j] = (tpl, True)
        w2, step_eqs = _pc_step(w2, tpl, seq.d(j - 1), "v%d" % j, guard)
        eqs.extend(step_eqs)

    if seq.flat:
        s = w1.swap() if m > 0 else w1
        if m == 0 and _x_free(u):
            cap = -1
        elif m == 0:
            cap = 1 if seq.affine_start else seq.d(-1)
        else:
            cap = seq.d(m - 1)
        tpl = tri(m, cap)
        slots[m] = (tpl, False)
        s, step_eqs = _pc_step(s, tpl, seq.d(m), "f", guard)
        eqs.extend(step_eqs)
        eqs.extend(_pc_equate(s.swap(), w2))
    elif m > 0:
        eqs.extend(_pc_equate(w2, w1.swap()))
    else:
        eqs.extend(_pc_equate(w2, w1))

    sys = system(eqs, nondegeneracy(templates), template_params(templates))
    return sys, _Plan(seq, slots)


def comm_equiv_decide(u: CommPoly, v: CommPoly, limits: Optional[Budget] = None) -> Certificate:
    limits = limits or Budget()
    if u.is_constant() and v.is_constant():
        if u == v:
            return Certificate(EQUIVALENT, witness=AutWord.identity(), trace=["equal constants"])
        return Certificate(NOT_EQUIVALENT, trace=["distinct constants"])
    if u.is_constant() or v.is_constant():
        return Certificate(NOT_EQUIVALENT, trace=["exactly one element is constant"])
    if u == v:
        return Certificate(EQUIVALENT, witness=AutWord.identity(), trace=["equal elements"])

    du, dv = _comm_degree(u), _comm_degree(v)
    u_pinned, v_pinned = _x_free(u), _x_free(v)
    t0 = limits.start()
    tried = skipped = 0
    trace = []
    fallback = None
    for seq in _all_shapes(du, dv):
        if u_pinned and seq.d(0) != seq.d(-1):
            continue
        if v_pinned and seq.d(seq.n - 1) != seq.d(seq.n):
            continue
        if tried + skipped >= limits.max_seqs or limits.timed_out(t0):
            trace.append("budget: stopped after %d sequences" % (tried + skipped))
            if fallback is not None:
                return Certificate(EQUIVALENT, witness_ideal=fallback, trace=_clip_trace(trace))
            return Certificate(UNKNOWN, trace=_clip_trace(trace))
        try:
            sys, plan = _build_comm_equiv(u, v, seq, limits.max_expansion)
            sat, point = _solve_sequence(sys, limits)
            if not sat:
                tried += 1
                trace.append(seq.describe() + " -> unsolvable")
                continue
        except BudgetExceeded as e:
            skipped += 1
            trace.append(seq.describe() + " -> skipped (%s)" % e)
            continue
        if point is None:
            tried += 1
            trace.append(seq.describe() + " -> solvable, no rational point yet")
            if fallback is None:
                fallback = sys
            continue
        trace.append(seq.describe() + " -> solvable")
        phi = plan.witness(point)
        assert verify_witness(phi, u, v)
        return Certificate(EQUIVALENT, witness=phi, trace=_clip_trace(trace))
    if fallback is not None:
        trace.append("solvable over the closure; no rational witness found")
        return Certificate(EQUIVALENT, witness_ideal=fallback, trace=_clip_trace(trace))
    if skipped:
        trace.append("budget: %d sequences skipped, verdict withheld" % skipped)
        return Certificate(UNKNOWN, trace=_clip_trace(trace))
    trace.append("all %d sequences exhausted" % tried)
    return Certificate(NOT_EQUIVALENT, trace=_clip_trace(trace))


def _build_comm_eigen(u: CommPoly, seq: DegreeSequence, mode: str, guard: int):
    n = seq.n
    bottom = seq.d(n)
    eqs: list = []
    templates: list = []
    walk: list = []
    s = _PC.from_comm(u)
    for j in range(0, n + 1):
        if j > 0:
            s = s.swap()
        flagged = (j == 0 and seq.affine_start) or (j == n and seq.affine_end)
        cap = 1 if flagged else max(seq.d(j - 1), seq.d(j))
        tpl = TriangularTemplate(j, cap)
        templates.append(tpl)
        walk.append(tpl)
        s, step_eqs = _pc_step(s, tpl, seq.d(j), "w%d" % j, guard)
        eqs.extend(step_eqs)
    s = s.swap()

    mid = TriangularTemplate(_MID_INDEX, bottom if mode == "A" else 1)
    templates.append(mid)
    out, step_eqs = _pc_step(s, mid, bottom, "m", guard)
    eqs.extend(step_eqs)
    if mode == "B":
        out = out.swap()
    eqs.extend(_pc_equate(out, s.scale(CommPoly.var("lam"))))

    variables = template_params(templates) + ["lam"]
    ineq = nondegeneracy(templates) * CommPoly.var("lam")
    return system(eqs, ineq, variables), walk, mid


def comm_semiinv_decide(u: CommPoly, limits: Optional[Budget] = None) -> Certificate:
    limits = limits or Budget()
    if u.is_zero():
        raise ValueError("zero element")
    if u.is_constant():
        wit = compose(Triangular(2, UniPoly(), 1, 0))
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=Fraction(1),
                           trace=["constants are fixed by every map"])
    scaled = _scaling_witness(u)
    if scaled is not None:
        wit, lam0 = scaled
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=lam0,
                           trace=["eaten whole by a coordinate scaling"])
    if _x_free(u):
        wit = compose(SHEAR)
        assert apply(wit, u) == u
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=Fraction(1),
                           trace=["polynomial in y alone; a shear in y fixes it"])
    if _y_free(u):
        wit = compose(TAU, SHEAR, TAU)
        assert apply(wit, u) == u
        return Certificate(SEMIINVARIANT, witness=wit, witness_lambda=Fraction(1),
                           trace=["polynomial in x alone; a swapped shear fixes it"])

    d = _comm_degree(u)
    t0 = limits.start()
    tried = skipped = 0
    trace = []
    fallback = None
    for seq, mode in _eigen_candidates(d):
        if tried + skipped >= limits.max_seqs or limits.timed_out(t0):
            trace.append("budget: stopped after %d systems" % (tried + skipped))
            if fallback is not None:
                return Certificate(SEMIINVARIANT, witness_ideal=fallback, trace=_clip_trace(trace))
            return Certificate(UNKNOWN, trace=_clip_trace(trace))
        try:
            sys, walk, mid = _build_comm_eigen(u, seq, mode, limits.max_expansion)
            hit = point = None
            if mode == "B":
                sat, point = _solve_sequence(sys, limits)
                if sat:
                    hit = sys
            else:
                if solvable(sys, limits.max_pairs, deadline=limits.slice_deadline()):
                    for g in _id_branch_polys(mid):
                        branch = system(sys.equations, sys.inequation * g, sys.variables)
                        sat, point = _solve_sequence(branch, limits)
                        if sat:
                            hit = branch
                            break
        except BudgetExceeded as e:
            skipped += 1
            trace.append(seq.describe() + " mode=%s -> skipped (%s)" % (mode, e))
            continue
        tried += 1
        if hit is None:
            trace.append(seq.describe() + " mode=%s -> no nontrivial solution" % mode)
            continue
        if point is None:
            trace.append(seq.describe() + " mode=%s -> solvable, no rational point yet" % mode)
            if fallback is None:
                fallback = hit
            continue
        trace.append(seq.describe() + " mode=%s -> solvable" % mode)
        phi = _eigen_witness(walk, mid, mode, point)
        lam0 = point["lam"]
        assert not _is_identity(phi)
        assert apply(phi, u) == u * lam0
        return Certificate(SEMIINVARIANT, witness=phi, witness_lambda=lam0,
                           trace=_clip_trace(trace))
    if fallback is not None:
        trace.append("solvable over the closure; no rational witness found")
        return Certificate(SEMIINVARIANT, witness_ideal=fallback, trace=_clip_trace(trace))
    if skipped:
        trace.append("budget: %d systems skipped, verdict withheld" % skipped)
        return Certificate(UNKNOWN, trace=_clip_trace(trace))
    trace.append("all %d systems exhausted" % tried)
    return Certificate(NOT_SEMIINVARIANT, trace=_clip_trace(trace))


@dataclass
class HeuristicReport:
    positive: bool
    reason: str
    shared_factor: Optional[CommPoly] = None

    def describe(self) -> str:
        tag = "consistent with" if self.positive else "inconsistent with"
        return "heuristic (partial, gcd of partial derivatives): %s semiinvariance; %s" % (tag, self.reason)


def comm_semiinv_heuristic(u: CommPoly) -> HeuristicReport:
    """Partial check through the gcd of the two partial derivatives."""
    if u.is_constant():
        raise ValueError("constant element")
    w = u.with_vars(("x", "y"))
    ux, uy = partials(w)
    if ux.is_zero() or uy.is_zero():
        which = "y" if ux.is_zero() else "x"
        return HeuristicReport(True, "element depends on %s only" % which)
    g = bivariate_gcd(ux, uy)
    if g.is_constant():
        return HeuristicReport(False, "coprime partial derivatives")
    return HeuristicReport(True, "partial derivatives share a factor", shared_factor=g)
