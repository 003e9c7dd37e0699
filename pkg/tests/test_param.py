import itertools
import random
from fractions import Fraction

import pytest

from autoequiv.autgroup import TAU, Triangular, apply
from autoequiv.commalg import CommPoly, UniPoly
from autoequiv.freealg import FREE_X, FREE_Y, FreePoly, Word, comm_power, quotient_degrees, v_membership
from autoequiv.param import (
    AffineTemplate,
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

X = ParamFreePoly.from_free(FREE_X)
Y = ParamFreePoly.from_free(FREE_Y)


def test_template_naming():
    t = TriangularTemplate(1, 2)
    assert t.param_names() == ["xi1", "om1_0", "om1_1", "om1_2", "eta1", "etap1"]
    a = AffineTemplate(0)
    assert a.param_names() == ["ax0", "ay0", "ac0", "bx0", "by0", "bc0"]


def test_param_apply_examples():
    a = AffineTemplate(0)
    img = param_apply(a, X)
    assert img.terms[Word(1, 0)] == CommPoly.var("ax0")
    assert img.terms[Word(1, 1)] == CommPoly.var("ay0")
    assert img.terms[Word.empty()] == CommPoly.var("ac0")
    t = TriangularTemplate(1, 2)
    img = param_apply(t, X)
    assert img.terms[Word(1, 0)] == CommPoly.var("xi1")
    assert img.terms[Word.from_letters([1, 1])] == CommPoly.var("om1_2")
    u = ParamFreePoly.from_free(FREE_X * FREE_Y - FREE_Y * FREE_X)
    assert param_apply(TAU, u) == u.scale(-1)


def test_specialization_commutes():
    rng = random.Random(41)
    for _ in range(25):
        t = TriangularTemplate(0, rng.randint(0, 2))
        point = {name: Fraction(rng.randint(-3, 3)) for name in t.param_names()}
        if point[t.xi] == 0:
            point[t.xi] = Fraction(1)
        if point[t.eta] == 0:
            point[t.eta] = Fraction(2)
        u = FREE_X * FREE_Y + FREE_X * rng.randint(-2, 2) + FREE_Y ** 2
        sym = param_apply(t, ParamFreePoly.from_free(u)).specialize(point)
        conc = apply(specialize_aut(t, point), u)
        assert sym == conc


def test_extract_equations_balanced_example():
    w = ParamFreePoly(
        {
            Word.from_letters([0, 1]): CommPoly.var("d1"),
            Word.from_letters([1, 0]): CommPoly.var("d2"),
        }
    )
    eqs = extract_equations(w, 1, 4, lambda s: "th_%d" % s)
    th = CommPoly.var("th_2")
    assert set(eqs) == {CommPoly.var("d1") - th, CommPoly.var("d2") + th}


def test_extract_equations_unbalanced_and_within_target():
    w = ParamFreePoly({Word.from_letters([0, 0, 1]): CommPoly.var("d")})
    assert extract_equations(w, 2, 9, lambda s: "th_%d" % s) == [CommPoly.var("d")]
    w2 = ParamFreePoly({Word(1, 0): CommPoly.var("d")})
    assert extract_equations(w2, 1, 9, lambda s: "th_%d" % s) == []
    with pytest.raises(AssertionError, match="degree cap"):
        extract_equations(w, 2, 2, lambda s: "th_%d" % s)


def test_extract_equations_grid_oracle():
    # solving the equations forces the image degree down; violating them keeps it up
    t = TriangularTemplate(0, 2)
    u = ParamFreePoly.from_free(FREE_X + FREE_Y ** 2)
    img = param_apply(t, u)
    eqs = extract_equations(img, 1, 4, lambda s: "th_%d" % s)
    names = sorted(set(template_params([t])) | {v for e in eqs for v in e.support_vars()})
    grid = [Fraction(v) for v in (-1, 0, 1, 2)]
    checked_sat = checked_viol = 0
    for vals in itertools.product(grid, repeat=len(names)):
        point = dict(zip(names, vals))
        if point["xi0"] == 0 or point["eta0"] == 0:
            continue
        sat = all(e.evaluate(point) == 0 for e in eqs)
        conc = img.specialize(point)
        rep_deg = quotient_degrees(conc)[0] if v_membership(conc) is None else 0
        if sat:
            checked_sat += 1
            assert rep_deg <= 1
        elif rep_deg > 1:
            checked_viol += 1
    assert checked_sat and checked_viol


def test_fresh_theta_per_degree():
    w = ParamFreePoly(
        {
            Word.from_letters([0, 1]): CommPoly.var("a"),
            Word.from_letters([0, 1, 0, 1]): CommPoly.var("b"),
        }
    )
    eqs = extract_equations(w, 0, 4, lambda s: "th_%d" % s)
    vars_used = {v for e in eqs for v in e.support_vars()}
    assert "th_2" in vars_used and "th_4" in vars_used


def test_nondegeneracy():
    t = TriangularTemplate(1, 2, require_nonaffine=True)
    f = nondegeneracy([t])
    assert f == CommPoly.var("xi1") * CommPoly.var("eta1") * CommPoly.var("om1_2")
    a = AffineTemplate(0)
    f = nondegeneracy([a])
    assert f == CommPoly.var("ax0") * CommPoly.var("by0") - CommPoly.var("ay0") * CommPoly.var("bx0")
    assert nondegeneracy([]) == CommPoly.const(1)
    assert nondegeneracy([TAU]) == CommPoly.const(1)


def test_kill_above_degree():
    w = ParamFreePoly(
        {Word(1, 0): CommPoly.var("a"), Word.from_letters([0, 1, 1]): CommPoly.var("b")}
    )
    assert kill_above_degree(w, 2) == [CommPoly.var("b")]
    assert kill_above_degree(w, 3) == []


def test_expansion_cost():
    t = TriangularTemplate(0, 2)
    u = ParamFreePoly.from_free(FREE_X ** 3)
    # x image has 4 terms (xi*x, om_0, om_1*y, om_2*y^2)
    assert expansion_cost(t, u) == 64


def test_param_poly_ops():
    u = X + Y
    v = u - Y
    assert v == X
    w = (X + Y) * (X - Y)
    assert w.terms[Word.from_letters([0, 0])] == CommPoly.const(1)
    assert w.terms[Word.from_letters([0, 1])] == CommPoly.const(-1)
    c2 = comm_power(2)
    folded = ParamFreePoly.zero().add_scaled_free(c2, CommPoly.var("lam"))
    assert folded.terms[Word.from_letters([0, 1, 0, 1])] == CommPoly.var("lam")
    assert folded.swap_letters().terms[Word.from_letters([1, 0, 1, 0])] == CommPoly.var("lam")
    assert u.truncate(0).is_zero()
    assert u.degree_slice(1) == u
