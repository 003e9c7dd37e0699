import itertools
import random
from fractions import Fraction

import pytest

from autoequiv.autgroup import TAU, Affine, Triangular, apply, compose, invert, theta
from autoequiv.commalg import CommPoly, UniPoly
from autoequiv.decide import (
    EQUIVALENT,
    NOT_EQUIVALENT,
    SEMIINVARIANT,
    UNKNOWN,
    Budget,
    build_two_sided_system,
    case1_decide,
    comm_equiv_decide,
    comm_semiinv_decide,
    comm_semiinv_heuristic,
    enumerate_sequences,
    equiv_decide,
    semiinv_decide,
    verify_witness,
)
from autoequiv.freealg import FREE_X, FREE_Y, FreePoly, comm_power, v_split

X = FREE_X
Y = FREE_Y
CX = CommPoly.var("x")
CY = CommPoly.var("y")

F = Fraction


def shear(p_coeffs):
    return Triangular(1, UniPoly([F(c) for c in p_coeffs]), 1, 0)


# -- degree sequences ------------------------------------------------------


def test_sequences_1_1():
    seqs = list(enumerate_sequences(1, 1, (False, False)))
    assert [s.values for s in seqs] == [(1, 1)]
    assert not seqs[0].flat


def test_sequences_2_2_by_hand():
    # exhaustive listing for the plain end shape: no descent, one descent
    # meeting an ascent, and the flat bottom
    seqs = list(enumerate_sequences(2, 2, (False, False)))
    assert [s.values for s in seqs] == [(2, 2), (2, 1, 2), (2, 1, 1, 2)]
    assert [s.flat for s in seqs] == [False, False, True]


def test_sequences_are_valleys():
    rng = random.Random(7)
    for _ in range(40):
        ds, de = rng.randint(1, 4), rng.randint(1, 4)
        shape = (rng.random() < 0.5, rng.random() < 0.5)
        seen = set()
        for s in enumerate_sequences(ds, de, shape):
            assert s.n <= ds + de
            key = (s.values, s.valley_index, s.flat)
            assert key not in seen
            seen.add(key)
            vals = s.values
            m = s.valley_index
            for j in range(m):
                assert vals[j] >= vals[j + 1]
            for j in range(m + 1, len(vals) - 1):
                assert vals[j] <= vals[j + 1]


def test_sequence_order_deterministic():
    a = [s.values for s in enumerate_sequences(3, 2, (True, False))]
    b = [s.values for s in enumerate_sequences(3, 2, (True, False))]
    assert a == b
    assert a == sorted(a, key=lambda v: (len(v), v))


# -- case 1 ----------------------------------------------------------------


def test_case1_common_scale():
    cert = case1_decide([F(0), F(1), F(3)], [F(0), F(2), F(12)])
    assert cert.verdict == EQUIVALENT
    u = comm_power(1) + comm_power(2) * 3
    v = comm_power(1) * 2 + comm_power(2) * 12
    assert verify_witness(cert.witness, u, v)


def test_case1_constant_obstruction():
    cert = case1_decide([F(0), F(1)], [F(0), F(1), F(1)])
    assert cert.verdict == NOT_EQUIVALENT


def test_case1_equal_is_identity():
    cert = case1_decide([F(0), F(5)], [F(0), F(5)])
    assert cert.verdict == EQUIVALENT
    assert apply(cert.witness, X) == X and apply(cert.witness, Y) == Y


def test_case1_fractional_scale():
    cert = case1_decide([F(0), F(2)], [F(0), F(3)])
    assert cert.verdict == EQUIVALENT
    assert verify_witness(cert.witness, comm_power(1) * 2, comm_power(1) * 3)


def test_case1_zero_padding():
    assert case1_decide([F(0), F(0), F(2)], []).verdict == NOT_EQUIVALENT
    assert case1_decide([], []).verdict == EQUIVALENT


def test_case1_closure_only():
    # scale factor satisfies 2w^2 = 3, no rational root
    cert = case1_decide([F(0), F(0), F(2)], [F(0), F(0), F(3)])
    assert cert.verdict == EQUIVALENT
    assert cert.witness is None
    assert cert.witness_ideal is not None


# -- two-sided systems -----------------------------------------------------


def test_two_sided_identity_compatible():
    from autoequiv.groebner import search_point

    seq = next(iter(enumerate_sequences(1, 1, (False, False))))
    sys = build_two_sided_system(X, X, seq)
    assert search_point(sys, 2000) is not None


def test_two_sided_swap_needs_affine_end():
    from autoequiv.groebner import search_point

    seq = next(iter(enumerate_sequences(1, 1, (False, True))))
    sys = build_two_sided_system(X, Y, seq)
    assert search_point(sys, 4000) is not None


def test_two_sided_endpoint_mismatch():
    seq = next(iter(enumerate_sequences(3, 1, (False, False))))
    with pytest.raises(ValueError, match="sequence mismatch"):
        build_two_sided_system(X, Y, seq)


# -- equivalence driver ----------------------------------------------------


def test_equiv_case1_dispatch():
    cert = equiv_decide(comm_power(1), comm_power(1) * 2)
    assert cert.verdict == EQUIVALENT
    assert verify_witness(cert.witness, comm_power(1), comm_power(1) * 2)


def test_equiv_mixed_membership():
    cert = equiv_decide(comm_power(1), X)
    assert cert.verdict == NOT_EQUIVALENT
    cert = equiv_decide(X, comm_power(2))
    assert cert.verdict == NOT_EQUIVALENT


def test_equiv_triangular_image():
    v = X + Y * Y
    cert = equiv_decide(X, v)
    assert cert.verdict == EQUIVALENT
    assert verify_witness(cert.witness, X, v)


def test_equiv_coordinate_swap():
    cert = equiv_decide(X, Y)
    assert cert.verdict == EQUIVALENT
    assert verify_witness(cert.witness, X, Y)


def test_equiv_negative_by_exhaustion():
    cert = equiv_decide(X, X * X)
    assert cert.verdict == NOT_EQUIVALENT
    assert any("exhausted" in line for line in cert.trace)


def test_equiv_budget_unknown():
    cert = equiv_decide(X, X + Y * Y, Budget(max_seqs=0))
    assert cert.verdict == UNKNOWN


def test_equiv_round_trips_verified():
    rng = random.Random(23)
    for _ in range(5):
        u = X * Y - Y * rng.randint(1, 3) + X
        phi = compose(
            shear([0, rng.randint(-2, 2), rng.randint(1, 2)]),
            TAU,
            Affine(F(1), F(0), F(rng.randint(-1, 1)), F(rng.randint(-1, 1)), F(1), F(0)),
        )
        v = apply(phi, u)
        cert = equiv_decide(u, v)
        assert cert.verdict == EQUIVALENT
        assert verify_witness(cert.witness, u, v)


def test_equiv_symmetry():
    pairs = [
        (X, X + Y * Y),
        (X, X * X),
        (X * Y + Y, apply(shear([0, 0, 2]), X * Y + Y)),
    ]
    for u, v in pairs:
        assert equiv_decide(u, v).verdict == equiv_decide(v, u).verdict


def test_equiv_invariant_under_composition():
    psi = compose(shear([0, 1, 1]), TAU)
    for u, v in [(X, X + Y * Y), (X, X * X)]:
        base = equiv_decide(u, v).verdict
        moved = equiv_decide(apply(psi, u), apply(psi, v)).verdict
        assert base == moved


def test_equiv_peels_high_degree_images():
    phi = compose(shear([0, 1, 2]), Affine(F(1), F(0), F(1), F(2), F(1), F(0)))
    u = X * Y + Y
    v = apply(phi, u)
    assert v_split(v)[0].max_degree() >= 4
    cert = equiv_decide(u, v)
    assert cert.verdict == EQUIVALENT
    assert verify_witness(cert.witness, u, v)
    assert any("peel" in line for line in cert.trace)


# -- semiinvariants --------------------------------------------------------


def test_semiinv_zero_rejected():
    with pytest.raises(ValueError, match="zero element"):
        semiinv_decide(FreePoly.zero())


def test_semiinv_commutator_square():
    cert = semiinv_decide(comm_power(2))
    assert cert.verdict == SEMIINVARIANT
    assert cert.witness_lambda == theta(cert.witness) ** 2
    assert apply(cert.witness, comm_power(2)) == comm_power(2) * cert.witness_lambda


def test_semiinv_coordinate():
    cert = semiinv_decide(X)
    assert cert.verdict == SEMIINVARIANT
    assert cert.witness_lambda not in (None, 0, 1)
    assert apply(cert.witness, X) == X * cert.witness_lambda


def test_semiinv_y_only_element():
    u = Y * Y + Y
    cert = semiinv_decide(u)
    assert cert.verdict == SEMIINVARIANT
    assert apply(cert.witness, u) == u * cert.witness_lambda


def test_semiinv_conjugated_coordinate():
    rng = random.Random(11)
    for _ in range(2):
        psi = compose(shear([0, rng.randint(-2, 2), rng.randint(1, 2)]), TAU)
        u = apply(invert(psi), X)
        cert = semiinv_decide(u)
        assert cert.verdict == SEMIINVARIANT
        assert apply(cert.witness, u) == u * cert.witness_lambda


# -- commutative analogues -------------------------------------------------


def test_comm_equiv_examples():
    cert = comm_equiv_decide(CX, CX + CY ** 3)
    assert cert.verdict == EQUIVALENT
    assert cert.witness is not None
    cert = comm_equiv_decide(CX, CX * CY)
    assert cert.verdict == NOT_EQUIVALENT


def test_comm_equiv_round_trip():
    from autoequiv.commalg import substitute

    u = CX * CX * CY
    v = substitute(u, CX + CY ** 2, CY)
    cert = comm_equiv_decide(u, v)
    assert cert.verdict == EQUIVALENT


def test_comm_equiv_constants():
    assert comm_equiv_decide(CommPoly.const(1), CommPoly.const(1)).verdict == EQUIVALENT
    assert comm_equiv_decide(CommPoly.const(1), CommPoly.const(2)).verdict == NOT_EQUIVALENT


def test_comm_semiinv_monomial():
    cert = comm_semiinv_decide(CX * CY)
    assert cert.verdict == SEMIINVARIANT
    assert cert.witness_lambda is not None


def test_heuristic_reports():
    r = comm_semiinv_heuristic(CY ** 3 + CY)
    assert r.positive and "only" in r.reason
    r = comm_semiinv_heuristic(CX ** 6)
    assert r.positive
    r = comm_semiinv_heuristic(CX + CY ** 2)
    assert not r.positive
    with pytest.raises(ValueError):
        comm_semiinv_heuristic(CommPoly.const(3))
