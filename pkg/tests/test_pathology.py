from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from valuegap.convex import liminf_along, subdiff_zero_membership
from valuegap.extended import POS_INF
from valuegap.pathology import (e, eval_pathology, lsc_witness, phi, refutation_points,
                                restricted_oracle, sample_domain, usc_witness)
from valuegap.sparse import SparseSeq

seqs = st.dictionaries(st.integers(1, 30), st.fractions(max_denominator=20).filter(lambda q: abs(q) < 100),
                       max_size=5).map(SparseSeq)


def test_phi_values():
    assert phi(e(3)) == 3
    assert phi(e(1) + e(2)) == 3
    assert phi(SparseSeq()) == 0


def test_phi_is_unbounded_on_the_unit_sphere():
    ratios = [phi(e(n)) / e(n).norm() for n in range(1, 101)]
    assert ratios == list(range(1, 101))


@given(seqs, seqs, st.fractions(max_denominator=9), st.fractions(max_denominator=9))
def test_phi_is_linear(x, y, a, b):
    assert phi(x * a + y * b) == a * phi(x) + b * phi(y)


@pytest.mark.parametrize("kind,x,expected", [
    ("g3", e(2, -1), Fraction(-2)),
    ("g3", e(2), POS_INF),
    ("g1", e(5, -1), Fraction(0)),
    ("g2", e(5, -1), Fraction(0)),
    ("g1", e(2), Fraction(2)),
    ("g2", e(2), POS_INF),
])
def test_closed_forms(kind, x, expected):
    assert eval_pathology(kind, x) == expected


def test_usc_witness_terms():
    x = e(1, -1)
    w = usc_witness(x)
    assert w(4) == e(1, -1) + e(4, Fraction(1, 4))
    for n in range(1, 30):
        assert phi(w(n)) == 0 and eval_pathology("g3", w(n)) == 0


def test_usc_witness_converges():
    x = e(3, -2)
    w = usc_witness(x)
    for n in (1, 5, 40):
        assert (w(n) - x).norm_sq() == Fraction(6, n) ** 2


def test_usc_witness_needs_negative_phi():
    with pytest.raises(ValueError, match="requires-negative-phi"):
        usc_witness(SparseSeq())


def test_usc_witness_refutes_upper_semicontinuity():
    x = e(1, -1)
    res = liminf_along(restricted_oracle("g3"), x, usc_witness(x), 32)
    assert not res.lsc_violated
    assert res.usc_violated and res.limsup_estimate == 0 and res.f_at_base == -1


def test_lsc_witness_terms():
    w = lsc_witness(SparseSeq())
    assert w(2) == e(2, Fraction(-1, 2))
    assert eval_pathology("g3", w(2)) == -1
    assert all(eval_pathology("g3", lsc_witness(e(1, -1))(n)) == -2 for n in range(1, 20))


def test_lsc_witness_needs_nonpositive_phi():
    with pytest.raises(ValueError, match="requires-nonpositive-phi"):
        lsc_witness(e(1))


@given(seqs)
def test_lsc_witness_drops_phi_by_one(x):
    if phi(x) > 0:
        x = -x
    w = lsc_witness(x)
    for n in (1, 2, 7, 31):
        assert eval_pathology("g3", w(n)) == phi(x) - 1


def test_lsc_violated_at_zero_with_gap_one():
    res = liminf_along(restricted_oracle("g3"), SparseSeq(), lsc_witness(SparseSeq()), 32)
    assert res.lsc_violated and res.f_at_base - res.liminf_estimate == 1


def test_g1_and_g2_vanish_together_on_the_domain():
    for x in sample_domain("g2", 100, 4):
        assert phi(x) <= 0
        assert eval_pathology("g1", x) == 0 == eval_pathology("g2", x)


@pytest.mark.parametrize("xstar", [SparseSeq(), e(1), e(2, -3), e(1, 2) + e(7, 5), e(3, Fraction(1, 9))])
def test_no_finitely_supported_subgradient_at_zero(xstar):
    res = subdiff_zero_membership(restricted_oracle("g3"), xstar, 10, extra_points=refutation_points(xstar))
    assert not res.accepted
    x = res.counterexample
    assert x.dot(xstar) > phi(x)
