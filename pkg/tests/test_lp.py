import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lp_instances import feasible_bounded, instances
from valuegap import kretschmer
from valuegap.extended import NEG_INF, POS_INF, ExtendedReal
from valuegap.lp import (DualityReport, FiniteLP, LPDimensionError, certify, dual_multipliers_in_dual_variables,
                         dual_of, is_dual_feasible, is_farkas_certificate, is_improving_ray, solve,
                         subgradient_check)


def test_one_variable():
    sol = solve(FiniteLP.build("min", [1], [[1]], [1]))
    assert sol.status == "optimal" and sol.value == 1 and sol.dual == [1]


def test_two_constraints_vertex():
    lp = FiniteLP.build("min", [1, 1], [[1, 2], [2, 1]], [2, 2])
    sol = solve(lp)
    assert sol.value == Fraction(4, 3)
    assert sol.primal == [Fraction(2, 3), Fraction(2, 3)]
    # vertex enumeration: (0, 2), (2/3, 2/3), (2, 0)
    vertices = [(0, 2), (Fraction(2, 3), Fraction(2, 3)), (2, 0)]
    assert sol.value == min(x + y for x, y in vertices)


def test_infeasible_has_farkas_certificate():
    lp = FiniteLP.build("min", [0], [[0]], [1])
    sol = solve(lp)
    assert sol.status == "infeasible" and sol.value == POS_INF
    assert is_farkas_certificate(lp, sol.farkas)


def test_infeasible_pair_of_rows():
    lp = FiniteLP.build("max", [1, 1], [[1, 1], [1, 1]], [3, 1], [">=", "<="])
    sol = solve(lp)
    assert sol.status == "infeasible" and sol.value == NEG_INF
    assert is_farkas_certificate(lp, sol.farkas)


def test_unbounded_has_ray():
    lp = FiniteLP.build("min", [-1, 0], [[1, -1]], [0])
    sol = solve(lp)
    assert sol.status == "unbounded" and sol.value == NEG_INF
    assert is_improving_ray(lp, sol.ray)


def test_free_variables_and_equalities():
    lp = FiniteLP.build("max", [1, 2], [[1, 1], [1, -1]], [4, 1], ["<=", "="], ["free", "nonneg"])
    sol = solve(lp)
    dsol = solve(dual_of(lp))
    assert sol.value == dsol.value
    assert sol.primal == [Fraction(1), Fraction(0)] or lp.objective(sol.primal) == sol.value.value


def test_dimension_mismatch():
    with pytest.raises(LPDimensionError, match="dimension-mismatch|rows|entries"):
        solve(FiniteLP.build("min", [1, 2], [[1]], [1]))
    with pytest.raises(LPDimensionError):
        FiniteLP.build("min", [1], [[1]], [1]).with_rhs([1, 2])


def test_dual_of_one_variable():
    d = dual_of(FiniteLP.build("min", [1], [[1]], [1]))
    assert d.direction == "max" and d.c == (1,) and d.G == ((1,),) and d.h == (1,)
    assert d.senses == ("<=",) and d.bounds == ("nonneg",)


def test_dual_of_kretschmer_primal():
    p = kretschmer.KretschmerProblem(2, kretschmer.GridFn.constant(4))
    primal = kretschmer.discretize_primal(p)
    assert solve(primal).value == 2
    assert solve(dual_of(primal)).value == 2
    assert solve(kretschmer.discretize_dual(p)).value == 1


@pytest.mark.parametrize("direction", ["min", "max"])
def test_strong_duality_self_test(direction):
    for lp in instances(100, seed=7 if direction == "min" else 8, direction=direction):
        sol = solve(lp)
        d = dual_of(lp)
        dsol = solve(d)
        assert sol.status == dsol.status == "optimal"
        assert sol.value == dsol.value
        assert is_dual_feasible(lp, sol.dual)
        # the reported multipliers are an optimal point of dual_of(lp)
        yd = dual_multipliers_in_dual_variables(lp, sol.dual)
        assert d.objective(yd) == sol.value.value


def test_dual_of_is_an_involution_up_to_values():
    for lp in instances(30, seed=11):
        assert solve(dual_of(dual_of(lp))).value == solve(lp).value


def test_solve_is_deterministic():
    lp = feasible_bounded(random.Random(5), 4, 4)
    a, b = solve(lp), solve(lp)
    assert (a.primal, a.dual, a.basis, a.pivots) == (b.primal, b.dual, b.basis, b.pivots)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_weak_duality_on_random_instances(seed):
    lp = feasible_bounded(random.Random(seed))
    sol, dsol = solve(lp), solve(dual_of(lp))
    assert sol.value >= dsol.value if lp.direction == "min" else sol.value <= dsol.value
    certify(lp, sol)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_lps_have_valid_certificates(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 4), rng.randint(1, 4)
    G = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)]
    h = [Fraction(rng.randint(-3, 3)) for _ in range(m)]
    c = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
    senses = [rng.choice((">=", "<=", "=")) for _ in range(m)]
    bounds = [rng.choice(("nonneg", "free")) for _ in range(n)]
    lp = FiniteLP.build(rng.choice(("min", "max")), c, G, h, senses, bounds)
    certify(lp, solve(lp))  # solve certifies too; repeated here on purpose


def test_certificate_error_on_tampered_solution():
    lp = FiniteLP.build("min", [1], [[1]], [1])
    sol = solve(lp)
    sol.dual = [Fraction(2)]
    with pytest.raises(AssertionError):
        certify(lp, sol)


def norm_at(p):
    return ExtendedReal.of(math.hypot(float(p[0]), float(p[1])))


def test_subgradient_of_the_norm():
    circle = [(math.cos(t / 10), math.sin(t / 10)) for t in range(63)]
    ok, _ = subgradient_check(norm_at, (1.0, 0.0), (1.0, 0.0), circle, tol=1e-12)
    assert ok
    ok, wit = subgradient_check(norm_at, (1, 0), (2, 0), [(2, 0)])
    assert not ok and wit[0][0] == (2, 0)


def test_subgradient_of_kretschmer_value():
    n = 8
    b = kretschmer.b_indicator(n, Fraction(1, 2))
    res = kretschmer.solve_primal(kretschmer.KretschmerProblem(2, b))
    rng = random.Random(3)
    perts = []
    for _ in range(50):
        i = rng.randint(0, n - 1)
        v = list(b.values)
        v[i] += Fraction(rng.choice((-1, 1)) * rng.randint(1, 8), 16)
        perts.append(tuple(v))
    ok, wit = subgradient_check(lambda bb: kretschmer.primal_value(2, kretschmer.GridFn.of(bb)),
                                b.values, res.multipliers.values, perts)
    assert ok, wit


def test_subgradient_check_skips_infinite_values():
    ok, _ = subgradient_check(lambda p: POS_INF if p[0] > 5 else ExtendedReal.of(p[0]), (1,), (1,), [(9,), (2,)])
    assert ok


def test_duality_report_gap():
    lp = FiniteLP.build("min", [1], [[1]], [1])
    rep = DualityReport("t", solve(lp), solve(dual_of(lp)))
    assert rep.gap == 0
    rep.add_check("zero gap", rep.gap == 0)
    assert rep.all_passed
