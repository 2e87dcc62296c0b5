import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from valuegap import kretschmer as K
from valuegap.lp import is_dual_feasible, is_primal_feasible, solve

F = Fraction


def random_grid(rng, n, lo=-3, hi=4):
    return K.GridFn.of(F(rng.randint(lo, hi), rng.choice((1, 2))) for _ in range(n))


def test_apply_A_examples():
    assert K.apply_A(K.GridFn.constant(4), 0).nodes == (1, F(3, 4), F(1, 2), F(1, 4), 0)
    assert set(K.apply_A(K.GridFn.zero(6), 5).nodes) == {5}


def test_apply_A_star_examples():
    xs, r = K.apply_A_star(K.GridFn.constant(4))
    assert xs.nodes == tuple(F(k, 4) for k in range(5)) and r == 1
    xs, r = K.apply_A_star(K.GridFn.zero(4))
    assert set(xs.nodes) == {0} and r == 0
    xs, r = K.apply_A_star(K.b_indicator(4, F(1, 2)))
    assert r == F(1, 2) and xs.at(4) == F(1, 2)


def test_adjoint_identity():
    rng = random.Random(0)
    for _ in range(50):
        n = rng.choice((1, 3, 8, 16))
        x, y, r = random_grid(rng, n), random_grid(rng, n), F(rng.randint(-5, 5), 3)
        xs, rs = K.apply_A_star(y)
        assert K.apply_A(x, r).inner(y) == K.pair_X(x, r, xs, rs)


@pytest.mark.parametrize("b,mode,expected", [
    (K.GridFn.constant(8), "exact", F(2)),
    (K.GridFn.constant(8), "sampled", F(15, 16)),
    (K.b_indicator(8, F(1, 2)), "exact", F(9, 16)),
])
def test_discrete_primal_examples(b, mode, expected):
    p = K.KretschmerProblem(2, b, mode)
    assert solve(K.discretize_primal(p)).value == expected
    assert K.solve_primal(p).value == expected


def test_sampled_example_puts_mass_on_the_last_cell():
    res = K.solve_primal(K.KretschmerProblem(2, K.GridFn.constant(8), "sampled"))
    assert res.x[8] == 8 and res.r == 0


def test_discrete_dual_examples():
    for n in (1, 4, 16):
        assert K.dual_value(2, K.GridFn.constant(n)) == 1
    d = K.solve_dual(K.KretschmerProblem(2, K.b_indicator(8, F(1, 2))))
    assert d.value == F(1, 2)
    sol = solve(K.discretize_dual(K.KretschmerProblem(2, K.b_indicator(8, F(1, 2)))))
    assert sol.value == F(1, 2)


def test_dual_with_alpha_zero_is_the_zero_function():
    rng = random.Random(1)
    b = random_grid(rng, 8)
    sol = solve(K.discretize_dual(K.KretschmerProblem(0, b)))
    assert sol.value == 0 and sol.primal == [0] * 8


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_reductions_match_the_full_lps(seed):
    rng = random.Random(seed)
    n = rng.choice((1, 2, 3, 5, 8, 13, 16))
    p = K.KretschmerProblem(F(rng.randint(0, 10), 4), random_grid(rng, n), rng.choice(K.MODES))
    full_p, full_d = K.discretize_primal(p), K.discretize_dual(p)
    res, dres = K.solve_primal(p), K.solve_dual(p)
    assert solve(full_p).value == res.value
    assert solve(full_d).value == dres.value
    # the lifted points certify optimality in the full LPs
    assert is_primal_feasible(full_p, K.lifted_primal_point(res))
    assert is_dual_feasible(full_p, list(res.multipliers.values))
    assert full_p.objective(K.lifted_primal_point(res)) == res.value
    assert is_primal_feasible(full_d, list(dres.z.values)) and full_d.objective(dres.z.values) == dres.value


def test_reductions_match_on_larger_grids():
    rng = random.Random(5)
    for n in (32, 64):
        b = random_grid(rng, n)
        p = K.KretschmerProblem(F(3, 2), b)
        assert solve(K.discretize_primal(p)).value == K.primal_value(F(3, 2), b)
        assert solve(K.discretize_dual(p)).value == K.dual_value(F(3, 2), b)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_bracketing_and_mode_ordering(seed):
    rng = random.Random(seed)
    n = rng.choice((2, 4, 8, 16))
    b, alpha = random_grid(rng, n), F(rng.randint(1, 12), 4)
    exact = K.primal_value(alpha, b, "exact")
    assert K.dual_value(alpha, b) <= exact
    assert K.primal_value(alpha, b, "sampled") <= exact


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_refinement_monotonicity(seed):
    rng = random.Random(seed)
    b, alpha = random_grid(rng, rng.choice((2, 4, 8))), F(rng.randint(1, 12), 4)
    fine = b.refine()
    assert K.primal_value(alpha, fine) <= K.primal_value(alpha, b)
    assert K.dual_value(alpha, fine) >= K.dual_value(alpha, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_value_is_monotone(seed):
    rng = random.Random(seed)
    b = random_grid(rng, 8)
    bigger = K.GridFn.of(v + F(rng.randint(0, 3), 2) for v in b.values)
    assert b.le(bigger)
    assert K.primal_value(2, b) <= K.primal_value(2, bigger)


def test_one_interval_formula():
    n = 4
    while n <= 1024:
        b = K.b_indicator(n, F(1, 2))
        assert K.primal_value(2, b) == F(1, 2) + F(1, 2 * n)
        assert K.dual_value(2, b) == F(1, 2)
        n *= 2
    for delta in (F(1, 4), F(3, 8)):
        b = K.b_indicator(64, delta)
        assert K.primal_value(F(7, 8), b) == delta + F(1, 128)


@pytest.mark.parametrize("args,expected", [
    ((2, 0, 0), (2, 1, True, True)),
    ((F(1, 2), 0, 0), (F(1, 2), F(1, 2), True, True)),
    ((2, F(1, 2)), (F(1, 2), F(1, 2), False, True)),
    ((F(1, 4), F(1, 2)), (F(1, 4), F(1, 4), True, True)),
])
def test_analytic_values(args, expected):
    a = K.analytic_values(*args)
    assert (a.valP, a.valD, a.primal_attained, a.dual_attained) == expected


@pytest.mark.parametrize("args", [(0, 0, 0), (2, F(1, 2), F(1, 4)), (2, 0), (2, 1), (2, 0, 1)])
def test_analytic_values_out_of_range(args):
    with pytest.raises(ValueError, match="out-of-range"):
        K.analytic_values(*args)


@pytest.mark.parametrize("b", [K.GridFn.constant(4), K.GridFn.zero(4), K.GridFn.of([-1, 2, -3, 0])])
def test_alpha_zero(b):
    assert K.value_alpha_zero(b) == (0, True)
    assert K.primal_value(0, b) == 0


def test_split_measure():
    part = K.split_measure(range(1, 17), 3)
    assert [len(a) for a in part.levels] == [8, 4, 2] and len(part.unused) == 2
    part = K.split_measure([5, 6], 1)
    assert part.levels == ((5,),) and part.unused == (6,)
    with pytest.raises(K.GridError, match="grid-too-coarse"):
        K.split_measure(range(16), 5)


def test_ytilde_norms():
    grid = 64
    part = K.split_measure(range(1, 17), 3)  # beta = 1/4
    yt = K.build_ytilde(part, grid)
    assert yt.beta == F(1, 4)
    assert yt.norms_sq[-1] == pytest.approx((math.sqrt(2) + 1) * (1 - 2 ** -1.5) / 4, abs=1e-12)
    assert yt.norms_sq[-1] == pytest.approx(0.39015, abs=2e-5)  # quoted value is truncated
    assert yt.ess_sup == pytest.approx(1.68179, abs=1e-5)
    assert all(a == pytest.approx(b, abs=1e-12) for a, b in zip(yt.norms_sq, yt.norms_sq_formula))
    one = K.build_ytilde(K.split_measure(range(1, 17), 1), grid)
    assert one.norms_sq[0] == pytest.approx(math.sqrt(2) * (1 / 4) / 2, abs=1e-15)
    assert set(one.ytilde.values) == {0.0, 2 ** 0.25}


def test_ytilde_difference_norms():
    grid, N = 1024, 6
    part = K.split_measure(range(1, 257), N)
    beta = 1 / 4
    for M in range(1, N):
        d = K.ytilde_function(part, grid, N) - K.ytilde_function(part, grid, M)
        got = math.fsum(v * v for v in d.values) / grid
        assert got == pytest.approx((math.sqrt(2) + 1) * beta * (2 ** (-M / 2) - 2 ** (-N / 2)), abs=1e-12)


@pytest.mark.parametrize("level,grid,bound", [(4, 256, 0.25), (8, 1024, 0.75)])
def test_unboundedness_witness(level, grid, bound):
    w = K.unboundedness_witness(2, F(1, 4), F(1, 2), level, 1, grid)
    assert w.analytic_bound == pytest.approx(bound, abs=1e-12)
    assert w.discrete_value >= bound - 1e-6


def test_unboundedness_preconditions():
    with pytest.raises(ValueError, match="eta0"):
        K.unboundedness_witness(2, 0, F(1, 2), 4, 1, 64)
    with pytest.raises(ValueError, match="eta1"):
        K.unboundedness_witness(2, F(1, 4), 1, 4, 1, 64)
    with pytest.raises(ValueError, match="eps"):
        K.unboundedness_witness(2, F(1, 4), F(1, 2), 4, 0, 64)
    with pytest.raises(K.GridError, match="grid-too-coarse"):
        K.unboundedness_witness(2, F(1, 4), F(1, 2), 8, 1, 64)


def test_discontinuity_examples():
    row, base = K.discontinuity_scenario(2, F(1, 4), [1 - F(1, 16)], 64)
    assert row.perturbation_norm == 0.25 and row.discrete_valP == 2 and row.analytic_valP == 2
    assert base.discrete_valP == F(1, 4) + F(1, 128)
    assert row.discrete_valP - base.discrete_valP >= F(7, 4) - F(1, 128)
    row, _ = K.discontinuity_scenario(2, F(1, 4), [1 - F(1, 64)], 256)
    assert row.perturbation_norm_sq == F(1, 64) and row.discrete_valP == 2


def test_discontinuity_alignment_errors():
    with pytest.raises(K.GridError):
        K.discontinuity_scenario(2, F(1, 4), [1 - F(1, 64)], 16)
    with pytest.raises(ValueError):
        K.discontinuity_scenario(2, F(1, 4), [F(1, 8)], 64)


def test_gridfn_csv_round_trip(tmp_path):
    f = K.GridFn.of([F(1, 3), 0, -2, F(7, 2)])
    path = tmp_path / "b.csv"
    K.write_gridfn(f, path)
    assert K.read_gridfn(path) == f
    with pytest.raises(K.GridError):
        K.gridfn_from_csv("cells=3\n1\n2\n")
    with pytest.raises(K.GridError):
        K.gridfn_from_csv("1\n2\n")


def test_indicator_alignment():
    assert K.b_indicator(8, F(1, 4), F(3, 4)).values == (1, 1, 0, 0, 0, 0, 1, 1)
    with pytest.raises(K.GridError):
        K.b_indicator(8, F(1, 3))


def test_float_rhs_must_be_rationalized():
    f = K.GridFn(2, (0.5, 2 ** 0.25))
    with pytest.raises(K.GridError):
        K.KretschmerProblem(2, f)
    assert K.KretschmerProblem(2, f.rationalized()).b[2] == F(1189207115003, 10**12)
