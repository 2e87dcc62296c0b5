"""Checkers for sublinear functions given as evaluation oracles.

Points are either tuples of numbers (finite-dimensional spaces) or
:class:`~valuegap.sparse.SparseSeq` instances (the space c00).  Every
check is a sampling certificate: a failure comes with an explicit
witness, a pass only means nothing was refuted on the sample.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, List, Optional, Sequence

from valuegap.extended import ExtendedReal, POS_INF
from valuegap.sparse import SparseSeq

FLOAT_TOL = 1e-9
DEFAULT_HORIZON = 64


class OracleError(RuntimeError):
    """An oracle evaluation failed; ``point`` is the offending input."""

    def __init__(self, message: str, point: Any):
        super().__init__(f"{message} at point {point!r}")
        self.point = point


class SequenceError(RuntimeError):
    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (term n={index})")
        self.index = index


class HypothesisFailed(RuntimeError):
    """The local Lipschitz hypothesis failed on B(x, delta)."""

    def __init__(self, witness: "LipschitzWitness"):
        super().__init__(f"hypothesis-failed: {witness}")
        self.witness = witness


# -- vector helpers -------------------------------------------------------

def vadd(p, q):
    if isinstance(p, SparseSeq):
        return p + q
    if len(p) != len(q):
        raise ValueError("dimension mismatch")
    return tuple(a + b for a, b in zip(p, q))


def vscale(t, p):
    if isinstance(p, SparseSeq):
        return p * t
    return tuple(t * a for a in p)


def vsub(p, q):
    return vadd(p, vscale(-1, q))


def vdot(p, q):
    if isinstance(p, SparseSeq):
        return p.dot(q)
    return sum((a * b for a, b in zip(p, q)), Fraction(0))


def vnorm_sq(p):
    return vdot(p, p)


def vnorm(p) -> float:
    return math.sqrt(vnorm_sq(p))


def vnorm1(p):
    if isinstance(p, SparseSeq):
        return sum((abs(v) for _, v in p), Fraction(0))
    return sum((abs(a) for a in p), Fraction(0))


def is_zero(p) -> bool:
    if isinstance(p, SparseSeq):
        return len(p) == 0
    return all(a == 0 for a in p)


# -- oracle types ---------------------------------------------------------

@dataclass(frozen=True)
class FnOracle:
    """An extended-real-valued function known only through evaluation.

    ``sampler(count, seed)`` returns points of the domain (finite value);
    ``exact`` declares rational arithmetic, which switches the default
    comparison tolerance from ``FLOAT_TOL`` to zero.
    """

    dim: int | str
    eval: Callable[[Any], Any]
    sampler: Callable[[int, int], List[Any]]
    exact: bool = True
    name: str = "f"

    def __call__(self, point) -> ExtendedReal:
        try:
            value = self.eval(point)
        except Exception as exc:
            raise OracleError(f"{self.name} evaluation failed: {exc}", point) from exc
        return ExtendedReal.of(value)

    def sample(self, count: int, seed: int) -> List[Any]:
        return list(self.sampler(count, seed))

    def default_tol(self, tol=None):
        if tol is not None:
            return tol
        return 0 if self.exact else FLOAT_TOL


@dataclass(frozen=True)
class SequenceWitness:
    generator: Callable[[int], Any]
    label: str = ""

    def __call__(self, n: int):
        if n < 1:
            raise ValueError("witness sequences are indexed from 1")
        return self.generator(n)


@dataclass
class CheckResult:
    passed: bool
    witnesses: list = field(default_factory=list)
    checked: int = 0

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class HomogeneityWitness:
    x: Any
    t: Any
    fx: ExtendedReal
    ftx: ExtendedReal


@dataclass(frozen=True)
class SubadditivityWitness:
    x: Any
    y: Any
    f_sum: ExtendedReal
    fx_plus_fy: ExtendedReal


@dataclass(frozen=True)
class LipschitzWitness:
    p: Any
    q: Any
    gp: ExtendedReal
    gq: ExtendedReal
    slope: float


@dataclass
class LiminfResult:
    liminf_estimate: ExtendedReal
    limsup_estimate: ExtendedReal
    f_at_base: ExtendedReal
    lsc_violated: bool
    usc_violated: bool
    values: List[ExtendedReal]
    tail_start: int


@dataclass
class MembershipResult:
    accepted: bool
    counterexample: Any = None
    checked: int = 0


def _same(a: ExtendedReal, b: ExtendedReal, tol) -> bool:
    if a.is_finite and b.is_finite:
        return abs(a.value - b.value) <= tol
    return a.tag == b.tag


# -- operations -----------------------------------------------------------

def check_positive_homogeneity(f: FnOracle, samples: int, scales: Sequence, tol=None,
                               seed: int = 0, points: Iterable = ()) -> CheckResult:
    """Check f(t x) = t f(x) on sampled domain points and every scale t > 0."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if any(t <= 0 for t in scales):
        raise ValueError("scales must be positive")
    tol = f.default_tol(tol)
    if tol < 0:
        raise ValueError("tol must be >= 0")
    result = CheckResult(True)
    for x in list(points) + f.sample(samples, seed):
        fx = f(x)
        for t in scales:
            ftx = f(vscale(t, x))
            result.checked += 1
            if not _same(ftx, fx * t, tol):
                result.passed = False
                result.witnesses.append(HomogeneityWitness(x, t, fx, ftx))
    return result


def check_subadditivity(f: FnOracle, pairs: int, tol=None, seed: int = 0,
                        extra_pairs: Iterable = ()) -> CheckResult:
    """Check f(x + y) <= f(x) + f(y) + tol on sampled pairs from dom f."""
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    tol = f.default_tol(tol)
    pts = f.sample(2 * pairs, seed)
    candidates = list(extra_pairs) + list(zip(pts[0::2], pts[1::2]))
    result = CheckResult(True)
    for x, y in candidates:
        lhs = f(vadd(x, y))
        rhs = f(x) + f(y)
        result.checked += 1
        if not lhs <= rhs + tol:
            result.passed = False
            result.witnesses.append(SubadditivityWitness(x, y, lhs, rhs))
    return result


def liminf_along(f: FnOracle, base, seq: SequenceWitness, horizon: int = DEFAULT_HORIZON,
                 tol=None, tail_start: Optional[int] = None) -> LiminfResult:
    """Estimate liminf and limsup of f along ``seq`` and compare with f(base).

    The estimates are the minimum and maximum of f(seq(n)) over the tail
    ``tail_start <= n <= horizon``; ``tail_start`` defaults to
    ceil(horizon / 2).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    tol = f.default_tol(tol)
    start = math.ceil(horizon / 2) if tail_start is None else tail_start
    if not 1 <= start <= horizon:
        raise ValueError("tail_start must lie in [1, horizon]")
    values = []
    for n in range(1, horizon + 1):
        try:
            point = seq(n)
        except Exception as exc:
            raise SequenceError(f"witness {seq.label or 'sequence'} failed: {exc}", n) from exc
        values.append(f(point))
    tail = values[start - 1:]
    low, high = min(tail), max(tail)
    fb = f(base)
    return LiminfResult(
        liminf_estimate=low,
        limsup_estimate=high,
        f_at_base=fb,
        lsc_violated=low < fb - tol,
        usc_violated=high > fb + tol,
        values=values,
        tail_start=start,
    )


def subdiff_zero_membership(g: FnOracle, xstar, samples: int, seed: int = 0,
                            extra_points: Iterable = (), tol=None) -> MembershipResult:
    """Test whether <x, xstar> <= g(x) on sampled x in dom g.

    Rejection is exact and returns the violating point; acceptance only
    means the sample did not refute xstar as an element of the
    subdifferential at 0.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tol = g.default_tol(tol)
    result = MembershipResult(True)
    for x in list(extra_points) + g.sample(samples, seed):
        gx = g(x)
        if gx == POS_INF:
            continue
        result.checked += 1
        if not ExtendedReal.of(vdot(x, xstar)) <= gx + tol:
            result.accepted = False
            result.counterexample = x
            return result
    return result


def _ball_points(g: FnOracle, center, radius, count: int, seed: int) -> list:
    """Points of B(center, radius) inside dom g, built from domain directions.

    A direction d is scaled by radius * u / ||d||_1 with rational u in (0, 1);
    since ||d||_2 <= ||d||_1 the point lies strictly inside the ball and
    stays rational when the inputs are.
    """
    rng = random.Random(seed)
    out: list = []
    attempts = 0
    while len(out) < count and attempts < 8:
        attempts += 1
        for d in g.sample(2 * count, rng.randrange(2**31)):
            if is_zero(d):
                continue
            u = Fraction(rng.randint(1, 999), 1000)
            s = Fraction(radius) * u / vnorm1(d) if g.exact else float(radius) * float(u) / float(vnorm1(d))
            sign = 1 if rng.random() < 0.5 else -1
            p = vadd(center, vscale(sign * s, d))
            if g(p) != POS_INF:
                out.append(p)
            if len(out) >= count:
                break
    return out


def _lipschitz_ok(g: FnOracle, gp: ExtendedReal, gq: ExtendedReal, p, q, L, tol) -> bool:
    diff = gp - gq
    if not diff.is_finite:
        return False
    dist_sq = vnorm_sq(vsub(p, q))
    if g.exact and tol == 0:
        return diff.value * diff.value <= Fraction(L) * Fraction(L) * dist_sq
    return abs(float(diff.value)) <= float(L) * math.sqrt(dist_sq) + tol


def _slope(gp, gq, p, q) -> float:
    dist = vnorm(vsub(p, q))
    if dist == 0:
        return 0.0
    return abs(float((gp - gq).value)) / dist


def check_lipschitz_transfer(g: FnOracle, x, delta, L, gamma, pairs: int, seed: int = 0,
                             tol=None) -> CheckResult:
    """Transfer an L-Lipschitz bound from B(x, delta) to B(gamma x, gamma delta).

    Pairs are sampled in B(x, delta) and must satisfy the bound there
    (otherwise :class:`HypothesisFailed` is raised); their images under
    scaling by gamma, which lie in B(gamma x, gamma delta), are then tested.
    """
    if delta <= 0 or L <= 0 or gamma <= 0:
        raise ValueError("delta, L and gamma must be positive")
    tol = g.default_tol(tol)
    points = _ball_points(g, x, delta, 2 * pairs, seed)
    sampled = list(zip(points[0::2], points[1::2]))
    if not sampled:
        raise ValueError("could not sample any pair in B(x, delta) within dom g")
    for p, q in sampled:
        gp, gq = g(p), g(q)
        if not _lipschitz_ok(g, gp, gq, p, q, L, tol):
            raise HypothesisFailed(LipschitzWitness(p, q, gp, gq, _slope(gp, gq, p, q)))
    result = CheckResult(True)
    for p, q in sampled:
        sp, sq = vscale(gamma, p), vscale(gamma, q)
        gp, gq = g(sp), g(sq)
        result.checked += 1
        if not _lipschitz_ok(g, gp, gq, sp, sq, L, tol):
            result.passed = False
            result.witnesses.append(LipschitzWitness(sp, sq, gp, gq, _slope(gp, gq, sp, sq)))
    return result


def measure_lipschitz(g: FnOracle, x, delta, pairs: int, seed: int = 0) -> Fraction:
    """Rational upper bound on the largest slope of g over pairs sampled in B(x, delta).

    Uses the same pair sample as :func:`check_lipschitz_transfer` for equal
    arguments, so the returned constant satisfies its hypothesis.
    """
    points = _ball_points(g, x, delta, 2 * pairs, seed)
    best_sq = Fraction(0)
    for p, q in zip(points[0::2], points[1::2]):
        diff = (g(p) - g(q)).value
        dist_sq = Fraction(vnorm_sq(vsub(p, q)))
        if dist_sq:
            best_sq = max(best_sq, Fraction(diff) ** 2 / dist_sq)
    L = Fraction(math.sqrt(best_sq)).limit_denominator(10**6) if best_sq else Fraction(1, 10**6)
    while L * L < best_sq:
        L += Fraction(1, 10**6)
    return L
