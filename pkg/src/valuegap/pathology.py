"""A discontinuous linear functional on c00 and the sublinear functions built on it.

The functional is phi(x) = sum_n n * x_n, so phi(e_n) = n while ||e_n|| = 1.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Literal

from valuegap.convex import FnOracle, SequenceWitness
from valuegap.extended import ExtendedReal, POS_INF
from valuegap.sparse import SparseSeq

PathologyFn = Literal["g1", "g2", "g3"]
KINDS = ("g1", "g2", "g3")


def phi(x: SparseSeq) -> Fraction:
    return sum((n * v for n, v in x), Fraction(0))


def e(n: int, coef=1) -> SparseSeq:
    return SparseSeq.basis(n, coef)


def eval_pathology(kind: PathologyFn, x: SparseSeq) -> ExtendedReal:
    p = phi(x)
    if kind == "g1":
        return ExtendedReal.of(max(Fraction(0), p))
    if kind == "g2":
        return ExtendedReal.of(Fraction(0)) if p <= 0 else POS_INF
    if kind == "g3":
        return ExtendedReal.of(p) if p <= 0 else POS_INF
    raise ValueError(f"unknown pathology function {kind!r}")


def usc_witness(x: SparseSeq) -> SequenceWitness:
    """n -> x - (phi(x)/n) e_n: stays on [phi = 0] and converges to x."""
    p = phi(x)
    if p >= 0:
        raise ValueError("requires-negative-phi")
    return SequenceWitness(lambda n: x - e(n, p / n), label="usc witness x'_n")


def lsc_witness(x: SparseSeq) -> SequenceWitness:
    """n -> x - (1/n) e_n: phi drops by exactly 1 along the whole sequence."""
    if phi(x) > 0:
        raise ValueError("requires-nonpositive-phi")
    return SequenceWitness(lambda n: x - e(n, Fraction(1, n)), label="lsc witness x''_n")


def random_sparse(rng: random.Random, max_index: int = 12, max_support: int = 4) -> SparseSeq:
    k = rng.randint(1, max_support)
    idx = rng.sample(range(1, max_index + 1), k)
    return SparseSeq({i: Fraction(rng.randint(-20, 20), rng.randint(1, 6)) for i in idx})


def sample_domain(kind: PathologyFn, count: int, seed: int) -> list[SparseSeq]:
    """Points of dom g_kind; for g2, g3 these satisfy phi <= 0.

    Points with phi > 0 are reflected, so that [phi <= 0] is sampled
    evenly; a few points of [phi = 0] are mixed in.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        x = random_sparse(rng)
        if kind != "g1":
            p = phi(x)
            if p > 0:
                x = -x
            if rng.random() < 0.2 and p != 0:
                # move x onto the kernel of phi along a fresh coordinate
                m = max(x.support) + 1
                x = x - e(m, phi(x) / m)
        out.append(x)
    return out


def pathology_oracle(kind: PathologyFn) -> FnOracle:
    return FnOracle(
        dim="sequence",
        eval=lambda x: eval_pathology(kind, x),
        sampler=lambda count, seed: sample_domain(kind, count, seed),
        exact=True,
        name=kind,
    )


def restricted_oracle(kind: PathologyFn) -> FnOracle:
    """g_kind restricted to its domain: points outside dom raise."""

    def evaluate(x):
        value = eval_pathology(kind, x)
        if value == POS_INF:
            raise ValueError("point outside dom")
        return value

    return FnOracle("sequence", evaluate, lambda c, s: sample_domain(kind, c, s), True, f"{kind}|dom")


def refutation_points(xstar: SparseSeq, extra: int = 3) -> list[SparseSeq]:
    """Points of [phi <= 0] on which <x, xstar> > phi(x) for finitely supported xstar.

    For m beyond the support of xstar, x = -e_m gives <x, xstar> = 0 > -m.
    Mixed points -e_k - t e_m, t >= 0, are included for variety.
    """
    top = max(xstar.support, default=0)
    pts = [e(top + j, -1) for j in range(1, extra + 1)]
    for k in xstar.support[:extra]:
        pts.append(e(k, -1) - e(top + 1, Fraction(1, 2)))
    return pts
