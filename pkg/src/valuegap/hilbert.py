"""Truncated model of a Hilbert-space LP with a unique feasible point per rhs.

With orthonormal e_1, e_2, ..., the cone P is generated by
z_n = eta_n e_{2n-1} - mu_n e_{2n} (eta_n^2 + mu_n^2 = 1), the cost is
c* = sum eta_n e_{2n}, and A is the orthogonal projection onto the closed
span L of the odd basis vectors.  The truncation keeps n = 1..N.

The mu_n are irrational.  The model stores each one as the exact rational
value of its correctly rounded double, so value functions evaluated on
rational right-hand sides are exact rationals (linear in gamma) and agree
with the real closed form to about 1e-16 per term.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence

from valuegap.convex import FnOracle
from valuegap.extended import ExtendedReal, POS_INF
from valuegap.lp import FiniteLP, LPSolution
from valuegap.sparse import SparseSeq


def dyadic_eta(n: int) -> Fraction:
    return Fraction(1, 2**n)


@dataclass(frozen=True)
class HilbertModel:
    trunc: int
    eta: Callable[[int], Fraction] = dyadic_eta

    def __post_init__(self) -> None:
        if self.trunc < 1:
            raise ValueError("trunc must be >= 1")
        for n in range(1, self.trunc + 1):
            if not 0 < self.eta(n) < 1:
                raise ValueError(f"eta_{n} must lie in ]0, 1[")

    def eta_n(self, n: int) -> Fraction:
        return Fraction(self.eta(n))

    def mu_float(self, n: int) -> float:
        return math.sqrt(1 - self.eta_n(n) ** 2)

    def mu_n(self, n: int) -> Fraction:
        return Fraction(self.mu_float(n))

    def mu_sq(self, n: int) -> Fraction:
        """mu_n^2 = 1 - eta_n^2, exact."""
        return 1 - self.eta_n(n) ** 2

    def z(self, n: int) -> SparseSeq:
        return SparseSeq({2 * n - 1: self.eta_n(n), 2 * n: -self.mu_n(n)})

    def cost(self) -> SparseSeq:
        return SparseSeq({2 * n: self.eta_n(n) for n in range(1, self.trunc + 1)})

    def gram(self, n: int, m: int) -> Fraction:
        """<z_n, z_m> with mu_n^2 taken symbolically as 1 - eta_n^2."""
        if n != m:
            return Fraction(0)  # disjoint coordinate pairs
        return self.eta_n(n) ** 2 + self.mu_sq(n)


class NotInDomain(ValueError):
    def __init__(self):
        super().__init__("not-in-domain")


def odd_vector(gammas) -> SparseSeq:
    """y = sum gamma_n e_{2n-1}, stored by the index n of the odd coordinate."""
    if isinstance(gammas, SparseSeq):
        return gammas
    if isinstance(gammas, dict):
        return SparseSeq(gammas)
    return SparseSeq({n: g for n, g in enumerate(gammas, start=1)})


def _check_support(m: HilbertModel, y: SparseSeq) -> None:
    if y.support and max(y.support) > m.trunc:
        raise ValueError(f"support exceeds truncation N={m.trunc}")


def in_domain(m: HilbertModel, y: SparseSeq) -> bool:
    _check_support(m, y)
    return all(g >= 0 for _, g in y)


def value(m: HilbertModel, y) -> ExtendedReal:
    """-sum mu_n gamma_n on dom (all gamma_n >= 0), +inf otherwise."""
    y = odd_vector(y)
    if not in_domain(m, y):
        return POS_INF
    return ExtendedReal.of(-sum((m.mu_n(n) * g for n, g in y), Fraction(0)))


def value_float(m: HilbertModel, y) -> float:
    y = odd_vector(y)
    if not in_domain(m, y):
        return math.inf
    return -math.fsum(m.mu_float(n) * float(g) for n, g in y)


def recover_primal(m: HilbertModel, y) -> List[Fraction]:
    """The unique lambda >= 0 with Pr_L(sum lambda_n z_n) = y: lambda_n = gamma_n / eta_n."""
    y = odd_vector(y)
    if not in_domain(m, y):
        raise NotInDomain()
    return [y[n] / m.eta_n(n) for n in range(1, m.trunc + 1)]


def primal_point(m: HilbertModel, lam: Sequence) -> SparseSeq:
    out = SparseSeq()
    for n, ln in enumerate(lam, start=1):
        out = out + m.z(n) * ln
    return out


def project_L(x: SparseSeq) -> SparseSeq:
    """Orthogonal projection onto the odd coordinates, re-indexed by n."""
    return SparseSeq({(k + 1) // 2: v for k, v in x if k % 2 == 1})


def truncated_lp(m: HilbertModel, y) -> FiniteLP:
    """min <c*, sum lambda_n z_n>  s.t.  lambda >= 0,  Pr_L(sum lambda_n z_n) = y."""
    y = odd_vector(y)
    _check_support(m, y)
    N = m.trunc
    c = [-m.eta_n(n) * m.mu_n(n) for n in range(1, N + 1)]
    G = [[m.eta_n(n) if j == n else Fraction(0) for j in range(1, N + 1)] for n in range(1, N + 1)]
    h = [y[n] for n in range(1, N + 1)]
    return FiniteLP.build("min", c, G, h, "=", "nonneg")


def equality_rank(lp: FiniteLP) -> int:
    """Rank of the constraint matrix, by exact Gaussian elimination."""
    rows = [list(r) for r in lp.G]
    rank, col = 0, 0
    while rank < len(rows) and col < lp.n:
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col] / rows[rank][col]
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def feasible_set_is_singleton(lp: FiniteLP, sol: LPSolution) -> bool:
    """All rows are equalities and the matrix has full column rank, so the
    feasible point found is the only one."""
    return (sol.status == "optimal" and all(s == "=" for s in lp.senses)
            and equality_rank(lp) == lp.n)


def dual_norm_lower_bound(m: HilbertModel) -> float:
    """sqrt(sum_{k<=N} mu_k^2): every truncated dual feasible u has ||u|| at least this."""
    return math.sqrt(sum((m.mu_sq(k) for k in range(1, m.trunc + 1)), Fraction(0)))


def dual_feasible(m: HilbertModel, lam: Sequence[float]) -> bool:
    """c* - Pr_L u lies in the dual cone of cone{z_1..z_N}, u = sum lam_k e_{2k-1}.

    <c* - u, z_k> = -eta_k (lam_k + mu_k) >= 0, i.e. lam_k <= -mu_k.
    """
    return all(float(l) <= -m.mu_float(k) for k, l in enumerate(lam, start=1))


@dataclass
class TruncatedDual:
    lam: List[float]
    dual_value: float
    strong_duality: bool


def truncated_dual_optimum(m: HilbertModel, y, tol: float = 1e-12) -> TruncatedDual:
    """Dual point lam_k = -mu_k (k <= N) of the truncation and its value <y, u>."""
    y = odd_vector(y)
    if not in_domain(m, y):
        raise NotInDomain()
    lam = [-m.mu_float(k) for k in range(1, m.trunc + 1)]
    dval = math.fsum(lam[n - 1] * float(g) for n, g in y)
    return TruncatedDual(lam, dval, abs(dval - value_float(m, y)) <= tol)


@dataclass
class WitnessTerm:
    m: int
    b_m: SparseSeq
    value: float
    value_bound: float
    distance: float
    distance_bound: float


def harmonic(m: int) -> Fraction:
    return sum((Fraction(1, n) for n in range(1, m + 1)), Fraction(0))


def lsc_failure_witness(m: HilbertModel, b, mmax: int) -> List[WitnessTerm]:
    """b_m = b + t_m sum_{n<=m} (1/n) e_{2n-1}, t_m = H_m^{-1/2}, for m = 0..mmax.

    value(b_m) = value(b) - t_m sum mu_n / n <= value(b) - mu_1 sqrt(H_m) and
    ||b_m - b|| = t_m sqrt(sum_{n<=m} n^-2), so b_m -> b while the value
    diverges to -inf.
    """
    b = odd_vector(b)
    if not in_domain(m, b):
        raise NotInDomain()
    if not 0 <= mmax <= m.trunc:
        raise ValueError("mmax must lie in [0, N]")
    base = value_float(m, b)
    mu1 = m.mu_float(1)
    out = []
    for k in range(mmax + 1):
        if k == 0:
            out.append(WitnessTerm(0, b, base, base, 0.0, 0.0))
            continue
        H = float(harmonic(k))
        t = 1 / math.sqrt(H)
        tf = Fraction(t)
        bm = b + SparseSeq({n: tf / n for n in range(1, k + 1)})
        dist = math.sqrt(float((bm - b).norm_sq()))
        out.append(WitnessTerm(
            m=k,
            b_m=bm,
            value=value_float(m, bm),
            value_bound=base - mu1 * math.sqrt(H),
            distance=dist,
            distance_bound=t * math.sqrt(float(sum(Fraction(1, n * n) for n in range(1, k + 1)))),
        ))
    return out


def sample_domain(m: HilbertModel, count: int, seed: int, max_support: int = 4) -> list:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        k = rng.randint(1, min(max_support, m.trunc))
        idx = rng.sample(range(1, m.trunc + 1), k)
        out.append(tuple(Fraction(rng.randint(0, 40), rng.randint(1, 8)) if n in idx else Fraction(0)
                         for n in range(1, m.trunc + 1)))
    return out


def value_oracle(m: HilbertModel) -> FnOracle:
    return FnOracle(m.trunc, lambda g: value(m, g), lambda c, s: sample_domain(m, c, s),
                    exact=True, name=f"hilbert value N={m.trunc}")
