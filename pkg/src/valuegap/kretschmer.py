"""Grid discretizations of Kretschmer's gap example on L^2[0, 1].

Primal (P): minimise  int_0^1 t x(t) dt + alpha r  over x >= 0, r >= 0 with
int_t^1 x(s) ds + r >= b(t).  Dual (D): maximise  int b z  over z >= 0 with
int_0^t z <= t and int_0^1 z <= alpha.

Everything lives on the uniform grid with n cells; a grid function is
constant on each cell [(i-1)/n, i/n).  Two primal discretizations are
provided.  The *exact* mode imposes the constraint at the right endpoint of
every cell, where the nonincreasing function A(x, r) is smallest, so its
value is an upper bound on val(P).  The *sampled* mode imposes it at left
endpoints, a relaxation.  The dual discretization restricts z to grid
functions, so its value is a lower bound on val(D).
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from valuegap.convex import FnOracle
from valuegap.lp import FiniteLP, LPSolution, solve

MODES = ("exact", "sampled")


class GridError(ValueError):
    pass


# -- grid functions -------------------------------------------------------

@dataclass(frozen=True)
class GridFn:
    cells: int
    values: Tuple

    def __post_init__(self) -> None:
        if self.cells < 1:
            raise GridError("a grid needs at least one cell")
        if len(self.values) != self.cells:
            raise GridError(f"{len(self.values)} values for {self.cells} cells")

    @classmethod
    def of(cls, values: Iterable) -> "GridFn":
        vals = tuple(v if isinstance(v, float) else Fraction(v) for v in values)
        return cls(len(vals), vals)

    @classmethod
    def constant(cls, n: int, c=1) -> "GridFn":
        return cls(n, (Fraction(c),) * n)

    @classmethod
    def zero(cls, n: int) -> "GridFn":
        return cls.constant(n, 0)

    @classmethod
    def indicator(cls, n: int, intervals: Sequence[Tuple]) -> "GridFn":
        """chi of a union of grid-aligned intervals [a, b] (endpoints are null sets)."""
        vals = [Fraction(0)] * n
        for a, b in intervals:
            lo, hi = cell_index(n, a), cell_index(n, b)
            if not 0 <= lo <= hi <= n:
                raise GridError(f"interval [{a}, {b}] outside [0, 1]")
            for i in range(lo, hi):
                vals[i] = Fraction(1)
        return cls(n, tuple(vals))

    def __getitem__(self, i: int):
        """1-based cell access."""
        return self.values[i - 1]

    def __add__(self, other: "GridFn") -> "GridFn":
        self._same_grid(other)
        return GridFn(self.cells, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "GridFn") -> "GridFn":
        self._same_grid(other)
        return GridFn(self.cells, tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, t) -> "GridFn":
        return GridFn(self.cells, tuple(t * a for a in self.values))

    __rmul__ = __mul__

    def _same_grid(self, other: "GridFn") -> None:
        if self.cells != other.cells:
            raise GridError(f"grids differ: {self.cells} vs {other.cells} cells")

    def inner(self, other: "GridFn"):
        self._same_grid(other)
        return sum((a * b for a, b in zip(self.values, other.values)), Fraction(0)) / self.cells

    def norm_sq(self):
        return self.inner(self)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def ess_sup(self):
        return max(self.values)

    def integral(self):
        return sum(self.values, Fraction(0)) / self.cells

    def refine(self, factor: int = 2) -> "GridFn":
        return GridFn(self.cells * factor, tuple(v for v in self.values for _ in range(factor)))

    def le(self, other: "GridFn") -> bool:
        self._same_grid(other)
        return all(a <= b for a, b in zip(self.values, other.values))

    def is_exact(self) -> bool:
        return not any(isinstance(v, float) for v in self.values)

    def rationalized(self, digits: int = 12) -> "GridFn":
        """Round float cells to rationals with ``digits`` decimal digits."""
        scale = 10**digits
        return GridFn(self.cells, tuple(
            Fraction(round(v * scale), scale) if isinstance(v, float) else v for v in self.values))


def cell_index(n: int, t) -> int:
    """Number of cells left of the grid node t; t must be a node."""
    k = Fraction(t) * n
    if k.denominator != 1:
        raise GridError(f"point {t} is not aligned with a grid of {n} cells")
    return int(k)


def midpoint(i: int, n: int) -> Fraction:
    return Fraction(2 * i - 1, 2 * n)


def b_indicator(n: int, delta, gamma=None) -> GridFn:
    """chi_[0, delta], or chi_{[0, delta] u [gamma, 1]} when gamma is given."""
    intervals = [(0, delta)]
    if gamma is not None:
        intervals.append((gamma, 1))
    return GridFn.indicator(n, intervals)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def gridfn_to_csv(f: GridFn) -> str:
    lines = [f"cells={f.cells}"] + [_fmt(v) for v in f.values]
    return "\n".join(lines) + "\n"


def gridfn_from_csv(text: str) -> GridFn:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and r[0].strip()]
    if not rows or not rows[0][0].strip().startswith("cells="):
        raise GridError("GridFn CSV must start with a 'cells=n' header")
    n = int(rows[0][0].strip()[len("cells="):])
    vals = tuple(Fraction(r[0].strip()) for r in rows[1:])
    if len(vals) != n:
        raise GridError(f"header announces {n} cells but {len(vals)} values follow")
    return GridFn(n, vals)


def read_gridfn(path: str | Path) -> GridFn:
    return gridfn_from_csv(Path(path).read_text())


def write_gridfn(f: GridFn, path: str | Path) -> None:
    Path(path).write_text(gridfn_to_csv(f))


# -- the operators A and A* ---------------------------------------------

@dataclass(frozen=True)
class NodeFn:
    """Continuous piecewise-linear function given by its values at the n+1 grid nodes."""

    cells: int
    nodes: Tuple

    def at(self, k: int):
        return self.nodes[k]

    def inner(self, g: GridFn):
        """int_0^1 self * g, exact: the trapezoid rule is exact for linear pieces."""
        if g.cells != self.cells:
            raise GridError("grids differ")
        s = sum(((self.nodes[i] + self.nodes[i + 1]) * g.values[i] for i in range(self.cells)),
                Fraction(0))
        return s / (2 * self.cells)


def apply_A(x: GridFn, r) -> NodeFn:
    """t -> int_t^1 x(s) ds + r."""
    n = x.cells
    nodes = [Fraction(r)] * (n + 1)
    acc = Fraction(r)
    for k in range(n - 1, -1, -1):
        acc += x.values[k] / n
        nodes[k] = acc
    return NodeFn(n, tuple(nodes))


def apply_A_star(y: GridFn) -> Tuple[NodeFn, Fraction]:
    """(t -> int_0^t y, int_0^1 y)."""
    n = y.cells
    nodes = [Fraction(0)]
    for v in y.values:
        nodes.append(nodes[-1] + v / n)
    return NodeFn(n, tuple(nodes)), nodes[-1]


def pair_X(x: GridFn, r, xs: NodeFn, rs) -> Fraction:
    """<(x, r), (xs, rs)> in L^2 x R."""
    return xs.inner(x) + Fraction(r) * rs


# -- the problem and its discretizations --------------------------------

@dataclass(frozen=True)
class KretschmerProblem:
    alpha: Fraction
    b: GridFn
    mode: str = "exact"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.b.is_exact():
            raise GridError("LP right-hand sides must be rational; use GridFn.rationalized()")

    @property
    def n(self) -> int:
        return self.b.cells


def _covers(mode: str, i: int, j: int) -> bool:
    """Does x_j enter the constraint of cell i?"""
    return j > i if mode == "exact" else j >= i


def discretize_primal(p: KretschmerProblem) -> FiniteLP:
    """Variables x_1..x_n (cell densities) and r; one constraint per cell."""
    n = p.n
    c = [midpoint(j, n) / n for j in range(1, n + 1)] + [p.alpha]
    inv = Fraction(1, n)
    G = [[inv if _covers(p.mode, i, j) else Fraction(0) for j in range(1, n + 1)] + [Fraction(1)]
         for i in range(1, n + 1)]
    return FiniteLP.build("min", c, G, p.b.values, ">=", "nonneg")


def discretize_dual(p: KretschmerProblem) -> FiniteLP:
    """Variables z_1..z_n >= 0; int_0^{i/n} z <= i/n for every i, int z <= alpha."""
    n = p.n
    inv = Fraction(1, n)
    G = [[inv if j <= i else Fraction(0) for j in range(1, n + 1)] for i in range(1, n + 1)]
    G.append([inv] * n)
    h = [Fraction(i, n) for i in range(1, n + 1)] + [p.alpha]
    c = [v / n for v in p.b.values]
    return FiniteLP.build("max", c, G, h, "<=", "nonneg")


# Reduced but equivalent LPs.  The dense discretizations have n^2 / 2
# nonzeros, too many for fine grids.  Dropping dominated rows and columns
# gives the same optimal value, and solutions lift back with zeros.

def constraint_records(b: GridFn) -> List[int]:
    """Cells i with b_i > 0 and b_i > b_k for every k > i (strict suffix maxima).

    A constraint whose b_i is at most some later b_k is implied by the later
    one, since its left-hand side covers a superset of the variables; one
    with b_i <= 0 is implied by nonnegativity.
    """
    out, best = [], Fraction(0)
    for i in range(b.cells, 0, -1):
        if b[i] > best:
            out.append(i)
            best = b[i]
    out.reverse()
    return out


@dataclass
class ReducedLP:
    lp: FiniteLP
    cols: List[int]   # kept cells, in variable order (r is the last variable for the primal)
    rows: List[int]   # cells whose constraints are kept
    n: int


def reduce_primal(p: KretschmerProblem) -> ReducedLP:
    """Keep only record constraints and, for each record, the cheapest column
    covering exactly the records up to it (cell i+1 in exact mode, i in sampled mode).

    Columns covering the same records differ only in cost, which increases
    with the cell index, so the leftmost one dominates.
    """
    n = p.n
    records = constraint_records(p.b)
    shift = 1 if p.mode == "exact" else 0
    cols = [i + shift for i in records if i + shift <= n]
    c = [midpoint(j, n) / n for j in cols] + [p.alpha]
    inv = Fraction(1, n)
    G = [[inv if _covers(p.mode, i, j) else Fraction(0) for j in cols] + [Fraction(1)] for i in records]
    h = [p.b[i] for i in records]
    return ReducedLP(FiniteLP.build("min", c, G, h, ">=", "nonneg"), cols, records, n)


def value_runs(b: GridFn) -> List[int]:
    """Last cells of the maximal runs of equal values."""
    return [i for i in range(1, b.cells + 1) if i == b.cells or b[i + 1] != b[i]]


def reduce_dual(p: KretschmerProblem) -> ReducedLP:
    """Concentrate z on the last cell of each run of equal b.

    Moving mass to the end of its run keeps the objective and only lowers
    the prefix integrals inside the run, so some optimum has this form, and
    only the prefix constraints at run ends can bind.
    """
    n = p.n
    ends = value_runs(p.b)
    inv = Fraction(1, n)
    G = [[inv if q <= i else Fraction(0) for q in ends] for i in ends]
    G.append([inv] * len(ends))
    h = [Fraction(i, n) for i in ends] + [p.alpha]
    c = [p.b[q] / n for q in ends]
    return ReducedLP(FiniteLP.build("max", c, G, h, "<=", "nonneg"), ends, ends + [n + 1], n)


@dataclass
class PrimalResult:
    value: Fraction
    x: GridFn
    r: Fraction
    multipliers: GridFn      # LP dual of the per-cell constraints
    solution: LPSolution


@dataclass
class DualResult:
    value: Fraction
    z: GridFn
    solution: LPSolution


def solve_primal(p: KretschmerProblem) -> PrimalResult:
    red = reduce_primal(p)
    sol = solve(red.lp)
    if sol.status != "optimal":
        raise ArithmeticError(f"discrete primal is {sol.status}")  # r = max b^+ is always feasible
    x = [Fraction(0)] * p.n
    for j, v in zip(red.cols, sol.primal):
        x[j - 1] = v
    y = [Fraction(0)] * p.n
    for i, v in zip(red.rows, sol.dual):
        y[i - 1] = v
    return PrimalResult(sol.value.value, GridFn(p.n, tuple(x)), sol.primal[-1], GridFn(p.n, tuple(y)), sol)


def solve_dual(p: KretschmerProblem) -> DualResult:
    red = reduce_dual(p)
    sol = solve(red.lp)
    if sol.status != "optimal":
        raise ArithmeticError(f"discrete dual is {sol.status}")  # z = 0 is feasible, int b z is bounded
    z = [Fraction(0)] * p.n
    for q, v in zip(red.cols, sol.primal):
        z[q - 1] = v
    return DualResult(sol.value.value, GridFn(p.n, tuple(z)), sol)


def primal_value(alpha, b: GridFn, mode: str = "exact") -> Fraction:
    return solve_primal(KretschmerProblem(alpha, b, mode)).value


def dual_value(alpha, b: GridFn) -> Fraction:
    return solve_dual(KretschmerProblem(alpha, b)).value


def lifted_primal_point(res: PrimalResult) -> List[Fraction]:
    return list(res.x.values) + [res.r]


def dual_weights(z: GridFn) -> Tuple[Fraction, ...]:
    """Coefficients w with sum_i w_i b_i = int b z, i.e. w_i = z_i / n."""
    return tuple(v / z.cells for v in z.values)


# -- analytic reference values -----------------------------------------

class OutOfRange(ValueError):
    def __init__(self, detail: str):
        super().__init__(f"out-of-range: {detail}")


@dataclass(frozen=True)
class AnalyticValues:
    valP: Fraction
    valD: Fraction
    primal_attained: bool
    dual_attained: bool

    @property
    def gap(self) -> Fraction:
        return self.valP - self.valD


def analytic_values(alpha, delta, gamma=None) -> AnalyticValues:
    """Closed forms for b = chi_{[0,delta] u [gamma,1]} (gamma given) or b = chi_[0,delta].

    Two-interval case: val(P) = alpha, val(D) = min(1, alpha), both attained.
    One-interval case: val(P) = val(D) = min(delta, alpha), with (P) attained
    iff alpha <= delta.
    """
    alpha, delta = Fraction(alpha), Fraction(delta)
    if alpha <= 0:
        raise OutOfRange("alpha must be > 0")
    if gamma is not None:
        gamma = Fraction(gamma)
        if not 0 <= delta <= gamma < 1:
            raise OutOfRange("need 0 <= delta <= gamma < 1")
        return AnalyticValues(alpha, min(Fraction(1), alpha), True, True)
    if not 0 < delta < 1:
        raise OutOfRange("need 0 < delta < 1")
    v = min(delta, alpha)
    return AnalyticValues(v, v, alpha <= delta, True)


def value_alpha_zero(b: GridFn) -> Tuple[Fraction, bool]:
    """With alpha = 0 the value function is the indicator of its domain.

    Every grid function is essentially bounded, so lies in the domain; the
    value 0 is attained at (x, r) = (0, max(ess sup b, 0)).
    """
    return Fraction(0), True


# -- measure splitting and the unbounded witnesses ------------------------

@dataclass(frozen=True)
class MeasurePartition:
    base: Tuple[int, ...]
    levels: Tuple[Tuple[int, ...], ...]
    unused: Tuple[int, ...]


def split_measure(cells: Sequence[int], levels: int) -> MeasurePartition:
    """Disjoint A_1..A_N inside A with |A_k| = |A| 2^-k, taken left to right.

    The |A| 2^-N leftover cells are reported as unused, which keeps every
    measure exactly a power-of-two fraction of |A|.
    """
    base = tuple(sorted(cells))
    size = len(base)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if size == 0 or size % 2**levels != 0:
        raise GridError("grid-too-coarse")
    out, pos = [], 0
    for k in range(1, levels + 1):
        m = size >> k
        out.append(base[pos:pos + m])
        pos += m
    return MeasurePartition(base, tuple(out), base[pos:])


@dataclass
class YTilde:
    ytilde: GridFn
    norms_sq: List[float]          # ||ytilde_k||^2 on the grid, k = 1..N
    norms_sq_formula: List[float]  # (sqrt2 + 1)(1 - 2^{-k/2}) beta
    ess_sup: float
    beta: Fraction


def ytilde_function(part: MeasurePartition, n_grid: int, upto: Optional[int] = None) -> GridFn:
    N = len(part.levels) if upto is None else upto
    vals = [0.0] * n_grid
    for k in range(1, N + 1):
        h = 2 ** (k / 4)
        for i in part.levels[k - 1]:
            vals[i - 1] = h
    return GridFn(n_grid, tuple(vals))


def build_ytilde(part: MeasurePartition, n_grid: int) -> YTilde:
    """ytilde_N = sum_k 2^{k/4} chi_{A_k} and the norms of its partial sums."""
    N = len(part.levels)
    beta = Fraction(len(part.base), n_grid)
    norms, formula = [], []
    for k in range(1, N + 1):
        # ||ytilde_k||^2 = sum_j 2^{j/2} mu(A_j)
        norms.append(math.fsum(2 ** (j / 2) * len(part.levels[j - 1]) / n_grid for j in range(1, k + 1)))
        formula.append((math.sqrt(2) + 1) * (1 - 2 ** (-k / 2)) * float(beta))
    yt = ytilde_function(part, n_grid)
    return YTilde(yt, norms, formula, 2 ** (N / 4), beta)


@dataclass
class UnboundednessWitness:
    level: int
    y_n: GridFn
    analytic_bound: float
    discrete_value: Fraction
    norm: float
    ess_sup: float


def unboundedness_witness(alpha, eta0, eta1, level: int, eps, grid: int) -> UnboundednessWitness:
    """y_n = eps * ytilde_n built on A = ]eta0, eta1[ with base point y = 0.

    With y = 0 one may take E_1 = [y >= -1] = [0, 1], so gamma = -1 and any
    feasible (x, r) for y_n costs at least eta0 (-1 + 2^{n/4} eps).  The
    exact-mode discrete value over-approximates v(y_n), so it must exceed
    this bound.
    """
    alpha, eta0, eta1, eps = (Fraction(v) for v in (alpha, eta0, eta1, eps))
    if not 0 < eta0:
        raise ValueError("eta0 must be > 0")
    if not eta0 < eta1:
        raise ValueError("eta0 must be < eta1")
    if not eta1 < min(Fraction(1), alpha):
        raise ValueError("eta1 must be < min(1, alpha)")
    if eps <= 0:
        raise ValueError("eps must be > 0")
    lo, hi = cell_index(grid, eta0), cell_index(grid, eta1)
    part = split_measure(range(lo + 1, hi + 1), level)
    yt = ytilde_function(part, grid)
    y_n = (yt * float(eps)).rationalized()
    bound = float(eta0) * (-1 + 2 ** (level / 4) * float(eps))
    val = primal_value(alpha, y_n, "exact")
    return UnboundednessWitness(level, y_n, bound, val, y_n.norm(), float(y_n.ess_sup()))


@dataclass
class DiscontinuityRow:
    gamma: Optional[Fraction]
    perturbation_norm_sq: Fraction
    perturbation_norm: float
    discrete_valP: Fraction
    analytic_valP: Fraction


def discontinuity_scenario(alpha, delta, gammas: Sequence, grid: int) -> List[DiscontinuityRow]:
    """Values at chi_{[0,delta] u [gamma,1]} against the base point chi_[0,delta].

    The last row (gamma = None) is the base point itself.
    """
    alpha, delta = Fraction(alpha), Fraction(delta)
    if alpha <= 1:
        raise ValueError("alpha must be > 1")
    base = b_indicator(grid, delta)
    rows = []
    for g in gammas:
        g = Fraction(g)
        if not 0 < delta < g < 1:
            raise ValueError(f"need 0 < delta < gamma < 1, got gamma={g}")
        b = b_indicator(grid, delta, g)
        diff = (b - base).norm_sq()
        rows.append(DiscontinuityRow(g, diff, math.sqrt(diff), primal_value(alpha, b), alpha))
    rows.append(DiscontinuityRow(None, Fraction(0), 0.0, primal_value(alpha, base),
                                 analytic_values(alpha, delta).valP))
    return rows


# -- oracle for the sublinearity checks ---------------------------------

def sample_grid_functions(n: int, count: int, seed: int) -> list:
    rng = random.Random(seed)
    return [tuple(Fraction(rng.randint(-12, 12), rng.choice((1, 2, 4))) for _ in range(n))
            for _ in range(count)]


def value_oracle(alpha, n: int, mode: str = "exact") -> FnOracle:
    """b -> discrete value at the grid function with cell values b (a tuple)."""
    return FnOracle(n, lambda b: primal_value(alpha, GridFn.of(b), mode),
                    lambda c, s: sample_grid_functions(n, c, s), exact=True,
                    name=f"kretschmer {mode} value n={n}")
