"""Exact rational linear programming.

A two-phase dense-tableau simplex method over :class:`fractions.Fraction`
with Bland's rule.  Every answer carries a certificate that is re-verified
from the original data before it is returned: a primal/dual pair with
equal objective values, a Farkas vector for infeasibility, or an improving
ray for unboundedness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from valuegap.extended import ExtendedReal, NEG_INF, POS_INF

SENSES = (">=", "<=", "=")
BOUNDS = ("nonneg", "free")


class LPDimensionError(ValueError):
    def __init__(self, detail: str):
        super().__init__(f"dimension-mismatch: {detail}")


class CertificateError(AssertionError):
    """A solver certificate failed exact re-verification (a solver bug)."""


def _frac(x) -> Fraction:
    if isinstance(x, float) and x != x:
        raise ValueError("NaN in LP data")
    return Fraction(x)


@dataclass(frozen=True)
class FiniteLP:
    direction: str
    c: Tuple[Fraction, ...]
    G: Tuple[Tuple[Fraction, ...], ...]
    h: Tuple[Fraction, ...]
    senses: Tuple[str, ...]
    bounds: Tuple[str, ...]

    @classmethod
    def build(cls, direction: str, c: Sequence, G: Sequence[Sequence], h: Sequence,
              senses: Sequence[str] | str = ">=", bounds: Sequence[str] | str = "nonneg") -> "FiniteLP":
        """Convenience constructor; a single sense or bound string is broadcast."""
        if isinstance(senses, str):
            senses = [senses] * len(h)
        if isinstance(bounds, str):
            bounds = [bounds] * len(c)
        return cls(
            direction,
            tuple(_frac(v) for v in c),
            tuple(tuple(_frac(v) for v in row) for row in G),
            tuple(_frac(v) for v in h),
            tuple(senses),
            tuple(bounds),
        )

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.h)

    def validate(self) -> None:
        if self.direction not in ("min", "max"):
            raise ValueError(f"direction must be 'min' or 'max', got {self.direction!r}")
        if len(self.G) != self.m:
            raise LPDimensionError(f"{len(self.G)} constraint rows but {self.m} right-hand sides")
        if len(self.senses) != self.m:
            raise LPDimensionError(f"{len(self.senses)} senses for {self.m} rows")
        if len(self.bounds) != self.n:
            raise LPDimensionError(f"{len(self.bounds)} bounds for {self.n} variables")
        for i, row in enumerate(self.G):
            if len(row) != self.n:
                raise LPDimensionError(f"row {i} has {len(row)} entries, expected {self.n}")
        for s in self.senses:
            if s not in SENSES:
                raise ValueError(f"unknown row sense {s!r}")
        for b in self.bounds:
            if b not in BOUNDS:
                raise ValueError(f"unknown variable bound {b!r}")

    def with_rhs(self, h: Sequence) -> "FiniteLP":
        if len(h) != self.m:
            raise LPDimensionError(f"new rhs has length {len(h)}, expected {self.m}")
        return FiniteLP(self.direction, self.c, self.G, tuple(_frac(v) for v in h), self.senses, self.bounds)

    def objective(self, x: Sequence) -> Fraction:
        return sum((a * b for a, b in zip(self.c, x)), Fraction(0))

    def row_activity(self, x: Sequence) -> List[Fraction]:
        return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in self.G]

    def column_activity(self, y: Sequence) -> List[Fraction]:
        """G^T y."""
        out = [Fraction(0)] * self.n
        for yi, row in zip(y, self.G):
            if yi:
                for j, a in enumerate(row):
                    if a:
                        out[j] += yi * a
        return out


@dataclass
class LPSolution:
    status: str
    value: ExtendedReal
    primal: Optional[List[Fraction]] = None
    dual: Optional[List[Fraction]] = None
    basis: Optional[List[int]] = None
    farkas: Optional[List[Fraction]] = None
    ray: Optional[List[Fraction]] = None
    pivots: int = 0


@dataclass
class DualityReport:
    scenario: str
    primal: LPSolution
    dual: LPSolution
    analytic_valP: Optional[ExtendedReal] = None
    analytic_valD: Optional[ExtendedReal] = None
    checks: List[dict] = field(default_factory=list)

    @property
    def gap(self) -> Optional[ExtendedReal]:
        try:
            return self.primal.value - self.dual.value
        except ArithmeticError:
            return None

    def add_check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "pass": bool(passed), "detail": detail})

    @property
    def all_passed(self) -> bool:
        return all(c["pass"] for c in self.checks)


# -- certificate checks ---------------------------------------------------

def is_primal_feasible(lp: FiniteLP, x: Sequence) -> bool:
    if len(x) != lp.n:
        return False
    for xj, b in zip(x, lp.bounds):
        if b == "nonneg" and xj < 0:
            return False
    for act, s, hi in zip(lp.row_activity(x), lp.senses, lp.h):
        if s == ">=" and act < hi or s == "<=" and act > hi or s == "=" and act != hi:
            return False
    return True


def is_dual_feasible(lp: FiniteLP, y: Sequence) -> bool:
    """Dual feasibility of row multipliers y under the usual sign conventions.

    For a min problem, y_i >= 0 on '>=' rows, y_i <= 0 on '<=' rows and
    (G^T y)_j <= c_j (= c_j for free variables).  For a max problem every
    inequality flips.
    """
    if len(y) != lp.m:
        return False
    sgn = 1 if lp.direction == "min" else -1
    for yi, s in zip(y, lp.senses):
        if s == ">=" and sgn * yi < 0 or s == "<=" and sgn * yi > 0:
            return False
    for col, cj, b in zip(lp.column_activity(y), lp.c, lp.bounds):
        if b == "free" and col != cj:
            return False
        if b == "nonneg" and sgn * (cj - col) < 0:
            return False
    return True


def dual_objective(lp: FiniteLP, y: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(lp.h, y)), Fraction(0))


def is_farkas_certificate(lp: FiniteLP, w: Sequence) -> bool:
    """w proves {x : G x (senses) h, bounds} is empty.

    Requires w_i >= 0 on '>=' rows, w_i <= 0 on '<=' rows, (G^T w)_j <= 0 for
    nonnegative variables, (G^T w)_j = 0 for free ones, and h . w > 0.
    """
    if len(w) != lp.m:
        return False
    for wi, s in zip(w, lp.senses):
        if s == ">=" and wi < 0 or s == "<=" and wi > 0:
            return False
    for col, b in zip(lp.column_activity(w), lp.bounds):
        if b == "free" and col != 0 or b == "nonneg" and col > 0:
            return False
    return dual_objective(lp, w) > 0


def is_improving_ray(lp: FiniteLP, d: Sequence) -> bool:
    if len(d) != lp.n:
        return False
    for dj, b in zip(d, lp.bounds):
        if b == "nonneg" and dj < 0:
            return False
    for act, s in zip(lp.row_activity(d), lp.senses):
        if s == ">=" and act < 0 or s == "<=" and act > 0 or s == "=" and act != 0:
            return False
    gain = lp.objective(d)
    return gain < 0 if lp.direction == "min" else gain > 0


def certify(lp: FiniteLP, sol: LPSolution) -> None:
    """Re-verify a solution's certificate exactly; raise CertificateError otherwise."""
    if sol.status == "optimal":
        if not is_primal_feasible(lp, sol.primal):
            raise CertificateError("primal point is infeasible")
        if not is_dual_feasible(lp, sol.dual):
            raise CertificateError("dual multipliers are infeasible")
        if lp.objective(sol.primal) != dual_objective(lp, sol.dual):
            raise CertificateError("objective values differ")
        if sol.value != lp.objective(sol.primal):
            raise CertificateError("reported value differs from c . x")
    elif sol.status == "infeasible":
        if sol.farkas is None or not is_farkas_certificate(lp, sol.farkas):
            raise CertificateError("invalid Farkas certificate")
    elif sol.status == "unbounded":
        if sol.primal is None or not is_primal_feasible(lp, sol.primal):
            raise CertificateError("unbounded status without a feasible point")
        if sol.ray is None or not is_improving_ray(lp, sol.ray):
            raise CertificateError("invalid improving ray")
    else:
        raise CertificateError(f"unknown status {sol.status!r}")


# -- simplex --------------------------------------------------------------

class _Tableau:
    """Dense tableau for  min cost . z  s.t.  T z = rhs, z >= 0.

    Column blocks: structural columns, surplus columns, artificial columns.
    """

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int],
                 ncols: int):
        self.T = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def reduced_costs(self, cost: List[Fraction]) -> Tuple[List[Fraction], Fraction]:
        d = list(cost)
        obj = Fraction(0)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.T[r]
                for j, a in enumerate(row):
                    if a:
                        d[j] -= cb * a
                obj += cb * self.rhs[r]
        return d, obj

    def pivot(self, r: int, j: int, d: List[Fraction]) -> None:
        row = self.T[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            row[:] = [a * inv if a else a for a in row]
            self.rhs[r] *= inv
        nz = [k for k, a in enumerate(row) if a]
        rr = self.rhs[r]
        for k, other in enumerate(self.T):
            if k == r:
                continue
            f = other[j]
            if f:
                for q in nz:
                    other[q] -= f * row[q]
                self.rhs[k] -= f * rr
        f = d[j]
        if f:
            for q in nz:
                d[q] -= f * row[q]
        self.basis[r] = j
        self.pivots += 1

    def run(self, d: List[Fraction], allowed: Callable[[int], bool]) -> Optional[int]:
        """Bland's rule until optimal (returns None) or unbounded (returns entering column)."""
        while True:
            entering = next((j for j in range(self.ncols) if d[j] < 0 and allowed(j)), None)
            if entering is None:
                return None
            best = None
            for r, row in enumerate(self.T):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[r] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return entering
            self.pivot(best[1], entering, d)


def _canonical(lp: FiniteLP):
    """Map to  min cc . z,  A z >= hh,  z >= 0  by splitting free columns and '=' rows."""
    sgn = 1 if lp.direction == "min" else -1
    cols: List[Tuple[int, int]] = []
    for j, b in enumerate(lp.bounds):
        cols.append((j, 1))
        if b == "free":
            cols.append((j, -1))
    rows: List[Tuple[int, int]] = []
    for i, s in enumerate(lp.senses):
        if s in (">=", "="):
            rows.append((i, 1))
        if s in ("<=", "="):
            rows.append((i, -1))
    A = [[rs * cs * lp.G[i][j] for (j, cs) in cols] for (i, rs) in rows]
    hh = [rs * lp.h[i] for (i, rs) in rows]
    cc = [sgn * cs * lp.c[j] for (j, cs) in cols]
    return cols, rows, A, hh, cc


def _to_original_rows(lp: FiniteLP, rows, y_canon) -> List[Fraction]:
    w = [Fraction(0)] * lp.m
    for (i, rs), yr in zip(rows, y_canon):
        w[i] += rs * yr
    return w


def _to_original_cols(lp: FiniteLP, cols, z) -> List[Fraction]:
    x = [Fraction(0)] * lp.n
    for (j, cs), zj in zip(cols, z):
        x[j] += cs * zj
    return x


def solve(lp: FiniteLP) -> LPSolution:
    """Solve ``lp`` exactly; the returned certificate has been re-verified."""
    lp.validate()
    cols, rows, A, hh, cc = _canonical(lp)
    nx, mr = len(cols), len(rows)
    ncols = nx + 2 * mr
    art0 = nx + mr
    flip = [1 if hr >= 0 else -1 for hr in hh]
    T = []
    for r in range(mr):
        f = flip[r]
        row = [f * a for a in A[r]] + [Fraction(0)] * (2 * mr)
        row[nx + r] = Fraction(-f)
        row[art0 + r] = Fraction(1)
        T.append(row)
    tab = _Tableau(T, [flip[r] * hh[r] for r in range(mr)], [art0 + r for r in range(mr)], ncols)

    # phase 1: minimise the sum of artificials
    cost1 = [Fraction(0)] * art0 + [Fraction(1)] * mr
    d1, _ = tab.reduced_costs(cost1)
    tab.run(d1, lambda j: True)
    infeas = sum((tab.rhs[r] for r, b in enumerate(tab.basis) if b >= art0), Fraction(0))
    if infeas > 0:
        # phase-1 duals pi_r = 1 - d1[artificial r]; multiplier of canonical row r is flip_r * pi_r
        y = [flip[r] * (1 - d1[art0 + r]) for r in range(mr)]
        sol = LPSolution("infeasible", POS_INF if lp.direction == "min" else NEG_INF,
                         farkas=_to_original_rows(lp, rows, y), pivots=tab.pivots)
        certify(lp, sol)
        return sol

    # drive zero-level artificials out of the basis where possible
    for r in range(mr):
        if tab.basis[r] >= art0:
            j = next((k for k in range(art0) if tab.T[r][k] != 0), None)
            if j is not None:
                tab.pivot(r, j, d1)

    cost2 = cc + [Fraction(0)] * (2 * mr)
    d2, _ = tab.reduced_costs(cost2)
    entering = tab.run(d2, lambda j: j < art0)

    z = [Fraction(0)] * ncols
    for r, b in enumerate(tab.basis):
        z[b] = tab.rhs[r]
    x = _to_original_cols(lp, cols, z[:nx])
    sgn = 1 if lp.direction == "min" else -1

    if entering is not None:
        dz = [Fraction(0)] * ncols
        dz[entering] = Fraction(1)
        for r, b in enumerate(tab.basis):
            dz[b] -= tab.T[r][entering]
        sol = LPSolution("unbounded", NEG_INF if lp.direction == "min" else POS_INF,
                         primal=x, ray=_to_original_cols(lp, cols, dz[:nx]),
                         basis=list(tab.basis), pivots=tab.pivots)
        certify(lp, sol)
        return sol

    # phase-2 duals: artificial cost is 0, so d2[artificial r] = -pi_r
    y = [flip[r] * -d2[art0 + r] for r in range(mr)]
    w = _to_original_rows(lp, rows, y)
    dual = [sgn * wi for wi in w]
    sol = LPSolution("optimal", ExtendedReal.of(lp.objective(x)), primal=x, dual=dual,
                     basis=list(tab.basis), pivots=tab.pivots)
    certify(lp, sol)
    return sol


def dual_of(lp: FiniteLP) -> FiniteLP:
    """The LP dual, with rows first normalised so every dual variable is >= 0 or free.

    min c.x s.t. G x (>=,=) h  ->  max h.y s.t. G^T y (<=, =) c ;
    max c.x s.t. G x (<=,=) h  ->  min h.y s.t. G^T y (>=, =) c .
    Rows of the wrong orientation are negated first, so the dual variables
    of such rows are the negated multipliers reported by :func:`solve`.
    """
    lp.validate()
    natural = ">=" if lp.direction == "min" else "<="
    G, h, ybounds = [], [], []
    for row, hi, s in zip(lp.G, lp.h, lp.senses):
        if s == "=" or s == natural:
            G.append(list(row))
            h.append(hi)
        else:
            G.append([-a for a in row])
            h.append(-hi)
        ybounds.append("free" if s == "=" else "nonneg")
    col_sense = "<=" if lp.direction == "min" else ">="
    GT = [[G[i][j] for i in range(lp.m)] for j in range(lp.n)]
    senses = ["=" if b == "free" else col_sense for b in lp.bounds]
    return FiniteLP.build("max" if lp.direction == "min" else "min", h, GT, lp.c, senses, ybounds)


def dual_multipliers_in_dual_variables(lp: FiniteLP, y: Sequence) -> List[Fraction]:
    """Translate :func:`solve`'s row multipliers into the variables of :func:`dual_of`."""
    natural = ">=" if lp.direction == "min" else "<="
    return [yi if (s == "=" or s == natural) else -yi for yi, s in zip(y, lp.senses)]


def subgradient_check(value_at: Callable[[Sequence], ExtendedReal], b: Sequence, ystar: Sequence,
                      perturbations: Sequence[Sequence], tol=0):
    """Test v(b') >= v(b) + <b' - b, ystar> - tol for every perturbation b'.

    Returns ``(passed, witnesses)`` where each witness is
    ``(b', v(b'), v(b) + <b' - b, ystar>)``.
    """
    vb = ExtendedReal.of(value_at(b))
    if not vb.is_finite:
        raise ValueError("value at b must be finite")
    witnesses = []
    for bp in perturbations:
        vbp = ExtendedReal.of(value_at(bp))
        if vbp == POS_INF:
            continue
        rhs = vb + sum((Fraction(p) - Fraction(q)) * Fraction(s) if not isinstance(s, float)
                       else (float(p) - float(q)) * s for p, q, s in zip(bp, b, ystar))
        if not vbp >= rhs - tol:
            witnesses.append((tuple(bp), vbp, rhs))
    return not witnesses, witnesses
