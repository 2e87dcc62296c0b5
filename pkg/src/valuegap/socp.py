"""Finite-dimensional conic LP whose proper value function is not l.s.c.

Data: X = R^2, Y = R^3, A(x1, x2) = (x1, x2, 0), cost c* = (0, 1),
P = R x R_+ and Q the rotated cone {y1, y3 >= 0, y2^2 <= 2 y1 y3}.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Tuple

from valuegap.convex import FnOracle
from valuegap.extended import ExtendedReal, POS_INF


class SocPoint(NamedTuple):
    y1: Fraction
    y2: Fraction
    y3: Fraction


COST = (0, 1)


def point(y1, y2, y3) -> SocPoint:
    return SocPoint(Fraction(y1), Fraction(y2), Fraction(y3))


def q_member(y: Sequence) -> bool:
    y1, y2, y3 = y
    return y1 >= 0 and y3 >= 0 and y2 * y2 <= 2 * y1 * y3


def p_member(x: Sequence) -> bool:
    return x[1] >= 0


def p_dual_member(u: Sequence) -> bool:
    """P+ = {0} x R_+."""
    return u[0] == 0 and u[1] >= 0


def apply_A(x: Sequence) -> Tuple:
    return (x[0], x[1], Fraction(0))


def apply_A_star(y: Sequence) -> Tuple:
    return (y[0], y[1])


def value(y: Sequence) -> ExtendedReal:
    y1, y2, y3 = y
    if y3 < 0:
        return ExtendedReal.of(Fraction(0) if not isinstance(y3, float) else 0.0)
    if y3 == 0 and y2 >= 0:
        return ExtendedReal.of(y2)
    return POS_INF


def default_box(y: Sequence) -> Tuple[Fraction, Fraction, Fraction]:
    """A box containing the minimisers x1 = y1 and x1 = y1 - y2^2 / (2 y3)."""
    y1, y2, y3 = (Fraction(v) for v in y)
    norm_bound = abs(y1) + abs(y2) + abs(y3)
    half = 2 * (1 + abs(y1) + norm_bound)
    if y3 < 0:
        half = max(half, 2 * (abs(y1) + y2 * y2 / (2 * -y3)) + 1)
    return (-half, half, 2 * (1 + abs(y2)))


def brute_value(y: Sequence, box: Optional[Sequence] = None, grid: int = 401) -> ExtendedReal:
    """Minimum of x2 over the grid points of the box that are feasible for y.

    Feasibility is tested exactly on rational grid points.  In a column of
    fixed x1 the feasible x2 form an interval around y2, so the lowest
    feasible grid index is located from a float estimate and then confirmed
    exactly against its neighbours; this returns the same minimum as an
    exhaustive scan of the grid.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    y1, y2, y3 = (Fraction(v) for v in y)
    lo, hi, x2hi = (Fraction(v) for v in (box if box is not None else default_box(y)))
    steps = grid - 1
    if y3 > 0 or x2hi < 0:
        return POS_INF

    def ok(a: Fraction, k: int) -> bool:
        return q_member((a, x2hi * k / steps - y2, -y3))

    best: Optional[int] = None
    for i in range(steps, -1, -1):
        a = lo + (hi - lo) * i / steps - y1
        if a < 0:
            break
        if x2hi == 0:
            k = 0 if ok(a, 0) else None
        else:
            # feasible x2 satisfy |x2 - y2| <= sqrt(2 a |y3|)
            s = math.sqrt(float(2 * a * -y3))
            k = min(steps, max(0, math.ceil((float(y2) - s) * steps / float(x2hi))))
            while k > 0 and ok(a, k - 1):
                k -= 1
            while k <= steps and not ok(a, k) and x2hi * k / steps < y2:
                k += 1
            if k > steps or not ok(a, k):
                k = None
        if k is not None and (best is None or k < best):
            best = k
            if best == 0:
                break
    return POS_INF if best is None else ExtendedReal.of(x2hi * best / steps)


def dual_feasible(ystar: Sequence) -> bool:
    """ystar in Q+ (= Q) and c* - A* ystar in P+."""
    if not q_member(ystar):
        return False
    a = apply_A_star(ystar)
    return p_dual_member((COST[0] - a[0], COST[1] - a[1]))


def dual_feasible_closed_form(ystar: Sequence) -> bool:
    return ystar[0] == 0 and ystar[1] == 0 and ystar[2] >= 0


def biconjugate_value(y: Sequence) -> ExtendedReal:
    """sup of <y, y*> over the dual feasible set {(0, 0, s) : s >= 0}."""
    y3 = y[2]
    if y3 > 0:
        return POS_INF
    return ExtendedReal.of(Fraction(0))


def zeta(y: Sequence):
    """n -> (y1, y2, -1/n), the approach sequence from below in y3."""
    y1, y2, _ = y
    return lambda n: SocPoint(Fraction(y1), Fraction(y2), Fraction(-1, n))


# -- sampling -------------------------------------------------------------

def _rat(rng: random.Random, lo: int, hi: int, den: int) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def sample_domain(count: int, seed: int) -> list:
    """Rational points of dom v, alternating between its two pieces."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        if k % 2 == 0:
            out.append(SocPoint(_rat(rng, -5, 5, 8), _rat(rng, 0, 5, 8), Fraction(0)))
        else:
            y3 = -Fraction(rng.randint(1, 40), 8)
            out.append(SocPoint(_rat(rng, -5, 5, 8), _rat(rng, -5, 5, 8), y3))
    return out


def sample_brute_points(count: int, seed: int) -> list:
    """Points of dom v whose minimisers sit inside [-10, 10] x [0, 10] on a 401-grid.

    On the piece y3 = 0 the only feasible x2 is y2 itself, so y2 is drawn on
    the x2 grid (multiples of 1/40) and y1 on the x1 grid (multiples of 1/20).
    On y3 < 0 the point x = (y1 + y2^2 / (2|y3|), 0) must fit in the box.
    """
    rng = random.Random(seed)
    out = []
    for k in range(count):
        if k % 2 == 0:
            out.append(SocPoint(Fraction(rng.randint(-200, 180), 20), Fraction(rng.randint(0, 360), 40), Fraction(0)))
        else:
            y3 = -Fraction(rng.randint(4, 16), 8)
            out.append(SocPoint(_rat(rng, -5, 0, 20), _rat(rng, -3, 3, 20), y3))
    return out


def value_oracle() -> FnOracle:
    return FnOracle(3, value, sample_domain, exact=True, name="soc value")


def sample_cone(rng: random.Random) -> SocPoint:
    """A rational point of Q: y1 = a^2, y3 = b^2 / 2, y2 = t a b with |t| <= 1."""
    a = _rat(rng, 0, 4, 7)
    b = _rat(rng, 0, 4, 7)
    t = _rat(rng, -1, 1, 9)
    return SocPoint(a * a, t * a * b, b * b / 2)


def separating_point(u: Sequence) -> SocPoint:
    """For u outside Q, a rational q in Q with <q, u> < 0."""
    u1, u2, u3 = (Fraction(v) for v in u)
    if q_member((u1, u2, u3)):
        raise ValueError("u lies in Q")
    if u1 < 0:
        return SocPoint(Fraction(1), Fraction(0), Fraction(0))
    if u3 < 0:
        return SocPoint(Fraction(0), Fraction(0), Fraction(1))
    # here u2^2 > 2 u1 u3; look for q = (a, -u2, c) with 2ac = u2^2
    s = u2 * u2
    if u1 == 0 or u3 == 0:
        c = s / (2 * (u3 + 1)) if u3 > 0 else Fraction(1)
        a = s / (2 * c)
        if u1 > 0:
            a = s / (2 * (u1 + 1))
            c = s / (2 * a)
        return SocPoint(a, -u2, c)
    c = Fraction(abs(float(u2)) * math.sqrt(float(u1) / (2 * float(u3)))).limit_denominator(10**12)
    a = s / (2 * c)
    q = SocPoint(a, -u2, c)
    if a * u1 - s + c * u3 >= 0:
        raise ArithmeticError("u is too close to the boundary of Q to separate with this rational grid")
    return q
