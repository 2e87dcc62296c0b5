"""Extended real numbers: finite reals plus +inf and -inf."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Union

Number = Union[int, Fraction, float]


class UndefinedOperation(ArithmeticError):
    """Raised for +inf + -inf and similar undefined combinations."""


@dataclass(frozen=True)
class ExtendedReal:
    tag: str
    value: Number | None = None

    def __post_init__(self) -> None:
        if self.tag not in ("finite", "pos-inf", "neg-inf"):
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.tag == "finite":
            if self.value is None or (isinstance(self.value, float) and not math.isfinite(self.value)):
                raise ValueError("finite ExtendedReal needs a finite value")
        elif self.value is not None:
            raise ValueError("infinite ExtendedReal carries no value")

    @classmethod
    def of(cls, x: "Number | ExtendedReal") -> "ExtendedReal":
        """Coerce a number (float infinities included) to an ExtendedReal."""
        if isinstance(x, ExtendedReal):
            return x
        if isinstance(x, bool) or not isinstance(x, Real):
            raise TypeError(f"cannot coerce {type(x).__name__} to ExtendedReal")
        if isinstance(x, float):
            if math.isnan(x):
                raise UndefinedOperation("NaN is not an extended real")
            if math.isinf(x):
                return POS_INF if x > 0 else NEG_INF
        return cls("finite", x)

    @property
    def is_finite(self) -> bool:
        return self.tag == "finite"

    def __float__(self) -> float:
        if self.tag == "pos-inf":
            return math.inf
        if self.tag == "neg-inf":
            return -math.inf
        return float(self.value)

    def _rank(self) -> int:
        return {"neg-inf": -1, "finite": 0, "pos-inf": 1}[self.tag]

    def _cmp(self, other) -> int:
        other = ExtendedReal.of(other)
        a, b = self._rank(), other._rank()
        if a != b:
            return (a > b) - (a < b)
        if a != 0:
            return 0
        return (self.value > other.value) - (self.value < other.value)

    def __eq__(self, other) -> bool:
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.tag, self.value))

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __neg__(self) -> "ExtendedReal":
        if self.tag == "pos-inf":
            return NEG_INF
        if self.tag == "neg-inf":
            return POS_INF
        return ExtendedReal("finite", -self.value)

    def __add__(self, other) -> "ExtendedReal":
        other = ExtendedReal.of(other)
        if self.is_finite and other.is_finite:
            return ExtendedReal("finite", self.value + other.value)
        tags = {self.tag, other.tag}
        if tags == {"pos-inf", "neg-inf"}:
            raise UndefinedOperation("+inf + -inf is undefined")
        return POS_INF if "pos-inf" in tags else NEG_INF

    __radd__ = __add__

    def __sub__(self, other) -> "ExtendedReal":
        return self + (-ExtendedReal.of(other))

    def __rsub__(self, other) -> "ExtendedReal":
        return ExtendedReal.of(other) + (-self)

    def __mul__(self, t) -> "ExtendedReal":
        # only scaling by a finite real is supported; 0 * inf is rejected
        if isinstance(t, ExtendedReal):
            if not t.is_finite:
                raise UndefinedOperation("product of extended reals is not supported")
            t = t.value
        if self.is_finite:
            return ExtendedReal("finite", self.value * t)
        if t == 0:
            raise UndefinedOperation("0 * inf is undefined")
        return self if t > 0 else -self

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if self.tag == "pos-inf":
            return "+inf"
        if self.tag == "neg-inf":
            return "-inf"
        return f"ExtendedReal({self.value!r})"

    def __str__(self) -> str:
        if not self.is_finite:
            return repr(self)
        return str(self.value)


POS_INF = ExtendedReal("pos-inf")
NEG_INF = ExtendedReal("neg-inf")


def ext(x: "Number | ExtendedReal") -> ExtendedReal:
    return ExtendedReal.of(x)
