"""Exact dual numbers a + bε with ε² = 0 for first-order derivatives."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from dskplab.projective import GaussianRational


@dataclass(frozen=True)
class Dual:
    """Dual number a + bε over an exact field."""

    a: Any  # Real part
    b: Any = 0  # Dual part

    @staticmethod
    def _coerce(other):
        if isinstance(other, Dual):
            return other
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return Dual(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Dual(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.a == 0:
            raise ZeroDivisionError("Dual division by zero real part (can't divide by ε)")
        return Dual(self.a / o.a, (self.b * o.a - self.a * o.b) / (o.a * o.a))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return Dual(1) / (self ** (-exponent))
        if exponent == 0:
            return Dual(1)
        return Dual(self.a ** exponent, exponent * self.a ** (exponent - 1) * self.b)

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self) -> str:
        return f"{self.a} + {self.b}ε"
