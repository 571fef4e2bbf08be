"""Truncated Laurent series in one small parameter ε with exact coefficients."""

from fractions import Fraction
from typing import Any, Dict, Mapping, Optional

from dskplab.errors import TruncationError
from dskplab.projective import GaussianRational

_SCALARS = (int, Fraction, GaussianRational)


def _min_precision(*values: Optional[int]) -> Optional[int]:
    known = [v for v in values if v is not None]
    return min(known) if known else None


class EpsilonSeries:
    """Σ c_e ε^e known up to O(ε^precision); precision None means exact.

    Coefficients at exponents >= precision are never stored. Two series compare equal only
    when their difference is the exact zero, so truncated series are never "zero".
    """

    __slots__ = ("terms", "precision")

    def __init__(
        self, terms: Optional[Mapping[int, Any]] = None, precision: Optional[int] = None
    ):
        self.precision = precision
        self.terms: Dict[int, Any] = {}
        for e, c in (terms or {}).items():
            if c and (precision is None or e < precision):
                self.terms[e] = c

    @classmethod
    def monomial(cls, coeff, exponent: int, precision: Optional[int] = None) -> "EpsilonSeries":
        """coeff ε^exponent, optionally marked as known only up to O(ε^precision)."""
        return cls({exponent: coeff}, precision)

    @classmethod
    def constant(cls, value) -> "EpsilonSeries":
        return cls({0: value})

    @staticmethod
    def _lift(other):
        if isinstance(other, EpsilonSeries):
            return other
        if isinstance(other, _SCALARS):
            return EpsilonSeries.constant(other)
        return None

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    @property
    def valuation(self) -> Optional[int]:
        """Smallest exponent with a known nonzero coefficient."""
        return min(self.terms) if self.terms else None

    def _valuation_bound(self) -> Optional[int]:
        # None stands for +infinity (exact zero)
        if self.terms:
            return min(self.terms)
        return self.precision

    def coefficient(self, exponent: int):
        """Coefficient of ε^exponent.

        Raises:
            TruncationError: If exponent is at or beyond the precision
        """
        if self.precision is not None and exponent >= self.precision:
            raise TruncationError(
                f"Coefficient of ε^{exponent} is unknown at precision {self.precision}"
            )
        return self.terms.get(exponent, 0)

    def leading_coefficient(self):
        """Coefficient of the valuation term.

        Raises:
            TruncationError: If no nonzero coefficient is known
        """
        if not self.terms:
            raise TruncationError(
                "Series is exactly zero"
                if self.is_exact
                else f"No nonzero coefficient below ε^{self.precision}"
            )
        return self.terms[min(self.terms)]

    def truncated(self, precision: int) -> "EpsilonSeries":
        return EpsilonSeries(self.terms, _min_precision(self.precision, precision))

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return EpsilonSeries(terms, _min_precision(self.precision, other.precision))

    __radd__ = __add__

    def __neg__(self):
        return EpsilonSeries({e: -c for e, c in self.terms.items()}, self.precision)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if (self.is_exact and not self.terms) or (other.is_exact and not other.terms):
            return EpsilonSeries()
        left_bound, right_bound = self._valuation_bound(), other._valuation_bound()
        precision = _min_precision(
            None if self.precision is None else self.precision + right_bound,
            None if other.precision is None else other.precision + left_bound,
        )
        terms: Dict[int, Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if precision is None or e < precision:
                    terms[e] = terms.get(e, 0) + c1 * c2
        return EpsilonSeries(terms, precision)

    __rmul__ = __mul__

    def inverse(self) -> "EpsilonSeries":
        """1 / self.

        A truncated series with valuation v and precision P has an inverse known up to
        O(ε^(P - 2v)).

        Raises:
            ZeroDivisionError: For the exact zero
            TruncationError: If no leading coefficient is known, or for an exact series with
                several terms
        """
        if not self.terms:
            if self.is_exact:
                raise ZeroDivisionError("Division by the exact zero series")
            raise TruncationError(f"Cannot invert a series unknown below ε^{self.precision}")
        v = self.valuation
        lead = self.terms[v]
        if self.is_exact:
            if len(self.terms) > 1:
                raise TruncationError(
                    "Inverting an exact series with several terms needs a precision"
                )
            return EpsilonSeries({-v: 1 / Fraction(lead) if isinstance(lead, int) else 1 / lead})
        relative = self.precision - v
        unit = [self.terms.get(v + n, 0) for n in range(relative)]
        inv = [1 / Fraction(lead) if isinstance(lead, int) else 1 / lead]
        for n in range(1, relative):
            acc = 0
            for m in range(1, n + 1):
                if unit[m]:
                    acc = acc + unit[m] * inv[n - m]
            inv.append(-acc * inv[0])
        return EpsilonSeries({n - v: c for n, c in enumerate(inv)}, self.precision - 2 * v)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = EpsilonSeries.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        difference = self - other
        return difference.is_exact and not difference.terms

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c})ε^{e}" for e, c in sorted(self.terms.items())) or "0"
        if self.precision is None:
            return f"EpsilonSeries({body})"
        return f"EpsilonSeries({body} + O(ε^{self.precision}))"


def series_pivot_rank(x) -> tuple:
    """Pivot ranking for elimination: smallest known valuation first, unknown entries last."""
    if not isinstance(x, EpsilonSeries):
        return (0, 0)
    if x.terms:
        return (0, x.valuation)
    return (1, 0)
