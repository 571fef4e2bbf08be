"""Sparse multivariate (Laurent) polynomials keyed by face variables.

A monomial is a tuple of (variable, exponent) pairs sorted by variable with no zero
exponents; variables are any mutually comparable hashables, face labels (i, j) in
practice. Coefficients are int, Fraction or GaussianRational.
"""

import logging
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Any, Dict, Hashable, Iterator, Mapping, Tuple

logger = logging.getLogger(__name__)

Monomial = Tuple[Tuple[Hashable, int], ...]

ONE_MONOMIAL: Monomial = ()


def _mono_zip(left: Monomial, right: Monomial) -> Iterator[Tuple[Hashable, int, int]]:
    i = j = 0
    while i < len(left) or j < len(right):
        if j >= len(right) or (i < len(left) and left[i][0] < right[j][0]):
            yield left[i][0], left[i][1], 0
            i += 1
        elif i >= len(left) or right[j][0] < left[i][0]:
            yield right[j][0], 0, right[j][1]
            j += 1
        else:
            yield left[i][0], left[i][1], right[j][1]
            i += 1
            j += 1


def mono_mul(left: Monomial, right: Monomial) -> Monomial:
    if not left:
        return right
    if not right:
        return left
    return tuple((v, a + b) for v, a, b in _mono_zip(left, right) if a + b)


def mono_div(left: Monomial, right: Monomial) -> Monomial:
    return tuple((v, a - b) for v, a, b in _mono_zip(left, right) if a - b)


def mono_cmp(left: Monomial, right: Monomial) -> int:
    """Lexicographic monomial order on the sorted variables."""
    for _, a, b in _mono_zip(left, right):
        if a != b:
            return 1 if a > b else -1
    return 0


def mono_degree(mono: Monomial) -> int:
    return sum(e for _, e in mono)


def _exact_coeff_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        if a % b == 0:
            return a // b
        return Fraction(a, b)
    return a / b


def _format_variable(var: Hashable) -> str:
    if isinstance(var, tuple):
        return "a[" + ",".join(str(x) for x in var) + "]"
    return str(var)


class MultiPoly:
    """Sparse polynomial: dict monomial -> nonzero coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Any] = None):
        self.terms: Dict[Monomial, Any] = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff:
                    self.terms[mono] = coeff

    @classmethod
    def constant(cls, value) -> "MultiPoly":
        return cls({ONE_MONOMIAL: value})

    @classmethod
    def variable(cls, var: Hashable, exponent: int = 1) -> "MultiPoly":
        if exponent == 0:
            return cls.constant(1)
        return cls({((var, exponent),): 1})

    @classmethod
    def monomial(cls, mono: Monomial, coeff=1) -> "MultiPoly":
        return cls({mono: coeff})

    @staticmethod
    def _lift(other):
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(other)

    def copy(self) -> "MultiPoly":
        result = MultiPoly()
        result.terms = dict(self.terms)
        return result

    def add_term(self, mono: Monomial, coeff) -> None:
        """In-place accumulation with cancellation."""
        value = self.terms.get(mono, 0) + coeff
        if value:
            self.terms[mono] = value
        else:
            self.terms.pop(mono, None)

    def __add__(self, other):
        other = self._lift(other)
        result = self.copy()
        for mono, coeff in other.terms.items():
            result.add_term(mono, coeff)
        return result

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if not other:
                return MultiPoly()
            return MultiPoly({m: c * other for m, c in self.terms.items()})
        result = MultiPoly()
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                result.add_term(mono_mul(m1, m2), c1 * c2)
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            if len(self.terms) != 1:
                raise ValueError("Only monomials have negative powers")
            (mono, coeff), = self.terms.items()
            inv = tuple((v, e * exponent) for v, e in mono)
            return MultiPoly({inv: _exact_coeff_div(1, coeff ** (-exponent))})
        result = MultiPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(other)
        return self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def variables(self) -> set:
        return {v for mono in self.terms for v, _ in mono}

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def max_exponent(self) -> int:
        return max((e for mono in self.terms for _, e in mono), default=0)

    def is_laurent(self) -> bool:
        return any(e < 0 for mono in self.terms for _, e in mono)

    def content(self) -> int:
        """Integer gcd of the coefficients (1 when coefficients are not all ints)."""
        g = 0
        for coeff in self.terms.values():
            if not isinstance(coeff, int):
                return 1
            g = gcd(g, coeff)
        return g or 1

    def leading_term(self) -> Tuple[Monomial, Any]:
        if not self.terms:
            raise ValueError("Zero polynomial has no leading term")
        mono = max(self.terms, key=cmp_to_key(mono_cmp))
        return mono, self.terms[mono]

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        """Quotient of an exact polynomial division.

        Raises:
            ZeroDivisionError: If divisor is zero
            ValueError: If divisor does not divide self
        """
        divisor = self._lift(divisor)
        if not divisor:
            raise ZeroDivisionError("MultiPoly division by zero")
        if len(divisor.terms) == 1:
            (dm, dc), = divisor.terms.items()
            return MultiPoly(
                {mono_div(m, dm): _exact_coeff_div(c, dc) for m, c in self.terms.items()}
            )

        lead_mono, lead_coeff = divisor.leading_term()
        remainder = self.copy()
        quotient = MultiPoly()
        while remainder:
            mono, coeff = remainder.leading_term()
            q_mono = mono_div(mono, lead_mono)
            if any(e < 0 for _, e in q_mono):
                raise ValueError("Polynomial division is not exact")
            q_coeff = _exact_coeff_div(coeff, lead_coeff)
            quotient.add_term(q_mono, q_coeff)
            for d_mono, d_coeff in divisor.terms.items():
                remainder.add_term(mono_mul(q_mono, d_mono), -q_coeff * d_coeff)
        return quotient

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            return self.exact_div(other)
        return MultiPoly({m: _exact_coeff_div(c, other) for m, c in self.terms.items()})

    def evaluate(self, assignment: Mapping[Hashable, Any]):
        """Evaluate at a variable assignment; missing variables raise KeyError."""
        total = 0
        for mono, coeff in self.terms.items():
            value = coeff
            for var, exp in mono:
                value = value * (assignment[var] ** exp)
            total = total + value
        return total

    def sorted_terms(self):
        """Terms in canonical order: lexicographic on the sorted (variable, exponent) pairs."""
        return sorted(self.terms.items(), key=lambda item: item[0])

    def to_text(self) -> str:
        """Canonical text serialization, one signed term per token."""
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = [
                _format_variable(v) if e == 1 else f"{_format_variable(v)}^{e}" for v, e in mono
            ]
            sign = "-" if _is_negative(coeff) else "+"
            magnitude = -coeff if sign == "-" else coeff
            parts.append(f"{sign}{'*'.join([str(magnitude)] + factors)}")
        return " ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self.to_text()})"


def _is_negative(coeff) -> bool:
    try:
        return coeff < 0
    except TypeError:
        return False


class RationalFunction:
    """Quotient of two MultiPoly, reduced by integer content."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: MultiPoly, denominator: MultiPoly = None):
        numerator = MultiPoly._lift(numerator)
        denominator = MultiPoly.constant(1) if denominator is None else MultiPoly._lift(denominator)
        if not denominator:
            raise ZeroDivisionError("RationalFunction with zero denominator")
        g = gcd(numerator.content(), denominator.content()) if numerator else denominator.content()
        if g > 1:
            numerator = numerator / g
            denominator = denominator / g
        self.numerator = numerator
        self.denominator = denominator

    def __add__(self, other):
        other = _lift_rational(other)
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-_lift_rational(other))

    def __rsub__(self, other):
        return _lift_rational(other) - self

    def __mul__(self, other):
        other = _lift_rational(other)
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift_rational(other)
        return RationalFunction(
            self.numerator * other.denominator, self.denominator * other.numerator
        )

    def __eq__(self, other):
        other = _lift_rational(other)
        return self.numerator * other.denominator == other.numerator * self.denominator

    __hash__ = None

    def evaluate(self, assignment: Mapping[Hashable, Any]):
        return self.numerator.evaluate(assignment) / self.denominator.evaluate(assignment)

    def __repr__(self):
        return f"RationalFunction(({self.numerator.to_text()}) / ({self.denominator.to_text()}))"


def _lift_rational(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction(MultiPoly._lift(x))
