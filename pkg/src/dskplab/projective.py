"""Exact Gaussian rationals and arithmetic on the projective line.

Values of the extended plane are plain field elements (int, Fraction, GaussianRational,
complex, or any ring element exposing the usual operators) or the INFINITY marker.
Indeterminate forms are returned as the INDETERMINATE marker instead of raising, so
callers decide whether they are an error or an expected singularity.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Tuple, Union

logger = logging.getLogger(__name__)


class GaussianRational:
    """Element re + im*i of Q(i) with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse the "p/q+r/s*i" text form.

        Accepts "3", "-1/2", "i", "-2*i", "1/2-3/4*i".

        Raises:
            ValueError: If the text is not a Gaussian rational
        """
        s = text.replace(" ", "")
        if not s:
            raise ValueError("Empty Gaussian rational")
        if not s.endswith("i"):
            return cls(Fraction(s))

        body = s[:-1]
        if body.endswith("*"):
            body = body[:-1]
        split = max(body.rfind("+"), body.rfind("-"))
        if split > 0:
            real_text, imag_text = body[:split], body[split:]
        else:
            real_text, imag_text = "0", body

        if imag_text in ("", "+"):
            imag = Fraction(1)
        elif imag_text == "-":
            imag = Fraction(-1)
        else:
            imag = Fraction(imag_text)
        return cls(Fraction(real_text), imag)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        norm = o.re * o.re + o.im * o.im
        if norm == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / norm, num.im / norm)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return GaussianRational(1) / (self ** (-exponent))
        result = GaussianRational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, complex):
                return self.re == other.real and self.im == other.imag
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus re² + im²."""
        return self.re * self.re + self.im * self.im

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def __repr__(self):
        return f"GaussianRational({self})"


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"


class _Indeterminate:
    """Outcome of ∞−∞, 0·∞, 0/0 and ∞/∞."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INDETERMINATE"


INFINITY = _Infinity()
INDETERMINATE = _Indeterminate()

# A point of the projective line: a field element or INFINITY
ProjectiveValue = Union[Any, _Infinity]


def is_infinite(x) -> bool:
    return x is INFINITY


def is_indeterminate(x) -> bool:
    return x is INDETERMINATE


def is_zero(x) -> bool:
    """Return True for the zero element of any supported field."""
    if x is INFINITY or x is INDETERMINATE:
        return False
    return x == 0


def proj_add(x, y):
    """x + y on the projective line."""
    if x is INDETERMINATE or y is INDETERMINATE:
        return INDETERMINATE
    if x is INFINITY and y is INFINITY:
        return INDETERMINATE
    if x is INFINITY or y is INFINITY:
        return INFINITY
    return x + y


def proj_neg(x):
    if x is INFINITY or x is INDETERMINATE:
        return x
    return -x


def proj_sub(x, y):
    """x - y on the projective line."""
    return proj_add(x, proj_neg(y))


def proj_mul(x, y):
    """x * y on the projective line."""
    if x is INDETERMINATE or y is INDETERMINATE:
        return INDETERMINATE
    if x is INFINITY or y is INFINITY:
        if is_zero(x) or is_zero(y):
            return INDETERMINATE
        return INFINITY
    return x * y


def proj_div(x, y):
    """x / y on the projective line."""
    if x is INDETERMINATE or y is INDETERMINATE:
        return INDETERMINATE
    if x is INFINITY:
        return INDETERMINATE if y is INFINITY else INFINITY
    if y is INFINITY:
        return x * 0
    if is_zero(y):
        return INDETERMINATE if is_zero(x) else INFINITY
    return x / y


def to_homogeneous(x) -> Tuple[Any, Any]:
    """Homogeneous coordinates [p:q] of a projective value."""
    if x is INFINITY:
        return 1, 0
    if x is INDETERMINATE:
        raise ValueError("INDETERMINATE has no homogeneous coordinates")
    return x, 1


def from_homogeneous(p, q):
    """Projective value of [p:q]; [0:0] is INDETERMINATE."""
    if is_zero(q):
        return INDETERMINATE if is_zero(p) else INFINITY
    return p / q


@dataclass(frozen=True)
class MobiusMap:
    """Projective map z -> (alpha*z + beta) / (gamma*z + delta)."""

    alpha: Any
    beta: Any
    gamma: Any
    delta: Any

    def __post_init__(self):
        if is_zero(self.alpha * self.delta - self.beta * self.gamma):
            raise ValueError("Mobius map must have alpha*delta - beta*gamma != 0")

    def __call__(self, z):
        if z is INDETERMINATE:
            return INDETERMINATE
        p, q = to_homogeneous(z)
        return from_homogeneous(
            self.alpha * p + self.beta * q,
            self.gamma * p + self.delta * q,
        )

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.delta, -self.beta, -self.gamma, self.alpha)

    @classmethod
    def random(cls, rng: random.Random, bound: int = 5) -> "MobiusMap":
        """Draw a map with small nonzero integer coefficients."""
        while True:
            coeffs = [rng.choice([c for c in range(-bound, bound + 1) if c]) for _ in range(4)]
            if coeffs[0] * coeffs[3] - coeffs[1] * coeffs[2] != 0:
                return cls(*(Fraction(c) for c in coeffs))


def parse_value(text: str):
    """Parse "inf", "p/q" or "p/q+r/s*i" into a projective value."""
    s = text.strip()
    if s.lower() in ("inf", "infinity", "∞"):
        return INFINITY
    value = GaussianRational.parse(s)
    return value.re if value.im == 0 else value


def format_value(x) -> str:
    """Canonical text form of a projective value.

    Raises:
        ValueError: For INDETERMINATE, which is never serialized
    """
    if x is INFINITY:
        return "inf"
    if x is INDETERMINATE:
        raise ValueError("INDETERMINATE values cannot be serialized")
    if isinstance(x, GaussianRational) and x.im == 0:
        return str(x.re)
    return str(x)


def random_rational(rng: random.Random, bound: int = 20, max_den: int = 7) -> Fraction:
    """Random nonzero rational with |numerator| <= bound."""
    while True:
        value = Fraction(rng.randint(-bound, bound), rng.randint(1, max_den))
        if value:
            return value


def random_gaussian(rng: random.Random, bound: int = 20, max_den: int = 7) -> GaussianRational:
    """Random Gaussian rational with nonzero real part."""
    return GaussianRational(
        random_rational(rng, bound, max_den),
        Fraction(rng.randint(-bound, bound), rng.randint(1, max_den)),
    )
