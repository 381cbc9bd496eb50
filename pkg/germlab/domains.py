"""
Exact coefficient domains.

Every scalar that flows through germlab belongs to one of three integral
domains:

- the rationals, as :class:`fractions.Fraction` (plain ``int`` is accepted on
  input and promoted);
- the Laurent extension :class:`ExpSum`, finite sums ``sum c_r * e^r`` with
  rational exponents ``r``, which holds flow coefficients at a fixed rational
  time;
- quasipolynomials (:class:`germlab.quasipoly.Quasipolynomial`), used for
  symbolic times and generic ranks.

Non-rational domains implement a small protocol: ``lift(scalar)``,
``exquo(other)``, ``inverse()``, truthiness as the exact zero test, and
``laurent_codec(values)``, which embeds a batch of values into a Laurent
polynomial ring over sympy's ``QQ`` where exact division and ranks are
computed.

Caveats
-------
Zero-testing in :class:`ExpSum` assumes that exponentials of distinct
rational numbers are linearly independent over the rationals
(Lindemann-Weierstrass). This is a theorem, not something checked at
runtime.
"""
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Dict, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyRing

from .errors import InexactDivisionError, NotInvertibleError

__all__ = (
    "Rational",
    "ExpSum",
    "as_scalar",
    "is_rational",
    "is_zero",
    "exquo",
    "inverse",
    "format_rational",
    "format_scalar",
    "to_qq",
    "from_qq",
    "laurent_ring",
    "laurent_exquo",
)

Rational = Union[int, Fraction]
_Exponent = Tuple[int, ...]


def as_scalar(value):
    """Promote ``int`` to :class:`~fractions.Fraction`, leave others alone."""
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    return value


def is_rational(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def is_zero(value) -> bool:
    """Exact zero test, valid in every supported domain."""
    return not value


def exquo(a, b):
    """
    Exact quotient ``a / b`` in the common domain of ``a`` and ``b``.

    Raises
    ------
    ZeroDivisionError
        If ``b`` is zero.
    ~germlab.errors.InexactDivisionError
        If ``b`` does not divide ``a``.
    """
    if is_zero(b):
        raise ZeroDivisionError("exquo by zero")
    if is_rational(b):
        if is_rational(a):
            return Fraction(a) / b
        return a * (1 / Fraction(b))
    if is_rational(a):
        a = b.lift(a)
    return a.exquo(b)


def inverse(a):
    """Multiplicative inverse of a unit."""
    if is_zero(a):
        raise NotInvertibleError("inverse", "0")
    if is_rational(a):
        return 1 / Fraction(a)
    return a.inverse()


def format_rational(value: Rational) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_scalar(value) -> str:
    if is_rational(value):
        return format_rational(value)
    return str(value)


def to_qq(value: Rational):
    """Rational as an element of sympy's ``QQ``."""
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


@lru_cache(maxsize=None)
def laurent_ring(width: int) -> PolyRing:
    """Polynomial ring over ``QQ`` in ``u0 .. u{width-1}``, lex order."""
    return PolyRing(",".join(f"u{i}" for i in range(width)), QQ, lex)


def _lowest(terms: Dict[_Exponent, Fraction], width: int) -> _Exponent:
    return tuple(min(e[i] for e in terms) for i in range(width))


def laurent_exquo(
    num: Dict[_Exponent, Fraction], den: Dict[_Exponent, Fraction]
) -> Dict[_Exponent, Fraction]:
    """
    Exact division of multivariate Laurent polynomials.

    Polynomials are maps from integer exponent tuples (negative entries
    allowed) to nonzero rationals. Both sides are shifted into the
    polynomial ring so that no variable divides them; the Laurent quotient
    exists exactly when the shifted denominator divides the shifted
    numerator there.
    """
    if not den:
        raise ZeroDivisionError("laurent_exquo by zero")
    if not num:
        return {}
    width = len(next(iter(den)))
    if width == 0:
        return {(): Fraction(num[()]) / den[()]}
    ring = laurent_ring(width)
    low_num, low_den = _lowest(num, width), _lowest(den, width)

    def shifted(terms, low):
        return ring.from_dict(
            {
                tuple(a - b for a, b in zip(e, low)): to_qq(c)
                for e, c in terms.items()
            }
        )

    try:
        quotient = shifted(num, low_num).exquo(shifted(den, low_den))
    except ExactQuotientFailed as e:
        raise InexactDivisionError() from e
    offset = tuple(a - b for a, b in zip(low_num, low_den))
    return {
        tuple(a + b for a, b in zip(e, offset)): from_qq(c)
        for e, c in quotient.items()
    }


class _ExpSumCodec:
    """Writes exponential sums as Laurent polynomials in ``e^(1/scale)``."""

    width = 1

    def __init__(self, values):
        exponents = [
            r for v in values if isinstance(v, ExpSum) for r in v._terms
        ]
        self.scale = lcm(*(r.denominator for r in exponents), 1)

    def encode(self, value) -> Dict[_Exponent, Fraction]:
        terms = ExpSum.lift(value)._terms
        return {(int(r * self.scale),): c for r, c in terms.items()}

    def decode(self, encoded) -> "ExpSum":
        return ExpSum(
            {Fraction(k, self.scale): c for (k,), c in encoded.items()}
        )


class ExpSum:
    """
    Element of the Laurent extension of the rationals by exponential units.

    Represents ``sum(c_r * e**r)`` over finitely many distinct rational
    exponents ``r``. Values are immutable.

    Examples
    --------
    >>> e_half = ExpSum.exp(Fraction(1, 2))
    >>> str(e_half * e_half + 1)
    '1 + exp(1)'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Dict[Fraction, Fraction] = None):
        self._terms: Dict[Fraction, Fraction] = {
            Fraction(r): Fraction(c) for r, c in (terms or {}).items() if c
        }
        self._hash = None

    @classmethod
    def exp(cls, exponent: Rational, coefficient: Rational = 1) -> "ExpSum":
        """The unit ``coefficient * e**exponent``."""
        return cls({Fraction(exponent): Fraction(coefficient)})

    @staticmethod
    def lift(value) -> "ExpSum":
        if isinstance(value, ExpSum):
            return value
        return ExpSum({Fraction(0): Fraction(value)})

    @property
    def terms(self) -> Dict[Fraction, Fraction]:
        return dict(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or set(self._terms) == {Fraction(0)}

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._terms.get(Fraction(0), Fraction(0))

    def simplify(self):
        """Return a :class:`~fractions.Fraction` when possible, else self."""
        return self.to_rational() if self.is_rational() else self

    def __add__(self, other):
        if not isinstance(other, ExpSum):
            if not is_rational(other):
                return NotImplemented
            other = ExpSum.lift(other)
        terms = dict(self._terms)
        for r, c in other._terms.items():
            terms[r] = terms.get(r, 0) + c
        return ExpSum(terms)

    __radd__ = __add__

    def __neg__(self):
        return ExpSum({r: -c for r, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ExpSum) and not is_rational(other):
            return NotImplemented
        return self + (-ExpSum.lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExpSum):
            if not is_rational(other):
                return NotImplemented
            return ExpSum({r: c * other for r, c in self._terms.items()})
        terms: Dict[Fraction, Fraction] = {}
        for r1, c1 in self._terms.items():
            for r2, c2 in other._terms.items():
                terms[r1 + r2] = terms.get(r1 + r2, 0) + c1 * c2
        return ExpSum(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ExpSum.lift(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "ExpSum":
        if len(self._terms) != 1:
            raise NotInvertibleError("inverse", str(self))
        (r, c), = self._terms.items()
        return ExpSum({-r: 1 / c})

    @staticmethod
    def laurent_codec(values) -> _ExpSumCodec:
        """Common Laurent encoding of ``values`` (rationals are lifted)."""
        return _ExpSumCodec(values)

    def exquo(self, other) -> "ExpSum":
        other = ExpSum.lift(other)
        if not other:
            raise ZeroDivisionError("exquo by zero")
        codec = _ExpSumCodec((self, other))
        try:
            quotient = laurent_exquo(codec.encode(self), codec.encode(other))
        except InexactDivisionError as e:
            raise InexactDivisionError(self, other) from e
        return codec.decode(quotient)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, ExpSum):
            return self._terms == other._terms
        if is_rational(other):
            return self._terms == ExpSum.lift(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.to_rational())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for r in sorted(self._terms):
            c = self._terms[r]
            if r == 0:
                body = format_rational(abs(c))
            elif abs(c) == 1:
                body = f"exp({format_rational(r)})"
            else:
                body = f"{format_rational(abs(c))}*exp({format_rational(r)})"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"ExpSum({str(self)!r})"
