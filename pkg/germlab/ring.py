"""
Multi-index combinatorics and truncated multivariate series (jets).

A :class:`Jet` is an element of the truncated algebra ``C_m[x]``: a sparse
map from :class:`MultiIndex` to nonzero scalars, all of degree at most the
truncation order. Scalars may come from any domain in
:mod:`germlab.domains` or be quasipolynomials. Products of rational jets
are computed in a sympy ``PolyRing`` over ``QQ`` (``grlex`` order) and
truncated by total degree; polynomial text is read by sympy's expression
parser.
"""
import logging
import re
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from tokenize import TokenError
from typing import Callable, Dict, Iterable, Iterator, List, Mapping
from typing import Optional, Sequence, Tuple

from sympy import Expr, Poly, Symbol
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import BasePolynomialError
from sympy.polys.rings import PolyRing

from .domains import as_scalar, format_scalar, format_rational, is_rational
from .domains import from_qq, to_qq
from .errors import (
    DegreeOverflowError,
    PolynomialSyntaxError,
    ShapeMismatchError,
    UnknownVariableError,
)

__all__ = (
    "MultiIndex",
    "Ordering",
    "Jet",
    "deglex_compare",
    "deglex_key",
    "elimination_key",
    "monomial_basis",
    "series_ring",
    "jet_add",
    "jet_mul",
    "parse_expression",
    "parse_terms",
    "parse_polynomial",
    "format_jet",
)

logger = logging.getLogger(__name__)


class MultiIndex(tuple):
    """
    Exponent vector of a monomial.

    Behaves like a ``tuple`` of nonnegative integers, except that ``+`` and
    ``-`` act elementwise.
    """

    def __new__(cls, exponents: Iterable[int]):
        return super().__new__(cls, (int(e) for e in exponents))

    @classmethod
    def zero(cls, dimension: int) -> "MultiIndex":
        return cls((0,) * dimension)

    @classmethod
    def unit(cls, dimension: int, index: int) -> "MultiIndex":
        return cls(int(i == index) for i in range(dimension))

    @property
    def dimension(self) -> int:
        return len(self)

    @property
    def degree(self) -> int:
        return sum(self)

    def __add__(self, other):
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return MultiIndex(a - b for a, b in zip(self, other))

    def divides(self, other: "MultiIndex") -> bool:
        return all(a <= b for a, b in zip(self, other))

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def deglex_key(alpha: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """
    Sort key of the deg-lex order.

    Degree first; within a degree, the monomial with the larger exponent at
    the first differing variable comes first, so ``x1 < x2 < ...``.
    """
    return sum(alpha), tuple(-e for e in alpha)


def elimination_key(alpha: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """
    Order in which triangular actions are solved.

    Degree first; within a degree, exponent tuples ascend lexicographically.
    A map or field whose linear part is lower-triangular only sends
    ``x^alpha`` to monomials that are not smaller in this order.
    """
    return sum(alpha), tuple(alpha)


def deglex_compare(a: Sequence[int], b: Sequence[int]) -> Ordering:
    if len(a) != len(b):
        raise ShapeMismatchError("deglex_compare", (len(a),), (len(b),))
    ka, kb = deglex_key(a), deglex_key(b)
    if ka < kb:
        return Ordering.LESS
    if ka > kb:
        return Ordering.GREATER
    return Ordering.EQUAL


def _exponents_up_to(dimension: int, degree: int) -> Iterator[Tuple[int]]:
    if dimension == 0:
        yield ()
        return
    for first in range(degree + 1):
        for rest in _exponents_up_to(dimension - 1, degree - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomial_basis(dimension: int, order: int) -> Tuple[MultiIndex, ...]:
    """All multi-indices of degree at most ``order``, ascending in deg-lex."""
    if dimension < 1 or order < 0:
        raise ValueError("dimension must be positive, order nonnegative")
    return tuple(
        sorted(
            (MultiIndex(e) for e in _exponents_up_to(dimension, order)),
            key=deglex_key,
        )
    )


@lru_cache(maxsize=None)
def series_ring(dimension: int) -> PolyRing:
    """``QQ[x0, ..., x{d-1}]`` with the graded lex order."""
    return PolyRing(",".join(f"x{i}" for i in range(dimension)), QQ, grlex)


class Jet:
    """
    Truncated formal series in ``dimension`` variables.

    Attributes
    ----------
    dimension: int
        Number of variables ``d``.
    order: int
        Truncation order ``m``; only terms of degree ``<= m`` are stored.

    Notes
    -----
    Construction silently drops zero coefficients and terms above the
    truncation order. Jets are immutable.
    """

    __slots__ = ("dimension", "order", "_terms")

    def __init__(
        self,
        dimension: int,
        order: int,
        terms: Mapping[Sequence[int], object] = None,
    ):
        self.dimension = dimension
        self.order = order
        self._terms: Dict[MultiIndex, object] = {}
        for alpha, coeff in (terms or {}).items():
            if len(alpha) != dimension:
                raise ValueError(
                    f"exponent {tuple(alpha)} does not have {dimension} "
                    f"entries"
                )
            if coeff and sum(alpha) <= order:
                self._terms[MultiIndex(alpha)] = as_scalar(coeff)

    @classmethod
    def _raw(cls, dimension, order, terms: Dict[MultiIndex, object]):
        jet = cls.__new__(cls)
        jet.dimension = dimension
        jet.order = order
        jet._terms = terms
        return jet

    @classmethod
    def zero(cls, dimension: int, order: int) -> "Jet":
        return cls(dimension, order)

    @classmethod
    def constant(cls, dimension: int, order: int, value) -> "Jet":
        return cls(dimension, order, {MultiIndex.zero(dimension): value})

    @classmethod
    def variable(cls, dimension: int, order: int, index: int) -> "Jet":
        return cls(dimension, order, {MultiIndex.unit(dimension, index): 1})

    @classmethod
    def monomial(cls, dimension, order, alpha, coefficient=1) -> "Jet":
        return cls(dimension, order, {MultiIndex(alpha): coefficient})

    @property
    def shape(self) -> Tuple[int, int]:
        return self.dimension, self.order

    @property
    def terms(self) -> Dict[MultiIndex, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def sorted_items(self) -> List[Tuple[MultiIndex, object]]:
        """Terms in ascending deg-lex order."""
        return sorted(self._terms.items(), key=lambda kv: deglex_key(kv[0]))

    def coefficient(self, alpha: Sequence[int]):
        return self._terms.get(MultiIndex(alpha), Fraction(0))

    @property
    def constant_term(self):
        return self.coefficient((0,) * self.dimension)

    def linear_coefficients(self) -> List[object]:
        return [
            self.coefficient(MultiIndex.unit(self.dimension, j))
            for j in range(self.dimension)
        ]

    @property
    def valuation(self) -> Optional[int]:
        """Lowest degree of a nonzero term, ``None`` for the zero jet."""
        return min((a.degree for a in self._terms), default=None)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(is_rational(c) for c in self._terms.values())

    def __bool__(self):
        return bool(self._terms)

    def with_order(self, order: int) -> "Jet":
        """
        Re-truncate to ``order``. Raising the order treats the missing
        coefficients as zero.
        """
        return Jet._raw(
            self.dimension,
            order,
            {a: c for a, c in self._terms.items() if a.degree <= order},
        )

    def homogeneous_part(self, degree: int) -> "Jet":
        return Jet._raw(
            self.dimension,
            self.order,
            {a: c for a, c in self._terms.items() if a.degree == degree},
        )

    def map_coefficients(self, func: Callable[[object], object]) -> "Jet":
        return Jet(
            self.dimension,
            self.order,
            {a: func(c) for a, c in self._terms.items()},
        )

    def _check_shape(self, other: "Jet", operation: str):
        if self.shape != other.shape:
            raise ShapeMismatchError(operation, self.shape, other.shape)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return self + Jet.constant(self.dimension, self.order, other)
        self._check_shape(other, "jet_add")
        terms = dict(self._terms)
        for alpha, coeff in other._terms.items():
            value = terms.get(alpha, 0) + coeff
            if value:
                terms[alpha] = value
            else:
                terms.pop(alpha, None)
        return Jet._raw(self.dimension, self.order, terms)

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(
            self.dimension,
            self.order,
            {a: -c for a, c in self._terms.items()},
        )

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "Jet":
        if not factor:
            return Jet.zero(self.dimension, self.order)
        terms = {}
        for alpha, coeff in self._terms.items():
            value = coeff * factor
            if value:
                terms[alpha] = value
        return Jet._raw(self.dimension, self.order, terms)

    def to_poly(self):
        """A rational jet as an element of :func:`series_ring`."""
        return series_ring(self.dimension).from_dict(
            {tuple(a): to_qq(c) for a, c in self._terms.items()}
        )

    @classmethod
    def from_poly(cls, poly, order: int) -> "Jet":
        """Truncate a :func:`series_ring` element to a jet of ``order``."""
        return cls._raw(
            poly.ring.ngens,
            order,
            {
                MultiIndex(a): from_qq(c)
                for a, c in poly.items()
                if sum(a) <= order
            },
        )

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check_shape(other, "jet_mul")
        order = self.order
        if self.is_rational() and other.is_rational():
            return Jet.from_poly(self.to_poly() * other.to_poly(), order)
        right = [(b, b.degree, c) for b, c in other._terms.items()]
        terms: Dict[MultiIndex, object] = {}
        for alpha, c1 in self._terms.items():
            room = order - alpha.degree
            for beta, degree, c2 in right:
                if degree > room:
                    continue
                key = alpha + beta
                value = terms.get(key, 0) + c1 * c2
                if value:
                    terms[key] = value
                else:
                    terms.pop(key, None)
        return Jet._raw(self.dimension, order, terms)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, exponent: int) -> "Jet":
        if exponent < 0:
            raise ValueError("negative power of a jet")
        result = Jet.constant(self.dimension, self.order, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def partial(self, index: int) -> "Jet":
        """
        Partial derivative with respect to variable ``index``.

        The result keeps the order of ``self``; its top-degree coefficients
        are not determined by the truncation and are zero.
        """
        terms = {}
        for alpha, coeff in self._terms.items():
            exponent = alpha[index]
            if exponent:
                terms[alpha - MultiIndex.unit(self.dimension, index)] = (
                    coeff * exponent
                )
        return Jet._raw(self.dimension, self.order, terms)

    def substitute(self, components: Sequence["Jet"]) -> "Jet":
        """
        Composition ``self(components)``, truncated at the components' order.

        Exact for all coefficients of degree ``<= m`` when the components
        have no constant term.
        """
        if len(components) != self.dimension:
            raise ShapeMismatchError(
                "substitute", (self.dimension,), (len(components),)
            )
        dimension, order = components[0].shape
        for comp in components[1:]:
            if comp.shape != (dimension, order):
                raise ShapeMismatchError(
                    "substitute", (dimension, order), comp.shape
                )
        valuations = [c.valuation for c in components]
        one = Jet.constant(dimension, order, 1)
        cache: Dict[MultiIndex, Jet] = {MultiIndex.zero(self.dimension): one}

        def product(alpha: MultiIndex) -> Jet:
            found = cache.get(alpha)
            if found is not None:
                return found
            index = next(i for i, e in enumerate(alpha) if e)
            value = (
                product(alpha - MultiIndex.unit(self.dimension, index))
                * components[index]
            )
            cache[alpha] = value
            return value

        terms: Dict[MultiIndex, object] = {}
        for alpha, coeff in sorted(
            self._terms.items(), key=lambda kv: deglex_key(kv[0])
        ):
            if any(e and v is None for e, v in zip(alpha, valuations)):
                continue
            lowest = sum(e * v for e, v in zip(alpha, valuations) if e)
            if lowest > order:
                continue
            for beta, c in product(alpha)._terms.items():
                value = terms.get(beta, 0) + coeff * c
                if value:
                    terms[beta] = value
                else:
                    terms.pop(beta, None)
        return Jet._raw(dimension, order, terms)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.shape == other.shape and self._terms == other._terms

    __hash__ = None

    def format(self, variables: Sequence[str] = None) -> str:
        return format_jet(self, variables)

    def __str__(self):
        return format_jet(self)

    def __repr__(self):
        return f"<Jet d={self.dimension} m={self.order}: {format_jet(self)}>"


def jet_add(f: Jet, g: Jet) -> Jet:
    if not isinstance(f, Jet) or not isinstance(g, Jet):
        raise TypeError("jet_add expects two jets")
    return f + g


def jet_mul(f: Jet, g: Jet) -> Jet:
    if not isinstance(f, Jet) or not isinstance(g, Jet):
        raise TypeError("jet_mul expects two jets")
    return f * g


def default_variables(dimension: int) -> List[str]:
    if dimension <= 3:
        return ["x", "y", "z"][:dimension]
    return [f"x{i + 1}" for i in range(dimension)]


def _format_monomial(alpha: Sequence[int], variables: Sequence[str]) -> str:
    return "*".join(
        name if e == 1 else f"{name}^{e}"
        for name, e in zip(variables, alpha)
        if e
    )


def format_jet(jet: Jet, variables: Sequence[str] = None) -> str:
    """
    Render ``jet`` in the polynomial grammar, ascending in deg-lex order.

    Rational coefficients print as ``p/q``. Other coefficients are wrapped
    in parentheses; such output is for display only.
    """
    variables = variables or default_variables(jet.dimension)
    if not jet:
        return "0"
    pieces = []
    for alpha, coeff in jet.sorted_items():
        monomial = _format_monomial(alpha, variables)
        if is_rational(coeff):
            negative = coeff < 0
            magnitude = abs(coeff)
            if not monomial:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = monomial
            else:
                body = f"{format_rational(magnitude)}*{monomial}"
        else:
            negative = False
            body = f"({format_scalar(coeff)})"
            if monomial:
                body += f"*{monomial}"
        pieces.append((negative, body))
    negative, body = pieces[0]
    text = ("-" if negative else "") + body
    for negative, body in pieces[1:]:
        text += (" - " if negative else " + ") + body
    return text


_OPERATORS = "+-*/^"
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ZERO_DENOMINATOR_RE = re.compile(r"/\s*(0+)(?![0-9])")
_NUMBER_BEFORE_NAME_RE = re.compile(
    r"(?<![A-Za-z0-9_])(\d+)\s*(?=[A-Za-z_])"
)
_PLAIN_RE = re.compile(r"[A-Za-z0-9_\s]")
_NOT_POLYNOMIAL_RE = re.compile(r"[/^]\s*(?=[^\d\s])")
_TRANSFORMATIONS = standard_transformations + (
    implicit_multiplication,
    convert_xor,
)


def _syntax_position(text: str) -> int:
    """First binary operator without a left operand, else the end."""
    previous = None
    for position, char in enumerate(text):
        if char.isspace():
            continue
        if char in _OPERATORS:
            unary = char in "+-" and previous in (None, "open")
            if not unary and previous != "operand":
                return position
            previous = "operator"
        elif char == "(":
            previous = "open"
        elif char == ")":
            if previous in ("operator", "open"):
                return position
            previous = "operand"
        else:
            previous = "operand"
    return len(text)


def name_position(text: str, name: str) -> int:
    pattern = rf"(?<![A-Za-z0-9_]){re.escape(name)}(?![A-Za-z0-9_])"
    match = re.search(pattern, text)
    return match.start() if match else 0


def parse_expression(
    text: str,
    names: Sequence[str],
    functions: Mapping[str, object] = None,
) -> Expr:
    """
    Parse ``text`` with sympy into an expression in the symbols ``names``.

    Only digits, names, whitespace and ``+ - * / ^`` are accepted, plus
    parentheses when ``functions`` are given. ``^`` is a power and
    juxtaposition a product.

    Raises
    ------
    ~germlab.errors.PolynomialSyntaxError
        On a stray character, a zero denominator or a syntax error; the
        position points into ``text``.
    ~germlab.errors.UnknownVariableError
        If a name is neither in ``names`` nor in ``functions``.
    """
    functions = dict(functions or {})
    allowed = _OPERATORS + ("()" if functions else "")
    for position, char in enumerate(text):
        if not (_PLAIN_RE.fullmatch(char) or char in allowed):
            raise PolynomialSyntaxError(
                text, position, f"unexpected character {char!r}"
            )
    for match in _NAME_RE.finditer(text):
        if match[0] not in names and match[0] not in functions:
            raise UnknownVariableError(match[0], match.start())
    zero = _ZERO_DENOMINATOR_RE.search(text)
    if zero:
        raise PolynomialSyntaxError(text, zero.start(1), "zero denominator")
    local_dict = {name: Symbol(name) for name in names}
    local_dict.update(functions)
    try:
        return parse_expr(
            _NUMBER_BEFORE_NAME_RE.sub(r"\1*", text),
            local_dict=local_dict,
            transformations=_TRANSFORMATIONS,
        )
    except (SyntaxError, TokenError, TypeError) as e:
        raise PolynomialSyntaxError(
            text, _syntax_position(text), "invalid syntax"
        ) from e


def parse_terms(
    text: str, variables: Sequence[str]
) -> Dict[MultiIndex, Fraction]:
    """Parse ``text`` into a map of exponents to nonzero rationals."""
    expression = parse_expression(text, variables)
    try:
        poly = Poly(
            expression, *(Symbol(name) for name in variables), domain=QQ
        )
    except BasePolynomialError as e:
        match = _NOT_POLYNOMIAL_RE.search(text)
        raise PolynomialSyntaxError(
            text, match.start() if match else 0, "not a polynomial"
        ) from e
    return {
        MultiIndex(alpha): Fraction(int(c.p), int(c.q))
        for alpha, c in poly.as_dict().items()
        if c
    }


def parse_polynomial(
    text: str,
    variables: Sequence[str],
    dimension: int = None,
    order: int = None,
) -> Jet:
    """
    Parse ``text`` into a :class:`Jet` of the given order.

    Unlike internal arithmetic, terms above ``order`` are rejected, not
    truncated.

    Raises
    ------
    ~germlab.errors.PolynomialSyntaxError
        If ``text`` violates the grammar.
    ~germlab.errors.UnknownVariableError
        If a name is not in ``variables``.
    ~germlab.errors.DegreeOverflowError
        If a term has degree above ``order``.
    """
    dimension = len(variables) if dimension is None else dimension
    if dimension != len(variables):
        raise ValueError(
            f"{len(variables)} variable names given for dimension "
            f"{dimension}"
        )
    terms = parse_terms(text, variables)
    degree = max((a.degree for a in terms), default=0)
    if order is None:
        order = degree
    if degree > order:
        raise DegreeOverflowError(text, degree, order)
    return Jet(dimension, order, terms)
