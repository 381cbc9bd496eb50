"""
Quasipolynomials in discrete and continuous time, orbit coefficients of
triangular generators, and generic multiplicities over the quasipolynomial
domain.

A quasipolynomial is a finite sum of terms ``mu^t * e^(lambda s) * p(t, s)``
where the bases ``mu`` (discrete variables) and exponents ``lambda``
(continuous variables) are exact rationals and ``p`` has rational
coefficients. Discrete bases are stored multiplicatively, so no logarithm
branch is ever chosen.

Exact division and rank computations embed the quasipolynomial ring into a
Laurent polynomial ring over sympy's ``QQ``: the time variables stay
polynomial coordinates, each positive discrete base is factored into primes
``p`` whose powers ``p^t`` become units, and each continuous variable gets
one unit ``e^(s/N)``. Negative discrete bases introduce torsion
(``((-1)^t)^2 = 1``) and are rejected by these operations.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from math import comb, lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
from typing import Union

from sympy import Add, S, Symbol, exp, expand, factorint

from .context import context
from .domains import ExpSum, format_rational, is_rational, laurent_exquo
from .errors import (
    CommutativityError,
    EvaluationError,
    InexactDivisionError,
    NonTriangularLinearPartError,
    NotInvertibleError,
    PolynomialSyntaxError,
    ShapeMismatchError,
    UnknownVariableError,
    UnsupportedSpectrumError,
)
from .germs import (
    FormalMap,
    FormalVectorField,
    Germ,
    check_commutative,
    derive,
    pullback,
    require_triangular,
)
from .linalg import exact_rank, minors
from .multiplicity import (
    ExtendedNat,
    Finite,
    IdealPresentation,
    lemma_matrix,
    mu_of_word,
    stopping_rule,
    truncated_codim,
)
from .ring import Jet, MultiIndex, deglex_key, elimination_key, monomial_basis
from .ring import name_position, parse_expression

__all__ = (
    "TimeKind",
    "TimeVariable",
    "Quasipolynomial",
    "SpectrumLattice",
    "GenericMultiplicity",
    "SampledMultiplicity",
    "BoundednessCertificate",
    "discrete",
    "continuous",
    "qp_mul",
    "qp_eval",
    "parse_quasipolynomial",
    "solve_discrete_recurrence",
    "solve_linear_ode",
    "action_matrix",
    "orbit",
    "orbit_coefficients",
    "orbit_matrix",
    "group_variables",
    "group_orbit",
    "require_commuting",
    "spectrum_of_group",
    "generic_multiplicity",
    "exceptional_conditions",
    "certify_boundedness",
)

logger = logging.getLogger(__name__)

_Base = Tuple[Fraction, ...]
_Exponents = Tuple[int, ...]
_Poly = Dict[_Exponents, Fraction]


class TimeKind(Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class TimeVariable:
    """Time of a map generator (discrete) or of a flow (continuous)."""

    name: str
    kind: TimeKind

    @property
    def is_discrete(self) -> bool:
        return self.kind is TimeKind.DISCRETE

    @property
    def neutral(self) -> Fraction:
        """Base of a term that does not depend exponentially on this
        variable."""
        return Fraction(1) if self.is_discrete else Fraction(0)

    def __str__(self):
        return self.name


def discrete(name: str = "t") -> TimeVariable:
    return TimeVariable(name, TimeKind.DISCRETE)


def continuous(name: str = "t") -> TimeVariable:
    return TimeVariable(name, TimeKind.CONTINUOUS)


def _poly_add(target: _Poly, poly: Mapping[_Exponents, Fraction], scale=1):
    for exps, coeff in poly.items():
        value = target.get(exps, 0) + coeff * scale
        if value:
            target[exps] = value
        else:
            target.pop(exps, None)


def _poly_mul(p: _Poly, q: _Poly) -> _Poly:
    out: _Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            key = tuple(a + b for a, b in zip(e1, e2))
            value = out.get(key, 0) + c1 * c2
            if value:
                out[key] = value
            else:
                out.pop(key, None)
    return out


class Quasipolynomial:
    """
    Element of the algebra of quasipolynomials in ``variables``.

    Attributes
    ----------
    variables: tuple of TimeVariable
        Time variables, in a fixed order.

    Notes
    -----
    Terms are kept canonical: distinct bases, no zero polynomials. The zero
    test is therefore "no terms". Values are immutable.
    """

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(
        self,
        variables: Sequence[TimeVariable],
        terms: Mapping[Sequence, Mapping[Sequence[int], object]] = None,
    ):
        self.variables: Tuple[TimeVariable, ...] = tuple(variables)
        names = [var.name for var in self.variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate time variables in {names}")
        size = len(self.variables)
        self._terms: Dict[_Base, _Poly] = {}
        self._hash = None
        for base, poly in (terms or {}).items():
            base = tuple(Fraction(b) for b in base)
            if len(base) != size:
                raise ValueError(f"base {base} does not have {size} entries")
            for var, b in zip(self.variables, base):
                if var.is_discrete and not b:
                    raise ValueError(f"zero base for discrete variable {var}")
            cleaned: _Poly = {}
            for exps, coeff in poly.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != size or any(e < 0 for e in exps):
                    raise ValueError(f"bad time exponents {exps}")
                if coeff:
                    _poly_add(cleaned, {exps: Fraction(coeff)})
            if cleaned:
                existing = self._terms.setdefault(base, {})
                _poly_add(existing, cleaned)
                if not existing:
                    del self._terms[base]

    @classmethod
    def _raw(cls, variables, terms: Dict[_Base, _Poly]) -> "Quasipolynomial":
        q = cls.__new__(cls)
        q.variables = variables
        q._terms = terms
        q._hash = None
        return q

    @property
    def _neutral(self) -> _Base:
        return tuple(var.neutral for var in self.variables)

    @property
    def _zero_exponents(self) -> _Exponents:
        return (0,) * len(self.variables)

    @classmethod
    def constant(cls, variables, value) -> "Quasipolynomial":
        variables = tuple(variables)
        neutral = tuple(var.neutral for var in variables)
        return cls(variables, {neutral: {(0,) * len(variables): value}})

    @classmethod
    def time(cls, variables, name: str, power: int = 1) -> "Quasipolynomial":
        """The monomial ``name^power``."""
        variables = tuple(variables)
        index = _index_of(variables, name)
        neutral = tuple(var.neutral for var in variables)
        exps = tuple(power if i == index else 0 for i in range(len(variables)))
        return cls(variables, {neutral: {exps: 1}})

    @classmethod
    def exponential(cls, variables, name: str, base) -> "Quasipolynomial":
        """``base^name`` for a discrete and ``e^(base*name)`` for a
        continuous variable."""
        variables = tuple(variables)
        index = _index_of(variables, name)
        bases = tuple(
            Fraction(base) if i == index else var.neutral
            for i, var in enumerate(variables)
        )
        return cls(variables, {bases: {(0,) * len(variables): 1}})

    def lift(self, value) -> "Quasipolynomial":
        if isinstance(value, Quasipolynomial):
            return value
        return Quasipolynomial.constant(self.variables, value)

    @property
    def terms(self) -> Dict[_Base, _Poly]:
        return {base: dict(poly) for base, poly in self._terms.items()}

    def is_constant(self) -> bool:
        if not self._terms:
            return True
        if set(self._terms) != {self._neutral}:
            return False
        return set(self._terms[self._neutral]) == {self._zero_exponents}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        if not self._terms:
            return Fraction(0)
        return self._terms[self._neutral][self._zero_exponents]

    def simplify(self):
        """A :class:`~fractions.Fraction` if constant, else self."""
        return self.constant_value() if self.is_constant() else self

    @property
    def degree(self) -> int:
        return max(
            (sum(e) for poly in self._terms.values() for e in poly),
            default=0,
        )

    def _coerce(self, other, operation: str):
        if isinstance(other, Quasipolynomial):
            if other.variables != self.variables:
                raise ShapeMismatchError(
                    operation,
                    tuple(str(v) for v in self.variables),
                    tuple(str(v) for v in other.variables),
                )
            return other
        if is_rational(other):
            return Quasipolynomial.constant(self.variables, other)
        return None

    def _combine(self, b1: _Base, b2: _Base) -> _Base:
        return tuple(
            x * y if var.is_discrete else x + y
            for var, x, y in zip(self.variables, b1, b2)
        )

    def __add__(self, other):
        other = self._coerce(other, "qp_add")
        if other is None:
            return NotImplemented
        terms = self.terms
        for base, poly in other._terms.items():
            existing = terms.setdefault(base, {})
            _poly_add(existing, poly)
            if not existing:
                del terms[base]
        return Quasipolynomial._raw(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Quasipolynomial._raw(
            self.variables,
            {
                base: {e: -c for e, c in poly.items()}
                for base, poly in self._terms.items()
            },
        )

    def __sub__(self, other):
        other = self._coerce(other, "qp_sub")
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_rational(other):
            if not other:
                return Quasipolynomial._raw(self.variables, {})
            return Quasipolynomial._raw(
                self.variables,
                {
                    base: {e: c * other for e, c in poly.items()}
                    for base, poly in self._terms.items()
                },
            )
        other = self._coerce(other, "qp_mul")
        if other is None:
            return NotImplemented
        terms: Dict[_Base, _Poly] = {}
        for b1, p1 in self._terms.items():
            for b2, p2 in other._terms.items():
                base = self._combine(b1, b2)
                existing = terms.setdefault(base, {})
                _poly_add(existing, _poly_mul(p1, p2))
                if not existing:
                    del terms[base]
        return Quasipolynomial._raw(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Quasipolynomial.constant(self.variables, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, Quasipolynomial):
            return (
                self.variables == other.variables
                and self._terms == other._terms
            )
        if is_rational(other):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash(
                    (
                        self.variables,
                        frozenset(
                            (base, frozenset(poly.items()))
                            for base, poly in self._terms.items()
                        ),
                    )
                )
        return self._hash

    def evaluate(self, assignment: Mapping[str, object]):
        """
        Exact value at the given times.

        Discrete variables take integers, continuous ones rationals. The
        result is a :class:`~fractions.Fraction`, or an
        :class:`~germlab.domains.ExpSum` when exponentials survive.

        Raises
        ------
        ~germlab.errors.EvaluationError
            If a variable is missing or a discrete one gets a non-integer.
        """
        values = []
        for var in self.variables:
            if var.name not in assignment:
                raise EvaluationError(var.name, None, "no value given")
            raw = assignment[var.name]
            try:
                value = Fraction(raw)
            except (TypeError, ValueError) as e:
                raise EvaluationError(var.name, raw, "not a rational") from e
            if var.is_discrete and value.denominator != 1:
                raise EvaluationError(
                    var.name, raw, "discrete time needs an integer"
                )
            values.append(value)
        by_exponent: Dict[Fraction, Fraction] = {}
        for base, poly in self._terms.items():
            factor = Fraction(1)
            exponent = Fraction(0)
            for var, b, value in zip(self.variables, base, values):
                if var.is_discrete:
                    factor *= b ** int(value)
                else:
                    exponent += b * value
            total = Fraction(0)
            for exps, coeff in poly.items():
                term = coeff
                for e, value in zip(exps, values):
                    if e:
                        term *= value ** e
                total += term
            previous = by_exponent.get(exponent, 0)
            by_exponent[exponent] = previous + factor * total
        return ExpSum(by_exponent).simplify()

    def shift(self, name: str, step: int = 1) -> "Quasipolynomial":
        """``q(t + step)`` for the discrete variable ``name``."""
        index = _index_of(self.variables, name)
        if not self.variables[index].is_discrete:
            raise ValueError(f"shift needs a discrete variable, got {name}")
        terms: Dict[_Base, _Poly] = {}
        for base, poly in self._terms.items():
            factor = base[index] ** step
            shifted: _Poly = {}
            for exps, coeff in poly.items():
                k = exps[index]
                for j in range(k + 1):
                    key = exps[:index] + (j,) + exps[index + 1:]
                    _poly_add(
                        shifted, {key: coeff * comb(k, j) * step ** (k - j)}
                    )
            if shifted:
                terms[base] = {e: c * factor for e, c in shifted.items()}
        return Quasipolynomial(self.variables, terms)

    def derivative(self, name: str) -> "Quasipolynomial":
        """Formal ``d/ds`` for the continuous variable ``name``."""
        index = _index_of(self.variables, name)
        if self.variables[index].is_discrete:
            raise ValueError(
                f"derivative needs a continuous variable, got {name}"
            )
        terms: Dict[_Base, _Poly] = {}
        for base, poly in self._terms.items():
            lam = base[index]
            out: _Poly = {}
            for exps, coeff in poly.items():
                if lam:
                    _poly_add(out, {exps: coeff * lam})
                k = exps[index]
                if k:
                    key = exps[:index] + (k - 1,) + exps[index + 1:]
                    _poly_add(out, {key: coeff * k})
            if out:
                terms[base] = out
        return Quasipolynomial._raw(self.variables, terms)

    def embed(self, variables: Sequence[TimeVariable]) -> "Quasipolynomial":
        """The same function seen as a quasipolynomial in ``variables``."""
        variables = tuple(variables)
        positions = []
        for var in self.variables:
            if var not in variables:
                raise ShapeMismatchError(
                    "embed",
                    tuple(str(v) for v in self.variables),
                    tuple(str(v) for v in variables),
                )
            positions.append(variables.index(var))
        terms: Dict[_Base, _Poly] = {}
        for base, poly in self._terms.items():
            new_base = [var.neutral for var in variables]
            for pos, b in zip(positions, base):
                new_base[pos] = b
            new_poly: _Poly = {}
            for exps, coeff in poly.items():
                new_exps = [0] * len(variables)
                for pos, e in zip(positions, exps):
                    new_exps[pos] = e
                new_poly[tuple(new_exps)] = coeff
            terms[tuple(new_base)] = new_poly
        return Quasipolynomial._raw(variables, terms)

    def spectrum(self) -> Dict[str, Tuple[Fraction, ...]]:
        """Distinct bases (discrete) or exponents (continuous) per
        variable."""
        return {
            var.name: tuple(sorted({base[i] for base in self._terms}))
            for i, var in enumerate(self.variables)
        }

    def normalized(self) -> "Quasipolynomial":
        """Rational multiple whose leading coefficient is 1."""
        if not self._terms:
            return self
        base = max(self._terms)
        exps = max(self._terms[base])
        return self * (1 / self._terms[base][exps])

    def inverse(self) -> "Quasipolynomial":
        """Inverse of a unit ``c * mu^t * e^(lambda s)``."""
        if len(self._terms) != 1:
            raise NotInvertibleError("inverse", str(self))
        (base, poly), = self._terms.items()
        if set(poly) != {self._zero_exponents}:
            raise NotInvertibleError("inverse", str(self))
        coeff = poly[self._zero_exponents]
        inverse_base = tuple(
            1 / b if var.is_discrete else -b
            for var, b in zip(self.variables, base)
        )
        return Quasipolynomial._raw(
            self.variables, {inverse_base: {self._zero_exponents: 1 / coeff}}
        )

    @staticmethod
    def laurent_codec(values) -> "_LaurentCodec":
        """Common Laurent encoding of ``values`` (rationals are lifted)."""
        qps = [v for v in values if isinstance(v, Quasipolynomial)]
        return _LaurentCodec(qps[0].variables, qps, "exact_rank")

    def exquo(self, other) -> "Quasipolynomial":
        """
        Exact quotient in the quasipolynomial ring.

        Raises
        ------
        ~germlab.errors.InexactDivisionError
            If ``other`` does not divide ``self``.
        ~germlab.errors.UnsupportedSpectrumError
            If a negative discrete base occurs.
        """
        other = self._coerce(other, "exquo")
        if not other:
            raise ZeroDivisionError("exquo by zero")
        codec = _LaurentCodec(self.variables, (self, other), "exquo")
        try:
            quotient = laurent_exquo(codec.encode(self), codec.encode(other))
            return codec.decode(quotient)
        except InexactDivisionError as e:
            raise InexactDivisionError(self, other) from e

    def render(self) -> str:
        """
        Text in the quasipolynomial grammar, e.g. ``2/7*4^t - 2/7*(1/2)^t``
        or ``t*exp(t)``; parsable by :func:`parse_quasipolynomial`.
        """
        if not self._terms:
            return "0"
        names = [var.name for var in self.variables]
        pieces = []
        for base in sorted(self._terms, reverse=True):
            factors = []
            for var, b in zip(self.variables, base):
                if var.is_discrete and b != 1:
                    factors.append(f"{_format_base(b)}^{var.name}")
                elif not var.is_discrete and b != 0:
                    factors.append(f"exp({_format_rate(b)}{var.name})")
            poly = self._terms[base]
            for exps in sorted(poly, key=deglex_key):
                coeff = poly[exps]
                monomial = "*".join(
                    name if e == 1 else f"{name}^{e}"
                    for name, e in zip(names, exps)
                    if e
                )
                parts = []
                magnitude = abs(coeff)
                if magnitude != 1 or not (monomial or factors):
                    parts.append(format_rational(magnitude))
                if monomial:
                    parts.append(monomial)
                parts.extend(factors)
                pieces.append((coeff < 0, "*".join(parts)))
        negative, body = pieces[0]
        text = ("-" if negative else "") + body
        for negative, body in pieces[1:]:
            text += (" - " if negative else " + ") + body
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        names = ",".join(str(v) for v in self.variables)
        return f"<Quasipolynomial[{names}] {self.render()}>"


def _index_of(variables: Sequence[TimeVariable], name: str) -> int:
    for i, var in enumerate(variables):
        if var.name == name:
            return i
    raise UnknownVariableError(name)


def _format_base(base: Fraction) -> str:
    if base > 0 and base.denominator == 1:
        return str(base.numerator)
    return f"({format_rational(base)})"


def _format_rate(rate: Fraction) -> str:
    if rate == 1:
        return ""
    if rate == -1:
        return "-"
    return f"{format_rational(rate)} "


def _primes_of(bases: Iterable[Fraction]) -> List[int]:
    """Primes dividing a numerator or denominator of ``bases``."""
    primes = set()
    for b in bases:
        primes.update(factorint(b.numerator))
        primes.update(factorint(b.denominator))
    return sorted(primes)


def _prime_exponents(base: Fraction, primes: Sequence[int]) -> List[int]:
    up, down = factorint(base.numerator), factorint(base.denominator)
    return [up.get(p, 0) - down.get(p, 0) for p in primes]


class _LaurentCodec:
    """
    Embedding of the quasipolynomials ``qps`` into a Laurent ring.

    The coordinates are the time variables, then per discrete variable one
    unit ``p^t`` for each prime ``p`` of its bases, and per continuous
    variable the unit ``e^(s/N)``.
    """

    def __init__(self, variables, qps: Sequence[Quasipolynomial], operation):
        self.variables = tuple(variables)
        self.layout = []
        for i, var in enumerate(self.variables):
            bases = {base[i] for q in qps for base in q._terms}
            if var.is_discrete:
                if any(b < 0 for b in bases):
                    raise UnsupportedSpectrumError(
                        operation,
                        f"negative base for discrete variable {var.name}",
                    )
                self.layout.append(_primes_of(bases))
            else:
                self.layout.append(lcm(*(b.denominator for b in bases), 1))

    @property
    def width(self) -> int:
        units = sum(
            len(layout) if var.is_discrete else 1
            for var, layout in zip(self.variables, self.layout)
        )
        return len(self.variables) + units

    def encode(self, q) -> Dict[Tuple[int, ...], Fraction]:
        if is_rational(q):
            q = Quasipolynomial.constant(self.variables, q)
        out = {}
        for base, poly in q._terms.items():
            units = []
            for var, b, layout in zip(self.variables, base, self.layout):
                if var.is_discrete:
                    units += _prime_exponents(b, layout)
                else:
                    units.append(int(b * layout))
            units = tuple(units)
            for exps, coeff in poly.items():
                out[tuple(exps) + units] = coeff
        return out

    def decode(self, encoded) -> Quasipolynomial:
        size = len(self.variables)
        terms: Dict[_Base, _Poly] = {}
        for key, coeff in encoded.items():
            exps, units = key[:size], key[size:]
            if any(e < 0 for e in exps):
                raise InexactDivisionError()
            base = []
            pos = 0
            for var, layout in zip(self.variables, self.layout):
                if var.is_discrete:
                    value = Fraction(1)
                    for b in layout:
                        value *= Fraction(b) ** units[pos]
                        pos += 1
                    base.append(value)
                else:
                    base.append(Fraction(units[pos], layout))
                    pos += 1
            terms.setdefault(tuple(base), {})[tuple(exps)] = coeff
        return Quasipolynomial._raw(self.variables, terms)


def qp_mul(q1: Quasipolynomial, q2: Quasipolynomial) -> Quasipolynomial:
    """Product of two quasipolynomials in the same variables."""
    if q1.variables != q2.variables:
        raise ShapeMismatchError(
            "qp_mul",
            tuple(str(v) for v in q1.variables),
            tuple(str(v) for v in q2.variables),
        )
    return q1 * q2


def qp_eval(q: Quasipolynomial, assignment: Mapping[str, object]):
    return q.evaluate(assignment)


def _rational(number) -> Fraction:
    return Fraction(int(number.p), int(number.q))


class _ExpressionReader:
    """Reads an expanded sympy expression as a quasipolynomial."""

    def __init__(self, text: str, variables: Sequence[TimeVariable]):
        self.text = text
        self.variables = tuple(variables)
        self.index = {
            Symbol(var.name): i for i, var in enumerate(self.variables)
        }

    def _error(self, reason: str, name: str = None):
        position = name_position(self.text, name) if name else 0
        return PolynomialSyntaxError(self.text, position, reason)

    def read(self, expression) -> Quasipolynomial:
        terms: Dict[_Base, _Poly] = {}
        for term in Add.make_args(expand(expression)):
            coefficient, factors = term.as_coeff_mul()
            if not coefficient.is_Rational:
                raise self._error("coefficients must be rational")
            if not coefficient:
                continue
            base = [var.neutral for var in self.variables]
            exps = [0] * len(self.variables)
            for factor in factors:
                self._factor(factor, base, exps)
            _poly_add(
                terms.setdefault(tuple(base), {}),
                {tuple(exps): _rational(coefficient)},
            )
        return Quasipolynomial(self.variables, terms)

    def _factor(self, factor, base: List[Fraction], exps: List[int]):
        root, power = factor.as_base_exp()
        index = self.index.get(root)
        if index is not None:
            if not (power.is_Integer and power > 0):
                raise self._error("expected a positive exponent", str(root))
            exps[index] += int(power)
            return
        exponential = root == S.Exp1
        if not exponential and not (root.is_Rational and root):
            raise self._error(f"{factor} is not a quasipolynomial factor")
        for symbol, rate in power.as_coefficients_dict().items():
            index = self.index.get(symbol)
            if index is None or not rate.is_Rational:
                raise self._error(f"expected a time variable in {factor}")
            var = self.variables[index]
            if exponential:
                if var.is_discrete:
                    raise self._error(
                        f"{var} is discrete; use base^{var}", var.name
                    )
                base[index] += _rational(rate)
            else:
                if not var.is_discrete:
                    raise self._error(
                        f"{var} is continuous; use exp(... {var})", var.name
                    )
                if not rate.is_Integer:
                    raise self._error("fractional power of a base", var.name)
                base[index] *= _rational(root) ** int(rate)


def parse_quasipolynomial(
    text: str, variables: Sequence[TimeVariable] = None
) -> Quasipolynomial:
    """
    Parse the rendering grammar of :meth:`Quasipolynomial.render`.

    ``variables`` defaults to a single discrete ``t``. The text is read by
    sympy: ``^`` is a power, ``base^t`` an exponential in a discrete
    variable and ``exp(rate s)`` one in a continuous variable.
    """
    variables = tuple(variables) if variables else (discrete("t"),)
    expression = parse_expression(
        text, [var.name for var in variables], {"exp": exp}
    )
    return _ExpressionReader(text, variables).read(expression)


def _single_variable(forcing, kind: TimeKind, variable: str, operation: str):
    if isinstance(forcing, Quasipolynomial):
        kinds = [var.kind for var in forcing.variables]
        if kinds != [kind]:
            raise ValueError(
                f"{operation}: forcing must be a quasipolynomial in one "
                f"{kind.value} variable"
            )
        return forcing
    var = TimeVariable(variable, kind)
    return Quasipolynomial.constant((var,), forcing)


def _coefficient_list(poly: _Poly) -> List[Fraction]:
    degree = max(e[0] for e in poly)
    coeffs = [Fraction(0)] * (degree + 1)
    for (k,), c in poly.items():
        coeffs[k] = c
    return coeffs


def _difference_particular(nu, mu, p: List[Fraction]) -> List[Fraction]:
    """``r`` with ``nu * r(t+1) - mu * r(t) = p(t)``."""
    d = len(p) - 1
    if nu != mu:
        r = [Fraction(0)] * (d + 1)
        for k in range(d, -1, -1):
            higher = sum(comb(j, k) * r[j] for j in range(k + 1, d + 1))
            r[k] = (p[k] - nu * higher) / (nu - mu)
        return r
    # resonance: r(t+1) - r(t) = p(t) / mu, one degree higher, r(0) = 0
    r = [Fraction(0)] * (d + 2)
    for k in range(d, -1, -1):
        higher = sum(comb(j, k) * r[j] for j in range(k + 2, d + 2))
        r[k + 1] = (p[k] / mu - higher) / (k + 1)
    return r


def _differential_particular(nu, lam, p: List[Fraction]) -> List[Fraction]:
    """``r`` with ``(nu - lam) * r + r' = p``."""
    d = len(p) - 1
    if nu != lam:
        r = [Fraction(0)] * (d + 2)
        for k in range(d, -1, -1):
            r[k] = (p[k] - (k + 1) * r[k + 1]) / (nu - lam)
        return r[: d + 1]
    r = [Fraction(0)] * (d + 2)
    for k in range(d + 1):
        r[k + 1] = p[k] / (k + 1)
    return r


def _solve(base, forcing, init, particular_of, operation):
    (var,) = forcing.variables
    particular = Quasipolynomial._raw(forcing.variables, {})
    for (nu,), poly in forcing.terms.items():
        coeffs = particular_of(nu, base, _coefficient_list(poly))
        particular = particular + Quasipolynomial(
            forcing.variables,
            {(nu,): {(k,): c for k, c in enumerate(coeffs)}},
        )
    start = particular.evaluate({var.name: 0})
    homogeneous = Quasipolynomial.exponential(
        forcing.variables, var.name, base
    )
    result = particular + homogeneous * (Fraction(init) - start)
    logger.debug("%s: %s", operation, result)
    return result


def solve_discrete_recurrence(
    mu, forcing=0, init=0, variable: str = "t"
) -> Quasipolynomial:
    """
    The unique ``q`` with ``q(0) = init`` and
    ``q(t+1) = mu*q(t) + forcing(t)``.

    Parameters
    ----------
    mu
        Nonzero rational multiplier.
    forcing
        Quasipolynomial in one discrete variable, or a rational constant.
    init
        Initial value ``q(0)``.
    variable
        Name of the time variable when ``forcing`` is a constant.

    Examples
    --------
    >>> str(solve_discrete_recurrence(2, parse_quasipolynomial("2^t")))
    '1/2*t*2^t'
    """
    mu = Fraction(mu)
    if not mu:
        raise NotInvertibleError(
            "solve_discrete_recurrence", "with diagonal entry 0"
        )
    forcing = _single_variable(
        forcing, TimeKind.DISCRETE, variable, "solve_discrete_recurrence"
    )
    return _solve(
        mu, forcing, init, _difference_particular, "solve_discrete_recurrence"
    )


def solve_linear_ode(
    lam, forcing=0, init=0, variable: str = "t"
) -> Quasipolynomial:
    """The unique ``q`` with ``q(0) = init`` and ``q' = lam*q + forcing``."""
    forcing = _single_variable(
        forcing, TimeKind.CONTINUOUS, variable, "solve_linear_ode"
    )
    return _solve(
        Fraction(lam),
        forcing,
        init,
        _differential_particular,
        "solve_linear_ode",
    )


def _require_rational(germ: Germ, operation: str):
    if not germ.is_rational():
        raise UnsupportedSpectrumError(
            operation, f"{germ.label} has non-rational coefficients"
        )


def _act(germ: Germ, jet: Jet) -> Jet:
    if isinstance(germ, FormalMap):
        return pullback(germ, jet)
    return derive(germ, jet)


def _diagonal_entry(germ: Germ, alpha: Sequence[int]) -> Fraction:
    diagonal = [germ.linear_part[i][i] for i in range(germ.dimension)]
    if isinstance(germ, FormalMap):
        value = Fraction(1)
        for mu, e in zip(diagonal, alpha):
            value *= Fraction(mu) ** e
        return value
    return sum(
        (Fraction(lam) * e for lam, e in zip(diagonal, alpha)), Fraction(0)
    )


def _image(
    germ: Germ, alpha: MultiIndex, operation: str
) -> Dict[MultiIndex, object]:
    """Sparse image of ``x^alpha``, checked against the elimination order."""
    d, m = germ.shape
    image = dict(_act(germ, Jet.monomial(d, m, alpha)).items())
    key = elimination_key(alpha)
    for beta in image:
        if elimination_key(beta) < key:
            raise NonTriangularLinearPartError(
                operation, germ.name, f"x^{tuple(alpha)} maps below itself"
            )
    expected = _diagonal_entry(germ, alpha)
    if image.get(alpha, 0) != expected:
        raise NonTriangularLinearPartError(
            operation, germ.name, f"diagonal entry at x^{tuple(alpha)}"
        )
    return image


def action_matrix(generator: Germ, order: int = None) -> List[List[Fraction]]:
    """
    Matrix of the pullback (map) or derivation (field) on ``C_m[x]``.

    Rows and columns follow ``monomial_basis(d, m)``; entry ``[a][b]`` is the
    coefficient of ``x^a`` in the image of ``x^b``. The matrix is verified
    triangular in the elimination order with diagonal ``mu^alpha``
    (maps) or ``<lambda, alpha>`` (fields).
    """
    require_triangular(generator, "action_matrix")
    _require_rational(generator, "action_matrix")
    germ = generator if order is None else generator.with_order(order)
    d, m = germ.shape
    basis = monomial_basis(d, m)
    index = {alpha: i for i, alpha in enumerate(basis)}
    matrix = [[Fraction(0)] * len(basis) for _ in basis]
    for col, beta in enumerate(basis):
        for alpha, coeff in _image(germ, beta, "action_matrix").items():
            matrix[index[alpha]][col] = coeff
    return matrix


def _time_variable(generator: Germ, name: str) -> TimeVariable:
    if isinstance(generator, FormalMap):
        return discrete(name)
    return continuous(name)


def orbit(
    generator: Germ, f: Jet, order: int = None, variable: str = "t"
) -> Jet:
    """
    Orbit ``(F^t)^* f`` (map) or ``(e^{t v})^* f`` (field) with symbolic
    time.

    Coefficients are solved one monomial at a time in the elimination order;
    each satisfies a scalar recurrence (or ODE) whose forcing involves only
    coefficients solved before it.

    Returns
    -------
    Jet
        Jet of order ``order`` (default: that of ``f``) whose coefficients
        are quasipolynomials in ``variable``.
    """
    require_triangular(generator, "orbit")
    _require_rational(generator, "orbit")
    m = f.order if order is None else order
    germ = generator.with_order(m)
    f = f.with_order(m)
    if f.dimension != germ.dimension:
        raise ShapeMismatchError("orbit", germ.shape, f.shape)
    var = _time_variable(germ, variable)
    variables = (var,)
    is_map = var.is_discrete
    solve = solve_discrete_recurrence if is_map else solve_linear_ode
    forcing: Dict[MultiIndex, Quasipolynomial] = {}
    solved: Dict[MultiIndex, Quasipolynomial] = {}
    basis = monomial_basis(germ.dimension, m)
    for alpha in sorted(basis, key=elimination_key):
        init = f.coefficient(alpha)
        pending = forcing.pop(alpha, None)
        if not init and pending is None:
            continue
        if pending is None:
            pending = Quasipolynomial.constant(variables, 0)
        value = solve(
            _diagonal_entry(germ, alpha), pending, init, variable=var.name
        )
        if not value:
            continue
        solved[alpha] = value
        for beta, coeff in _image(germ, alpha, "orbit").items():
            if beta == alpha:
                continue
            previous = forcing.get(beta)
            term = value * coeff
            forcing[beta] = term if previous is None else previous + term
    return Jet(germ.dimension, m, solved)


def orbit_coefficients(
    generator: Germ,
    target: Union[int, Jet],
    alpha: Sequence[int],
    order: int = None,
    variable: str = "t",
) -> Quasipolynomial:
    """
    Coefficient of ``x^alpha`` in the orbit of ``target`` (a jet or the
    index of a coordinate function).
    """
    d = generator.dimension
    m = generator.order if order is None else order
    if isinstance(target, int):
        target = Jet.variable(d, m, target)
    jet = orbit(generator, target, m, variable)
    value = jet.coefficient(alpha)
    if isinstance(value, Quasipolynomial):
        return value
    var = _time_variable(generator, variable)
    return Quasipolynomial.constant((var,), value)


def orbit_matrix(
    generator: Germ, order: int = None, variable: str = "t"
) -> List[List[Quasipolynomial]]:
    """
    Symbolic ``t``-th power of :func:`action_matrix`: column ``b`` holds the
    orbit of ``x^b``.
    """
    m = generator.order if order is None else order
    d = generator.dimension
    var = _time_variable(generator, variable)
    zero = Quasipolynomial.constant((var,), 0)
    basis = monomial_basis(d, m)
    matrix = [[zero] * len(basis) for _ in basis]
    for col, beta in enumerate(basis):
        jet = orbit(generator, Jet.monomial(d, m, beta), m, variable)
        for row, alpha in enumerate(basis):
            value = jet.coefficient(alpha)
            if value:
                matrix[row][col] = value
    return matrix


def group_variables(
    generators: Mapping[str, Germ]
) -> Tuple[TimeVariable, ...]:
    """
    One time variable per generator: ``t`` for a single generator,
    ``t_<name>`` otherwise.
    """
    if len(generators) == 1:
        (germ,) = generators.values()
        return (_time_variable(germ, "t"),)
    return tuple(
        _time_variable(germ, f"t_{name}") for name, germ in generators.items()
    )


def group_orbit(
    generators: Mapping[str, Germ], f: Jet, order: int = None
) -> Jet:
    """
    Orbit of ``f`` under the commutative group generated by ``generators``,
    a jet with coefficients in all group times.
    """
    m = f.order if order is None else order
    d = f.dimension
    variables = group_variables(generators)
    current: Dict[MultiIndex, Quasipolynomial] = {
        alpha: Quasipolynomial.constant(variables, coeff)
        for alpha, coeff in f.with_order(m).items()
    }
    for var, germ in zip(variables, generators.values()):
        nxt: Dict[MultiIndex, Quasipolynomial] = {}
        for gamma, coeff in current.items():
            column = orbit(germ, Jet.monomial(d, m, gamma), m, var.name)
            for alpha, value in column.items():
                term = value.embed(variables) * coeff
                previous = nxt.get(alpha)
                nxt[alpha] = term if previous is None else previous + term
        current = nxt
    return Jet(d, m, current)


@dataclass(frozen=True)
class SpectrumLattice:
    """
    Spectral data of a group of triangular generators.

    ``diagonals`` holds, per time variable, the diagonal of the generator's
    linear part: multiplicative generators for discrete times, additive
    ones for continuous times.
    """

    variables: Tuple[TimeVariable, ...]
    diagonals: Tuple[Tuple[Fraction, ...], ...]

    @property
    def generators(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(tuple(sorted(set(diag))) for diag in self.diagonals)

    def bases_up_to(self, order: int) -> Tuple[frozenset, ...]:
        """Products ``mu^alpha`` (or sums ``<lambda, alpha>``) over
        ``|alpha| <= order``, per variable."""
        out = []
        for var, diag in zip(self.variables, self.diagonals):
            values = set()
            for alpha in monomial_basis(len(diag), order):
                if var.is_discrete:
                    value = Fraction(1)
                    for mu, e in zip(diag, alpha):
                        value *= mu ** e
                else:
                    value = sum(lam * e for lam, e in zip(diag, alpha))
                values.add(Fraction(value))
            out.append(frozenset(values))
        return tuple(out)

    def admits(self, q: Quasipolynomial, order: int) -> bool:
        """Whether every base of ``q`` occurs in :meth:`bases_up_to`."""
        allowed = dict(zip(self.variables, self.bases_up_to(order)))
        return all(
            base[i] in allowed[var]
            for base in q.terms
            for i, var in enumerate(q.variables)
        )

    def __str__(self):
        return "; ".join(
            f"{var.name}: {{{', '.join(format_rational(g) for g in gens)}}}"
            for var, gens in zip(self.variables, self.generators)
        )


def spectrum_of_group(generators: Mapping[str, Germ]) -> SpectrumLattice:
    for germ in generators.values():
        require_triangular(germ, "spectrum_of_group")
    return SpectrumLattice(
        group_variables(generators),
        tuple(
            tuple(
                Fraction(germ.linear_part[i][i])
                for i in range(germ.dimension)
            )
            for germ in generators.values()
        ),
    )


@dataclass(frozen=True)
class GenericMultiplicity:
    """Value of ``mu(t)`` off a proper exceptional set of times."""

    value: ExtendedNat
    variables: Tuple[TimeVariable, ...]

    @property
    def certificate_order(self) -> Optional[int]:
        return self.value.certificate_order


def require_commuting(generators: Mapping[str, Germ], operation: str):
    """
    Raise :class:`~germlab.errors.CommutativityError` unless the generators
    pairwise commute at their truncation order. A single generator passes.
    """
    if len(generators) < 2:
        return
    maps = [g for g in generators.values() if isinstance(g, FormalMap)]
    fields = [
        g for g in generators.values() if isinstance(g, FormalVectorField)
    ]
    certificate = check_commutative(maps, fields)
    if not certificate.passed:
        raise CommutativityError(
            operation, [check.label for check in certificate.failures]
        )


def _as_list(fixed) -> List[IdealPresentation]:
    if isinstance(fixed, IdealPresentation):
        return [fixed]
    return list(fixed)


def _demote(value):
    if isinstance(value, Quasipolynomial) and value.is_constant():
        return value.constant_value()
    return value


def _dragged_ideal(generators, pulled, fixed, order) -> IdealPresentation:
    if generators:
        dragged = [
            group_orbit(generators, gen, order).map_coefficients(_demote)
            for gen in pulled.truncated(order)
        ]
    else:
        dragged = list(pulled.truncated(order))
    others = [gen for ideal in fixed for gen in ideal.truncated(order)]
    return IdealPresentation(tuple(dragged + others), pulled.name)


def generic_multiplicity(
    generators: Mapping[str, Germ],
    pulled: IdealPresentation,
    fixed: Union[IdealPresentation, Sequence[IdealPresentation]],
    cap: int = None,
) -> GenericMultiplicity:
    """
    ``mu(t)`` for symbolic group times, by the stopping rule over the
    quasipolynomial domain.

    The pulled generators are replaced by their group orbits; ranks are
    computed over the fraction field of the quasipolynomials, so the value
    holds for all times outside a proper exceptional set.
    """
    cap = context.cap if cap is None else cap
    fixed = _as_list(fixed)
    require_commuting(generators, "generic_multiplicity")
    variables = group_variables(generators) if generators else ()
    ideals = [pulled] + fixed
    if any(
        gen.constant_term for ideal in ideals for gen in ideal.generators
    ):
        return GenericMultiplicity(Finite(0, certificate_order=0), variables)
    value = stopping_rule(
        lambda m: truncated_codim(
            _dragged_ideal(generators, pulled, fixed, m), m
        ),
        cap,
        "generic",
    )
    return GenericMultiplicity(value, variables)


def _compress(matrix: List[List[object]]) -> List[List[object]]:
    """Drop zero rows, zero columns and repeated columns."""
    rows = [row for row in matrix if any(row)]
    if not rows:
        return []
    columns = []
    seen = set()
    for col in zip(*rows):
        if not any(col):
            continue
        key = tuple(col)
        if key in seen:
            continue
        seen.add(key)
        columns.append(col)
    return [list(row) for row in zip(*columns)] if columns else []


def exceptional_conditions(
    generators: Mapping[str, Germ],
    pulled: IdealPresentation,
    fixed: Union[IdealPresentation, Sequence[IdealPresentation]],
    order: int,
    threshold: int = None,
    minor_limit: int = None,
) -> List[Quasipolynomial]:
    """
    Quasipolynomial conditions on the group times at truncation ``order``.

    By default these are the nonzero minors whose size is the generic rank
    of the generating matrix; they vanish together exactly where ``c_m(t)``
    exceeds its generic value. With ``threshold=k`` they are the minors of
    size ``N - k + 1`` (``N = dim C_m[x]``), whose common zeros are the
    times with ``c_m(t) >= k``. Each condition is scaled to leading
    coefficient 1; duplicates are removed. An empty list means no
    condition (the locus is everything).

    Raises
    ------
    ~germlab.errors.SizeLimitExceededError
        If more than ``minor_limit`` minors would be enumerated.
    """
    minor_limit = context.minor_limit if minor_limit is None else minor_limit
    fixed = _as_list(fixed)
    require_commuting(generators, "exceptional_conditions")
    variables = group_variables(generators) if generators else ()
    ideal = _dragged_ideal(generators, pulled, fixed, order)
    matrix = _compress(lemma_matrix(ideal.truncated(order), order))
    rank = exact_rank(matrix) if matrix else 0
    if threshold is None:
        size = rank
    else:
        size = len(monomial_basis(ideal.dimension, order)) - threshold + 1
    if size < 1 or size > rank:
        return []
    conditions: List[Quasipolynomial] = []
    seen = set()
    for minor in minors(matrix, size, minor_limit):
        if not minor:
            continue
        if not isinstance(minor, Quasipolynomial):
            minor = Quasipolynomial.constant(variables, minor)
        minor = minor.normalized()
        if minor not in seen:
            seen.add(minor)
            conditions.append(minor)
    logger.debug(
        "%d exceptional conditions from minors of size %d",
        len(conditions),
        size,
    )
    return conditions


@dataclass(frozen=True)
class SampledMultiplicity:
    point: Tuple[Tuple[str, int], ...]
    mu: ExtendedNat
    exceptional: bool


@dataclass(frozen=True)
class BoundednessCertificate:
    """
    Generic multiplicity compared with pointwise values at sampled integer
    times. Off the exceptional samples, every pointwise value must equal the
    generic one.
    """

    generic: GenericMultiplicity
    conditions: Tuple[Quasipolynomial, ...]
    samples: Tuple[SampledMultiplicity, ...]

    @property
    def consistent(self) -> bool:
        return self.generic.value.is_finite and all(
            s.mu == self.generic.value
            for s in self.samples
            if not s.exceptional
        )

    @property
    def max_finite(self) -> Optional[int]:
        return max(
            (s.mu.value for s in self.samples if s.mu.is_finite), default=None
        )

    @property
    def exceptional_points(self) -> Tuple[Tuple[Tuple[str, int], ...], ...]:
        return tuple(s.point for s in self.samples if s.exceptional)


def _point_word(generators: Mapping[str, Germ], times: Sequence[int]) -> str:
    letters = []
    for (name, germ), time in zip(generators.items(), times):
        if isinstance(germ, FormalMap):
            letters.append(f"{name}^{time}")
        else:
            letters.append(f"exp({time} {name})")
    return "*".join(letters)


def certify_boundedness(
    generators: Mapping[str, Germ],
    pulled: IdealPresentation,
    fixed: Union[IdealPresentation, Sequence[IdealPresentation]],
    cap: int = None,
    samples: Tuple[int, int] = None,
) -> BoundednessCertificate:
    """
    Check the generic multiplicity against ``mu(t)`` computed pointwise by
    :func:`~germlab.multiplicity.mu_of_word` on the integer grid
    ``samples`` (inclusive, per generator).
    """
    cap = context.cap if cap is None else cap
    low, high = context.samples if samples is None else samples
    fixed = _as_list(fixed)
    if not generators:
        raise ValueError("certify_boundedness needs at least one generator")
    generic = generic_multiplicity(generators, pulled, fixed, cap)
    conditions: List[Quasipolynomial] = []
    order = generic.certificate_order
    if generic.value.is_finite and order:
        conditions = exceptional_conditions(generators, pulled, fixed, order)
    names = [var.name for var in generic.variables]
    sampled = []
    for times in product(range(low, high + 1), repeat=len(generators)):
        point = tuple(zip(names, times))
        mu = mu_of_word(
            _point_word(generators, times), generators, pulled, fixed, cap
        )
        assignment = dict(point)
        exceptional = bool(conditions) and all(
            not q.evaluate(assignment) for q in conditions
        )
        sampled.append(SampledMultiplicity(point, mu, exceptional))
    certificate = BoundednessCertificate(
        generic, tuple(conditions), tuple(sampled)
    )
    logger.info(
        "generic multiplicity %s, %d samples, consistent: %s",
        generic.value,
        len(sampled),
        certificate.consistent,
    )
    return certificate
