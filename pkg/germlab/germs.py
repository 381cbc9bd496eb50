"""
Formal self-maps and formal vector fields at the origin.

Both are ``d``-tuples of jets without constant term. Maps act on jets by
pullback ``f -> f o F``; vector fields act as derivations. Group elements
are written as words in named generators (see :func:`parse_word`).
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .domains import format_rational, is_rational, is_zero
from .errors import (
    ConstantTermError,
    NonTriangularLinearPartError,
    NotInvertibleError,
    ShapeMismatchError,
    UnknownGeneratorError,
    WordSyntaxError,
)
from .linalg import determinant, matrix_inverse, matrix_power
from .ring import Jet, default_variables, format_jet, monomial_basis

__all__ = (
    "FormalMap",
    "FormalVectorField",
    "MapLetter",
    "FlowLetter",
    "GroupWord",
    "CommutationCheck",
    "CommutativityCertificate",
    "identity_map",
    "compose_maps",
    "invert_map",
    "map_power",
    "pullback",
    "derive",
    "lie_bracket",
    "pushforward",
    "check_commutative",
    "flow_map",
    "parse_word",
    "instantiate_template",
    "word_to_map",
    "commutator",
    "tangency_order",
    "leading_tangency",
    "require_triangular",
)

logger = logging.getLogger(__name__)

Time = Union[Fraction, str]


class _JetTuple:
    """Common base of :class:`FormalMap` and :class:`FormalVectorField`."""

    _kind = "germ"

    def __init__(self, components: Sequence[Jet], name: str = None):
        components = tuple(components)
        if not components:
            raise ValueError(f"a {self._kind} needs at least one component")
        shape = components[0].shape
        if shape[0] != len(components):
            raise ShapeMismatchError(
                self._kind, (len(components),), (shape[0],)
            )
        for comp in components:
            if comp.shape != shape:
                raise ShapeMismatchError(self._kind, shape, comp.shape)
        self.name = name
        for i, comp in enumerate(components):
            if not is_zero(comp.constant_term):
                raise ConstantTermError(self.label, i + 1)
        self.components: Tuple[Jet, ...] = components

    @property
    def label(self) -> str:
        return f"{self._kind} {self.name}" if self.name else self._kind

    @property
    def dimension(self) -> int:
        return self.components[0].dimension

    @property
    def order(self) -> int:
        return self.components[0].order

    @property
    def shape(self) -> Tuple[int, int]:
        return self.dimension, self.order

    @cached_property
    def linear_part(self) -> List[List[object]]:
        """``linear_part[i][j]`` is the coefficient of ``x_j`` in component
        ``i``."""
        return [comp.linear_coefficients() for comp in self.components]

    def is_rational(self) -> bool:
        return all(comp.is_rational() for comp in self.components)

    def with_order(self, order: int):
        return type(self)(
            [comp.with_order(order) for comp in self.components], self.name
        )

    def map_coefficients(self, func):
        return type(self)(
            [comp.map_coefficients(func) for comp in self.components],
            self.name,
        )

    def _check_shape(self, other, operation: str):
        if self.shape != other.shape:
            raise ShapeMismatchError(operation, self.shape, other.shape)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.components == other.components

    __hash__ = None

    def __getitem__(self, index: int) -> Jet:
        return self.components[index]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def format(self, variables: Sequence[str] = None) -> str:
        return (
            "("
            + ", ".join(format_jet(c, variables) for c in self.components)
            + ")"
        )

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"<{type(self).__name__} {self.name or ''}{self.format()}>"


class FormalMap(_JetTuple):
    """
    Jet of a formal self-map ``F: (C^d, 0) -> (C^d, 0)``.

    Parameters
    ----------
    components
        ``d`` jets of equal shape, none with a constant term.
    name
        Generator name used in error messages and words.
    """

    _kind = "map"

    @classmethod
    def identity(cls, dimension: int, order: int) -> "FormalMap":
        return cls(
            [Jet.variable(dimension, order, i) for i in range(dimension)],
            "id",
        )

    def is_invertible(self) -> bool:
        return not is_zero(determinant(self.linear_part))

    def is_identity(self) -> bool:
        return self == FormalMap.identity(self.dimension, self.order)


class FormalVectorField(_JetTuple):
    """
    Jet of a formal vector field vanishing at the origin.

    Acts on jets as the derivation ``f -> sum(df/dx_j * v_j)``.
    """

    _kind = "field"

    def is_nilpotent(self) -> bool:
        """Nilpotent linear part, in any variable order."""
        power = matrix_power(self.linear_part, self.dimension)
        return all(is_zero(entry) for row in power for entry in row)


Germ = Union[FormalMap, FormalVectorField]


def identity_map(dimension: int, order: int) -> FormalMap:
    return FormalMap.identity(dimension, order)


def compose_maps(f: FormalMap, g: FormalMap) -> FormalMap:
    """Jet of ``f o g`` at the common truncation order."""
    f._check_shape(g, "compose_maps")
    return FormalMap(
        [comp.substitute(g.components) for comp in f.components]
    )


def invert_map(f: FormalMap) -> FormalMap:
    """
    Compositional inverse, computed degree by degree.

    Raises
    ------
    ~germlab.errors.NotInvertibleError
        If the linear part is singular.
    """
    d, m = f.shape
    if is_zero(determinant(f.linear_part)):
        raise NotInvertibleError("invert_map", f.name)
    try:
        a_inv = matrix_inverse(f.linear_part)
    except NotInvertibleError as e:
        raise NotInvertibleError("invert_map", f.name) from e
    variables = [Jet.variable(d, m, j) for j in range(d)]

    def apply_inverse(vector: Sequence[Jet]) -> List[Jet]:
        out = []
        for i in range(d):
            total = Jet.zero(d, m)
            for j in range(d):
                if not is_zero(a_inv[i][j]):
                    total = total + vector[j].scale(a_inv[i][j])
            out.append(total)
        return out

    g = apply_inverse(variables)
    for degree in range(2, m + 1):
        composed = [comp.substitute(g) for comp in f.components]
        error = [
            (composed[i] - variables[i]).homogeneous_part(degree)
            for i in range(d)
        ]
        if all(e.is_zero() for e in error):
            continue
        correction = apply_inverse(error)
        g = [gi - ci for gi, ci in zip(g, correction)]
    inverse = FormalMap(g, f"{f.name}^-1" if f.name else None)
    return inverse


def map_power(f: FormalMap, exponent: int) -> FormalMap:
    """``f`` composed with itself ``exponent`` times (inverse if negative)."""
    if exponent == 0:
        return identity_map(*f.shape)
    if exponent < 0:
        f = invert_map(f)
        exponent = -exponent
    result: Optional[FormalMap] = None
    base = f
    while exponent:
        if exponent & 1:
            result = base if result is None else compose_maps(result, base)
        exponent >>= 1
        if exponent:
            base = compose_maps(base, base)
    return result


def pullback(f: FormalMap, jet: Jet) -> Jet:
    """``jet o f``; an algebra homomorphism that reverses composition."""
    if jet.shape != f.shape:
        raise ShapeMismatchError("pullback", f.shape, jet.shape)
    return jet.substitute(f.components)


def derive(v: FormalVectorField, jet: Jet) -> Jet:
    """The derivation of ``v`` applied to ``jet``."""
    if jet.shape != v.shape:
        raise ShapeMismatchError("derive", v.shape, jet.shape)
    total = Jet.zero(*jet.shape)
    for j, comp in enumerate(v.components):
        if comp.is_zero():
            continue
        partial = jet.partial(j)
        if not partial.is_zero():
            total = total + partial * comp
    return total


def lie_bracket(
    v: FormalVectorField, w: FormalVectorField
) -> FormalVectorField:
    """``[v, w]_i = v(w_i) - w(v_i)``."""
    v._check_shape(w, "lie_bracket")
    name = f"[{v.name},{w.name}]" if v.name and w.name else None
    return FormalVectorField(
        [
            derive(v, w_i) - derive(w, v_i)
            for v_i, w_i in zip(v.components, w.components)
        ],
        name,
    )


def pushforward(f: FormalMap, v: FormalVectorField) -> FormalVectorField:
    """``(f_* v)(x) = Df(f^-1(x)) . v(f^-1(x))``."""
    f._check_shape(v, "pushforward")
    try:
        g = invert_map(f)
    except NotInvertibleError as e:
        raise NotInvertibleError("pushforward", f.name) from e
    pulled_field = [comp.substitute(g.components) for comp in v.components]
    d, m = f.shape
    out = []
    for f_i in f.components:
        total = Jet.zero(d, m)
        for j in range(d):
            if pulled_field[j].is_zero():
                continue
            partial = f_i.partial(j)
            if partial.is_zero():
                continue
            total = total + partial.substitute(g.components) * pulled_field[j]
        out.append(total)
    return FormalVectorField(out, v.name)


@dataclass(frozen=True)
class CommutationCheck:
    """
    Outcome of one commutation condition for one pair of generators.

    ``condition`` is 1 for map/map, 2 for field/field and 3 for map/field
    (the field must be invariant under pushforward by the map).
    """

    condition: int
    left: str
    right: str
    passed: bool

    @property
    def label(self) -> str:
        return f"({self.condition}) {self.left},{self.right}"


@dataclass(frozen=True)
class CommutativityCertificate:
    """
    Result of :func:`check_commutative`.

    A pass certifies commutation only up to the truncation ``order``.
    """

    checks: Tuple[CommutationCheck, ...]
    order: int

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> Tuple[CommutationCheck, ...]:
        return tuple(check for check in self.checks if not check.passed)


def _names(germs: Sequence[Germ], prefix: str) -> List[str]:
    return [g.name or f"{prefix}{i + 1}" for i, g in enumerate(germs)]


def check_commutative(
    maps: Sequence[FormalMap], fields: Sequence[FormalVectorField] = ()
) -> CommutativityCertificate:
    """
    Check the commutation conditions for a set of generators.

    The conditions are checked pairwise: maps commute under composition,
    fields have vanishing Lie bracket, and every field is invariant under
    pushforward by every map.
    """
    maps, fields = list(maps), list(fields)
    germs = maps + fields
    for germ in germs[1:]:
        germs[0]._check_shape(germ, "check_commutative")
    map_names, field_names = _names(maps, "F"), _names(fields, "v")
    checks = []
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            passed = compose_maps(maps[i], maps[j]) == compose_maps(
                maps[j], maps[i]
            )
            checks.append(
                CommutationCheck(1, map_names[i], map_names[j], passed)
            )
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            bracket = lie_bracket(fields[i], fields[j])
            passed = all(c.is_zero() for c in bracket.components)
            checks.append(
                CommutationCheck(2, field_names[i], field_names[j], passed)
            )
    for i, f in enumerate(maps):
        for j, v in enumerate(fields):
            passed = pushforward(f, v) == v
            checks.append(
                CommutationCheck(3, map_names[i], field_names[j], passed)
            )
    order = germs[0].order if germs else 0
    certificate = CommutativityCertificate(tuple(checks), order)
    logger.debug(
        "commutativity up to order %d: %s",
        order,
        "pass" if certificate.passed else "fail",
    )
    return certificate


def require_triangular(germ: Germ, operation: str):
    """
    Check that the linear part of ``germ`` is lower-triangular with rational
    diagonal in the declared variable order.
    """
    linear = germ.linear_part
    d = germ.dimension
    for i in range(d):
        for j in range(i + 1, d):
            if not is_zero(linear[i][j]):
                raise NonTriangularLinearPartError(
                    operation,
                    germ.name,
                    f"component {i + 1} depends linearly on variable {j + 1}",
                )
        if not is_rational(linear[i][i]):
            raise NonTriangularLinearPartError(
                operation, germ.name, f"diagonal entry {i + 1} not rational"
            )


def _lie_series(v: FormalVectorField, time: Fraction) -> FormalMap:
    d, m = v.shape
    components = []
    # a nilpotent derivation of C_m[x] vanishes after dim C_m[x] steps
    bound = len(monomial_basis(d, m))
    for i in range(d):
        term = Jet.variable(d, m, i)
        total = term
        factor = Fraction(1)
        for k in range(1, bound + 1):
            term = derive(v, term)
            if term.is_zero():
                break
            factor = factor * time / k
            total = total + term.scale(factor)
        components.append(total)
    return FormalMap(components)


def flow_map(v: FormalVectorField, time: Time) -> FormalMap:
    """
    Jet of the time-``time`` flow ``e^{time v}``.

    ``time`` is an exact rational or the name of a symbolic continuous time
    variable. Fields with nilpotent linear part at rational time are summed
    as a terminating Lie series, whatever the variable order. Everything
    else goes through the quasipolynomial orbit solver, and rational times
    are then evaluated in the Laurent extension.

    Raises
    ------
    ~germlab.errors.NonTriangularLinearPartError
        If the orbit solver is needed and the linear part is not
        lower-triangular with rational diagonal.
    """
    # pylint: disable=import-outside-toplevel,cyclic-import
    from .quasipoly import orbit

    d, m = v.shape
    if not isinstance(time, str) and v.is_nilpotent():
        flow = _lie_series(v, Fraction(time))
        flow.name = f"exp({format_rational(time)} {v.name or 'v'})"
        return flow
    require_triangular(v, "flow_map")
    if isinstance(time, str):
        components = [
            orbit(v, Jet.variable(d, m, i), variable=time) for i in range(d)
        ]
        return FormalMap(components, f"exp({time} {v.name or 'v'})")
    time = Fraction(time)
    symbolic = [
        orbit(v, Jet.variable(d, m, i), variable="t") for i in range(d)
    ]
    return FormalMap(
        [
            comp.map_coefficients(
                lambda q: _simplify(q.evaluate({"t": time}))
            )
            for comp in symbolic
        ],
        f"exp({format_rational(time)} {v.name or 'v'})",
    )


def _simplify(value):
    return value.simplify() if hasattr(value, "simplify") else value


@dataclass(frozen=True)
class MapLetter:
    """Power of a map generator."""

    name: str
    exponent: int = 1

    def __str__(self):
        if self.exponent == 1:
            return self.name
        return f"{self.name}^{self.exponent}"


@dataclass(frozen=True)
class FlowLetter:
    """Time-``time`` flow of a field generator."""

    name: str
    time: Time

    def __str__(self):
        time = self.time
        if isinstance(time, Fraction):
            time = (
                str(time.numerator)
                if time.denominator == 1
                else f"{time.numerator}/{time.denominator}"
            )
        return f"exp({time} {self.name})"


@dataclass(frozen=True)
class GroupWord:
    """
    Formal product of generator letters, evaluated left to right:
    ``L1 L2 ... Lk`` denotes ``L1 o L2 o ... o Lk``.
    """

    letters: Tuple[Union[MapLetter, FlowLetter], ...]

    def __str__(self):
        return "*".join(str(letter) for letter in self.letters)


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_MAP_LETTER_RE = re.compile(rf"({_NAME})\s*(?:\^\s*([-+]?\d+))?")
_FLOW_LETTER_RE = re.compile(
    rf"exp\(\s*(?:([-+]?\d+(?:/\d+)?)|({_NAME}))\s+({_NAME})\s*\)"
)


def parse_word(text: str) -> GroupWord:
    """
    Parse a group word.

    Grammar: ``word := letter ("*"? letter)*`` with letters ``F``, ``F^k``,
    ``exp(p/q v)`` and ``exp(s v)`` for a symbolic time ``s``.
    """
    letters = []
    pos = 0
    length = len(text)
    expect_letter = True
    while True:
        while pos < length and text[pos].isspace():
            pos += 1
        if pos >= length:
            break
        if text[pos] == "*":
            if expect_letter:
                raise WordSyntaxError(text, pos, "unexpected '*'")
            expect_letter = True
            pos += 1
            continue
        if text.startswith("exp(", pos):
            match = _FLOW_LETTER_RE.match(text, pos)
            if not match:
                raise WordSyntaxError(
                    text, pos, "expected 'exp(<time> <field>)'"
                )
            rational, symbol, field = match.groups()
            denominator = (rational or "").partition("/")[2]
            if denominator and not int(denominator):
                raise WordSyntaxError(text, pos, "zero denominator")
            time = Fraction(rational) if rational is not None else symbol
            letters.append(FlowLetter(field, time))
        else:
            match = _MAP_LETTER_RE.match(text, pos)
            if not match:
                raise WordSyntaxError(text, pos, "expected a generator")
            name, exponent = match.groups()
            letters.append(
                MapLetter(name, int(exponent) if exponent is not None else 1)
            )
        pos = match.end()
        expect_letter = False
    if expect_letter:
        raise WordSyntaxError(
            text, len(text), "expected a generator at end of word"
        )
    return GroupWord(tuple(letters))


def instantiate_template(template: str, n: int, slot: str = "n") -> str:
    """Textually replace the integer slot ``slot`` in ``template``."""
    return re.sub(rf"\b{re.escape(slot)}\b", str(n), template)


def word_to_map(
    word: Union[GroupWord, str],
    generators: Mapping[str, Germ],
    order: int = None,
) -> FormalMap:
    """
    Evaluate ``word`` into a formal map.

    Parameters
    ----------
    word
        A :class:`GroupWord` or its text.
    generators
        Named maps and fields the letters refer to.
    order
        Working truncation order; generators are re-truncated to it.

    Raises
    ------
    ~germlab.errors.UnknownGeneratorError
        If a letter names no generator of the right kind.
    """
    if isinstance(word, str):
        word = parse_word(word)
    resolved: Dict[str, Germ] = {}
    for letter in word.letters:
        germ = generators.get(letter.name)
        wanted = FormalMap if isinstance(letter, MapLetter) else (
            FormalVectorField
        )
        if not isinstance(germ, wanted):
            kind = "map" if wanted is FormalMap else "vector field"
            raise UnknownGeneratorError(letter.name, kind)
        if order is not None and germ.order != order:
            germ = germ.with_order(order)
        resolved[letter.name] = germ
    result: Optional[FormalMap] = None
    for letter in word.letters:
        germ = resolved[letter.name]
        if isinstance(letter, MapLetter):
            try:
                factor = map_power(germ, letter.exponent)
            except NotInvertibleError as e:
                raise NotInvertibleError(
                    f"word_to_map({word})", letter.name
                ) from e
        else:
            factor = flow_map(germ, letter.time)
        result = factor if result is None else compose_maps(result, factor)
    logger.debug("evaluated word %s at order %d", word, result.order)
    return FormalMap(result.components, str(word))


def commutator(f: FormalMap, g: FormalMap) -> FormalMap:
    """``[f, g] = f o g o f^-1 o g^-1``."""
    f._check_shape(g, "commutator")
    return compose_maps(
        compose_maps(f, g), compose_maps(invert_map(f), invert_map(g))
    )


def tangency_order(f: FormalMap) -> Optional[int]:
    """Lowest degree of ``f - id``; ``None`` if ``f`` is the identity jet."""
    d, m = f.shape
    valuations = [
        (comp - Jet.variable(d, m, i)).valuation
        for i, comp in enumerate(f.components)
    ]
    return min((v for v in valuations if v is not None), default=None)


def leading_tangency(f: FormalMap) -> Tuple[Optional[int], Tuple[Jet, ...]]:
    """
    Order and lowest-degree homogeneous part of ``f - id``.

    For ``d = 1`` and ``f(x) = x + c x^(k+1) + ...`` this is
    ``(k + 1, (c x^(k+1),))``.
    """
    order = tangency_order(f)
    d, m = f.shape
    if order is None:
        return None, tuple(Jet.zero(d, m) for _ in range(d))
    return order, tuple(
        (comp - Jet.variable(d, m, i)).homogeneous_part(order)
        for i, comp in enumerate(f.components)
    )


def format_germ(germ: Germ, variables: Sequence[str] = None) -> str:
    return germ.format(variables or default_variables(germ.dimension))
