"""
Codimension of ideals in the truncated local algebra and intersection
multiplicities of varieties dragged by group words.

Ideals are given by finitely many jet generators. Their codimension is
found from truncations: ``c_m`` is the dimension of ``C_m[x]`` modulo the
span of all ``x^beta * f_i``, and the first order ``m`` with ``c_m < m``
certifies that ``c_m`` is the exact codimension (the ideal then contains
all monomials of degree ``m``).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, ClassVar, Dict, List, Mapping, Optional
from typing import Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .context import context
from .domains import is_zero, to_qq
from .errors import GermLabError, ShapeMismatchError
from .germs import (
    FormalMap,
    Germ,
    GroupWord,
    instantiate_template,
    map_power,
    pullback,
    word_to_map,
)
from .linalg import exact_rank
from .ring import Jet, MultiIndex, monomial_basis

__all__ = (
    "IdealPresentation",
    "Finite",
    "AtLeast",
    "ExtendedNat",
    "MuEntry",
    "MuSequence",
    "exact_rank",
    "lemma_matrix",
    "truncated_codim",
    "stopping_rule",
    "codim",
    "intersection_multiplicity",
    "mu_of_word",
    "mu_of_words",
    "mu_sequence",
    "fixed_point_multiplicity",
    "word_fixed_point_multiplicity",
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdealPresentation:
    """
    Finitely generated ideal of the local algebra.

    Generators may have different truncation orders; they are re-truncated
    whenever the ideal is used at a given order.
    """

    generators: Tuple[Jet, ...]
    name: Optional[str] = None

    def __post_init__(self):
        generators = tuple(self.generators)
        if not generators:
            raise ValueError("an ideal needs at least one generator")
        dimension = generators[0].dimension
        for gen in generators[1:]:
            if gen.dimension != dimension:
                raise ShapeMismatchError(
                    "IdealPresentation", (dimension,), (gen.dimension,)
                )
        object.__setattr__(self, "generators", generators)

    @property
    def dimension(self) -> int:
        return self.generators[0].dimension

    def truncated(self, order: int) -> Tuple[Jet, ...]:
        return tuple(gen.with_order(order) for gen in self.generators)

    def is_rational(self) -> bool:
        return all(gen.is_rational() for gen in self.generators)

    def pullback(self, f: FormalMap) -> "IdealPresentation":
        """Preimage ideal ``f^* I``, at the order of ``f``."""
        name = f"{f.name}^*{self.name}" if f.name and self.name else None
        return IdealPresentation(
            tuple(
                pullback(f, gen.with_order(f.order))
                for gen in self.generators
            ),
            name,
        )

    @classmethod
    def join(
        cls, ideals: Sequence["IdealPresentation"]
    ) -> "IdealPresentation":
        """Ideal generated by all generators of ``ideals``."""
        generators = tuple(gen for ideal in ideals for gen in ideal.generators)
        names = [ideal.name for ideal in ideals]
        name = "+".join(names) if all(names) else None
        return cls(generators, name)


@dataclass(frozen=True)
class Finite:
    """Exact codimension, certified by the stopping rule at
    ``certificate_order``."""

    value: int
    certificate_order: Optional[int] = field(default=None, compare=False)

    is_finite: ClassVar[bool] = True

    def render(self) -> Union[int, str]:
        return self.value

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class AtLeast:
    """No certificate up to truncation ``cap``; presumed non-isolated."""

    cap: int

    is_finite: ClassVar[bool] = False
    certificate_order: ClassVar[Optional[int]] = None

    def render(self) -> Union[int, str]:
        return f">={self.cap}"

    def __str__(self):
        return self.render()


ExtendedNat = Union[Finite, AtLeast]


def _shifted(gen: Jet, beta: MultiIndex, order: int) -> Dict:
    return {
        alpha + beta: coeff
        for alpha, coeff in gen.items()
        if alpha.degree + beta.degree <= order
    }


def _spanning_vectors(generators: Sequence[Jet], order: int):
    """Yield ``x^beta * f`` for every generator, as sparse coefficient maps."""
    d = generators[0].dimension
    for gen in generators:
        valuation = gen.valuation
        if valuation is None or valuation > order:
            continue
        for beta in monomial_basis(d, order - valuation):
            vector = _shifted(gen, beta, order)
            if vector:
                yield vector


def _sparse_rank(vectors, basis: List[MultiIndex]) -> int:
    """Rank of rational sparse vectors as a sparse matrix over ``QQ``."""
    index = {alpha: i for i, alpha in enumerate(basis)}
    rows = {}
    for vector in vectors:
        if vector:
            rows[len(rows)] = {
                index[alpha]: to_qq(c) for alpha, c in vector.items()
            }
    if not rows:
        return 0
    return DomainMatrix(rows, (len(rows), len(basis)), QQ).rank()


def lemma_matrix(generators: Sequence[Jet], order: int) -> List[List[object]]:
    """
    Matrix of ``(u_1..u_n) -> sum u_i f_i`` on ``C_m[x]``.

    Rows follow ``monomial_basis(d, order)``; columns are the products
    ``x^beta * f_i`` in generator order. Zero columns are left out.
    """
    d = generators[0].dimension
    basis = monomial_basis(d, order)
    index = {alpha: i for i, alpha in enumerate(basis)}
    columns = list(_spanning_vectors(generators, order))
    matrix = [[Fraction(0)] * len(columns) for _ in basis]
    for j, vector in enumerate(columns):
        for alpha, coeff in vector.items():
            matrix[index[alpha]][j] = coeff
    return matrix


def truncated_codim(ideal: IdealPresentation, order: int) -> int:
    """
    ``c_m``: dimension of ``C_m[x]`` minus the rank of the generating map.

    Rational ideals go to a sparse matrix over ``QQ``; ideals with other
    coefficients (exponential sums, quasipolynomials) are ranked through
    :func:`lemma_matrix`.
    """
    generators = ideal.truncated(order)
    basis = monomial_basis(ideal.dimension, order)
    size = len(basis)
    if all(gen.is_rational() for gen in generators):
        rank = _sparse_rank(_spanning_vectors(generators, order), basis)
    else:
        matrix = lemma_matrix(generators, order)
        rank = exact_rank(matrix) if matrix and matrix[0] else 0
    return size - rank


def stopping_rule(
    codim_at: Callable[[int], int], cap: int, label: str = "ideal"
) -> ExtendedNat:
    """
    Evaluate ``codim_at(m)`` for ``m = 1..cap`` and stop at the first
    ``c_m < m``.
    """
    for order in range(1, cap + 1):
        value = codim_at(order)
        logger.debug("%s: c_%d = %d", label, order, value)
        if value < order:
            logger.info(
                "%s: codimension %d certified at order %d", label, value, order
            )
            return Finite(value, certificate_order=order)
    logger.info("%s: no certificate up to order %d", label, cap)
    return AtLeast(cap)


def codim(ideal: IdealPresentation, cap: int = None) -> ExtendedNat:
    """
    Codimension of ``ideal`` in the local algebra.

    Returns
    -------
    Finite
        Exact value with the order at which the stopping rule fired.
    AtLeast
        If the rule did not fire up to ``cap`` (presumed non-isolated).
    """
    cap = context.cap if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be positive")
    if any(not is_zero(gen.constant_term) for gen in ideal.generators):
        return Finite(0, certificate_order=0)
    return stopping_rule(
        lambda order: truncated_codim(ideal, order), cap, ideal.name or "ideal"
    )


def intersection_multiplicity(
    varieties: Sequence[IdealPresentation], cap: int = None
) -> ExtendedNat:
    """Codimension of the ideal generated by all ``varieties`` jointly."""
    if len(varieties) < 2:
        raise ValueError("an intersection needs at least two varieties")
    return codim(IdealPresentation.join(varieties), cap)


def mu_of_word(
    word: Union[GroupWord, str],
    generators: Mapping[str, Germ],
    pulled: IdealPresentation,
    fixed: Sequence[IdealPresentation],
    cap: int = None,
) -> ExtendedNat:
    """
    Multiplicity of the preimage of ``pulled`` under ``word`` against the
    ``fixed`` varieties.

    The word is evaluated at truncation order ``cap``.
    """
    return mu_of_words([(word, pulled)], generators, fixed, cap)


def mu_of_words(
    dragged: Sequence[Tuple[Union[GroupWord, str], IdealPresentation]],
    generators: Mapping[str, Germ],
    fixed: Sequence[IdealPresentation] = (),
    cap: int = None,
) -> ExtendedNat:
    """Multiplicity of several varieties, each pulled back by its own word,
    intersected with the ``fixed`` ones."""
    cap = context.cap if cap is None else cap
    ideals = [
        variety.pullback(word_to_map(word, generators, order=cap))
        for word, variety in dragged
    ]
    return intersection_multiplicity(ideals + list(fixed), cap)


@dataclass(frozen=True)
class MuEntry:
    """One entry of a mu sequence; ``mu`` is ``None`` when it failed."""

    n: int
    mu: Optional[ExtendedNat]
    error: Optional[str] = None


@dataclass(frozen=True)
class MuSequence:
    entries: Tuple[MuEntry, ...]
    cap: int

    @property
    def max_finite(self) -> Optional[int]:
        return max(
            (e.mu.value for e in self.entries if e.mu and e.mu.is_finite),
            default=None,
        )

    @property
    def presumed_infinite(self) -> Tuple[int, ...]:
        return tuple(
            e.n
            for e in self.entries
            if e.mu is not None and not e.mu.is_finite
        )

    @property
    def failures(self) -> Tuple[MuEntry, ...]:
        return tuple(e for e in self.entries if e.mu is None)

    def values(self) -> List[Optional[ExtendedNat]]:
        return [e.mu for e in self.entries]


def _evaluate_entries(
    keys: Sequence[int], compute: Callable[[int], ExtendedNat], workers: int
) -> Tuple[MuEntry, ...]:
    def entry(n: int) -> MuEntry:
        try:
            return MuEntry(n, compute(n))
        except GermLabError as e:
            logger.debug("entry %d failed: %s", n, e)
            return MuEntry(n, None, str(e))

    if workers > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return tuple(executor.map(entry, keys))
    return tuple(entry(n) for n in keys)


def mu_sequence(
    template: str,
    n_range: Sequence[int],
    generators: Mapping[str, Germ],
    pulled: IdealPresentation,
    fixed: Sequence[IdealPresentation],
    cap: int = None,
    workers: int = None,
) -> MuSequence:
    """
    The sequence ``n -> mu_of_word(template[n], ...)``.

    ``template`` contains the integer slot ``n``. Entries that fail are
    recorded with their error message; the others are still computed.
    Entries keep input order for any number of ``workers``.
    """
    cap = context.cap if cap is None else cap
    workers = context.workers if workers is None else workers
    keys = list(n_range)

    def compute(n: int) -> ExtendedNat:
        return mu_of_word(
            instantiate_template(template, n), generators, pulled, fixed, cap
        )

    return MuSequence(_evaluate_entries(keys, compute, workers), cap)


def _fixed_point_ideal(f: FormalMap) -> IdealPresentation:
    d, m = f.shape
    return IdealPresentation(
        tuple(comp - Jet.variable(d, m, i) for i, comp in enumerate(f)),
        f"fix({f.name})" if f.name else None,
    )


def fixed_point_multiplicity(
    f: FormalMap, n: int = 1, cap: int = None
) -> ExtendedNat:
    """
    Algebraic multiplicity of the origin as a fixed point of ``f^n``: the
    codimension of the ideal of the components of ``f^n(x) - x``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    cap = context.cap if cap is None else cap
    power = map_power(f.with_order(cap), n)
    power.name = f"{f.name}^{n}" if f.name else None
    return codim(_fixed_point_ideal(power), cap)


def word_fixed_point_multiplicity(
    word: Union[GroupWord, str],
    generators: Mapping[str, Germ],
    cap: int = None,
) -> ExtendedNat:
    """Fixed-point multiplicity of the map a group word evaluates to."""
    cap = context.cap if cap is None else cap
    return codim(
        _fixed_point_ideal(word_to_map(word, generators, order=cap)), cap
    )
