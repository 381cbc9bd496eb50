"""
Exact linear algebra over the coefficient domains.

Matrices are lists of rows. Entries may be rationals, :class:`ExpSum` values
or quasipolynomials. Ranks and determinants run on sympy's
:class:`~sympy.polys.matrices.DomainMatrix`: rational matrices over ``QQ``,
the other domains through their Laurent encoding over a polynomial ring
(ranks then over its fraction field). Nothing uses a tolerance.
"""
import logging
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Iterator, List, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .domains import (
    as_scalar,
    from_qq,
    inverse,
    is_rational,
    is_zero,
    laurent_ring,
    to_qq,
)
from .errors import NotInvertibleError, SizeLimitExceededError

__all__ = (
    "Matrix",
    "exact_rank",
    "determinant",
    "matrix_inverse",
    "matmul",
    "matrix_power",
    "identity_matrix",
    "minors",
)

logger = logging.getLogger(__name__)

Matrix = List[List[object]]


def _copy(matrix: Sequence[Sequence[object]]) -> Matrix:
    return [[as_scalar(entry) for entry in row] for row in matrix]


def _domain_matrix(
    rows: Matrix,
) -> Tuple[DomainMatrix, Callable[[object, int], object]]:
    """
    ``rows`` as a :class:`DomainMatrix` and a decoder for determinants.

    Non-rational entries are encoded by their domain's Laurent codec and
    multiplied by one common monomial that clears negative exponents; the
    decoder divides a ``k x k`` determinant by the ``k``-th power of that
    monomial.
    """
    shape = (len(rows), len(rows[0]) if rows else 0)
    sample = next(
        (e for row in rows for e in row if not is_rational(e)), None
    )
    if sample is None:
        matrix = DomainMatrix(
            [[to_qq(e) for e in row] for row in rows], shape, QQ
        )
        return matrix, lambda value, size: from_qq(value)
    codec = type(sample).laurent_codec([e for row in rows for e in row])
    encoded = [[codec.encode(e) for e in row] for row in rows]
    width = codec.width
    if width == 0:
        matrix = DomainMatrix(
            [[to_qq(e.get((), 0)) for e in row] for row in encoded],
            shape,
            QQ,
        )
        return matrix, lambda value, size: codec.decode(
            {(): from_qq(value)} if value else {}
        )
    exponents = [key for row in encoded for e in row for key in e]
    offset = tuple(
        max(0, -min((key[i] for key in exponents), default=0))
        for i in range(width)
    )
    ring = laurent_ring(width)

    def polynomial(entry):
        return ring.from_dict(
            {
                tuple(a + b for a, b in zip(key, offset)): to_qq(c)
                for key, c in entry.items()
            }
        )

    def decode(value, size: int):
        return codec.decode(
            {
                tuple(a - size * b for a, b in zip(key, offset)): from_qq(c)
                for key, c in value.items()
            }
        )

    matrix = DomainMatrix(
        [[polynomial(e) for e in row] for row in encoded],
        shape,
        ring.to_domain(),
    )
    return matrix, decode


def exact_rank(matrix: Sequence[Sequence[object]]) -> int:
    """
    Rank over the fraction field of the entries' domain; an empty matrix
    has rank 0.
    """
    rows = _copy(matrix)
    if not rows or not rows[0]:
        return 0
    domain_matrix, _ = _domain_matrix(rows)
    return domain_matrix.rank()


def determinant(matrix: Sequence[Sequence[object]]):
    """Determinant of a square matrix, in the domain of its entries."""
    rows = _copy(matrix)
    size = len(rows)
    if size == 0:
        return Fraction(1)
    if any(len(row) != size for row in rows):
        raise ValueError("determinant of a non-square matrix")
    domain_matrix, decode = _domain_matrix(rows)
    return decode(domain_matrix.det(), size)


def identity_matrix(size: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]


def matrix_inverse(matrix: Sequence[Sequence[object]]) -> Matrix:
    """
    Inverse by Gauss-Jordan elimination.

    Pivots must be units of their domain (always true for nonzero
    rationals); for triangular matrices the pivots are the diagonal entries.

    Raises
    ------
    ~germlab.errors.NotInvertibleError
        If the matrix is singular or a pivot is not a unit.
    """
    size = len(matrix)
    rows = _copy(matrix)
    result = identity_matrix(size)
    for col in range(size):
        pivot_row = next(
            (r for r in range(col, size) if not is_zero(rows[r][col])), None
        )
        if pivot_row is None:
            raise NotInvertibleError("matrix_inverse")
        rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
        result[col], result[pivot_row] = result[pivot_row], result[col]
        scale = inverse(rows[col][col])
        rows[col] = [entry * scale for entry in rows[col]]
        result[col] = [entry * scale for entry in result[col]]
        for r in range(size):
            factor = rows[r][col]
            if r == col or is_zero(factor):
                continue
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
            result[r] = [
                a - factor * b for a, b in zip(result[r], result[col])
            ]
    return result


def matmul(
    left: Sequence[Sequence[object]], right: Sequence[Sequence[object]]
) -> Matrix:
    inner = len(right)
    cols = len(right[0]) if right else 0
    product = []
    for row in left:
        out = []
        for c in range(cols):
            total = Fraction(0)
            for k in range(inner):
                a = row[k]
                if is_zero(a):
                    continue
                b = right[k][c]
                if not is_zero(b):
                    total = total + a * b
            out.append(total)
        product.append(out)
    return product


def matrix_power(matrix: Sequence[Sequence[object]], exponent: int) -> Matrix:
    """``matrix ** exponent`` for a nonnegative integer exponent."""
    if exponent < 0:
        raise ValueError("matrix_power expects a nonnegative exponent")
    result = identity_matrix(len(matrix))
    base = _copy(matrix)
    while exponent:
        if exponent & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        exponent >>= 1
    return result


def minors(
    matrix: Sequence[Sequence[object]], size: int, limit: int = None
) -> Iterator[object]:
    """
    Yield all minors of the given ``size``, rows and columns in index order.

    Raises
    ------
    ~germlab.errors.SizeLimitExceededError
        If the number of minors exceeds ``limit``.
    """
    n_rows = len(matrix)
    n_cols = len(matrix[0]) if matrix else 0
    if size < 1 or size > min(n_rows, n_cols):
        return
    count = comb(n_rows, size) * comb(n_cols, size)
    if limit is not None and count > limit:
        raise SizeLimitExceededError("minors", count, limit)
    logger.debug("enumerating %d minors of size %d", count, size)
    for rows in combinations(range(n_rows), size):
        for cols in combinations(range(n_cols), size):
            yield determinant([[matrix[r][c] for c in cols] for r in rows])
