import random
from fractions import Fraction

import pytest

import lib
from germlab.context import Context
from germlab.germs import FormalMap, pullback
from germlab.linalg import exact_rank
from germlab.multiplicity import (
    AtLeast,
    Finite,
    IdealPresentation,
    codim,
    fixed_point_multiplicity,
    intersection_multiplicity,
    lemma_matrix,
    mu_of_word,
    mu_sequence,
    stopping_rule,
    truncated_codim,
    word_fixed_point_multiplicity,
)
from germlab.ring import Jet, monomial_basis


def doubling():
    generators = {"F": lib.fmap("x", "y^2", order=2, name="F")}
    return (
        generators,
        lib.ideal("y", order=1, name="Y"),
        [lib.ideal("y - x", order=1, name="X")],
    )


class TestCodim:
    def test_stopping_rule_order(self):
        value = codim(lib.ideal("y - x", "y^16", order=16), cap=40)
        assert value == Finite(16)
        assert value.certificate_order == 17

    def test_unit_ideal(self):
        value = codim(lib.ideal("1 + x", "y", order=1))
        assert value == Finite(0) and value.certificate_order == 0

    def test_non_isolated(self):
        value = codim(lib.ideal("x*y", order=2), cap=10)
        assert value == AtLeast(10)
        assert value.render() == ">=10" and not value.is_finite

    def test_cap_from_context(self):
        with Context(cap=5):
            assert codim(lib.ideal("x", order=1)) == AtLeast(5)

    def test_truncated_codim(self):
        ideal = lib.ideal("x^2", "y^2", order=2)
        assert [truncated_codim(ideal, m) for m in (1, 2, 3, 4)] == [
            3,
            4,
            4,
            4,
        ]

    def test_lemma_matrix(self):
        matrix = lemma_matrix([lib.jet("x + y^2", 2)], 2)
        # columns x + y^2, x^2, x*y
        assert len(matrix) == 6 and len(matrix[0]) == 3
        assert [row[0] for row in matrix] == [0, 1, 0, 0, 0, 1]

    def test_sparse_and_dense_ranks_agree(self):
        rng = random.Random(71)
        for _ in range(50):
            d, m = rng.randint(1, 3), rng.randint(1, 3)
            gens = [
                lib.random_jet(rng, d, m, terms=3, constant=False)
                for _ in range(rng.randint(1, 3))
            ]
            size = len(monomial_basis(d, m))
            matrix = lemma_matrix(gens, m)
            dense = exact_rank(matrix) if matrix and matrix[0] else 0
            ideal = IdealPresentation(tuple(gens))
            assert truncated_codim(ideal, m) == size - dense

    def test_stopping_rule(self):
        values = iter([2, 3, 3, 3])
        assert stopping_rule(lambda m: next(values), 10) == Finite(3)

    def test_monotone(self):
        rng = random.Random(31)
        for _ in range(100):
            d = rng.randint(1, 2)
            gens = [
                lib.random_jet(rng, d, 3, terms=2, constant=False)
                for _ in range(rng.randint(1, 3))
            ]
            extra = lib.random_jet(rng, d, 3, terms=2, constant=False)
            small = IdealPresentation(tuple(gens))
            large = IdealPresentation(tuple(gens + [extra]))
            for m in range(1, 4):
                assert truncated_codim(large, m) <= truncated_codim(small, m)

    def test_invariance(self):
        rng = random.Random(37)
        for _ in range(100):
            d = 2
            gens = [
                lib.random_jet(rng, d, 3, terms=3, constant=False)
                for _ in range(rng.randint(1, 3))
            ]
            ideal = IdealPresentation(tuple(gens))
            m = rng.randint(1, 3)
            base = truncated_codim(ideal, m)
            shuffled = list(gens)
            rng.shuffle(shuffled)
            scaled = [
                g.scale(Fraction(rng.choice([-3, -1, 2, 5]), 7))
                for g in shuffled
            ]
            assert truncated_codim(IdealPresentation(tuple(scaled)), m) == base
            change = lib.random_map(rng, d, 3)
            moved = IdealPresentation(
                tuple(pullback(change, g) for g in gens)
            )
            assert truncated_codim(moved, m) == base
            combination = Jet.zero(d, 3)
            for g in gens:
                h = lib.random_jet(rng, d, 3, terms=3)
                combination = combination + h * g
            extended = IdealPresentation(tuple(gens + [combination]))
            assert truncated_codim(extended, m) == base

    def test_nondecreasing_in_order(self):
        rng = random.Random(41)
        for _ in range(100):
            d = rng.randint(1, 2)
            gens = [
                lib.random_jet(rng, d, 3, terms=3, constant=False)
                for _ in range(rng.randint(1, 3))
            ]
            ideal = IdealPresentation(tuple(gens))
            values = [truncated_codim(ideal, m) for m in range(1, 8)]
            assert values == sorted(values)

    def test_certificate_is_stable(self):
        rng = random.Random(43)
        checked = 0
        while checked < 40:
            gens = [
                lib.random_jet(rng, 2, 4, terms=3, constant=False)
                for _ in range(rng.randint(1, 3))
            ]
            ideal = IdealPresentation(tuple(gens))
            value = codim(ideal, cap=8)
            if not value.is_finite:
                continue
            checked += 1
            k = value.certificate_order
            for m in (k, k + 1, k + 2):
                assert truncated_codim(ideal, m) == value.value


class TestIntersection:
    def test_transversal_lines(self):
        x, y = lib.ideal("x", order=1), lib.ideal("y", order=1)
        assert intersection_multiplicity([x, y], cap=5) == Finite(1)

    def test_tangent_curves(self):
        line = lib.ideal("y", order=3)
        cubic = lib.ideal("y - x^3", order=3)
        assert intersection_multiplicity([line, cubic], cap=10) == Finite(3)

    def test_symmetric(self):
        rng = random.Random(47)
        for _ in range(50):
            first = IdealPresentation(
                (lib.random_jet(rng, 2, 3, terms=3, constant=False),)
            )
            second = IdealPresentation(
                (lib.random_jet(rng, 2, 3, terms=3, constant=False),)
            )
            assert intersection_multiplicity(
                [first, second], cap=8
            ) == intersection_multiplicity([second, first], cap=8)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            intersection_multiplicity([lib.ideal("x", order=1)])

    def test_join_name(self):
        x = lib.ideal("x", order=1, name="X")
        y = lib.ideal("y", order=1, name="Y")
        joined = IdealPresentation.join([x, y])
        assert joined.name == "X+Y" and len(joined.generators) == 2


class TestMu:
    def test_word(self):
        generators, pulled, fixed = doubling()
        assert mu_of_word("F^3", generators, pulled, fixed, 20) == Finite(8)

    def test_sequence(self):
        generators, pulled, fixed = doubling()
        sequence = mu_sequence(
            "F^n", range(0, 5), generators, pulled, fixed, 40
        )
        assert [e.mu for e in sequence.entries] == [
            Finite(1),
            Finite(2),
            Finite(4),
            Finite(8),
            Finite(16),
        ]
        assert sequence.max_finite == 16
        assert sequence.presumed_infinite == ()

    def test_sequence_failure_is_recorded(self):
        generators, pulled, fixed = doubling()
        sequence = mu_sequence(
            "F^n", range(-1, 2), generators, pulled, fixed, 8
        )
        (failure,) = sequence.failures
        assert failure.n == -1 and "not invertible" in failure.error
        assert sequence.values()[1:] == [Finite(1), Finite(2)]

    def test_sequence_workers_keep_order(self):
        generators, pulled, fixed = doubling()
        serial = mu_sequence("F^n", range(5), generators, pulled, fixed, 20)
        threaded = mu_sequence(
            "F^n", range(5), generators, pulled, fixed, 20, workers=3
        )
        assert serial == threaded

    def test_shear(self):
        generators = {"F": lib.fmap("x + y^2", "y", order=2, name="F")}
        x = lib.ideal("x", order=1, name="X")
        sequence = mu_sequence("F^n", range(-2, 3), generators, x, [x], 12)
        assert sequence.values() == [
            Finite(2),
            Finite(2),
            AtLeast(12),
            Finite(2),
            Finite(2),
        ]
        assert sequence.presumed_infinite == (0,)


class TestFixedPoints:
    def test_parabolic(self):
        f = lib.fmap("x + x^2", order=2, variables=["x"], name="f")
        for n in (1, 2, 5):
            assert fixed_point_multiplicity(f, n, cap=12) == Finite(2)

    def test_hyperbolic(self):
        f = lib.fmap("2*x", "1/3*y + x^2", order=2)
        assert fixed_point_multiplicity(f, 1, cap=6) == Finite(1)

    def test_identity(self):
        f = FormalMap.identity(2, 2)
        assert fixed_point_multiplicity(f, cap=6) == AtLeast(6)

    def test_word(self):
        generators = {"f": lib.fmap("x + x^3", order=3, variables=["x"])}
        value = word_fixed_point_multiplicity("f^2", generators, cap=10)
        assert value == Finite(3)

    def test_bad_power(self):
        f = lib.fmap("x + x^2", order=2, variables=["x"])
        with pytest.raises(ValueError):
            fixed_point_multiplicity(f, 0)

    def test_zero_jet_dimension(self):
        zero = Jet.zero(1, 3)
        assert codim(IdealPresentation((zero,)), cap=4) == AtLeast(4)
