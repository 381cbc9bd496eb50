"""End-to-end checks of the headline results against independent oracles."""
import random
from fractions import Fraction

import pytest

import lib
from germlab.domains import ExpSum
from germlab.germs import commutator, compose_maps, flow_map, leading_tangency
from germlab.linalg import matrix_power
from germlab.multiplicity import (
    AtLeast,
    Finite,
    codim,
    fixed_point_multiplicity,
    mu_sequence,
)
from germlab.quasipoly import (
    action_matrix,
    continuous,
    generic_multiplicity,
    orbit_matrix,
    parse_quasipolynomial,
)


class TestNonInvertibleDoubling:
    def test_powers_of_two(self):
        generators = {"F": lib.fmap("x", "y^2", order=2, name="F")}
        sequence = mu_sequence(
            "F^n",
            range(0, 5),
            generators,
            lib.ideal("y", order=1, name="Y"),
            [lib.ideal("y - x", order=1, name="X")],
            cap=40,
        )
        assert sequence.values() == [Finite(2**n) for n in range(5)]


class TestShearBoundedness:
    def test_sequence_and_generic_value(self):
        generators = {"F": lib.fmap("x + y^2", "y", order=2, name="F")}
        x = lib.ideal("x", order=1, name="X")
        sequence = mu_sequence("F^n", range(-5, 6), generators, x, [x], 12)
        for entry in sequence.entries:
            expected = AtLeast(12) if entry.n == 0 else Finite(2)
            assert entry.mu == expected
        generic = generic_multiplicity(generators, x, [x], cap=12)
        assert generic.value == Finite(sequence.max_finite)


class TestCommutatorOrder:
    @pytest.mark.parametrize(
        "nu1,nu2,c1,c2", [(1, 2, 1, 1), (1, 3, 1, 1), (2, 3, 2, 3)]
    )
    def test_order_and_magnitude(self, nu1, nu2, c1, c2):
        order = nu1 + nu2 + 1
        g1 = lib.fmap(f"x + {c1}*x^{nu1 + 1}", order=order, variables=["x"])
        g2 = lib.fmap(f"x + {c2}*x^{nu2 + 1}", order=order, variables=["x"])
        degree, (part,) = leading_tangency(commutator(g1, g2))
        assert degree == order
        coefficient = part.coefficient((order,))
        assert abs(coefficient) == abs(c1 * c2 * (nu1 - nu2))

    @pytest.mark.parametrize("nu", [1, 2])
    def test_equal_orders_cancel(self, nu):
        order = 2 * nu + 1
        g1 = lib.fmap(f"x + x^{nu + 1}", order=order, variables=["x"])
        g2 = lib.fmap(f"x + 5*x^{nu + 1}", order=order, variables=["x"])
        component = commutator(g1, g2)[0]
        assert component.coefficient((order,)) == 0


class TestParabolicFixedPoint:
    def test_all_iterates(self):
        f = lib.fmap("x + x^2", order=2, variables=["x"], name="F")
        for n in range(1, 11):
            assert fixed_point_multiplicity(f, n, cap=12) == Finite(2)


class TestOrbitMatrixOracle:
    def test_against_matrix_powers(self):
        f = lib.fmap("2*x", "1/2*y + x^2", order=4, name="F")
        symbolic = orbit_matrix(f, 4)
        matrix = action_matrix(f, 4)
        for t in range(9):
            power = matrix_power(matrix, t)
            assert [
                [q.evaluate({"t": t}) for q in row] for row in symbolic
            ] == power


class TestStaircaseOracle:
    def test_random_monomial_ideals(self):
        rng = random.Random(2024)
        cap = 24
        for _ in range(50):
            d, exponents = lib.random_monomial_ideal(rng)
            ideal = lib.monomial_ideal(d, exponents, order=4 * d)
            expected = lib.staircase_codim(d, exponents)
            value = codim(ideal, cap=cap)
            if expected is None:
                assert value == AtLeast(cap)
            elif expected < cap:
                assert value == Finite(expected)
            else:
                assert value == AtLeast(cap)


class TestFlows:
    def test_symbolic_flow_coefficients(self):
        v = lib.vfield("x", "x + y", order=3, name="v")
        flow = flow_map(v, "t")
        variables = (continuous("t"),)
        et = parse_quasipolynomial("exp(t)", variables)
        tet = parse_quasipolynomial("t*exp(t)", variables)
        assert flow[0].terms == {(1, 0): et}
        assert flow[1].terms == {(1, 0): tet, (0, 1): et}

    def test_symbolic_flow_at_rational_times(self):
        v = lib.vfield("x", "x + y", order=3, name="v")
        for t in (Fraction(1, 2), Fraction(-2, 3), 1):
            flow = flow_map(v, t)
            e = ExpSum.exp(Fraction(t))
            assert flow[0].coefficient((1, 0)) == e
            assert flow[1].coefficient((1, 0)) == e * Fraction(t)

    def test_nilpotent_group_law(self):
        rng = random.Random(19)
        v = lib.vfield("y", "0", order=3, name="v")
        for _ in range(20):
            s, t = lib.random_rational(rng), lib.random_rational(rng)
            assert compose_maps(flow_map(v, s), flow_map(v, t)) == flow_map(
                v, s + t
            )
