import random
from fractions import Fraction

import pytest

import lib
from germlab.domains import ExpSum
from germlab.errors import (
    CommutativityError,
    EvaluationError,
    InexactDivisionError,
    NonTriangularLinearPartError,
    NotInvertibleError,
    PolynomialSyntaxError,
    UnknownVariableError,
    UnsupportedSpectrumError,
)
from germlab.germs import instantiate_template
from germlab.linalg import exact_rank, matrix_power
from germlab.multiplicity import (
    AtLeast,
    Finite,
    IdealPresentation,
    lemma_matrix,
    mu_of_word,
)
from germlab.quasipoly import (
    Quasipolynomial,
    action_matrix,
    certify_boundedness,
    continuous,
    discrete,
    exceptional_conditions,
    generic_multiplicity,
    group_orbit,
    group_variables,
    orbit,
    orbit_coefficients,
    orbit_matrix,
    parse_quasipolynomial,
    require_commuting,
    solve_discrete_recurrence,
    solve_linear_ode,
    spectrum_of_group,
)

T = (discrete("t"),)
S = (continuous("s"),)


def qp(text, variables=T):
    return parse_quasipolynomial(text, variables)


def random_qp(rng, variables=T):
    """Small random quasipolynomial with positive bases."""
    total = Quasipolynomial.constant(variables, 0)
    for _ in range(rng.randint(1, 3)):
        base = Fraction(rng.choice([1, 2, 3]), rng.choice([1, 2]))
        term = Quasipolynomial.exponential(variables, "t", base)
        power = Quasipolynomial.time(variables, "t", rng.randint(0, 2))
        total = total + term * power * lib.random_rational(rng)
    return total


class TestQuasipolynomial:
    def test_parse_and_render(self):
        q = qp("2/7*4^t - 2/7*(1/2)^t")
        assert q.render() == "2/7*4^t - 2/7*(1/2)^t"
        assert qp("t^2*3^t + 1").render() == "t^2*3^t + 1"
        assert qp("t*exp(s)", (discrete("t"), continuous("s"))).render() == (
            "t*exp(s)"
        )
        assert qp("exp(-1/2 s)", S).render() == "exp(-1/2 s)"

    def test_parse_errors(self):
        with pytest.raises(PolynomialSyntaxError, match="continuous") as e:
            qp("2^s", S)
        assert e.value.position == 2
        with pytest.raises(PolynomialSyntaxError, match="discrete"):
            qp("exp(t)")
        with pytest.raises(PolynomialSyntaxError, match="positive exponent"):
            qp("t^-1")
        with pytest.raises(PolynomialSyntaxError, match="fractional power"):
            qp("3^(t/2)")
        with pytest.raises(UnknownVariableError, match='"sin"'):
            qp("sin(t)")

    def test_evaluate(self):
        assert qp("t*2^t + 1").evaluate({"t": 3}) == 25
        assert qp("(1/2)^t").evaluate({"t": -2}) == 4
        value = qp("s*exp(2 s)", S).evaluate({"s": Fraction(1, 2)})
        assert value == ExpSum.exp(1, Fraction(1, 2))

    def test_evaluate_errors(self):
        with pytest.raises(EvaluationError):
            qp("2^t").evaluate({"t": Fraction(1, 2)})
        with pytest.raises(EvaluationError):
            qp("2^t").evaluate({})

    def test_evaluation_is_a_homomorphism(self):
        rng = random.Random(41)
        for _ in range(100):
            p, q = random_qp(rng), random_qp(rng)
            t = rng.randint(-3, 6)
            at = {"t": t}
            assert (p + q).evaluate(at) == p.evaluate(at) + q.evaluate(at)
            assert (p * q).evaluate(at) == p.evaluate(at) * q.evaluate(at)

    def test_shift_and_derivative(self):
        assert qp("t*2^t").shift("t") == qp("2*t*2^t + 2*2^t")
        assert qp("s*exp(s)", S).derivative("s") == qp(
            "s*exp(s) + exp(s)", S
        )

    def test_exact_quotient(self):
        p = qp("4^t - 1")
        assert p.exquo(qp("2^t - 1")) == qp("2^t + 1")
        assert qp("6^t").exquo(qp("3^t")) == qp("2^t")
        with pytest.raises(InexactDivisionError):
            qp("4^t + 1").exquo(qp("2^t + 1"))
        with pytest.raises(UnsupportedSpectrumError):
            qp("(-1)^t").exquo(qp("2^t"))

    def test_inverse(self):
        assert qp("3*2^t").inverse() == qp("1/3*(1/2)^t")
        with pytest.raises(NotInvertibleError):
            qp("t").inverse()

    def test_normalized(self):
        assert qp("3*2^t - 6").normalized() == qp("2^t - 2")


class TestSolvers:
    def test_recurrence(self):
        assert str(solve_discrete_recurrence(2, qp("2^t"))) == "1/2*t*2^t"
        assert solve_discrete_recurrence(3, 0, 5) == qp("5*3^t")

    def test_recurrence_residuals(self):
        rng = random.Random(43)
        for _ in range(100):
            mu = Fraction(rng.choice([-2, 1, 2, 3]), rng.choice([1, 2]))
            forcing = random_qp(rng)
            init = lib.random_rational(rng)
            q = solve_discrete_recurrence(mu, forcing, init)
            assert q.evaluate({"t": 0}) == init
            for t in range(13):
                assert q.evaluate({"t": t + 1}) == mu * q.evaluate(
                    {"t": t}
                ) + forcing.evaluate({"t": t})

    def test_ode_residuals(self):
        rng = random.Random(47)
        variables = (continuous("t"),)
        for _ in range(100):
            lam = Fraction(rng.randint(-2, 2))
            forcing = Quasipolynomial.constant(variables, 0)
            for _ in range(rng.randint(1, 2)):
                rate, power = rng.randint(-1, 2), rng.randint(0, 2)
                term = Quasipolynomial.exponential(variables, "t", rate)
                term = term * Quasipolynomial.time(variables, "t", power)
                forcing = forcing + term * lib.random_rational(rng)
            init = lib.random_rational(rng)
            q = solve_linear_ode(lam, forcing, init)
            assert q.evaluate({"t": 0}) == init
            residual = q.derivative("t") - q * lam - forcing
            assert not residual
            for t in range(13):
                assert residual.evaluate({"t": t}) == 0

    def test_zero_multiplier(self):
        with pytest.raises(NotInvertibleError):
            solve_discrete_recurrence(0, 1)


class TestOrbits:
    def setup_class(self):
        self.f = lib.fmap("2*x", "1/2*y + x^2", order=4, name="F")

    def test_action_matrix(self):
        matrix = action_matrix(self.f, 2)
        # basis 1, x, y, x^2, x*y, y^2; column of y
        assert [row[2] for row in matrix] == [0, 0, Fraction(1, 2), 1, 0, 0]

    def test_orbit_matrix_is_matrix_power(self):
        symbolic = orbit_matrix(self.f, 4)
        matrix = action_matrix(self.f, 4)
        for t in range(9):
            power = matrix_power(matrix, t)
            for row, qrow in zip(power, symbolic):
                for value, q in zip(row, qrow):
                    assert q.evaluate({"t": t}) == value

    def test_orbit_coefficient(self):
        q = orbit_coefficients(self.f, 1, (2, 0), order=2)
        assert q == qp("2/7*4^t - 2/7*(1/2)^t")

    def test_non_triangular(self):
        g = lib.fmap("y", "x", order=2, name="G")
        with pytest.raises(NonTriangularLinearPartError):
            action_matrix(g)

    def test_field_orbit(self):
        v = lib.vfield("x", "x + y", order=3)
        jet = orbit(v, lib.jet("y", 3))
        variables = (continuous("t"),)
        assert jet.coefficient((0, 1)) == qp("exp(t)", variables)
        assert jet.coefficient((1, 0)) == qp("t*exp(t)", variables)
        assert len(jet.terms) == 2

    def test_group(self):
        generators = {
            "F": lib.fmap("x + y^2", "y", order=3, name="F"),
            "v": lib.vfield("y^2", "0", order=3, name="v"),
        }
        variables = group_variables(generators)
        assert [str(v) for v in variables] == ["t_F", "t_v"]
        jet = group_orbit(generators, lib.jet("x", 3))
        assert jet.coefficient((1, 0)) == 1
        assert jet.coefficient((0, 2)) == qp("t_F + t_v", variables)
        spectrum = spectrum_of_group(generators)
        assert str(spectrum) == "t_F: {1}; t_v: {0}"
        assert spectrum.admits(jet.coefficient((0, 2)), 3)


def sampled(matrix, t):
    return [
        [
            q.evaluate({"t": t}) if isinstance(q, Quasipolynomial) else q
            for q in row
        ]
        for row in matrix
    ]


class TestGenericMultiplicity:
    def setup_class(self):
        self.shear = {"F": lib.fmap("x + y^2", "y", order=2, name="F")}
        self.x = lib.ideal("x", order=1, name="X")

    def test_generic_value(self):
        generic = generic_multiplicity(self.shear, self.x, self.x, cap=12)
        assert generic.value == Finite(2)
        assert [str(v) for v in generic.variables] == ["t"]

    def test_exceptional_conditions(self):
        conditions = exceptional_conditions(self.shear, self.x, self.x, 3)
        assert conditions
        for q in conditions:
            assert q.evaluate({"t": 0}) == 0
        assert any(q.evaluate({"t": 1}) for q in conditions)

    def test_certificate(self):
        certificate = certify_boundedness(
            self.shear, self.x, self.x, cap=12, samples=(-5, 5)
        )
        assert certificate.consistent
        assert certificate.max_finite == 2
        assert certificate.exceptional_points == ((("t", 0),),)
        at_zero = certificate.samples[5]
        assert at_zero.mu == AtLeast(12) and at_zero.exceptional

    def test_rank_semicontinuity(self):
        rng = random.Random(61)
        for _ in range(30):
            f = lib.random_map(rng, 2, 2, positive=True)
            pulled = lib.random_jet(rng, 2, 2, terms=3, constant=False)
            fixed = lib.random_jet(rng, 2, 2, terms=3, constant=False)
            dragged = group_orbit({"F": f}, pulled, 2)
            matrix = lemma_matrix([dragged, fixed], 2)
            generic = exact_rank(matrix)
            ranks = [exact_rank(sampled(matrix, t)) for t in range(-4, 5)]
            assert all(rank <= generic for rank in ranks)
            assert generic in ranks

    def test_generic_bounds_pointwise(self):
        rng = random.Random(67)
        for _ in range(12):
            generators = {"F": lib.random_map(rng, 2, 3, positive=True)}
            pulled = IdealPresentation(
                (lib.random_jet(rng, 2, 3, terms=3, constant=False),)
            )
            fixed = IdealPresentation(
                (lib.random_jet(rng, 2, 3, terms=3, constant=False),)
            )
            generic = generic_multiplicity(generators, pulled, fixed, cap=6)
            values = [
                mu_of_word(
                    instantiate_template("F^n", t),
                    generators,
                    pulled,
                    [fixed],
                    cap=6,
                )
                for t in range(-3, 4)
            ]
            if not generic.value.is_finite:
                assert all(not value.is_finite for value in values)
                continue
            for value in values:
                if value.is_finite:
                    assert value.value >= generic.value.value
            assert generic.value in values

    def test_single_generator_needs_no_commutation(self):
        require_commuting(self.shear, "test")
        generators = {
            "F": lib.fmap("x + x^2", "y", order=2, name="F"),
            "G": lib.fmap("2*x", "y", order=2, name="G"),
        }
        with pytest.raises(CommutativityError):
            require_commuting(generators, "test")

    def test_non_commuting(self):
        generators = {
            "F": lib.fmap("x + x^2", "y", order=2, name="F"),
            "G": lib.fmap("2*x", "y", order=2, name="G"),
        }
        with pytest.raises(CommutativityError, match=r"\(1\) F,G"):
            generic_multiplicity(generators, self.x, [], cap=4)

    def test_non_invertible_map(self):
        generators = {"F": lib.fmap("x", "y^2", order=2, name="F")}
        with pytest.raises(NotInvertibleError):
            generic_multiplicity(
                generators,
                lib.ideal("y", order=1),
                lib.ideal("y - x", order=1),
                cap=4,
            )
