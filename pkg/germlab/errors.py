"""All errors that can be raised directly by germlab."""

from typing import Optional, Sequence

# pylint: disable=missing-class-docstring


class GermLabError(Exception):
    """Base class for all germlab exceptions."""


class InputError(GermLabError):
    """The user supplied text or data that germlab cannot accept."""


class MathematicalError(GermLabError):
    """A mathematical precondition of an operation does not hold."""


class PolynomialSyntaxError(InputError):
    """Text does not conform to the polynomial grammar."""

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(
            f"Syntax error at position {position}: {reason}\n"
            f"  {text}\n  {' ' * position}^"
        )


class UnknownVariableError(InputError):
    def __init__(self, name: str, position: int = None):
        self.name = name
        self.position = position
        msg = f'Unknown variable "{name}"'
        if position is not None:
            msg += f" at position {position}"
        super().__init__(msg)


class DegreeOverflowError(InputError):
    """A polynomial term exceeds the truncation order."""

    def __init__(self, text: str, degree: int, order: int):
        self.text = text
        self.degree = degree
        self.order = order
        super().__init__(
            f"Term of degree {degree} exceeds truncation order {order} "
            f"in {text!r}"
        )


class WordSyntaxError(InputError):
    """Text does not conform to the group-word grammar."""

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        super().__init__(
            f"Invalid group word at position {position}: {reason}\n"
            f"  {text}\n  {' ' * position}^"
        )


class UnknownGeneratorError(InputError):
    def __init__(self, name: str, kind: str = "generator"):
        self.name = name
        super().__init__(f'Unknown {kind} "{name}"')


class ScenarioError(InputError):
    """The scenario document is malformed or fails validation."""

    def __init__(self, reason: str, entity: str = None):
        self.entity = entity
        super().__init__(f"{entity}: {reason}" if entity else reason)


class OptionError(InputError):
    """Invalid command line."""

    def __init__(self, reason: str, option: str = None):
        self.option = option
        super().__init__(f"{option}: {reason}" if option else reason)


class ShapeMismatchError(MathematicalError):
    """Operands have different dimension or truncation order."""

    def __init__(self, operation: str, left: tuple, right: tuple):
        self.operation = operation
        super().__init__(
            f"{operation}: shape mismatch (d, m) = {left} vs {right}"
        )


class ConstantTermError(MathematicalError):
    """A germ component has a nonzero constant term."""

    def __init__(self, entity: str, component: int):
        self.entity = entity
        self.component = component
        super().__init__(f"{entity} component {component} has constant term")


class NotInvertibleError(MathematicalError):
    """The linear part of a formal map is singular."""

    def __init__(self, operation: str, entity: str = None):
        self.operation = operation
        self.entity = entity
        msg = f"{operation}: formal map"
        if entity:
            msg += f" {entity}"
        super().__init__(msg + " is not invertible (singular linear part)")


class NonTriangularLinearPartError(MathematicalError):
    """
    The linear part is not lower-triangular in the declared variable order.
    """

    def __init__(self, operation: str, entity: str = None, detail: str = ""):
        self.operation = operation
        self.entity = entity
        msg = f"{operation}: linear part"
        if entity:
            msg += f" of {entity}"
        msg += " is not lower-triangular in the declared variable order"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InexactDivisionError(MathematicalError):
    """Divisor does not divide the dividend in the coefficient domain."""

    def __init__(self, dividend=None, divisor=None):
        msg = InexactDivisionError.__doc__[:-1]
        if dividend is not None:
            msg += f": ({dividend}) / ({divisor})"
        super().__init__(msg)


class UnsupportedSpectrumError(MathematicalError):
    """Spectrum outside the exactly representable scope."""

    def __init__(self, operation: str, detail: str):
        self.operation = operation
        super().__init__(f"{operation}: unsupported spectrum: {detail}")


class SizeLimitExceededError(MathematicalError):
    """Combinatorial enumeration would exceed the configured size limit."""

    def __init__(self, operation: str, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(
            f"{operation}: {size} minors exceed the size limit of {limit}"
        )


class CommutativityError(MathematicalError):
    """The generators do not commute up to the truncation order."""

    def __init__(self, operation: str, failures: Sequence[str]):
        self.failures = list(failures)
        super().__init__(
            f"{operation}: generators do not commute: " + "; ".join(failures)
        )


class EvaluationError(InputError):
    """Invalid assignment for quasipolynomial evaluation."""

    def __init__(self, variable: str, value, reason: Optional[str] = None):
        self.variable = variable
        self.value = value
        super().__init__(
            f"Cannot assign {value!r} to time variable {variable!r}"
            + (f": {reason}" if reason else "")
        )
