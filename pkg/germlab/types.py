"""Option value types of the command line interface."""
import re
from fractions import Fraction
from typing import Tuple

__all__ = (
    "OptionType",
    "Rational",
    "IntRange",
    "NameList",
    "OutputFormat",
    "convert",
)


class OptionType:
    """
    Base class for option value types.

    Calling a subclass with the option text returns the converted value,
    which need not be an instance of the subclass. Bad text raises
    ``ValueError``.

    Attributes
    ----------
    metavar: str
        Placeholder for the value in help messages.
    """

    metavar = "VALUE"


class Rational(OptionType):
    """Exact rational ``p/q`` or integer."""

    metavar = "P/Q"

    def __new__(cls, value: str) -> Fraction:
        text = value.strip()
        if not re.fullmatch(r"[-+]?\d+(/\d+)?", text):
            raise ValueError(f"not an exact rational: {value!r}")
        denominator = text.partition("/")[2]
        if denominator and not int(denominator):
            raise ValueError(f"zero denominator in {value!r}")
        return Fraction(text)


_RANGE_RE = re.compile(r"\s*([-+]?\d+)\s*(?:\.\.\s*([-+]?\d+)\s*)?")


class IntRange(OptionType):
    """Inclusive integer range ``a..b``; a single integer is ``a..a``."""

    metavar = "A..B"

    def __new__(cls, value: str) -> range:
        match = _RANGE_RE.fullmatch(value)
        if not match:
            raise ValueError(f"expected a range a..b, got {value!r}")
        low = int(match[1])
        high = int(match[2]) if match[2] is not None else low
        if high < low:
            raise ValueError(f"empty range {value!r}")
        return range(low, high + 1)


class NameList(OptionType):
    """Names separated by ``,`` or ``+``."""

    metavar = "NAME[,NAME...]"

    def __new__(cls, value: str) -> Tuple[str, ...]:
        names = tuple(part.strip() for part in re.split(r"[,+]", value))
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise ValueError(f"invalid name {name!r} in {value!r}")
        return names


class OutputFormat(OptionType):
    """``csv`` or ``json``."""

    metavar = "csv|json"
    choices = ("csv", "json")

    def __new__(cls, value: str) -> str:
        if value not in cls.choices:
            raise ValueError(f"unknown format {value!r}")
        return value


def convert(text, argtype: type):
    """
    Convert ``text`` to ``argtype``.

    Values that already have a non-string type (e.g. numbers read from a
    scenario query) are converted through their string form.
    """
    if argtype is bool:
        if isinstance(text, bool):
            return text
        if str(text) in ("true", "True", "yes", "1"):
            return True
        if str(text) in ("false", "False", "no", "0"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if not isinstance(text, str):
        text = str(text)
    if argtype is str:
        return text
    if argtype is int:
        if not re.fullmatch(r"\s*[-+]?\d+\s*", text):
            raise ValueError(f"expected an integer, got {text!r}")
    return argtype(text)
