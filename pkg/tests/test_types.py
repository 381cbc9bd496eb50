from fractions import Fraction

import pytest

from germlab.types import IntRange, NameList, OutputFormat, Rational, convert


class TestRational:
    def test_valid(self):
        assert Rational("3/4") == Fraction(3, 4)
        assert Rational(" -2 ") == -2
        assert Rational("+6/4") == Fraction(3, 2)

    def test_invalid(self):
        for text in ("0.5", "1/0", "x", "1/-2", ""):
            with pytest.raises(ValueError):
                Rational(text)


class TestIntRange:
    def test_valid(self):
        assert IntRange("0..3") == range(0, 4)
        assert IntRange("-5..5") == range(-5, 6)
        assert IntRange("7") == range(7, 8)
        assert IntRange(" 1 .. 2 ") == range(1, 3)

    def test_invalid(self):
        for text in ("3..1", "a..b", "1..", "1...3"):
            with pytest.raises(ValueError):
                IntRange(text)


class TestNameList:
    def test_separators(self):
        assert NameList("X+Y") == ("X", "Y")
        assert NameList("X, Y,Z") == ("X", "Y", "Z")
        assert NameList("X") == ("X",)

    def test_invalid(self):
        with pytest.raises(ValueError, match="invalid name ''"):
            NameList("X+")
        with pytest.raises(ValueError):
            NameList("1X")


class TestConvert:
    def test_format(self):
        assert OutputFormat("json") == "json"
        with pytest.raises(ValueError):
            OutputFormat("xml")

    def test_int(self):
        assert convert("7", int) == 7
        assert convert(7, int) == 7
        with pytest.raises(ValueError):
            convert("7.5", int)

    def test_bool(self):
        assert convert("yes", bool) is True
        assert convert(False, bool) is False
        with pytest.raises(ValueError):
            convert("maybe", bool)

    def test_other(self):
        assert convert(3, str) == "3"
        assert convert("0..2", IntRange) == range(3)
        assert convert(Fraction(1, 2), Rational) == Fraction(1, 2)
