import pytest

from germlab.objects import Command, Meta, Option, RootCommand
from germlab.types import IntRange


class TestOption:
    def test_long_text_required(self):
        with pytest.raises(ValueError, match="must start with '--'"):
            Option("-c")

    def test_flag(self):
        flag = Option("--verbose", "-v")
        assert flag.type is bool and not flag.takes_value
        assert flag.default is None and not flag.required

    def test_value(self):
        opt = Option("--range", argtype=IntRange, required=True)
        assert opt.takes_value and opt.required
        assert repr(opt) == "<Option --range>"


class TestCommand:
    def test_registration(self):
        cmd = Command("mu-seq")
        cmd.word = Option("--word", argtype=str)
        cmd.sub = Command("inner")
        meta = Meta(cmd)
        assert list(meta.options) == ["help", "word"]
        assert list(meta.subcommands) == ["sub"]
        assert meta.name == "mu-seq"
        assert repr(cmd) == "<Command mu-seq>"

    def test_plain_attributes_are_not_registered(self):
        cmd = Command("codim")
        cmd.counter = 3
        assert "counter" not in Meta(cmd).options
        assert cmd.counter == 3

    def test_delete(self):
        cmd = Command("codim")
        cmd.ideal = Option("--ideal", argtype=str)
        cmd.sub = Command("inner")
        del cmd.ideal
        del cmd.sub
        assert list(Meta(cmd).options) == ["help"]
        assert not Meta(cmd).subcommands

    def test_lookup(self):
        cmd = Command("flow")
        cmd.time = Option("--time", "-t", argtype=str)
        cmd.inner = Command("inner")
        meta = Meta(cmd)
        assert meta.option("-t") == ("time", cmd.time)
        assert meta.option("--time") == ("time", cmd.time)
        assert meta.option("--order") is None
        assert meta.subcommand("inner") is cmd.inner
        assert meta.subcommand("outer") is None

    def test_callback(self):
        cmd = Command("qp")
        cmd.order = Option("--order", argtype=int, default=3)
        cmd.pull = Option("--pull", argtype=str)
        Meta(cmd).set_callback(
            lambda session, **kw: (session, kw), ["order", "pull"]
        )
        assert cmd("s", pull="Y") == ("s", {"order": 3, "pull": "Y"})
        assert cmd("s", help=True)[1] == {"order": 3, "pull": None}

    def test_without_callback(self):
        assert Command("empty")() is None


class TestMeta:
    def test_one_meta_per_command(self):
        cmd = Command("codim")
        assert Meta(cmd) is Meta(cmd)
        assert Meta(cmd) is not Meta(Command("codim"))

    def test_root_version(self):
        root = RootCommand("germlab", desc="root", version="1.2.3")
        assert Meta(root).version == "1.2.3"
        assert list(Meta(root).options) == ["help", "version"]
        assert Meta(root).help.desc.long == "root"
