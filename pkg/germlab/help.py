"""Help messages for command line objects."""

import textwrap
from typing import List, Union

from ._util import reassignable_property
from .objects import CliObject, Command, Meta, Option

__all__ = (
    "Help",
    "CommandHelp",
    "OptionHelp",
    "HelpSection",
    "HelpEntry",
    "Description",
)


class Help(CliObject):
    """
    Hierarchical representation of a help message.

    Every part can be customized by assigning to the corresponding property
    on an instance.
    """

    @reassignable_property
    def text(self) -> str:
        """The entire help text."""
        raise NotImplementedError

    def __str__(self):
        return self.text


class Description:
    """
    Command description that can hold both a long and a brief version.

    Attributes
    ----------
    long: str
        Used in the help text of the command at hand.
    brief: str
        Describes this command when it is listed in another command's help
        text. Falls back to ``long``.
    """

    __slots__ = ("long", "brief")

    def __init__(
        self, long_or_description: Union[str, "Description"], brief=None
    ):
        if isinstance(long_or_description, Description):
            if brief is not None:
                raise ValueError("brief")
            self.long = long_or_description.long
            self.brief = long_or_description.brief
        else:
            long = long_or_description
            self.long = long or brief or ""
            self.brief = brief or long or ""

    def __str__(self):
        return self.long

    def __repr__(self):
        return repr(self.long)


class HelpEntry(Help):
    """An option or subcommand entry: signature padded to a fixed width."""

    def __init__(self, signature: str, desc: Union[str, Description]):
        self.signature = signature
        self.desc = desc

    @reassignable_property
    def signature_width(self) -> int:
        """Width of the signature column. Default: 32 characters."""
        return 32

    @reassignable_property
    def text(self) -> str:
        desc = (
            self.desc.brief
            if isinstance(self.desc, Description)
            else self.desc
        )
        if not desc:
            return self.signature
        if len(self.signature) >= self.signature_width:
            return (
                self.signature
                + "\n"
                + " " * self.signature_width
                + desc
            )
        return self.signature.ljust(self.signature_width) + desc


class OptionHelp(Help):
    """Help for a single :class:`~germlab.objects.Option`."""

    def __init__(self, option: Option):
        self.option = option

    @reassignable_property
    def desc(self) -> str:
        """Option description."""
        return ""

    @reassignable_property
    def argname(self) -> str:
        """Placeholder for the option value."""
        metavar = getattr(self.option.type, "metavar", None)
        return metavar or self.option.long[2:].upper()

    @reassignable_property
    def signature(self) -> str:
        """``-s, --long ARGNAME``; ``ARGNAME`` only for options with a
        value."""
        opt = self.option
        long = opt.long
        if opt.takes_value:
            long += f" {self.argname}"
        return ", ".join(filter(None, (opt.short, long)))

    @reassignable_property
    def hint(self) -> str:
        """Usage hint, bracketed unless the option is required."""
        opt = self.option
        text = opt.long
        if opt.takes_value:
            text += f" {self.argname}"
        return text if opt.required else f"[{text}]"

    @reassignable_property
    def text(self) -> str:
        return HelpEntry(self.signature, self.desc).text


class HelpSection(Help):
    """Help section, with a headline and indented content."""

    def __init__(self, name: str, content=""):
        self.name = name
        if content:
            self.content = content

    @reassignable_property
    def headline(self) -> str:
        return f"{self.name}:"

    @reassignable_property
    def content(self) -> str:
        """Section content, excluding headline."""
        return ""

    @reassignable_property
    def indent(self) -> int:
        return 2

    @reassignable_property
    def active(self) -> bool:
        """Whether the section is displayed."""
        return bool(self.content)

    @reassignable_property
    def text(self) -> str:
        return (
            self.headline
            + "\n"
            + textwrap.indent(self.content, " " * self.indent)
        )


class CommandHelp(Help):
    """
    A command's help message: usage, description, subcommands and options.

    ``desc`` can be assigned a ``str`` or :class:`Description`; reading it
    always gives a :class:`Description`.
    """

    def __init__(self, command: Command):
        self.command = command

    def __getattribute__(self, key):
        if key == "desc":
            attr = super().__getattribute__("desc")
            return attr if isinstance(attr, Description) else Description(attr)
        return super().__getattribute__(key)

    @reassignable_property
    def desc(self) -> Description:
        return Description("")

    @reassignable_property
    def prog(self) -> str:
        """Program path shown in the usage line."""
        return Meta(self.command).name

    @reassignable_property
    def usage(self) -> str:
        meta = Meta(self.command)
        parts = [f"Usage: {self.prog}"]
        if meta.subcommands:
            parts.append("<command>")
        parts.extend(
            opt.help.hint
            for name, opt in meta.options.items()
            if name != "help"
        )
        return " ".join(parts)

    @reassignable_property
    def sections(self) -> List[HelpSection]:
        meta = Meta(self.command)
        commands = "\n".join(
            HelpEntry(Meta(cmd).name, Meta(cmd).help.desc).text
            for cmd in meta.subcommands.values()
        )
        options = "\n".join(opt.help.text for opt in meta.options.values())
        return [
            HelpSection("Commands", commands),
            HelpSection("Options", options),
        ]

    @reassignable_property
    def section_separator(self) -> str:
        return "\n\n"

    @reassignable_property
    def text(self) -> str:
        blocks = [self.usage]
        if self.desc.long:
            blocks.append(self.desc.long)
        blocks.extend(sec.text for sec in self.sections if sec.active)
        return self.section_separator.join(blocks)
