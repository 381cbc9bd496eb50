"""
Functions for parsing the command line, i.e. converting command line
arguments into option values of a command.
"""
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .errors import OptionError
from .objects import Command, Meta, Option
from .types import convert

__all__ = ("Invocation", "parse", "parse_arg", "convert_values")


@dataclass
class Invocation:
    """
    Result of :func:`parse`: the selected subcommand (``None`` if only the
    root command was given) and converted option values of both levels.
    """

    root: Command
    root_values: Dict[str, Any]
    command: Optional[Command] = None
    values: Dict[str, Any] = field(default_factory=dict)

    @property
    def wants_help(self) -> bool:
        return bool(self.values.get("help") or self.root_values.get("help"))

    @property
    def help_text(self) -> str:
        target = self.command if self.command is not None else self.root
        return Meta(target).help.text


def _defaults(command: Command) -> Dict[str, Any]:
    return {
        name: opt.default for name, opt in Meta(command).options.items()
    }


def _convert(option: Option, text, option_str: str):
    try:
        return convert(text, option.type)
    except (ValueError, ZeroDivisionError) as e:
        raise OptionError(f"invalid value {text!r}: {e}", option_str) from e


def parse(command: Command, args: List[str] = None) -> Invocation:
    """
    Parse ``args`` against ``command`` and its subcommands.

    If unspecified, ``args`` will fall back to ``sys.argv``; the first item
    is the program name and is skipped. Options of ``command`` are accepted
    before and after the subcommand name.

    Raises
    ------
    ~germlab.errors.OptionError
        On an unknown command or option, a missing or malformed option
        value, a value given to a flag, or a missing required option.
    """
    if args is None:
        args = sys.argv
    invocation = Invocation(command, _defaults(command))
    pending: Optional[Tuple[Dict[str, Any], str, Option, str]] = None

    for arg in args[1:]:
        if pending is not None:
            values, name, option, option_str = pending
            values[name] = _convert(option, arg, option_str)
            pending = None
            continue
        if arg.startswith("-") and arg != "-":
            scopes = [(command, invocation.root_values)]
            if invocation.command is not None:
                scopes.insert(0, (invocation.command, invocation.values))
            for cmd, values in scopes:
                match = parse_arg(cmd, arg)
                if match is not None:
                    break
            else:
                raise OptionError("unrecognized option", arg.split("=")[0])
            name, option, value = match
            option_str = arg.split("=")[0]
            if not option.takes_value:
                if value is not None:
                    raise OptionError("option does not take a value", arg)
                values[name] = True
            elif value is None:
                pending = (values, name, option, option_str)
            else:
                values[name] = _convert(option, value, option_str)
        elif invocation.command is None:
            sub = Meta(command).subcommand(arg)
            if sub is None:
                raise OptionError(f"unknown command {arg!r}")
            invocation.command = sub
            invocation.values = _defaults(sub)
        else:
            raise OptionError(f"unexpected argument {arg!r}")

    if pending is not None:
        raise OptionError("option requires a value", pending[3])
    if not invocation.wants_help:
        _check_required(command, invocation.root_values)
        if invocation.command is not None:
            _check_required(invocation.command, invocation.values)
    return invocation


def parse_arg(
    command: Command, arg: str
) -> Optional[Tuple[str, Option, Optional[str]]]:
    r"""
    Match ``arg`` against the options of ``command``.

    Accepted forms are `--long`, `--long=\<value\>` and `-s`.

    Returns
    -------
    (name, option, value)
        Attribute name and option object, and the value if it was attached
        with ``=`` (``None`` otherwise). ``None`` if nothing matches.
    """
    text, sep, value = arg.partition("=")
    found = Meta(command).option(text)
    if found is None:
        return None
    name, option = found
    if sep and text == option.short:
        return None
    return name, option, value if sep else None


def convert_values(
    command: Command, flags: Mapping[str, Any]
) -> Dict[str, Any]:
    """
    Option values of ``command`` from a mapping of option names (with or
    without leading ``--``, ``-`` or ``_`` as separator) to raw values.
    """
    values = _defaults(command)
    by_long = {
        opt.long: (name, opt) for name, opt in Meta(command).options.items()
    }
    for key, raw in flags.items():
        long = "--" + key.lstrip("-").replace("_", "-")
        if long not in by_long:
            raise OptionError("unrecognized option", long)
        name, option = by_long[long]
        values[name] = _convert(option, raw, long)
    _check_required(command, values)
    return values


def _check_required(command: Command, values: Mapping[str, Any]):
    for name, opt in Meta(command).options.items():
        if opt.required and values.get(name) is None:
            raise OptionError("required option missing", opt.long)
