"""The decorator API."""

import inspect
from inspect import Parameter
from types import FunctionType

from docstring_parser import Docstring
from docstring_parser import parse as parse_docstring

from ._util import command_name, long_option
from .help import Description
from .objects import Command, Meta, Option

__all__ = ("command",)


class command:
    """
    Return a :class:`~germlab.objects.Command` created from a function.

    Meant to be used as a decorator. The command's name is the function name
    with ``_`` replaced by ``-``; its help text is the function docstring.

    A first positional parameter receives the session object the caller
    passes when invoking the command. Every keyword-only parameter becomes an
    :class:`~germlab.objects.Option`:

    - The long text is `--` followed by the parameter name, with ``_``
      replaced by `-` and a trailing ``_`` dropped (``range_`` becomes
      `--range`).
    - The annotation is the value converter; ``bool`` makes a flag. An
      :class:`~germlab.objects.Option` instance as annotation is used as is.
    - A parameter without a default is a required option.
    - The description comes from the ``Parameters`` section of the
      docstring.

    Raises
    ------
    TypeError
        If ``func`` is not a function or has parameters other than the
        session and keyword-only options.
    """

    def __init__(self, func: FunctionType):
        # pylint: disable=super-init-not-called
        # NOTE: this function exists only to satisfy static analyzers
        pass

    def __new__(cls, func: FunctionType):
        if isinstance(func, Command):
            return func
        if not inspect.isfunction(func):
            raise TypeError(f"cannot create a command from {func!r}")
        return cls.from_function(func)

    @classmethod
    def from_function(cls, func: FunctionType) -> Command:
        doc = parse_docstring(func.__doc__ or "")
        cmd = Command(command_name(func.__name__), desc=_description(doc))
        params = list(inspect.signature(func).parameters.values())
        if params and params[0].kind in (
            Parameter.POSITIONAL_ONLY,
            Parameter.POSITIONAL_OR_KEYWORD,
        ):
            params = params[1:]
        names = []
        for param in params:
            if param.kind != Parameter.KEYWORD_ONLY:
                raise TypeError(
                    f"{func.__name__}: parameter {param.name!r} must be "
                    f"keyword-only"
                )
            setattr(cmd, param.name, _option_from_parameter(param, doc))
            names.append(param.name)
        Meta(cmd).set_callback(func, names)
        return cmd


def _description(doc: Docstring) -> Description:
    brief = doc.short_description or ""
    long = brief
    if doc.long_description:
        long += "\n\n" + doc.long_description
    return Description(long, brief=brief)


def _option_from_parameter(param: Parameter, doc: Docstring) -> Option:
    if isinstance(param.annotation, Option):
        return param.annotation
    argtype = param.annotation
    if argtype is Parameter.empty:
        argtype = (
            type(param.default)
            if param.default not in (Parameter.empty, None)
            else str
        )
    required = param.default is Parameter.empty
    default = None if required else param.default
    desc = next(
        (p.description for p in doc.params if p.arg_name == param.name), ""
    )
    desc = " ".join((desc or "").split())
    if default not in (None, False) and "default" not in desc:
        desc = f"{desc} (default: {default})".lstrip()
    return Option(
        long_option(param.name),
        default=default,
        argtype=argtype,
        desc=desc,
        required=required,
    )
