"""Object model of the germlab command line."""
import typing
from collections import OrderedDict
from typing import Any, Callable, Union
from weakref import WeakKeyDictionary

from ._util import NoInit

__all__ = (
    "CliObject",
    "Option",
    "Command",
    "RootCommand",
    "Meta",
)


class CliObject:
    """Exists so all command line objects can share the same parent."""


class Option(CliObject):
    """
    A command line option.

    Parameters
    ----------
    long: str
        Long text, two hyphens followed by the option name
        (e.g. `--scenario`).
    short: str
        Optional short text, a hyphen followed by a single letter.
    argname: str
        Placeholder for the value in help messages. Defaults to the
        ``metavar`` of ``argtype`` or the upper-cased option name.
    default
        Value when the option is absent.
    argtype: type
        Converter for the option text. ``bool`` options are flags that take
        no value.
    required: bool
        Parsing fails when a required option is absent.

    Attributes
    ----------
    help: OptionHelp
        Customizable help object.
    """

    def __init__(
        self,
        long: str,
        short: str = "",
        argname: str = None,
        default=None,
        argtype: type = bool,
        desc: str = None,
        required: bool = False,
    ):
        if not long.startswith("--"):
            raise ValueError(f"long option text must start with '--': {long}")
        self.long = long
        self.short = short
        self.type = argtype
        self.default = default
        self.required = required

        # pylint: disable=import-outside-toplevel,cyclic-import
        from .help import OptionHelp

        self.help = OptionHelp(self)
        if argname is not None:
            self.help.argname = argname
        if desc is not None:
            self.help.desc = desc

    @property
    def takes_value(self) -> bool:
        return self.type is not bool

    def __repr__(self):
        return f"<Option {self.long}>"


if typing.TYPE_CHECKING:
    from .help import Description


class Command(CliObject):
    """
    A CLI command.

    Attributes of type :class:`Option` and :class:`Command` are registered
    in the command's :class:`Meta` and have special meaning to the parser;
    anything else is stored as a regular attribute.

    Examples
    --------
    >>> germlab = RootCommand("germlab")
    >>> germlab.mu_seq = Command("mu-seq", desc="Multiplicity sequence")
    >>> germlab.mu_seq.word = Option("--word", argtype=str)
    """

    def __init__(self, name: str, desc: Union[str, "Description"] = None):
        meta = Meta(self)
        meta.name = name
        self.help = Option("--help", "-h", desc="print help message and exit")
        if desc is not None:
            meta.help.desc = desc

    def __call__(self, *args, **values):
        """Run the callback with ``values`` for the options it declares."""
        meta = Meta(self)
        kwargs = {
            name: values.get(name, option.default)
            for name, option in meta.options.items()
            if name in meta.parameters
        }
        return meta.call(*args, **kwargs)

    def __setattr__(self, name, value):
        if isinstance(value, Option):
            Meta(self).options[name] = value
        elif isinstance(value, Command):
            Meta(self).subcommands[name] = value
        super().__setattr__(name, value)

    def __delattr__(self, name):
        value = super().__getattribute__(name)
        if isinstance(value, Option):
            del Meta(self).options[name]
        elif isinstance(value, Command):
            del Meta(self).subcommands[name]
        super().__delattr__(name)

    def __repr__(self):
        return f"<Command {Meta(self).name}>"


class RootCommand(Command):
    """
    Command that corresponds to the program itself.

    Options of the root command are accepted before and after the name of a
    subcommand.

    Parameters
    ----------
    version: str
        Version of the program that is printed when the `--version` option is
        given.
    """

    def __init__(self, name, desc="", version="0.0.0"):
        super().__init__(name, desc=desc)
        self.version = Option(
            "--version", desc="print program version and exit"
        )
        Meta(self).version = version


class Meta(CliObject, metaclass=NoInit):
    """
    Meta wrapper for :class:`Command` that can be used to access special
    attributes of :class:`Command`.

    Notes
    -----
    - Do not modify the ``options`` and ``subcommands`` attributes directly;
      assign options and subcommands as attributes of the command instead.
    """

    __slots__ = (
        "command",
        "options",
        "subcommands",
        "parameters",
        "name",
        "version",
        "help",
        "call",
    )

    _command_to_meta_map = WeakKeyDictionary()

    command: Command
    options: typing.OrderedDict[str, Option]
    subcommands: typing.OrderedDict[str, Command]

    def __init__(self, command: Command):
        self.command = command
        self.options = OrderedDict()
        self.subcommands = OrderedDict()
        #: Option names the callback accepts.
        self.parameters = frozenset()
        self.name = ""
        self.version = None
        self.call = _no_callback
        # pylint: disable=import-outside-toplevel,cyclic-import
        from .help import CommandHelp

        self.help = CommandHelp(command)

    def __new__(cls, command: Command):
        try:
            return cls._command_to_meta_map[command]
        except KeyError:
            meta = cls._command_to_meta_map[command] = super().__new__(cls)
            meta.__init__(command)
            return meta

    def set_callback(self, func: Callable[..., Any], parameters=()):
        """
        Set the function called when the command is invoked.

        ``parameters`` names the options passed to ``func`` as keyword
        arguments.
        """
        self.call = func
        self.parameters = frozenset(parameters)

    def subcommand(self, name: str) -> typing.Optional[Command]:
        """Subcommand whose name is ``name``."""
        for cmd in self.subcommands.values():
            if Meta(cmd).name == name:
                return cmd
        return None

    def option(self, text: str) -> typing.Optional[typing.Tuple[str, Option]]:
        """Option whose long or short text is ``text``."""
        for key, opt in self.options.items():
            if text in (opt.long, opt.short):
                return key, opt
        return None


def _no_callback(*_args, **_kwargs):
    return None
