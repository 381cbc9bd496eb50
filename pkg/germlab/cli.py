"""
The ``germlab`` command line program.

Every command reads a scenario (``--scenario``), computes exactly and
writes one report to standard output, as CSV (default) or JSON::

    {"command": "mu-seq", "cap": 40,
     "results": [{"key": 0, "mu": 1, "certificate_order": 2}, ...],
     "notes": ["max finite: 16"]}

``mu`` is an integer or ``">=CAP"`` when no certificate was found up to the
cap. Display commands (``commute``, ``bracket``, ``flow``, ``qp``,
``exceptional``) put their formatted content in ``notes``.

Exit codes: 0 on success, 1 when a mathematical precondition fails, 2 on
bad input. Errors go to standard error as ``germlab <command>: error:
<message>``.
"""
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence
from typing import Tuple, Union

from ._meta import __version__
from .context import Context, context
from .decorators import command
from .errors import (
    GermLabError,
    InputError,
    MathematicalError,
    OptionError,
    ScenarioError,
    UnknownGeneratorError,
)
from .germs import (
    FlowLetter,
    FormalMap,
    FormalVectorField,
    check_commutative,
    flow_map,
    format_germ,
    instantiate_template,
    lie_bracket,
    parse_word,
    word_to_map,
)
from .multiplicity import (
    ExtendedNat,
    codim as codim_of,
    mu_of_word,
    mu_sequence,
    word_fixed_point_multiplicity,
)
from .objects import Command, Meta, Option, RootCommand
from .parser import convert_values, parse
from .quasipoly import (
    certify_boundedness,
    exceptional_conditions,
    generic_multiplicity,
    group_orbit,
    orbit,
    require_commuting,
    spectrum_of_group,
)
from .ring import Jet, format_jet
from .scenario import Scenario, parse_scenario
from .types import IntRange, NameList, OutputFormat, Rational

__all__ = ("Report", "Outcome", "run_command", "main")

logger = logging.getLogger(__name__)

Key = Union[int, str]


@dataclass
class Report:
    """
    Result document of one command.

    Attributes
    ----------
    results: list
        ``(key, mu)`` rows. An entry that failed has no row; its error is
        a note ``<key_name>=<key>: <message>``.
    exit_code: int
        1 if some entry failed on a mathematical precondition.
    """

    command: str
    cap: int
    key_name: str = "key"
    results: List[Tuple[Key, ExtendedNat]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    exit_code: int = 0

    def add(self, key: Key, mu: ExtendedNat):
        self.results.append((key, mu))

    def fail(self, key: Key, error: Exception):
        self.notes.append(f"{self.key_name}={key}: {error}")
        self.exit_code = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "cap": self.cap,
            "results": [
                {
                    "key": key,
                    "mu": mu.render(),
                    "certificate_order": mu.certificate_order,
                }
                for key, mu in self.results
            ],
            "notes": list(self.notes),
        }

    def render(self, fmt: str = "csv") -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2) + "\n"
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([self.key_name, "mu", "certificate_order"])
        for row in self.to_dict()["results"]:
            writer.writerow(
                [
                    row["key"],
                    row["mu"],
                    "" if row["certificate_order"] is None
                    else row["certificate_order"],
                ]
            )
        for note in self.notes:
            for line in note.splitlines():
                out.write(f"# {line}\n")
        return out.getvalue()


class Outcome(NamedTuple):
    """Exit code, the document for standard output and error messages."""

    exit_code: int
    document: str
    errors: Tuple[str, ...] = ()


@dataclass
class _Batch:
    """Outcomes of the ``queries`` command, in scenario order."""

    outcomes: List[Tuple[str, Outcome]]

    @property
    def exit_code(self) -> int:
        return max((o.exit_code for _, o in self.outcomes), default=0)

    def render(self, fmt: str = "csv") -> str:
        return "".join(o.document for _, o in self.outcomes)


@dataclass
class Session:
    """What a command callback needs besides its own options."""

    scenario: Scenario
    command: str
    cap: int
    fmt: str = "csv"
    workers: Optional[int] = None

    def report(self, key_name: str = "key") -> Report:
        return Report(self.command, self.cap, key_name)

    def fixed(self, against: Optional[Sequence[str]]):
        return [self.scenario.variety(name) for name in against or ()]

    def check_word(self, text: str):
        """Reject words naming no generator of the scenario before any
        computation starts."""
        for letter in parse_word(text).letters:
            germ = self.scenario.generators.get(letter.name)
            wanted = (
                FormalVectorField
                if isinstance(letter, FlowLetter)
                else FormalMap
            )
            if not isinstance(germ, wanted):
                kind = "map" if wanted is FormalMap else "vector field"
                raise UnknownGeneratorError(letter.name, kind)


def _display_order(order: Optional[int]) -> int:
    order = context.display_order if order is None else order
    if order < 1:
        raise OptionError("must be positive", "--order")
    return order


@command
def codim(session: Session, *, ideal: NameList):
    """
    Codimension of the ideal generated by one or more varieties.

    Parameters
    ----------
    ideal
        Varieties whose equations generate the ideal, joined by ``+``.
    """
    report = session.report()
    value = codim_of(session.scenario.ideal(ideal), session.cap)
    report.add("+".join(ideal), value)
    return report


@command
def mu(
    session: Session, *, word: str, pull: str, against: NameList = None
):
    """
    Multiplicity of a variety pulled back by a group word.

    Parameters
    ----------
    word
        Group word, e.g. ``F^3*exp(1/2 v)``.
    pull
        Variety pulled back by the word.
    against
        Fixed varieties, separated by commas.
    """
    session.check_word(word)
    report = session.report()
    value = mu_of_word(
        word,
        session.scenario.generators,
        session.scenario.variety(pull),
        session.fixed(against),
        session.cap,
    )
    report.add(word, value)
    return report


@command
def mu_seq(
    session: Session,
    *,
    word: str,
    range_: IntRange,
    pull: str,
    against: NameList = None,
):
    """
    Multiplicities of a word template over a range of ``n``.

    Entries that fail (e.g. a negative power of a non-invertible map) are
    reported with an empty value and a note; the others are still computed.

    Parameters
    ----------
    word
        Word template with the integer slot ``n``, e.g. ``F^n``.
    range_
        Inclusive range of ``n``, e.g. ``0..4``.
    pull
        Variety pulled back by the word.
    against
        Fixed varieties, separated by commas.
    """
    session.check_word(instantiate_template(word, range_[0]))
    report = session.report("n")
    sequence = mu_sequence(
        word,
        range_,
        session.scenario.generators,
        session.scenario.variety(pull),
        session.fixed(against),
        session.cap,
        session.workers,
    )
    for entry in sequence.entries:
        if entry.error is not None:
            report.fail(entry.n, entry.error)
        else:
            report.add(entry.n, entry.mu)
    if sequence.max_finite is not None:
        report.notes.append(f"max finite: {sequence.max_finite}")
    if sequence.presumed_infinite:
        report.notes.append(
            "presumed infinite at n = "
            + ", ".join(str(n) for n in sequence.presumed_infinite)
        )
    return report


@command
def fixed_points(session: Session, *, word: str, range_: IntRange = None):
    """
    Multiplicity of the origin as a fixed point of a group word.

    Parameters
    ----------
    word
        Group word, or a template with the slot ``n`` when ``--range`` is
        given.
    range_
        Inclusive range of ``n``.
    """
    if range_ is None:
        session.check_word(word)
        report = session.report()
        report.add(
            word,
            word_fixed_point_multiplicity(
                word, session.scenario.generators, session.cap
            ),
        )
        return report
    session.check_word(instantiate_template(word, range_[0]))
    report = session.report("n")
    for n in range_:
        try:
            value = word_fixed_point_multiplicity(
                instantiate_template(word, n),
                session.scenario.generators,
                session.cap,
            )
        except MathematicalError as e:
            report.fail(n, e)
        else:
            report.add(n, value)
    return report


@command
def commute(session: Session, *, order: int = None):
    """
    Check the commutation conditions of all generators.

    Maps must commute, fields must have vanishing brackets and every field
    must be invariant under every map, all up to the truncation order.

    Parameters
    ----------
    order
        Truncation order of the check.
    """
    m = _display_order(order)
    generators = session.scenario.generators_at(m)
    certificate = check_commutative(
        [g for g in generators.values() if isinstance(g, FormalMap)],
        [g for g in generators.values() if isinstance(g, FormalVectorField)],
    )
    report = session.report()
    report.notes.append(f"order: {m}")
    report.notes.extend(
        f"{check.label}: {'pass' if check.passed else 'fail'}"
        for check in certificate.checks
    )
    report.notes.append(
        f"verdict: {'pass' if certificate.passed else 'fail'}"
    )
    return report


@command
def bracket(session: Session, *, order: int = None):
    """
    Lie brackets of all pairs of vector fields.

    Parameters
    ----------
    order
        Truncation order of the displayed jets.
    """
    m = _display_order(order)
    fields = {
        name: germ
        for name, germ in session.scenario.generators_at(m).items()
        if isinstance(germ, FormalVectorField)
    }
    if len(fields) < 2:
        raise ScenarioError("bracket needs at least two fields", "fields")
    names = list(fields)
    variables = session.scenario.variables
    report = session.report()
    for i, left in enumerate(names):
        for right in names[i + 1:]:
            value = lie_bracket(fields[left], fields[right])
            report.notes.append(
                f"[{left},{right}] = {format_germ(value, variables)}"
            )
    return report


@command
def flow(
    session: Session,
    *,
    time: Rational = None,
    word: str = None,
    order: int = None,
):
    """
    Flows of the vector fields, or the map of a group word.

    Parameters
    ----------
    time
        Exact flow time ``p/q``; symbolic ``t`` when absent.
    word
        Display the map this group word evaluates to instead.
    order
        Truncation order of the displayed jets.
    """
    m = _display_order(order)
    scenario = session.scenario
    variables = scenario.variables
    report = session.report()
    if word is not None:
        session.check_word(word)
        value = word_to_map(word, scenario.generators, order=m)
        report.notes.append(f"{word} = {format_germ(value, variables)}")
        return report
    fields = {
        name: germ
        for name, germ in scenario.generators_at(m).items()
        if isinstance(germ, FormalVectorField)
    }
    if not fields:
        raise ScenarioError("flow needs a field or --word", "fields")
    when = "t" if time is None else time
    for name, v in fields.items():
        value = flow_map(v, when)
        report.notes.append(f"{value.name} = {format_germ(value, variables)}")
    return report


@command
def qp(session: Session, *, pull: str = None, order: int = None):
    """
    Quasipolynomial orbit coefficients.

    Without ``--pull``, the orbits of the coordinate functions under each
    generator; with it, the orbits of the variety's equations under the
    commutative group of all generators.

    Parameters
    ----------
    pull
        Variety whose equations are dragged by the group.
    order
        Truncation order of the displayed jets.
    """
    m = _display_order(order)
    scenario = session.scenario
    variables = scenario.variables
    generators = scenario.generators_at(m)
    if not generators:
        raise ScenarioError("qp needs at least one map or field")
    report = session.report()
    if pull is None:
        for name, germ in generators.items():
            for i, var in enumerate(variables):
                jet = orbit(germ, Jet.variable(len(variables), m, i))
                report.notes.append(
                    f"{name}: {var} -> {format_jet(jet, variables)}"
                )
    else:
        variety = scenario.variety(pull)
        require_commuting(generators, "qp")
        for i, gen in enumerate(variety.truncated(m)):
            jet = group_orbit(generators, gen, m)
            report.notes.append(
                f"{pull}[{i + 1}] -> {format_jet(jet, variables)}"
            )
    report.notes.append(f"spectrum: {spectrum_of_group(generators)}")
    return report


@command
def generic_mu(
    session: Session,
    *,
    pull: str,
    against: NameList = None,
    range_: IntRange = None,
):
    """
    Generic multiplicity over the commutative group of all generators.

    With ``--range``, the generic value is compared with pointwise values
    at every integer time of the range (per generator).

    Parameters
    ----------
    pull
        Variety dragged by the group.
    against
        Fixed varieties, separated by commas.
    range_
        Inclusive range of sampled integer times.
    """
    scenario = session.scenario
    generators = scenario.generators
    pulled = scenario.variety(pull)
    fixed = session.fixed(against)
    report = session.report()
    if range_ is None:
        generic = generic_multiplicity(generators, pulled, fixed, session.cap)
        report.add("generic", generic.value)
    else:
        if not generators:
            raise ScenarioError("--range needs at least one map or field")
        certificate = certify_boundedness(
            generators,
            pulled,
            fixed,
            session.cap,
            (range_[0], range_[-1]),
        )
        generic = certificate.generic
        report.add("generic", generic.value)
        for sample in certificate.samples:
            key = ",".join(f"{name}={value}" for name, value in sample.point)
            report.add(key, sample.mu)
        report.notes.append(
            f"consistent: {'yes' if certificate.consistent else 'no'}"
        )
        if certificate.max_finite is not None:
            report.notes.append(f"max finite: {certificate.max_finite}")
        for point in certificate.exceptional_points:
            report.notes.append(
                "exceptional sample: "
                + ",".join(f"{name}={value}" for name, value in point)
            )
    report.notes.append(
        "time variables: " + ", ".join(v.name for v in generic.variables)
    )
    return report


@command
def exceptional(
    session: Session,
    *,
    pull: str,
    against: NameList = None,
    order: int = None,
    threshold: int = None,
):
    """
    Conditions on the group times under which the multiplicity jumps.

    Parameters
    ----------
    pull
        Variety dragged by the group.
    against
        Fixed varieties, separated by commas.
    order
        Truncation order of the conditions.
    threshold
        List the conditions for a truncated codimension of at least this
        value instead.
    """
    m = _display_order(order)
    scenario = session.scenario
    conditions = exceptional_conditions(
        scenario.generators_at(m),
        scenario.variety(pull),
        session.fixed(against),
        m,
        threshold,
    )
    report = session.report()
    report.notes.append(f"order: {m}")
    if not conditions:
        report.notes.append("no condition")
    report.notes.extend(f"condition: {q}" for q in conditions)
    return report


@command
def queries(session: Session):
    """Run every query stored in the scenario, in order."""
    batch = _Batch([])
    for name, query in session.scenario.queries.items():
        flags = {k: v for k, v in query.items() if k != "command"}
        if isinstance(flags.get("against"), list):
            flags["against"] = ",".join(flags["against"])
        if query["command"] == "queries":
            outcome = Outcome(
                2, "", (f"germlab queries: error: query {name}: recursion",)
            )
        else:
            flags.setdefault("cap", session.cap)
            flags.setdefault("format", session.fmt)
            if session.workers is not None:
                flags.setdefault("workers", session.workers)
            outcome = run_command(session.scenario, query["command"], flags)
        batch.outcomes.append((name, outcome))
    return batch


def build_cli() -> RootCommand:
    """The ``germlab`` root command with all subcommands."""
    root = RootCommand(
        "germlab",
        desc="Exact multiplicities of germs dragged by formal group actions.",
        version=__version__,
    )
    root.scenario = Option(
        "--scenario", argname="PATH", argtype=str, desc="scenario JSON file"
    )
    root.cap = Option(
        "--cap", argname="N", argtype=int, desc="highest truncation order"
    )
    root.format_ = Option(
        "--format",
        argtype=OutputFormat,
        default="csv",
        desc="output format (default: csv)",
    )
    root.workers = Option(
        "--workers",
        argname="N",
        argtype=int,
        desc="threads for mu-seq entries",
    )
    root.verbose = Option("--verbose", "-v", desc="log progress to stderr")
    for cmd in (
        codim,
        mu,
        mu_seq,
        fixed_points,
        commute,
        bracket,
        flow,
        qp,
        generic_mu,
        exceptional,
        queries,
    ):
        name = Meta(cmd).name
        setattr(root, name.replace("-", "_"), cmd)
        Meta(cmd).help.prog = f"germlab {name}"
    return root


germlab = build_cli()


def _execute(
    scenario: Scenario,
    cmd: Command,
    values: Mapping[str, Any],
    root_values: Mapping[str, Any],
) -> Outcome:
    name = Meta(cmd).name
    try:
        cap = root_values.get("cap")
        if cap is None:
            cap = scenario.cap or context.cap
        workers = root_values.get("workers")
        if cap < 1:
            raise OptionError("must be positive", "--cap")
        if workers is not None and workers < 1:
            raise OptionError("must be positive", "--workers")
        fmt = root_values.get("format_") or "csv"
        session = Session(scenario, name, cap, fmt, workers)
        with Context(cap=cap, workers=workers):
            result = cmd(session, **values)
    except InputError as e:
        return Outcome(2, "", (f"germlab {name}: error: {e}",))
    except MathematicalError as e:
        return Outcome(1, "", (f"germlab {name}: error: {e}",))
    errors: Tuple[str, ...] = ()
    if isinstance(result, _Batch):
        errors = tuple(err for _, o in result.outcomes for err in o.errors)
    elif result.exit_code:
        errors = tuple(
            f"germlab {name}: error: {note}"
            for note in result.notes
            if note.startswith("n=")
        )
    return Outcome(result.exit_code, result.render(fmt), errors)


def run_command(
    scenario: Scenario, command_name: str, flags: Mapping[str, Any] = None
) -> Outcome:
    """
    Run one command on a parsed scenario.

    Parameters
    ----------
    scenario
        Validated scenario.
    command_name
        One of the subcommand names, e.g. ``mu-seq``.
    flags
        Option values by option name (``"range"`` or ``"--range"``), either
        as command line text or already typed.

    Returns
    -------
    Outcome
        Exit code 0 on success, 1 on a mathematical precondition failure and
        2 on an input error, the document and any error messages.
    """
    cmd = Meta(germlab).subcommand(command_name)
    if cmd is None:
        return Outcome(
            2, "", (f"germlab: error: unknown command {command_name!r}",)
        )
    root_longs = {opt.long for opt in Meta(germlab).options.values()}
    root_flags, own_flags = {}, {}
    for key, value in (flags or {}).items():
        long = "--" + key.lstrip("-").replace("_", "-")
        (root_flags if long in root_longs else own_flags)[key] = value
    try:
        root_values = convert_values(germlab, root_flags)
        values = convert_values(cmd, own_flags)
    except OptionError as e:
        return Outcome(2, "", (f"germlab {command_name}: error: {e}",))
    values.pop("help", None)
    return _execute(scenario, cmd, values, root_values)


def _configure_logging(verbose: bool):
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )


def main(args: List[str] = None) -> int:
    """
    Entry point of the ``germlab`` program.

    ``args`` defaults to ``sys.argv``; its first item is the program name.
    Returns the exit code.
    """
    try:
        invocation = parse(germlab, args)
    except OptionError as e:
        print(f"germlab: error: {e}", file=sys.stderr)
        return 2
    root_values = invocation.root_values
    if invocation.wants_help:
        print(invocation.help_text)
        return 0
    if root_values.get("version"):
        print(f"germlab version {__version__}")
        return 0
    if invocation.command is None:
        print(invocation.help_text, file=sys.stderr)
        return 2
    name = Meta(invocation.command).name
    _configure_logging(root_values.get("verbose"))
    path = root_values.get("scenario")
    try:
        if path is None:
            raise OptionError("required option missing", "--scenario")
        scenario = parse_scenario(
            sys.stdin.read() if path == "-" else path
        )
    except GermLabError as e:
        print(f"germlab {name}: error: {e}", file=sys.stderr)
        return 2
    values = dict(invocation.values)
    values.pop("help", None)
    outcome = _execute(scenario, invocation.command, values, root_values)
    sys.stdout.write(outcome.document)
    for message in outcome.errors:
        print(message, file=sys.stderr)
    return outcome.exit_code
