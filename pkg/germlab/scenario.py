"""
Scenario documents: the variables, generators and varieties a command
works on.

A scenario is a JSON object::

    {
      "dimension": 2,
      "variables": ["x", "y"],
      "cap": 40,
      "maps": {"F": ["x", "y^2"]},
      "fields": {"v": ["y", "0"]},
      "varieties": {"X": ["y - x"], "Y": ["y"]},
      "queries": {"doubling": {"command": "mu-seq", "word": "F^n",
                               "range": "0..4", "pull": "Y",
                               "against": "X"}}
    }

Polynomials follow the grammar of :func:`~germlab.ring.parse_polynomial`;
rationals are written ``p/q`` inside the strings.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple
from typing import Union

from .errors import (
    ConstantTermError,
    InputError,
    ScenarioError,
    UnknownGeneratorError,
)
from .germs import FormalMap, FormalVectorField, Germ
from .multiplicity import IdealPresentation
from .ring import Jet, default_variables, parse_terms

__all__ = ("Scenario", "parse_scenario")

logger = logging.getLogger(__name__)

_KEYS = (
    "dimension",
    "variables",
    "cap",
    "maps",
    "fields",
    "varieties",
    "queries",
)
_SINGULAR = {"maps": "map", "fields": "field", "varieties": "variety"}
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass
class Scenario:
    """
    Validated scenario.

    All generators and variety equations are jets of the common order
    :attr:`order`, the highest degree occurring in the document.
    Operations re-truncate them to the order they work at.
    """

    variables: Tuple[str, ...]
    maps: Dict[str, FormalMap] = field(default_factory=dict)
    fields: Dict[str, FormalVectorField] = field(default_factory=dict)
    varieties: Dict[str, IdealPresentation] = field(default_factory=dict)
    cap: Optional[int] = None
    queries: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    source: Optional[str] = None

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def order(self) -> int:
        germs = list(self.generators.values())
        if germs:
            return germs[0].order
        return max(
            (g.order for v in self.varieties.values() for g in v.generators),
            default=1,
        )

    @property
    def generators(self) -> Dict[str, Germ]:
        """Maps followed by fields, in document order."""
        return {**self.maps, **self.fields}

    def generators_at(
        self, order: int, names: Sequence[str] = None
    ) -> Dict[str, Germ]:
        """Generators (all, or those in ``names``) truncated to ``order``."""
        if names is None:
            names = list(self.generators)
        out = {}
        for name in names:
            germ = self.generators.get(name)
            if germ is None:
                raise UnknownGeneratorError(name)
            out[name] = germ.with_order(order)
        return out

    def variety(self, name: str) -> IdealPresentation:
        try:
            return self.varieties[name]
        except KeyError:
            raise UnknownGeneratorError(name, "variety") from None

    def ideal(self, names: Sequence[str]) -> IdealPresentation:
        """Ideal generated jointly by the named varieties."""
        return IdealPresentation.join([self.variety(n) for n in names])


class _Reader:
    """Builds a :class:`Scenario` from decoded JSON, one section at a
    time."""

    def __init__(self, document: Mapping[str, Any]):
        self.document = document
        self.names: Dict[str, str] = {}

    def read(self) -> Scenario:
        doc = self.document
        if not isinstance(doc, dict):
            raise ScenarioError("top level must be a JSON object")
        unknown = [key for key in doc if key not in _KEYS]
        if unknown:
            raise ScenarioError(f"unknown key {unknown[0]!r}")
        variables = self._variables()
        cap = doc.get("cap")
        if cap is not None and (
            isinstance(cap, bool) or not isinstance(cap, int) or cap < 1
        ):
            raise ScenarioError("must be a positive integer", "cap")

        raw = {
            "maps": self._section("maps", len(variables)),
            "fields": self._section("fields", len(variables)),
            "varieties": self._section("varieties", None),
        }
        terms = {
            kind: {
                name: [
                    self._terms(text, variables, kind, name, i)
                    for i, text in enumerate(polys)
                ]
                for name, polys in section.items()
            }
            for kind, section in raw.items()
        }
        order = max(
            (
                alpha.degree
                for section in terms.values()
                for polys in section.values()
                for poly in polys
                for alpha in poly
            ),
            default=1,
        )
        order = max(order, 1)
        d = len(variables)

        def jets(polys):
            return [Jet(d, order, poly) for poly in polys]

        maps = {
            name: self._germ(FormalMap, name, jets(polys))
            for name, polys in terms["maps"].items()
        }
        fields = {
            name: self._germ(FormalVectorField, name, jets(polys))
            for name, polys in terms["fields"].items()
        }
        varieties = {
            name: IdealPresentation(tuple(jets(polys)), name)
            for name, polys in terms["varieties"].items()
        }
        scenario = Scenario(
            tuple(variables),
            maps,
            fields,
            varieties,
            cap,
            self._queries(),
        )
        logger.debug(
            "scenario: d=%d, order %d, %d maps, %d fields, %d varieties",
            d,
            order,
            len(maps),
            len(fields),
            len(varieties),
        )
        return scenario

    def _variables(self) -> List[str]:
        doc = self.document
        dimension = doc.get("dimension")
        variables = doc.get("variables")
        if dimension is not None and (
            isinstance(dimension, bool)
            or not isinstance(dimension, int)
            or dimension < 1
        ):
            raise ScenarioError("must be a positive integer", "dimension")
        if variables is None:
            if dimension is None:
                raise ScenarioError("'dimension' or 'variables' is required")
            return default_variables(dimension)
        if not isinstance(variables, list) or not variables:
            raise ScenarioError("must be a nonempty list", "variables")
        for name in variables:
            if not isinstance(name, str) or not _NAME_RE.fullmatch(name):
                raise ScenarioError(f"invalid name {name!r}", "variables")
        if len(set(variables)) != len(variables):
            raise ScenarioError("names are not unique", "variables")
        if dimension is not None and dimension != len(variables):
            raise ScenarioError(
                f"{len(variables)} variables for dimension {dimension}",
                "variables",
            )
        return list(variables)

    def _section(self, kind: str, length: Optional[int]):
        section = self.document.get(kind, {})
        if not isinstance(section, dict):
            raise ScenarioError("must be an object", kind)
        for name, polys in section.items():
            entity = f"{_SINGULAR[kind]} {name}"
            if not _NAME_RE.fullmatch(name):
                raise ScenarioError("invalid name", entity)
            if name in self.names:
                raise ScenarioError(
                    f"name already used by {self.names[name]}", entity
                )
            self.names[name] = entity
            if not isinstance(polys, list) or not polys:
                raise ScenarioError("must be a nonempty list", entity)
            if not all(isinstance(p, str) for p in polys):
                raise ScenarioError("polynomials must be strings", entity)
            if length is not None and len(polys) != length:
                raise ScenarioError(
                    f"has {len(polys)} components, expected {length}", entity
                )
        return section

    @staticmethod
    def _terms(text: str, variables, kind: str, name: str, index: int):
        try:
            return parse_terms(text, variables)
        except InputError as e:
            part = "equation" if kind == "varieties" else "component"
            raise ScenarioError(
                str(e), f"{_SINGULAR[kind]} {name} {part} {index + 1}"
            ) from e

    @staticmethod
    def _germ(cls, name: str, components):
        try:
            return cls(components, name)
        except ConstantTermError as e:
            raise ScenarioError(
                f"component {e.component} has constant term",
                f"{cls._kind} {name}",
            ) from e

    def _queries(self) -> Dict[str, Dict[str, Any]]:
        queries = self.document.get("queries", {})
        if not isinstance(queries, dict):
            raise ScenarioError("must be an object", "queries")
        for name, query in queries.items():
            entity = f"query {name}"
            if not isinstance(query, dict):
                raise ScenarioError("must be an object", entity)
            if not isinstance(query.get("command"), str):
                raise ScenarioError("needs a 'command' string", entity)
            for key, value in query.items():
                if isinstance(value, (dict, list)) and key != "against":
                    raise ScenarioError(
                        f"value of {key!r} must be a string or number", entity
                    )
        return dict(queries)


def _reject_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    out = {}
    for key, value in pairs:
        if key in out:
            raise ScenarioError(f"duplicate key {key!r}")
        out[key] = value
    return out


def parse_scenario(source: Union[str, Path]) -> Scenario:
    """
    Read and validate a scenario.

    Parameters
    ----------
    source
        JSON text (anything starting with ``{``) or a path to a JSON file.

    Raises
    ------
    ~germlab.errors.ScenarioError
        If the document cannot be read, is not valid JSON (the message
        gives line and column), or fails validation. The message names the
        offending entity, e.g. ``map F: component 1 has constant term``.
    """
    path = None
    if isinstance(source, Path) or not source.lstrip().startswith("{"):
        path = str(source)
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as e:
            raise ScenarioError(
                f"cannot read scenario: {e.strerror}", path
            ) from e
    else:
        text = source
    try:
        document = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise ScenarioError(
            f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}",
            path,
        ) from e
    scenario = _Reader(document).read()
    scenario.source = path
    return scenario
