# pylint: disable=missing-module-docstring

from ._meta import __version__
from .context import Context, context
from .germs import (
    FormalMap,
    FormalVectorField,
    check_commutative,
    commutator,
    compose_maps,
    flow_map,
    invert_map,
    lie_bracket,
    map_power,
    parse_word,
    pullback,
    word_to_map,
)
from .multiplicity import (
    AtLeast,
    Finite,
    IdealPresentation,
    codim,
    fixed_point_multiplicity,
    intersection_multiplicity,
    mu_of_word,
    mu_sequence,
)
from .quasipoly import (
    Quasipolynomial,
    certify_boundedness,
    exceptional_conditions,
    generic_multiplicity,
    orbit,
    parse_quasipolynomial,
)
from .ring import Jet, parse_polynomial
from .scenario import Scenario, parse_scenario
