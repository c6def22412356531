"""Finite T0-spaces, maps between their open-set lattices, and the checks on them."""

from .dini import (
    ScalarFunction,
    dini_report,
    is_dini,
    is_dini_space,
    is_lsc,
    lsc_chain,
    nonclosure_counterexamples,
    pointwise_max,
    product,
)
from .equivariant import (
    FaceFamily,
    OpennessReport,
    PositiveMatrixMap,
    check_II_via_openness,
    faces_from_psi,
    separating_witness,
)
from .errors import (
    ConsistencyError,
    ContractViolation,
    FrametopError,
    InputError,
    ParseError,
    ResourceError,
    TheoremViolation,
)
from .frames import (
    FrameMap,
    PropertyReport,
    Sublattice,
    TableMap,
    check_properties,
    compose,
    identity_map,
    pseudo_left_inverse,
    quotient_space,
    retraction,
    sublattice_closure,
)
from .pointmaps import (
    PointMap,
    PseudoGraph,
    homeomorphism_from_isomorphism,
    induce_pi,
    induce_psi,
    is_pseudo_epi,
    is_pseudo_open,
    pseudo_graph,
)
from .poset import (
    FinitePoset,
    OpenSet,
    antichain,
    chain,
    closure,
    find_isomorphism,
    generic_point,
    interior,
    is_homeomorphic,
    is_prime_closed,
    is_sober,
    open_sets,
    point_space,
    prime_closed_sets,
    sierpinski,
)
from .synthesis import (
    RegularityReport,
    SpectrumResult,
    crossed_product_ideals,
    regularity_check,
    spectrum,
)
from .textfmt import Document, parse_files, parse_text

__version__ = "0.1.0"
