"""morselab: word combinatorics and divergence measurement for RACGs/RAAGs.

A right-angled Coxeter or Artin group is specified by a finite simplicial
graph; this package builds canonical word arithmetic on top of that graph,
indexes metric balls of the Cayley graph, classifies special subgroups
(strong quasiconvexity, stability, loxodromic elements), and measures
lower relative divergence and geodesic divergence empirically.
"""

from .cayley import (
    INF,
    BallIndex,
    FinitelyGenerated,
    FreeSubgroupGeometry,
    Special,
    boundary_sphere,
    build_ball,
    complement_distance,
    complement_path,
    distance,
    greedy_special_distance,
    load_ball,
    restricted_word_distance,
    save_ball,
    subgroup_distance,
    word_distance,
)
from .classify import (
    ClassificationReport,
    classify_special_racg,
    loxodromic_report,
    morse_boundary_witness,
)
from .divergence import (
    DivergenceProfile,
    GrowthDiagnostic,
    PeriodicGeodesic,
    SigmaRow,
    WitnessPath,
    emit_profile_csv,
    geodesic_divergence,
    geodesic_divergence_ball,
    geodesic_lower_divergence,
    growth_diagnostic,
    kmt_lower,
    parse_profile_csv,
    pip1_upper,
    pip1_witness_path,
    pip2_lower,
    sigma_profile,
)
from .errors import (
    BudgetExceeded,
    InsufficientData,
    MorselabError,
    ParseError,
    PreconditionError,
    ScopeError,
    Unresolved,
    ValidationError,
)
from .graphs import (
    DefiningGraph,
    InducedCycle,
    build_c4,
    build_cycle,
    build_gamma_d,
    build_omega_d,
    build_p4,
    cone_off,
    enumerate_induced_cycles,
    family,
    graph_from_parts,
    is_join,
    is_triangle_free,
    join_extendable,
    load_graph,
)
from .words import (
    RAAG,
    RACG,
    Presentation,
    Word,
    cyclically_reduce,
    is_loxodromic,
    max_join_subword_length,
    special_subgroup_member,
)

__version__ = "0.1.0"

__all__ = [
    "BallIndex",
    "BudgetExceeded",
    "ClassificationReport",
    "DefiningGraph",
    "DivergenceProfile",
    "FinitelyGenerated",
    "FreeSubgroupGeometry",
    "GrowthDiagnostic",
    "INF",
    "InducedCycle",
    "InsufficientData",
    "MorselabError",
    "ParseError",
    "PeriodicGeodesic",
    "PreconditionError",
    "Presentation",
    "RAAG",
    "RACG",
    "ScopeError",
    "SigmaRow",
    "Special",
    "Unresolved",
    "ValidationError",
    "WitnessPath",
    "Word",
    "boundary_sphere",
    "build_ball",
    "build_c4",
    "build_cycle",
    "build_gamma_d",
    "build_omega_d",
    "build_p4",
    "classify_special_racg",
    "complement_distance",
    "complement_path",
    "cone_off",
    "cyclically_reduce",
    "distance",
    "emit_profile_csv",
    "enumerate_induced_cycles",
    "family",
    "geodesic_divergence",
    "geodesic_divergence_ball",
    "geodesic_lower_divergence",
    "graph_from_parts",
    "greedy_special_distance",
    "growth_diagnostic",
    "is_join",
    "is_loxodromic",
    "is_triangle_free",
    "join_extendable",
    "kmt_lower",
    "load_ball",
    "load_graph",
    "loxodromic_report",
    "max_join_subword_length",
    "morse_boundary_witness",
    "parse_profile_csv",
    "pip1_upper",
    "pip1_witness_path",
    "pip2_lower",
    "restricted_word_distance",
    "save_ball",
    "sigma_profile",
    "special_subgroup_member",
    "subgroup_distance",
    "word_distance",
]
