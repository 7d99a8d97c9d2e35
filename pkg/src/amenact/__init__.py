"""Finite-scale amenable, transitive, faithful actions of amalgamated free
products, certified with exact arithmetic."""

from .groups import (
    DirectProductGroup,
    Element,
    FiniteSubgroup,
    FiniteTableGroup,
    FreeAbelianGroup,
    GroupError,
    GroupSpec,
    Homomorphism,
    SubgroupIso,
    Sublattice,
    apply_hom,
    coset_rep,
    enumerate_elements,
    identity_hom,
    inverse,
    multiply,
    power,
    trivial_subgroup,
)
from .amalgam import (
    AmalgamError,
    AmalgamSpec,
    AmalgamWord,
    DoubleSpec,
    amalgam_inverse,
    amalgam_multiply,
    enumerate_words,
    make_double,
    psi,
    reduce_word,
    word_from_text,
    word_to_text,
)
from .actions import (
    ABlockSpace,
    ActionError,
    ActionSpec,
    ConstructionWitness,
    CopiesSpace,
    CosetSpace,
    DisjointUnionSpace,
    RegularSpace,
    build_aprime_witness,
    coset_action,
    copies_action,
    disjoint_union_action,
    is_free,
    is_transitive,
    make_witness,
    orbit,
    regular_action,
    regular_space,
    supp_points,
)
from .folner import (
    FolnerError,
    FolnerReport,
    FolnerSet,
    cayley_ball,
    disjointify,
    edge_boundary,
    is_folner,
    match_cardinalities,
    match_for_actions,
    matched_pair_stream,
    prescribed_size_folner,
    ratio,
)
from .generic import (
    AmalgamSystem,
    Certificate,
    GenericError,
    PartialPermutation,
    build_generic,
    certificate_from_text,
    certificate_to_text,
    evaluate_word,
    extend_avoid_word,
    extend_cover,
    extend_match_folner,
    sigma_from_text,
    sigma_to_text,
    verify_certificate,
)
from .bass_serre import (
    BassSerreError,
    CircuitWitness,
    QuotientGraph,
    check_hypotheses,
    export_graph_text,
    quotient_graph,
    witness_circuit,
)

__version__ = "0.1.0"
