"""Causal compatibility of discrete distributions with latent-variable DAGs,
decided with possible-worlds diagrams."""
from .cnf import CnfDocument, CnfResult, export_cnf, parse_dimacs, solve_cnf
from .errors import *  # noqa: F401,F403
from .graph import DirectedGraph, build_graph
from .hierarchy import (
    HierarchyResult,
    UniformSet,
    enumerate_uniform,
    latent_bounds,
    min_distance_to_uniform,
    order_k_test,
)
from .possibilistic import Certificate, Verdict, decide_support, verify_certificate
from .prob import (
    Distribution,
    EpsilonBound,
    Support,
    condition,
    distance,
    epsilon_bound,
    format_fraction,
    inverse_sample_map,
    marginalize,
    mixture,
    parse_probability,
    point_mass,
    product_distribution,
    rational_approximation,
    support,
)
from .structure import (
    CardinalityBound,
    CausalStructure,
    cardinality_bound,
    cover_visibles,
    district,
    exogenize,
    facets,
    is_exo_simplicial,
    lpa,
    normalization_changes,
    normalize,
    simplicial_reduce,
    vpa,
)
from .worlds import (
    FunctionTable,
    LatentSpec,
    PossibleWorldsDiagram,
    WorldEvaluation,
    apply_latent_permutation,
    canonical_form,
    evaluate_world,
    reachable_keys,
    simulate,
)

__version__ = "0.1.0"
