"""Exact graph tensors, rank decompositions, leg surgery, and bound tables."""

from .rational import Rational, format_rational, parse_rational
from .exact import (
    Leg,
    RationalMatrix,
    SignatureMismatchError,
    SparseTensor,
    apply_at_leg,
    factor_permutation_matrix,
    flatten,
    group_legs,
    matrix_rank,
    pairwise_product,
    permute_legs,
    rank_factorization,
    scalar_tensor,
    tensor_product,
    zero_tensor,
)
from .graphs import (
    CutResult,
    HyperEdge,
    Hypergraph,
    SchemaError,
    cut_value,
    cycle,
    disjoint_union,
    dome,
    graph_tensor,
    load_hypergraph,
    max_cut,
    parse_graph_spec,
    path_graph,
    save_hypergraph,
    triangle,
    unit_hyperedge,
    weighted_cycle,
)
from .decomp import (
    Decomposition,
    LocalRankProfile,
    VerifyReport,
    apply_maps,
    cycle_product,
    decomp_product,
    export_decomposition,
    import_decomposition,
    local_rank_profile,
    local_rank_sum,
    reconstruct,
    reflect,
    rotate_legs,
    strassen,
    trivial_decomposition,
    verify,
)
from .surgery import (
    PatchLibrary,
    ResolvedPatch,
    SurgeryPlan,
    c5_dim4_decomposition,
    canonical_weights,
    chain_tensor,
    chain_trivial_decomposition,
    default_library,
    odd_cycle_decomposition,
    split_and_insert,
    surgery_map,
)
from .bounds import (
    BoundRecord,
    ExponentParams,
    TableRow,
    alpha_exponent_upper,
    apex_multigraph,
    best_known_table,
    c5_dim4_component_bounds,
    covering_distill_c5,
    cycle_rank_lower,
    dome_and_hypergraph_bounds,
    flattening_cross_check,
    flattening_lower,
    laser_exponent_upper,
    linked_domes,
    scaling_identity_check,
    surgery_exponent_upper,
)

__version__ = "0.1.0"
