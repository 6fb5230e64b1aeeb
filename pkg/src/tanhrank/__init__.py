"""tanhrank: exact lossless compression, rank, and proximate-rank analysis
for one-hidden-layer hyperbolic-tangent networks, with uniform point-cover
solvers and executable hardness reductions."""

from .params import (
    BiaslessParameter,
    BiaslessUnit,
    ConstantTerm,
    FormatError,
    LimitError,
    Parameter,
    SymmetryTransform,
    Unit,
    apply_transform,
    evaluate,
    evaluate_biasless,
    insert_zero_incoming,
    insert_zero_outgoing,
    make_biasless,
    make_parameter,
    negative_split_unit,
    parameter_distance,
    parameter_from_json,
    parameter_to_json,
    rat,
    scalar_from_flat,
    split_unit,
    uniform_distance,
    uniform_norm,
)
from .compress import (
    CompressedParameter,
    ReducibilityReport,
    canonical_form,
    compress,
    compress_biasless,
    equivalent,
    evaluate_compressed,
    rank,
    rank_biasless,
    reducibility,
    to_parameter_inexact,
)
from .proximate import (
    GreedyResult,
    ParCertificate,
    approx_partition,
    construct_witness,
    derive_par_certificate,
    exact_prank,
    exact_prank_biasless,
    greedy_bound,
    verify_par_certificate,
    verify_upar_certificate,
)
from .cover import (
    CoverInstance,
    PointSet,
    UnitSquareGraph,
    build_graph,
    clique_partition_exact,
    cover_to_partition,
    greedy_upp,
    make_points,
    partition_to_cover,
    solve_scalar_cover,
    solve_upp_exact,
    verify_cover,
    verify_partition,
)
from .gadgets import Gadget, GadgetReport, check_gadget, library_gadgets
from .reductions import (
    GridLayout,
    RestrictedFormula,
    SsumInstance,
    SszInstance,
    assignment_to_partition,
    brute_cover,
    brute_sat,
    brute_ssz,
    brute_subset_sum,
    load_bundled,
    partition_to_assignment,
    ssum_to_ssz,
    ssz_to_upar,
    ssz_witness_certificate,
    upc_to_par,
    validate_formula,
    xsat_to_upp,
)

__version__ = "0.1.0"
