"""Block-level master planning for container vessels.

Two integer-programming formulations over the same voyage data: an
allocation model that counts containers per (transport, block) and a
template model that only picks a discharge-port pattern per block, plus
the derived hydrostatic/crane parameters both need, an exact
branch-and-bound solver, an independent feasibility validator, a
set-partitioning bridge, and benchmark tooling.
"""

from .domain import (
    BayGeometry,
    BlockCapacity,
    BonjeanTable,
    HydroTable,
    Instance,
    LENGTH_CLASSES,
    TEU_PER_CONTAINER,
    TransportSets,
    ValidationReport,
    VesselProfile,
    VoyageError,
    blocks_per_bay,
    enumerate_transports,
    transport_sets,
    validate_instance,
    validate_vessel,
)
from .hydro import (
    DerivedParams,
    ExtrapolationError,
    bm_bounds,
    buoyancy,
    crane_params,
    derive_params,
    displacement,
    interp_hydro,
    lcg_bounds,
    load_ports,
)
from .mip import MipModel, ModelBuildError, ModelStats, VarType
from .model_alloc import StowagePlan, build_allocation_model, decode_allocation
from .model_template import BlockTemplate, build_template_model, decode_template
from .reduction import (
    LiftError,
    ReductionRefused,
    brute_force_partition,
    lift_partition,
    reduce_set_partition,
)
from .solver import (
    SolveOutcome,
    SolverConfig,
    branch_and_bound_exact,
    solve,
    solve_with_adapter,
)
from .synth import CLASS_TARGETS, SyntheticSpec, gen_synthetic
from .compare import REFERENCE_SUMMARY, expected_optimal, run_compare
from .validator import (
    FeasibilityReport,
    check_allocation_feasibility,
    check_paired_block_semantics,
    check_template_feasibility,
    recompute_objective,
)

__version__ = "0.1.0"

__all__ = [
    "BayGeometry",
    "BlockCapacity",
    "BlockTemplate",
    "BonjeanTable",
    "CLASS_TARGETS",
    "DerivedParams",
    "ExtrapolationError",
    "FeasibilityReport",
    "HydroTable",
    "Instance",
    "LENGTH_CLASSES",
    "LiftError",
    "MipModel",
    "ModelBuildError",
    "ModelStats",
    "REFERENCE_SUMMARY",
    "ReductionRefused",
    "SolveOutcome",
    "SolverConfig",
    "StowagePlan",
    "SyntheticSpec",
    "TEU_PER_CONTAINER",
    "TransportSets",
    "ValidationReport",
    "VarType",
    "VesselProfile",
    "VoyageError",
    "blocks_per_bay",
    "bm_bounds",
    "branch_and_bound_exact",
    "build_allocation_model",
    "build_template_model",
    "buoyancy",
    "check_allocation_feasibility",
    "check_paired_block_semantics",
    "check_template_feasibility",
    "crane_params",
    "decode_allocation",
    "decode_template",
    "derive_params",
    "displacement",
    "enumerate_transports",
    "expected_optimal",
    "gen_synthetic",
    "interp_hydro",
    "lcg_bounds",
    "lift_partition",
    "load_ports",
    "brute_force_partition",
    "recompute_objective",
    "reduce_set_partition",
    "run_compare",
    "solve",
    "solve_with_adapter",
    "transport_sets",
    "validate_instance",
    "validate_vessel",
]
