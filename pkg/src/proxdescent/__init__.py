"""Solvers, certificates and benchmarks for weakly convex minimization."""

from .oracles import Evaluation, FirstOrderOracle, Vector, as_point, convexify
from .rng import RngStream, standard_normal_vector
from .bundle import (
    Cut,
    EssentialModel,
    ProxStepOutcome,
    aggregate_cut_from_step,
    initial_cut,
    initial_model,
    model_update,
    prox_step,
    subgradient_cut,
)
from .descent import (
    DescentStepResult,
    InnerBudgetExhausted,
    OuterRecord,
    ProxDescentConfig,
    SolveReport,
    WeakConvexityViolation,
    descent_test,
    prox_descent_step,
    run,
    telescoping_bounds,
)
from .stationarity import (
    MoreauResult,
    ReferenceSolveError,
    StationarityCertificate,
    is_to_grad_bound,
    is_to_ms_bound,
    moreau_reference,
    ms_to_is_bound,
    prox_gap_certificate,
    qg_moreau_upper_bound,
)
from .baselines import (
    BaselineRecord,
    BaselineReport,
    StepSchedule,
    pgsg,
    ppm,
    subgradient_method,
)
from .problems import (
    BlindDeconvInstance,
    PhaseRetrievalInstance,
    ToyFunction,
    box_subgradient_estimate,
    gen_blind_deconv,
    gen_phase_retrieval,
    load_instance,
    oracle_for_instance,
    save_instance,
    toy,
    toy_function,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
