"""Combinatorial Markov search: Markov search processes, index policies,
ex-ante relaxations and matroid prophet algorithms."""

from ._config import TOL, PolicyMismatchError, SizeLimitError
from .exante import (
    ExAnteSolution,
    cabinet_value_curve,
    exact_dag_curve,
    exante_opt_cabinets,
    exante_opt_cms,
    exante_opt_pandora_cabinets,
    fptas_dag_curve,
    maximize_separable_concave,
)
from .indices import (
    CappedValueTable,
    NotABanditError,
    amortization_check,
    compute_indices,
    is_exposed,
    threshold_bandit_policy,
)
from .matroid import (
    Matroid,
    exact_dq,
    max_weight_independent,
    polytope_member,
    rank,
    remaining_value,
    sample_feasible_set,
    sample_feasible_sets,
)
from .model import (
    CLAIM,
    MSP,
    NOCLAIM,
    Action,
    Cabinet,
    CabinetsInstance,
    CMSInstance,
    DiscreteDistribution,
    InvalidInstanceError,
    NOIPandoraInstance,
    PandoraCabinetsInstance,
    StationaryPolicy,
    Transcript,
    claim_probability,
    expected_performance,
    induced_bandit,
    is_bandit,
    simulate_policy,
    tree_msp,
    validate_msp,
)
from .oracles import (
    brute_force_opt,
    brute_force_opt_cabinets,
    brute_force_opt_cms,
    brute_force_opt_noi,
    brute_force_opt_pandora_cabinets,
    exante_upper_check,
)
from .plconcave import (
    PLConcave,
    concave_envelope,
    iron,
    upper_expectation,
    weighted_sup_convolution,
)
from .prophet import (
    Plan,
    RunRecord,
    classic_reduction_plan,
    classic_reduction_run,
    cms_prophet_plan,
    cms_prophet_run,
    estimate_welfare,
    matroid_cabinets_plan,
    matroid_cabinets_run,
    pandora_cabinets_plan,
    pandora_cabinets_run,
)
from .reductions import convert_cabinets_to_cms, convert_noi_to_cabinets
from .saup import SaupResult, brute_force_saup, cabinets_saup, maxsaup

__version__ = "0.1.0"

__all__ = [
    "Action",
    "CLAIM",
    "CMSInstance",
    "Cabinet",
    "CabinetsInstance",
    "CappedValueTable",
    "DiscreteDistribution",
    "ExAnteSolution",
    "InvalidInstanceError",
    "MSP",
    "Matroid",
    "NOCLAIM",
    "NOIPandoraInstance",
    "NotABanditError",
    "PLConcave",
    "PandoraCabinetsInstance",
    "Plan",
    "PolicyMismatchError",
    "RunRecord",
    "SaupResult",
    "SizeLimitError",
    "StationaryPolicy",
    "TOL",
    "Transcript",
    "amortization_check",
    "brute_force_opt",
    "brute_force_opt_cabinets",
    "brute_force_opt_cms",
    "brute_force_opt_noi",
    "brute_force_opt_pandora_cabinets",
    "brute_force_saup",
    "cabinet_value_curve",
    "cabinets_saup",
    "claim_probability",
    "classic_reduction_plan",
    "classic_reduction_run",
    "cms_prophet_plan",
    "cms_prophet_run",
    "compute_indices",
    "concave_envelope",
    "convert_cabinets_to_cms",
    "convert_noi_to_cabinets",
    "estimate_welfare",
    "exact_dag_curve",
    "exact_dq",
    "exante_opt_cabinets",
    "exante_opt_cms",
    "exante_opt_pandora_cabinets",
    "exante_upper_check",
    "expected_performance",
    "fptas_dag_curve",
    "induced_bandit",
    "iron",
    "is_bandit",
    "is_exposed",
    "matroid_cabinets_plan",
    "matroid_cabinets_run",
    "max_weight_independent",
    "maximize_separable_concave",
    "maxsaup",
    "pandora_cabinets_plan",
    "pandora_cabinets_run",
    "polytope_member",
    "rank",
    "remaining_value",
    "sample_feasible_set",
    "sample_feasible_sets",
    "simulate_policy",
    "threshold_bandit_policy",
    "tree_msp",
    "upper_expectation",
    "validate_msp",
    "weighted_sup_convolution",
]
