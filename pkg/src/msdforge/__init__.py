"""Evaluation toolkit for 15-to-1 magic state distillation on 2D color codes:
output infidelity and success probability, layout and pairing fault-tolerance
verification, gate-schedule validation, failure-rate ansatz fitting, resource
costs, and preparation-cycle simulation.
"""

from .ansatz import (
    AnsatzParams,
    PauliRates,
    RateModel,
    Setting,
    adjust_threshold,
    builtin_params,
    eval_ansatz,
    split_rates,
    stability_rate,
)
from .channels import (
    Angle,
    NoiseChannel,
    RotationTerm,
    channels_combined,
    channels_single_level,
)
from .circuit import (
    RotationConfig,
    StageSchedule,
    correlated_error_harmful,
    count_undetectable_triples,
    default_rotation_set,
    default_stage_schedule,
    verify_pairing,
    x_error_rotations,
)
from .cycle import CycleConfig, CycleStats, simulate, t_m
from .engine import (
    AnalyticInputs,
    PerformanceReport,
    analytic_combined,
    analytic_single,
    evaluate_scheme,
    evolve_and_project,
    pareto_sweep,
    py_ratio_sweep,
)
from .fitting import SampleSet, fit_ansatz, loocv_select
from .growing import GrowRateTable, growing_rates
from .layout import enumerate_requirements, verify_layout
from .paulis import QubitId, ZPauliMask
from .scheme import (
    SchemeParams,
    Variant,
    derive_dims,
    n_rec,
    n_tri,
    space_cost,
    time_cost,
)
from .schedules import (
    GateSchedule,
    enumerate_valid,
    symmetry_orbit,
    validate_schedule,
)
from .surgery import SurgeryPlan, plan_surgery

__version__ = "0.1.0"
