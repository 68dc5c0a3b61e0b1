"""Deterministic Jones-calculus simulator for reflective fiber-optic
current sensors with spun-fiber polarization converters.

The package models the full reflective chain (polarizer, 45 degree splice,
quarter-wave converter, Faraday coil, mirror and the return pass), discrete
imperfect waveplates, and distributed spun birefringent media, plus the
measurement campaigns built on top: current sweeps, adiabaticity scans,
grid-refinement reports and environmental-drift studies. Everything is
closed-form or fixed-order numerics; no sampling, no hidden state.
"""

from .constants import (
    ASSUMED_CONSTANTS,
    SCHEMA_VERSION,
    constant,
    constants_fingerprint,
)
from .elements import (
    FaradayCoil,
    FocsScenario,
    ImperfectWaveplate,
    IntensityResult,
    detected_intensity,
    faraday_in,
    faraday_out,
    ideal_intensity,
    mirror,
    mount_at_45deg,
    polarizer,
    qwp_ideal_in,
    qwp_ideal_out,
    qwp_imperfect,
    qwp_imperfect_tan,
    roundtrip_field,
    splice45_in,
    splice45_out,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    EmptyWindowError,
    FocsimError,
    FringeNullError,
    NumericDomainError,
    RetardationSingularityError,
    UnsupportedProfileError,
)
from .experiments import (
    ConvergenceResult,
    CurrentSweepSpec,
    FrontEnd,
    PerturbationResult,
    SweepResult,
    XiSweepResult,
    default_coil,
    default_current_grid,
    default_demo_medium,
    default_high_order_front_end,
    default_spun_front_end,
    default_sweep_spec,
    device_delta,
    front_end_high_order,
    front_end_ideal,
    front_end_imperfect,
    front_end_spun,
    run_convergence_ladder,
    run_current_sweep,
    run_imperfection_scan,
    run_perturbation_study,
    run_xi_sweep,
)
from .jones import (
    apply,
    ellipticity_axis_ratio,
    ellipticity_principal,
    equal_up_to_phase,
    intensity,
    is_unitary,
    jones_matrix,
    jones_to_stokes,
    jones_vector,
    normalize,
    rotator,
)
from .spun import (
    EllipticityTrajectory,
    PropagationGrid,
    SpinProfile,
    SpunMediumSpec,
    StabilityMetrics,
    conversion_length,
    estimate_segments,
    fluctuation_bound,
    grid_for,
    propagate_trajectory,
    segment_matrix,
    stability_metrics,
    total_matrix,
)
from .tables import ResultTable, from_json, render, to_csv, to_json

__version__ = "0.1.0"

__all__ = [
    "ASSUMED_CONSTANTS",
    "SCHEMA_VERSION",
    "constant",
    "constants_fingerprint",
    "FaradayCoil",
    "FocsScenario",
    "ImperfectWaveplate",
    "IntensityResult",
    "detected_intensity",
    "faraday_in",
    "faraday_out",
    "ideal_intensity",
    "mirror",
    "mount_at_45deg",
    "polarizer",
    "qwp_ideal_in",
    "qwp_ideal_out",
    "qwp_imperfect",
    "qwp_imperfect_tan",
    "roundtrip_field",
    "splice45_in",
    "splice45_out",
    "ConfigError",
    "DegenerateInputError",
    "EmptyWindowError",
    "FocsimError",
    "FringeNullError",
    "NumericDomainError",
    "RetardationSingularityError",
    "UnsupportedProfileError",
    "ConvergenceResult",
    "CurrentSweepSpec",
    "FrontEnd",
    "PerturbationResult",
    "SweepResult",
    "XiSweepResult",
    "default_coil",
    "default_current_grid",
    "default_demo_medium",
    "default_high_order_front_end",
    "default_spun_front_end",
    "default_sweep_spec",
    "device_delta",
    "front_end_high_order",
    "front_end_ideal",
    "front_end_imperfect",
    "front_end_spun",
    "run_convergence_ladder",
    "run_current_sweep",
    "run_imperfection_scan",
    "run_perturbation_study",
    "run_xi_sweep",
    "apply",
    "ellipticity_axis_ratio",
    "ellipticity_principal",
    "equal_up_to_phase",
    "intensity",
    "is_unitary",
    "jones_matrix",
    "jones_to_stokes",
    "jones_vector",
    "normalize",
    "rotator",
    "EllipticityTrajectory",
    "PropagationGrid",
    "SpinProfile",
    "SpunMediumSpec",
    "StabilityMetrics",
    "conversion_length",
    "estimate_segments",
    "fluctuation_bound",
    "grid_for",
    "propagate_trajectory",
    "segment_matrix",
    "stability_metrics",
    "total_matrix",
    "ResultTable",
    "from_json",
    "render",
    "to_csv",
    "to_json",
    "__version__",
]
