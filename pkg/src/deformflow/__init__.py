"""Velocity-dependent circle deformation and its relaxation dynamics.

The package evaluates the quadratic deformation factor C(beta)
= pi (1 - beta^2) alongside the exact elliptic-integral perimeter ratio,
relaxes deformation profiles under linear, conformal, and second-order
flows, measures their energies, scales curvature-volume invariants, and
audits a bundled table of quoted reference values.
"""

from .deform import (
    GeometricMeasures,
    c_model,
    c_model_derivatives,
    c_supercritical_limit,
    critical_beta,
    geometric_measures,
    lorentz_gamma,
    quartic_inflection,
    velocity_ratio,
)
from .elliptic import (
    PerimeterComparison,
    c_exact,
    c_first_order,
    compare,
    complete_elliptic_e,
)
from .energy import (
    EnergyTrace,
    PotentialParams,
    dirichlet_energy,
    energy_density,
    energy_trace,
    l2_energy,
    l2_energy_rate,
    unique_quadratic_profile,
)
from .flow import (
    CONFORMAL_NONLINEAR,
    LINEAR_REGIMES,
    METHODS,
    REGIMES,
    SECOND_ORDER,
    SUBCRITICAL_LINEAR,
    SUPERCRITICAL_LINEAR,
    FlowConfig,
    FlowDomainError,
    FlowState,
    Trajectory,
    VelocityGrid,
    analytic_conformal,
    analytic_linear,
    integrate,
    linearized_alpha,
    relaxation_target,
    relaxation_time,
    rhs,
    second_order_solution,
)
from .invariants import (
    AUDIT_PASS_RTOL,
    AuditReport,
    ClaimRow,
    InvariantTriple,
    ManifoldSpec,
    claim_audit,
    conformal_rescale,
    flow_invariant_scaling,
    invariant_triple,
    sphere_signature_check,
    sphere_unit,
)

__version__ = "0.1.0"

__all__ = [
    "GeometricMeasures",
    "c_model",
    "c_model_derivatives",
    "c_supercritical_limit",
    "critical_beta",
    "geometric_measures",
    "lorentz_gamma",
    "quartic_inflection",
    "velocity_ratio",
    "PerimeterComparison",
    "c_exact",
    "c_first_order",
    "compare",
    "complete_elliptic_e",
    "EnergyTrace",
    "PotentialParams",
    "dirichlet_energy",
    "energy_density",
    "energy_trace",
    "l2_energy",
    "l2_energy_rate",
    "unique_quadratic_profile",
    "CONFORMAL_NONLINEAR",
    "LINEAR_REGIMES",
    "METHODS",
    "REGIMES",
    "SECOND_ORDER",
    "SUBCRITICAL_LINEAR",
    "SUPERCRITICAL_LINEAR",
    "FlowConfig",
    "FlowDomainError",
    "FlowState",
    "Trajectory",
    "VelocityGrid",
    "analytic_conformal",
    "analytic_linear",
    "integrate",
    "linearized_alpha",
    "relaxation_target",
    "relaxation_time",
    "rhs",
    "second_order_solution",
    "AUDIT_PASS_RTOL",
    "AuditReport",
    "ClaimRow",
    "InvariantTriple",
    "ManifoldSpec",
    "claim_audit",
    "conformal_rescale",
    "flow_invariant_scaling",
    "invariant_triple",
    "sphere_signature_check",
    "sphere_unit",
    "__version__",
]
