"""Numerical laboratory for globally existing Kahler-Ricci-type potential flows
on flat torus models, with a verification harness for their long-time estimates."""

from .cohomology import (
    CohomologyClass,
    VolumePolynomial,
    class_path,
    collapse_order,
    kahler_check,
    mixed_discriminant,
    singularity_time,
    volume_polynomial,
)
from .flow import (
    FlowState,
    IntegratorSettings,
    OracleTable,
    Scenario,
    Trajectory,
    gauge_shift,
    homogeneous_oracle,
    rhs,
    run,
    shift_rate,
    shift_solution,
    step,
)
from .geometry import (
    PERIOD,
    HermitianMatrixField,
    PeriodicGrid,
    PositivityError,
    ScalarField,
    complex_hessian,
    form_field,
    integrate,
    laplacian,
    ma_determinant,
    min_eigenvalue,
    ricci_of_density,
    ricci_of_metric,
    spectral_derivative,
    trace_pair,
)

__version__ = "0.1.0"
