"""Spectral boundary-integral solver for a translating Hele-Shaw bubble.

Evolves a near-circular bubble in the tangent-angle, equal-arclength
frame, solves the steady translating shape with sidewalls, and verifies
the conservation, decay, and small-width asymptotics the formulation
guarantees.
"""

from .errors import ClosureError, ConfigError, GeometryError, HeleShawError, SolverError
from .evolution import (
    DiagnosticsRecord,
    EvolveConfig,
    EvolveResult,
    LinearSymbol,
    VelocityFields,
    evolve,
    linear_propagator,
    rhs,
    step,
    velocities,
)
from .geometry import (
    InterfaceGeometry,
    ShapeState,
    build_geometry,
    compute_area,
    divided_differences,
    length_from_area,
    make_state,
    solve_closure,
    write_snapshot,
)
from .operators import (
    KernelContext,
    apply_F,
    apply_G,
    apply_G1,
    apply_G2,
    apply_K,
    commutator_h,
    kernel_context,
)
from .spectral import (
    PeriodicField,
    WeightProfile,
    cumulative_integral,
    derivative,
    hilbert,
    lambda_op,
    project_qn,
    sobolev_norm,
    weighted_norm,
)
from .steady import (
    SteadySolution,
    apply_A,
    asymptotic_reference,
    frechet_at_circle,
    invert_A,
    solve_steady,
    steady_iterate,
    steady_residual,
)
from .vortex import PhysicalParams, VortexSheet, solve_gamma

__version__ = "0.1.0"
