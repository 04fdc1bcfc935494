"""Electromagnetic degrees of freedom of radiating bodies.

Radiation-mode eigenspectra, shadow-area and asymptotic NDoF
estimators, waterfilling channel capacity and regularized inverse
source reconstruction.
"""

from .capacity import (
    ChannelProblem,
    WaterfillAllocation,
    capacity_vs_snr,
    channel_efficiencies,
    waterfill,
)
from .discretize import (
    Discretization,
    dump_discretization,
    gram_matrix,
    ingest_pair,
    loss_matrix,
    onion_discretization,
    projection_matrix,
    radiation_matrix,
    resistance_pair,
    sample_mesh,
    sphere_discretization,
    write_pair,
)
from .errors import (
    DecompositionError,
    EmdofError,
    InvalidArgumentError,
    KindMismatchError,
    MalformedFileError,
    NoChannelError,
)
from .geometry import (
    DirectionQuadrature,
    ShadowReport,
    TriangleMesh,
    asymptotic_ndof,
    average_shadow_area,
    convex_shadow_area,
    convexity_gap,
    oblate_spheroid_avg_shadow,
    shadow_area,
    surface_area,
    weyl_estimate,
)
from .invsource import (
    FarFieldData,
    InverseSolution,
    Method,
    forward,
    reconstruct_svd,
    reconstruct_tikhonov,
    resolution_estimate,
    tikhonov_objective,
)
from .meshio import load_mesh, load_obj, load_tri, save_tri
from .modes import (
    NdofReport,
    ResistancePair,
    avg_max_effective_area,
    effective_ndof,
    efficiency,
    max_partial_effective_area,
    ndof_from_gain,
    ndof_threshold,
    radiation_modes,
    sum_rule_residual,
    trace_mode_sum,
)
from .shapes import BUILTIN_SHAPES, builtin_mesh
from .sphwave import (
    ETA0,
    LossKind,
    LossModel,
    ModeIndex,
    Provenance,
    RadiationSpectrum,
    ball_spectrum,
    default_l_max,
    mode_count,
    mode_list,
    plane_wave_coefficients,
    regular_wave_matrix,
    shell_spectrum,
    vector_harmonics,
)

__version__ = "1.0.0"
