"""conetrace: recovery of wave-equation initial data from light-cone traces.

Forward trace operators (even/odd parts on the cone t = |x|), their
weighted-L2 isometries and adjoints, and three families of inversion
formulas, all reduced to Radon-transform computations through the inversion
map x -> x/|x|^2.
"""

from .geometry import (
    CoverageError,
    OddDimension,
    RadialRule,
    SphereQuadrature,
    annulus_volume_integral,
    build_sphere_quadrature,
    inversion_map,
)
from .fields import (
    AnalyticField,
    field_from_spec,
    field_spec_hash,
    field_to_spec,
    inversion_pullback,
    make_annular_bump,
    radial_power_scale,
)
from .sphmean import (
    mean_through_origin,
    origin_mean_windowed,
    radial_mean_oracle_3d,
    spherical_mean,
    windowed_spherical_mean,
)
from .radon import (
    PlaneRule,
    RadonTable,
    build_radon_table,
    default_s_grid,
    load_radon_table,
    radon_invert,
    radon_isometry_residual,
    radon_point,
    radon_s_derivative,
    save_radon_table,
)
from .trace import (
    TraceField,
    load_trace_table,
    save_trace_table,
    tabulate_mean_trace,
    tabulate_trace,
    trace_U_means,
    trace_U_radon,
    trace_V_means,
    trace_V_radon,
    trace_radial_derivative,
    trace_radial_derivative_radon,
)
from .identities import (
    Grids,
    IdentityReport,
    ReconstructionReport,
    adjoint_U,
    adjoint_U_isometry,
    adjoint_U_pairing,
    adjoint_V,
    adjoint_V_isometry,
    adjoint_V_pairing,
    invert_U_first,
    invert_U_second,
    invert_V_first,
    invert_V_second,
    invert_mean,
    isometry_U,
    isometry_V,
    mean_isometry,
    reconstruction_grid,
    reconstruction_report,
)

__version__ = "0.1.0"
