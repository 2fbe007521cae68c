"""Two-dimensional acoustic scattering and interior transmission eigenvalues."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import (
    CornerDescriptor,
    Disk,
    GridSpec,
    Polygon,
    boundary_band,
    corners,
    rasterize,
    regular_polygon,
    unit_square,
)
from .directions import DirectionQuadrature, HerglotzDensity, herglotz_eval
from .forward import (
    ComplexField2D,
    HerglotzIncident,
    Medium,
    PlaneWave,
    PointSource,
    ScatteringSolver,
    far_field,
    incident_eval,
    mie_disk,
    solve_scattering,
)
from .herglotz import (
    FarFieldMatrix,
    apply_F,
    assemble_far_field_matrix,
    density_growth_profile,
    herglotz_fit,
)
from .lsm import SamplingMesh, classify, indicator_map, te_scan, tikhonov_solve
from .teig import (
    QepDiscretization,
    TransmissionEigenpair,
    grid_eigenpairs,
    qep_assemble,
    qep_solve,
    radial_determinant,
    radial_eigenpair,
    radial_te_roots,
    recover_pair,
    te_residual,
)
from .probes import (
    calderon_recover,
    cgo_pair,
    corner_identity_defect,
    corner_profile,
    invisibility_defect,
    localization_scan,
    surface_ratio,
)
