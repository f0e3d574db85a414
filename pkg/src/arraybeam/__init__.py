"""Phased microphone-array geometry, beamforming response and rejection metrics."""

from ._errors import (
    ArraybeamError,
    ContractError,
    FitError,
    GeometryError,
    ParameterError,
)
from .analysis import (
    ConvergenceStudy,
    EquiAreaNearFamily,
    FitConstants,
    GSweepResult,
    LinearFamily,
    check_g_invariance,
    converge_rf,
    detect_side_lobes,
    fit_g_constants,
    g_equi_area_near,
    g_linear,
    g_sweep,
    main_lobe,
)
from .beamform import (
    conventional_amplitude,
    das_amplitude,
    response_at,
    signal_amplitude,
)
from .estimator import ArrayResponse
from .geometry import (
    ArchimedeanParams,
    ArrayLayout,
    EquiAreaParams,
    FourArmSpiralParams,
    LinearParams,
    MicPosition,
    RingParams,
    UnderbrinkParams,
    make_archimedean,
    make_concentric,
    make_equi_area,
    make_four_arm_spiral,
    make_layout,
    make_linear,
    make_underbrink,
    table1_layouts,
)
from .metrics import (
    RejectionReport,
    ResponseMap,
    eta,
    rejection_factor,
    response_map,
    snr_from_rf,
)
from .propagation import (
    FarFieldTarget,
    LinearTarget,
    NearFieldTarget,
    linear_pairwise_phases,
    linear_phase,
    point_source_phases,
    steering_phases,
)
from .scenario import Scenario
from .sources import SourceGrid, disk_grid, dome_grid, sweep_1d

__version__ = "0.1.0"
