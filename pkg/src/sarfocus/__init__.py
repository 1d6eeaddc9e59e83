"""Automotive FMCW SAR simulation, PFA and backprojection imaging, and
localization-error autofocus."""

from .autofocus import (
    LecaConfig,
    PgaConfig,
    PhaseErrorEstimate,
    leca_estimate_beta,
    pga_estimate_phase,
    phase_on_chirps,
    phase_to_beta,
)
from .bpa import (
    ImageGrid,
    backproject,
    correct_trajectory,
    pixelwise_bf_backproject,
    pre_bpa_beamform,
    range_profiles,
)
from .errors import (
    ConfigError,
    DomainError,
    FormatError,
    GeometryError,
    OptimizationError,
    RangeAmbiguityError,
    SarError,
    UndefinedMetricError,
)
from .fmcw import BeatCube, add_noise, simulate_beat_cube
from .formats import export_image, load_cube, load_image, save_cube, save_image
from .geometry import (
    ChirpGeometry,
    RadarParams,
    Scene,
    Srp,
    Trajectory,
    aperture_geometry,
    chirp_geometry,
    inject_linear_error,
    wavenumber,
)
from .image import SarImage
from .metrics import MetricsReport, RuntimeProbe, azimuth_resolution, image_contrast, image_entropy
from .pfa import apply_phase_correction, form_pfa, pfa_image, polar_resample, range_compensate, srp_beamform
from .pipeline import run_compare, run_pipeline
from .scenario import Scenario, load_scenario, save_scenario

__version__ = "0.1.0"
