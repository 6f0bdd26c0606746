"""Desk-scale three-grating near-field interferometer simulator.

A scalar 1-D wavefield is carried plane to plane by a path-summation
kernel (direct reference quadrature or fast paraxial FFT convolution),
modulated by slits and absorption gratings, and incoherently averaged over
point sources to produce throughput fringes, contrast-vs-energy curves and
a magnetometry analysis layer (field generation, deflection, shot-noise
sensitivity, device scaling).
"""

from .config import (
    ConfigError,
    RunConfig,
    build_beamline,
    build_cradle,
    build_field_region,
    default_config,
    parse_config,
    serialize_config,
)
from .elements import (
    ApertureSpec,
    GratingSpec,
    PhaseModel,
    aperture_amplitude,
    apply_plane,
    grating_amplitude,
    translate_grating,
)
from .interferometer import (
    GUN_ENERGY_RANGE_EV,
    BeamlineConfig,
    FringeCurve,
    beamline_grid,
    contrast,
    leg_sampling_reports,
    misalignment_factor,
    scan_fringe,
    simulate_throughput,
    sweep_energy,
)
from .kinematics import (
    ELECTRON,
    BeamEnergy,
    ParticleSpec,
    de_broglie_wavelength,
    resonant_energies,
    talbot_length,
)
from .propagation import (
    DIRECT,
    PARAXIAL,
    GridSpec,
    PropagationPlan,
    SamplingError,
    SamplingReport,
    WaveField,
    grid_of,
    propagate,
    propagate_direct,
    propagate_paraxial,
    required_dx,
    sampling_check,
)
from .sensing import (
    CradleSpec,
    FieldRegion,
    SensorReport,
    ab_phase,
    classical_deflection,
    cradle_field,
    deflection_per_field,
    field_for_deflection,
    fringe_slope,
    predict_throughput,
    scaled_sensitivity,
    sensor_report,
    shot_noise_sensitivity,
    simulate_step_response,
    sinusoid_fringe,
    step_snr,
)

__version__ = "0.1.0"
