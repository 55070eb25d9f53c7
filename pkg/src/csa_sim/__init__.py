"""Simulation and analysis toolkit for channel-static antennas on mobile devices."""

from csa_sim.kinematics import (
    AntennaMount,
    ControllerLog,
    DeviceTrajectory,
    counter_movement,
    linear_trajectory,
    regular_positions,
    stationary_positions,
)
from csa_sim.field import FieldModel, FieldParams, eval_channel, synthesize_field
from csa_sim.experiment import ChannelTrace, anchor_coincidence_check, run_mode
from csa_sim.model import (
    ModelFit,
    PiecewiseStaticModel,
    RiceInitial,
    Transform,
    apply_transform,
    fit_model,
    generate_model_trace,
)
from csa_sim.analysis import (
    AnalysisReport,
    analyze_trace,
    compare_modes,
    estimate_rice_k,
    fade_depth,
    segment_static,
    spatial_autocorr,
    wrap_phase,
)
from csa_sim.errors import ConfigError, InsufficientDataError, InvalidInputError, InvalidParameterError

__version__ = "0.1.0"
