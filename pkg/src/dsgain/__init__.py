"""Delay-spread gain evaluation of rectangular-room building layouts."""

from .analytic import (
    EvalReport,
    QuadratureSpec,
    conditional_tau_mean,
    ds_gain,
    expected_tau_indoor,
    expected_tau_open,
    reliability,
    tau_mixture_cdf,
)
from .channel import (
    CORRIDOR,
    LOS,
    NLOS,
    OFFICE,
    ChannelRow,
    DsParams,
    TauDistribution,
    default_params,
    load_params,
    mean_path_loss,
    tau_indoor_distribution,
    tau_open_space,
    truncated_mean,
)
from .estimator import DelaySpreadGain, LinkSimulator
from .exceptions import (
    ConvergenceError,
    DomainError,
    DsGainError,
    GeometryError,
    InsufficientSamplesError,
    ParamError,
    SchemaError,
)
from .geometry import distance_cdf, distance_pdf, los_probability, z_kernel
from .layout import (
    Floorplan,
    Room,
    dump_floorplan,
    generate_grid,
    generate_partition,
    generate_winner_a1,
    load_floorplan,
    parse_floorplan,
    room_of,
)
from .montecarlo import (
    LinkBatch,
    LinkSample,
    SimReport,
    empirical_distance_pdf,
    empirical_reliability,
    empirical_tau_cdf,
    sample_at_distance,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "EvalReport",
    "QuadratureSpec",
    "conditional_tau_mean",
    "ds_gain",
    "expected_tau_indoor",
    "expected_tau_open",
    "reliability",
    "tau_mixture_cdf",
    "CORRIDOR",
    "LOS",
    "NLOS",
    "OFFICE",
    "ChannelRow",
    "DsParams",
    "TauDistribution",
    "default_params",
    "load_params",
    "mean_path_loss",
    "tau_indoor_distribution",
    "tau_open_space",
    "truncated_mean",
    "ConvergenceError",
    "DomainError",
    "DsGainError",
    "GeometryError",
    "InsufficientSamplesError",
    "ParamError",
    "SchemaError",
    "Floorplan",
    "Room",
    "dump_floorplan",
    "generate_grid",
    "generate_partition",
    "generate_winner_a1",
    "load_floorplan",
    "parse_floorplan",
    "room_of",
    "LinkBatch",
    "LinkSample",
    "SimReport",
    "empirical_distance_pdf",
    "empirical_reliability",
    "empirical_tau_cdf",
    "sample_at_distance",
    "simulate",
    "DelaySpreadGain",
    "LinkSimulator",
    "distance_cdf",
    "distance_pdf",
    "los_probability",
    "z_kernel",
    "__version__",
]
