from ._edgectl import (
    ConfigError,
    TraceError,
    default_config,
    nominal_state,
    plant_step,
    resample_trace,
    run,
    solve,
    validate_config,
)

__all__ = [
    "ConfigError",
    "TraceError",
    "default_config",
    "nominal_state",
    "plant_step",
    "resample_trace",
    "run",
    "solve",
    "validate_config",
]
