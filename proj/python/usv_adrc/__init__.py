"""Python bindings for the USV ADRC/PID trajectory-tracking testbed."""

from ._core import (
    AdrcChannel,
    AdrcConfig,
    ControlDemand,
    DubinsPath,
    EsoState,
    Projection,
    ScenarioConfig,
    TdState,
    ThrustCommand,
    VesselParams,
    WaveField,
    allocate,
    build_path,
    csv_columns,
    demand_from_thrust,
    eso_step,
    fal,
    fhan,
    l1_heading,
    load_scenario,
    mix,
    nlsef_step,
    parse_scenario,
    project,
    run_scenario,
    sample_pm_spectrum,
    surge_setpoint,
    td_step,
    verify_manoeuvres,
    wave_force,
)

__all__ = [name for name in dir() if not name.startswith("_")]
