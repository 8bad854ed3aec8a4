"""Knee-damped leg drop simulation and work-loop analysis."""

import sys

from ._legdamp import (
    AnalysisError,
    CalibrationError,
    DamperSpec,
    DomainError,
    DropSummary,
    EnergyBreakdown,
    IntegrationError,
    LegParams,
    ParseError,
    SingularityError,
    ValidationError,
    analyze_drop,
    beta_from_length,
    calibrate,
    decompose_energy,
    knee_torque,
    leg_length,
    loop_area,
    run_cli,
    sensor_channels,
    simulate_drop,
    sweep_delta_h,
    table2,
    target_levels,
)


def main(argv=None):
    code, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
