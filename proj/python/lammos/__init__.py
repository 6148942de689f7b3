"""Motorized-screw latch, in-pipe robot reconfiguration and exoskeleton lock models."""

from ._lammos import (
    LammosError,
    Nm_to_gcm,
    bracket_check,
    cli,
    energy_comparison,
    gcm_to_Nm,
    insertion_clearance_m,
    latch_cycle,
    plate_safety_factor,
    run_scenario,
    simulate_latch,
    spring_rate_N_per_m,
    stall_torque_Nm,
)

__all__ = [
    "LammosError",
    "Nm_to_gcm",
    "bracket_check",
    "cli",
    "energy_comparison",
    "gcm_to_Nm",
    "insertion_clearance_m",
    "latch_cycle",
    "plate_safety_factor",
    "run_scenario",
    "simulate_latch",
    "spring_rate_N_per_m",
    "stall_torque_Nm",
]
