"""Ground states of attractive 2D Bose gases in rotating anharmonic traps.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from rotbec._core import (  # noqa: F401
    ConfigError,
    EnergyBreakdown,
    Grid2D,
    IoError,
    MinimizerResult,
    NumericalError,
    RadialProfile,
    TownesConstants,
    TrapSpec,
    align_phase,
    comparison_grid,
    energy,
    init_trial,
    lift_to_grid,
    locate_max,
    make_trap,
    minimize,
    rescale,
    run_sweep_config,
    shoot_townes,
    solve_phi_I,
    solve_psi1,
    solve_psi2,
    townes_constants,
    vortex_free_radius,
    winding_map,
)

__all__ = [
    "ConfigError",
    "EnergyBreakdown",
    "Grid2D",
    "IoError",
    "MinimizerResult",
    "NumericalError",
    "RadialProfile",
    "TownesConstants",
    "TrapSpec",
    "align_phase",
    "comparison_grid",
    "energy",
    "init_trial",
    "lift_to_grid",
    "locate_max",
    "make_trap",
    "minimize",
    "rescale",
    "run_sweep_config",
    "shoot_townes",
    "solve_phi_I",
    "solve_psi1",
    "solve_psi2",
    "townes_constants",
    "vortex_free_radius",
    "winding_map",
]
