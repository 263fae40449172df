"""Minimum-fleet 3D placement planning for aerial (drone) base stations."""

from .capacity import (
    ConstraintReport,
    FootprintModel,
    Placement,
    coverage_radius,
    evaluate_constraints,
    initial_fleet_size,
    rho,
    users_per_bs,
)
from .channel import (
    ChannelParams,
    Link,
    RadioConfig,
    best_server,
    pathloss_db,
    prob_los,
    sinr_db,
    spectral_efficiency,
)
from .pruning import PruneResult, prune
from .pso import (
    ConvergenceTrace,
    Particle,
    PsoParams,
    PsoResult,
    position_update,
    run_pso,
    utility_u1,
    utility_u2,
    utility_u3,
    velocity_update,
)
from .reporting import export_run, sinr_cdf, voronoi_cells
from .scenario import (
    Rect,
    Region,
    Scenario,
    Subarea,
    generate_scenario_one,
    generate_scenario_two,
    load_scenario,
    save_scenario,
)

__all__ = [
    "ChannelParams",
    "ConstraintReport",
    "ConvergenceTrace",
    "FootprintModel",
    "Link",
    "Particle",
    "Placement",
    "PruneResult",
    "PsoParams",
    "PsoResult",
    "RadioConfig",
    "Rect",
    "Region",
    "Scenario",
    "Subarea",
    "best_server",
    "coverage_radius",
    "evaluate_constraints",
    "export_run",
    "generate_scenario_one",
    "generate_scenario_two",
    "initial_fleet_size",
    "load_scenario",
    "pathloss_db",
    "position_update",
    "prob_los",
    "prune",
    "rho",
    "run_pso",
    "save_scenario",
    "sinr_cdf",
    "sinr_db",
    "spectral_efficiency",
    "users_per_bs",
    "utility_u1",
    "utility_u2",
    "utility_u3",
    "velocity_update",
    "voronoi_cells",
]
