"""Staged-utility particle swarm search for drone fleet positions.

The swarm minimizes a sequence of three utilities: first the per-subarea
capacity deficit, then (with capacity locked in as a gate) the negated count
of covered users, and finally the negated harmonic-mean spectral efficiency
offset. A stage advances when the global best clears that stage's gate, and
never goes back. All randomness flows through one seeded generator with
draws in fixed particle order, so runs are bit-reproducible.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .capacity import Placement, capacity_balance, evaluate_constraints

STAGE_CAPACITY = "capacity"
STAGE_COVERAGE = "coverage"
STAGE_SE = "se"

_STAGE_ORDER = (STAGE_CAPACITY, STAGE_COVERAGE, STAGE_SE)


@dataclass(frozen=True)
class PsoParams:
    """Swarm hyperparameters; ``v_max=None`` resolves to 10% of the region diagonal."""

    swarm_size: int = 50
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    c1: float = 2.0
    c2: float = 2.0
    v_max: float | None = None  # m per dimension
    max_iters: int = 2000

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if not 0.0 < self.inertia_start <= 1.0 or not 0.0 < self.inertia_end <= 1.0:
            raise ValueError("inertia weights must lie in (0, 1]")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("learning coefficients must be non-negative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def resolved(self, region):
        if self.v_max is not None:
            return self
        return replace(self, v_max=0.1 * region.diagonal())

    def inertia_at(self, iteration):
        """Linearly decayed inertia weight for iteration t (1-based)."""
        if self.max_iters == 1:
            return self.inertia_start
        frac = (iteration - 1) / (self.max_iters - 1)
        return self.inertia_start + (self.inertia_end - self.inertia_start) * frac


@dataclass
class Particle:
    position: np.ndarray       # (3 * n_bs,) packed as x1, y1, h1, x2, ...
    velocity: np.ndarray
    best_position: np.ndarray
    best_utility: float


@dataclass
class ConvergenceTrace:
    """Per-iteration (iteration, stage, global best utility) rows."""

    rows: list = field(default_factory=list)

    def append(self, iteration, stage, utility):
        self.rows.append((int(iteration), stage, float(utility)))

    def __len__(self):
        return len(self.rows)

    def iterations(self):
        return np.array([r[0] for r in self.rows])

    def stages(self):
        return [r[1] for r in self.rows]

    def utilities(self):
        return np.array([r[2] for r in self.rows])

    def final_utility(self):
        return self.rows[-1][2]


@dataclass(frozen=True)
class PsoResult:
    placement: Placement
    trace: ConvergenceTrace
    feasible: bool

    def __iter__(self):
        return iter((self.placement, self.trace, self.feasible))


def utility_u1(placement, scenario, radio, footprint):
    """Total per-subarea capacity deficit in users; 0 iff capacity holds everywhere."""
    supplied, demand = capacity_balance(placement, scenario, radio, footprint)
    deficit = float(np.maximum(demand - supplied, 0.0).sum())
    return 0.0 if deficit <= 1e-9 else deficit


def utility_u2(placement, scenario, chan, radio, footprint):
    """Negated covered-user count, gated to 0 while capacity is violated."""
    report = evaluate_constraints(placement, scenario, chan, radio, footprint)
    return -float(report.covered_count) if report.capacity_ok else 0.0


def utility_u3(placement, scenario, chan, radio, footprint):
    """Spectral-efficiency push: -N + target - harmonic SE, gated on the first
    two constraints (capacity and the required coverage fraction)."""
    report = evaluate_constraints(placement, scenario, chan, radio, footprint)
    if not (report.capacity_ok and report.coverage_ok):
        return 0.0
    return -float(report.n_users) + radio.target_se - report.harmonic_se


def velocity_update(particle, global_best_position, params, rng, inertia=None):
    """New velocity from inertia plus personal and global attraction.

    The two attraction weights are drawn per dimension, uniform on (0, 1);
    the result is clamped to +-v_max componentwise and stored on the particle.
    """
    phi = params.inertia_start if inertia is None else inertia
    phi1 = rng.uniform(size=particle.position.shape)
    phi2 = rng.uniform(size=particle.position.shape)
    v = (
        phi * particle.velocity
        + params.c1 * phi1 * (particle.best_position - particle.position)
        + params.c2 * phi2 * (global_best_position - particle.position)
    )
    if params.v_max is not None:
        np.clip(v, -params.v_max, params.v_max, out=v)
    particle.velocity = v
    return v


def position_update(particle, lower, upper):
    """Advance the particle by its velocity, clamping to the search box.

    Velocity components that hit a bound are zeroed so the particle does not
    keep pushing into the wall.
    """
    pos = particle.position + particle.velocity
    clamped = (pos < lower) | (pos > upper)
    np.clip(pos, lower, upper, out=pos)
    vel = particle.velocity
    vel[clamped] = 0.0
    particle.position = pos
    particle.velocity = vel
    return pos


def _stage_utility(stage, scenario, chan, radio, footprint):
    if stage == STAGE_CAPACITY:
        return lambda vec: utility_u1(Placement.from_vector(vec), scenario, radio, footprint)
    if stage == STAGE_COVERAGE:
        return lambda vec: utility_u2(Placement.from_vector(vec), scenario, chan, radio, footprint)
    return lambda vec: utility_u3(Placement.from_vector(vec), scenario, chan, radio, footprint)


def run_pso(scenario, chan, radio, footprint, params, n_bs, seed=0, threads=1):
    """Run the staged swarm search for ``n_bs`` drones over the scenario region.

    Returns the global-best placement (all drones active), the per-iteration
    trace, and whether the final utility certifies all three constraints. An
    exhausted iteration budget yields the best effort found with
    ``feasible=False``.
    """
    if n_bs < 1:
        raise ValueError("n_bs must be at least 1")
    region = scenario.region
    params = params.resolved(region)
    n_users = scenario.n_users()
    rng = np.random.default_rng(seed)

    lower = np.tile([0.0, 0.0, radio.h_min], n_bs)
    upper = np.tile([region.width, region.height, radio.h_max], n_bs)
    dim = 3 * n_bs

    def evaluate(vectors, stage):
        util = _stage_utility(stage, scenario, chan, radio, footprint)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(util, vectors))
        return [util(v) for v in vectors]

    positions = rng.uniform(lower, upper, size=(params.swarm_size, dim))
    particles = [
        Particle(
            position=positions[l].copy(),
            velocity=np.zeros(dim),
            best_position=positions[l].copy(),
            best_utility=np.inf,
        )
        for l in range(params.swarm_size)
    ]

    stage = STAGE_CAPACITY
    for particle, u in zip(particles, evaluate([p.position for p in particles], stage)):
        particle.best_utility = u
    g_idx = int(np.argmin([p.best_utility for p in particles]))
    global_best_pos = particles[g_idx].best_position.copy()
    global_best_u = particles[g_idx].best_utility

    trace = ConvergenceTrace()
    trace.append(0, stage, global_best_u)

    def rescore(new_stage):
        nonlocal stage, global_best_pos, global_best_u
        stage = new_stage
        for particle, u in zip(
            particles, evaluate([p.best_position for p in particles], new_stage)
        ):
            particle.best_utility = u
        idx = int(np.argmin([p.best_utility for p in particles]))
        global_best_pos = particles[idx].best_position.copy()
        global_best_u = particles[idx].best_utility

    t = 1
    while global_best_u > -n_users and t <= params.max_iters:
        inertia = params.inertia_at(t)
        for particle in particles:  # RNG draws in fixed particle order
            velocity_update(particle, global_best_pos, params, rng, inertia=inertia)
            position_update(particle, lower, upper)
        utilities = evaluate([p.position for p in particles], stage)
        for particle, u in zip(particles, utilities):
            if u < particle.best_utility:
                particle.best_position = particle.position.copy()
                particle.best_utility = u
                if u < global_best_u:
                    global_best_pos = particle.position.copy()
                    global_best_u = u
        if stage == STAGE_CAPACITY and global_best_u <= 0.0:
            rescore(STAGE_COVERAGE)
        if stage == STAGE_COVERAGE and global_best_u <= -radio.coverage_fraction * n_users:
            rescore(STAGE_SE)
        trace.append(t, stage, global_best_u)
        t += 1

    placement = Placement.from_vector(global_best_pos)
    return PsoResult(placement=placement, trace=trace, feasible=bool(global_best_u <= -n_users))
