"""Fleet sizing, drone footprints, mutual-area ratios, and constraint checks.

Capacity is allocated through footprint overlap: each drone owns a ground
disk (the area where its noise-limited SNR clears the footprint threshold),
and the fraction of that disk falling in a subarea is the share of the
drone's user budget credited to the subarea. Mutual areas are estimated on a
fixed square grid anchored at the region origin; counting the same grid
points for the disk, the region, and every subarea keeps the shares an exact
partition of each drone's footprint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import channel
from .errors import InfeasibleRateError


@dataclass(frozen=True)
class Placement:
    """A fleet of drone positions with active flags."""

    coords: np.ndarray  # (n, 3): x, y, h in meters
    active: np.ndarray  # (n,) bool

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float).reshape(-1, 3))
        object.__setattr__(self, "active", np.asarray(self.active, dtype=bool).reshape(-1))
        if self.active.shape[0] != self.coords.shape[0]:
            raise ValueError("active flags and coordinates disagree in length")

    @classmethod
    def from_vector(cls, vec):
        """Build an all-active placement from a flat (x1, y1, h1, x2, ...) vector."""
        coords = np.asarray(vec, dtype=float).reshape(-1, 3)
        return cls(coords=coords, active=np.ones(coords.shape[0], dtype=bool))

    def vector(self):
        return self.coords.reshape(-1).copy()

    def n_drones(self):
        return self.coords.shape[0]

    def n_active(self):
        return int(self.active.sum())

    def active_indices(self):
        return np.flatnonzero(self.active)

    def with_active(self, index, flag):
        """Copy of the placement with one drone's active flag replaced."""
        active = self.active.copy()
        active[index] = flag
        return Placement(coords=self.coords.copy(), active=active)


@dataclass(frozen=True)
class ConstraintReport:
    """Outcome of the three placement constraints for one fleet."""

    capacity_slack: np.ndarray  # per subarea: supplied share minus demand, users
    capacity_ok: bool
    covered_count: int
    coverage_ok: bool
    harmonic_se: float          # bit/s/Hz over covered users, 0 if none covered
    se_ok: bool
    n_users: int

    def all_ok(self):
        return self.capacity_ok and self.coverage_ok and self.se_ok


def users_per_bs(radio):
    """Largest user count one drone can serve: floor(bandwidth * SE / rate)."""
    return int(math.floor(radio.bandwidth * radio.target_se / radio.target_rate + 1e-9))


def initial_fleet_size(n_users, radio):
    """Capacity-based starting fleet size: ceil(users / users-per-drone)."""
    per_bs = users_per_bs(radio)
    if per_bs < 1:
        raise InfeasibleRateError(
            "target rate exceeds one drone's capacity "
            f"({radio.target_rate:.3g} bit/s > {radio.bandwidth * radio.target_se:.3g})"
        )
    return -(-int(n_users) // per_bs)


def coverage_radius(h, chan, radio, max_radius, snr_threshold_db=None, tol=1.0):
    """Largest ground radius where the noise-limited SNR clears the threshold.

    Bisects on the horizontal distance, capped at ``max_radius``; returns 0
    when even the nadir point fails. SNR decreases monotonically with the
    horizontal distance at fixed altitude, so bisection is exact up to ``tol``
    (meters).
    """
    thr = radio.sinr_threshold if snr_threshold_db is None else snr_threshold_db
    return float(_radius_search(np.asarray([h], dtype=float), chan, radio, max_radius, thr, tol)[0])


def _radius_search(h, chan, radio, max_radius, thr, tol=1.0):
    noise = radio.noise_power_dbm()

    def covered(r):
        return radio.tx_power - channel.pathloss_from_geometry(r, h, chan) - noise >= thr

    lo = np.zeros_like(h)
    hi = np.full_like(h, float(max_radius))
    at_zero = covered(lo)
    at_max = covered(hi)
    steps = max(1, int(math.ceil(math.log2(max(max_radius / tol, 2.0)))))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        ok = covered(mid)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    out = np.where(at_max, float(max_radius), lo)
    return np.where(at_zero, out, 0.0)


def _grid_count(cx, cy, radius, rect, res):
    """Number of grid points (cell centers at pitch ``res``) inside disk ∩ rect.

    The rect is half-open on its upper edges so adjacent rects partition the
    grid points exactly.
    """
    if radius <= 0.0:
        return 0
    x1 = rect.x + rect.w
    y1 = rect.y + rect.h
    i_lo = max(math.ceil(rect.x / res - 0.5), math.ceil((cx - radius) / res - 0.5))
    i_hi = min(math.ceil(x1 / res - 0.5) - 1, math.floor((cx + radius) / res - 0.5))
    if i_hi < i_lo:
        return 0
    xs = (np.arange(i_lo, i_hi + 1) + 0.5) * res
    half = np.sqrt(np.maximum(radius * radius - (xs - cx) ** 2, 0.0))
    lo = np.maximum(cy - half, rect.y)
    j_lo = np.ceil(lo / res - 0.5)
    j_hi = np.minimum(
        np.floor((cy + half) / res - 0.5),
        math.ceil(y1 / res - 0.5) - 1,
    )
    return int(np.maximum(j_hi - j_lo + 1, 0.0).sum())


@dataclass(frozen=True)
class FootprintModel:
    """Derives per-drone coverage disks and grid-estimated mutual areas.

    ``snr_threshold_db`` is the noise-limited SNR defining the footprint edge.
    The coverage indicator of the placement constraints keeps using the full
    interference-aware SINR; this disk only routes capacity shares to
    subareas, so it must stay placement-local.
    """

    region: "Region"
    chan: "ChannelParams"
    radio: "RadioConfig"
    snr_threshold_db: float
    sample_resolution: float = 25.0  # m grid pitch; < 1% area error for radii > 500 m

    def __post_init__(self):
        if self.sample_resolution <= 0:
            raise ValueError("sample_resolution must be positive")

    @classmethod
    def for_region(cls, region, chan, radio, snr_threshold_db=None, sample_resolution=25.0):
        """Default footprint edge: the SNR at which one user reaches the SE cap.

        The coverage SINR threshold is far too permissive for a capacity
        footprint at these power levels (everything would be one giant cell),
        so the disk edge is pinned where extra signal stops buying rate.
        """
        if snr_threshold_db is None:
            snr_threshold_db = 10.0 * math.log10(2.0 ** radio.se_cap - 1.0)
        return cls(
            region=region,
            chan=chan,
            radio=radio,
            snr_threshold_db=snr_threshold_db,
            sample_resolution=sample_resolution,
        )

    def max_radius(self):
        return self.region.diagonal()

    def radius(self, h):
        """Footprint radius (m) of a drone at altitude ``h``."""
        return float(self.radii(np.asarray([h], dtype=float))[0])

    def radii(self, h):
        """Vectorized footprint radii for an array of altitudes."""
        return _radius_search(
            np.asarray(h, dtype=float),
            self.chan,
            self.radio,
            self.max_radius(),
            self.snr_threshold_db,
        )

    def _region_rect(self):
        from .scenario import Rect

        return Rect(0.0, 0.0, self.region.width, self.region.height)

    def mutual_fraction(self, cx, cy, radius, rect):
        """Fraction of the (region-clipped) disk overlapping ``rect``."""
        res = self.sample_resolution
        total = _grid_count(cx, cy, radius, self._region_rect(), res)
        if total == 0:
            return 0.0
        return _grid_count(cx, cy, radius, rect, res) / total

    def fraction_matrix(self, placement, subareas):
        """Mutual-area fractions for every (active drone, subarea) pair.

        Rows follow ``placement.active_indices()``; each row sums to 1 when
        the drone has a nonzero footprint (subareas tile the region and the
        disk is clipped to it), and to 0 otherwise.
        """
        idx = placement.active_indices()
        radii = self.radii(placement.coords[idx, 2])
        out = np.zeros((idx.size, len(subareas)))
        res = self.sample_resolution
        region_rect = self._region_rect()
        for row, (j, r) in enumerate(zip(idx, radii)):
            cx, cy = placement.coords[j, 0], placement.coords[j, 1]
            total = _grid_count(cx, cy, r, region_rect, res)
            if total == 0:
                continue
            for col, sub in enumerate(subareas):
                out[row, col] = _grid_count(cx, cy, r, sub.rect, res) / total
        return out


def rho(drone, subarea, placement, footprint):
    """Share of drone ``drone``'s footprint that falls inside ``subarea``."""
    if not placement.active[drone]:
        raise ValueError(f"drone {drone} is not active")
    cx, cy, h = placement.coords[drone]
    return footprint.mutual_fraction(cx, cy, footprint.radius(h), subarea.rect)


def capacity_balance(placement, scenario, radio, footprint):
    """Per-subarea supplied user share and demand (both in users)."""
    fractions = footprint.fraction_matrix(placement, scenario.subareas)
    supplied = users_per_bs(radio) * fractions.sum(axis=0)
    demand = np.array([s.demand() for s in scenario.subareas])
    return supplied, demand


def user_coverage(placement, scenario, chan, radio):
    """Best-server SINR, coverage mask, and harmonic-mean SE over covered users."""
    _, sinr = channel.best_server_all(scenario.users, placement, chan, radio)
    covered = sinr >= radio.sinr_threshold
    if covered.any():
        se = channel.spectral_efficiency(sinr[covered], cap=radio.se_cap)
        harmonic = float(1.0 / np.mean(1.0 / se))
    else:
        harmonic = 0.0
    return sinr, covered, harmonic


def evaluate_constraints(placement, scenario, chan, radio, footprint):
    """Evaluate capacity, coverage, and spectral-efficiency constraints.

    Capacity: per subarea, the summed footprint shares times the per-drone
    user budget must meet the subarea demand. Coverage: the count of users
    whose best-server SINR clears the threshold must reach the required
    fraction. SE: the harmonic mean of covered users' spectral efficiencies
    must reach the system target.
    """
    if placement.n_active() == 0:
        raise ValueError("placement has no active drone")
    supplied, demand = capacity_balance(placement, scenario, radio, footprint)
    slack = supplied - demand
    deficit = float(np.maximum(-slack, 0.0).sum())
    capacity_ok = deficit <= 1e-9

    _, covered, harmonic = user_coverage(placement, scenario, chan, radio)
    covered_count = int(covered.sum())
    n_users = scenario.n_users()
    coverage_ok = covered_count >= radio.coverage_fraction * n_users - 1e-9
    se_ok = harmonic >= radio.target_se - 1e-9

    return ConstraintReport(
        capacity_slack=slack,
        capacity_ok=capacity_ok,
        covered_count=covered_count,
        coverage_ok=coverage_ok,
        harmonic_se=harmonic,
        se_ok=se_ok,
        n_users=n_users,
    )
