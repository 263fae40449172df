"""Air-to-ground channel model: LoS probability, mean pathloss, SINR, spectral efficiency.

The propagation model is the probabilistic LoS/NLoS low-altitude-platform model:
free-space loss plus an S-curve (in elevation angle) mixture of the two excess
losses. Only mean behaviour is modelled; no fading or shadowing realizations.
All downlink transmissions share the full band (reuse-1), so every active drone
interferes with every user.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLinkError, NoServerError

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# 5 W transmit power expressed in dBm
TX_POWER_5W_DBM = 10.0 * math.log10(5000.0)


@dataclass(frozen=True)
class ChannelParams:
    """Environment constants of the air-to-ground model.

    ``a``/``b`` shape the LoS-probability S-curve; ``eta_los``/``eta_nlos`` are
    the mean excess losses (dB) over free space. Defaults are the urban set at
    2 GHz.
    """

    a: float = 9.61
    b: float = 0.16
    eta_los: float = 1.0       # dB
    eta_nlos: float = 20.0     # dB
    carrier_freq: float = 2e9  # Hz

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("S-curve parameters a, b must be positive")
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be positive")
        if not 0 <= self.eta_los <= self.eta_nlos:
            raise ValueError("require 0 <= eta_los <= eta_nlos")


@dataclass(frozen=True)
class RadioConfig:
    """System radio parameters. Defaults follow the urban planning setup."""

    tx_power: float = TX_POWER_5W_DBM  # dBm per downlink
    bandwidth: float = 20e6            # Hz
    target_rate: float = 1e6           # bit/s per user
    target_se: float = 1.7             # bit/s/Hz system average
    sinr_threshold: float = -7.0       # dB coverage threshold
    coverage_fraction: float = 0.95    # required covered fraction of users
    noise_density: float = -174.0      # dBm/Hz thermal floor
    h_min: float = 10.0                # m
    h_max: float = 600.0               # m
    se_cap: float = 8.0                # bit/s/Hz ceiling for one user

    def __post_init__(self):
        if self.bandwidth <= 0 or self.target_rate <= 0 or self.target_se <= 0:
            raise ValueError("bandwidth, target_rate, target_se must be positive")
        if not 0 < self.coverage_fraction <= 1:
            raise ValueError("coverage_fraction must be in (0, 1]")
        if not 0 <= self.h_min < self.h_max:
            raise ValueError("require 0 <= h_min < h_max")
        if self.se_cap <= 0:
            raise ValueError("se_cap must be positive")

    def noise_power_dbm(self):
        """Thermal noise over the full bandwidth, dBm."""
        return self.noise_density + 10.0 * math.log10(self.bandwidth)


@dataclass(frozen=True)
class Link:
    """Geometry of one drone-to-user link (user at ground level)."""

    horizontal_dist: float  # m
    altitude: float         # m
    slant_dist: float       # m
    elevation_deg: float    # degrees

    def __post_init__(self):
        if self.slant_dist == 0.0:
            raise DegenerateLinkError("drone and user coincide (slant distance 0)")
        expected = math.hypot(self.horizontal_dist, self.altitude)
        if abs(self.slant_dist - expected) > 1e-9 * max(expected, 1.0):
            raise ValueError("slant_dist inconsistent with horizontal_dist/altitude")
        if not 0.0 <= self.elevation_deg <= 90.0:
            raise ValueError("elevation_deg must be within [0, 90]")

    @classmethod
    def from_ground(cls, horizontal_dist, altitude):
        """Build a link from horizontal distance and drone altitude (meters)."""
        if horizontal_dist == 0.0 and altitude == 0.0:
            raise DegenerateLinkError("drone and user coincide (slant distance 0)")
        return cls(
            horizontal_dist=float(horizontal_dist),
            altitude=float(altitude),
            slant_dist=math.hypot(horizontal_dist, altitude),
            elevation_deg=float(elevation_deg(horizontal_dist, altitude)),
        )


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def elevation_deg(horizontal_dist, altitude):
    """Elevation angle in degrees; a zero horizontal distance maps to 90."""
    return np.degrees(np.arctan2(altitude, horizontal_dist))


def prob_los_from_angle(theta_deg, chan):
    """LoS probability from the elevation angle (degrees). Vectorized."""
    theta_deg = np.asarray(theta_deg, dtype=float)
    return 1.0 / (1.0 + chan.a * np.exp(-chan.b * (theta_deg - chan.a)))


def prob_los(link, chan):
    """LoS probability of a link; strictly increasing in elevation angle."""
    return float(prob_los_from_angle(link.elevation_deg, chan))


def pathloss_from_geometry(horizontal_dist, altitude, chan):
    """Mean pathloss (dB) from link geometry. Vectorized over both arguments."""
    r = np.asarray(horizontal_dist, dtype=float)
    h = np.asarray(altitude, dtype=float)
    d = np.hypot(r, h)
    p_los = prob_los_from_angle(elevation_deg(r, h), chan)
    fspl = 20.0 * np.log10(4.0 * np.pi * chan.carrier_freq * d / SPEED_OF_LIGHT)
    return fspl + p_los * chan.eta_los + (1.0 - p_los) * chan.eta_nlos


def pathloss_db(link, chan):
    """Mean pathloss (dB) of a link: free space plus LoS/NLoS excess mixture."""
    if link.slant_dist == 0.0:
        raise DegenerateLinkError("pathloss undefined for zero slant distance")
    return float(pathloss_from_geometry(link.horizontal_dist, link.altitude, chan))


def spectral_efficiency(sinr_db, cap=8.0):
    """Shannon spectral efficiency log2(1 + SINR), clipped at ``cap`` bit/s/Hz."""
    se = np.log2(1.0 + db_to_linear(sinr_db))
    return float(np.minimum(se, cap)) if np.isscalar(sinr_db) else np.minimum(se, cap)


def received_power_matrix(users_xy, placement, chan, radio):
    """Received power (dBm) for every (user, active drone) pair.

    Returns an (n_users, n_active) array; columns follow the order of
    ``placement.active_indices()``.
    """
    users_xy = np.asarray(users_xy, dtype=float).reshape(-1, 2)
    coords = placement.coords[placement.active]
    dx = users_xy[:, 0, None] - coords[None, :, 0]
    dy = users_xy[:, 1, None] - coords[None, :, 1]
    r = np.hypot(dx, dy)
    pl = pathloss_from_geometry(r, coords[None, :, 2], chan)
    return radio.tx_power - pl


def sinr_matrix_db(users_xy, placement, chan, radio):
    """SINR (dB) of every user from every active drone under full reuse."""
    rx_dbm = received_power_matrix(users_xy, placement, chan, radio)
    p_mw = db_to_linear(rx_dbm)
    noise_mw = float(db_to_linear(radio.noise_power_dbm()))
    total = p_mw.sum(axis=1, keepdims=True) + noise_mw
    return linear_to_db(p_mw / (total - p_mw))


def best_server_all(users_xy, placement, chan, radio):
    """Best-SINR association for every user.

    Returns ``(serving, sinr_db)`` where ``serving`` holds indices into the
    full drone list (not the active-only ordering). Ties go to the lowest
    drone index.
    """
    if placement.n_active() == 0:
        raise NoServerError("placement has no active drone")
    sinr = sinr_matrix_db(users_xy, placement, chan, radio)
    best_col = np.argmax(sinr, axis=1)
    active_idx = placement.active_indices()
    rows = np.arange(sinr.shape[0])
    return active_idx[best_col], sinr[rows, best_col]


def sinr_db(user_pos, serving, placement, chan, radio):
    """SINR (dB) of one user served by drone ``serving`` (index into the fleet)."""
    if placement.n_active() == 0:
        raise NoServerError("placement has no active drone")
    if not placement.active[serving]:
        raise ValueError(f"serving drone {serving} is not active")
    sinr = sinr_matrix_db(np.asarray(user_pos, dtype=float), placement, chan, radio)
    col = int(np.searchsorted(placement.active_indices(), serving))
    return float(sinr[0, col])


def best_server(user_pos, placement, chan, radio):
    """Active drone maximizing the user's SINR; returns (drone index, SINR dB)."""
    serving, sinr = best_server_all(
        np.asarray(user_pos, dtype=float), placement, chan, radio
    )
    return int(serving[0]), float(sinr[0])
