"""Experiment configuration, cell geometry, user dropping and large-scale fading.

Cells are hexagons of circumradius ``cell_radius`` with flat top and bottom
edges; neighbouring cell centres are ``sqrt(3) * cell_radius`` apart. Cell 0
(the reference cell) is centred at the origin and the remaining cells are
taken from the hexagonal lattice in order of increasing distance, then angle.
"""

from dataclasses import dataclass, fields, replace

import numpy as np

from .exceptions import GeometryError

SQRT3 = np.sqrt(3.0)

#: Radius of the RRU ring, as a fraction of the cell radius.
RING_FRACTION = 0.65

#: Rejection-sampling attempts per user before giving up.
MAX_DROP_RETRIES = 10_000


@dataclass(frozen=True)
class Scenario:
    """Full parameterisation of an uplink experiment.

    Attributes
    ----------
    L, N, M, K : int
        Cells, RRUs per cell, antennas per RRU, users per cell.
    cell_radius : float
        Hexagon circumradius in metres.
    pathloss_exponent : float
        Log-distance path-loss exponent.
    shadowing_sigma : float
        Log-normal shadowing standard deviation in dB (0 disables shadowing).
    reference_distance : float
        Distance (m) at which the path gain is 1.
    min_access_distance : float
        Minimum user-RRU distance in metres.
    gamma_p, gamma_ul : float
        Noise variance of the pilot and of the uplink data channel (linear).
    correlation_coefficient : float
        Exponential receive-correlation coefficient, in [0, 1).
    rng_seed : int
        Root seed for every random stream.
    num_trials : int
        Monte Carlo trials (or user drops) per sweep point.
    """

    L: int = 1
    N: int = 1
    M: int = 16
    K: int = 4
    cell_radius: float = 500.0
    pathloss_exponent: float = 3.7
    shadowing_sigma: float = 8.0
    reference_distance: float = 1.0
    min_access_distance: float = 10.0
    gamma_p: float = 1e-10
    gamma_ul: float = 1e-10
    correlation_coefficient: float = 0.0
    rng_seed: int = 0
    num_trials: int = 1000

    def __post_init__(self):
        for name in ("L", "N", "M", "K", "num_trials"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("cell_radius", "reference_distance", "min_access_distance",
                     "gamma_p", "gamma_ul"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("pathloss_exponent", "shadowing_sigma"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        r = float(self.correlation_coefficient)
        if not 0.0 <= r < 1.0:
            raise ValueError(f"correlation_coefficient must be in [0, 1), got {r!r}")
        object.__setattr__(self, "correlation_coefficient", r)
        seed = self.rng_seed
        if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
            raise ValueError(f"rng_seed must be a 64-bit unsigned integer, got {seed!r}")
        object.__setattr__(self, "rng_seed", int(seed))

    def replace(self, **changes):
        return replace(self, **changes)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class Layout:
    """Positions in metres. ``user_positions`` is ``None`` until users are dropped.

    Attributes
    ----------
    cell_centers : ndarray, shape (L, 2)
    rru_positions : ndarray, shape (L, N, 2)
    user_positions : ndarray, shape (L, K, 2) or None
    cell_radius : float
    """

    cell_centers: np.ndarray
    rru_positions: np.ndarray
    cell_radius: float
    user_positions: np.ndarray = None


@dataclass(frozen=True)
class LargeScaleMap:
    """``lam[l, n, k]``: power gain from user k of cell l to RRU n of the reference cell."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if lam.ndim != 3:
            raise ValueError("lam must have shape (L, N, K)")
        if not np.all(np.isfinite(lam)) or np.any(lam < 0):
            raise ValueError("large-scale gains must be finite and >= 0")
        object.__setattr__(self, "lam", lam)

    @property
    def shape(self):
        return self.lam.shape


def hex_centers(L, cell_radius):
    """The ``L`` hexagonal-lattice points nearest the origin (origin first)."""
    rings = 0
    while 3 * rings * (rings + 1) + 1 < L:
        rings += 1
    spacing = SQRT3 * cell_radius
    u = spacing * np.array([np.cos(np.pi / 6), np.sin(np.pi / 6)])
    v = spacing * np.array([0.0, 1.0])
    pts = []
    for a in range(-2 * rings - 1, 2 * rings + 2):
        for b in range(-2 * rings - 1, 2 * rings + 2):
            pts.append(a * u + b * v)
    pts = np.array(pts)
    dist = np.round(np.hypot(pts[:, 0], pts[:, 1]) / spacing, 9)
    ang = np.round(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi), 9)
    order = np.lexsort((ang, dist))
    out = pts[order[:L]]
    out[np.abs(out) < 1e-9 * spacing] = 0.0
    return out


def rru_offsets(N, cell_radius):
    """RRU positions relative to the cell centre: centre plus a ring of ``N - 1``."""
    if N == 1:
        return np.zeros((1, 2))
    ang = 2 * np.pi * np.arange(N - 1) / (N - 1)
    ring = RING_FRACTION * cell_radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return np.vstack([np.zeros((1, 2)), ring])


def build_layout(s):
    """Cell centres and RRU positions for scenario ``s`` (no users yet)."""
    centers = hex_centers(s.L, s.cell_radius)
    rrus = centers[:, None, :] + rru_offsets(s.N, s.cell_radius)[None, :, :]
    return Layout(cell_centers=centers, rru_positions=rrus, cell_radius=s.cell_radius)


def in_hexagon(points, radius):
    """Mask of points (relative to the centre) inside a flat-topped hexagon."""
    x = np.abs(points[..., 0])
    y = np.abs(points[..., 1])
    return (y <= SQRT3 / 2 * radius) & (SQRT3 * x + y <= SQRT3 * radius)


def drop_users(s, layout, rng, max_retries=MAX_DROP_RETRIES):
    """Drop ``K`` users uniformly in every cell.

    Each user is re-drawn until it is at least ``min_access_distance`` away
    from every RRU of the layout.

    Raises
    ------
    GeometryError
        If a user cannot be placed within ``max_retries`` draws.
    """
    R = layout.cell_radius
    all_rrus = layout.rru_positions.reshape(-1, 2)
    users = np.empty((s.L, s.K, 2))
    for l in range(s.L):
        c = layout.cell_centers[l]
        for k in range(s.K):
            for _ in range(max_retries):
                p = rng.uniform(-1.0, 1.0, size=2) * np.array([R, SQRT3 / 2 * R])
                if not in_hexagon(p, R):
                    continue
                p = p + c
                d = np.hypot(*(all_rrus - p).T)
                if np.all(d >= s.min_access_distance):
                    users[l, k] = p
                    break
            else:
                raise GeometryError(
                    f"could not place user {k} of cell {l} after {max_retries} "
                    f"draws (min_access_distance={s.min_access_distance})")
    return replace(layout, user_positions=users)


def pathloss(d, s):
    """Log-distance path gain, with ``d`` clamped below at ``min_access_distance``."""
    d = np.maximum(np.asarray(d, dtype=float), s.min_access_distance)
    return (d / s.reference_distance) ** (-s.pathloss_exponent)


def compute_largescale(s, layout, rng):
    """Path loss and log-normal shadowing toward the reference cell's RRUs."""
    if layout.user_positions is None:
        raise ValueError("layout has no users; call drop_users first")
    diff = layout.user_positions[:, None, :, :] - layout.rru_positions[0][None, :, None, :]
    d = np.hypot(diff[..., 0], diff[..., 1])  # (L, N, K)
    gain = pathloss(d, s)
    shadow_db = rng.normal(0.0, 1.0, size=gain.shape) * s.shadowing_sigma
    return LargeScaleMap(gain * 10.0 ** (shadow_db / 10.0))


def realize(s, drop=0):
    """Layout with users and the large-scale map for drop number ``drop``.

    Uses dedicated seeding streams so the draw does not depend on ``M``.
    """
    from .seeding import DROPS, SHADOWING, make_rng

    layout = drop_users(s, build_layout(s), make_rng(s.rng_seed, DROPS, drop))
    lsm = compute_largescale(s, layout, make_rng(s.rng_seed, SHADOWING, drop))
    return layout, lsm
