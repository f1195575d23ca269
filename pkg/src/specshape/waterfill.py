"""Constrained water-filling power allocation over the subcarrier grid.

The problem: maximize sum-capacity over active flags and powers subject to
(1) nonnegative powers, (2) binary activity, (3) the grid's forced-null
guard set, (4) total power P_T, and (5) an interference admission threshold
I_n < K * df * sigma^2 on every active subcarrier.

Two independent solvers are provided.  ``solve_waterfill`` iteratively
redistributes P_T over a shrinking candidate set until no candidate's
water-fill power is negative.  ``oracle_waterfill`` bisects the water level
directly and checks the optimality conditions; it exists purely to
cross-validate the first solver and is kept free of shared code paths.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .grid import InterferenceProfile, SubcarrierGrid

__all__ = [
    "AllocationRequest",
    "Allocation",
    "solve_waterfill",
    "oracle_waterfill",
    "capacity_of",
    "k_sweep",
    "verify_water_level",
]


@dataclass(frozen=True)
class AllocationRequest:
    profile: InterferenceProfile
    grid: SubcarrierGrid
    total_power_w: float
    k_threshold: float

    def __post_init__(self) -> None:
        if self.total_power_w <= 0:
            raise ValueError("total_power_w must be > 0")
        if self.k_threshold <= 0:
            raise ValueError("k_threshold must be > 0")
        if len(self.profile.interference_w) != self.grid.n_subcarriers:
            raise ValueError("profile/grid length mismatch")

    def eligible_mask(self) -> np.ndarray:
        """Not forced-null and strictly under the admission threshold.

        The threshold is strict (<); an exact tie is excluded.
        """
        limit = self.k_threshold * self.profile.noise_per_subcarrier_w
        return self.grid.eligible & (self.profile.interference_w < limit)


@dataclass(frozen=True)
class Allocation:
    """Result of the optimization: activity, powers, and capacity summary."""

    active: np.ndarray              # bool, shape (N,)
    powers_w: np.ndarray            # P_n, zero where inactive
    water_level_w: float            # common P_n + (I_n + df sigma^2) on active set
    capacity_bps: float
    spectral_efficiency: float      # capacity / ((N_u + 1) * df)
    n_active: int

    @property
    def is_empty(self) -> bool:
        return self.n_active == 0

    def active_indices(self) -> tuple[int, ...]:
        """1-based indices of active subcarriers."""
        return tuple(int(i) + 1 for i in np.flatnonzero(self.active))

    def to_csv(self, grid: SubcarrierGrid, profile: InterferenceProfile) -> str:
        gamma2 = profile.sinr_denominator_w
        buf = io.StringIO()
        buf.write("index,f_n_hz,alpha,P_n_w,I_n_w,gamma2_w\n")
        for i in range(grid.n_subcarriers):
            buf.write(f"{i + 1},{grid.centers_hz[i]:.17g},"
                      f"{int(self.active[i])},{self.powers_w[i]:.17g},"
                      f"{profile.interference_w[i]:.17g},{gamma2[i]:.17g}\n")
        return buf.getvalue()

    def summary_json(self, k_threshold: float) -> str:
        return json.dumps(
            {
                "n_active": self.n_active,
                "active_indices": list(self.active_indices()),
                "water_level_w": self.water_level_w,
                "capacity_bps": self.capacity_bps,
                "spectral_efficiency_bps_hz": self.spectral_efficiency,
                "K": k_threshold,
            },
            indent=2,
        )


def _empty_allocation(grid: SubcarrierGrid) -> Allocation:
    N = grid.n_subcarriers
    return Allocation(
        active=np.zeros(N, dtype=bool),
        powers_w=np.zeros(N),
        water_level_w=0.0,
        capacity_bps=0.0,
        spectral_efficiency=0.0,
        n_active=0,
    )


def _finish(req: AllocationRequest, powers: np.ndarray,
            water: float) -> Allocation:
    active = powers > 0.0
    n_u = int(active.sum())
    cap, se = _capacity(powers, active, req.profile, req.grid)
    return Allocation(
        active=active,
        powers_w=powers,
        water_level_w=water,
        capacity_bps=cap,
        spectral_efficiency=se,
        n_active=n_u,
    )


def _capacity(powers: np.ndarray, active: np.ndarray,
              profile: InterferenceProfile,
              grid: SubcarrierGrid) -> tuple[float, float]:
    gamma2 = profile.sinr_denominator_w
    df = grid.spacing_hz
    cap = float(df * np.sum(np.log2(1.0 + powers[active] / gamma2[active])))
    n_u = int(active.sum())
    se = cap / ((n_u + 1) * df) if n_u > 0 else 0.0
    return cap, se


def solve_waterfill(req: AllocationRequest) -> Allocation:
    """Iterative-removal water-filling.

    Starting from all eligible subcarriers, spread P_T at a common water
    level, drop every candidate whose tentative power is not positive, and
    repeat.  The candidate set strictly shrinks, so the loop ends in at most
    N passes.  With no eligible subcarrier at all the empty allocation is
    returned (a value, not an error: threshold sweeps may cross it).
    """
    gamma2 = req.profile.sinr_denominator_w
    candidates = req.eligible_mask()
    if not candidates.any():
        return _empty_allocation(req.grid)

    water = 0.0
    while True:
        m = int(candidates.sum())
        water = (req.total_power_w + gamma2[candidates].sum()) / m
        tentative = np.where(candidates, water - gamma2, 0.0)
        negative = candidates & (tentative <= 0.0)
        if not negative.any():
            break
        candidates = candidates & ~negative
        assert candidates.sum() < m, "candidate set must strictly shrink"
        if not candidates.any():
            return _empty_allocation(req.grid)

    powers = np.where(candidates, np.maximum(tentative, 0.0), 0.0)
    return _finish(req, powers, water)


def oracle_waterfill(req: AllocationRequest) -> Allocation:
    """Bisection on the water level; independent check of solve_waterfill.

    P_n(w) = max(0, w - gamma_n^2) over the eligible set is nondecreasing in
    w, so bisect until sum P_n(w) matches P_T to 1e-13 relative (or the
    bracket collapses).  The returned allocation is verified against the
    optimality conditions: equal marginals on the active set, and no
    eligible subcarrier below the water level left inactive.
    """
    gamma2 = req.profile.sinr_denominator_w
    eligible = req.eligible_mask()
    if not eligible.any():
        return _empty_allocation(req.grid)

    g = gamma2[eligible]
    target = req.total_power_w
    lo = float(g.min())                 # sum = 0
    hi = float(g.min() + target)        # sum >= target
    w = hi
    for _ in range(200):
        w = 0.5 * (lo + hi)
        s = np.maximum(0.0, w - g).sum()
        if abs(s - target) <= 1e-13 * target:
            break
        if s < target:
            lo = w
        else:
            hi = w
        if hi - lo <= np.finfo(float).eps * hi:
            break

    powers = np.zeros(req.grid.n_subcarriers)
    powers[eligible] = np.maximum(0.0, w - g)
    # renormalize the bisection residual onto the active set
    act = powers > 0.0
    powers[act] *= target / powers[act].sum()

    alloc = _finish(req, powers, w)
    assert verify_water_level(alloc, req, rtol=1e-9), "optimality check failed"
    return alloc


def verify_water_level(alloc: Allocation, req: AllocationRequest,
                       rtol: float = 1e-9) -> bool:
    """Optimality conditions of the allocation.

    On the active set P_n + gamma_n^2 is constant (the water level); every
    eligible inactive subcarrier sits at or above that level; no active
    subcarrier violates the admission threshold.
    """
    if alloc.is_empty:
        return True
    gamma2 = req.profile.sinr_denominator_w
    level = alloc.powers_w[alloc.active] + gamma2[alloc.active]
    w = level.mean()
    if np.any(np.abs(level - w) > rtol * w):
        return False
    idle = req.eligible_mask() & ~alloc.active
    if np.any(gamma2[idle] < w * (1.0 - rtol)):
        return False
    limit = req.k_threshold * req.profile.noise_per_subcarrier_w
    return not np.any(req.profile.interference_w[alloc.active] >= limit)


def capacity_of(alloc: Allocation, profile: InterferenceProfile,
                grid: SubcarrierGrid) -> tuple[float, float]:
    """(capacity bits/s, spectral efficiency bits/s/Hz) of an allocation.

    Capacity is the Shannon sum over active subcarriers; the efficiency
    divides by the occupied width (N_u + 1) * df.
    """
    if len(alloc.powers_w) != grid.n_subcarriers:
        raise ValueError("allocation/grid length mismatch")
    return _capacity(alloc.powers_w, alloc.active, profile, grid)


def k_sweep(profile: InterferenceProfile, grid: SubcarrierGrid,
            total_power_w: float, k_values) -> list[dict]:
    """Solve once per threshold value; returns one summary row per K."""
    k_values = list(k_values)
    if not k_values or any(k <= 0 for k in k_values):
        raise ValueError("k_values must be non-empty and positive")
    rows = []
    for k in k_values:
        req = AllocationRequest(profile, grid, total_power_w, k)
        alloc = solve_waterfill(req)
        rows.append(
            {
                "K": float(k),
                "n_active": alloc.n_active,
                "capacity_bps": alloc.capacity_bps,
                "spectral_efficiency_bps_hz": alloc.spectral_efficiency,
            }
        )
    return rows
