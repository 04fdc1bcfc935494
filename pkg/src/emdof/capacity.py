"""Waterfilling channel capacity over radiation-mode efficiencies.

The channel uses total transmit power 1 and signal-to-noise ratio
gamma, maximizing sum log2(1 + gamma * nu_n * P_n) over power fractions
P_n >= 0 with sum P_n = 1.  The water level is found by the exact
sorted-threshold method: with efficiencies sorted descending, the
candidate level for the k strongest modes is

    mu_k = (1 + sum_{i<=k} 1/(gamma nu_i)) / k,

and the optimal active set is the largest k for which every active
power mu_k - 1/(gamma nu_i) stays positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NoChannelError
from .modes import ResistancePair, radiation_modes


@dataclass
class ChannelProblem:
    """Efficiencies nu_n in [0, 1] and SNR gamma > 0.

    The canonical order is descending, but any order is accepted; the
    solver is equivariant under permutations of the efficiencies.
    """

    efficiencies: np.ndarray
    snr: float

    def __post_init__(self):
        nu = np.asarray(self.efficiencies, dtype=float)
        if nu.ndim != 1 or nu.size == 0:
            raise InvalidArgumentError("efficiencies must be a non-empty 1-d array")
        if np.any(nu < 0) or np.any(nu > 1):
            raise InvalidArgumentError("efficiencies must lie in [0, 1]")
        if not self.snr > 0:
            raise InvalidArgumentError(f"snr must be > 0, got {self.snr}")
        self.efficiencies = nu


@dataclass
class WaterfillAllocation:
    """Optimal power fractions with water level and capacity."""

    powers: np.ndarray
    water_level: float
    capacity_bits: float
    active_count: int

    def __post_init__(self):
        p = np.asarray(self.powers, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise InvalidArgumentError("powers must be >= 0 and sum to 1")
        if int(np.count_nonzero(p > 0)) != self.active_count:
            raise InvalidArgumentError(
                "active_count must equal the number of positive powers"
            )
        self.powers = p


def waterfill(problem: ChannelProblem) -> WaterfillAllocation:
    """Solve the waterfilling problem exactly.

    Ties in efficiency receive equal power; modes too weak for the
    water level get none.
    """
    nu = problem.efficiencies
    gamma = problem.snr
    if not np.any(nu > 0):
        raise NoChannelError("all efficiencies are zero; no usable channel")
    order = np.argsort(-nu, kind="stable")
    pos = order[nu[order] > 0]
    inv = 1.0 / (gamma * nu[pos])
    k = np.arange(1, inv.size + 1)
    mu = (1.0 + np.cumsum(inv)) / k
    # Active set = largest k whose weakest active mode still gets power.
    feasible = mu > inv
    k_star = int(np.max(k[feasible]))
    level = float(mu[k_star - 1])
    powers = np.zeros_like(nu)
    active = pos[:k_star]
    powers[active] = level - inv[:k_star]
    cap = float(np.sum(np.log2(1.0 + gamma * nu[active] * powers[active])))
    return WaterfillAllocation(
        powers=powers, water_level=level, capacity_bits=cap, active_count=k_star
    )


def capacity_vs_snr(efficiencies, snr_grid) -> np.ndarray:
    """Rows of (gamma, capacity_bits, active_count) over an SNR grid.

    The grid must be positive and ascending; the active-mode count is
    nondecreasing and the capacity strictly increasing along it.
    """
    grid = np.asarray(snr_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidArgumentError("snr_grid must be a non-empty 1-d array")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError("snr_grid must be positive and ascending")
    rows = []
    for gamma in grid:
        alloc = waterfill(ChannelProblem(efficiencies, float(gamma)))
        rows.append((gamma, alloc.capacity_bits, alloc.active_count))
    return np.array(rows)


def channel_efficiencies(pair: ResistancePair) -> np.ndarray:
    """Channel singular values squared nu_n = rho_n / (1 + rho_n).

    Computed directly from the eigenproblem R0 x = nu (R0 + Rrho) x,
    which shares eigenvectors with the radiation-mode problem.
    """
    spectrum, _ = radiation_modes(
        ResistancePair(R0=pair.R0, Rrho=pair.R0 + pair.Rrho)
    )
    nu = np.clip(spectrum.eigenvalues, 0.0, np.nextafter(1.0, 0.0))
    return nu
