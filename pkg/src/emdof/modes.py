"""Radiation-mode eigenproblems, NDoF counters and effective-area identities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DecompositionError, InvalidArgumentError
from .sphwave import (
    ETA0,
    Provenance,
    RadiationSpectrum,
    plane_wave_coefficients,
)

_HERM_TOL = 1e-12
_EIG_CLAMP = 1e-14


@dataclass
class ResistancePair:
    """Radiation resistance matrix R0 and material loss matrix Rrho.

    R0 is Hermitian positive-semidefinite, Rrho Hermitian positive-definite,
    both in Ohm and of equal dimension.
    """

    R0: np.ndarray
    Rrho: np.ndarray

    def __post_init__(self):
        r0 = np.asarray(self.R0)
        rr = np.asarray(self.Rrho)
        if r0.ndim != 2 or r0.shape[0] != r0.shape[1]:
            raise InvalidArgumentError("R0 must be square")
        if rr.shape != r0.shape:
            raise InvalidArgumentError("R0 and Rrho must have equal dimension")
        for name, m in (("R0", r0), ("Rrho", rr)):
            scale = np.linalg.norm(m)
            if scale > 0 and np.linalg.norm(m - m.conj().T) > _HERM_TOL * scale:
                raise InvalidArgumentError(f"{name} is not Hermitian")
        self.R0 = r0
        self.Rrho = rr

    @property
    def dimension(self) -> int:
        return self.R0.shape[0]


def radiation_modes(pair: ResistancePair):
    """Solve R0 I_n = rho_n Rrho I_n.

    Returns (spectrum, currents): eigenvalues sorted descending with
    small negatives clamped to zero, and current columns normalized so
    that I_m^H Rrho I_n = delta_mn (whence I_m^H R0 I_n = rho_n delta_mn).
    """
    try:
        w, v = scipy.linalg.eigh(pair.R0, pair.Rrho)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise DecompositionError(
            f"generalized eigensolve failed; Rrho may not be positive-definite: {exc}"
        ) from exc
    w = w[::-1]
    v = v[:, ::-1]
    floor = _EIG_CLAMP * max(w[0], 0.0)
    w = np.where(w < floor, 0.0, w)
    spectrum = RadiationSpectrum(
        eigenvalues=w, ka=None, wavelength=None, provenance=Provenance.DISCRETIZED
    )
    return spectrum, v


def efficiency(rho):
    """Mode efficiency nu = rho / (1 + rho)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise InvalidArgumentError("rho must be >= 0")
    out = rho / (1.0 + rho)
    return out if out.ndim else float(out)


def ndof_threshold(spectrum: RadiationSpectrum) -> int:
    """Count of radiation modes with rho_n >= 1 (50% efficiency), ties inclusive."""
    return int(np.count_nonzero(spectrum.eigenvalues >= 1.0))


def effective_ndof(spectrum: RadiationSpectrum) -> float:
    """Threshold-free mode count (sum nu)^2 / sum nu^2."""
    nu = spectrum.efficiencies
    denom = float(np.sum(nu**2))
    if denom == 0.0:
        raise InvalidArgumentError("effective NDoF undefined for an all-zero spectrum")
    return float(np.sum(nu)) ** 2 / denom


def ndof_from_gain(spectrum: RadiationSpectrum) -> float:
    """NDoF estimate 2<max G> = sum rho_n/(1+rho_n)."""
    return float(np.sum(spectrum.efficiencies))


def avg_max_effective_area(spectrum: RadiationSpectrum, wavelength: float) -> float:
    """Average maximal effective area (lambda^2 / 8 pi) * sum nu_n."""
    if wavelength <= 0:
        raise InvalidArgumentError("wavelength must be > 0")
    return wavelength**2 / (8.0 * np.pi) * float(np.sum(spectrum.efficiencies))


def sum_rule_residual(
    spectrum: RadiationSpectrum, volume: float, wavelength: float, rho_r: float
) -> float:
    """Relative residual of sum rho_n against 2 pi eta0 V / (lambda^2 rho_r)."""
    if volume <= 0:
        raise InvalidArgumentError("volume must be > 0")
    if wavelength <= 0 or rho_r <= 0:
        raise InvalidArgumentError("wavelength and rho_r must be > 0")
    target = 2.0 * np.pi * ETA0 * volume / (wavelength**2 * rho_r)
    return abs(float(np.sum(spectrum.eigenvalues)) - target) / target


def trace_mode_sum(pair: ResistancePair) -> float:
    """Sum of radiation-mode eigenvalues via trace(Rrho^-1 R0)."""
    try:
        x = scipy.linalg.solve(pair.Rrho, pair.R0, assume_a="pos")
    except scipy.linalg.LinAlgError as exc:
        raise DecompositionError(f"Rrho solve failed: {exc}") from exc
    return float(np.real(np.trace(x)))


def max_partial_effective_area(
    pair: ResistancePair,
    U: np.ndarray,
    direction,
    polarization,
    wavelength: float,
    L_max: int | None = None,
) -> float:
    """Maximal partial effective area (lambda^2/16 pi^2) a^H U R^-1 U^T a.

    U has one row per spherical mode and one column per basis function;
    the plane-wave coefficient vector a is evaluated for the given
    direction and polarization.  Implemented as the Hermitian form in
    g = U^T a, which is real and non-negative by construction.
    """
    if wavelength <= 0:
        raise InvalidArgumentError("wavelength must be > 0")
    U = np.asarray(U)
    if L_max is None:
        # Invert n_modes = 2 L (L + 2) for the row count.
        L_max = int(round(np.sqrt(U.shape[0] / 2.0 + 1.0) - 1.0))
        if 2 * L_max * (L_max + 2) != U.shape[0]:
            raise InvalidArgumentError(
                f"row count {U.shape[0]} is not 2L(L+2) for integer L"
            )
    a = plane_wave_coefficients(direction, polarization, L_max)
    g = U.T @ a
    r = pair.R0 + pair.Rrho
    try:
        c, low = scipy.linalg.cho_factor(r)
        x = scipy.linalg.cho_solve((c, low), g)
    except scipy.linalg.LinAlgError as exc:
        raise DecompositionError(f"total resistance matrix is singular: {exc}") from exc
    return wavelength**2 / (16.0 * np.pi**2) * float(np.real(np.vdot(g, x)))


@dataclass
class NdofReport:
    """Summary of the NDoF measures of one spectrum."""

    threshold_count: int
    effective: float
    sum_of_efficiencies: float
    avg_max_eff_area: float | None
    ties_at_one: int
    truncation_last_term: float

    @classmethod
    def from_spectrum(
        cls, spectrum: RadiationSpectrum, wavelength: float | None = None
    ) -> "NdofReport":
        nu = spectrum.efficiencies
        return cls(
            threshold_count=ndof_threshold(spectrum),
            effective=effective_ndof(spectrum),
            sum_of_efficiencies=float(np.sum(nu)),
            avg_max_eff_area=(
                avg_max_effective_area(spectrum, wavelength)
                if wavelength is not None
                else None
            ),
            ties_at_one=int(np.count_nonzero(spectrum.eigenvalues == 1.0)),
            truncation_last_term=float(nu[-1]) if nu.size else 0.0,
        )
