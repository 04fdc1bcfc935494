"""Inverse source reconstruction in the radiation-mode basis.

The measurement model is diagonal in the radiation-mode basis:

    f_n = -sqrt(rho_n) I_n + n_n,

with independent circularly symmetric complex Gaussian noise per
coefficient.  The damped least-squares estimate minimizing
|f + sqrt(rho) I|^2 + delta |I|^2 is

    I_n = -sqrt(rho_n) / (delta + rho_n) * f_n,

and the plain pseudo-inverse (SVD) estimate is I_n = -f_n/sqrt(rho_n)
for modes with rho_n above a cutoff.  The resolution estimator spreads
the available far-field degrees of freedom, 8 pi <A_s> / lambda^2, over
the reconstruction surface, one polarization per spatial cell.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, InvalidArgumentError
from .sphwave import RadiationSpectrum


class Method(enum.Enum):
    TIKHONOV = "tikhonov"
    TRUNCATED_SVD = "truncated-svd"


@dataclass
class FarFieldData:
    """Measured spherical-wave coefficients with their noise level."""

    coefficients: np.ndarray
    noise_level: float = 0.0

    def __post_init__(self):
        f = np.asarray(self.coefficients, dtype=complex)
        if f.ndim != 1 or f.size == 0:
            raise InvalidArgumentError("coefficients must be a non-empty 1-d array")
        if not np.all(np.isfinite(f)):
            raise InvalidArgumentError("coefficients must be finite")
        if self.noise_level < 0:
            raise InvalidArgumentError("noise_level must be >= 0")
        self.coefficients = f


@dataclass
class InverseSolution:
    """Reconstructed mode currents with the solve parameters.

    residual and penalty are the two terms of the damped least-squares
    objective |f + sqrt(rho) I|^2 + delta |I|^2 evaluated at the
    solution (penalty excludes the delta factor for the SVD method,
    where it is simply |I|^2).
    """

    mode_coefficients: np.ndarray
    regularization: float
    method: Method
    residual: float
    penalty: float


def forward(
    modal_currents,
    spectrum: RadiationSpectrum,
    noise_level: float = 0.0,
    seed: int | None = None,
) -> FarFieldData:
    """Map mode currents to far-field data f = -sqrt(rho) I + noise."""
    currents = np.asarray(modal_currents, dtype=complex)
    rho = spectrum.eigenvalues
    if currents.shape != rho.shape:
        raise InvalidArgumentError(
            f"currents shape {currents.shape} does not match spectrum {rho.shape}"
        )
    if noise_level < 0:
        raise InvalidArgumentError("noise_level must be >= 0")
    f = -np.sqrt(rho) * currents
    if noise_level > 0:
        rng = np.random.default_rng(seed)
        f = f + noise_level * (
            rng.standard_normal(rho.size) + 1j * rng.standard_normal(rho.size)
        ) / np.sqrt(2.0)
    return FarFieldData(coefficients=f, noise_level=noise_level)


def reconstruct_tikhonov(
    data: FarFieldData, spectrum: RadiationSpectrum, delta: float
) -> InverseSolution:
    """Damped least-squares solution I_n = -sqrt(rho_n)/(delta+rho_n) f_n."""
    rho = spectrum.eigenvalues
    f = data.coefficients
    if f.shape != rho.shape:
        raise InvalidArgumentError("data length does not match spectrum")
    if delta < 0:
        raise InvalidArgumentError("delta must be >= 0")
    if delta == 0 and np.any(rho == 0):
        raise DecompositionError(
            "delta = 0 requires strictly positive eigenvalues; "
            "use a positive delta or an SVD cutoff"
        )
    currents = -np.sqrt(rho) / (delta + rho) * f
    residual = float(np.sum(np.abs(f + np.sqrt(rho) * currents) ** 2))
    penalty = delta * float(np.sum(np.abs(currents) ** 2))
    return InverseSolution(
        mode_coefficients=currents,
        regularization=delta,
        method=Method.TIKHONOV,
        residual=residual,
        penalty=penalty,
    )


def reconstruct_svd(
    data: FarFieldData, spectrum: RadiationSpectrum, cutoff: float
) -> InverseSolution:
    """Pseudo-inverse solution I_n = -f_n/sqrt(rho_n), weak modes dropped."""
    rho = spectrum.eigenvalues
    f = data.coefficients
    if f.shape != rho.shape:
        raise InvalidArgumentError("data length does not match spectrum")
    if cutoff <= 0:
        raise InvalidArgumentError("cutoff must be > 0")
    keep = rho >= cutoff
    currents = np.zeros_like(f)
    currents[keep] = -f[keep] / np.sqrt(rho[keep])
    residual = float(np.sum(np.abs(f + np.sqrt(rho) * currents) ** 2))
    penalty = float(np.sum(np.abs(currents) ** 2))
    return InverseSolution(
        mode_coefficients=currents,
        regularization=cutoff,
        method=Method.TRUNCATED_SVD,
        residual=residual,
        penalty=penalty,
    )


def tikhonov_objective(
    currents, data: FarFieldData, spectrum: RadiationSpectrum, delta: float
) -> float:
    """Damped least-squares objective |f + sqrt(rho) I|^2 + delta |I|^2."""
    currents = np.asarray(currents, dtype=complex)
    rho = spectrum.eigenvalues
    f = data.coefficients
    return float(
        np.sum(np.abs(f + np.sqrt(rho) * currents) ** 2)
        + delta * np.sum(np.abs(currents) ** 2)
    )


def resolution_estimate(
    surface_area: float, avg_shadow: float, wavelength: float
) -> tuple[float, float]:
    """Spatial resolution on a reconstruction surface and radiating fraction.

    Spreading the 8 pi <A_s> / lambda^2 far-field degrees of freedom
    over the surface with one polarization per cell gives the cell size

        d = sqrt(A lambda^2 / (4 pi <A_s>)),

    and the radiating share of the surface degrees of freedom is
    4 <A_s> / A (equal to one for convex bodies).
    """
    if surface_area <= 0 or avg_shadow <= 0 or wavelength <= 0:
        raise InvalidArgumentError("all inputs must be > 0")
    d = float(np.sqrt(surface_area * wavelength**2 / (4.0 * np.pi * avg_shadow)))
    fraction = 4.0 * avg_shadow / surface_area
    return d, fraction
