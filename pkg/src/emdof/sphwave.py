"""Spherical vector-wave machinery.

Mode indexing, regular radial functions, vector spherical harmonics,
plane-wave expansion coefficients and the closed-form radiation-mode
spectra of spherical shells and balls.

Conventions: modes are labelled by (tau, l, m) with tau=1 (TE character,
no radial field component) and tau=2 (TM character).  The angular
harmonics are orthonormal over the unit sphere.  Evaluation at the poles
is handled by clamping theta away from 0 and pi by 1e-7.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, spherical_jn

try:
    from scipy.special import assoc_legendre_p_all

    def _lpmn(L: int, x: float):
        """Associated Legendre P and dP/dx for 0 <= m, l <= L, shape [m, l]."""
        values = assoc_legendre_p_all(L, L, x, diff_n=1)
        return values[0][:, : L + 1].T, values[1][:, : L + 1].T

except ImportError:  # older scipy
    from scipy.special import lpmn as _scipy_lpmn

    def _lpmn(L: int, x: float):
        return _scipy_lpmn(L, L, x)

from .errors import InvalidArgumentError, KindMismatchError

# Free-space impedance in Ohm.
ETA0 = 376.730313668

_POLE_TOL = 1e-7


@dataclass(frozen=True)
class ModeIndex:
    """Spherical vector-wave label (tau, l, m) with a canonical linear index.

    The linear index n = 2*(l*(l+1) + m - 1) + tau is one-based and
    enumerates exactly 2*L*(L+2) modes with l <= L.
    """

    tau: int
    l: int
    m: int

    def __post_init__(self):
        if self.tau not in (1, 2):
            raise InvalidArgumentError(f"tau must be 1 or 2, got {self.tau}")
        if self.l < 1:
            raise InvalidArgumentError(f"l must be >= 1, got {self.l}")
        if abs(self.m) > self.l:
            raise InvalidArgumentError(f"|m| must be <= l, got m={self.m}, l={self.l}")

    @property
    def n(self) -> int:
        return 2 * (self.l * (self.l + 1) + self.m - 1) + self.tau

    @classmethod
    def from_linear(cls, n: int) -> "ModeIndex":
        if n < 1:
            raise InvalidArgumentError(f"linear index must be >= 1, got {n}")
        tau = 2 - n % 2
        q = (n - tau) // 2 + 1
        l = int(np.floor(np.sqrt(q)))
        m = q - l * (l + 1)
        if abs(m) > l:
            l += 1
            m = q - l * (l + 1)
        return cls(tau=tau, l=l, m=m)


def mode_count(L: int) -> int:
    """Number of vector spherical modes with degree l <= L."""
    if L < 1:
        raise InvalidArgumentError(f"L must be >= 1, got {L}")
    return 2 * L * (L + 2)


def mode_list(L: int) -> list[ModeIndex]:
    """All modes with l <= L in canonical linear order."""
    if L < 1:
        raise InvalidArgumentError(f"L must be >= 1, got {L}")
    return [
        ModeIndex(tau, l, m)
        for l in range(1, L + 1)
        for m in range(-l, l + 1)
        for tau in (1, 2)
    ]


def default_l_max(ka: float) -> int:
    """Default truncation degree: ceil(ka) + 10 + ceil(3*ka^(1/3)).

    The ka term follows the L ~ ka cutoff of radiating spherical waves;
    the remainder is a buffer covering the transition region.
    """
    if ka <= 0:
        raise InvalidArgumentError(f"ka must be > 0, got {ka}")
    return int(np.ceil(ka)) + 10 + int(np.ceil(3.0 * ka ** (1.0 / 3.0)))


class LossKind(enum.Enum):
    SURFACE_RESISTIVITY = "surface"
    VOLUME_RESISTIVITY = "volume"


@dataclass(frozen=True)
class LossModel:
    """Material loss, stored normalized to the free-space impedance.

    For surfaces the value is R_s/eta0, for volumes k*rho_r/eta0.
    """

    kind: LossKind
    value_normalized: float

    def __post_init__(self):
        if not self.value_normalized > 0:
            raise InvalidArgumentError(
                f"normalized loss must be > 0, got {self.value_normalized}"
            )

    @classmethod
    def surface(cls, rs_over_eta0: float) -> "LossModel":
        return cls(LossKind.SURFACE_RESISTIVITY, rs_over_eta0)

    @classmethod
    def volume(cls, krho_over_eta0: float) -> "LossModel":
        return cls(LossKind.VOLUME_RESISTIVITY, krho_over_eta0)


class Provenance(enum.Enum):
    ANALYTIC_SHELL = "analytic-shell"
    ANALYTIC_BALL = "analytic-ball"
    DISCRETIZED = "discretized"
    INGESTED = "ingested"


@dataclass
class RadiationSpectrum:
    """Radiation-mode eigenvalues rho_n sorted descending, with metadata."""

    eigenvalues: np.ndarray
    ka: float | None
    wavelength: float | None
    provenance: Provenance
    modes: list[ModeIndex] | None = field(default=None, repr=False)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1:
            raise InvalidArgumentError("eigenvalues must be a 1-d array")
        if np.any(ev < 0):
            raise InvalidArgumentError("eigenvalues must be non-negative")
        if np.any(np.diff(ev) > 0):
            raise InvalidArgumentError("eigenvalues must be sorted descending")
        self.eigenvalues = ev

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def efficiencies(self) -> np.ndarray:
        """Mode efficiencies nu_n = rho_n / (1 + rho_n)."""
        rho = self.eigenvalues
        return rho / (1.0 + rho)


def radial_function(tau: int, l: int, x):
    """Regular radial function R^(1)_{tau,l}(x).

    tau=1 is the spherical Bessel function j_l(x); tau=2 is
    (d/dx)[x j_l(x)] / x = j_l'(x) + j_l(x)/x.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidArgumentError("x must be > 0")
    if np.any(np.asarray(l) < 0):
        raise InvalidArgumentError("l must be >= 0")
    if tau == 1:
        return spherical_jn(l, x)
    if tau == 2:
        return spherical_jn(l, x, derivative=True) + spherical_jn(l, x) / x
    raise InvalidArgumentError(f"tau must be 1 or 2, got {tau}")


def _spectrum_per_mode(ka: float, rho_tau_l, L_max: int, provenance: Provenance):
    """Expand per-(tau,l) eigenvalues over m-degeneracy and sort descending."""
    modes = mode_list(L_max)
    values = np.array([rho_tau_l[(mi.tau, mi.l)] for mi in modes])
    order = np.argsort(-values, kind="stable")
    return RadiationSpectrum(
        eigenvalues=values[order],
        ka=ka,
        wavelength=2.0 * np.pi / ka if ka else None,
        provenance=provenance,
        modes=[modes[i] for i in order],
    )


def shell_spectrum(ka: float, loss: LossModel, L_max: int | None = None) -> RadiationSpectrum:
    """Closed-form radiation-mode spectrum of a spherical shell.

    rho_{tau,l} = (ka)^2 / (R_s/eta0) * R^(1)_{tau,l}(ka)^2, independent
    of the azimuthal order m (degeneracy 2l+1).
    """
    if ka <= 0:
        raise InvalidArgumentError(f"ka must be > 0, got {ka}")
    if loss.kind is not LossKind.SURFACE_RESISTIVITY:
        raise KindMismatchError("shell_spectrum requires a surface-resistivity loss")
    if L_max is None:
        L_max = default_l_max(ka)
    if L_max < 1:
        raise InvalidArgumentError(f"L_max must be >= 1, got {L_max}")
    ell = np.arange(1, L_max + 1)
    scale = ka**2 / loss.value_normalized
    r1 = radial_function(1, ell, ka)
    r2 = radial_function(2, ell, ka)
    rho = {}
    for i, l in enumerate(ell):
        rho[(1, int(l))] = scale * r1[i] ** 2
        rho[(2, int(l))] = scale * r2[i] ** 2
    return _spectrum_per_mode(ka, rho, L_max, Provenance.ANALYTIC_SHELL)


def ball_spectrum(ka: float, loss: LossModel, L_max: int | None = None) -> RadiationSpectrum:
    """Closed-form radiation-mode spectrum of a homogeneous spherical ball.

    rho_{tau,l} = (ka)^3 / (2 k rho_r/eta0) * (j_l^2 - j_{l-1} j_{l+1}
    + (2/ka) j_l R^(1)_{2,l} delta_{tau,2}), radial functions at ka.
    """
    if ka <= 0:
        raise InvalidArgumentError(f"ka must be > 0, got {ka}")
    if loss.kind is not LossKind.VOLUME_RESISTIVITY:
        raise KindMismatchError("ball_spectrum requires a volume-resistivity loss")
    if L_max is None:
        L_max = default_l_max(ka)
    if L_max < 1:
        raise InvalidArgumentError(f"L_max must be >= 1, got {L_max}")
    j = spherical_jn(np.arange(0, L_max + 2), ka)
    scale = ka**3 / (2.0 * loss.value_normalized)
    rho = {}
    for l in range(1, L_max + 1):
        base = j[l] ** 2 - j[l - 1] * j[l + 1]
        r2 = radial_function(2, l, ka)
        rho[(1, l)] = scale * base
        rho[(2, l)] = scale * (base + (2.0 / ka) * j[l] * r2)
    return _spectrum_per_mode(ka, rho, L_max, Provenance.ANALYTIC_BALL)


def _legendre_norm(L: int, x: float):
    """Orthonormalized associated Legendre values and theta-derivatives.

    Returns (P, dPdtheta) arrays of shape (L+1, L+1) indexed [m, l],
    normalized so that int |Y_lm|^2 dOmega = 1 together with the
    e^{i m phi}/sqrt(2 pi) azimuthal factor.
    """
    p, dp = _lpmn(L, x)
    ell = np.arange(L + 1)
    mm = np.arange(L + 1)[:, None]
    logn = 0.5 * (
        np.log(2 * ell + 1.0)
        - np.log(2.0)
        + gammaln(ell - mm + 1.0)
        - gammaln(ell + mm + 1.0)
    )
    with np.errstate(invalid="ignore"):
        norm = np.where(mm <= ell, np.exp(logn), 0.0)
    sin_t = np.sqrt(max(1.0 - x * x, 0.0))
    return p * norm, -sin_t * dp * norm


def _clamp_theta(theta: float) -> float:
    return float(np.clip(theta, _POLE_TOL, np.pi - _POLE_TOL))


def vector_harmonics(L: int, direction) -> np.ndarray:
    """Orthonormal vector spherical harmonics Y_n for all modes l <= L.

    Returns a complex array of shape (2*L*(L+2), 3) with Cartesian
    components, rows in canonical linear mode order.  tau=1 rows carry
    the curl-type harmonic (no radial component when combined with
    scalar Y it stays tangential), tau=2 the gradient-type harmonic.
    """
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,) or abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise InvalidArgumentError("direction must be a unit 3-vector")
    theta = _clamp_theta(np.arccos(np.clip(d[2], -1.0, 1.0)))
    phi = float(np.arctan2(d[1], d[0]))
    x, sin_t = np.cos(theta), np.sin(theta)

    pn, dpn = _legendre_norm(L, x)

    # Local spherical unit vectors in Cartesian components.
    e_theta = np.array([x * np.cos(phi), x * np.sin(phi), -sin_t])
    e_phi = np.array([-np.sin(phi), np.cos(phi), 0.0])

    out = np.zeros((mode_count(L), 3), dtype=complex)
    inv_sqrt2pi = 1.0 / np.sqrt(2.0 * np.pi)
    for l in range(1, L + 1):
        fac = 1.0 / np.sqrt(l * (l + 1.0))
        for m in range(-l, l + 1):
            am = abs(m)
            azim = np.exp(1j * m * phi) * inv_sqrt2pi
            sign = (-1.0) ** m if m < 0 else 1.0
            y = sign * pn[am, l] * azim
            dy = sign * dpn[am, l] * azim
            my_over_sin = 1j * m * y / sin_t
            # tau=2: gradient type; tau=1: curl type.
            b = fac * (dy * e_theta + my_over_sin * e_phi)
            c = fac * (my_over_sin * e_theta - dy * e_phi)
            base = 2 * (l * (l + 1) + m - 1)
            out[base] = c       # tau=1 at linear index base+1 (0-based base)
            out[base + 1] = b   # tau=2
    return out


def plane_wave_coefficients(direction, polarization, L_max: int) -> np.ndarray:
    """Spherical-wave expansion coefficients of a unit plane wave.

    a_n = 4*pi * i^(tau-1-l) * e_hat . Y_n(k_hat) for all modes with
    l <= L_max, in canonical linear order.
    """
    d = np.asarray(direction, dtype=float)
    e = np.asarray(polarization, dtype=float)
    if abs(np.linalg.norm(d) - 1.0) > 1e-9 or abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise InvalidArgumentError("direction and polarization must be unit vectors")
    if abs(np.dot(d, e)) > 1e-9:
        raise InvalidArgumentError("polarization must be orthogonal to direction")
    harm = vector_harmonics(L_max, d)
    return 4.0 * np.pi * _plane_wave_phases(L_max) * (harm @ e)


_PHASE_CACHE: dict[int, np.ndarray] = {}


def _plane_wave_phases(L: int) -> np.ndarray:
    """Cached i^(tau-1-l) factors in canonical linear order."""
    ph = _PHASE_CACHE.get(L)
    if ph is None:
        ph = np.empty(mode_count(L), dtype=complex)
        for l in range(1, L + 1):
            for m in range(-l, l + 1):
                base = 2 * (l * (l + 1) + m - 1)
                ph[base] = 1j ** (-l)
                ph[base + 1] = 1j ** (1 - l)
        _PHASE_CACHE[L] = ph
    return ph


def _regular_waves_at_point(L: int, k: float, point) -> np.ndarray:
    """Regular vector spherical waves v_n(k r) at one point, Cartesian."""
    r = np.asarray(point, dtype=float)
    rn = np.linalg.norm(r)
    x = max(k * rn, 1e-12)
    rhat = r / rn if rn > 0 else np.array([0.0, 0.0, 1.0])
    theta = _clamp_theta(np.arccos(np.clip(rhat[2], -1.0, 1.0)))
    phi = float(np.arctan2(rhat[1], rhat[0]))

    harm = vector_harmonics(L, rhat)
    ell = np.arange(1, L + 1)
    jl = spherical_jn(ell, x)
    r2 = spherical_jn(ell, x, derivative=True) + spherical_jn(ell, x) / x
    jl_over_x = jl / x

    # Scalar harmonic values for the radial part of tau=2 waves.
    pn, _ = _legendre_norm(L, np.cos(theta))
    inv_sqrt2pi = 1.0 / np.sqrt(2.0 * np.pi)

    out = np.zeros((mode_count(L), 3), dtype=complex)
    for l in range(1, L + 1):
        for m in range(-l, l + 1):
            am = abs(m)
            sign = (-1.0) ** m if m < 0 else 1.0
            y = sign * pn[am, l] * np.exp(1j * m * phi) * inv_sqrt2pi
            base = 2 * (l * (l + 1) + m - 1)
            out[base] = jl[l - 1] * harm[base]
            out[base + 1] = (
                r2[l - 1] * harm[base + 1]
                + np.sqrt(l * (l + 1.0)) * jl_over_x[l - 1] * y * rhat
            )
    return out


def regular_wave_matrix(points, tangents, k: float, L_max: int) -> np.ndarray:
    """Projection of regular spherical waves onto point-dipole directions.

    Row per mode (l <= L_max), two columns per point (one per tangent).
    Entries are k*sqrt(eta0) * v_n(k r_i) . t_hat, a scale chosen so
    that area-weighted products U^H U reproduce the closed-form shell
    spectra relative to a surface-resistivity loss matrix.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] != 3:
        raise InvalidArgumentError("points must be a non-empty (N, 3) array")
    tg = np.asarray(tangents, dtype=float)
    if tg.shape != (pts.shape[0], 2, 3):
        raise InvalidArgumentError("tangents must have shape (N, 2, 3)")
    if k <= 0:
        raise InvalidArgumentError(f"k must be > 0, got {k}")
    n_modes = mode_count(L_max)
    u = np.zeros((n_modes, 2 * pts.shape[0]), dtype=complex)
    scale = k * np.sqrt(ETA0)
    for i, (p, t) in enumerate(zip(pts, tg)):
        waves = _regular_waves_at_point(L_max, k, p)
        u[:, 2 * i] = scale * (waves @ t[0])
        u[:, 2 * i + 1] = scale * (waves @ t[1])
    return u
