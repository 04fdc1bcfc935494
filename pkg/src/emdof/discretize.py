"""Point-dipole surface discretization and matrix file exchange.

A mesh is refined by uniform triangle 4-splits until it carries at least
``density`` sample points per squared wavelength of surface.  Each
refined triangle contributes its centroid, its area as quadrature
weight, and an orthonormal tangent pair; currents are expanded in the
two tangential point dipoles per sample.  In this basis the material
loss matrix is exactly diagonal and the radiation matrix is the Gram
matrix of the regular spherical waves sampled at the points.

Matrix pairs are exchanged as NumPy ``.npz`` archives with two complex
row-major arrays under the keys ``r0`` (radiation matrix) and ``rrho``
(loss matrix); square, equal shape, Hermitian.  The layout is stable
and self-describing (dimensions are carried by the arrays themselves).
"""

from __future__ import annotations

import heapq
import zipfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, KindMismatchError, MalformedFileError
from .geometry import DirectionQuadrature, TriangleMesh, surface_area
from .modes import ResistancePair
from .sphwave import ETA0, LossKind, LossModel, mode_count, regular_wave_matrix

DEFAULT_DENSITY = 16.0
MIN_DENSITY = 8.0


@dataclass
class Discretization:
    """Sampled surface: points, area weights, tangent pairs, loss and k."""

    points: np.ndarray      # (N, 3)
    weights: np.ndarray     # (N,)
    tangents: np.ndarray    # (N, 2, 3)
    loss: LossModel
    k: float
    under_resolved: bool = False       # density below the sampling floor
    approximate_volume: bool = field(default=False, repr=False)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        t = np.asarray(self.tangents, dtype=float)
        n = p.shape[0]
        if p.ndim != 2 or n == 0 or p.shape[1] != 3:
            raise InvalidArgumentError("points must be a non-empty (N, 3) array")
        if w.shape != (n,) or np.any(w <= 0):
            raise InvalidArgumentError("weights must be (N,) and positive")
        if t.shape != (n, 2, 3):
            raise InvalidArgumentError("tangents must have shape (N, 2, 3)")
        if self.k <= 0:
            raise InvalidArgumentError(f"k must be > 0, got {self.k}")
        self.points, self.weights, self.tangents = p, w, t

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def density(self) -> float:
        """Sample points per squared wavelength of surface."""
        wavelength = 2.0 * np.pi / self.k
        return self.size * wavelength**2 / float(self.weights.sum())


def _refined_corners(mesh: TriangleMesh, target: int) -> np.ndarray:
    """Corner triples of the mesh, largest triangles 4-split to reach target.

    Splitting acts per triangle (sample points need no conforming mesh),
    so the count lands within three triangles of the target.
    """
    corners = list(mesh.corners())
    areas = mesh.triangle_areas()
    heap = [(-a, i) for i, a in enumerate(areas)]
    heapq.heapify(heap)
    while len(corners) < target:
        neg_a, i = heapq.heappop(heap)
        p0, p1, p2 = corners[i]
        m01, m12, m20 = 0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)
        quarters = [
            np.array([p0, m01, m20]),
            np.array([m01, p1, m12]),
            np.array([m20, m12, p2]),
            np.array([m01, m12, m20]),
        ]
        corners[i] = quarters[0]
        heapq.heappush(heap, (neg_a / 4.0, i))
        for q in quarters[1:]:
            heapq.heappush(heap, (neg_a / 4.0, len(corners)))
            corners.append(q)
    return np.array(corners)


def _tangent_pairs(corners: np.ndarray) -> np.ndarray:
    """Orthonormal in-plane tangent pair per triangle, shape (m, 2, 3)."""
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    t1 = e1 / np.linalg.norm(e1, axis=1, keepdims=True)
    t2 = e2 - np.einsum("ij,ij->i", e2, t1)[:, None] * t1
    t2 /= np.linalg.norm(t2, axis=1, keepdims=True)
    return np.stack([t1, t2], axis=1)


def sample_mesh(
    mesh: TriangleMesh,
    k: float,
    loss: LossModel,
    density: float = DEFAULT_DENSITY,
) -> Discretization:
    """Sample a mesh into tangential point dipoles at refined centroids.

    The largest triangles are 4-split until the centroid count reaches
    ``density`` points per squared wavelength.  A requested density
    below the floor of 8 is honoured but flagged via ``under_resolved``.
    """
    if k <= 0:
        raise InvalidArgumentError(f"k must be > 0, got {k}")
    if density <= 0:
        raise InvalidArgumentError(f"density must be > 0, got {density}")
    wavelength = 2.0 * np.pi / k
    area = surface_area(mesh)
    target = int(np.ceil(density * area / wavelength**2))
    corners = _refined_corners(mesh, target)
    points = corners.mean(axis=1)
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    weights = 0.5 * np.linalg.norm(cross, axis=1)
    keep = weights > 0
    return Discretization(
        points=points[keep],
        weights=weights[keep],
        tangents=_tangent_pairs(corners[keep]),
        loss=loss,
        k=k,
        under_resolved=density < MIN_DENSITY,
    )


def sphere_discretization(
    a: float,
    k: float,
    loss: LossModel,
    density: float = DEFAULT_DENSITY,
) -> Discretization:
    """Uniform-weight point dipoles on the exact sphere of radius ``a``.

    Fibonacci-distributed points avoid the faceting bias of a triangle
    mesh, so the spectrum converges to the analytic shell values much
    faster than centroid sampling of a polyhedral sphere.
    """
    if a <= 0:
        raise InvalidArgumentError(f"a must be > 0, got {a}")
    if k <= 0:
        raise InvalidArgumentError(f"k must be > 0, got {k}")
    if density <= 0:
        raise InvalidArgumentError(f"density must be > 0, got {density}")
    wavelength = 2.0 * np.pi / k
    area = 4.0 * np.pi * a**2
    n = max(int(np.ceil(density * area / wavelength**2)), 4)
    normals = DirectionQuadrature.fibonacci(n).directions
    z = np.array([0.0, 0.0, 1.0])
    phi_hat = np.cross(np.broadcast_to(z, normals.shape), normals)
    norms = np.linalg.norm(phi_hat, axis=1, keepdims=True)
    polar = norms[:, 0] < 1e-12
    phi_hat[polar] = [1.0, 0.0, 0.0]
    norms[polar] = 1.0
    phi_hat /= norms
    theta_hat = np.cross(phi_hat, normals)
    return Discretization(
        points=a * normals,
        weights=np.full(n, area / n),
        tangents=np.stack([theta_hat, phi_hat], axis=1),
        loss=loss,
        k=k,
        under_resolved=density < MIN_DENSITY,
    )


def onion_discretization(
    mesh: TriangleMesh,
    k: float,
    loss: LossModel,
    density: float = DEFAULT_DENSITY,
    layers: int = 3,
) -> Discretization:
    """Approximate a volumetric body by concentric scaled surface layers.

    Each layer is the input surface scaled toward the origin; weights
    are split evenly across layers so the total weight stays at the
    surface area.  The result is flagged ``approximate_volume``.
    """
    if layers < 1:
        raise InvalidArgumentError(f"layers must be >= 1, got {layers}")
    base = sample_mesh(mesh, k, loss, density)
    scales = 1.0 - np.arange(layers) / max(layers, 2)
    pts = np.concatenate([s * base.points for s in scales])
    w = np.concatenate([base.weights / layers for _ in scales])
    tg = np.concatenate([base.tangents for _ in scales])
    return Discretization(
        points=pts,
        weights=w,
        tangents=tg,
        loss=loss,
        k=k,
        under_resolved=base.under_resolved,
        approximate_volume=True,
    )


def gram_matrix(disc: Discretization) -> np.ndarray:
    """Diagonal current-norm metric: the area weight per tangent dipole."""
    return np.diag(np.repeat(disc.weights, 2))


def loss_matrix(disc: Discretization) -> np.ndarray:
    """Diagonal material-loss matrix R_s * weight per tangent dipole (Ohm)."""
    if disc.loss.kind is not LossKind.SURFACE_RESISTIVITY:
        raise KindMismatchError(
            "loss_matrix requires a surface-resistivity loss model"
        )
    rs = disc.loss.value_normalized * ETA0
    return np.diag(np.repeat(rs * disc.weights, 2))


def projection_matrix(
    disc: Discretization, L_max: int, workers: int | None = None
) -> np.ndarray:
    """Area-weighted spherical-wave sampling matrix U.

    One row per mode with l <= L_max, one column per tangent dipole.
    Columns carry the full area weight (current coefficients are point
    samples of the current density), so that R0 = U^H U pairs with the
    diagonal loss matrix R_s * weight.
    """
    if L_max < 1:
        raise InvalidArgumentError(f"L_max must be >= 1, got {L_max}")
    pts, tg = disc.points, disc.tangents
    if workers is None or workers > 1:
        import os

        workers = workers or min(os.cpu_count() or 1, 8)
        chunks = np.array_split(np.arange(disc.size), workers)
        chunks = [c for c in chunks if c.size]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(
                pool.map(
                    lambda c: regular_wave_matrix(pts[c], tg[c], disc.k, L_max),
                    chunks,
                )
            )
        u = np.empty((mode_count(L_max), 2 * disc.size), dtype=complex)
        for c, part in zip(chunks, parts):
            u[:, 2 * c[0] : 2 * (c[-1] + 1)] = part
    else:
        u = regular_wave_matrix(pts, tg, disc.k, L_max)
    return u * np.repeat(disc.weights, 2)


def radiation_matrix(
    disc: Discretization, L_max: int, workers: int | None = None
) -> np.ndarray:
    """Radiation resistance matrix R0 = U^H U; PSD of rank <= 2L(L+2)."""
    u = projection_matrix(disc, L_max, workers)
    r0 = u.conj().T @ u
    return 0.5 * (r0 + r0.conj().T)


def resistance_pair(
    disc: Discretization, L_max: int, workers: int | None = None
) -> ResistancePair:
    """Assemble the (R0, Rrho) pair of a sampled surface."""
    return ResistancePair(
        R0=radiation_matrix(disc, L_max, workers), Rrho=loss_matrix(disc)
    )


def write_pair(pair: ResistancePair, path) -> None:
    """Write a matrix pair to the documented .npz container."""
    np.savez(
        path,
        r0=np.ascontiguousarray(pair.R0, dtype=np.complex128),
        rrho=np.ascontiguousarray(pair.Rrho, dtype=np.complex128),
    )


def ingest_pair(path) -> ResistancePair:
    """Read and validate a matrix pair from the .npz container."""
    try:
        with np.load(path) as data:
            if "r0" not in data or "rrho" not in data:
                raise MalformedFileError(
                    f"{path}: matrix container must hold 'r0' and 'rrho' arrays"
                )
            r0 = np.asarray(data["r0"], dtype=np.complex128)
            rrho = np.asarray(data["rrho"], dtype=np.complex128)
    except (OSError, ValueError, zipfile.BadZipFile, EOFError) as exc:
        raise MalformedFileError(f"{path}: unreadable matrix container: {exc}") from exc
    if r0.ndim != 2 or r0.shape[0] != r0.shape[1]:
        raise MalformedFileError(f"{path}: r0 must be square, got shape {r0.shape}")
    if rrho.shape != r0.shape:
        raise MalformedFileError(
            f"{path}: dimension mismatch r0 {r0.shape} vs rrho {rrho.shape}"
        )
    try:
        pair = ResistancePair(R0=r0, Rrho=rrho)
    except InvalidArgumentError as exc:
        raise MalformedFileError(f"{path}: {exc}") from exc
    # Loss matrix must be positive-definite for the generalized eigensolve.
    w = np.linalg.eigvalsh(rrho)
    if w[0] <= 0:
        raise InvalidArgumentError(
            f"{path}: loss matrix is not positive-definite (min eigenvalue {w[0]:g})"
        )
    return pair


def dump_discretization(disc: Discretization, path) -> None:
    """Write the samples as CSV: point, weight, tangent pair per row."""
    header = (
        "x,y,z,weight,t1x,t1y,t1z,t2x,t2y,t2z"
    )
    rows = np.column_stack(
        [
            disc.points,
            disc.weights[:, None],
            disc.tangents[:, 0],
            disc.tangents[:, 1],
        ]
    )
    np.savetxt(path, rows, delimiter=",", header=header, comments="")
