"""Triangle-mesh geometry: areas, shadow areas and NDoF estimators.

Shadow areas are computed by orthographic rasterization of the mesh
silhouette onto a pixel grid, counting each covered pixel once.  This is
correct for non-convex bodies where rays cross the boundary more than
twice and an analytic |cos| projection formula would over-count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import cv2
import numpy as np

from .errors import InvalidArgumentError

_DEGEN_TOL = 1e-12
_SHIFT = 4  # subpixel bits for the rasterizer


@dataclass
class TriangleMesh:
    """Triangle surface with vertices in length units.

    The circumradius is taken about the origin; shape generators place
    the circumscribing sphere's center there.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    closed: bool | None = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        t = np.asarray(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 3:
            raise InvalidArgumentError("vertices must be an (n, 3) array with n >= 3")
        if t.ndim != 2 or t.shape[1] != 3 or t.shape[0] < 1:
            raise InvalidArgumentError("triangles must be a non-empty (m, 3) array")
        if t.min() < 0 or t.max() >= v.shape[0]:
            raise InvalidArgumentError("triangle indices out of range")
        self.vertices = v
        self.triangles = t
        a = self.circumradius
        if np.any(self.triangle_areas() <= _DEGEN_TOL * a**2):
            raise InvalidArgumentError("mesh contains degenerate triangles")

    @property
    def circumradius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def corners(self) -> np.ndarray:
        """Vertex positions per triangle, shape (m, 3, 3)."""
        return self.vertices[self.triangles]

    def triangle_areas(self) -> np.ndarray:
        c = self.corners()
        n = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
        return 0.5 * np.linalg.norm(n, axis=1)

    def face_normals(self) -> np.ndarray:
        c = self.corners()
        n = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def is_closed(self) -> bool:
        """True when every edge is shared by exactly two triangles."""
        if self.closed is None:
            t = self.triangles
            edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
            edges = np.sort(edges, axis=1)
            _, counts = np.unique(edges, axis=0, return_counts=True)
            self.closed = bool(np.all(counts == 2))
        return self.closed


@dataclass
class DirectionQuadrature:
    """Unit directions with positive weights summing to one."""

    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if d.ndim != 2 or d.shape[1] != 3 or d.shape[0] != w.shape[0]:
            raise InvalidArgumentError("directions (n, 3) and weights (n,) required")
        if np.any(np.abs(np.linalg.norm(d, axis=1) - 1.0) > 1e-12):
            raise InvalidArgumentError("directions must be unit vectors")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidArgumentError("weights must be positive and sum to 1")
        self.directions = d
        self.weights = w

    @classmethod
    def fibonacci(cls, n: int = 590) -> "DirectionQuadrature":
        """Deterministic Fibonacci-sphere covering with equal weights."""
        if n < 1:
            raise InvalidArgumentError("n must be >= 1")
        i = np.arange(n)
        z = (2.0 * i + 1.0) / n - 1.0
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        phi = np.pi * (3.0 - np.sqrt(5.0)) * i
        d = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
        return cls(d, np.full(n, 1.0 / n))

    @classmethod
    def polar_sweep(cls, n_theta: int = 91) -> "DirectionQuadrature":
        """Directions in the phi=0 half-plane with sin(theta) weights.

        Intended for bodies of revolution, whose shadow area is
        independent of the azimuth.
        """
        if n_theta < 2:
            raise InvalidArgumentError("n_theta must be >= 2")
        theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
        d = np.column_stack(
            [np.sin(theta), np.zeros(n_theta), np.cos(theta)]
        )
        w = np.sin(theta)
        return cls(d, w / w.sum())

    @property
    def polar_angles(self) -> np.ndarray:
        return np.arccos(np.clip(self.directions[:, 2], -1.0, 1.0))


def surface_area(mesh: TriangleMesh) -> float:
    """Total triangle area (single-sided)."""
    return float(np.sum(mesh.triangle_areas()))


def _projection_frame(direction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d = np.asarray(direction, dtype=float)
    nd = np.linalg.norm(d)
    if abs(nd - 1.0) > 1e-9:
        raise InvalidArgumentError("direction must be a unit vector")
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(d, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return d, e1, e2


def shadow_area(mesh: TriangleMesh, direction, resolution: int = 512) -> float:
    """Silhouette area of the mesh projected orthogonally to ``direction``.

    ``resolution`` sets the pixel size to circumradius / resolution;
    covered pixels are counted once (rasterized union).
    """
    if resolution < 1:
        raise InvalidArgumentError("resolution must be >= 1")
    d, e1, e2 = _projection_frame(direction)
    tris = mesh.triangles
    if mesh.is_closed():
        # Front faces alone cover the silhouette of a closed surface.
        keep = mesh.face_normals() @ d > 1e-12
        tris = tris[keep]
        if tris.shape[0] == 0:
            return 0.0
    uv = np.column_stack([mesh.vertices @ e1, mesh.vertices @ e2])
    px = mesh.circumradius / resolution
    lo = uv.min(axis=0) - px
    hi = uv.max(axis=0) + px
    shape = np.maximum(np.ceil((hi - lo) / px).astype(int) + 1, 1)
    img = np.zeros((shape[1], shape[0]), dtype=np.uint8)
    coords = np.rint((uv - lo) / px * (1 << _SHIFT)).astype(np.int32)
    polys = coords[tris]
    for poly in polys:
        cv2.fillConvexPoly(img, poly, 1, lineType=cv2.LINE_8, shift=_SHIFT)
    return float(np.count_nonzero(img)) * px * px


@dataclass
class ShadowReport:
    """Directional shadow areas with their quadrature average."""

    average: float
    total: float  # 4 pi <A_s>
    per_direction: np.ndarray
    quadrature: DirectionQuadrature


def average_shadow_area(
    mesh: TriangleMesh,
    quad: DirectionQuadrature | None = None,
    resolution: int = 512,
    workers: int | None = None,
) -> ShadowReport:
    """Quadrature average of the directional shadow area.

    Directional evaluations are independent and run on a thread pool.
    """
    if quad is None:
        quad = DirectionQuadrature.fibonacci()
    if workers is None:
        workers = min(os.cpu_count() or 1, 8)
    mesh.is_closed()  # resolve once before sharing across threads
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            areas = np.array(
                list(pool.map(lambda d: shadow_area(mesh, d, resolution), quad.directions))
            )
    else:
        areas = np.array([shadow_area(mesh, d, resolution) for d in quad.directions])
    avg = float(np.dot(quad.weights, areas))
    return ShadowReport(
        average=avg, total=4.0 * np.pi * avg, per_direction=areas, quadrature=quad
    )


def convexity_gap(
    mesh: TriangleMesh,
    quad: DirectionQuadrature | None = None,
    resolution: int = 512,
) -> float:
    """4 <A_s> / A; equals 1 for convex bodies and is smaller otherwise."""
    report = average_shadow_area(mesh, quad, resolution)
    return 4.0 * report.average / surface_area(mesh)


def weyl_estimate(dimension: int, measure: float, wavelength: float, em: bool = False) -> float:
    """Asymptotic eigenvalue-count estimate for a line or an aperture.

    dimension 1: 2 l / lambda.  dimension 2: pi A / lambda^2 for scalar
    fields, doubled to 2 pi A / lambda^2 when the two electromagnetic
    polarizations contribute.
    """
    if measure <= 0:
        raise InvalidArgumentError("measure must be > 0")
    if wavelength <= 0:
        raise InvalidArgumentError("wavelength must be > 0")
    if dimension == 1:
        return 2.0 * measure / wavelength
    if dimension == 2:
        scalar = np.pi * measure / wavelength**2
        return 2.0 * scalar if em else scalar
    raise InvalidArgumentError(f"unsupported dimension {dimension}")


def asymptotic_ndof(avg_shadow: float, wavelength: float) -> float:
    """Shadow-area NDoF estimate 8 pi <A_s> / lambda^2."""
    if avg_shadow <= 0:
        raise InvalidArgumentError("avg_shadow must be > 0")
    if wavelength <= 0:
        raise InvalidArgumentError("wavelength must be > 0")
    return 8.0 * np.pi * avg_shadow / wavelength**2


def oblate_spheroid_avg_shadow(a: float, xi: float) -> float:
    """Average shadow area of an oblate spheroid with aspect ratio xi.

    pi a^2 / 2 + (pi a^2 xi^2 / (4 e)) ln((1+e)/(1-e)), e^2 = 1 - xi^2;
    the xi -> 0 limit is pi a^2 / 2 (flat disc).
    """
    if a <= 0:
        raise InvalidArgumentError("a must be > 0")
    if not 0.0 <= xi < 1.0:
        raise InvalidArgumentError("xi must be in [0, 1); use the sphere formula at 1")
    if xi == 0.0:
        return np.pi * a**2 / 2.0
    e = np.sqrt(1.0 - xi**2)
    return np.pi * a**2 / 2.0 + np.pi * a**2 * xi**2 / (4.0 * e) * np.log(
        (1.0 + e) / (1.0 - e)
    )


def convex_shadow_area(mesh: TriangleMesh, direction) -> float:
    """Analytic projection half-sum |n . d| A_t; valid for convex meshes."""
    d, _, _ = _projection_frame(direction)
    return 0.5 * float(np.sum(np.abs(mesh.face_normals() @ d) * mesh.triangle_areas()))
