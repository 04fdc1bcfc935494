"""Mesh file formats.

Native ASCII triangle-list format::

    <n_vertices> <n_triangles>
    x y z          (n_vertices lines, decimal numbers)
    i j k          (n_triangles lines, 0-based vertex indices)

Lines starting with '#' are skipped.  Files ending in .obj are parsed as
the common text polygon format ("v"/"f" records, 1-based indices; faces
with more than three vertices are fan-triangulated).
"""

from __future__ import annotations

import os

import numpy as np

from .errors import MalformedFileError
from .geometry import TriangleMesh


def _content_lines(path) -> list[str]:
    with open(path) as fh:
        return [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]


def load_mesh(path) -> TriangleMesh:
    """Load a mesh, dispatching on the .obj extension."""
    if str(path).lower().endswith(".obj"):
        return load_obj(path)
    return load_tri(path)


def load_tri(path) -> TriangleMesh:
    lines = _content_lines(path)
    if not lines:
        raise MalformedFileError(f"{path}: empty mesh file")
    try:
        n_v, n_t = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise MalformedFileError(f"{path}: bad header line {lines[0]!r}") from exc
    if len(lines) != 1 + n_v + n_t:
        raise MalformedFileError(
            f"{path}: expected {1 + n_v + n_t} lines, found {len(lines)}"
        )
    try:
        verts = np.array([[float(t) for t in ln.split()] for ln in lines[1 : 1 + n_v]])
        tris = np.array(
            [[int(t) for t in ln.split()] for ln in lines[1 + n_v :]], dtype=np.int64
        )
    except ValueError as exc:
        raise MalformedFileError(f"{path}: unparsable vertex or face line") from exc
    if verts.shape != (n_v, 3) or tris.shape != (n_t, 3):
        raise MalformedFileError(f"{path}: vertex or face record of wrong arity")
    try:
        return TriangleMesh(verts, tris)
    except ValueError as exc:
        raise MalformedFileError(f"{path}: {exc}") from exc


def save_tri(mesh: TriangleMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{mesh.vertices.shape[0]} {mesh.triangles.shape[0]}\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"{t[0]} {t[1]} {t[2]}\n")


def load_obj(path) -> TriangleMesh:
    verts: list[list[float]] = []
    tris: list[tuple[int, int, int]] = []
    for ln in _content_lines(path):
        tag, *rest = ln.split()
        if tag == "v":
            if len(rest) < 3:
                raise MalformedFileError(f"{path}: short vertex record {ln!r}")
            verts.append([float(x) for x in rest[:3]])
        elif tag == "f":
            idx = [int(tok.split("/")[0]) - 1 for tok in rest]
            if len(idx) < 3:
                raise MalformedFileError(f"{path}: face with fewer than 3 vertices")
            for i in range(1, len(idx) - 1):
                tris.append((idx[0], idx[i], idx[i + 1]))
    if not verts or not tris:
        raise MalformedFileError(f"{path}: no usable v/f records")
    try:
        return TriangleMesh(np.array(verts), np.array(tris, dtype=np.int64))
    except ValueError as exc:
        raise MalformedFileError(f"{path}: {exc}") from exc
