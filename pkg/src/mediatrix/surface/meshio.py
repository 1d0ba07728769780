"""ASCII indexed-face-set import/export (OBJ-compatible subset).

Supported input: `v x y [z]` and `f i j k` records with 1-based indices.
An optional sidecar length table (lines of `u v length`, 0-based canonical
edge ids) overrides the lengths derived from coordinates.
"""
from __future__ import annotations

import numpy as np

from .trisurface import MeshError, TriSurface


def load_obj(path, length_table=None, name=None) -> TriSurface:
    verts = []
    faces = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                coords = [float(x) for x in parts[1:4]]
                if len(coords) == 2:
                    coords.append(0.0)
                verts.append(coords)
            elif parts[0] == "f":
                idx = [int(tok.split("/")[0]) - 1 for tok in parts[1:]]
                if len(idx) != 3:
                    raise MeshError("only triangular faces are supported")
                faces.append(idx)
    if not verts or not faces:
        raise MeshError(f"no mesh data in {path}")
    positions = np.array(verts)
    faces = np.array(faces, dtype=np.int32)

    side_lengths = None
    if length_table is not None:
        table = {}
        with open(length_table) as fh:
            for line in fh:
                parts = line.split()
                if not parts or parts[0].startswith("#"):
                    continue
                u, v, ln = int(parts[0]), int(parts[1]), float(parts[2])
                table[(min(u, v), max(u, v))] = ln
        side_lengths = np.zeros_like(faces, dtype=np.float64)
        for s in range(3):
            for f in range(faces.shape[0]):
                u, v = int(faces[f, s]), int(faces[f, (s + 1) % 3])
                key = (min(u, v), max(u, v))
                if key not in table:
                    raise MeshError(f"edge {key} missing from length table")
                side_lengths[f, s] = table[key]
    return TriSurface.build(
        faces, side_lengths, positions=positions, name=name or str(path)
    )


def save_obj(path, surface: TriSurface):
    if surface.positions is None:
        raise MeshError("surface has no embedding to export")
    p = surface.positions
    if p.shape[1] == 2:
        p = np.hstack([p, np.zeros((p.shape[0], 1))])
    with open(path, "w") as fh:
        for x, y, z in p:
            fh.write(f"v {x:.12g} {y:.12g} {z:.12g}\n")
        for a, b, c in surface.faces + 1:
            fh.write(f"f {a} {b} {c}\n")
