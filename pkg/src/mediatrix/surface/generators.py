"""Builtin surface generators.

Every generator honors the target edge length h within a factor of two and
returns a TriSurface whose intrinsic lengths come from an exact construction
(planar coordinates, chord lengths on an embedded surface, or an unrolled
cone metric).
"""
from __future__ import annotations

import math

import numpy as np

from .trisurface import MeshError, TriSurface


def _stitch_rings(inner_ids, inner_angles, outer_ids, outer_angles):
    """Triangulate the annulus between two vertex rings ordered by angle.

    Merges the two rings by angle with a two-pointer sweep, producing a
    deterministic strip of well-shaped triangles.  Angles must be ascending
    within [0, 2*pi); both rings are treated as closed.
    """
    n_in, n_out = len(inner_ids), len(outer_ids)
    faces = []
    i = j = 0
    # unroll both rings once around
    while i < n_in or j < n_out:
        next_in = inner_angles[i % n_in] + (2 * math.pi if i >= n_in else 0.0) \
            if n_in else math.inf
        next_out = outer_angles[j % n_out] + (2 * math.pi if j >= n_out else 0.0) \
            if n_out else math.inf
        # advance whichever ring has the smaller next angle; the triangle uses
        # the current pair plus the advanced vertex
        cur_in = inner_ids[i % n_in]
        cur_out = outer_ids[j % n_out]
        if i < n_in and (next_in <= next_out or j >= n_out):
            nxt = inner_ids[(i + 1) % n_in]
            if nxt != cur_in:
                faces.append((cur_out, nxt, cur_in))
            i += 1
        else:
            nxt = outer_ids[(j + 1) % n_out]
            faces.append((cur_out, nxt, cur_in))
            j += 1
    return faces


def _ring_angles(count, offset=0.0):
    return (offset + 2.0 * math.pi * np.arange(count) / count) % (2.0 * math.pi)


def flat_disk(radius: float = 2.0, h: float = 0.05, rings: int | None = None,
              name: str = "flat-disk") -> TriSurface:
    """Flat round disk triangulated by concentric hexagonal rings.

    Vertex count per ring grows linearly (6k at ring k), giving
    near-equilateral triangles of size about radius/rings.  The boundary is
    the outer ring.
    """
    if rings is None:
        rings = max(2, round(radius / h))
    dr = radius / rings
    pts = [(0.0, 0.0)]
    ring_ids = [[0]]
    ring_angles = [np.array([0.0])]
    for k in range(1, rings + 1):
        n = 6 * k
        ang = _ring_angles(n)
        r = k * dr
        ids = list(range(len(pts), len(pts) + n))
        pts.extend(zip(r * np.cos(ang), r * np.sin(ang)))
        ring_ids.append(ids)
        ring_angles.append(ang)
    faces = []
    # central fan
    for j in range(6):
        faces.append((ring_ids[1][j], ring_ids[1][(j + 1) % 6], 0))
    for k in range(1, rings):
        faces.extend(
            _stitch_rings(ring_ids[k], ring_angles[k], ring_ids[k + 1], ring_angles[k + 1])
        )
    positions = np.array(pts)
    return TriSurface.build(np.array(faces), positions=positions, name=name)


def flat_rect(width: float = 1.0, height: float = 1.0, h: float = 0.1,
              name: str = "flat-rect") -> TriSurface:
    """Flat rectangle [0,width] x [0,height] on a right-triangle grid."""
    nx = max(1, round(width / h))
    ny = max(1, round(height / h))
    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    positions = np.stack([gx.ravel(), gy.ravel()], axis=1)

    def vid(i, j):
        return i * (ny + 1) + j

    faces = []
    for i in range(nx):
        for j in range(ny):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v11, v01 = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    return TriSurface.build(np.array(faces), positions=positions, name=name)


def flat_torus(side: float = 1.0, h: float = 0.05, name: str = "flat-torus") -> TriSurface:
    """Flat square torus of the given side, grid split along one diagonal.

    The subdivision count is forced even so that half-period points such as
    (side/2, side/2) land on vertices.
    """
    n = max(4, 2 * round(side / (2.0 * h)))
    positions = np.zeros((n * n, 2))
    step = side / n

    def vid(i, j):
        return (i % n) * n + (j % n)

    for i in range(n):
        for j in range(n):
            positions[vid(i, j)] = (i * step, j * step)
    faces = []
    diag = math.sqrt(2.0) * step
    side_lengths = []
    for i in range(n):
        for j in range(n):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v11, v01 = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((v00, v10, v11))
            side_lengths.append((step, step, diag))
            faces.append((v00, v11, v01))
            side_lengths.append((diag, step, step))
    return TriSurface.build(
        np.array(faces), np.array(side_lengths), positions=positions, name=name
    )


_ICO_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def _icosahedron():
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = np.array([
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ], dtype=np.float64)
    return raw / np.linalg.norm(raw[0]), np.array(_ICO_FACES, dtype=np.int64)


def sphere(radius: float = 1.0, h: float = 0.08, name: str = "sphere") -> TriSurface:
    """Geodesic sphere: subdivided icosahedron projected to the round sphere.

    Vertices come in exact antipodal pairs (the icosahedron is centrally
    symmetric and midpoint subdivision preserves that), which symmetric
    scenes rely on.
    """
    verts, faces = _icosahedron()
    base_edge = 4.0 / math.sqrt(10.0 + 2.0 * math.sqrt(5.0))  # ~1.0515 for r=1
    levels = max(0, math.ceil(math.log2(max(base_edge * radius / h, 1.0))))
    for _ in range(levels):
        verts, faces = _subdivide_sphere(verts, faces)
    positions = verts * radius
    return TriSurface.build(faces.astype(np.int32), positions=positions, name=name)


def _subdivide_sphere(verts, faces):
    nv = verts.shape[0]
    sides = np.stack([faces, np.roll(faces, -1, axis=1)], axis=2).reshape(-1, 2)
    lo, hi = sides.min(axis=1), sides.max(axis=1)
    keys = lo * nv + hi
    uniq, inv = np.unique(keys, return_inverse=True)
    mids = verts[uniq // nv] + verts[uniq % nv]
    mids /= np.linalg.norm(mids, axis=1)[:, None]
    mid_ids = nv + np.arange(uniq.shape[0])
    m = mid_ids[inv].reshape(-1, 3)
    v0, v1, v2 = faces[:, 0], faces[:, 1], faces[:, 2]
    m01, m12, m20 = m[:, 0], m[:, 1], m[:, 2]
    new_faces = np.concatenate([
        np.stack([v0, m01, m20], axis=1),
        np.stack([v1, m12, m01], axis=1),
        np.stack([v2, m20, m12], axis=1),
        np.stack([m01, m12, m20], axis=1),
    ])
    return np.vstack([verts, mids]), new_faces


def antipodal_vertex_pair(s: TriSurface):
    """Return (i, j) with positions[j] ~ -positions[i], maximizing |x|."""
    p = s.positions
    i = int(np.argmax(np.linalg.norm(p, axis=1)))
    j = int(np.argmin(np.linalg.norm(p + p[i], axis=1)))
    return i, j


def cone(total_angle: float = 1.5 * math.pi, slant: float = 1.0, h: float = 0.05,
         name: str = "cone") -> TriSurface:
    """Cone of the given apex angle, built from its exact unrolled metric.

    The surface is the Euclidean cone over a circle of circumference
    total_angle, truncated at slant distance `slant` from the apex.  Edge
    lengths follow the law of cosines on the cone, so the apex cone angle is
    exactly total_angle.  For total_angle < 2*pi a 3D embedding is attached.
    """
    if total_angle <= 0:
        raise MeshError("cone angle must be positive")
    rings = max(2, round(slant / h))
    ds = slant / rings
    ring_ids = [[0]]
    ring_angles = [np.array([0.0])]
    ring_s = [0.0]
    coords = [(0.0, 0.0)]  # (s, phi) intrinsic polar coordinates
    nxt = 1
    for k in range(1, rings + 1):
        s_k = k * ds
        n = max(6, round(total_angle * s_k / ds))
        ang = _ring_angles(n) * (total_angle / (2.0 * math.pi))
        ids = list(range(nxt, nxt + n))
        nxt += n
        coords.extend((s_k, a) for a in ang)
        ring_ids.append(ids)
        ring_angles.append(ang * (2.0 * math.pi / total_angle))
        ring_s.append(s_k)
    faces = [(ring_ids[1][j], ring_ids[1][(j + 1) % len(ring_ids[1])], 0)
             for j in range(len(ring_ids[1]))]
    for k in range(1, rings):
        faces.extend(
            _stitch_rings(ring_ids[k], ring_angles[k], ring_ids[k + 1], ring_angles[k + 1])
        )
    faces = np.array(faces)
    coords = np.array(coords)

    def cone_dist(p, q):
        dphi = np.abs(p[:, 1] - q[:, 1])
        dphi = np.minimum(dphi, total_angle - dphi)
        dphi = np.minimum(dphi, math.pi)
        return np.sqrt(
            p[:, 0] ** 2 + q[:, 0] ** 2 - 2.0 * p[:, 0] * q[:, 0] * np.cos(dphi)
        )

    side_lengths = np.stack(
        [cone_dist(coords[faces[:, s]], coords[faces[:, (s + 1) % 3]]) for s in range(3)],
        axis=1,
    )
    positions = None
    if total_angle < 2.0 * math.pi:
        ratio = total_angle / (2.0 * math.pi)
        rr = coords[:, 0] * ratio
        zz = coords[:, 0] * math.sqrt(max(1.0 - ratio * ratio, 0.0))
        phi3 = coords[:, 1] / ratio
        positions = np.stack([rr * np.cos(phi3), rr * np.sin(phi3), zz], axis=1)
    return TriSurface.build(faces, side_lengths, positions=positions, name=name)


def saddle_fan(total_angle: float = 2.5 * math.pi, legs: int = 12,
               name: str = "saddle-fan") -> TriSurface:
    """Single-vertex fan whose center has the requested total angle.

    A rejection fixture for the validator when total_angle > 2*pi: built
    from isoceles triangles of unit legs with apex angles summing to the
    target.
    """
    apex = total_angle / legs
    base = 2.0 * math.sin(apex / 2.0)
    faces = []
    side_lengths = []
    for j in range(legs):
        faces.append((0, 1 + j, 1 + (j + 1) % legs))
        side_lengths.append((1.0, base, 1.0))
    return TriSurface.build(np.array(faces), np.array(side_lengths), name=name)


def doubled_disk(radius: float = 1.0, h: float = 0.05, name: str = "doubled-disk") -> TriSurface:
    """Double of the flat disk: two flat copies glued along the rim.

    Curvature concentrates along the seam (total 4*pi); centers of the two
    copies sit at intrinsic distance 2*radius.
    """
    from .trisurface import double

    return double(flat_disk(radius=radius, h=h, name=name))


def sqrt_horn(h: float = 0.05, name: str = "sqrt-horn") -> TriSurface:
    """Surface of revolution of z = sqrt(x), 0 <= x <= 1, about the z axis.

    Gaussian curvature diverges to -infinity toward the apex, so cone angles
    exceed 2*pi near the axis and the surface fails the curvature-bounded-
    below validation at fine resolution.  The apex is truncated at radius
    h/10 and capped with a fan, which concentrates the pathological angle.
    """
    r0 = h / 10.0
    # meridian arc-length parametrization of (r, z=sqrt(r))
    radii = [r0]
    r = r0
    while r < 1.0:
        dr = h / math.sqrt(1.0 + 1.0 / (4.0 * r))
        r = min(1.0, r + dr)
        radii.append(r)
    ring_ids = [[0]]
    ring_angles = [np.array([0.0])]
    pts3 = [(0.0, 0.0, math.sqrt(r0))]
    nxt = 1
    for r in radii:
        n = max(6, round(2.0 * math.pi * r / h))
        ang = _ring_angles(n)
        ids = list(range(nxt, nxt + n))
        nxt += n
        z = math.sqrt(r)
        pts3.extend((r * math.cos(a), r * math.sin(a), z) for a in ang)
        ring_ids.append(ids)
        ring_angles.append(ang)
    faces = [(ring_ids[1][j], ring_ids[1][(j + 1) % len(ring_ids[1])], 0)
             for j in range(len(ring_ids[1]))]
    for k in range(1, len(ring_ids) - 1):
        faces.extend(
            _stitch_rings(ring_ids[k], ring_angles[k], ring_ids[k + 1], ring_angles[k + 1])
        )
    positions = np.array(pts3)
    return TriSurface.build(np.array(faces), positions=positions, name=name)


GENERATORS = {
    "flat_disk": flat_disk,
    "flat_rect": flat_rect,
    "flat_torus": flat_torus,
    "sphere": sphere,
    "cone": cone,
    "saddle_fan": saddle_fan,
    "doubled_disk": doubled_disk,
    "sqrt_horn": sqrt_horn,
}


def generate(kind: str, h: float | None = None, **params) -> TriSurface:
    """Dispatch to a named generator; unknown names raise MeshError."""
    if kind not in GENERATORS:
        raise MeshError(f"unknown generator {kind!r}")
    if h is not None:
        params = {"h": h, **params}
    return GENERATORS[kind](**params)
