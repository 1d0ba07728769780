"""Points on a surface and local unfolding of face neighborhoods.

A SurfacePoint lives in one face's isometric layout frame (complex
coordinate).  Around any point the incident faces unfold into a planar
chart: a list of entries (face, rigid transform into the chart, gate edges
crossed to get there).  Straight segments inside the chart that pass their
gates are genuine surface paths of the same length.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..surface import TriSurface

TWO_PI = 2.0 * math.pi


def _zlay(surface: TriSurface) -> np.ndarray:
    cache = surface._cache
    if "zlay" not in cache:
        lay = surface.layouts()
        cache["zlay"] = lay[..., 0] + 1j * lay[..., 1]
    return cache["zlay"]


@dataclass(frozen=True)
class SurfacePoint:
    """A point in the layout frame of one face."""

    face: int
    z: complex
    vertex: int = -1      # set when the point is exactly a mesh vertex
    edge: int = -1        # set when the point lies on a mesh edge
    edge_param: float = 0.0

    @staticmethod
    def at_vertex(surface: TriSurface, v: int) -> "SurfacePoint":
        rows, cols = np.nonzero(surface.faces == v)
        f = int(rows.min())
        c = int(cols[rows.argmin()])
        return SurfacePoint(face=f, z=_zlay(surface)[f, c], vertex=int(v))

    @staticmethod
    def on_edge(surface: TriSurface, e: int, t: float) -> "SurfacePoint":
        side_ids = np.nonzero(surface.side_edge == e)
        f = int(side_ids[0][0])
        s = int(side_ids[1][0])
        Z = _zlay(surface)
        a, b = Z[f, s], Z[f, (s + 1) % 3]
        if surface.faces[f, s] != surface.edges[e, 0]:
            t_local = 1.0 - t
        else:
            t_local = t
        return SurfacePoint(face=f, z=a + t_local * (b - a), edge=int(e), edge_param=float(t))

    @staticmethod
    def from_sample(graph, sample: int) -> "SurfacePoint":
        s = graph.surface
        if sample < s.n_vertices:
            return SurfacePoint.at_vertex(s, int(sample))
        e = int(graph.sample_edge[sample])
        return SurfacePoint.on_edge(s, e, float(graph.sample_param[sample]))

    def barycentric(self, surface: TriSurface) -> np.ndarray:
        Z = _zlay(surface)[self.face]
        d = (Z[1] - Z[0]).real * (Z[2] - Z[0]).imag - (Z[1] - Z[0]).imag * (Z[2] - Z[0]).real
        w1 = ((self.z - Z[0]).real * (Z[2] - Z[0]).imag
              - (self.z - Z[0]).imag * (Z[2] - Z[0]).real) / d
        w2 = ((Z[1] - Z[0]).real * (self.z - Z[0]).imag
              - (Z[1] - Z[0]).imag * (self.z - Z[0]).real) / d
        return np.array([1.0 - w1 - w2, w1, w2])

    def embedding(self, surface: TriSurface) -> np.ndarray:
        if surface.positions is None:
            raise ValueError("surface has no embedding")
        lam = self.barycentric(surface)
        return lam @ surface.positions[surface.faces[self.face]]


def locate_planar(surface: TriSurface, xy) -> SurfacePoint:
    """Find the face containing a planar point (surfaces embedded in R^2).

    The embedding of a flat planar surface is isometric, so the layout-frame
    coordinate is recovered from barycentric weights.
    """
    from scipy.spatial import cKDTree

    if surface.positions is None or surface.positions.shape[1] != 2:
        raise ValueError("locate_planar needs a planar embedding")
    xy = np.asarray(xy, dtype=np.float64)
    cache = surface._cache
    if "face_tree" not in cache:
        cent = surface.positions[surface.faces].mean(axis=1)
        cache["face_tree"] = cKDTree(cent)
    _, cand = cache["face_tree"].query(xy, k=min(12, surface.n_faces))
    Z = _zlay(surface)
    best = None
    for f in np.atleast_1d(cand):
        tri = surface.positions[surface.faces[f]]
        d = np.cross(tri[1] - tri[0], tri[2] - tri[0])
        w1 = np.cross(xy - tri[0], tri[2] - tri[0]) / d
        w2 = np.cross(tri[1] - tri[0], xy - tri[0]) / d
        w0 = 1.0 - w1 - w2
        short = min(w0, w1, w2)
        if best is None or short > best[0]:
            lam = np.array([w0, w1, w2])
            z = lam @ Z[f]
            best = (short, SurfacePoint(face=int(f), z=complex(z)))
        if short >= -1e-12:
            break
    if best[0] < -1e-9:
        raise ValueError(f"point {xy} is outside the surface")
    return best[1]


@dataclass(frozen=True)
class ChartEntry:
    """One face placed in the chart around a point."""

    face: int
    alpha: complex        # z_chart = alpha * z_local + beta
    beta: complex
    gates: tuple          # ((A, B) chart segments crossed, in order)
    chain: tuple          # face ids from the root to this face, inclusive
    gate_edges: tuple     # edge ids matching gates

    def map(self, z):
        return self.alpha * z + self.beta


def side_unfold(surface: TriSurface, f: int, s: int):
    """Transform placing the face across side s of f into f's frame."""
    twin = int(surface.side_twin[f, s])
    if twin < 0:
        return None
    f2, s2 = divmod(twin, 3)
    Z = _zlay(surface)
    A1, B1 = Z[f, s], Z[f, (s + 1) % 3]
    qw, qu = Z[f2, s2], Z[f2, (s2 + 1) % 3]
    alpha = (A1 - B1) / (qu - qw)
    beta = B1 - alpha * qw
    return f2, alpha, beta


def chart_around(surface: TriSurface, p: SurfacePoint, depth: int = 2):
    """Unfolded chart: entries covering all faces within `depth` crossings.

    Returns (entries, origin, theta_total).  origin is the chart coordinate
    of p; theta_total is 2*pi except at mesh vertices, where it is the cone
    angle.  Directions in the chart are angles measured at the origin.
    """
    Z = _zlay(surface)
    roots = []
    theta = TWO_PI
    if p.vertex >= 0:
        fan, _closed = surface.vertex_fan(p.vertex)
        angles = surface.corner_angles()
        theta = float(surface.cone_profile().total_angle[p.vertex])
        off = 0.0
        for f, c in fan:
            vz = Z[f, c]
            spoke = Z[f, (c + 1) % 3] - vz
            alpha = cmath.exp(1j * (off - cmath.phase(spoke)))
            beta = -alpha * vz
            roots.append(ChartEntry(f, alpha, beta, (), (f,), ()))
            off += float(angles[f, c])
        origin = 0.0 + 0.0j
        block_sides = {(f, c) for f, c in fan} | {(f, (c + 2) % 3) for f, c in fan}
    elif p.edge >= 0:
        f1 = p.face
        s1 = next(s for s in range(3) if surface.side_edge[f1, s] == p.edge)
        roots.append(ChartEntry(f1, 1.0 + 0.0j, 0.0 + 0.0j, (), (f1,), ()))
        unf = side_unfold(surface, f1, s1)
        if unf is not None:
            f2, a, b = unf
            roots.append(ChartEntry(f2, a, b, (), (f2,), ()))
        origin = p.z
        block_sides = {(f1, s1)}
        if unf is not None:
            twin = int(surface.side_twin[f1, s1])
            block_sides.add(divmod(twin, 3))
    else:
        roots.append(ChartEntry(p.face, 1.0 + 0.0j, 0.0 + 0.0j, (), (p.face,), ()))
        origin = p.z
        block_sides = set()

    entries = list(roots)
    frontier = roots
    for _ in range(depth):
        nxt = []
        for ent in frontier:
            for s in range(3):
                if (ent.face, s) in block_sides and len(ent.chain) == 1:
                    continue
                edge_id = int(surface.side_edge[ent.face, s])
                if ent.gate_edges and edge_id == ent.gate_edges[-1]:
                    continue   # no immediate backtracking
                unf = side_unfold(surface, ent.face, s)
                if unf is None:
                    continue
                f2, a, b = unf
                if f2 in ent.chain:
                    continue
                gate = (ent.map(Z[ent.face, s]), ent.map(Z[ent.face, (s + 1) % 3]))
                nxt.append(ChartEntry(
                    face=f2,
                    alpha=ent.alpha * a,
                    beta=ent.alpha * b + ent.beta,
                    gates=ent.gates + (gate,),
                    chain=ent.chain + (f2,),
                    gate_edges=ent.gate_edges + (edge_id,),
                ))
        entries.extend(nxt)
        frontier = nxt
    return entries, origin, theta


def gate_visibility(origin, targets, gates):
    """Mask of chart targets whose segment from origin crosses every gate."""
    ok = np.ones(len(targets), dtype=bool)
    for A, B in gates:
        e = B - A
        d0 = (e.conjugate() * (origin - A)).imag
        dz = np.imag(np.conj(e) * (targets - A))
        denom = d0 - dz
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(np.abs(denom) > 0, d0 / denom, -1.0)
        crossz = origin + lam * (targets - origin)
        tau = np.real(np.conj(e) * (crossz - A)) / (abs(e) ** 2)
        ok &= (lam >= 0.0) & (lam <= 1.0) & (tau >= -1e-12) & (tau <= 1.0 + 1e-12)
    return ok


# -- geodesic shooting -------------------------------------------------------


def shoot_geodesic(surface: TriSurface, p: SurfacePoint, angle: float, length: float):
    """Trace the straight surface path from p with the given start angle.

    Returns (segments, hit_boundary): each segment is (t0, t1, face, z0, z1)
    with both endpoints in the face's own layout frame, so any arc length
    along the path interpolates to a SurfacePoint.  Stops early at the
    surface boundary.
    """
    entries, origin, _theta = chart_around(surface, p, depth=0)
    u = cmath.exp(1j * angle)
    Z = _zlay(surface)

    # choose the starting entry whose face contains the ray
    start = None
    for ent in entries:
        inv = 1.0 / ent.alpha
        z0 = inv * (origin - ent.beta)
        zdir = inv * u
        probe = z0 + 1e-9 * zdir
        tri = Z[ent.face]
        d = (tri[1] - tri[0]).real * (tri[2] - tri[0]).imag \
            - (tri[1] - tri[0]).imag * (tri[2] - tri[0]).real
        w1 = ((probe - tri[0]).real * (tri[2] - tri[0]).imag
              - (probe - tri[0]).imag * (tri[2] - tri[0]).real) / d
        w2 = ((tri[1] - tri[0]).real * (probe - tri[0]).imag
              - (tri[1] - tri[0]).imag * (probe - tri[0]).real) / d
        if min(1.0 - w1 - w2, w1, w2) >= -1e-9:
            start = (ent.face, z0, zdir)
            break
    if start is None:
        raise ValueError("direction does not enter any incident face")

    face, z, u_loc = start
    segments = []
    travelled = 0.0
    prev_side = -1
    guard = 0
    while travelled < length:
        guard += 1
        if guard > 500000:
            raise RuntimeError("geodesic trace did not terminate")
        tri = Z[face]
        best = None
        for s in range(3):
            if s == prev_side:
                continue
            A, B = tri[s], tri[(s + 1) % 3]
            e = B - A
            denom = (e.conjugate() * u_loc).imag
            if abs(denom) < 1e-15:
                continue
            t_ray = -(e.conjugate() * (z - A)).imag / denom
            if t_ray <= 1e-12:
                continue
            tau = ((z + t_ray * u_loc - A) * e.conjugate()).real / abs(e) ** 2
            if -1e-9 <= tau <= 1.0 + 1e-9:
                if best is None or t_ray < best[0]:
                    best = (t_ray, s)
        if best is None:
            raise RuntimeError("geodesic trace lost containment")
        t_ray, s = best
        if travelled + t_ray >= length:
            z_end = z + (length - travelled) * u_loc
            segments.append((travelled, length, face, z, z_end))
            return segments, False
        z_cross = z + t_ray * u_loc
        segments.append((travelled, travelled + t_ray, face, z, z_cross))
        travelled += t_ray
        unf = side_unfold(surface, face, s)
        if unf is None:
            return segments, True
        f2, a, b = unf
        # map current position/direction into the next face's frame
        inv = 1.0 / a
        z = inv * (z_cross - b)
        u_loc = inv * u_loc
        twin = int(surface.side_twin[face, s])
        prev_side = twin % 3
        face = f2
    return segments, False


def geodesic_point_at(segments, t: float) -> SurfacePoint:
    """Interpolate a traced geodesic at arc length t."""
    if t <= segments[0][0]:
        _, _, f, z0, _ = segments[0]
        return SurfacePoint(face=f, z=z0)
    for t0, t1, f, z0, z1 in segments:
        if t <= t1 + 1e-12:
            lam = (t - t0) / max(t1 - t0, 1e-300)
            return SurfacePoint(face=f, z=z0 + lam * (z1 - z0))
    raise ValueError("arc length beyond trace")
