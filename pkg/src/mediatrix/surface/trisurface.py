"""Triangulated surfaces with intrinsic edge lengths.

The metric lives in the edge lengths, not in vertex coordinates: a surface
is a gluing of flat Euclidean triangles, and vertex positions (when present)
are only used for export, point snapping, and plotting.  Curvature is
concentrated at vertices as cone angles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


class MeshError(ValueError):
    """Raised when input data does not describe a valid oriented 2-manifold."""


def corner_angles_from_lengths(side_lengths: np.ndarray) -> np.ndarray:
    """Interior angles of each triangle from its three side lengths.

    side_lengths[f, s] is the length of the side from corner s to corner
    s+1 (mod 3).  Returns angles[f, c] at corner c, computed by the law of
    cosines.  Inputs must satisfy the strict triangle inequality.
    """
    l0 = side_lengths[:, 0]
    l1 = side_lengths[:, 1]
    l2 = side_lengths[:, 2]
    angles = np.empty_like(side_lengths)
    # angle at corner c lies between sides c and c+2, opposite side c+1
    for c, (a, b, opp) in enumerate(((l0, l2, l1), (l1, l0, l2), (l2, l1, l0))):
        cosv = (a * a + b * b - opp * opp) / (2.0 * a * b)
        angles[:, c] = np.arccos(np.clip(cosv, -1.0, 1.0))
    return angles


def face_layouts(side_lengths: np.ndarray) -> np.ndarray:
    """Isometric planar layout of each face.

    Returns an (nf, 3, 2) array: corner 0 at the origin, corner 1 on the
    positive x-axis, corner 2 in the upper half plane (faces unfold
    counterclockwise).
    """
    nf = side_lengths.shape[0]
    P = np.zeros((nf, 3, 2))
    l0 = side_lengths[:, 0]
    l1 = side_lengths[:, 1]
    l2 = side_lengths[:, 2]
    P[:, 1, 0] = l0
    x2 = (l0 * l0 + l2 * l2 - l1 * l1) / (2.0 * l0)
    y2 = np.sqrt(np.maximum(l2 * l2 - x2 * x2, 0.0))
    P[:, 2, 0] = x2
    P[:, 2, 1] = y2
    return P


@dataclass(frozen=True, eq=False)
class ConeProfile:
    """Total angle around each vertex plus boundary flags."""

    total_angle: np.ndarray     # (nv,) radians
    is_boundary: np.ndarray     # (nv,) bool

    def defects(self) -> np.ndarray:
        """Angle defect: 2*pi - theta at interior, pi - theta on the boundary."""
        ref = np.where(self.is_boundary, math.pi, 2.0 * math.pi)
        return ref - self.total_angle


@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Outcome of the curvature-bounded-below validation."""

    passed: bool
    offending: list          # (vertex id, total angle) for interior failures
    boundary_warnings: list  # (vertex id, total angle) with theta > pi on boundary
    tol_angle: float
    max_interior_angle: float

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True, eq=False)
class TriSurface:
    """Oriented triangulated surface defined by intrinsic side lengths.

    faces        (nf, 3) vertex ids, consistently counterclockwise
    side_lengths (nf, 3) length of side s = (faces[f,s], faces[f,s+1])
    edges        (ne, 2) canonical (min, max) vertex pairs
    edge_lengths (ne,)   per-edge lengths (agrees with side_lengths)
    side_edge    (nf, 3) edge id of each side
    side_twin    (nf, 3) opposite side encoded as 3*f + s, or -1 on boundary
    positions    optional (nv, 2|3) embedding used for export and snapping
    """

    faces: np.ndarray
    side_lengths: np.ndarray
    edges: np.ndarray
    edge_lengths: np.ndarray
    side_edge: np.ndarray
    side_twin: np.ndarray
    n_vertices: int
    boundary_loops: tuple
    positions: np.ndarray | None = None
    name: str = "surface"
    _cache: dict = field(default_factory=dict, repr=False)

    # -- construction -----------------------------------------------------

    @staticmethod
    def build(faces, side_lengths=None, positions=None, name="surface") -> "TriSurface":
        """Assemble and validate a surface from faces plus metric data.

        Either side_lengths (nf, 3) or positions must be given; when both
        are present the explicit lengths win.  Raises MeshError on
        non-manifold, non-orientable, disconnected, or degenerate input.
        """
        faces = np.ascontiguousarray(faces, dtype=np.int32)
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise MeshError("faces must be an (nf, 3) array")
        if faces.shape[0] == 0:
            raise MeshError("surface has no faces")
        if np.any(faces < 0):
            raise MeshError("negative vertex id")
        nv = int(faces.max()) + 1
        if (faces[:, 0] == faces[:, 1]).any() or (faces[:, 1] == faces[:, 2]).any() \
                or (faces[:, 2] == faces[:, 0]).any():
            raise MeshError("degenerate face (repeated vertex)")

        if positions is not None:
            positions = np.asarray(positions, dtype=np.float64)
            if positions.shape[0] != nv:
                raise MeshError("positions do not cover all vertex ids")
        if side_lengths is None:
            if positions is None:
                raise MeshError("need side_lengths or positions")
            d = positions[np.roll(faces, -1, axis=1)] - positions[faces]
            side_lengths = np.sqrt((d * d).sum(axis=2))
        side_lengths = np.ascontiguousarray(side_lengths, dtype=np.float64)
        if side_lengths.shape != faces.shape:
            raise MeshError("side_lengths must match faces shape")
        if np.any(side_lengths <= 0):
            raise MeshError("non-positive side length")

        # strict triangle inequality per face
        s = np.sort(side_lengths, axis=1)
        slack = s[:, 0] + s[:, 1] - s[:, 2]
        if np.any(slack <= 1e-13 * s[:, 2]):
            bad = int(np.argmin(slack))
            raise MeshError(f"degenerate face {bad}: triangle inequality violated")

        # canonical edges; a side is "flipped" when it runs high->low
        sides = np.stack([faces, np.roll(faces, -1, axis=1)], axis=2).reshape(-1, 2)
        lo = sides.min(axis=1).astype(np.int64)
        hi = sides.max(axis=1).astype(np.int64)
        keys = lo * nv + hi
        uniq, side_edge_flat, counts = np.unique(keys, return_inverse=True, return_counts=True)
        ne = uniq.shape[0]
        if counts.max() > 2:
            raise MeshError("non-manifold edge (more than two incident faces)")
        edges = np.stack([uniq // nv, uniq % nv], axis=1).astype(np.int32)
        side_edge = side_edge_flat.reshape(-1, 3).astype(np.int32)

        # consistent orientation: an interior edge must be traversed once in
        # each direction
        flipped = sides[:, 0] > sides[:, 1]
        twice = counts == 2
        fwd = np.zeros(ne, dtype=np.int32)
        np.add.at(fwd, side_edge_flat[~flipped], 1)
        if np.any(fwd[twice] != 1):
            raise MeshError("inconsistent winding or non-orientable surface")

        # edge lengths: the two sides of an edge must agree
        edge_lengths = np.zeros(ne)
        np.maximum.at(edge_lengths, side_edge_flat, side_lengths.ravel())
        emin = np.full(ne, np.inf)
        np.minimum.at(emin, side_edge_flat, side_lengths.ravel())
        if np.any(edge_lengths - emin > 1e-9 * np.maximum(edge_lengths, 1.0)):
            raise MeshError("the two sides of an edge disagree in length")

        # twins
        side_ids = np.arange(3 * faces.shape[0], dtype=np.int32)
        side_twin = np.full(3 * faces.shape[0], -1, dtype=np.int32)
        order = np.argsort(side_edge_flat, kind="stable")
        se_sorted = side_edge_flat[order]
        same = se_sorted[:-1] == se_sorted[1:]
        a = order[:-1][same]
        b = order[1:][same]
        side_twin[a] = side_ids[b]
        side_twin[b] = side_ids[a]
        side_twin = side_twin.reshape(-1, 3)

        # face adjacency connectivity
        nf = faces.shape[0]
        fa = np.repeat(np.arange(nf, dtype=np.int32), 3)
        fb = side_twin.ravel() // 3
        mask = side_twin.ravel() >= 0
        g = coo_matrix((np.ones(mask.sum()), (fa[mask], fb[mask])), shape=(nf, nf))
        ncomp, _ = connected_components(g, directed=False)
        if ncomp != 1:
            raise MeshError(f"surface is disconnected ({ncomp} components)")

        boundary_loops = _trace_boundary_loops(faces, side_twin, nv)

        return TriSurface(
            faces=faces,
            side_lengths=side_lengths,
            edges=edges,
            edge_lengths=edge_lengths,
            side_edge=side_edge,
            side_twin=side_twin,
            n_vertices=nv,
            boundary_loops=boundary_loops,
            positions=positions,
            name=name,
        )

    # -- basic quantities --------------------------------------------------

    @property
    def n_faces(self) -> int:
        return self.faces.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def is_closed(self) -> bool:
        return len(self.boundary_loops) == 0

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def corner_angles(self) -> np.ndarray:
        if "corner_angles" not in self._cache:
            self._cache["corner_angles"] = corner_angles_from_lengths(self.side_lengths)
        return self._cache["corner_angles"]

    def layouts(self) -> np.ndarray:
        if "layouts" not in self._cache:
            self._cache["layouts"] = face_layouts(self.side_lengths)
        return self._cache["layouts"]

    def cone_profile(self) -> ConeProfile:
        if "cone_profile" not in self._cache:
            total = np.zeros(self.n_vertices)
            np.add.at(total, self.faces.ravel(), self.corner_angles().ravel())
            is_boundary = np.zeros(self.n_vertices, dtype=bool)
            for loop in self.boundary_loops:
                is_boundary[list(loop)] = True
            self._cache["cone_profile"] = ConeProfile(total, is_boundary)
        return self._cache["cone_profile"]

    def mean_edge_length(self) -> float:
        return float(self.edge_lengths.mean())

    def total_area(self) -> float:
        a, b, c = self.side_lengths.T
        s = 0.5 * (a + b + c)
        return float(np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0.0)).sum())

    def diameter_hint(self) -> float:
        """Cheap scene-size estimate used to scale tolerances."""
        if self.positions is not None:
            span = self.positions.max(axis=0) - self.positions.min(axis=0)
            return float(np.linalg.norm(span))
        return 2.0 * math.sqrt(self.total_area())

    def gauss_bonnet_residual(self) -> float:
        """Total angle defect minus 2*pi*chi; should vanish identically."""
        prof = self.cone_profile()
        total = prof.defects().sum()
        return float(total - 2.0 * math.pi * self.euler_characteristic())

    def vertex_fan(self, v: int):
        """Faces around vertex v in counterclockwise order.

        Returns (corners, closed) where corners is a list of (face, corner)
        pairs.  For a boundary vertex the fan starts at the boundary side
        leaving v and is not closed.
        """
        key = ("fan", v)
        if key in self._cache:
            return self._cache[key]
        rows, cols = np.nonzero(self.faces == v)
        if rows.size == 0:
            raise MeshError(f"vertex {v} is isolated")
        # the ccw walk enters each face through its side starting at v, so a
        # boundary start face has that side unpaired
        incoming_boundary = [
            (int(f), int(c)) for f, c in zip(rows, cols) if self.side_twin[f, c] == -1
        ]
        if incoming_boundary:
            start = min(incoming_boundary)
            closed = False
        else:
            start = min((int(f), int(c)) for f, c in zip(rows, cols))
            closed = True
        fan = [start]
        seen = {start}
        while True:
            f, c = fan[-1]
            # leave across side c (v -> next vertex ccw is via side (c+2)?)
            # ccw around v: cross the side that ends at v, i.e. side (c+2)%3
            twin = self.side_twin[f, (c + 2) % 3]
            if twin == -1:
                closed = False
                break
            nf, ns = divmod(int(twin), 3)
            nxt = (nf, ns)
            if nxt == start:
                break
            if nxt in seen:
                raise MeshError(f"non-manifold fan at vertex {v}")
            fan.append(nxt)
            seen.add(nxt)
        if len(fan) != rows.size:
            raise MeshError(f"pinched (non-manifold) vertex {v}")
        self._cache[key] = (fan, closed)
        return fan, closed


def _trace_boundary_loops(faces, side_twin, nv):
    boundary_sides = np.argwhere(side_twin == -1)
    if boundary_sides.shape[0] == 0:
        return tuple()
    # map: start vertex -> end vertex along the boundary side
    nxt = {}
    for f, s in boundary_sides:
        u = int(faces[f, s])
        w = int(faces[f, (s + 1) % 3])
        if u in nxt:
            raise MeshError(f"pinched boundary at vertex {u}")
        nxt[u] = w
    loops = []
    remaining = dict(nxt)
    while remaining:
        start = min(remaining)
        loop = [start]
        cur = remaining.pop(start)
        while cur != start:
            loop.append(cur)
            if cur not in remaining:
                raise MeshError("boundary walk failed (non-simple boundary)")
            cur = remaining.pop(cur)
        loops.append(tuple(loop))
    return tuple(loops)


# -- validation ------------------------------------------------------------

TOL_ANGLE = 1e-9


def validate_alexandrov(s: TriSurface, tol_angle: float = TOL_ANGLE) -> ValidationReport:
    """Check the cone-angle criterion for curvature bounded below.

    Passes iff every interior vertex has total angle <= 2*pi + tol_angle.
    Boundary vertices with total angle > pi are reported as warnings since
    doubling such a surface produces an interior angle above 2*pi.
    """
    prof = s.cone_profile()
    interior = ~prof.is_boundary
    theta = prof.total_angle
    bad = interior & (theta > 2.0 * math.pi + tol_angle)
    warn = prof.is_boundary & (theta > math.pi + tol_angle)
    offending = [(int(v), float(theta[v])) for v in np.nonzero(bad)[0]]
    warnings = [(int(v), float(theta[v])) for v in np.nonzero(warn)[0]]
    max_int = float(theta[interior].max()) if interior.any() else 0.0
    return ValidationReport(
        passed=not offending,
        offending=offending,
        boundary_warnings=warnings,
        tol_angle=tol_angle,
        max_interior_angle=max_int,
    )


# -- doubling ----------------------------------------------------------------

def double(s: TriSurface) -> TriSurface:
    """Glue the surface to its mirror copy along all boundary loops.

    Interior vertices are duplicated; boundary vertices are shared, so their
    total angle doubles.  The mirror faces are re-wound to keep a globally
    consistent orientation.  Requires a nonempty, simple boundary.
    """
    if s.is_closed:
        raise MeshError("double() requires a surface with boundary")
    prof = s.cone_profile()
    is_b = prof.is_boundary
    nv = s.n_vertices
    mirror = np.arange(nv, dtype=np.int32)
    interior_ids = np.nonzero(~is_b)[0]
    mirror[interior_ids] = nv + np.arange(interior_ids.size, dtype=np.int32)

    faces2 = mirror[s.faces][:, ::-1]           # reversed winding
    # reversing (v0,v1,v2) -> (v2,v1,v0) permutes side lengths to (l1,l0,l2)
    lengths2 = s.side_lengths[:, [1, 0, 2]]

    faces = np.vstack([s.faces, faces2])
    lengths = np.vstack([s.side_lengths, lengths2])

    positions = None
    if s.positions is not None:
        p = s.positions
        if p.shape[1] == 2:
            p = np.hstack([p, np.zeros((nv, 1))])
        bverts = p[is_b]
        # lift copies slightly apart for export; purely cosmetic
        from scipy.spatial import cKDTree

        t = cKDTree(bverts)
        dist_b, _ = t.query(p)
        bump = 0.35 * dist_b
        p1 = p.copy()
        p1[:, 2] += bump
        p2 = p.copy()
        p2[:, 2] -= bump
        positions = np.vstack([p1, p2[interior_ids]])

    out = TriSurface.build(faces, lengths, positions=positions, name=s.name + "-doubled")
    if not out.is_closed:
        raise MeshError("doubling failed to close the surface")
    return out
