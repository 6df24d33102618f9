"""Triangular mesh container, edge extraction, refinement and ROI restriction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, StructuralError


@dataclass(frozen=True)
class RegionOfInterest:
    """Axis-aligned box in the (r, z) plane."""

    r_min: float
    r_max: float
    z_min: float
    z_max: float

    def __post_init__(self):
        if not (self.r_min < self.r_max and self.z_min < self.z_max):
            raise ArgumentError(
                f"invalid ROI bounds: r [{self.r_min}, {self.r_max}], "
                f"z [{self.z_min}, {self.z_max}]"
            )

    def contains(self, r, z):
        """Vectorized point-in-box test (closed box)."""
        return (
            (r >= self.r_min)
            & (r <= self.r_max)
            & (z >= self.z_min)
            & (z <= self.z_max)
        )


@dataclass(frozen=True)
class TriMesh:
    """Immutable triangulated grid with derived unique-edge connectivity.

    vertices : (V, 2) float array of (r, z) coordinates
    triangles : (T, 3) int array of vertex indices
    edges : (E, 2) int array, each undirected edge once as (min, max),
        lexicographically sorted; computed on construction
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        tris = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise StructuralError(f"vertices must be (V, 2), got {verts.shape}")
        if tris.size and (tris.ndim != 2 or tris.shape[1] != 3):
            raise StructuralError(f"triangles must be (T, 3), got {tris.shape}")
        tris = tris.reshape(-1, 3)
        if verts.shape[0] == 0:
            raise StructuralError("mesh has no vertices")
        if tris.size:
            bad = np.flatnonzero((tris < 0).any(axis=1) | (tris >= len(verts)).any(axis=1))
            if bad.size:
                raise StructuralError(
                    f"triangle {bad[0]} = {tuple(tris[bad[0]])} references a "
                    f"vertex outside [0, {len(verts)})"
                )
            degen = np.flatnonzero(
                (tris[:, 0] == tris[:, 1])
                | (tris[:, 1] == tris[:, 2])
                | (tris[:, 0] == tris[:, 2])
            )
            if degen.size:
                raise StructuralError(
                    f"triangle {degen[0]} = {tuple(tris[degen[0]])} repeats a vertex"
                )
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)
        if self.edges is None:
            object.__setattr__(self, "edges", _unique_edges(tris))
        for arr in (self.vertices, self.triangles, self.edges):
            arr.setflags(write=False)

    @property
    def vertex_count(self):
        return self.vertices.shape[0]

    @property
    def triangle_count(self):
        return self.triangles.shape[0]

    @property
    def edge_count(self):
        return self.edges.shape[0]


@dataclass(frozen=True)
class Frame:
    """Per-vertex scalar field at one (time, plane) coordinate."""

    time_index: int
    plane_index: int
    values: np.ndarray
    dt: float

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 1:
            raise StructuralError(f"frame values must be 1-D, got shape {vals.shape}")
        if not self.dt > 0:
            raise ArgumentError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "values", vals)
        vals.setflags(write=False)


def _unique_edges(triangles):
    """All undirected triangle edges, each once as (min, max), sorted."""
    if triangles.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    raw = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [0, 2]], triangles[:, [1, 2]]]
    )
    raw = np.sort(raw, axis=1)
    return np.unique(raw, axis=0)


def build_edges(mesh):
    """Return a mesh with its unique-edge list and the triangle-edge index map.

    The map has shape (T, 3) and gives, for each triangle, the index in
    ``mesh.edges`` of its edges (01, 02, 12), so refinement can address
    midpoint vertices directly.
    """
    edges = mesh.edges
    tris = mesh.triangles
    if tris.size == 0:
        return mesh, np.empty((0, 3), dtype=np.int64)
    # encode (min, max) pairs to single ints for a vectorized lookup
    v = mesh.vertex_count
    keys = edges[:, 0] * v + edges[:, 1]
    order = np.argsort(keys)
    tri_edges = np.stack(
        [
            np.sort(tris[:, [0, 1]], axis=1),
            np.sort(tris[:, [0, 2]], axis=1),
            np.sort(tris[:, [1, 2]], axis=1),
        ],
        axis=1,
    )
    tri_keys = tri_edges[:, :, 0] * v + tri_edges[:, :, 1]
    idx = order[np.searchsorted(keys, tri_keys.ravel(), sorter=order)]
    return mesh, idx.reshape(-1, 3)


def refine(mesh, values, levels=1):
    """Split every triangle into four by linking edge midpoints.

    Midpoint vertices get the arithmetic mean of the edge endpoint values
    (the linear interpolant at the midpoint). Original vertices keep their
    indices and values. Applying ``levels`` > 1 composes the operation.

    Returns the refined mesh and the interpolated per-vertex field.
    """
    if levels < 1:
        raise ArgumentError(f"levels must be >= 1, got {levels}")
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] != mesh.vertex_count:
        raise StructuralError(
            f"field length {values.shape[0]} != vertex count {mesh.vertex_count}"
        )
    if mesh.triangle_count == 0:
        raise StructuralError("cannot refine a mesh with no triangles")
    for _ in range(levels):
        mesh, values = _refine_once(mesh, values)
    return mesh, values


def _refine_once(mesh, values):
    _, tri_edge = build_edges(mesh)
    v0 = mesh.vertex_count
    edges = mesh.edges
    mid_coords = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    mid_values = 0.5 * (values[edges[:, 0]] + values[edges[:, 1]])
    new_vertices = np.concatenate([mesh.vertices, mid_coords])
    new_values = np.concatenate([values, mid_values])

    a, b, c = mesh.triangles[:, 0], mesh.triangles[:, 1], mesh.triangles[:, 2]
    m01 = v0 + tri_edge[:, 0]
    m02 = v0 + tri_edge[:, 1]
    m12 = v0 + tri_edge[:, 2]
    # corner triangles plus the central one
    new_tris = np.concatenate(
        [
            np.stack([a, m01, m02], axis=1),
            np.stack([b, m12, m01], axis=1),
            np.stack([c, m02, m12], axis=1),
            np.stack([m01, m12, m02], axis=1),
        ]
    )
    return TriMesh(new_vertices, new_tris), new_values


def restrict(mesh, roi):
    """Keep vertices inside the ROI box and triangles fully inside it.

    Returns the restricted mesh and an old-to-new vertex index map
    (length V, -1 for dropped vertices) so frames restrict consistently.
    """
    keep = roi.contains(mesh.vertices[:, 0], mesh.vertices[:, 1])
    if not keep.any():
        raise StructuralError("ROI excludes entire mesh")
    index_map = np.full(mesh.vertex_count, -1, dtype=np.int64)
    index_map[keep] = np.arange(int(keep.sum()))
    tri_keep = keep[mesh.triangles].all(axis=1)
    new_tris = index_map[mesh.triangles[tri_keep]]
    return TriMesh(mesh.vertices[keep], new_tris), index_map


def restrict_values(values, index_map):
    """Apply a restriction index map to a per-vertex array."""
    values = np.asarray(values)
    return values[index_map >= 0]


class RefinementPlan:
    """Precomputed refinement of a fixed mesh, reusable across many fields.

    The mesh geometry is refined once; ``refine_values`` then interpolates
    any per-vertex field onto the refined mesh cheaply (one midpoint
    average per level). Matches refine() exactly.
    """

    def __init__(self, mesh, levels=1):
        if levels < 1:
            raise ArgumentError(f"levels must be >= 1, got {levels}")
        self.source = mesh
        self._edge_lists = []
        dummy = np.zeros(mesh.vertex_count)
        for _ in range(levels):
            self._edge_lists.append(mesh.edges)
            mesh, dummy = _refine_once(mesh, dummy)
        self.refined = mesh

    def refine_values(self, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape[0] != self.source.vertex_count:
            raise StructuralError(
                f"field length {values.shape[0]} != vertex count "
                f"{self.source.vertex_count}"
            )
        for edges in self._edge_lists:
            mids = 0.5 * (values[edges[:, 0]] + values[edges[:, 1]])
            values = np.concatenate([values, mids])
        return values
