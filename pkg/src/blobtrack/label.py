"""Connected-component labeling of candidate vertices and blob acceptance.

Components are found with a two-pass union-find scan over the triangle list:
pass 1 assigns and merges provisional labels per triangle, pass 2 flattens
the parent array, pass 3 rewrites final labels. The union-find structure is
a single flat parent array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ArgumentError, StatisticsError


@dataclass(frozen=True)
class BlobParams:
    """Component acceptance criteria: size floor and median-density gates."""

    min_area: int = 3
    median_abs_min: float = 2.15  # absolute median floor
    median_rel_min: float = 1.3   # relative median multiplier
    median_abs_max: float = 2.75  # cap on the relative criterion

    def __post_init__(self):
        if self.min_area < 3:
            raise ArgumentError(f"min_area must be >= 3, got {self.min_area}")
        if not self.median_abs_min < self.median_abs_max:
            raise ArgumentError(
                f"median floor {self.median_abs_min} must be below cap "
                f"{self.median_abs_max}"
            )


@dataclass(frozen=True)
class BlobCandidate:
    """One connected component of candidate vertices."""

    component_id: int
    members: np.ndarray  # vertex indices, ascending
    median_density: float

    @property
    def vertex_count(self):
        return int(self.members.size)


@njit(cache=True)
def _ccl_scan(triangles, candidate):
    """Two-pass union-find labeling restricted to candidate vertices.

    Returns a per-vertex label array: -1 for non-candidates, else a dense
    component id in order of first appearance by vertex index.
    """
    nv = candidate.size
    label = np.zeros(nv, dtype=np.int64)          # 0 = unlabeled
    parent = np.zeros(3 * triangles.shape[0] + 2, dtype=np.int64)
    labnum = 0

    # pass 1: scan triangles, assign labels, merge via minimum root
    for t in range(triangles.shape[0]):
        ncand = 0
        cand = np.empty(3, dtype=np.int64)
        for k in range(3):
            v = triangles[t, k]
            if candidate[v]:
                cand[ncand] = v
                ncand += 1
        if ncand == 0:
            continue
        # minimum root among already-labeled candidate vertices
        min_root = 0
        any_labeled = False
        for k in range(ncand):
            lab = label[cand[k]]
            if lab != 0:
                root = lab
                while parent[root] != root:
                    root = parent[root]
                if not any_labeled or root < min_root:
                    min_root = root
                any_labeled = True
        if not any_labeled:
            labnum += 1
            parent[labnum] = labnum
            min_root = labnum
        for k in range(ncand):
            lab = label[cand[k]]
            if lab != 0:
                root = lab
                while parent[root] != root:
                    root = parent[root]
                parent[root] = min_root
            label[cand[k]] = min_root

    # pass 2: flatten the union-find tree (parents only ever point downward)
    for i in range(1, labnum + 1):
        parent[i] = parent[parent[i]]

    # pass 3: rewrite labels with their roots, renumber densely
    renumber = np.full(labnum + 1, -1, dtype=np.int64)
    out = np.full(nv, -1, dtype=np.int64)
    next_id = 0
    for v in range(nv):
        if not candidate[v]:
            continue
        lab = label[v]
        if lab == 0:
            # candidate vertex not covered by any triangle: own component
            out[v] = next_id
            next_id += 1
            continue
        root = parent[lab]
        if renumber[root] < 0:
            renumber[root] = next_id
            next_id += 1
        out[v] = renumber[root]
    return out, next_id


def label_components(mesh, candidates, norm_values=None):
    """Group candidate vertices into triangle-connected components.

    Two vertices share a component iff a chain of triangles joins them,
    where a triangle joins exactly its candidate vertices. Components come
    back in order of first appearance by vertex index; each carries the
    median of ``norm_values`` over its members when values are given.
    """
    mask = np.ascontiguousarray(np.asarray(candidates.mask, dtype=bool))
    if mask.size != mesh.vertex_count:
        raise ArgumentError(
            f"candidate mask length {mask.size} != vertex count {mesh.vertex_count}"
        )
    labels, count = _ccl_scan(mesh.triangles, mask)
    out = []
    for cid in range(count):
        members = np.flatnonzero(labels == cid)
        med = median(norm_values[members]) if norm_values is not None else float("nan")
        out.append(BlobCandidate(component_id=cid, members=members, median_density=med))
    return out


def median(values):
    """Middle order statistic; even length averages the middle pair."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise StatisticsError("median of empty sample")
    return float(np.median(values))


def accept_blobs(components, mu2, params):
    """Keep components passing the size floor and the median-density gate."""
    threshold = max(
        params.median_abs_min, min(params.median_rel_min * mu2, params.median_abs_max)
    )
    return [
        c
        for c in components
        if c.vertex_count >= params.min_area and c.median_density > threshold
    ]


def median_threshold(mu2, params):
    """The median-density acceptance threshold for a given stage-2 mean."""
    return max(
        params.median_abs_min, min(params.median_rel_min * mu2, params.median_abs_max)
    )
