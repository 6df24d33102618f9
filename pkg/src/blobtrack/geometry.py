"""Per-blob summary geometry: weighted center, convex hull, area."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, NumericalError


@dataclass(frozen=True)
class BlobSummary:
    """Geometric summary of one blob.

    area is the member vertex count (the working definition throughout);
    hull_area is the polygon area of the convex hull, exported for
    plotting only.
    """

    center: tuple
    hull: np.ndarray  # (H, 2) counter-clockwise boundary coordinates
    area: int
    mass: float
    hull_area: float


def weighted_center(coords, densities):
    """Density-weighted mean of member coordinates."""
    coords = np.asarray(coords, dtype=np.float64)
    densities = np.asarray(densities, dtype=np.float64)
    if coords.size == 0:
        raise ArgumentError("weighted_center of empty member set")
    mass = densities.sum()
    if mass <= 0:
        raise NumericalError(f"total mass must be positive, got {mass}")
    c = (coords * densities[:, None]).sum(axis=0) / mass
    return float(c[0]), float(c[1])


def convex_hull(points):
    """Monotone-chain convex hull, counter-clockwise, extreme points only.

    Collinear interior points are dropped. One or two distinct points
    return the degenerate point or segment.
    """
    pts = np.unique(np.asarray(points, dtype=np.float64).reshape(-1, 2), axis=0)
    if pts.shape[0] <= 2:
        return pts
    # np.unique sorts lexicographically, which is what the chains need
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all points collinear
        return np.stack([pts[0], pts[-1]])
    return np.stack(hull)


def blob_area(members):
    """Blob area as the number of member points."""
    n = len(members)
    if n == 0:
        raise ArgumentError("blob_area of empty member set")
    return n


def polygon_area(hull):
    """Shoelace area of a counter-clockwise polygon; 0 for degenerate hulls."""
    hull = np.asarray(hull, dtype=np.float64)
    if hull.shape[0] < 3:
        return 0.0
    x, y = hull[:, 0], hull[:, 1]
    return float(0.5 * np.abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def summarize(coords, densities):
    """Build the full geometric summary for one blob's members."""
    center = weighted_center(coords, densities)
    hull = convex_hull(coords)
    return BlobSummary(
        center=center,
        hull=hull,
        area=blob_area(coords),
        mass=float(np.asarray(densities, dtype=np.float64).sum()),
        hull_area=polygon_area(hull),
    )
