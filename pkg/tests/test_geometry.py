import numpy as np
import pytest

from blobtrack.errors import ArgumentError, NumericalError
from blobtrack.geometry import (
    blob_area,
    convex_hull,
    polygon_area,
    summarize,
    weighted_center,
)


def brute_force_hull_vertices(points):
    """A point is extreme iff some half-plane through it contains all others."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    n = len(pts)
    extreme = []
    for i in range(n):
        # p is extreme iff some line through p and another point leaves all
        # remaining points on one side (O(n^3) overall)
        others = np.delete(pts, i, axis=0)
        p = pts[i]
        found = False
        for j in range(len(others)):
            d = others[j] - p
            normal = np.array([-d[1], d[0]])
            side = (others - p) @ normal
            if (side >= -1e-12).all() or (side <= 1e-12).all():
                found = True
                break
        if found:
            extreme.append(tuple(p))
    return set(extreme)


class TestWeightedCenter:
    def test_singleton(self):
        assert weighted_center([(1.4, -0.2)], [5.0]) == (1.4, -0.2)

    def test_two_points(self):
        c = weighted_center([(0, 0), (1, 0)], [1.0, 3.0])
        assert c == pytest.approx((0.75, 0.0))

    def test_matches_direct_summation(self, rng):
        coords = rng.random((50, 2))
        dens = rng.random(50) + 0.1
        c = weighted_center(coords, dens)
        mass = sum(dens)
        cr = sum(coords[i, 0] * dens[i] for i in range(50)) / mass
        cz = sum(coords[i, 1] * dens[i] for i in range(50)) / mass
        assert c == pytest.approx((cr, cz), rel=1e-12)

    def test_uniform_density_is_centroid(self, rng):
        coords = rng.random((30, 2))
        c = weighted_center(coords, np.full(30, 2.5))
        assert c == pytest.approx(tuple(coords.mean(axis=0)), rel=1e-12)

    def test_inside_bounding_box(self, rng):
        coords = rng.random((20, 2))
        dens = rng.random(20) + 0.1
        cr, cz = weighted_center(coords, dens)
        assert coords[:, 0].min() <= cr <= coords[:, 0].max()
        assert coords[:, 1].min() <= cz <= coords[:, 1].max()

    def test_zero_mass(self):
        with pytest.raises(NumericalError):
            weighted_center([(0, 0), (1, 1)], [0.0, 0.0])

    def test_empty(self):
        with pytest.raises(ArgumentError):
            weighted_center([], [])


class TestConvexHull:
    def test_square_with_center(self):
        pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
        hull = convex_hull(pts)
        assert len(hull) == 4
        assert {tuple(p) for p in hull} == {(0, 0), (1, 0), (1, 1), (0, 1)}

    def test_counter_clockwise(self):
        hull = convex_hull([(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)])
        # positive signed area means counter-clockwise
        x, y = hull[:, 0], hull[:, 1]
        signed = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
        assert signed > 0

    def test_collinear_returns_segment(self):
        hull = convex_hull([(0, 0), (1, 1), (2, 2)])
        assert len(hull) == 2
        assert {tuple(p) for p in hull} == {(0, 0), (2, 2)}

    def test_degenerate_one_two(self):
        assert len(convex_hull([(1, 2)])) == 1
        assert len(convex_hull([(1, 2), (3, 4)])) == 2
        assert len(convex_hull([(1, 2), (1, 2)])) == 1

    def test_matches_brute_force_extreme_points(self, rng):
        pts = rng.random((200, 2))
        hull = convex_hull(pts)
        assert {tuple(p) for p in hull} == brute_force_hull_vertices(pts)

    def test_all_points_inside_hull(self, rng):
        pts = rng.random((100, 2))
        hull = convex_hull(pts)
        # point-in-convex-polygon: non-negative cross products all around
        for p in pts:
            crosses = []
            for i in range(len(hull)):
                a, b = hull[i], hull[(i + 1) % len(hull)]
                crosses.append(
                    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
                )
            assert min(crosses) >= -1e-12

    def test_translation_equivariance(self, rng):
        pts = rng.random((60, 2))
        delta = np.array([3.7, -1.2])
        h1 = convex_hull(pts)
        h2 = convex_hull(pts + delta)
        np.testing.assert_allclose(h2, h1 + delta, atol=1e-12)


class TestAreaAndSummary:
    def test_area_is_count(self, rng):
        assert blob_area([(0, 0)]) == 1
        assert blob_area([(0, 0), (1, 0), (0, 1)]) == 3
        n = int(rng.integers(1, 50))
        assert blob_area([(i, i) for i in range(n)]) == n

    def test_empty_area(self):
        with pytest.raises(ArgumentError):
            blob_area([])

    def test_polygon_area_unit_square(self):
        hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)])
        assert polygon_area(hull) == pytest.approx(1.0)

    def test_summary_translation(self, rng):
        coords = rng.random((25, 2))
        dens = rng.random(25) + 0.5
        s1 = summarize(coords, dens)
        s2 = summarize(coords + [2.0, -3.0], dens)
        assert s2.center[0] == pytest.approx(s1.center[0] + 2.0, rel=1e-12)
        assert s2.center[1] == pytest.approx(s1.center[1] - 3.0, rel=1e-12)
        assert s2.area == s1.area == 25
        assert s2.hull_area == pytest.approx(s1.hull_area, rel=1e-9)
