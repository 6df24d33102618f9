import numpy as np
import pytest

from blobtrack.errors import ArgumentError, StructuralError
from blobtrack.mesh import (
    Frame,
    RefinementPlan,
    RegionOfInterest,
    TriMesh,
    build_edges,
    refine,
    restrict,
    restrict_values,
)

from conftest import random_delaunay_mesh


def brute_force_edges(triangles):
    seen = set()
    for a, b, c in triangles:
        for u, v in ((a, b), (a, c), (b, c), (b, a), (c, a), (c, b)):
            seen.add((min(u, v), max(u, v)))
    return sorted(seen)


class TestTriMesh:
    def test_single_triangle_edges(self):
        m = TriMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
        assert m.edges.tolist() == [[0, 1], [0, 2], [1, 2]]
        assert m.edge_count == 3

    def test_shared_edge_dedup(self):
        m = TriMesh([(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 1, 2), (1, 2, 3)])
        assert m.edge_count == 5
        assert [1, 2] in m.edges.tolist()

    def test_out_of_range_vertex(self):
        with pytest.raises(StructuralError, match="triangle 0"):
            TriMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 5)])

    def test_repeated_vertex_in_triangle(self):
        with pytest.raises(StructuralError):
            TriMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 1)])

    def test_empty_mesh(self):
        with pytest.raises(StructuralError):
            TriMesh(np.empty((0, 2)), np.empty((0, 3), dtype=int))

    def test_edges_match_brute_force(self, rng):
        for _ in range(5):
            m = random_delaunay_mesh(rng, 80)
            assert m.edges.tolist() == [
                list(e) for e in brute_force_edges(m.triangles)
            ]

    def test_edge_list_independent_of_triangle_order(self, rng):
        m = random_delaunay_mesh(rng, 50)
        perm = rng.permutation(m.triangle_count)
        m2 = TriMesh(m.vertices, m.triangles[perm])
        assert np.array_equal(m.edges, m2.edges)

    def test_euler_characteristic_of_disk(self, rng):
        for _ in range(5):
            m = random_delaunay_mesh(rng, 60)
            assert m.vertex_count - m.edge_count + m.triangle_count == 1

    def test_build_edges_index_map(self, rng):
        m = random_delaunay_mesh(rng, 30)
        _, tri_edge = build_edges(m)
        for t, (a, b, c) in enumerate(m.triangles):
            for k, pair in enumerate(((a, b), (a, c), (b, c))):
                lo, hi = min(pair), max(pair)
                assert m.edges[tri_edge[t, k]].tolist() == [lo, hi]


class TestRefine:
    def test_single_triangle_midpoints(self):
        m = TriMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
        rm, vals = refine(m, [1.0, 2.0, 3.0])
        assert rm.vertex_count == 6
        assert rm.triangle_count == 4
        assert sorted(vals[3:].tolist()) == [1.5, 2.0, 2.5]

    def test_quadruples_triangle_count(self, rng):
        m = random_delaunay_mesh(rng, 40)
        rm, _ = refine(m, np.zeros(m.vertex_count))
        assert rm.triangle_count == 4 * m.triangle_count

    def test_two_levels_compose(self):
        m = TriMesh([(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 1, 2), (1, 2, 3)])
        field = np.array([1.0, 2.0, 3.0, 4.0])
        rm2, v2 = refine(m, field, levels=2)
        step1, f1 = refine(m, field, levels=1)
        step2, f2 = refine(step1, f1, levels=1)
        assert rm2.triangle_count == 16 * m.triangle_count
        assert np.array_equal(rm2.vertices, step2.vertices)
        assert np.array_equal(v2, f2)
        assert np.array_equal(v2[:4], field)

    def test_level1_counts(self, rng):
        for _ in range(10):
            m = random_delaunay_mesh(rng, int(rng.integers(10, 80)))
            rm, _ = refine(m, np.zeros(m.vertex_count))
            assert rm.vertex_count == m.vertex_count + m.edge_count
            assert rm.triangle_count == 4 * m.triangle_count
            assert rm.edge_count == 2 * m.edge_count + 3 * m.triangle_count

    def test_preserves_originals_and_range(self, rng):
        m = random_delaunay_mesh(rng, 50)
        field = rng.random(m.vertex_count)
        _, vals = refine(m, field)
        assert np.array_equal(vals[: m.vertex_count], field)
        assert vals.min() >= field.min() and vals.max() <= field.max()

    def test_level_zero_rejected(self):
        m = TriMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
        with pytest.raises(ArgumentError):
            refine(m, [0.0, 0.0, 0.0], levels=0)

    def test_no_triangles_rejected(self):
        m = TriMesh([(0, 0), (1, 0)], np.empty((0, 3), dtype=int))
        with pytest.raises(StructuralError):
            refine(m, [0.0, 0.0], levels=1)

    def test_refinement_plan_matches_refine(self, rng):
        m = random_delaunay_mesh(rng, 40)
        plan = RefinementPlan(m, levels=2)
        field = rng.random(m.vertex_count)
        rm, vals = refine(m, field, levels=2)
        assert np.array_equal(plan.refined.vertices, rm.vertices)
        assert np.array_equal(plan.refine_values(field), vals)


class TestRestrict:
    def test_whole_mesh_identity(self, rng):
        m = random_delaunay_mesh(rng, 30)
        roi = RegionOfInterest(-1, 2, -1, 2)
        rm, index_map = restrict(m, roi)
        assert rm.vertex_count == m.vertex_count
        assert np.array_equal(index_map, np.arange(m.vertex_count))
        assert np.array_equal(rm.triangles, m.triangles)

    def test_empty_roi_errors(self, rng):
        m = random_delaunay_mesh(rng, 30)
        with pytest.raises(StructuralError, match="ROI excludes entire mesh"):
            restrict(m, RegionOfInterest(5, 6, 5, 6))

    def test_left_half_matches_point_in_box(self, rng):
        m = random_delaunay_mesh(rng, 60)
        roi = RegionOfInterest(0.0, 0.5, 0.0, 1.0)
        rm, index_map = restrict(m, roi)
        expect = (
            (m.vertices[:, 0] >= 0)
            & (m.vertices[:, 0] <= 0.5)
            & (m.vertices[:, 1] >= 0)
            & (m.vertices[:, 1] <= 1.0)
        )
        assert np.array_equal(index_map >= 0, expect)
        assert rm.vertex_count == expect.sum()

    def test_restrict_then_edges_equals_edge_filter(self, rng):
        m = random_delaunay_mesh(rng, 40)
        roi = RegionOfInterest(0.0, 0.6, 0.0, 0.6)
        rm, index_map = restrict(m, roi)
        # edges of the restricted mesh must be a subset of the filtered
        # originals (triangle-based restriction can drop boundary edges
        # whose triangles lost a vertex)
        kept = {
            (index_map[a], index_map[b])
            for a, b in m.edges
            if index_map[a] >= 0 and index_map[b] >= 0
        }
        restricted = {tuple(e) for e in rm.edges.tolist()}
        assert restricted <= kept

    def test_restrict_values(self, rng):
        m = random_delaunay_mesh(rng, 30)
        roi = RegionOfInterest(0.0, 0.5, 0.0, 1.0)
        _, index_map = restrict(m, roi)
        field = rng.random(m.vertex_count)
        assert np.array_equal(restrict_values(field, index_map), field[index_map >= 0])

    def test_invalid_roi(self):
        with pytest.raises(ArgumentError):
            RegionOfInterest(1.0, 0.5, 0.0, 1.0)


class TestFrame:
    def test_length_and_dt_validation(self):
        Frame(0, 0, np.ones(3), 2.5e-6)
        with pytest.raises(ArgumentError):
            Frame(0, 0, np.ones(3), 0.0)
