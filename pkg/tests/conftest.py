import numpy as np
import pytest
from scipy.spatial import Delaunay

from blobtrack.mesh import TriMesh


def random_delaunay_mesh(rng, n_points=40):
    """Geometrically valid random triangulation (no duplicate triangles)."""
    pts = rng.random((n_points, 2))
    tri = Delaunay(pts)
    return TriMesh(pts, tri.simplices.astype(np.int64))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
