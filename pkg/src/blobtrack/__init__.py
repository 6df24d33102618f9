"""Detection and tracking of coherent density structures (blob-filaments)
on unstructured triangular meshes, with a data-parallel per-frame pipeline.
"""

__version__ = "0.1.0"

from .container import ContainerReader, read_container, write_container, write_results
from .detect import (
    CandidateSet,
    DetectionParams,
    FrameStats,
    Pooling,
    candidates_from_normalized,
    detect_candidates,
    detect_candidates_pooled,
    fit_distribution,
)
from .errors import (
    ArgumentError,
    BlobtrackError,
    ContractError,
    InputError,
    NumericalError,
    StatisticsError,
    StructuralError,
)
from .geometry import BlobSummary, blob_area, convex_hull, summarize, weighted_center
from .label import BlobCandidate, BlobParams, accept_blobs, label_components
from .mesh import (
    Frame,
    RefinementPlan,
    RegionOfInterest,
    TriMesh,
    build_edges,
    refine,
    restrict,
    restrict_values,
)
from .pipeline import RunConfig, TimingReport, benchmark, partition, run
from .synthetic import GroundTruth, SyntheticDataset, generate_synthetic, grid_mesh
from .track import Blob, Track, TrackParams, Tracker, match
