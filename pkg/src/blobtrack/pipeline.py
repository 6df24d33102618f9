"""End-to-end run orchestration: parallel per-frame detection feeding a
sequential tracker in frame order, plus the scaling benchmark harness.

Frames are independent work units. Workers share the immutable mesh,
parameters and baseline frame (materialized once per worker at startup);
results flow through a bounded ordered buffer so the tracker always sees
ascending time indices regardless of completion order.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field, replace

import multiprocessing as mp

import numpy as np

from .container import ContainerReader, write_container
from .detect import DetectionParams, candidates_from_normalized
from .errors import (
    ArgumentError,
    BlobtrackError,
    ContractError,
    InputError,
    NumericalError,
)
from .geometry import summarize
from .label import BlobParams, accept_blobs, label_components
from .mesh import RefinementPlan, restrict, restrict_values
from .track import Blob, Tracker, TrackParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    input_path: str
    roi: object = None  # RegionOfInterest or None for the whole mesh
    t_start: int = 1
    t_end: int = None  # inclusive; None = last time index in the container
    worker_count: int = 1
    refine_levels: int = 1
    baseline_time: int = 0
    detection: DetectionParams = field(default_factory=DetectionParams)
    blobs: BlobParams = field(default_factory=BlobParams)
    tracking: TrackParams = field(default_factory=TrackParams)

    def __post_init__(self):
        if self.worker_count < 1:
            raise ArgumentError(f"worker_count must be >= 1, got {self.worker_count}")
        if self.t_end is not None and self.t_start > self.t_end:
            raise ArgumentError(
                f"t_start {self.t_start} > t_end {self.t_end}"
            )


@dataclass
class TimingReport:
    total_seconds: float = 0.0
    baseline_seconds: float = 0.0
    per_frame_seconds: dict = field(default_factory=dict)
    per_worker_frames: dict = field(default_factory=dict)
    worker_count: int = 1

    def detection_seconds(self):
        return sum(self.per_frame_seconds.values())


@dataclass
class RunResult:
    blobs_per_frame: dict  # time_index -> list of Blob
    tracks: list
    timing: TimingReport
    skipped_frames: dict = field(default_factory=dict)  # time_index -> message


def partition(frame_count, worker_count):
    """Contiguous per-worker ranges covering [0, frame_count) exactly once.

    Range sizes differ by at most one; earlier workers take the larger
    ranges. Returns a list of (start, stop) pairs, one per worker.
    """
    if frame_count < 1 or worker_count < 1:
        raise ArgumentError("frame_count and worker_count must be >= 1")
    base, extra = divmod(frame_count, worker_count)
    ranges = []
    start = 0
    for w in range(worker_count):
        size = base + (1 if w < extra else 0)
        ranges.append((start, start + size))
        start += size
    return ranges


class OrderedResultBuffer:
    """Reorders out-of-order (index, item) arrivals into a strict sequence.

    Bounded: ``push`` refuses entries once ``capacity`` items are waiting,
    which is the backpressure point for eager producers. ``pop_ready``
    drains the maximal in-order prefix.
    """

    def __init__(self, start, capacity):
        if capacity < 1:
            raise ArgumentError(f"capacity must be >= 1, got {capacity}")
        self._next = start
        self._capacity = capacity
        self._waiting = {}

    @property
    def next_index(self):
        return self._next

    def __len__(self):
        return len(self._waiting)

    def full(self):
        return len(self._waiting) >= self._capacity

    def push(self, index, item):
        if index < self._next:
            raise ContractError(f"index {index} already consumed (next {self._next})")
        if index in self._waiting:
            raise ContractError(f"duplicate index {index}")
        if self.full() and index != self._next:
            raise ContractError(f"buffer full ({self._capacity} waiting)")
        self._waiting[index] = item

    def pop_ready(self):
        out = []
        while self._next in self._waiting:
            out.append((self._next, self._waiting.pop(self._next)))
            self._next += 1
        return out


# Per-worker process state, set up once and shared read-only by every
# frame task the worker executes.
_WORKER = {}


def _worker_init(input_path, roi, refine_levels, baseline_time, detection, blobs):
    t0 = time.perf_counter()
    reader = ContainerReader(input_path)
    mesh = reader.mesh
    if roi is not None:
        mesh, index_map = restrict(mesh, roi)
    else:
        index_map = None
    plan = RefinementPlan(mesh, refine_levels) if refine_levels > 0 else None
    baselines = []
    for plane in range(reader.plane_count):
        values = reader.read_frame(baseline_time, plane).values
        if index_map is not None:
            values = restrict_values(values, index_map)
        baselines.append(values)
    _WORKER.update(
        reader=reader,
        index_map=index_map,
        plan=plan,
        mesh=plan.refined if plan is not None else mesh,
        baselines=baselines,
        detection=detection,
        blobs=blobs,
        init_seconds=time.perf_counter() - t0,
        frames_done=0,
    )


def _detect_one_frame(time_index):
    """Detection, labeling and geometry for every plane of one time frame."""
    w = _WORKER
    t0 = time.perf_counter()
    reader = w["reader"]
    try:
        norm = []
        for plane in range(reader.plane_count):
            values = reader.read_frame(time_index, plane).values
            if w["index_map"] is not None:
                values = restrict_values(values, w["index_map"])
            baseline = w["baselines"][plane]
            zero = np.flatnonzero(baseline == 0.0)
            if zero.size:
                raise NumericalError(f"baseline is zero at vertex {zero[0]}")
            n = values / baseline
            if w["plan"] is not None:
                n = w["plan"].refine_values(n)
            norm.append(n)

        stages = candidates_from_normalized(norm, w["detection"])
        mesh = w["mesh"]
        out = []
        for plane, (candidates, stats) in enumerate(stages):
            components = label_components(mesh, candidates, norm[plane])
            accepted = accept_blobs(components, stats.mu2, w["blobs"])
            for blob_id, comp in enumerate(accepted):
                coords = mesh.vertices[comp.members]
                dens = norm[plane][comp.members]
                out.append(
                    Blob(
                        time_index=time_index,
                        plane_index=plane,
                        blob_id=blob_id,
                        summary=summarize(coords, dens),
                        median_density=comp.median_density,
                        members=tuple(int(m) for m in comp.members),
                    )
                )
        error = None
    except BlobtrackError as exc:
        out, error = [], f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    w["frames_done"] += 1
    return time_index, out, error, elapsed, os.getpid(), w["init_seconds"]


def run(config):
    """Execute the full pipeline over [t_start, t_end].

    Per-frame failures are logged and leave the frame blob-free for the
    tracker; they never abort the run. Output is identical for any
    worker count.
    """
    wall0 = time.perf_counter()
    reader = ContainerReader(config.input_path)
    t_end = config.t_end if config.t_end is not None else reader.time_count - 1
    if not (0 <= config.t_start <= t_end < reader.time_count):
        raise InputError(
            f"time range [{config.t_start}, {t_end}] outside container "
            f"range [0, {reader.time_count})"
        )
    times = list(range(config.t_start, t_end + 1))

    tracker = Tracker(config.tracking, reader.dt)
    timing = TimingReport(worker_count=config.worker_count)
    blobs_per_frame = {}
    skipped = {}

    def consume(result):
        time_index, blobs, error, elapsed, pid, init_seconds = result
        timing.per_frame_seconds[time_index] = elapsed
        timing.per_worker_frames[pid] = timing.per_worker_frames.get(pid, 0) + 1
        timing.baseline_seconds = max(timing.baseline_seconds, init_seconds)
        if error is not None:
            logger.warning("frame %d skipped: %s", time_index, error)
            skipped[time_index] = error
            blobs = []
        blobs_per_frame[time_index] = blobs
        tracker.step(time_index, blobs)

    init_args = (
        config.input_path,
        config.roi,
        config.refine_levels,
        config.baseline_time,
        config.detection,
        config.blobs,
    )
    if config.worker_count == 1:
        _worker_init(*init_args)
        try:
            for t in times:
                consume(_detect_one_frame(t))
        finally:
            _WORKER.clear()
    else:
        window = 2 * config.worker_count
        buffer = OrderedResultBuffer(start=times[0], capacity=window)
        ctx = mp.get_context("fork" if "fork" in mp.get_all_start_methods() else "spawn")
        with ProcessPoolExecutor(
            max_workers=config.worker_count,
            mp_context=ctx,
            initializer=_worker_init,
            initargs=init_args,
        ) as pool:
            pending = set()
            it = iter(times)
            exhausted = False
            while pending or not exhausted:
                while not exhausted and len(pending) + len(buffer) < window:
                    try:
                        t = next(it)
                    except StopIteration:
                        exhausted = True
                        break
                    pending.add(pool.submit(_detect_one_frame, t))
                if not pending:
                    break
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    result = fut.result()
                    buffer.push(result[0], result)
                for _, result in buffer.pop_ready():
                    consume(result)

    tracks = tracker.finalize()
    timing.total_seconds = time.perf_counter() - wall0
    return RunResult(
        blobs_per_frame=blobs_per_frame,
        tracks=tracks,
        timing=timing,
        skipped_frames=skipped,
    )


def benchmark(config, workers, mode="strong", frames_per_worker=32, tmp_dir=None):
    """Sweep worker counts under strong or weak scaling.

    Strong mode reruns the configured time range at each worker count.
    Weak mode holds ``frames_per_worker`` fixed, replicating the input
    frames cyclically so each sweep point gets proportionally more data.
    Returns a list of row dicts with speedup and efficiency columns.
    """
    if mode not in ("strong", "weak"):
        raise ArgumentError(f"unknown benchmark mode {mode!r}")
    rows = []
    base_seconds = None
    for p in workers:
        if mode == "strong":
            cfg = replace(config, worker_count=p)
            frames = (
                (cfg.t_end if cfg.t_end is not None
                 else ContainerReader(cfg.input_path).time_count - 1)
                - cfg.t_start + 1
            )
        else:
            cfg = _weak_config(config, p, frames_per_worker, tmp_dir)
            frames = frames_per_worker * p
        result = run(cfg)
        seconds = result.timing.total_seconds
        if base_seconds is None:
            base_seconds = seconds
        if mode == "strong":
            speedup = base_seconds / seconds
        else:
            # weak scaling: ideal is constant time on p-fold data
            speedup = p * base_seconds / seconds
        rows.append(
            {
                "workers": p,
                "frames": frames,
                "seconds": seconds,
                "speedup": speedup,
                "efficiency": speedup / p,
            }
        )
    return rows


def _weak_config(config, p, frames_per_worker, tmp_dir):
    """Replicate the input container so worker p processes p x base frames."""
    import tempfile
    from pathlib import Path

    reader = ContainerReader(config.input_path)
    need = frames_per_worker * p + config.t_start
    base = np.stack([reader.read_values(i) for i in range(reader.frame_count)])
    work = base[config.t_start :]
    reps = int(np.ceil((need - config.t_start) / max(1, work.shape[0])))
    frames = np.concatenate([base[: config.t_start]] + [work] * reps)[:need]
    out_dir = Path(tmp_dir) if tmp_dir is not None else Path(tempfile.mkdtemp())
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"weak_{p}.fcf"
    write_container(
        path, reader.mesh, frames, reader.dt, planes=reader.plane_count
    )
    return replace(
        config,
        input_path=str(path),
        worker_count=p,
        t_end=config.t_start + frames_per_worker * p - 1,
    )


def format_scaling_table(rows, mode):
    """Render benchmark rows as a delimited text table."""
    lines = [f"# mode\t{mode}", "workers\tframes\tseconds\tspeedup\tefficiency"]
    for r in rows:
        lines.append(
            f"{r['workers']}\t{r['frames']}\t{r['seconds']:.6f}\t"
            f"{r['speedup']:.4f}\t{r['efficiency']:.4f}"
        )
    return "\n".join(lines) + "\n"


def format_timing_report(timing):
    """Render a timing report as a delimited text table."""
    lines = [
        "# blob detection timing",
        f"workers\t{timing.worker_count}",
        f"total_seconds\t{timing.total_seconds:.6f}",
        f"baseline_seconds\t{timing.baseline_seconds:.6f}",
        f"detection_seconds\t{timing.detection_seconds():.6f}",
        f"frames\t{len(timing.per_frame_seconds)}",
        "worker_pid\tframes",
    ]
    for pid in sorted(timing.per_worker_frames):
        lines.append(f"{pid}\t{timing.per_worker_frames[pid]}")
    return "\n".join(lines) + "\n"
