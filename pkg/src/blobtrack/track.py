"""Greedy nearest-center association of blobs across consecutive frames.

Tracks live per poloidal plane. A blob may extend a track only when the
center jump and the area change both pass their gates; among eligible
pairs the globally closest pair is committed first. Ended tracks shorter
than the minimum length are dropped, never reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ArgumentError, ContractError
from .geometry import BlobSummary


@dataclass(frozen=True)
class TrackParams:
    max_jump: float = 0.04
    max_area_change: float = 25.0
    min_frames: int = 3
    max_frames: int = 100
    # "relative" reads max_area_change as a fraction of the previous area
    area_gate_mode: str = "absolute"

    def __post_init__(self):
        if not (
            self.max_jump > 0
            and self.max_area_change > 0
            and self.min_frames > 0
            and self.max_frames > 0
        ):
            raise ArgumentError("all tracking parameters must be positive")
        if self.min_frames > self.max_frames:
            raise ArgumentError(
                f"min_frames {self.min_frames} > max_frames {self.max_frames}"
            )
        if self.area_gate_mode not in ("absolute", "relative"):
            raise ArgumentError(f"unknown area gate mode {self.area_gate_mode!r}")


@dataclass(frozen=True)
class Blob:
    """One detected blob in one frame."""

    time_index: int
    plane_index: int
    blob_id: int  # dense per-frame id, used for deterministic tie-breaks
    summary: BlobSummary
    median_density: float
    members: tuple = ()


@dataclass
class Track:
    track_id: int
    plane_index: int
    blobs: list = field(default_factory=list)  # [(time_index, Blob)]
    velocities: list = field(default_factory=list)  # [(dr/dt, dz/dt)]
    status: str = "active"

    @property
    def length(self):
        return len(self.blobs)

    @property
    def last_blob(self):
        return self.blobs[-1][1]

    @property
    def last_time(self):
        return self.blobs[-1][0]

    def mean_velocity(self):
        if not self.velocities:
            return (0.0, 0.0)
        n = len(self.velocities)
        return (
            sum(v[0] for v in self.velocities) / n,
            sum(v[1] for v in self.velocities) / n,
        )


def _center_distance(a, b):
    return math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])


def _gates_pass(blob, track, params):
    prev = track.last_blob
    dist = _center_distance(blob.summary, prev.summary)
    if dist > params.max_jump:
        return False, dist
    darea = abs(blob.summary.area - prev.summary.area)
    if params.area_gate_mode == "relative":
        limit = params.max_area_change * prev.summary.area
    else:
        limit = params.max_area_change
    return darea <= limit, dist


def match(current, active_tracks, params):
    """Greedy one-to-one assignment of current blobs to active tracks.

    Returns {blob_id: track_id or None}; None means the blob starts a new
    track. Ties in center distance break on lower blob id, then lower
    track id, so results are deterministic.
    """
    times = {b.time_index for b in current}
    if len(times) > 1:
        raise ContractError(f"mixed time indices in current blobs: {sorted(times)}")
    pairs = []
    for blob in current:
        for track in active_tracks:
            if track.plane_index != blob.plane_index:
                continue
            ok, dist = _gates_pass(blob, track, params)
            if ok:
                pairs.append((dist, blob.blob_id, track.track_id))
    pairs.sort()

    assignment = {b.blob_id: None for b in current}
    used_tracks = set()
    used_blobs = set()
    for dist, blob_id, track_id in pairs:
        if blob_id in used_blobs or track_id in used_tracks:
            continue
        assignment[blob_id] = track_id
        used_blobs.add(blob_id)
        used_tracks.add(track_id)
    return assignment


class Tracker:
    """Sequential track state machine consuming per-frame detections in order."""

    def __init__(self, params, dt):
        if not dt > 0:
            raise ArgumentError(f"dt must be positive, got {dt}")
        self.params = params
        self.dt = dt
        self._active = []
        self._finished = []
        self._next_id = 0
        self._last_time = None

    def step(self, time_index, blobs):
        """Advance one frame: extend, end, and spawn tracks.

        Frames must arrive in strictly increasing time order; a track whose
        blob disappeared for one frame ends (no coasting).
        """
        if self._last_time is not None and time_index <= self._last_time:
            raise ContractError(
                f"frame {time_index} arrived after frame {self._last_time}"
            )
        bad = [b for b in blobs if b.time_index != time_index]
        if bad:
            raise ContractError(
                f"blob carries time index {bad[0].time_index}, expected {time_index}"
            )

        # tracks not updated last frame can no longer be extended
        if self._last_time is not None and time_index > self._last_time + 1:
            self._end_tracks(self._active)
            self._active = []

        assignment = match(blobs, self._active, self.params)
        matched_tracks = set()
        by_id = {t.track_id: t for t in self._active}
        for blob in sorted(blobs, key=lambda b: b.blob_id):
            track_id = assignment[blob.blob_id]
            if track_id is None:
                track = Track(track_id=self._next_id, plane_index=blob.plane_index)
                self._next_id += 1
                track.blobs.append((time_index, blob))
                self._active.append(track)
                matched_tracks.add(track.track_id)
            else:
                track = by_id[track_id]
                prev = track.last_blob
                track.blobs.append((time_index, blob))
                track.velocities.append(
                    (
                        (blob.summary.center[0] - prev.summary.center[0]) / self.dt,
                        (blob.summary.center[1] - prev.summary.center[1]) / self.dt,
                    )
                )
                matched_tracks.add(track_id)

        still_active = []
        to_end = []
        for track in self._active:
            if track.track_id not in matched_tracks and track.last_time < time_index:
                to_end.append(track)
            elif track.length >= self.params.max_frames:
                to_end.append(track)
            else:
                still_active.append(track)
        self._end_tracks(to_end)
        self._active = still_active
        self._last_time = time_index

    def _end_tracks(self, tracks):
        for track in tracks:
            track.status = "ended"
            if track.length >= self.params.min_frames:
                self._finished.append(track)
            # shorter tracks are anomalies: deleted, never reported

    def finalize(self):
        """End all active tracks and return the pruned, sorted report."""
        self._end_tracks(self._active)
        self._active = []
        report = sorted(self._finished, key=lambda t: (t.blobs[0][0], t.track_id))
        return report
