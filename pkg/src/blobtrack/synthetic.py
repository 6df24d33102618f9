"""Synthetic frame generator with ground-truth labels for validation.

Builds a structured triangulated grid, a smooth positive background, and a
stream of frames whose normalized field is background noise plus drifting
Gaussian bumps. Frame 0 is the bump-free, noise-free baseline. Fully
deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .container import write_container
from .errors import ArgumentError
from .mesh import TriMesh


@dataclass(frozen=True)
class BumpTruth:
    """One injected bump: peak normalized density, width, linear motion."""

    amplitude: float
    width: float
    start_center: tuple  # (r, z) at time index 1
    velocity: tuple      # (dr, dz) per frame

    def center_at(self, time_index):
        t = time_index - 1
        return (
            self.start_center[0] + self.velocity[0] * t,
            self.start_center[1] + self.velocity[1] * t,
        )


@dataclass(frozen=True)
class GroundTruth:
    """Per-bump truth plus per-frame member masks on the source mesh."""

    bumps: tuple
    # masks[t][k]: bool array over source vertices, bump k, time t (t >= 1)
    masks: dict = field(default_factory=dict, compare=False)
    noise_sigma: float = 0.0

    def bump_centers(self, time_index):
        return [b.center_at(time_index) for b in self.bumps]


@dataclass(frozen=True)
class SyntheticDataset:
    mesh: TriMesh
    frames: np.ndarray  # (F, V), raw (unnormalized) scalars, time 0 = baseline
    dt: float
    truth: GroundTruth

    def write(self, path, encoding="binary"):
        return write_container(
            path, self.mesh, self.frames, self.dt, planes=1, encoding=encoding
        )


def grid_mesh(r_range=(0.0, 2.0), z_range=(0.0, 1.0), spacing=0.02):
    """Structured triangulated rectangle: two triangles per grid cell."""
    nr = int(round((r_range[1] - r_range[0]) / spacing)) + 1
    nz = int(round((z_range[1] - z_range[0]) / spacing)) + 1
    r = np.linspace(r_range[0], r_range[1], nr)
    z = np.linspace(z_range[0], z_range[1], nz)
    rr, zz = np.meshgrid(r, z, indexing="ij")
    verts = np.stack([rr.ravel(), zz.ravel()], axis=1)

    i, j = np.meshgrid(np.arange(nr - 1), np.arange(nz - 1), indexing="ij")
    v00 = (i * nz + j).ravel()
    v01 = v00 + 1
    v10 = v00 + nz
    v11 = v10 + 1
    tris = np.concatenate(
        [np.stack([v00, v10, v11], axis=1), np.stack([v00, v11, v01], axis=1)]
    )
    return TriMesh(verts, tris)


def generate_synthetic(
    bump_count=3,
    frames=64,
    seed=0,
    noise_sigma=0.01,
    amplitude=3.0,
    width=0.05,
    drift=(0.02, 0.0),
    r_range=(0.0, 2.0),
    z_range=(0.0, 1.0),
    spacing=0.02,
    dt=2.5e-6,
    max_jump=0.04,
):
    """Generate a synthetic dataset with known bump ground truth.

    ``amplitude`` is the peak normalized density of each bump (scalar or a
    (low, high) range sampled per bump); ``drift`` is per-frame motion and
    must stay below ``max_jump`` so the scenario is trackable (pass
    ``max_jump=None`` to skip the check). Frame 0 is the baseline.
    """
    if frames < 1:
        raise ArgumentError(f"need at least 1 frame, got {frames}")
    if not width > spacing:
        raise ArgumentError(
            f"bump width {width} must exceed mesh spacing {spacing}"
        )
    step = float(np.hypot(*drift))
    if max_jump is not None and bump_count > 0 and step >= max_jump:
        raise ArgumentError(
            f"drift per frame {step} must stay below max_jump {max_jump}"
        )

    rng = np.random.default_rng(seed)
    mesh = grid_mesh(r_range, z_range, spacing)
    r, z = mesh.vertices[:, 0], mesh.vertices[:, 1]

    # smooth positive raw background; normalized background is exactly 1
    background = 1.0 + 0.5 * np.exp(
        -((r - np.mean(r_range)) ** 2 + (z - np.mean(z_range)) ** 2)
    )

    # bump start positions: clear of the boundary, spread across z, with
    # room to drift for the whole run
    total_drift = (frames - 1) * np.asarray(drift, dtype=np.float64)
    margin = 3.0 * width
    lo = np.array([r_range[0] + margin, z_range[0] + margin])
    hi = np.array([r_range[1] - margin, z_range[1] - margin])
    lo = lo - np.minimum(total_drift, 0.0)
    hi = hi - np.maximum(total_drift, 0.0)
    if bump_count > 0 and not (lo < hi).all():
        raise ArgumentError(
            "domain too small for the requested drift and frame count"
        )

    bumps = []
    for k in range(bump_count):
        if np.isscalar(amplitude):
            amp = float(amplitude)
        else:
            amp = float(rng.uniform(amplitude[0], amplitude[1]))
        start_r = float(rng.uniform(lo[0], hi[0]))
        frac = (k + 0.5) / bump_count
        start_z = float(lo[1] + frac * (hi[1] - lo[1]))
        bumps.append(
            BumpTruth(
                amplitude=amp,
                width=width,
                start_center=(start_r, start_z),
                velocity=tuple(float(v) for v in drift),
            )
        )

    label_floor = max(3.0 * noise_sigma, 0.05)
    values = np.empty((frames, mesh.vertex_count))
    values[0] = background
    masks = {}
    for t in range(1, frames):
        norm = np.ones(mesh.vertex_count)
        if noise_sigma > 0:
            norm += rng.normal(0.0, noise_sigma, mesh.vertex_count)
        frame_masks = []
        for bump in bumps:
            cr, cz = bump.center_at(t)
            d2 = (r - cr) ** 2 + (z - cz) ** 2
            contribution = (bump.amplitude - 1.0) * np.exp(-d2 / (2.0 * bump.width**2))
            norm += contribution
            frame_masks.append(contribution >= label_floor)
        masks[t] = frame_masks
        values[t] = background * norm

    truth = GroundTruth(bumps=tuple(bumps), masks=masks, noise_sigma=noise_sigma)
    return SyntheticDataset(mesh=mesh, frames=values, dt=dt, truth=truth)


def match_blobs_to_truth(blobs, truth, time_index, tolerance=None):
    """Greedy one-to-one matching of detected blobs to injected bumps.

    A blob matches a bump when its center lies within ``tolerance``
    (default 2x bump width) of the true center. Returns
    (matched bump indices, unmatched blob list).
    """
    centers = truth.bump_centers(time_index)
    pairs = []
    for bi, blob in enumerate(blobs):
        c = blob.summary.center
        for ki, (cr, cz) in enumerate(centers):
            tol = tolerance if tolerance is not None else 2.0 * truth.bumps[ki].width
            dist = np.hypot(c[0] - cr, c[1] - cz)
            if dist <= tol:
                pairs.append((dist, bi, ki))
    pairs.sort()
    matched_bumps = set()
    matched_blobs = set()
    for _, bi, ki in pairs:
        if bi in matched_blobs or ki in matched_bumps:
            continue
        matched_blobs.add(bi)
        matched_bumps.add(ki)
    unmatched = [b for i, b in enumerate(blobs) if i not in matched_blobs]
    return matched_bumps, unmatched
