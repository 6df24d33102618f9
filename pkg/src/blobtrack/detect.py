"""Two-phase distribution-based point-outlier detection on normalized density.

The candidate set is built in three nested stages: the ROI domain, the
relative-high-density survivors of the first sigma test, and the floor-filtered
good candidates that feed component labeling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, NumericalError, StatisticsError
from .mesh import Frame


class Pooling(enum.Enum):
    PER_PLANE = "per-plane"
    POOLED = "pooled-across-planes"


@dataclass(frozen=True)
class DetectionParams:
    """Thresholding knobs for the two-phase point-outlier test.

    alpha, beta scale the first- and second-stage standard deviations;
    d_ma and d_mr are the absolute and relative density floors.
    """

    alpha: float = 2.0
    beta: float = 1.0
    d_ma: float = 2.05
    d_mr: float = 1.2
    pooling: Pooling = Pooling.POOLED

    def __post_init__(self):
        for name in ("alpha", "beta", "d_ma", "d_mr"):
            if not getattr(self, name) > 0:
                raise ArgumentError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class FrameStats:
    mu: float
    sigma: float
    mu2: float
    sigma2: float


@dataclass(frozen=True)
class CandidateSet:
    """Final candidate mask plus the sizes of both intermediate stages."""

    mask: np.ndarray  # bool, final (stage-3) membership per vertex
    stage2_count: int
    stage3_count: int

    def __post_init__(self):
        self.mask.setflags(write=False)


def normalize(frame, baseline):
    """Divide a frame point-wise by the baseline (initial) frame."""
    if frame.values.shape != baseline.values.shape:
        raise ArgumentError(
            f"frame length {frame.values.shape[0]} != baseline length "
            f"{baseline.values.shape[0]}"
        )
    zero = np.flatnonzero(baseline.values == 0.0)
    if zero.size:
        raise NumericalError(f"baseline is zero at vertex {zero[0]}")
    return Frame(
        time_index=frame.time_index,
        plane_index=frame.plane_index,
        values=frame.values / baseline.values,
        dt=frame.dt,
    )


def moments(values, mask=None):
    """Population mean and standard deviation over the masked vertices."""
    values = np.asarray(values, dtype=np.float64)
    if mask is not None:
        values = values[np.asarray(mask, dtype=bool)]
    if values.size < 2:
        raise StatisticsError(f"need at least 2 values for moments, got {values.size}")
    return float(values.mean()), float(values.std())


def phase1(values, mu, sigma, params):
    """First sigma test: relative high-density vertices (strict inequality)."""
    return np.asarray(values) - mu > params.alpha * sigma


def phase2(values, stage2_mask, mu2, sigma2, params):
    """Second sigma test, restricted to phase-1 survivors."""
    return stage2_mask & (np.asarray(values) - mu2 > params.beta * sigma2)


def floor_threshold(mu2, params):
    """The density-floor value for a given stage-2 mean."""
    return max(params.d_ma, params.d_mr * mu2)


def density_floor(values, mask, mu2, params):
    """Absolute/relative density floor applied on top of the sigma tests."""
    return mask & (np.asarray(values) > floor_threshold(mu2, params))


def detect_candidates(frame, baseline, params):
    """Full per-frame candidate detection: normalize, two sigma tests, floor.

    Returns the candidate set and the four stage statistics. An empty
    phase-1 stage yields an empty candidate set (not an error).
    """
    stages = detect_candidates_pooled([frame], [baseline], params)
    return stages[0]


def detect_candidates_pooled(frames, baselines, params):
    """Detect candidates over all poloidal planes of one time frame.

    With pooled mode the stage statistics are computed over the union of
    all planes' vertices; per-plane mode computes them per frame. Returns
    one (CandidateSet, FrameStats) pair per input frame, in order.
    """
    if len(frames) != len(baselines):
        raise ArgumentError("frames and baselines must pair up")
    norm = [normalize(f, b).values for f, b in zip(frames, baselines)]
    return candidates_from_normalized(norm, params)


def candidates_from_normalized(norm, params):
    """Candidate detection on already-normalized per-plane value arrays."""
    if not norm:
        return []
    if params.pooling is Pooling.POOLED and len(norm) > 1:
        groups = [list(range(len(norm)))]
    else:
        groups = [[i] for i in range(len(norm))]

    out = [None] * len(norm)
    for group in groups:
        pooled = np.concatenate([norm[i] for i in group])
        mu, sigma = moments(pooled)
        masks2 = [phase1(norm[i], mu, sigma, params) for i in group]
        n2 = sum(int(m.sum()) for m in masks2)
        if n2 < 2:
            # degenerate or empty high-density stage: no candidates
            mu2, sigma2 = mu, sigma
            masks3 = [np.zeros_like(m) for m in masks2]
        else:
            pooled2 = np.concatenate([norm[i][m] for i, m in zip(group, masks2)])
            mu2, sigma2 = moments(pooled2)
            masks3 = [
                density_floor(
                    norm[i], phase2(norm[i], m, mu2, sigma2, params), mu2, params
                )
                for i, m in zip(group, masks2)
            ]
        stats = FrameStats(mu=mu, sigma=sigma, mu2=mu2, sigma2=sigma2)
        for i, m2, m3 in zip(group, masks2, masks3):
            out[i] = (
                CandidateSet(
                    mask=m3, stage2_count=int(m2.sum()), stage3_count=int(m3.sum())
                ),
                stats,
            )
    return out


def fit_distribution(values):
    """Fit Gumbel and log-normal families by maximum likelihood.

    Exploratory utility for choosing quantile multipliers; not on the
    detection path. Returns a dict with both fits and the best family.
    """
    from scipy import stats as sps

    values = np.asarray(values, dtype=np.float64)
    if values.size < 30:
        raise StatisticsError(f"need at least 30 samples, got {values.size}")
    if values.std() == 0:
        raise StatisticsError("degenerate sample: zero variance")
    if (values <= 0).any():
        raise StatisticsError("log-normal fit requires strictly positive samples")

    gumbel_loc, gumbel_scale = sps.gumbel_r.fit(values)
    gumbel_ll = float(sps.gumbel_r.logpdf(values, gumbel_loc, gumbel_scale).sum())

    logs = np.log(values)
    ln_mu, ln_sigma = float(logs.mean()), float(logs.std())
    ln_ll = float(
        sps.lognorm.logpdf(values, s=ln_sigma, scale=np.exp(ln_mu)).sum()
    )

    best = "log-normal" if ln_ll > gumbel_ll else "extreme-value"
    return {
        "extreme-value": {
            "loc": float(gumbel_loc),
            "scale": float(gumbel_scale),
            "log_likelihood": gumbel_ll,
        },
        "log-normal": {
            "mu": ln_mu,
            "sigma": ln_sigma,
            "log_likelihood": ln_ll,
        },
        "best": best,
    }
