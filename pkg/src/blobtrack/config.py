"""Parameter-file loading: shipped defaults plus optional user overrides."""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from importlib import resources
from pathlib import Path

from .detect import DetectionParams, Pooling
from .errors import InputError
from .label import BlobParams
from .track import TrackParams


def default_parameter_text():
    return resources.files("blobtrack").joinpath("defaults.toml").read_text()


def load_parameter_file(path=None):
    """Parse a TOML parameter file merged over the shipped defaults.

    Returns a flat dict with keys detection, blobs, tracking, mesh.
    """
    merged = tomllib.loads(default_parameter_text())
    if path is not None:
        try:
            user = tomllib.loads(Path(path).read_text())
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise InputError(f"cannot read parameter file {path}: {exc}") from exc
        for section, values in user.items():
            if section not in merged:
                raise InputError(f"unknown parameter section [{section}]")
            for key, value in values.items():
                if key not in merged[section]:
                    raise InputError(f"unknown parameter {section}.{key}")
                merged[section][key] = value
    return merged


def build_params(raw):
    """Turn a parameter dict into the three typed parameter objects."""
    d = raw["detection"]
    detection = DetectionParams(
        alpha=d["alpha"],
        beta=d["beta"],
        d_ma=d["min_abs_density"],
        d_mr=d["min_rel_density"],
        pooling=Pooling(d["pooling"]),
    )
    b = raw["blobs"]
    blobs = BlobParams(
        min_area=b["min_area"],
        median_abs_min=b["median_abs_min"],
        median_rel_min=b["median_rel_min"],
        median_abs_max=b["median_abs_max"],
    )
    t = raw["tracking"]
    tracking = TrackParams(
        max_jump=t["max_jump"],
        max_area_change=t["max_area_change"],
        min_frames=t["min_frames"],
        max_frames=t["max_frames"],
        area_gate_mode=t["area_gate_mode"],
    )
    return detection, blobs, tracking, raw["mesh"]["refine_levels"]
