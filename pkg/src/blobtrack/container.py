"""On-disk frame container and result serialization.

Container layout: a human-readable text header terminated by a blank line,
then the payload. Binary payload is little-endian: V x 2 float64 vertex
coordinates, T x 3 uint32 triangle indices, then F arrays of V float64
scalars ordered by (time, plane). A plain-text payload encoding is also
accepted for hand-written fixtures.

Header keys (one ``key value`` pair per line after the magic line):
``vertices``, ``triangles``, ``frames``, ``planes``, ``dt``, ``units``.
The magic line is ``blobtrack-container <version> <binary|text>``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InputError
from .mesh import Frame, TriMesh

MAGIC = "blobtrack-container"
VERSION = 1


def write_container(path, mesh, frames, dt, planes=1, units="normalized", encoding="binary"):
    """Write a frame container.

    ``frames`` is an (F, V) array ordered by (time, plane): frame k holds
    time k // planes, plane k % planes.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[1] != mesh.vertex_count:
        raise InputError(
            f"frames must be (F, {mesh.vertex_count}), got {frames.shape}"
        )
    if frames.shape[0] % planes != 0:
        raise InputError(
            f"frame count {frames.shape[0]} not a multiple of plane count {planes}"
        )
    if not np.isfinite(frames).all():
        raise InputError("frames contain non-finite values")
    if encoding not in ("binary", "text"):
        raise InputError(f"unknown encoding {encoding!r}")

    header = (
        f"{MAGIC} {VERSION} {encoding}\n"
        f"vertices {mesh.vertex_count}\n"
        f"triangles {mesh.triangle_count}\n"
        f"frames {frames.shape[0]}\n"
        f"planes {planes}\n"
        f"dt {dt!r}\n"
        f"units {units}\n"
        "\n"
    )
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if encoding == "binary":
            fh.write(mesh.vertices.astype("<f8").tobytes())
            fh.write(mesh.triangles.astype("<u4").tobytes())
            fh.write(frames.astype("<f8").tobytes())
        else:
            lines = []
            for r, z in mesh.vertices:
                lines.append(f"{float(r)!r} {float(z)!r}")
            for a, b, c in mesh.triangles:
                lines.append(f"{int(a)} {int(b)} {int(c)}")
            for row in frames:
                lines.append(" ".join(repr(float(v)) for v in row))
            fh.write(("\n".join(lines) + "\n").encode("ascii"))
    return path


class ContainerReader:
    """Streaming and random-access reader for the frame container format.

    Iterating yields Frame objects in (time, plane) order; ``read_frame``
    seeks directly. The mesh is loaded eagerly at construction.
    """

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.exists():
            raise InputError(f"container not found: {self.path}")
        with open(self.path, "rb") as fh:
            header, self._payload_offset = self._read_header(fh)
        self.version = header["version"]
        self.encoding = header["encoding"]
        self.vertex_count = header["vertices"]
        self.triangle_count = header["triangles"]
        self.frame_count = header["frames"]
        self.plane_count = header["planes"]
        self.dt = header["dt"]
        self.units = header["units"]
        self.time_count = self.frame_count // self.plane_count
        self._load_mesh_and_layout()

    @staticmethod
    def _read_header(fh):
        line = fh.readline().decode("ascii", errors="replace").strip()
        parts = line.split()
        if len(parts) != 3 or parts[0] != MAGIC:
            raise InputError(f"not a {MAGIC} file (magic line {line!r})")
        if int(parts[1]) != VERSION:
            raise InputError(f"unknown container version {parts[1]}")
        if parts[2] not in ("binary", "text"):
            raise InputError(f"unknown container encoding {parts[2]!r}")
        header = {"version": int(parts[1]), "encoding": parts[2]}
        while True:
            raw = fh.readline()
            if not raw:
                raise InputError(
                    f"header not terminated by a blank line (offset {fh.tell()})"
                )
            line = raw.decode("ascii", errors="replace").strip()
            if not line:
                break
            key, _, value = line.partition(" ")
            header[key] = value
        try:
            for key in ("vertices", "triangles", "frames", "planes"):
                header[key] = int(header[key])
            header["dt"] = float(header["dt"])
            header.setdefault("units", "unspecified")
        except (KeyError, ValueError) as exc:
            raise InputError(f"malformed container header: {exc}") from exc
        if header["planes"] < 1 or header["frames"] % header["planes"] != 0:
            raise InputError(
                f"frame count {header['frames']} not a multiple of plane "
                f"count {header['planes']}"
            )
        return header, fh.tell()

    def _load_mesh_and_layout(self):
        v, t, f = self.vertex_count, self.triangle_count, self.frame_count
        if self.encoding == "binary":
            vert_bytes = v * 2 * 8
            tri_bytes = t * 3 * 4
            frame_bytes = self.vertex_count * 8
            expected = self._payload_offset + vert_bytes + tri_bytes + f * frame_bytes
            actual = self.path.stat().st_size
            if actual != expected:
                raise InputError(
                    f"container payload truncated or oversized: expected "
                    f"{expected} bytes, found {actual} (payload starts at "
                    f"byte {self._payload_offset})"
                )
            with open(self.path, "rb") as fh:
                fh.seek(self._payload_offset)
                verts = np.frombuffer(fh.read(vert_bytes), dtype="<f8").reshape(v, 2)
                tris = np.frombuffer(fh.read(tri_bytes), dtype="<u4").reshape(t, 3)
            self._frame_offset = self._payload_offset + vert_bytes + tri_bytes
            self._frame_bytes = frame_bytes
            self._text_frames = None
        else:
            with open(self.path, "rb") as fh:
                fh.seek(self._payload_offset)
                tokens = fh.read().decode("ascii").split("\n")
            tokens = [ln for ln in tokens if ln.strip()]
            need = v + t + f
            if len(tokens) != need:
                raise InputError(
                    f"text payload has {len(tokens)} lines, expected {need}"
                )
            verts = np.array(
                [[float(x) for x in ln.split()] for ln in tokens[:v]]
            ).reshape(v, 2)
            tris = np.array(
                [[int(x) for x in ln.split()] for ln in tokens[v : v + t]],
                dtype=np.int64,
            ).reshape(t, 3)
            self._text_frames = np.array(
                [[float(x) for x in ln.split()] for ln in tokens[v + t :]]
            ).reshape(f, v)
            if not np.isfinite(self._text_frames).all():
                raise InputError("container frames contain non-finite values")
        if not np.isfinite(verts).all():
            raise InputError("container vertices contain non-finite values")
        self.mesh = TriMesh(verts, tris.astype(np.int64))

    def read_values(self, frame_index):
        """Raw scalar array of one (time, plane)-ordered frame slot."""
        if not 0 <= frame_index < self.frame_count:
            raise InputError(
                f"frame index {frame_index} outside [0, {self.frame_count})"
            )
        if self._text_frames is not None:
            return self._text_frames[frame_index].copy()
        offset = self._frame_offset + frame_index * self._frame_bytes
        with open(self.path, "rb") as fh:
            fh.seek(offset)
            buf = fh.read(self._frame_bytes)
        if len(buf) != self._frame_bytes:
            raise InputError(
                f"short read at byte {offset}: expected {self._frame_bytes} "
                f"bytes, got {len(buf)}"
            )
        values = np.frombuffer(buf, dtype="<f8").copy()
        if not np.isfinite(values).all():
            raise InputError(f"non-finite values in frame slot {frame_index}")
        return values

    def read_frame(self, time_index, plane_index=0):
        """Frame at one (time, plane) coordinate."""
        if not 0 <= plane_index < self.plane_count:
            raise InputError(
                f"plane index {plane_index} outside [0, {self.plane_count})"
            )
        slot = time_index * self.plane_count + plane_index
        return Frame(
            time_index=time_index,
            plane_index=plane_index,
            values=self.read_values(slot),
            dt=self.dt,
        )

    def __iter__(self):
        for slot in range(self.frame_count):
            yield Frame(
                time_index=slot // self.plane_count,
                plane_index=slot % self.plane_count,
                values=self.read_values(slot),
                dt=self.dt,
            )


def read_container(path):
    """Open a container; returns (mesh, reader). The reader iterates frames."""
    reader = ContainerReader(path)
    return reader.mesh, reader


def _fmt_point(p):
    return f"{float(p[0])!r}:{float(p[1])!r}"


def write_results(blobs_per_frame, tracks, prefix):
    """Write blob records, track records, and a blob-center table.

    ``blobs_per_frame`` maps time_index -> list of Blob. Produces
    ``<prefix>_blobs.txt``, ``<prefix>_tracks.txt`` and
    ``<prefix>_centers.tsv``. All floats use round-trip precision, so the
    files double as the canonical serialization for determinism checks.
    """
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)

    blob_path = prefix.parent / (prefix.name + "_blobs.txt")
    with open(blob_path, "w") as fh:
        fh.write("# frame plane blob_id center_r center_z area median mass hull\n")
        for time_index in sorted(blobs_per_frame):
            for blob in blobs_per_frame[time_index]:
                s = blob.summary
                hull = ";".join(_fmt_point(p) for p in s.hull)
                fh.write(
                    f"{time_index} {blob.plane_index} {blob.blob_id} "
                    f"{s.center[0]!r} {s.center[1]!r} {s.area} "
                    f"{blob.median_density!r} {s.mass!r} {hull}\n"
                )

    track_path = prefix.parent / (prefix.name + "_tracks.txt")
    with open(track_path, "w") as fh:
        fh.write(
            "# track_id plane t_start t_end length centers velocities "
            "mean_vr mean_vz\n"
        )
        for track in tracks:
            centers = ";".join(
                _fmt_point(b.summary.center) for _, b in track.blobs
            )
            vels = ";".join(_fmt_point(v) for v in track.velocities)
            mean_v = track.mean_velocity()
            fh.write(
                f"{track.track_id} {track.plane_index} {track.blobs[0][0]} "
                f"{track.blobs[-1][0]} {track.length} {centers} {vels} "
                f"{mean_v[0]!r} {mean_v[1]!r}\n"
            )

    center_path = prefix.parent / (prefix.name + "_centers.tsv")
    with open(center_path, "w") as fh:
        fh.write("frame\tplane\tblob_id\tcenter_r\tcenter_z\tarea\n")
        for time_index in sorted(blobs_per_frame):
            for blob in blobs_per_frame[time_index]:
                s = blob.summary
                fh.write(
                    f"{time_index}\t{blob.plane_index}\t{blob.blob_id}\t"
                    f"{s.center[0]!r}\t{s.center[1]!r}\t{s.area}\n"
                )
    return blob_path, track_path, center_path
