"""Parallel frame processing: determinism and the scaling harness.

Frames are independent during detection, so they fan out across worker
processes; results are merged back in time order before tracking, which
makes the output byte-identical for any worker count. The benchmark
harness sweeps worker counts and reports speedup and efficiency.
"""

import tempfile
from pathlib import Path

from blobtrack import RunConfig, benchmark, generate_synthetic, run
from blobtrack.container import write_results
from blobtrack.pipeline import format_scaling_table

dataset = generate_synthetic(bump_count=2, frames=16, seed=5)
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    path = dataset.write(tmp / "input.fcf")

    outputs = {}
    for workers in (1, 2):
        result = run(RunConfig(input_path=str(path), worker_count=workers))
        paths = write_results(
            result.blobs_per_frame, result.tracks, tmp / f"w{workers}"
        )
        outputs[workers] = b"".join(p.read_bytes() for p in paths)
        timing = result.timing
        print(
            f"{workers} worker(s): {timing.total_seconds:.2f} s total, "
            f"{1e3 * sum(timing.per_frame_seconds.values()) / len(timing.per_frame_seconds):.1f} "
            "ms mean per frame"
        )
    print(f"outputs byte-identical across worker counts: "
          f"{outputs[1] == outputs[2]}")

    # Strong scaling reruns the same work at each worker count. On a
    # single-core host the speedup column will sit near 1.0; on a real
    # multicore machine it tracks the worker count.
    rows = benchmark(RunConfig(input_path=str(path)), [1, 2], mode="strong")
    print(format_scaling_table(rows, "strong"), end="")
