"""End-to-end tests of the command-line entry point."""

import numpy as np
import pytest

from blobtrack.cli import build_parser, main

SMALL_GEN = [
    "generate",
    "--bumps", "1",
    "--frames", "6",
    "--seed", "7",
    "--spacing", "0.05",
    "--width", "0.12",
    "--drift-r", "0.0",
]


class TestParser:
    def test_help_lists_parameter_flags_with_defaults(self, capsys):
        parser = build_parser()
        # subparser help must advertise every tunable with its shipped default
        detect = next(
            a for a in parser._subparsers._group_actions
        ).choices["detect"]
        text = detect.format_help()
        for flag, default in [
            ("--alpha", "2.0"),
            ("--beta", "1.0"),
            ("--min-abs-density", "2.05"),
            ("--min-rel-density", "1.2"),
            ("--min-area", "3"),
            ("--median-abs-min", "2.15"),
            ("--median-rel-min", "1.3"),
            ("--median-abs-max", "2.75"),
            ("--max-jump", "0.04"),
            ("--max-area-change", "25"),
            ("--min-frames", "3"),
            ("--max-frames", "100"),
            ("--refine-levels", "1"),
        ]:
            assert flag in text
            idx = text.rindex(flag)
            assert default in text[idx:idx + 400], flag

    def test_version_exits_zero(self, capsys):
        assert main(["--version"]) == 0
        assert capsys.readouterr().out.strip() == "0.1.0"

    def test_no_command_is_usage_error(self, capsys):
        assert main([]) == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["generate", "--output", "x", "--no-such-flag"]) == 2

    def test_missing_required_input_is_usage_error(self, capsys):
        assert main(["detect"]) == 2


class TestGenerate:
    def test_deterministic_output(self, tmp_path, capsys):
        a = tmp_path / "a.fcf"
        b = tmp_path / "b.fcf"
        assert main(SMALL_GEN + ["--output", str(a)]) == 0
        assert main(SMALL_GEN + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self, tmp_path, capsys):
        a = tmp_path / "a.fcf"
        b = tmp_path / "b.fcf"
        assert main(SMALL_GEN + ["--output", str(a)]) == 0
        args = [x if x != "7" else "8" for x in SMALL_GEN]
        assert main(args + ["--output", str(b)]) == 0
        assert a.read_bytes() != b.read_bytes()

    def test_bad_geometry_reports_failure(self, tmp_path, capsys):
        code = main([
            "generate", "--output", str(tmp_path / "x.fcf"),
            "--width", "0.01", "--spacing", "0.02",
        ])
        assert code == 1
        assert "blobtrack:" in capsys.readouterr().err


class TestDetect:
    @pytest.fixture(scope="class")
    @staticmethod
    def container(tmp_path_factory):
        path = tmp_path_factory.mktemp("cli") / "in.fcf"
        assert main(SMALL_GEN + ["--output", str(path)]) == 0
        return path

    def test_happy_path_writes_results(self, container, tmp_path, capsys):
        code = main([
            "detect", "--input", str(container),
            "--output-dir", str(tmp_path), "--prefix", "out",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "frames" in out and "tracks" in out
        for name in ("out_blobs.txt", "out_tracks.txt",
                     "out_centers.tsv", "out_timing.tsv"):
            assert (tmp_path / name).exists(), name

    def test_flag_overrides_change_results(self, container, tmp_path, capsys):
        # an absurdly high floor suppresses every candidate
        code = main([
            "detect", "--input", str(container),
            "--output-dir", str(tmp_path), "--prefix", "none",
            "--min-abs-density", "1e9",
        ])
        assert code == 0
        blobs = (tmp_path / "none_blobs.txt").read_text().splitlines()
        assert all(line.startswith("#") for line in blobs)

    def test_partial_roi_is_runtime_error(self, container, tmp_path, capsys):
        code = main([
            "detect", "--input", str(container),
            "--output-dir", str(tmp_path), "--rmin", "0.0",
        ])
        assert code == 1
        assert "rmax" in capsys.readouterr().err

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        code = main([
            "detect", "--input", str(tmp_path / "absent.fcf"),
            "--output-dir", str(tmp_path),
        ])
        assert code == 1

    def test_env_output_dir(self, container, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("BLOBTRACK_OUTPUT_DIR", str(tmp_path / "envout"))
        assert main(["detect", "--input", str(container)]) == 0
        assert (tmp_path / "envout" / "blobtrack_blobs.txt").exists()


class TestFitdist:
    def test_reports_both_fits(self, tmp_path, capsys):
        path = tmp_path / "in.fcf"
        assert main(SMALL_GEN + ["--output", str(path)]) == 0
        assert main(["fitdist", "--input", str(path), "--t", "1"]) == 0
        out = capsys.readouterr().out
        assert "extreme-value:" in out
        assert "log-normal:" in out
        assert "best fit:" in out
