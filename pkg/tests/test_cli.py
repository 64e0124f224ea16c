"""Command-line behavior: exit codes, artifacts, determinism."""

import filecmp
import os

import pytest

from quadmate.cli import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_STRUCTURAL,
    EXIT_USAGE,
    main,
)
from quadmate.serialize import load_curve


class TestCheck:
    def test_passing_pair(self, capsys):
        assert main(["check", "1/4", "1/8"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "mateable: yes" in out
        assert "is_jordan: yes" in out
        assert "fsr_valid: yes" in out
        assert "postcritical points: 5" in out

    def test_pinched_pair(self, capsys):
        assert main(["check", "1/6", "13/14"]) == EXIT_STRUCTURAL
        out = capsys.readouterr().out
        assert "is_jordan: no" in out
        assert "pinching class" in out

    def test_conjugate_limbs(self, capsys):
        assert main(["check", "1/4", "3/4"]) == EXIT_STRUCTURAL
        out = capsys.readouterr().out
        assert "mateable: no" in out
        assert "limb of alpha: 1/3" in out
        assert "limb of beta:  2/3" in out

    def test_periodic_angle_is_usage_error(self, capsys):
        assert main(["check", "1/3", "1/4"]) == EXIT_USAGE
        assert "periodic" in capsys.readouterr().err

    def test_orbifold_warning(self, capsys):
        main(["check", "1/4", "1/4"])
        assert "orbifold" in capsys.readouterr().out

    def test_garbage_angle(self, capsys):
        assert main(["check", "x/y", "1/4"]) == EXIT_USAGE


class TestSchedule:
    def test_level_one_table(self, capsys):
        assert main(["schedule", "1/4", "1/8", "--level", "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "10 marks" in out
        for token in ("crit-black", "crit-red", "plumbing", "p1"):
            assert token in out

    def test_negative_level_rejected(self, capsys):
        assert main(["schedule", "1/4", "1/8", "--level", "-1"]) == EXIT_USAGE


class TestMate:
    def test_final_values_printed(self, capsys):
        code = main(["mate", "1/4", "1/4", "--iters", "2", "--tol", "0"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "final u = 0 + 1i" in out
        assert "final v = 0 - 1i" in out
        assert "run-id:" in out

    def test_structural_failure_exit(self, capsys):
        assert main(["mate", "1/4", "3/4"]) == EXIT_STRUCTURAL
        assert "conjugate limbs" in capsys.readouterr().err

    def test_usage_validation(self, capsys):
        assert main(["mate", "1/4", "1/8", "--iters", "0"]) == EXIT_USAGE
        assert main(["mate", "1/4", "1/8", "--budget", "-5"]) == EXIT_USAGE
        assert main(["mate", "1/4", "1/8", "--render"]) == EXIT_USAGE

    def test_dump_artifacts(self, tmp_path, capsys):
        code = main(
            ["mate", "1/4", "1/8", "--iters", "2", "--tol", "0",
             "--dump", str(tmp_path), "--render"]
        )
        assert code == EXIT_OK
        (run_dir,) = list(tmp_path.iterdir())
        names = sorted(p.name for p in run_dir.iterdir())
        assert "report.txt" in names
        assert "curve-000.txt" in names
        assert "curve-002.txt" in names
        assert "curve-final.txt" in names
        assert "final-oblique.svg" in names
        curve, u, v = load_curve((run_dir / "curve-002.txt").read_text())
        assert curve.level == 2
        report = (run_dir / "report.txt").read_text()
        assert f"run-id {run_dir.name}" in report

    def test_reruns_byte_identical(self, tmp_path, capsys):
        args = ["mate", "1/4", "1/8", "--iters", "2", "--tol", "0", "--render"]
        d1, d2 = tmp_path / "one", tmp_path / "two"
        assert main(args + ["--dump", str(d1)]) == EXIT_OK
        assert main(args + ["--dump", str(d2)]) == EXIT_OK
        (r1,) = list(d1.iterdir())
        (r2,) = list(d2.iterdir())
        assert r1.name == r2.name
        names = sorted(p.name for p in r1.iterdir())
        match, mismatch, errors = filecmp.cmpfiles(r1, r2, names, shallow=False)
        assert mismatch == [] and errors == []

    def test_run_id_depends_on_config(self, tmp_path, capsys):
        base = ["mate", "1/4", "1/8", "--iters", "1", "--tol", "0"]
        main(base + ["--dump", str(tmp_path)])
        main(base + ["--samples", "32", "--dump", str(tmp_path)])
        assert len(list(tmp_path.iterdir())) == 2

    def test_env_var_dump_dir(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("QUADMATE_DUMP_DIR", str(tmp_path))
        assert main(["mate", "1/4", "1/4", "--iters", "1", "--tol", "0"]) == EXIT_OK
        (run_dir,) = list(tmp_path.iterdir())
        assert (run_dir / "report.txt").exists()

    def test_divergence_exit_code(self, capsys):
        code = main(
            ["mate", "1/6", "1/6", "--iters", "40", "--samples", "32", "--budget", "2048"]
        )
        assert code == EXIT_NUMERIC
        out = capsys.readouterr().out
        assert "status: diverged" in out
        assert "collided" in out
