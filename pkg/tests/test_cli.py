import json
import subprocess
import sys

import numpy as np
import pytest

from cornerlab.catalog import model_ssh
from cornerlab.models import load_model, save_model, verify_symmetry_relations


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "cornerlab.cli", *args],
                          capture_output=True, text=True)


class TestClassify:
    def test_cii_two_two(self):
        r = run_cli("classify", "--class", "CII", "--n", "2", "--k", "2")
        assert r.returncode == 0
        assert json.loads(r.stdout)["group"] == "2Z"

    def test_d_three_two(self):
        r = run_cli("classify", "--class", "D", "--n", "3", "--k", "2")
        assert json.loads(r.stdout)["group"] == "Z"


class TestKoTable:
    def test_wedge_even_t(self):
        r = run_cli("ko-table", "--algebra", "S", "--i", "2",
                    "--alpha", "0/1", "--beta", "2/1")
        doc = json.loads(r.stdout)
        assert doc["group"] == "Z2+Z2+Z2+Z2"
        assert doc["t"] == 2

    def test_orthant(self):
        r = run_cli("ko-table", "--algebra", "orthant", "--i", "1")
        assert json.loads(r.stdout)["group"] == "Z+Z2"


class TestGap:
    def test_builtin_model_passes(self):
        r = run_cli("gap", "--model", "ssh", "--L", "24")
        assert r.returncode == 0
        assert json.loads(r.stdout)["passed"] is True

    def test_critical_point_exit_one(self, tmp_path):
        model, syms = model_ssh(1.0, 1.0)
        path = tmp_path / "crit.json"
        save_model(path, model, syms)
        r = run_cli("gap", "--model", str(path), "--L", "24")
        assert r.returncode == 1
        assert "sgc1" in r.stderr

    def test_unknown_flag_usage_error(self):
        r = run_cli("gap", "--model", "ssh", "--bogus")
        assert r.returncode == 2


class TestInvariant:
    def test_ssh_half_line(self):
        r = run_cli("invariant", "--model", "ssh", "--codim", "1", "--L", "40")
        doc = json.loads(r.stdout)
        assert (doc["value"], doc["group_tag"], doc["class"]) == (1, "Z", "BDI")

    def test_deterministic_output(self):
        a = run_cli("invariant", "--model", "kitaev", "--codim", "1", "--L", "30")
        b = run_cli("invariant", "--model", "kitaev", "--codim", "1", "--L", "30")
        assert a.stdout == b.stdout


class TestProductCommand:
    def test_emits_composite_model(self, tmp_path):
        out = tmp_path / "ssh_x_ssh.json"
        r = run_cli("product", "--model", "ssh", "--model2", "ssh",
                    "--out", str(out))
        assert r.returncode == 0
        model, syms = load_model(out)
        assert model.dim == 2 and model.orbitals == 4
        assert verify_symmetry_relations(model, syms).all_pass()
        doc = json.loads(out.read_text())
        assert doc["provenance"]["class"] == "BDI"
        assert doc["provenance"]["construction_tag"] == "tensor"

    def test_composite_invariant_roundtrip(self, tmp_path):
        out = tmp_path / "composite.json"
        run_cli("product", "--model", "ssh", "--model2", "kitaev",
                "--out", str(out))
        r = run_cli("invariant", "--model", str(out), "--codim", "2",
                    "--L", "12", "--zero-eps", "1e-3")
        doc = json.loads(r.stdout)
        assert (doc["value"], doc["class"]) == (1, "D")


class TestSpectrumCommand:
    def test_csv_columns(self, tmp_path):
        out = tmp_path / "spec.csv"
        r = run_cli("spectrum", "--model", "kitaev", "--codim", "1",
                    "--L", "10", "--out", str(out))
        assert r.returncode == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "index,eigenvalue,localization"
        assert len(lines) == 1 + 22  # (L+1) sites x 2 orbitals
