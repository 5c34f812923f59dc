import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from synfuel import cli

PACK = Path(__file__).resolve().parent.parent / "packs" / "sample"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "synfuel.cli", *args],
        capture_output=True, text=True, timeout=900,
    )


@pytest.fixture(scope="module")
def fast_config(tmp_path_factory):
    """Prairie scenario shrunk to a 3-year life for quick end-to-end runs."""
    tmp = tmp_path_factory.mktemp("fastcfg")
    doc = json.loads((PACK / "prairie_island.json").read_text())
    doc["finance"] = {"project_life_years": 3}
    doc["study"]["realizations"] = 2
    for key, rel in doc["files"].items():
        src = PACK / rel
        dest = tmp / Path(rel).name
        shutil.copyfile(src, dest)
        doc["files"][key] = dest.name
    path = tmp / "scenario.json"
    path.write_text(json.dumps(doc))
    return path


class TestConfigValidation:
    def test_missing_file_exits_2(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"site": {"name": "x"}, "files": {}}))
        r = run_cli("supply-curve", "--config", str(p))
        assert r.returncode == 2
        err = json.loads(r.stderr)
        assert err["error"]["type"] == "ConfigError"

    def test_schema_violation_names_path(self, tmp_path):
        doc = json.loads((PACK / "prairie_island.json").read_text())
        doc["site"]["npp_capacity_mwe"] = -5
        p = tmp_path / "c.json"
        p.write_text(json.dumps(doc))
        r = run_cli("supply-curve", "--config", str(p))
        assert r.returncode == 2
        assert "npp_capacity_mwe" in json.loads(r.stderr)["error"]["message"]

    def test_nonexistent_config(self):
        r = run_cli("train", "--config", "/does/not/exist.json")
        assert r.returncode == 2


class TestArtifacts:
    def test_supply_curve_and_gate_prices(self, fast_config, tmp_path):
        out = tmp_path / "curve.csv"
        r = run_cli("supply-curve", "--config", str(fast_config), "--out", str(out))
        assert r.returncode == 0, r.stderr
        df = pd.read_csv(out)
        assert list(df.columns) == ["cum_qty_tpy", "avg_cost_usd_per_t", "marginal_source"]
        assert (out.parent / "curve.csv.meta.json").exists()

        out2 = tmp_path / "gate.csv"
        r = run_cli("gate-prices", "--config", str(fast_config), "--out", str(out2))
        assert r.returncode == 0, r.stderr
        df2 = pd.read_csv(out2)
        assert set(df2["fuel"]) == {"naphtha", "jet", "diesel"}

    def test_zero_capacity_npv_is_zero(self, fast_config, tmp_path):
        out = tmp_path / "npv0"
        r = run_cli(
            "npv", "--config", str(fast_config), "--htse", "0", "--ft-tph", "0",
            "--storage-t", "0", "--out", str(out), "--realizations", "2",
        )
        assert r.returncode == 0, r.stderr
        doc = json.loads((out / "summary.json").read_text())
        assert abs(doc["dnpv_mean_usd"]) < 1e-6
        assert (out / "ledger.csv").exists()

    def test_infeasible_config_exits_3(self, fast_config, tmp_path):
        r = run_cli(
            "npv", "--config", str(fast_config), "--htse", "100", "--ft-tph", "50",
            "--storage-t", "0", "--out", str(tmp_path / "x"),
        )
        assert r.returncode == 3
        assert json.loads(r.stderr)["error"]["type"] in (
            "InfeasibleDispatch", "FeedstockShortfall", "ConfigError"
        )

    def test_dispatch_export_schema(self, fast_config, tmp_path):
        out = tmp_path / "disp.csv"
        r = run_cli(
            "dispatch", "--config", str(fast_config), "--htse", "300",
            "--ft-tph", "6.0", "--storage-t", "20", "--out", str(out),
        )
        assert r.returncode == 0, r.stderr
        df = pd.read_csv(out)
        assert list(df.columns) == ["hour", "price", "grid_mw", "htse_mw", "h2_kg_h", "storage_kg"]
        assert len(df) == 8760
        meta = json.loads((tmp_path / "disp.csv.meta.json").read_text())
        assert "marginal_h2_value_usd_per_mwh" in meta


class TestSweepCli:
    def test_sweep_outputs_and_determinism(self, fast_config, tmp_path):
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        for out in (out1, out2):
            r = run_cli(
                "sweep", "--config", str(fast_config), "--points", "2",
                "--realizations", "2", "--out", str(out),
            )
            assert r.returncode == 0, r.stderr
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()
        df = pd.read_csv(out1 / "sweep.csv")
        assert list(df.columns) == [
            "htse_mwe", "ft_tph", "storage_t", "dnpv_mean", "dnpv_std", "feasible"
        ]
        assert len(df) == 8

    def test_sweep_resume_reuses_checkpoint(self, fast_config, tmp_path):
        out = tmp_path / "s"
        r = run_cli("sweep", "--config", str(fast_config), "--points", "2",
                    "--realizations", "2", "--out", str(out))
        assert r.returncode == 0
        before = (out / "sweep.checkpoint.jsonl").read_text()
        r = run_cli("sweep", "--config", str(fast_config), "--points", "2",
                    "--realizations", "2", "--out", str(out))
        assert r.returncode == 0
        assert (out / "sweep.checkpoint.jsonl").read_text() == before

    def test_sensitivity_uses_sweep_optimum(self, fast_config, tmp_path):
        out = tmp_path / "s"
        r = run_cli("sweep", "--config", str(fast_config), "--points", "2",
                    "--realizations", "2", "--out", str(out))
        assert r.returncode == 0, r.stderr
        r = run_cli("sensitivity", "--config", str(fast_config), "--realizations", "2",
                    "--out", str(out))
        assert r.returncode == 0, r.stderr
        df = pd.read_csv(out / "sensitivity.csv")
        assert list(df.columns) == ["parameter", "value", "change_pct"]
        ref = df[df["parameter"] == "reference"]
        assert len(ref) == 1 and ref["change_pct"].iloc[0] == 0.0

    def test_report_collects(self, fast_config, tmp_path):
        work = tmp_path / "work" / "prairie"
        r = run_cli("sweep", "--config", str(fast_config), "--points", "2",
                    "--realizations", "2", "--out", str(work))
        assert r.returncode == 0
        outdir = tmp_path / "report"
        r = run_cli("report", "--in", str(tmp_path / "work"), "--out", str(outdir))
        assert r.returncode == 0, r.stderr
        manifest = json.loads((outdir / "manifest.json").read_text())
        assert manifest["collected"]
        assert (outdir / "dnpv_summary.csv").exists()


class TestTrainGenerate:
    def test_train_then_generate_roundtrip(self, fast_config, tmp_path):
        model = tmp_path / "model.json"
        r = run_cli("train", "--config", str(fast_config), "--out", str(model))
        assert r.returncode == 0, r.stderr
        doc = json.loads(model.read_text())
        assert doc["schema"] == "pricegen.model.v1"
        out = tmp_path / "synth.csv"
        r = run_cli("generate", "--config", str(fast_config), "--years", "1",
                    "--seed", "9", "--out", str(out))
        assert r.returncode == 0, r.stderr
        df = pd.read_csv(out)
        assert list(df.columns) == ["timestamp", "price_usd_per_mwh"]
        assert len(df) == 8760
