import json

import pytest

from tamecert.cli import (
    NAMED_SYSTEMS,
    emit_plot_data,
    main,
    report_payload,
    run_config,
    verify_certificate,
)
from tamecert.errors import ConfigError, UnknownSeries


def write_config(tmp_path, config, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return path


SMALL_BATCH = {
    "seed": 3,
    "experiments": [
        {"kind": "limit", "id": "lim",
         "params": {"system": "sturmian", "target": {"a": 1, "b": 0}, "side": "above",
                    "plain_count": 40, "split_range": 4}},
        {"kind": "independence", "id": "ind",
         "params": {"coding": {"system": "sturmian"}, "horizon": 2000, "windows": [6, 9]}},
        {"kind": "isolation", "id": "iso", "params": {"count": 20}},
        {"kind": "counterexample", "id": "cex",
         "params": {"scenario": "projective_p_infty", "count": 5, "size": 10}},
        {"kind": "rigidity", "id": "rig",
         "params": {"system": "rotation-sqrt2", "denominators": 15}},
    ],
}


class TestRunConfig:
    def test_report_shape_and_exit(self):
        report, code = run_config(SMALL_BATCH)
        assert code == 0
        assert report["schema_version"] == 1
        assert report["seed"] == 3
        assert len(report["results"]) == 5
        assert all(r["status"] == "ok" for r in report["results"])

    def test_jobs_determinism(self):
        r1, _ = run_config(SMALL_BATCH, jobs=1)
        r8, _ = run_config(SMALL_BATCH, jobs=8)
        assert json.dumps(report_payload(r1), sort_keys=True) == json.dumps(
            report_payload(r8), sort_keys=True
        )

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            run_config({"experiments": [{"kind": "nonsense"}]})

    def test_invalid_epsilon_rejected(self):
        with pytest.raises(ConfigError):
            run_config({"experiments": [{"kind": "rank", "params": {"epsilons": [-1]}}]})

    def test_budget_path_partial_report(self):
        config = {"experiments": [{
            "kind": "independence",
            "params": {"coding": {"kind": "full_shift", "window": 12},
                       "windows": [12], "node_budget": 4},
        }]}
        report, code = run_config(config)
        assert code == 3
        entry = report["results"][0]
        assert entry["status"] == "not_stabilized"
        assert "budget" in entry["result"]["flag"]
        assert entry["certificates"]  # best-found certificate still attached


class TestCliMain:
    def test_run_and_plot_and_verify(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_BATCH)
        out = tmp_path / "report.json"
        assert main(["run", str(cfg), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["config_digest"]

        csv_path = tmp_path / "ind.csv"
        assert main(["plot", str(out), "independence", "--out", str(csv_path)]) == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "L,complexity,independence"
        assert len(lines) == 3

        assert main(["plot", str(out), "nope"]) == 2
        assert main(["verify", str(out)]) == 0

    def test_exit_2_on_bad_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", str(bad)]) == 2
        cfg = write_config(tmp_path, {"experiments": [{"kind": "bogus"}]})
        assert main(["run", str(cfg)]) == 2

    def test_nonpositive_epsilon_exit_2_no_report(self, tmp_path):
        cfg = write_config(tmp_path, {"experiments": [
            {"kind": "rank", "params": {"epsilons": [0]}}]})
        out = tmp_path / "never.json"
        assert main(["run", str(cfg), "--out", str(out)]) == 2
        assert not out.exists()

    def test_list_systems(self, capsys):
        assert main(["list-systems"]) == 0
        out = capsys.readouterr().out
        for name in NAMED_SYSTEMS:
            assert name in out

    def test_seed_override_changes_digest_not_schema(self, tmp_path):
        cfg = write_config(tmp_path, {"seed": 1, "experiments": [
            {"kind": "counterexample", "params": {"scenario": "circle_parabolic",
                                                  "count": 3, "size": 5}}]})
        out = tmp_path / "r.json"
        assert main(["run", str(cfg), "--out", str(out), "--seed", "9"]) == 0
        report = json.loads(out.read_text())
        assert report["seed"] == 9

    def test_cache_dir_flag(self, tmp_path):
        cfg = write_config(tmp_path, {"experiments": [
            {"kind": "independence",
             "params": {"coding": {"system": "sturmian"}, "horizon": 2000, "windows": [6]}}]})
        cache = tmp_path / "cache"
        out = tmp_path / "r.json"
        assert main(["run", str(cfg), "--out", str(out), "--cache-dir", str(cache)]) == 0
        assert list((cache / "factors").glob("*.txt"))


class TestPlotSeries:
    def test_rank_series_and_beta(self):
        report, code = run_config({"experiments": [
            {"kind": "rank", "params": {"system": "sturmian", "plain_count": 1500,
                                        "epsilons": [0.05], "translations": [1],
                                        "one_sided": [{"a": 0, "b": 0, "side": "below"}]}}]})
        assert code == 0
        assert report["results"][0]["result"]["table"][0]["beta"] == 2
        csv = emit_plot_data(report, "rank")
        assert csv.splitlines()[0] == "stage,set_size"
        assert len(csv.splitlines()) >= 3

    def test_boundary_family_and_matrix_literals(self):
        report, code = run_config({"experiments": [
            {"kind": "rank", "params": {"system": "boundary-f2", "gamma": "ab",
                                        "depth": 12, "base_length": 4, "epsilons": [0.05]}},
            {"kind": "catalog", "params": {"matrices": [
                {"matrix_kind": "powers", "dim": 2,
                 "entries": [["2", "0"], ["0", "1/2"]], "stages": 10}]}},
        ]})
        assert code == 0
        assert report["results"][0]["result"]["table"][0]["beta"] == 2
        assert report["results"][1]["result"]["table"][0]["domain_dim"] == 1

    def test_unknown_series_raises(self):
        with pytest.raises(UnknownSeries):
            emit_plot_data({"results": []}, "independence")


class TestVerify:
    def test_tampered_independence_fails(self, tmp_path):
        report, _ = run_config({"experiments": [
            {"kind": "independence",
             "params": {"coding": {"system": "sturmian"}, "horizon": 2000, "windows": [6]}}]})
        cert = report["results"][0]["certificates"][0]
        assert verify_certificate(cert)
        cert_bad = dict(cert)
        cert_bad["witnesses"] = {k: "1" * cert["window"] for k in cert["witnesses"]}
        assert not verify_certificate(cert_bad)
        bad_path = tmp_path / "bad.json"
        bad_path.write_text(json.dumps([cert_bad]))
        assert main(["verify", str(bad_path)]) == 1
