import json
from datetime import date, timedelta

import numpy as np
import pytest

from repindex.cli import main


def write_opinions(path, n_per_target=40, targets=("Bank1", "Bank2"), seed=0):
    rng = np.random.default_rng(seed)
    start = date(2014, 1, 1)
    with open(path, "w") as handle:
        k = 0
        for target in targets:
            for i in range(n_per_target):
                record = {
                    "id": f"o{k}",
                    "t": f"{(start + timedelta(days=i)).isoformat()}T12:00:00Z",
                    "target": target,
                    "holder": "h",
                    "sentiment": round(float(np.clip(rng.normal(0.2, 0.3), -1, 1)), 6),
                }
                handle.write(json.dumps(record) + "\n")
                k += 1


def write_positive_scores_csv(path, n=200, seed=1, entity="Bank1"):
    rng = np.random.default_rng(seed)
    start = date(2014, 1, 1)
    with open(path, "w") as handle:
        handle.write("date,entity,score\n")
        for i in range(n):
            score = float(np.clip(rng.normal(0.2, 0.3), -1, 1))
            handle.write(f"{(start + timedelta(days=i)).isoformat()},{entity},{score!r}\n")


class TestBiasCommand:
    def test_emits_report_files(self, tmp_path):
        scores = tmp_path / "scores.csv"
        write_positive_scores_csv(scores)
        out = tmp_path / "out"
        assert main(["bias", "--input", str(scores), "--out-dir", str(out)]) == 0
        for name in ("table1.csv", "table2.csv", "per_w.csv", "report.json"):
            assert (out / name).exists(), name
        report = json.loads((out / "report.json").read_text())
        assert report["reports"][0]["entity"] == "Bank1"
        assert report["reports"][0]["trend"] == "positive"

    def test_missing_input_exits_nonzero(self, tmp_path, capsys):
        code = main(["bias", "--input", str(tmp_path / "nope.csv"),
                     "--out-dir", str(tmp_path / "o")])
        assert code == 1
        assert "missing input" in capsys.readouterr().err


class TestSynthCommand:
    def test_synth_then_bias_null_m_matches_oracle(self, tmp_path):
        out = tmp_path / "out"
        assert main([
            "synth", "--out-dir", str(out), "--seed", "9", "--n", "5000",
            "--mean", "0.0", "--sd", "0.3", "--suppress-fraction", "0",
        ]) == 0
        assert (out / "synth_ground_truth.json").exists()
        assert main([
            "bias", "--input", str(out / "synth_suppressed.csv"),
            "--out-dir", str(out),
        ]) == 0
        table2 = (out / "table2.csv").read_text().splitlines()
        entity, m = table2[1].split(",")
        assert entity == "synthetic"
        # mean-0 unsuppressed data: alpha ~ beta, M is noise around 0
        assert abs(float(m)) < 25


class TestCliContract:
    def test_unknown_command_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_rejections_do_not_fail_ingest(self, tmp_path, capsys):
        feed = tmp_path / "opinions.jsonl"
        write_opinions(feed, n_per_target=3)
        with open(feed, "a") as handle:
            handle.write("{not json\n")
        out = tmp_path / "out"
        assert main(["ingest", "--input", str(feed), "--out-dir", str(out)]) == 0
        rejections = (out / "opinions.rejections.jsonl").read_text().splitlines()
        assert len(rejections) == 1
        assert json.loads(rejections[0])["line"] == 7


class TestPipeline:
    def test_pipeline_matches_individual_stages(self, tmp_path):
        feed = tmp_path / "opinions.jsonl"
        write_opinions(feed)

        pipe_out = tmp_path / "pipe"
        assert main(["pipeline", "--input", str(feed),
                     "--out-dir", str(pipe_out), "--no-plots"]) == 0

        stage_out = tmp_path / "stages"
        assert main(["ingest", "--input", str(feed),
                     "--out-dir", str(stage_out)]) == 0
        assert main(["index", "--input", str(stage_out / "opinions.valid.jsonl"),
                     "--out-dir", str(stage_out)]) == 0
        index_files = sorted(str(p) for p in stage_out.glob("index_*.csv"))
        assert main(["trend", "--input", *index_files,
                     "--out-dir", str(stage_out), "--no-plots"]) == 0
        assert main(["bias", "--input", *index_files,
                     "--out-dir", str(stage_out)]) == 0

        names = [
            "index_Bank1.csv", "index_Bank2.csv", "index_composite.csv",
            "cumulative_Bank1.csv", "cumulative_composite.csv",
            "table1.csv", "table2.csv", "per_w.csv", "report.json",
        ]
        for name in names:
            assert (pipe_out / name).read_bytes() == (
                stage_out / name
            ).read_bytes(), name

    def test_pipeline_renders_figures_by_default(self, tmp_path):
        feed = tmp_path / "opinions.jsonl"
        write_opinions(feed, n_per_target=10, targets=("Bank1",))
        out = tmp_path / "out"
        assert main(["pipeline", "--input", str(feed), "--out-dir", str(out)]) == 0
        assert (out / "cumulative_Bank1.png").exists()
        assert (out / "cumulative_composite.png").exists()
