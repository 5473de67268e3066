import json
import os

import pytest

from threadwatch.cli import main
from threadwatch.synthgen import read_planted_jsonl

SYNTH_ARGS = ["--seed", "7", "--threads", "120", "--pages", "4"]


def synth_inputs(root):
    data = os.path.join(root, "data")
    assert main(["synth", "--out", data] + SYNTH_ARGS) == 0
    return {
        "corpus": os.path.join(data, "corpus.jsonl"),
        "blacklist": os.path.join(data, "blacklist.tsv"),
        "map": os.path.join(data, "shorteners.tsv"),
        "hosts": os.path.join(data, "shortener_hosts.txt"),
        "planted": os.path.join(data, "planted.jsonl"),
        "dir": data,
    }


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory):
    """One synth corpus plus labels/features shared by the CLI tests."""
    root = str(tmp_path_factory.mktemp("cli"))
    paths = synth_inputs(root)
    paths["labels"] = os.path.join(root, "labels.tsv")
    assert main(["label", "--corpus", paths["corpus"],
                 "--blacklist", paths["blacklist"],
                 "--shortener-map", paths["map"],
                 "--shortener-hosts", paths["hosts"],
                 "--out", paths["labels"]]) == 0
    paths["features"] = os.path.join(root, "features.csv")
    assert main(["featurize", "--corpus", paths["corpus"],
                 "--labels", paths["labels"],
                 "--out", paths["features"]]) == 0
    paths["root"] = root
    return paths


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestBasics:
    def test_help_exits_zero(self):
        assert main(["--help"]) == 0
        assert main(["label", "--help"]) == 0

    def test_missing_subcommand_is_usage_error(self):
        assert main([]) == 1

    def test_missing_file_exit_two(self, tmp_path):
        assert main(["ingest", "--corpus", str(tmp_path / "nope.jsonl")]) == 2

    def test_bad_config_value_exit_one(self, pipeline, tmp_path):
        assert main(["synth", "--out", str(tmp_path / "x"),
                     "--target-fraction", "2.0"]) == 1

    def test_summary_line(self, pipeline, capsys):
        assert main(["ingest", "--corpus", pipeline["corpus"]]) == 0
        out = capsys.readouterr().out
        assert "ingest ok: " in out and " in, " in out and out.rstrip().endswith("s")


class TestLabel:
    def test_label_count_matches_planted(self, pipeline):
        planted = read_planted_jsonl(pipeline["planted"])
        with open(pipeline["labels"], encoding="utf-8") as fh:
            rows = [l for l in fh if l.strip()]
        assert len(rows) == len(planted)


class TestFeaturize:
    def test_row_per_thread(self, pipeline):
        with open(pipeline["features"], encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        assert lines[0].startswith("post_id,is_target,span_days")
        assert len(lines) - 1 == 120
        assert lines[0].count("dav_") == 12


class TestTrainEval:
    def test_train_writes_model_with_scaling(self, pipeline, tmp_path):
        out = str(tmp_path / "model.json")
        assert main(["train", "--features", pipeline["features"],
                     "--algorithm", "decision_tree", "--seed", "0",
                     "--out", out]) == 0
        doc = json.loads(read(out))
        assert "scaling" in doc

    def test_eval_prints_metrics(self, pipeline, tmp_path, capsys):
        out = str(tmp_path / "metrics.csv")
        assert main(["eval", "--features", pipeline["features"],
                     "--algorithm", "decision_tree", "--seed", "0",
                     "--out", out]) == 0
        stdout = capsys.readouterr().out
        assert "precision=" in stdout and "f1=" in stdout
        lines = read(out).decode().splitlines()
        assert lines[0] == "algorithm,precision,recall,f1"
        assert lines[1].startswith("decision_tree,")


class TestSweep:
    def test_twelve_horizons(self, pipeline, tmp_path):
        out = str(tmp_path / "sweep.csv")
        assert main(["sweep", "--corpus", pipeline["corpus"],
                     "--labels", pipeline["labels"],
                     "--seed", "0", "--out", out]) == 0
        lines = read(out).decode().splitlines()
        assert len(lines) - 1 == 12
        horizons = [int(l.split(",")[0]) for l in lines[1:]]
        assert horizons == list(range(5, 65, 5))


class TestAnalyses:
    def test_temporal_outputs(self, pipeline, tmp_path):
        out = str(tmp_path / "temporal")
        assert main(["temporal", "--corpus", pipeline["corpus"],
                     "--labels", pipeline["labels"], "--out", out]) == 0
        for name in ("relative_positions.csv", "time_since_post.csv",
                     "within_one_day.csv", "inter_attack_intervals.csv",
                     "monthly_heatmap.csv"):
            assert os.path.exists(os.path.join(out, name))

    def test_accounts_outputs(self, pipeline, tmp_path):
        out = str(tmp_path / "accounts")
        assert main(["accounts", "--corpus", pipeline["corpus"],
                     "--labels", pipeline["labels"],
                     "--shortener-map", pipeline["map"],
                     "--shortener-hosts", pipeline["hosts"],
                     "--seed", "0", "--sample-per-page", "30",
                     "--out", out]) == 0
        for name in ("footprints.csv", "response_stats.csv",
                     "campaign_scatter.csv"):
            assert os.path.exists(os.path.join(out, name))


class TestConfigFile:
    def test_config_supplies_defaults_flags_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# settings\nseed = 3\nthreads = 10\n")
        out_a = str(tmp_path / "a")
        out_b = str(tmp_path / "b")
        out_c = str(tmp_path / "c")
        assert main(["--config", str(cfg), "synth", "--out", out_a]) == 0
        assert main(["synth", "--out", out_b, "--seed", "3", "--threads", "10"]) == 0
        assert read(os.path.join(out_a, "corpus.jsonl")) == \
            read(os.path.join(out_b, "corpus.jsonl"))
        # an explicit flag wins over the config value
        assert main(["--config", str(cfg), "synth", "--out", out_c,
                     "--seed", "4"]) == 0
        assert read(os.path.join(out_c, "corpus.jsonl")) != \
            read(os.path.join(out_a, "corpus.jsonl"))

    def test_malformed_config_exit_one(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("just words\n")
        assert main(["--config", str(cfg), "synth",
                     "--out", str(tmp_path / "x")]) == 1


class TestDeterminism:
    def test_rerun_byte_identical(self, pipeline, tmp_path):
        snapshots = []
        for run in ("r0", "r1"):
            root = str(tmp_path / run)
            paths = synth_inputs(root)
            labels = os.path.join(root, "labels.tsv")
            assert main(["label", "--corpus", paths["corpus"],
                         "--blacklist", paths["blacklist"],
                         "--shortener-map", paths["map"],
                         "--shortener-hosts", paths["hosts"],
                         "--out", labels]) == 0
            sweep = os.path.join(root, "sweep.csv")
            assert main(["sweep", "--corpus", paths["corpus"],
                         "--labels", labels, "--seed", "0",
                         "--out", sweep]) == 0
            snapshots.append((read(paths["corpus"]), read(paths["blacklist"]),
                              read(labels), read(sweep)))
        assert snapshots[0] == snapshots[1]


def test_report_end_to_end(pipeline, tmp_path):
    out = str(tmp_path / "report")
    assert main(["report", "--corpus", pipeline["corpus"],
                 "--blacklist", pipeline["blacklist"],
                 "--shortener-map", pipeline["map"],
                 "--shortener-hosts", pipeline["hosts"],
                 "--seed", "0", "--out", out]) == 0
    for name in ("labels.tsv", "features.csv", "metrics.csv",
                 "relative_positions.csv", "time_since_post.csv",
                 "inter_attack_intervals.csv", "monthly_heatmap.csv",
                 "campaign_scatter.csv"):
        assert os.path.exists(os.path.join(out, name))
    lines = read(os.path.join(out, "metrics.csv")).decode().splitlines()
    assert [l.split(",")[0] for l in lines[1:]] == \
        ["adaboost", "decision_tree", "naive_bayes"]
