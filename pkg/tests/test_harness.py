from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from click.testing import CliRunner

import pathx.harness as harness_mod
from pathx.cli import main as cli_main
from pathx.harness import ConfigError, ResultsTable, RunConfig, load_config, run_offline_eval
from pathx.report import emit_report


def write_corpus(root: Path, n_users=6, n_items=10, seed=13) -> dict[str, Path]:
    rng = random.Random(seed)
    genres = ["drama", "comedy", "thriller"]
    actors = ["actor a", "actor b", "actor c", "actor d"]
    kg_rows = []
    for i in range(n_items):
        item = f"m{i}"
        kg_rows.append((item, "genre", genres[i % len(genres)]))
        kg_rows.append((item, "cast member", actors[i % len(actors)]))
        if i % 2 == 0:
            kg_rows.append((item, "cast member", actors[(i + 1) % len(actors)]))
    kg_rows.append(("thriller", "subclass of", "drama"))
    kg_path = root / "kg.tsv"
    kg_path.write_text("\n".join("\t".join(r) for r in kg_rows) + "\n", encoding="utf-8")

    lines = ["userId,movieId,rating,timestamp"]
    for u in range(n_users):
        items = rng.sample(range(n_items), rng.randint(4, 6))
        for t, i in enumerate(items):
            lines.append(f"u{u},m{i},{rng.choice([2.0, 3.0, 4.0, 5.0])},{100 + 10 * t}")
    data_path = root / "ratings.csv"
    data_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    names_path = root / "names.csv"
    names_path.write_text(
        "id,name\n" + "\n".join(f"m{i},Movie {i}" for i in range(n_items)) + "\n", encoding="utf-8"
    )

    config_path = root / "run.yaml"
    config_path.write_text(
        "\n".join(
            [
                "dataset: ratings.csv",
                "kg: kg.tsv",
                "names: names.csv",
                "schema:",
                "  user: userId",
                "  item: movieId",
                "  rating: rating",
                "  timestamp: timestamp",
                "folds: 3",
                "seed: 5",
                "top_ks: [1, 2]",
                "ranking_ks: [1, 2]",
                "models:",
                "  - kind: most_pop",
                "  - kind: ease",
                "    params: {lam: 5.0}",
                "scorers: [explod, explod_v2, pem]",
                "out: out",
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    return {"kg": kg_path, "data": data_path, "config": config_path, "names": names_path}


@pytest.fixture
def corpus(tmp_path):
    return write_corpus(tmp_path)


class TestConfig:
    def test_missing_dataset_is_config_error(self, tmp_path, corpus):
        cfg = load_config(corpus["config"])
        bad = RunConfig(**{**cfg.__dict__, "dataset_path": tmp_path / "nope.csv"})
        with pytest.raises(ConfigError):
            bad.validate()

    def test_overrides_win(self, corpus, tmp_path):
        cfg = load_config(corpus["config"], seed=99, out_dir=str(tmp_path / "o2"), top_ks=(1,))
        assert cfg.seed == 99
        assert cfg.top_ks == (1,)

    def test_invalid_yaml_root(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("- just\n- a list\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)


class TestRunOfflineEval:
    def test_tiny_config_single_row_top1_etd_is_one(self, tmp_path, corpus):
        cfg = load_config(corpus["config"], out_dir=str(tmp_path / "out1"), top_ks=(1,))
        cfg = RunConfig(**{**cfg.__dict__, "models": cfg.models[:1], "scorers": ("explod",), "fold_subset": (0,)})
        table = run_offline_eval(cfg)
        assert list(table.rows) == [("most_pop", "explod", 1)]
        assert table.rows[("most_pop", "explod", 1)]["etd"] == 1.0

    def test_every_cell_present_and_etd_law(self, tmp_path, corpus):
        cfg = load_config(corpus["config"], out_dir=str(tmp_path / "out2"))
        table = run_offline_eval(cfg)
        assert not table.errors
        for model in ("most_pop", "ease"):
            for scorer in ("explod", "explod_v2", "pem"):
                for k in (1, 2):
                    assert (model, scorer, k) in table.rows
                assert table.rows[(model, scorer, 1)]["etd"] == 1.0

    def test_artifacts_persisted(self, tmp_path, corpus):
        out = tmp_path / "out3"
        cfg = load_config(corpus["config"], out_dir=str(out))
        run_offline_eval(cfg)
        for fold in range(3):
            assert (out / f"recs_most_pop_{fold}.csv").exists()
            assert (out / f"expl_ease_pem_{fold}.csv").exists()
        assert (out / "results.json").exists()

    def test_rerun_is_byte_identical(self, tmp_path, corpus):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            cfg = load_config(corpus["config"], out_dir=str(out))
            table = run_offline_eval(cfg)
            emit_report(table, out)
        for name in ("metrics.csv", "report.md", "results.json", "recs_ease_0.csv", "expl_most_pop_explod_1.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_stage_failure_recorded_not_fatal(self, tmp_path, corpus, monkeypatch):
        real_fit = harness_mod.fit

        def flaky_fit(spec, train, g=None, seed=0):
            if spec.kind == "ease":
                raise RuntimeError("synthetic failure")
            return real_fit(spec, train, g, seed)

        monkeypatch.setattr(harness_mod, "fit", flaky_fit)
        out = tmp_path / "out4"
        cfg = load_config(corpus["config"], out_dir=str(out))
        table = run_offline_eval(cfg)
        assert any(e["model"] == "ease" for e in table.errors)
        assert ("most_pop", "explod", 1) in table.rows
        assert all(key[0] != "ease" for key in table.rows)
        manifest = json.loads((out / "errors.json").read_text())
        assert manifest[0]["error"].endswith("synthetic failure")

    def test_ranking_bundle_mean_over_folds(self, tmp_path, corpus):
        cfg = load_config(corpus["config"], out_dir=str(tmp_path / "out5"))
        table = run_offline_eval(cfg)
        assert set(table.ranking) == {"most_pop", "ease"}
        for bundle in table.ranking.values():
            assert set(bundle) == {"ndcg", "map", "agg_div", "entropy", "gini", "coverage"}
            for per_k in bundle.values():
                assert set(per_k) == {1, 2}

    def test_significance_marks_cover_scorer_pairs(self, tmp_path, corpus):
        cfg = load_config(corpus["config"], out_dir=str(tmp_path / "out6"))
        table = run_offline_eval(cfg)
        keys = set(table.significance)
        assert ("most_pop", 1, "sep", "explod", "explod_v2") in keys
        assert ("ease", 2, "tpd", "explod_v2", "pem") in keys
        for p in table.significance.values():
            assert 0.0 <= p <= 1.0

    def test_results_round_trip(self, tmp_path, corpus):
        out = tmp_path / "out7"
        cfg = load_config(corpus["config"], out_dir=str(out))
        table = run_offline_eval(cfg)
        payload = json.loads((out / "results.json").read_text())
        restored = ResultsTable.from_json(payload)
        assert restored.rows == table.rows
        assert restored.significance == table.significance
        assert restored.per_user == table.per_user


class TestCli:
    def test_ingest_reports_stats(self, tmp_path, corpus):
        runner = CliRunner()
        result = runner.invoke(
            cli_main, ["ingest", "--config", str(corpus["config"]), "--out", str(tmp_path / "ing")]
        )
        assert result.exit_code == 0, result.output
        stats = json.loads((tmp_path / "ing" / "ingest_stats.json").read_text())
        assert stats["dataset_processed"]["users"] == 6
        assert (tmp_path / "ing" / "fold_manifest.csv").exists()
        assert (tmp_path / "ing" / "kg_canonical.tsv").exists()

    def test_eval_and_report_round_trip(self, tmp_path, corpus):
        runner = CliRunner()
        out = tmp_path / "cli_out"
        result = runner.invoke(
            cli_main, ["eval", "--config", str(corpus["config"]), "--out", str(out), "--k", "1"]
        )
        assert result.exit_code == 0, result.output
        assert (out / "metrics.csv").exists()
        first = (out / "metrics.csv").read_bytes()

        re_out = tmp_path / "re_emit"
        result = runner.invoke(
            cli_main, ["report", "--results", str(out / "results.json"), "--out", str(re_out)]
        )
        assert result.exit_code == 0, result.output
        assert (re_out / "metrics.csv").read_bytes() == first

    def test_explain_writes_explanation_files(self, tmp_path, corpus):
        runner = CliRunner()
        out = tmp_path / "expl_out"
        result = runner.invoke(
            cli_main, ["explain", "--config", str(corpus["config"]), "--out", str(out), "--k", "1"]
        )
        assert result.exit_code == 0, result.output
        assert "expl_most_pop_explod_0.csv" in result.output
        header = (out / "expl_most_pop_explod_0.csv").read_text().splitlines()[0]
        assert header == "fold,user,recommended,attributes,edge_type,linked_items,score,sentence"

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("dataset: missing.csv\nkg: missing.tsv\nmodels: [{kind: most_pop}]\n", encoding="utf-8")
        runner = CliRunner()
        result = runner.invoke(cli_main, ["eval", "--config", str(bad)])
        assert result.exit_code == 2

    def test_partial_failure_exit_code(self, tmp_path, corpus, monkeypatch):
        real_fit = harness_mod.fit

        def flaky_fit(spec, train, g=None, seed=0):
            if spec.kind == "ease":
                raise RuntimeError("synthetic failure")
            return real_fit(spec, train, g, seed)

        monkeypatch.setattr(harness_mod, "fit", flaky_fit)
        runner = CliRunner()
        result = runner.invoke(
            cli_main, ["eval", "--config", str(corpus["config"]), "--out", str(tmp_path / "pf")]
        )
        assert result.exit_code == 3
