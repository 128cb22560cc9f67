import json

import numpy as np
import pytest

from folkwalk.cli import main

from gen import random_posts


@pytest.fixture()
def triples_file(tmp_path):
    rng = np.random.default_rng(0)
    posts = random_posts(rng, n_users=20, n_items=25, n_tags=6, items_per_user=(4, 9))
    lines = []
    for p in posts:
        if p.tags:
            lines.extend(f"{p.user}\t{p.item}\t{t}" for t in p.tags)
        else:
            lines.append(f"{p.user}\t{p.item}\t")
    path = tmp_path / "posts.tsv"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture()
def dataset_file(triples_file, tmp_path):
    out = str(tmp_path / "ds.json")
    assert main(["ingest", "--input", triples_file, "--dataset", out]) == 0
    return out


class TestIngest:
    def test_stats_match_hand_count(self, tmp_path, capsys):
        src = tmp_path / "small.tsv"
        src.write_text("u1\ti1\ta\nu1\ti2\tb\nu2\ti1\ta\n")
        out = str(tmp_path / "small.json")
        assert main(["ingest", "--input", str(src), "--dataset", out, "--format", "json"]) == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["num_users"] == 2
        assert stats["num_items"] == 2
        assert stats["num_selected_tags"] == 2
        assert stats["num_transactions"] == 3

    def test_empty_after_filter_exits_2(self, tmp_path, capsys):
        src = tmp_path / "small.tsv"
        src.write_text("u1\ti1\ta\n")
        out = str(tmp_path / "gone.json")
        code = main([
            "ingest", "--input", str(src), "--dataset", out,
            "--min-items-per-user", "5", "--min-users-per-item", "5",
        ])
        assert code == 2
        assert "empty" in capsys.readouterr().err

    def test_reingest_is_byte_identical(self, triples_file, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        assert main(["ingest", "--input", triples_file, "--dataset", a]) == 0
        assert main(["ingest", "--input", triples_file, "--dataset", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_manifest_written(self, dataset_file):
        manifest = json.load(open(dataset_file + ".manifest.json"))
        assert manifest["command"] == "ingest"
        assert manifest["tool_version"]
        assert len(manifest["inputs"]) == 1

    def test_parse_error_reports_line(self, tmp_path, capsys):
        src = tmp_path / "bad.tsv"
        src.write_text("u1\ti1\ta\nnot-a-triple\n")
        assert main(["ingest", "--input", str(src), "--dataset", str(tmp_path / "x.json")]) == 1
        assert "line 2" in capsys.readouterr().err


class TestRecommend:
    def test_deterministic(self, dataset_file, capsys):
        argv = ["recommend", "--dataset", dataset_file, "--algorithm", "Random",
                "--seed", "7", "--all"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first

    def test_top_n_zero_is_usage_error(self, dataset_file, capsys):
        code = main(["recommend", "--dataset", dataset_file, "--top-n", "0"])
        assert code == 2
        assert "top-n" in capsys.readouterr().err

    def test_unknown_user_named_in_error(self, dataset_file, capsys):
        code = main(["recommend", "--dataset", dataset_file, "--user", "nobody"])
        assert code == 1
        assert "nobody" in capsys.readouterr().err

    def test_json_output_for_one_user(self, dataset_file, capsys):
        assert main([
            "recommend", "--dataset", dataset_file, "--algorithm", "pRW",
            "--user", "u1", "--top-n", "3", "--format", "json",
        ]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert list(doc) == ["u1"]
        assert len(doc["u1"]) == 3


class TestEvaluate:
    def test_single_run_report(self, dataset_file, tmp_path, capsys):
        out = str(tmp_path / "out")
        assert main([
            "evaluate", "--dataset", dataset_file, "--algorithms", "Random",
            "--runs", "1", "--output-dir", out, "--format", "json",
        ]) == 0
        doc = json.loads(open(out + "/report.json").read())
        assert len(doc[0]["runs"]) == 1

    def test_byte_identical_reports(self, dataset_file, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = str(tmp_path / name)
            assert main([
                "--threads", "1", "evaluate", "--dataset", dataset_file,
                "--algorithms", "Random,UserCF,pRW", "--runs", "2",
                "--seed", "3", "--output-dir", out,
            ]) == 0
            outs.append(open(out + "/report.json", "rb").read())
        assert outs[0] == outs[1]

    def test_t_test_appended(self, dataset_file, tmp_path):
        out = str(tmp_path / "tt")
        assert main([
            "evaluate", "--dataset", dataset_file, "--algorithms", "Random,pRW",
            "--runs", "3", "--output-dir", out, "--t-test",
        ]) == 0
        doc = json.loads(open(out + "/report.json").read())
        assert {"best", "second", "t", "p"} <= set(doc["t_test"])


class TestAblate:
    def test_four_rows_with_identities(self, dataset_file, tmp_path):
        out = str(tmp_path / "ab")
        assert main([
            "ablate", "--dataset", dataset_file, "--runs", "1",
            "--alpha", "1.0", "--mu", "1.0", "--output-dir", out,
        ]) == 0
        doc = json.loads(open(out + "/report.json").read())
        kinds = [r["algorithm"]["kind"] for r in doc]
        assert kinds == ["pRW-IT", "pRW-UT", "pRW-UI", "pRW"]
        by_kind = {r["algorithm"]["kind"]: r["means"] for r in doc}
        # with alpha=1, mu=1 the full walk is the item-only variant
        assert by_kind["pRW"] == by_kind["pRW-IT"]


class TestSweep:
    def test_table_layout(self, dataset_file, tmp_path, capsys):
        out = str(tmp_path / "sw")
        assert main([
            "sweep", "--dataset", dataset_file, "--fractions", "0.2,0.4",
            "--algorithms", "Random,pRW", "--runs", "1", "--output-dir", out,
        ]) == 0
        table = capsys.readouterr().out.splitlines()
        assert table[0].split() == ["Algorithm", "20%", "40%"]
        assert table[1].split()[0] == "Random"

    def test_bad_fraction_usage_error(self, dataset_file, tmp_path):
        assert main([
            "sweep", "--dataset", dataset_file, "--fractions", "0.2,1.4",
            "--output-dir", str(tmp_path / "x"),
        ]) == 2


class TestGrid:
    def test_grid_outputs(self, dataset_file, tmp_path, capsys):
        out = str(tmp_path / "gr")
        assert main([
            "grid", "--dataset", dataset_file, "--alpha", "0,1",
            "--mu", "0.5,1", "--output-dir", out,
        ]) == 0
        doc = json.loads(open(out + "/grid.json").read())
        assert len(doc["grid"]) == 4
        assert set(doc["best"]) == {"alpha", "mu"}

    def test_no_axis_usage_error(self, dataset_file, tmp_path):
        assert main([
            "grid", "--dataset", dataset_file, "--output-dir", str(tmp_path / "y"),
        ]) == 2


class TestConfigFile:
    def test_config_supplies_defaults_but_flags_win(self, dataset_file, tmp_path, capsys):
        cfg = tmp_path / "folkwalk.cfg"
        cfg.write_text("runs = 2\nseed = 9\ntop-n = 4\n")
        out = str(tmp_path / "cfg_out")
        assert main([
            "--config", str(cfg), "evaluate", "--dataset", dataset_file,
            "--algorithms", "Random", "--runs", "1", "--output-dir", out,
        ]) == 0
        doc = json.loads(open(out + "/report.json").read())
        assert len(doc[0]["runs"]) == 1  # flag beats config
        assert doc[0]["seeds"] == [9]  # config beats default
        assert doc[0]["top_n"] == 4
