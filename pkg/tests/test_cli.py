import csv
import json

import pytest

from comention.cli import main

ARTICLES = "\n".join(
    [
        json.dumps({"id": "left", "persons": [f"L{i}" for i in range(5)]}),
        json.dumps({"id": "right", "persons": [f"R{i}" for i in range(5)]}),
        json.dumps({"id": "bridge", "persons": ["L0", "R0"]}),
    ]
) + "\n"

AFFILIATIONS = "\n".join(
    ["name,category"]
    + [f"L{i},business" for i in range(5)]
    + [f"R{i},press" for i in range(5)]
) + "\n"


@pytest.fixture
def articles(tmp_path):
    path = tmp_path / "articles.jsonl"
    path.write_text(ARTICLES, encoding="utf-8")
    return path


@pytest.fixture
def edges_csv(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("source,target\nA,B\nB,C\nC,D\nD,E\n", encoding="utf-8")
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestIngest:
    def test_writes_edges_and_stats(self, tmp_path, articles):
        out = tmp_path / "out"
        rc = run_cli("ingest", "--input", articles, "--out-dir", out)
        assert rc == 0
        with open(out / "edges.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 21
        stats = json.loads((out / "ingest_stats.json").read_text())
        assert stats["articles"] == 3
        assert stats["persons_distinct"] == 10

    def test_aliases_applied(self, tmp_path, articles):
        aliases = tmp_path / "aliases.csv"
        aliases.write_text("alias,canonical\nL1,L0\n", encoding="utf-8")
        out = tmp_path / "out"
        rc = run_cli(
            "ingest", "--input", articles, "--aliases", aliases,
            "--out-dir", out,
        )
        assert rc == 0
        text = (out / "edges.csv").read_text(encoding="utf-8")
        assert "L1" not in text


class TestStats:
    def test_stdout_json(self, articles, capsys):
        rc = run_cli("stats", "--input", articles)
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["nodes"] == 10
        assert payload["edges"] == 21

    def test_edges_input_format(self, edges_csv, capsys):
        rc = run_cli(
            "stats", "--input", edges_csv, "--input-format", "edges"
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["nodes"] == 5
        assert payload["edges"] == 4


class TestCentrality:
    def test_writes_tables(self, tmp_path, articles):
        out = tmp_path / "out"
        rc = run_cli("centrality", "--input", articles, "--out-dir", out)
        assert rc == 0
        with open(out / "centrality.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 10
        betw = [float(r["betweenness"]) for r in rows]
        assert betw == sorted(betw, reverse=True)
        top = (out / "top10.csv").read_text(encoding="utf-8")
        assert "L0" in top

    def test_cross_column_marker(self, tmp_path, articles):
        out = tmp_path / "out"
        run_cli("centrality", "--input", articles, "--out-dir", out)
        top = (out / "top10.csv").read_text(encoding="utf-8")
        # bridge endpoints dominate every measure here
        assert "†" in top

    def test_eigen_non_convergence_exit_code(self, tmp_path, edges_csv):
        rc = run_cli(
            "centrality", "--input", edges_csv, "--input-format", "edges",
            "--out-dir", tmp_path / "out", "--eigen-max-iter", "1",
        )
        assert rc == 3


class TestCommunities:
    def test_prints_partition_stats(self, tmp_path, articles, capsys):
        out = tmp_path / "out"
        rc = run_cli(
            "communities", "--input", articles, "--out-dir", out,
            "--seed", "5", "--min-community-size", "2",
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["community_count"] == 2
        assert payload["retained_count"] == 2
        assert 0.4 < payload["modularity"] < 0.5
        assert (out / "partition.csv").exists()
        assert (out / "communities.csv").exists()

    def test_seed_is_required(self, tmp_path, articles):
        with pytest.raises(SystemExit) as err:
            run_cli(
                "communities", "--input", articles,
                "--out-dir", tmp_path / "out",
            )
        assert err.value.code == 1


class TestInduced:
    def test_writes_induced_artifacts(self, tmp_path, articles):
        out = tmp_path / "out"
        rc = run_cli(
            "induced", "--input", articles, "--out-dir", out,
            "--seed", "5", "--min-community-size", "2",
        )
        assert rc == 0
        induced = json.loads((out / "induced.json").read_text())
        total = (
            sum(e["weight"] for e in induced["edges"])
            + sum(c["intra_weight"] for c in induced["communities"])
            + induced["dropped_edges"]
        )
        assert total == 21
        assert (out / "induced.graphml").exists()
        assert (out / "induced.dot").exists()


class TestFitPowerlaw:
    @staticmethod
    def star_forest(tmp_path):
        # hubs with exact degrees 3..7, more hubs at low degrees, so the
        # tail frequencies decay and the log-log slope is negative
        edges = tmp_path / "edges.csv"
        rows = ["source,target"]
        for d, hubs in ((3, 9), (4, 5), (5, 3), (6, 2), (7, 1)):
            for j in range(hubs):
                for i in range(d):
                    rows.append(f"h{d}_{j},s{d}_{j}_{i}")
        edges.write_text("\n".join(rows) + "\n", encoding="utf-8")
        return edges

    def test_stdout_loglog(self, tmp_path, capsys):
        edges = self.star_forest(tmp_path)
        rc = run_cli(
            "fit-powerlaw", "--input", edges, "--input-format", "edges",
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["method"] == "loglog"
        assert payload["alpha"] < 0

    def test_stdout_mle(self, tmp_path, capsys):
        edges = self.star_forest(tmp_path)
        rc = run_cli(
            "fit-powerlaw", "--input", edges, "--input-format", "edges",
            "--method", "mle",
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["method"] == "mle"
        assert payload["alpha"] < -1

    def test_insufficient_tail_is_data_error(self, edges_csv):
        rc = run_cli(
            "fit-powerlaw", "--input", edges_csv, "--input-format", "edges",
        )
        assert rc == 2


class TestTypology:
    def test_writes_typology_tables(self, tmp_path, articles):
        aff = tmp_path / "affiliations.csv"
        aff.write_text(AFFILIATIONS, encoding="utf-8")
        out = tmp_path / "out"
        rc = run_cli(
            "typology", "--input", articles, "--out-dir", out,
            "--seed", "5", "--min-community-size", "2",
            "--affiliations", aff, "--k", "2",
        )
        assert rc == 0
        assert (out / "typology.csv").exists()
        assert (out / "community_types.csv").exists()
        assert (out / "profiles.csv").exists()
        text = (out / "typology.csv").read_text(encoding="utf-8")
        assert "business" in text
        assert "press" in text


class TestRun:
    def test_full_run_with_flags(self, tmp_path, articles, capsys):
        out = tmp_path / "out"
        rc = run_cli(
            "run", "--input", articles, "--out-dir", out, "--seed", "5",
            "--min-community-size", "2",
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["summary"]["nodes"] == 10
        assert (out / "manifest.json").exists()

    def test_config_file_with_flag_override(self, tmp_path, articles, capsys):
        cfg = tmp_path / "config.json"
        cfg.write_text(
            json.dumps(
                {
                    "input": str(articles),
                    "seed": 5,
                    "out_dir": str(tmp_path / "ignored"),
                    "min_community_size": 2,
                }
            ),
            encoding="utf-8",
        )
        out = tmp_path / "out"
        rc = run_cli("run", "--config", cfg, "--out-dir", out)
        assert rc == 0
        capsys.readouterr()
        assert (out / "manifest.json").exists()
        assert not (tmp_path / "ignored").exists()

    def test_unknown_config_key_is_usage_error(self, tmp_path, articles):
        cfg = tmp_path / "config.json"
        cfg.write_text(
            json.dumps(
                {
                    "input": str(articles),
                    "seed": 5,
                    "out_dir": str(tmp_path / "out"),
                    "minimum_size": 2,
                }
            ),
            encoding="utf-8",
        )
        with pytest.raises(SystemExit) as err:
            run_cli("run", "--config", cfg)
        assert err.value.code == 1

    def test_missing_seed_is_usage_error(self, tmp_path, articles):
        with pytest.raises(SystemExit) as err:
            run_cli(
                "run", "--input", articles, "--out-dir", tmp_path / "out"
            )
        assert err.value.code == 1


class TestAuditCommand:
    def test_clean_audit_exit_zero(self, tmp_path, articles, capsys):
        out = tmp_path / "out"
        run_cli(
            "run", "--input", articles, "--out-dir", out, "--seed", "5",
            "--min-community-size", "2",
        )
        capsys.readouterr()
        rc = run_cli("audit", "--out-dir", out)
        assert rc == 0
        assert "ok" in capsys.readouterr().out

    def test_tampered_audit_exit_two(self, tmp_path, articles, capsys):
        out = tmp_path / "out"
        run_cli(
            "run", "--input", articles, "--out-dir", out, "--seed", "5",
            "--min-community-size", "2",
        )
        with open(out / "edges.csv", "a", encoding="utf-8") as fh:
            fh.write("Z1,Z2\n")
        capsys.readouterr()
        rc = run_cli("audit", "--out-dir", out)
        assert rc == 2
        assert "FAIL" in capsys.readouterr().out


class TestErrorChannels:
    def test_unknown_subcommand_usage_error(self):
        with pytest.raises(SystemExit) as err:
            run_cli("explode")
        assert err.value.code == 1

    def test_missing_input_flag_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run_cli("stats")
        assert err.value.code == 1

    def test_missing_file_data_error(self, tmp_path):
        rc = run_cli("stats", "--input", tmp_path / "nope.jsonl")
        assert rc == 2

    def test_malformed_articles_data_error(self, tmp_path, capsys):
        bad = tmp_path / "articles.jsonl"
        bad.write_text('{"id":"a1","persons":["A","B"]}\n{broken\n')
        rc = run_cli("stats", "--input", bad)
        assert rc == 2
        err = capsys.readouterr().err
        assert "line 2" in err
