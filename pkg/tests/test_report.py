import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import graph_from, id_pairs, modularity_oracle, random_pairs
from comention import (
    DataError,
    DegreeDistribution,
    Partition,
    PipelineConfig,
    build_graph,
    compute_bundle,
    emit_plot_data,
    export_dot,
    export_graphml,
    fit_loglog,
    induced_graph,
    read_graphml,
    run_pipeline,
)
from comention.report import (
    F_COMMUNITY_TYPES,
    F_DEGREE_DIST,
    F_EDGES,
    F_INGEST,
    F_MANIFEST,
    F_PARTITION,
    F_PROFILES,
    F_SUMMARY,
    F_TOP10,
    F_TYPOLOGY,
    audit,
)

CLIQUE_ARTICLES = [
    {"id": "left", "persons": [f"L{i}" for i in range(5)]},
    {"id": "right", "persons": [f"R{i}" for i in range(5)]},
    {"id": "bridge", "persons": ["L0", "R0"]},
]

AFFILIATIONS = "\n".join(
    ["name,category"]
    + [f"L{i},business" for i in range(3)]
    + [f"L{i},politics" for i in range(3, 5)]
    + [f"R{i},press" for i in range(4)]
    + ["R4,criminal"]
) + "\n"


def write_fixture(tmp_path, with_affiliations=True):
    articles = tmp_path / "articles.jsonl"
    articles.write_text(
        "".join(json.dumps(a) + "\n" for a in CLIQUE_ARTICLES),
        encoding="utf-8",
    )
    aff = None
    if with_affiliations:
        aff = tmp_path / "affiliations.csv"
        aff.write_text(AFFILIATIONS, encoding="utf-8")
    return articles, aff


def clique_config(tmp_path, out_name="out", **kw):
    articles, aff = write_fixture(tmp_path, kw.pop("with_affiliations", True))
    defaults = dict(
        input=str(articles),
        seed=5,
        out_dir=str(tmp_path / out_name),
        affiliations=None if aff is None else str(aff),
        min_community_size=2,
        kmeans_k=2,
    )
    defaults.update(kw)
    return PipelineConfig(**defaults)


def local(tag):
    return tag.rsplit("}", 1)[-1]


class TestPipelineConfig:
    def test_defaults_follow_reported_methodology(self):
        cfg = PipelineConfig(input="x", seed=1, out_dir="y")
        assert cfg.min_community_size == 100
        assert cfg.dmin == 3
        assert cfg.kmeans_k == 4
        assert cfg.top_k_persons == 10
        assert cfg.top_k_members == 5

    def test_positive_threshold_validation(self):
        for field in (
            "min_community_size",
            "dmin",
            "kmeans_k",
            "top_k_persons",
            "top_k_members",
        ):
            with pytest.raises(DataError):
                PipelineConfig(
                    input="x", seed=1, out_dir="y", **{field: 0}
                ).validate()

    def test_input_format_validation(self):
        with pytest.raises(DataError):
            PipelineConfig(
                input="x", seed=1, out_dir="y", input_format="parquet"
            ).validate()

    def test_from_mapping_rejects_unknown_keys(self):
        with pytest.raises(DataError, match="unknown"):
            PipelineConfig.from_mapping(
                {"input": "x", "seed": 1, "out_dir": "y", "topk": 3}
            )

    def test_from_mapping_requires_seed(self):
        with pytest.raises(DataError, match="seed"):
            PipelineConfig.from_mapping({"input": "x", "out_dir": "y"})

    def test_echo_excludes_paths_and_threads(self):
        cfg = PipelineConfig(
            input="/a", seed=1, out_dir="/b", aliases="/c", threads=7
        )
        echo = cfg.echo()
        assert "input" not in echo
        assert "out_dir" not in echo
        assert "aliases" not in echo
        assert "threads" not in echo
        assert echo["seed"] == 1
        assert echo["min_community_size"] == 100


class TestRunPipeline:
    def test_two_clique_fixture(self, tmp_path):
        bundle = run_pipeline(clique_config(tmp_path))
        out = tmp_path / "out"
        assert bundle.summary["nodes"] == 10
        assert bundle.summary["edges"] == 21
        assert bundle.summary["community_count"] == 2
        assert bundle.summary["retained_count"] == 2
        assert bundle.summary["component_count"] == 1
        assert bundle.summary["diameter"] == 3

        with open(out / F_PARTITION, newline="", encoding="utf-8") as fh:
            community_of = {
                row["name"]: int(row["community"])
                for row in csv.DictReader(fh)
            }
        with open(out / F_EDGES, newline="", encoding="utf-8") as fh:
            edge_rows = [
                (row["source"], row["target"]) for row in csv.DictReader(fh)
            ]
        g = build_graph(edge_rows)
        labels = [community_of[name] for name in g.names]
        want_q = modularity_oracle(g.node_count, id_pairs(g), labels)
        assert bundle.summary["modularity"] == pytest.approx(
            want_q, abs=1e-12
        )

        for name in (
            F_EDGES,
            F_INGEST,
            F_PARTITION,
            F_TOP10,
            F_DEGREE_DIST,
            F_PROFILES,
            F_TYPOLOGY,
            F_COMMUNITY_TYPES,
            F_SUMMARY,
        ):
            assert name in bundle.files
            assert (out / name).exists()
        assert (out / F_MANIFEST).exists()

        # only two distinct tail degrees here, so the power-law stage skips
        assert bundle.summary["alpha"] is None
        assert any(stage == "powerlaw" for stage, _ in bundle.skipped)

    def test_typology_skipped_without_affiliations(self, tmp_path):
        bundle = run_pipeline(
            clique_config(tmp_path, with_affiliations=False)
        )
        assert F_TYPOLOGY not in bundle.files
        assert F_PROFILES not in bundle.files
        assert any(stage == "typology" for stage, _ in bundle.skipped)

    def test_edges_input_skips_ingest_stats(self, tmp_path):
        edges = tmp_path / "edges.csv"
        edges.write_text(
            "source,target\nA,B\nB,C\nC,A\nC,D\n", encoding="utf-8"
        )
        cfg = PipelineConfig(
            input=str(edges),
            seed=3,
            out_dir=str(tmp_path / "out"),
            input_format="edges",
            min_community_size=1,
        )
        bundle = run_pipeline(cfg)
        assert F_INGEST not in bundle.files
        assert bundle.summary["nodes"] == 4

    def test_manifest_identical_across_runs_and_threads(self, tmp_path):
        cfg1 = clique_config(tmp_path, out_name="out1", threads=1)
        cfg2 = clique_config(tmp_path, out_name="out2", threads=2)
        run_pipeline(cfg1)
        run_pipeline(cfg2)
        m1 = (tmp_path / "out1" / F_MANIFEST).read_bytes()
        m2 = (tmp_path / "out2" / F_MANIFEST).read_bytes()
        assert m1 == m2

    def test_unreadable_input_is_data_error(self, tmp_path):
        cfg = PipelineConfig(
            input=str(tmp_path / "missing.jsonl"),
            seed=1,
            out_dir=str(tmp_path / "out"),
        )
        with pytest.raises((DataError, OSError)):
            run_pipeline(cfg)


class TestGraphML:
    def test_triangle_element_counts(self, tmp_path):
        g = build_graph([("A", "B"), ("B", "C"), ("C", "A")])
        path = tmp_path / "g.graphml"
        export_graphml(g, path)
        tree = ET.parse(path)
        tags = [local(el.tag) for el in tree.iter()]
        assert tags.count("node") == 3
        assert tags.count("edge") == 3

    def test_round_trip_random_graphs(self, tmp_path):
        rng = np.random.default_rng(271)
        for i in range(8):
            g = graph_from(random_pairs(rng))
            path = tmp_path / f"g{i}.graphml"
            export_graphml(g, path)
            back = read_graphml(path)
            assert set(back.names) == set(g.names)
            assert {frozenset(e) for e in back.edges()} == {
                frozenset(e) for e in g.edges()
            }

    def test_induced_weight_attribute(self, tmp_path):
        g = build_graph(
            [("A", "B"), ("B", "C"), ("X", "Y"), ("A", "X"), ("B", "Y")]
        )
        p = Partition.from_labels(
            [0 if n in "ABC" else 1 for n in g.names]
        )
        bundle = compute_bundle(g)
        ind = induced_graph(g, p, [0, 1], bundle)
        path = tmp_path / "induced.graphml"
        export_graphml(ind, path)
        text = path.read_text(encoding="utf-8")
        assert "weight" in text
        tree = ET.parse(path)
        weights = [
            el.text
            for el in tree.iter()
            if local(el.tag) == "data" and el.get("key") == "d_weight"
        ]
        assert "2" in weights


class TestDot:
    def test_two_node_induced_statements(self, tmp_path):
        g = build_graph([("A", "B"), ("B", "C"), ("X", "Y"), ("A", "X")])
        p = Partition.from_labels([0 if n in "ABC" else 1 for n in g.names])
        bundle = compute_bundle(g)
        ind = induced_graph(g, p, [0, 1], bundle)
        path = tmp_path / "induced.dot"
        export_dot(ind, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        node_lines = [l for l in lines if "tooltip=" in l]
        edge_lines = [l for l in lines if "--" in l]
        assert len(node_lines) == 2
        assert len(edge_lines) == 1
        assert 'label="1"' in edge_lines[0]

    def test_equal_betweenness_uniform_shade(self, tmp_path):
        g = build_graph([("A", "B"), ("C", "D"), ("A", "C"), ("B", "D")])
        p = Partition.from_labels([0, 0, 1, 1])
        bundle = compute_bundle(g)
        ind = induced_graph(g, p, [0, 1], bundle)
        path = tmp_path / "induced.dot"
        export_dot(ind, path)
        shades = {
            part.split(",")[0]
            for line in path.read_text(encoding="utf-8").splitlines()
            if "fillcolor=" in line
            for part in [line.split("fillcolor=")[1]]
        }
        assert len(shades) == 1

    def test_byte_identical_across_runs(self, tmp_path):
        g = build_graph([("A", "B"), ("B", "C"), ("X", "Y"), ("A", "X")])
        p = Partition.from_labels([0 if n in "ABC" else 1 for n in g.names])
        bundle = compute_bundle(g)
        ind = induced_graph(g, p, [0, 1], bundle)
        p1 = tmp_path / "a.dot"
        p2 = tmp_path / "b.dot"
        export_dot(ind, p1)
        export_dot(ind, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_plain_graph_statements(self, tmp_path):
        g = build_graph([("A", "B")])
        path = tmp_path / "g.dot"
        export_dot(g, path)
        text = path.read_text(encoding="utf-8")
        assert text.count("--") == 1
        assert text.startswith("graph")


class TestPlotData:
    @staticmethod
    def exact_dist(alpha=-2.0, lo=3, hi=30):
        degrees = np.arange(lo, hi + 1)
        weights = degrees.astype(np.float64) ** alpha
        return DegreeDistribution(
            degrees=degrees,
            counts=weights,
            fractions=weights / weights.sum(),
        )

    def test_exact_input_fitted_equals_observed(self, tmp_path):
        dist = self.exact_dist()
        fit = fit_loglog(dist, dmin=3)
        path = tmp_path / "fit.csv"
        emit_plot_data(dist, fit, path)
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == dist.degrees.size
        for row in rows:
            assert float(row["fitted"]) == pytest.approx(
                float(row["f_d"]), rel=1e-9
            )

    def test_no_fit_leaves_blank_with_notice(self, tmp_path, caplog):
        dist = self.exact_dist(lo=1, hi=2)
        path = tmp_path / "fit.csv"
        with caplog.at_level("WARNING", logger="comention.report"):
            emit_plot_data(dist, None, path)
        assert caplog.records
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert all(row["fitted"] == "" for row in rows)

    def test_fitted_matches_independent_evaluation(self, tmp_path):
        rng = np.random.default_rng(277)
        degrees = np.arange(3, 40)
        weights = degrees.astype(np.float64) ** -1.9 * np.exp(
            rng.normal(0, 0.05, size=degrees.size)
        )
        dist = DegreeDistribution(
            degrees=degrees,
            counts=weights,
            fractions=weights / weights.sum(),
        )
        fit = fit_loglog(dist, dmin=3)
        path = tmp_path / "fit.csv"
        emit_plot_data(dist, fit, path)
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        for row in rows:
            want = float(
                np.exp(fit.intercept) * int(row["d"]) ** fit.alpha
            )
            assert float(row["fitted"]) == pytest.approx(want, rel=1e-9)


class TestAudit:
    def test_fresh_run_passes(self, tmp_path):
        run_pipeline(clique_config(tmp_path))
        checks = audit(tmp_path / "out")
        failed = [c for c in checks if not c.ok]
        assert not failed, failed
        names = {c.name for c in checks}
        assert {"digests", "modularity", "degree_dist"} <= names

    def test_tampered_file_detected(self, tmp_path):
        run_pipeline(clique_config(tmp_path))
        out = tmp_path / "out"
        with open(out / F_EDGES, "a", encoding="utf-8") as fh:
            fh.write("Z1,Z2\n")
        checks = audit(out)
        assert any(not c.ok for c in checks)

    def test_missing_manifest_reported(self, tmp_path):
        checks = audit(tmp_path)
        assert len(checks) == 1
        assert not checks[0].ok
