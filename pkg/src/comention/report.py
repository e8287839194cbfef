"""Pipeline orchestration, file exports, manifest and self-audit."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import centrality as centrality_mod
from . import community as community_mod
from .errors import DataError
from .graph import (Graph, build_graph, connected_components, degree_histogram,
                    density, diameter as graph_diameter, read_edge_csv,
                    write_edge_csv)
from .ingest import (apply_aliases, clique_expand, ingest_stats, load_aliases,
                     load_articles, normalize_name)
from .community import InducedGraph, Partition
from .powerlaw import DegreeDistribution, PowerLawFit, fit_loglog
from .typology import (CATEGORIES, TypeAssignment, TypeTable, assign_types,
                       build_profiles, kmeans, load_affiliations, type_table)

logger = logging.getLogger(__name__)

INPUT_FORMATS = ("articles", "edges")

F_EDGES = "edges.csv"
F_INGEST = "ingest_stats.json"
F_SUMMARY = "summary.json"
F_DEGREE_DIST = "degree_dist.csv"
F_POWERLAW_FIT = "powerlaw_fit.csv"
F_POWERLAW = "powerlaw.json"
F_CENTRALITY = "centrality.csv"
F_TOP10 = "top10.csv"
F_PARTITION = "partition.csv"
F_COMMUNITIES = "communities.csv"
F_TOP_MEMBERS = "top_members.csv"
F_GRAPHML = "graph.graphml"
F_INDUCED_GRAPHML = "induced.graphml"
F_INDUCED_DOT = "induced.dot"
F_INDUCED_JSON = "induced.json"
F_PROFILES = "profiles.csv"
F_TYPOLOGY = "typology.csv"
F_COMMUNITY_TYPES = "community_types.csv"
F_MANIFEST = "manifest.json"

MARK = "†"  # appended to names appearing in more than one leaderboard


def fmt(value) -> str:
    """Stable text form: floats use 12 significant digits, None is blank."""
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_csv(path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(cell) for cell in row])


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one full run needs; the seed is mandatory by design."""

    input: str
    seed: int
    out_dir: str
    input_format: str = "articles"
    aliases: str | None = None
    affiliations: str | None = None
    min_community_size: int = 100
    dmin: int = 3
    kmeans_k: int = 4
    top_k_persons: int = 10
    top_k_members: int = 5
    threads: int | None = None
    resolution: float = 1.0
    include_other: bool = False
    restarts: int = 1
    eigen_tol: float = 1e-10
    eigen_max_iter: int = 10000
    eigen_mixing: float = 1.0

    def validate(self) -> "PipelineConfig":
        if self.input_format not in INPUT_FORMATS:
            raise DataError(f"input_format must be one of {INPUT_FORMATS}, "
                            f"got {self.input_format!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise DataError(f"seed must be an integer, got {self.seed!r}")
        for field in ("min_community_size", "dmin", "kmeans_k", "top_k_persons",
                      "top_k_members", "restarts", "eigen_max_iter"):
            value = getattr(self, field)
            if not isinstance(value, int) or value < 1:
                raise DataError(f"{field} must be a positive integer, got {value!r}")
        if self.threads is not None and (not isinstance(self.threads, int) or self.threads < 1):
            raise DataError(f"threads must be a positive integer, got {self.threads!r}")
        if not self.resolution > 0:
            raise DataError(f"resolution must be positive, got {self.resolution!r}")
        if not 0.0 < self.eigen_mixing <= 1.0:
            raise DataError(f"eigen_mixing must be in (0, 1], got {self.eigen_mixing!r}")
        return self

    @classmethod
    def from_mapping(cls, mapping: dict) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise DataError(f"unknown config keys: {', '.join(sorted(unknown))}")
        missing = {"input", "seed", "out_dir"} - set(mapping)
        if missing:
            raise DataError(f"config is missing required keys: {', '.join(sorted(missing))}")
        return cls(**mapping).validate()

    def echo(self) -> dict:
        """Manifest echo of run parameters, minus paths and thread count.

        Paths vary across environments and threads never change the numbers,
        so leaving both out keeps manifests byte-identical for equivalent runs.
        """
        skip = {"input", "out_dir", "aliases", "affiliations", "threads"}
        return {k: v for k, v in dataclasses.asdict(self).items() if k not in skip}


@dataclass(frozen=True)
class ReportBundle:
    """What a pipeline run produced: headline numbers, file digests, skips."""

    summary: dict
    files: dict[str, str]
    skipped: tuple[tuple[str, str], ...]


def load_input_graph(config: PipelineConfig):
    """Read articles or an edge list per config; returns (graph, records or None)."""
    aliases = load_aliases(config.aliases) if config.aliases else {}
    if config.input_format == "articles":
        records = load_articles(config.input)
        if aliases:
            records = apply_aliases(records, aliases)
        return build_graph(clique_expand(records)), records
    pairs = _read_edge_pairs(config.input)
    if aliases:
        pairs = [(aliases.get(a, a), aliases.get(b, b)) for a, b in pairs]
    return build_graph(pairs), None


def _read_edge_pairs(path) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["source", "target"]:
            raise DataError(f"{path}: expected header 'source,target'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise DataError(f"{path}: line {lineno}: expected 2 columns, got {len(row)}")
            a = normalize_name(row[0])
            b = normalize_name(row[1])
            if not a or not b:
                raise DataError(f"{path}: line {lineno}: blank endpoint")
            pairs.append((a, b))
    if not pairs:
        raise DataError(f"{path}: no edges")
    return pairs


# ---------------------------------------------------------------- exports

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def export_graphml(obj, path) -> None:
    """Serialize a plain or induced graph as GraphML."""
    if isinstance(obj, Graph):
        _graph_to_graphml(obj, path)
    elif isinstance(obj, InducedGraph):
        _induced_to_graphml(obj, path)
    else:
        raise DataError(f"cannot export {type(obj).__name__} as GraphML")


def _graphml_key(root, key_id, target, name, kind):
    ET.SubElement(root, "key", attrib={
        "id": key_id, "for": target, "attr.name": name, "attr.type": kind})


def _write_xml(root, path) -> None:
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="UTF-8", xml_declaration=True)
    with open(path, "ab") as fh:
        fh.write(b"\n")


def _graph_to_graphml(g: Graph, path) -> None:
    root = ET.Element("graphml", xmlns=GRAPHML_NS)
    _graphml_key(root, "d_name", "node", "name", "string")
    container = ET.SubElement(root, "graph", id="G", edgedefault="undirected")
    for v, name in enumerate(g.names):
        node = ET.SubElement(container, "node", id=f"n{v}")
        data = ET.SubElement(node, "data", key="d_name")
        data.text = name
    us, vs = g.edge_arrays()
    for i, (u, v) in enumerate(zip(us.tolist(), vs.tolist())):
        ET.SubElement(container, "edge", id=f"e{i}", source=f"n{u}", target=f"n{v}")
    _write_xml(root, path)


def _induced_to_graphml(ig: InducedGraph, path) -> None:
    root = ET.Element("graphml", xmlns=GRAPHML_NS)
    _graphml_key(root, "d_label", "node", "label", "string")
    _graphml_key(root, "d_size", "node", "size", "long")
    _graphml_key(root, "d_intra", "node", "intra_weight", "long")
    _graphml_key(root, "d_btw", "node", "mean_betweenness", "double")
    _graphml_key(root, "d_weight", "edge", "weight", "long")
    container = ET.SubElement(root, "graph", id="induced", edgedefault="undirected")
    for c in ig.community_ids:
        node = ET.SubElement(container, "node", id=f"c{c}")
        for key, value in (("d_label", ig.labels[c]), ("d_size", ig.sizes[c]),
                           ("d_intra", ig.intra_weights[c]),
                           ("d_btw", fmt(ig.mean_betweenness[c]))):
            data = ET.SubElement(node, "data", key=key)
            data.text = str(value)
    for i, (a, b, w) in enumerate(ig.edges):
        edge = ET.SubElement(container, "edge", id=f"e{i}",
                             source=f"c{a}", target=f"c{b}")
        data = ET.SubElement(edge, "data", key="d_weight")
        data.text = str(w)
    _write_xml(root, path)


def read_graphml(path) -> Graph:
    """Rebuild a plain graph from GraphML written by :func:`export_graphml`."""
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise DataError(f"{path}: not well-formed XML: {exc}") from exc
    root = tree.getroot()

    def local(tag) -> str:
        return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""

    name_keys = {el.get("id") for el in root.iter()
                 if local(el.tag) == "key" and el.get("attr.name") == "name"}
    names: dict[str, str] = {}
    edges: list[tuple[str, str]] = []
    for el in root.iter():
        tag = local(el.tag)
        if tag == "node":
            nid = el.get("id")
            label = nid
            for data in el:
                if local(data.tag) == "data" and data.get("key") in name_keys:
                    label = data.text or nid
            names[nid] = normalize_name(label)
        elif tag == "edge":
            edges.append((el.get("source"), el.get("target")))
    if not edges:
        raise DataError(f"{path}: no edges")
    try:
        pairs = [(names[a], names[b]) for a, b in edges]
    except KeyError as exc:
        raise DataError(f"{path}: edge references unknown node {exc}") from exc
    return build_graph(pairs)


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _shade(value: float, peak: float) -> str:
    # darker fill for higher betweenness; flat inputs come out uniform
    level = 85 if peak <= 0 else 85 - int(round(60.0 * value / peak))
    return f"gray{level}"


def export_dot(obj, path, bundle=None) -> None:
    """Serialize a graph in DOT form.

    Induced graphs render with node width proportional to community size,
    grayscale fill darkening with mean betweenness, and edge penwidth
    proportional to weight.  Plain graphs list bare nodes and edges; an
    optional centrality bundle adds the same betweenness shading per person.
    Output ordering is fixed, so bytes are identical across runs.
    """
    if isinstance(obj, InducedGraph):
        _induced_to_dot(obj, path)
    elif isinstance(obj, Graph):
        _graph_to_dot(obj, path, bundle)
    else:
        raise DataError(f"cannot export {type(obj).__name__} as DOT")


def _induced_to_dot(ig: InducedGraph, path) -> None:
    peak_b = max((ig.mean_betweenness[c] for c in ig.community_ids), default=0.0)
    peak_s = max((ig.sizes[c] for c in ig.community_ids), default=1)
    peak_w = max((w for _, _, w in ig.edges), default=1)

    def display(c) -> str:
        return _dot_quote(ig.labels[c] or f"community {c}")

    lines = ["graph induced {",
             "  node [shape=circle, style=filled, fixedsize=true, fontcolor=black];"]
    for c in ig.community_ids:
        width = 0.4 + 2.0 * ig.sizes[c] / peak_s
        shade = _shade(ig.mean_betweenness[c], peak_b)
        lines.append(f"  {display(c)} [width={width:.3f}, fillcolor={shade}, "
                     f"tooltip=\"size={ig.sizes[c]}\"];")
    for a, b, w in ig.edges:
        pen = 0.5 + 4.5 * w / peak_w
        lines.append(f"  {display(a)} -- {display(b)} "
                     f"[penwidth={pen:.3f}, label=\"{w}\"];")
    lines.append("}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _graph_to_dot(g: Graph, path, bundle) -> None:
    lines = ["graph G {"]
    if bundle is not None:
        lines.append("  node [style=filled];")
        peak = float(bundle.betweenness.max()) if g.node_count else 0.0
        for v, name in enumerate(g.names):
            lines.append(f"  {_dot_quote(name)} "
                         f"[fillcolor={_shade(float(bundle.betweenness[v]), peak)}];")
    else:
        for name in g.names:
            lines.append(f"  {_dot_quote(name)};")
    for a, b in g.edges():
        lines.append(f"  {_dot_quote(a)} -- {_dot_quote(b)};")
    lines.append("}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_plot_data(dist: DegreeDistribution, fit: PowerLawFit | None, path) -> None:
    """Write (d, count, f_d, fitted) rows so the degree plot can be redrawn.

    The fitted column holds exp(intercept) * d^alpha for tail degrees when a
    log-log fit is present, and stays blank otherwise.
    """
    if fit is None:
        logger.warning("no power-law fit available; fitted column left blank")
    rows = []
    for d, count, frac in zip(dist.degrees.tolist(), dist.counts.tolist(),
                              dist.fractions.tolist()):
        fitted = None
        if fit is not None and fit.intercept is not None and d >= fit.dmin:
            fitted = float(np.exp(fit.intercept) * d ** fit.alpha)
        rows.append([d, count, frac, fitted])
    write_csv(path, ["d", "count", "f_d", "fitted"], rows)


# ------------------------------------------------------- artifact writers

def write_centrality_files(out: Path, g: Graph, bundle, top_k: int) -> list[str]:
    """centrality.csv/.json plus the four-column leaderboard files."""
    order = sorted(range(g.node_count), key=lambda v: (-bundle.betweenness[v], g.names[v]))
    write_csv(out / F_CENTRALITY,
              ["name", "degree", "closeness", "betweenness", "eigenvector", "clustering"],
              ([g.names[v], int(bundle.degree[v]), float(bundle.closeness[v]),
                float(bundle.betweenness[v]), float(bundle.eigenvector[v]),
                float(bundle.clustering[v])] for v in order))
    write_json(out / "centrality.json", [
        {"name": g.names[v], "degree": int(bundle.degree[v]),
         "closeness": float(bundle.closeness[v]),
         "betweenness": float(bundle.betweenness[v]),
         "eigenvector": float(bundle.eigenvector[v]),
         "clustering": float(bundle.clustering[v])} for v in order])

    table = centrality_mod.top_table(g, bundle, k=top_k)
    depth = max(len(column) for column in table.columns.values())
    rows = []
    for i in range(depth):
        row: list = [i + 1]
        for measure in table.measures:
            column = table.columns[measure]
            name = column[i] if i < len(column) else ""
            if name and table.marked(name):
                name += MARK
            row.append(name)
        rows.append(row)
    write_csv(out / F_TOP10, ["rank", *table.measures], rows)
    write_json(out / "top10.json", {
        "columns": {m: table.columns[m] for m in table.measures},
        "appearances": table.appearances})
    return [F_CENTRALITY, "centrality.json", F_TOP10, "top10.json"]


def write_partition_files(out: Path, g: Graph, partition: Partition) -> list[str]:
    write_csv(out / F_PARTITION, ["name", "community"],
              ([g.names[v], int(partition.labels[v])] for v in range(g.node_count)))
    write_json(out / "partition.json",
               {g.names[v]: int(partition.labels[v]) for v in range(g.node_count)})
    return [F_PARTITION, "partition.json"]


def write_community_files(out: Path, summaries, members, labels) -> list[str]:
    """communities.csv/.json and top_members.csv/.json."""
    write_csv(out / F_COMMUNITIES, ["rank", "label", "B", "S", "C", "E", "CC", "D"],
              ([i + 1, s.label, s.mean_betweenness, s.size, s.mean_closeness,
                s.mean_eigenvector, s.mean_clustering, s.internal_density]
               for i, s in enumerate(summaries)))
    write_json(out / "communities.json", [
        {"rank": i + 1, "community": s.community, "label": s.label,
         "mean_betweenness": s.mean_betweenness, "size": s.size,
         "mean_closeness": s.mean_closeness,
         "mean_eigenvector": s.mean_eigenvector,
         "mean_eigenvector_x1000": s.mean_eigenvector * 1000.0,
         "mean_clustering": s.mean_clustering,
         "internal_density": s.internal_density}
        for i, s in enumerate(summaries)])

    rows = []
    for c in sorted(members):
        for rank, name in enumerate(members[c], start=1):
            rows.append([c, labels.get(c, ""), rank, name])
    write_csv(out / F_TOP_MEMBERS, ["community", "label", "rank", "name"], rows)
    write_json(out / "top_members.json", {str(c): members[c] for c in sorted(members)})
    return [F_COMMUNITIES, "communities.json", F_TOP_MEMBERS, "top_members.json"]


def write_induced_files(out: Path, induced: InducedGraph) -> list[str]:
    export_graphml(induced, out / F_INDUCED_GRAPHML)
    export_dot(induced, out / F_INDUCED_DOT)
    write_json(out / F_INDUCED_JSON, {
        "communities": [
            {"community": c, "label": induced.labels[c], "size": induced.sizes[c],
             "mean_betweenness": induced.mean_betweenness[c],
             "intra_weight": induced.intra_weights[c]}
            for c in induced.community_ids],
        "edges": [{"a": a, "b": b, "weight": w} for a, b, w in induced.edges],
        "dropped_edges": induced.dropped_edges})
    return [F_INDUCED_GRAPHML, F_INDUCED_DOT, F_INDUCED_JSON]


def write_powerlaw_files(out: Path, dist: DegreeDistribution,
                         fit: PowerLawFit | None) -> list[str]:
    write_csv(out / F_DEGREE_DIST, ["d", "count", "f_d"],
              zip(dist.degrees.tolist(), dist.counts.tolist(), dist.fractions.tolist()))
    write_json(out / "degree_dist.json",
               [{"d": int(d), "count": int(c), "f_d": float(f)}
                for d, c, f in zip(dist.degrees, dist.counts, dist.fractions)])
    emit_plot_data(dist, fit, out / F_POWERLAW_FIT)
    write_json(out / F_POWERLAW, None if fit is None else {
        "alpha": fit.alpha, "dmin": fit.dmin, "n_tail": fit.n_tail,
        "method": fit.method, "intercept": fit.intercept, "r_squared": fit.r_squared})
    return [F_DEGREE_DIST, "degree_dist.json", F_POWERLAW_FIT, F_POWERLAW]


def write_typology_files(out: Path, profiles, assignment: TypeAssignment,
                         types: TypeTable, labels) -> list[str]:
    write_csv(out / F_PROFILES, ["community", *CATEGORIES, "unlabeled"],
              ([p.community, *p.counts.tolist(), p.unlabeled] for p in profiles))
    write_json(out / "profiles.json", [
        {"community": p.community, "counts": p.counts.tolist(),
         "unlabeled": p.unlabeled, "unlabeled_names": list(p.unlabeled_names)}
        for p in profiles])

    headers = ["category"] + [f"T{i + 1}" for i in range(len(types.type_ids))]
    rows = [[cat, *types.matrix[i].tolist()] for i, cat in enumerate(types.categories)]
    rows.append(["communities", *types.communities_per_type])
    write_csv(out / F_TYPOLOGY, headers, rows)
    write_json(out / "typology.json", {
        "type_names": list(types.type_names),
        "type_ids": list(types.type_ids),
        "categories": list(types.categories),
        "matrix": types.matrix.tolist(),
        "communities_per_type": list(types.communities_per_type)})

    display = {raw: i + 1 for i, raw in enumerate(types.type_ids)}
    write_csv(out / F_COMMUNITY_TYPES, ["community", "label", "type", "type_name"],
              ([c, labels.get(c, ""), display[assignment.types[c]],
                types.type_names[display[assignment.types[c]] - 1]]
               for c in sorted(assignment.types)))
    return [F_PROFILES, "profiles.json", F_TYPOLOGY, "typology.json", F_COMMUNITY_TYPES]


# ---------------------------------------------------------------- pipeline

def run_pipeline(config: PipelineConfig) -> ReportBundle:
    """Execute ingest through export and return the run's bundle.

    Stage order: input, centralities, communities, degree-distribution fit,
    typology (only when an affiliation table is configured), exports.  A stage
    that cannot run on this input is recorded in ``skipped`` with its reason;
    genuine data errors propagate.
    """
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    skipped: list[tuple[str, str]] = []
    threads = config.threads if config.threads is not None else os.cpu_count()

    g, records = load_input_graph(config)
    labeling = connected_components(g)
    bundle = centrality_mod.compute_bundle(
        g, eigen_tol=config.eigen_tol, eigen_max_iter=config.eigen_max_iter,
        eigen_mixing=config.eigen_mixing, threads=threads, components=labeling)
    diam = int(bundle.eccentricity[labeling.members(0)].max()) if labeling.sizes[0] > 1 else 0

    partition = community_mod.louvain(g, config.seed, config.resolution)
    q = community_mod.modularity(g, partition)
    retained = community_mod.filter_communities(partition, config.min_community_size)
    summaries = community_mod.community_summary(g, partition, bundle, retained)
    induced = community_mod.induced_graph(g, partition, retained, bundle,
                                          include_other=config.include_other)
    members = community_mod.top_members(g, partition, bundle, retained,
                                        k=config.top_k_members)
    labels = {s.community: s.label for s in summaries}

    dist = DegreeDistribution.from_graph(g)
    fit = None
    try:
        fit = fit_loglog(dist, config.dmin)
    except DataError as exc:
        skipped.append(("powerlaw", str(exc)))

    profiles = assignment = types = None
    if not config.affiliations:
        skipped.append(("typology", "no affiliation table configured"))
    else:
        table = load_affiliations(config.affiliations)
        profiles = build_profiles(members, table)
        try:
            result = kmeans(np.vstack([p.counts for p in profiles]),
                            config.kmeans_k, config.seed, restarts=config.restarts)
        except DataError as exc:
            skipped.append(("typology", str(exc)))
            profiles = None
        else:
            assignment = assign_types(profiles, result)
            types = type_table(assignment, profiles)

    try:
        r_deg_close = centrality_mod.pearson_correlation(
            bundle.degree.astype(np.float64), bundle.closeness)
    except DataError as exc:
        r_deg_close = None
        skipped.append(("degree_closeness_correlation", str(exc)))

    summary = {
        "nodes": g.node_count,
        "edges": g.edge_count,
        "density": density(g.node_count, g.edge_count),
        "diameter": diam,
        "component_count": labeling.count,
        "community_count": partition.count,
        "retained_count": len(retained),
        "modularity": q,
        "alpha": None if fit is None else fit.alpha,
        "degree_closeness_r": r_deg_close,
    }

    emitted: list[str] = []
    write_edge_csv(g, out / F_EDGES)
    emitted.append(F_EDGES)
    if records is not None:
        write_json(out / F_INGEST, ingest_stats(records, g))
        emitted.append(F_INGEST)
    emitted += write_centrality_files(out, g, bundle, config.top_k_persons)
    emitted += write_partition_files(out, g, partition)
    emitted += write_community_files(out, summaries, members, labels)
    emitted += write_induced_files(out, induced)
    emitted += write_powerlaw_files(out, dist, fit)
    export_graphml(g, out / F_GRAPHML)
    emitted.append(F_GRAPHML)
    if types is not None:
        emitted += write_typology_files(out, profiles, assignment, types, labels)
    write_json(out / F_SUMMARY, summary)
    emitted.append(F_SUMMARY)

    digests = {name: sha256_file(out / name) for name in sorted(emitted)}
    write_json(out / F_MANIFEST, {
        "config": config.echo(),
        "files": digests,
        "skipped": [list(item) for item in skipped],
    })
    return ReportBundle(summary=summary, files=digests, skipped=tuple(skipped))


# ---------------------------------------------------------------- audit

@dataclass(frozen=True)
class AuditCheck:
    name: str
    ok: bool
    detail: str


def _close(a, b, tol=1e-9) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def audit(out_dir) -> list[AuditCheck]:
    """Re-derive the summary from the emitted files and compare.

    Digests are verified for every manifest entry; graph-level numbers are
    recomputed from edges.csv; partition and community tables are cross
    checked against centrality.csv; the power-law fit is refit from
    degree_dist.csv.
    """
    out = Path(out_dir)
    checks: list[AuditCheck] = []
    manifest_path = out / F_MANIFEST
    if not manifest_path.exists():
        return [AuditCheck("manifest", False, f"{manifest_path} not found")]
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)

    broken = 0
    for name, expected in manifest.get("files", {}).items():
        path = out / name
        if not path.exists():
            checks.append(AuditCheck(f"file:{name}", False, "missing"))
            broken += 1
        elif sha256_file(path) != expected:
            checks.append(AuditCheck(f"file:{name}", False, "digest mismatch"))
            broken += 1
    if not broken:
        checks.append(AuditCheck("digests", True,
                                 f"{len(manifest.get('files', {}))} files match"))

    with open(out / F_SUMMARY, "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    config = manifest.get("config", {})

    g = read_edge_csv(out / F_EDGES)
    checks.append(AuditCheck("nodes", g.node_count == summary["nodes"],
                             f"{g.node_count} vs {summary['nodes']}"))
    checks.append(AuditCheck("edges", g.edge_count == summary["edges"],
                             f"{g.edge_count} vs {summary['edges']}"))
    dens = density(g.node_count, g.edge_count)
    checks.append(AuditCheck("density", _close(dens, summary["density"]),
                             f"{dens:.12g} vs {summary['density']:.12g}"))
    labeling = connected_components(g)
    checks.append(AuditCheck("component_count", labeling.count == summary["component_count"],
                             f"{labeling.count} vs {summary['component_count']}"))
    diam = graph_diameter(g, components=labeling)
    checks.append(AuditCheck("diameter", diam == summary["diameter"],
                             f"{diam} vs {summary['diameter']}"))

    with open(out / F_PARTITION, "r", encoding="utf-8", newline="") as fh:
        community_of = {row["name"]: int(row["community"]) for row in csv.DictReader(fh)}
    missing = [name for name in g.names if name not in community_of]
    checks.append(AuditCheck("partition_covers_graph", not missing,
                             f"{len(missing)} graph nodes missing from partition"))
    partition = None
    if not missing:
        labels = np.array([community_of[name] for name in g.names], dtype=np.int64)
        partition = Partition.from_labels(labels)
        q = community_mod.modularity(g, partition)
        checks.append(AuditCheck("modularity", _close(q, summary["modularity"]),
                                 f"{q:.12g} vs {summary['modularity']:.12g}"))
        checks.append(AuditCheck(
            "community_count", partition.count == summary["community_count"],
            f"{partition.count} vs {summary['community_count']}"))
        min_size = int(config.get("min_community_size", 1))
        kept = sum(1 for s in partition.sizes if s >= min_size)
        checks.append(AuditCheck("retained_count", kept == summary["retained_count"],
                                 f"{kept} vs {summary['retained_count']}"))

    with open(out / F_CENTRALITY, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    by_name = {row["name"]: row for row in rows}
    degree_ok = (len(by_name) == g.node_count and
                 all(int(by_name[name]["degree"]) == g.degree_of(v)
                     for v, name in enumerate(g.names) if name in by_name))
    checks.append(AuditCheck("degree_column", degree_ok, f"{len(by_name)} rows"))
    if summary.get("degree_closeness_r") is not None:
        r = centrality_mod.pearson_correlation(
            [float(row["degree"]) for row in rows],
            [float(row["closeness"]) for row in rows])
        checks.append(AuditCheck("degree_closeness_r",
                                 _close(r, summary["degree_closeness_r"], 1e-6),
                                 f"{r:.6g} vs {summary['degree_closeness_r']:.6g}"))

    hist: dict[int, int] = {}
    with open(out / F_DEGREE_DIST, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            hist[int(row["d"])] = int(row["count"])
    checks.append(AuditCheck("degree_dist", hist == degree_histogram(g),
                             f"{len(hist)} distinct degrees"))
    if summary.get("alpha") is not None:
        refit = fit_loglog(DegreeDistribution.from_histogram(hist),
                           int(config.get("dmin", 3)))
        checks.append(AuditCheck("alpha", _close(refit.alpha, summary["alpha"], 1e-9),
                                 f"{refit.alpha:.12g} vs {summary['alpha']:.12g}"))

    if partition is not None and (out / F_COMMUNITIES).exists():
        checks.append(_audit_community_means(out, g, partition, by_name))

    induced_path = out / F_INDUCED_JSON
    if induced_path.exists():
        with open(induced_path, "r", encoding="utf-8") as fh:
            induced = json.load(fh)
        total = (sum(e["weight"] for e in induced["edges"])
                 + sum(c["intra_weight"] for c in induced["communities"])
                 + induced["dropped_edges"])
        checks.append(AuditCheck("induced_conservation", total == g.edge_count,
                                 f"{total} vs m={g.edge_count}"))
    return checks


def _audit_community_means(out: Path, g: Graph, partition: Partition,
                           by_name: dict) -> AuditCheck:
    """Rebuild communities.csv means from centrality.csv and the partition."""
    with open(out / F_COMMUNITIES, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    us, vs = g.edge_arrays()
    lu = partition.labels[us]
    lv = partition.labels[vs]
    intra = np.bincount(lu[lu == lv], minlength=partition.count)

    problems = []
    for row in rows:
        label = row["label"]
        v = g.name_to_id.get(label)
        if v is None:
            problems.append(f"label {label!r} not in graph")
            continue
        members = partition.members(int(partition.labels[v]))
        s = members.size

        def mean_of(field: str) -> float:
            return float(np.mean([float(by_name[g.names[m]][field]) for m in members]))

        dens = float(intra[int(partition.labels[v])]) / (s * (s - 1) / 2.0) if s > 1 else 0.0
        if not (int(row["S"]) == s
                and _close(mean_of("betweenness"), float(row["B"]), 1e-6)
                and _close(mean_of("closeness"), float(row["C"]), 1e-6)
                and _close(mean_of("eigenvector"), float(row["E"]), 1e-6)
                and _close(mean_of("clustering"), float(row["CC"]), 1e-6)
                and _close(dens, float(row["D"]), 1e-6)):
            problems.append(f"rank {row['rank']} ({label}) mismatch")
    return AuditCheck("community_means", not problems,
                      "; ".join(problems) if problems else f"{len(rows)} rows match")
