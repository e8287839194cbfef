"""Node centralities: degree, closeness, betweenness, eigenvector, clustering."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._sweep import gather_rows, sweep
from .errors import ConvergenceError, DataError
from .graph import ComponentLabeling, Graph, connected_components

logger = logging.getLogger(__name__)

MEASURES = ("degree", "closeness", "betweenness", "eigenvector")


@dataclass(frozen=True, eq=False)
class CentralityBundle:
    """All per-node scores from one pass over a graph.

    ``eccentricity`` rides along because the sweep that produces closeness
    and betweenness yields it for free; its maximum over the largest
    component is the graph diameter.
    """

    degree: np.ndarray
    closeness: np.ndarray
    betweenness: np.ndarray
    eigenvector: np.ndarray
    clustering: np.ndarray
    eccentricity: np.ndarray

    def by_name(self, measure: str) -> np.ndarray:
        if measure not in MEASURES and measure != "clustering":
            raise DataError(f"unknown measure {measure!r}")
        return getattr(self, measure)


def degree_centrality(g: Graph) -> np.ndarray:
    """Raw degree per node."""
    return g.degrees.astype(np.int64)


def closeness_centrality(g: Graph, *, threads: int | None = None) -> np.ndarray:
    """Per-component closeness: (reachable - 1) / sum of distances.

    A node alone in its component scores 0.  Disconnected graphs only get a
    warning since every component is handled on its own.
    """
    result = sweep(g.indptr, g.adjacency, g.node_count,
                   np.arange(g.node_count, dtype=np.int64), threads=threads)
    closeness = np.zeros(g.node_count, dtype=np.float64)
    connected = result.reachable > 1
    closeness[connected] = (result.reachable[connected] - 1.0) / result.distance_sum[connected]
    return closeness


def betweenness_centrality(g: Graph, *, threads: int | None = None) -> np.ndarray:
    """Shortest-path betweenness, endpoints excluded, scaled into [0, 1].

    Raw dependency sums count every ordered source/target pair, so the scale
    factor is (n - 1)(n - 2).  Graphs with fewer than 3 nodes score all zero.
    """
    n = g.node_count
    if n < 3:
        return np.zeros(n, dtype=np.float64)
    result = sweep(g.indptr, g.adjacency, n, np.arange(n, dtype=np.int64),
                   betweenness=True, threads=threads)
    return result.betweenness_raw / ((n - 1.0) * (n - 2.0))


def eigenvector_centrality(g: Graph, *, tol: float = 1e-10, max_iter: int = 10000,
                           mixing: float = 1.0,
                           components: ComponentLabeling | None = None) -> np.ndarray:
    """Dominant-eigenvector scores on the largest component, zeros elsewhere.

    Power iteration runs on A + I, which has the same dominant eigenvector as
    the adjacency matrix A but keeps the iteration from oscillating on
    bipartite structures.  The iterate is L2-normalized each step and deemed
    converged when the max-norm change drops below ``tol``.  ``mixing`` < 1
    blends in a uniform vector, trading exactness for extra robustness.
    """
    if not 0.0 < mixing <= 1.0:
        raise DataError(f"mixing must be in (0, 1], got {mixing}")
    labeling = components if components is not None else connected_components(g)
    if labeling.count > 1:
        logger.warning("graph is disconnected (%d components); eigenvector scores cover "
                       "the largest component only", labeling.count)
    members = labeling.members(0)
    n = g.node_count

    inside = np.zeros(n, dtype=bool)
    inside[members] = True
    src = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    keep = inside[src]
    src = src[keep]
    dst = g.adjacency[keep].astype(np.int64)

    uniform = np.zeros(n, dtype=np.float64)
    uniform[members] = 1.0 / np.sqrt(members.size)
    vec = uniform.copy()
    for _ in range(max_iter):
        nxt = vec + np.bincount(dst, weights=vec[src], minlength=n)
        if mixing < 1.0:
            nxt = mixing * nxt + (1.0 - mixing) * uniform
        nxt /= np.linalg.norm(nxt)
        if np.abs(nxt - vec).max() < tol:
            return nxt
        vec = nxt
    raise ConvergenceError(
        f"eigenvector power iteration did not converge in {max_iter} iterations "
        f"(tol={tol:g}); retry with mixing=0.999 to damp the iteration")


def clustering_coefficient(g: Graph) -> np.ndarray:
    """Fraction of realized links among each node's neighbors.

    2 * triangles(v) / (deg (deg - 1)); nodes of degree < 2 score 0.
    """
    n = g.node_count
    out = np.zeros(n, dtype=np.float64)
    degrees = g.degrees
    for v in range(n):
        d = int(degrees[v])
        if d < 2:
            continue
        row = g.neighbors(v)
        two_hop, _ = gather_rows(g.indptr, g.adjacency, row.astype(np.int64))
        links = int(np.isin(two_hop, row).sum())  # each neighbor pair edge seen twice
        out[v] = links / (d * (d - 1.0))
    return out


def compute_bundle(g: Graph, *, eigen_tol: float = 1e-10, eigen_max_iter: int = 10000,
                   eigen_mixing: float = 1.0, threads: int | None = None,
                   components: ComponentLabeling | None = None) -> CentralityBundle:
    """Compute every score with one shared BFS sweep."""
    n = g.node_count
    labeling = components if components is not None else connected_components(g)
    result = sweep(g.indptr, g.adjacency, n, np.arange(n, dtype=np.int64),
                   betweenness=True, threads=threads)
    closeness = np.zeros(n, dtype=np.float64)
    connected = result.reachable > 1
    closeness[connected] = (result.reachable[connected] - 1.0) / result.distance_sum[connected]
    if n < 3:
        betweenness = np.zeros(n, dtype=np.float64)
    else:
        betweenness = result.betweenness_raw / ((n - 1.0) * (n - 2.0))
    eigenvector = eigenvector_centrality(g, tol=eigen_tol, max_iter=eigen_max_iter,
                                         mixing=eigen_mixing, components=labeling)
    return CentralityBundle(
        degree=degree_centrality(g),
        closeness=closeness,
        betweenness=betweenness,
        eigenvector=eigenvector,
        clustering=clustering_coefficient(g),
        eccentricity=result.eccentricity,
    )


def pearson_correlation(x, y) -> float:
    """Sample Pearson correlation of two equal-length sequences."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError("inputs must be 1-d sequences of equal length")
    if x.size < 2:
        raise DataError(f"need at least 2 points, got {x.size}")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = np.sqrt((dx * dx).sum())
    sy = np.sqrt((dy * dy).sum())
    if sx == 0.0 or sy == 0.0:
        raise DataError("correlation undefined: an input has zero variance")
    return float((dx * dy).sum() / (sx * sy))


def top_k(g: Graph, bundle: CentralityBundle, measure: str, k: int = 10) -> list[str]:
    """Names ranked by a measure, descending, ties broken by name ascending."""
    if measure not in MEASURES:
        raise DataError(f"measure must be one of {MEASURES}, got {measure!r}")
    if k <= 0:
        raise DataError(f"k must be positive, got {k}")
    scores = bundle.by_name(measure)
    ranked = sorted(range(g.node_count), key=lambda v: (-scores[v], g.names[v]))
    return [g.names[v] for v in ranked[:k]]


@dataclass(frozen=True)
class TopTable:
    """Side-by-side leaderboards with cross-column appearance counts.

    ``appearances`` maps each listed name to how many columns carry it; a
    name is conventionally marked when that count exceeds 1.
    """

    measures: tuple[str, ...]
    columns: dict[str, list[str]]
    appearances: dict[str, int]

    def marked(self, name: str) -> bool:
        return self.appearances.get(name, 0) > 1


def top_table(g: Graph, bundle: CentralityBundle, k: int = 10,
              measures: tuple[str, ...] = MEASURES) -> TopTable:
    columns = {m: top_k(g, bundle, m, k) for m in measures}
    appearances: dict[str, int] = {}
    for m in measures:
        for name in columns[m]:
            appearances[name] = appearances.get(name, 0) + 1
    return TopTable(measures=tuple(measures), columns=columns, appearances=appearances)
