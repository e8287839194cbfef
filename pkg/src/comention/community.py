"""Louvain community detection and community-level reporting structures."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .centrality import CentralityBundle
from .errors import DataError
from .graph import Graph, density

logger = logging.getLogger(__name__)

OTHER = -1  # pseudo-community absorbing non-retained nodes in the induced view


@dataclass(frozen=True, eq=False)
class Partition:
    """Dense node-to-community assignment.

    Community ids run 0..count-1 with no gaps; ``sizes[c]`` is the member
    count of community ``c`` and sums to the node count.
    """

    labels: np.ndarray
    sizes: tuple[int, ...]

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise DataError("labels must be a non-empty 1-d sequence")
        count = int(labels.max()) + 1
        if labels.min() < 0:
            raise DataError("community ids must be non-negative")
        sizes = np.bincount(labels, minlength=count)
        if (sizes == 0).any():
            raise DataError("community ids must be dense starting at 0")
        return cls(labels=labels, sizes=tuple(int(s) for s in sizes))

    @property
    def count(self) -> int:
        return len(self.sizes)

    def members(self, community: int) -> np.ndarray:
        return np.flatnonzero(self.labels == community)


def renumber_by_size(labels: np.ndarray) -> Partition:
    """Relabel communities densely, largest first; ties keep earlier first member."""
    labels = np.asarray(labels, dtype=np.int64)
    uniq, first_pos, inverse, counts = np.unique(
        labels, return_index=True, return_inverse=True, return_counts=True)
    rank = np.lexsort((first_pos, -counts))
    remap = np.empty(uniq.size, dtype=np.int64)
    remap[rank] = np.arange(uniq.size)
    return Partition.from_labels(remap[inverse])


def modularity(g: Graph, p: Partition) -> float:
    """Q = sum over communities of e_c/m - (d_c / 2m)^2."""
    if p.labels.size != g.node_count:
        raise DataError(f"partition covers {p.labels.size} nodes, graph has {g.node_count}")
    m = g.edge_count
    us, vs = g.edge_arrays()
    lu = p.labels[us]
    lv = p.labels[vs]
    e_c = np.bincount(lu[lu == lv], minlength=p.count)
    d_c = np.bincount(p.labels, weights=g.degrees.astype(np.float64), minlength=p.count)
    return float((e_c / m).sum() - ((d_c / (2.0 * m)) ** 2).sum())


def _level_modularity(nbrs, loops, comm, total_weight, resolution) -> float:
    count = max(comm) + 1
    internal = [0.0] * count
    tot = [0.0] * count
    for v, row in enumerate(nbrs):
        c = comm[v]
        k_v = 2.0 * loops[v]
        internal[c] += loops[v]
        for u, w in row.items():
            k_v += w
            if comm[u] == c and u > v:
                internal[c] += w
        tot[c] += k_v
    q = 0.0
    for c in range(count):
        q += internal[c] / total_weight - resolution * (tot[c] / (2.0 * total_weight)) ** 2
    return q


def _one_level(nbrs, loops, total_weight, resolution, rng) -> tuple[bool, list[int]]:
    """Local moving phase; returns (any move happened, dense community labels)."""
    n = len(nbrs)
    k = [2.0 * loops[v] + sum(nbrs[v].values()) for v in range(n)]
    comm = list(range(n))
    comm_tot = k.copy()
    order = list(range(n))
    rng.shuffle(order)

    moved_any = False
    while True:
        moves = 0
        for v in order:
            cv = comm[v]
            kv = k[v]
            weight_to: dict[int, float] = {}
            for u, w in nbrs[v].items():
                cu = comm[u]
                weight_to[cu] = weight_to.get(cu, 0.0) + w
            comm_tot[cv] -= kv
            stay_gain = weight_to.get(cv, 0.0) - resolution * comm_tot[cv] * kv / (2.0 * total_weight)
            best_c = cv
            best_gain = stay_gain
            for c in sorted(weight_to):  # ascending id so ties pick the lowest
                if c == cv:
                    continue
                gain = weight_to[c] - resolution * comm_tot[c] * kv / (2.0 * total_weight)
                if gain > best_gain and (gain - stay_gain) / total_weight > 1e-12:
                    best_c = c
                    best_gain = gain
            comm_tot[best_c] += kv
            if best_c != cv:
                comm[v] = best_c
                moves += 1
        if moves == 0:
            break
        moved_any = True

    remap: dict[int, int] = {}
    dense = []
    for c in comm:
        if c not in remap:
            remap[c] = len(remap)
        dense.append(remap[c])
    return moved_any, dense


def _aggregate(nbrs, loops, labels, count):
    new_nbrs: list[dict[int, float]] = [{} for _ in range(count)]
    new_loops = [0.0] * count
    for v, row in enumerate(nbrs):
        cv = labels[v]
        new_loops[cv] += loops[v]
        for u, w in row.items():
            cu = labels[u]
            if cu == cv:
                if u > v:
                    new_loops[cv] += w
            else:
                new_nbrs[cv][cu] = new_nbrs[cv].get(cu, 0.0) + w
    return new_nbrs, new_loops


def louvain(g: Graph, seed: int, resolution: float = 1.0) -> Partition:
    """Two-phase Louvain modularity optimization.

    Local moving visits nodes in a seed-shuffled order and accepts a move only
    when it improves modularity by more than 1e-12, breaking ties toward the
    lowest community id; the aggregated graph then replays the same procedure
    until a phase moves nothing.  Output community ids are renumbered largest
    community first.  Deterministic for a fixed seed.
    """
    if g.node_count == 0:
        raise DataError("louvain needs a non-empty graph")
    rng = random.Random(seed)
    n = g.node_count
    us, vs = g.edge_arrays()
    nbrs: list[dict[int, float]] = [{} for _ in range(n)]
    for u, v in zip(us.tolist(), vs.tolist()):
        nbrs[u][v] = 1.0
        nbrs[v][u] = 1.0
    loops = [0.0] * n
    total_weight = float(g.edge_count)

    node_to_comm = np.arange(n, dtype=np.int64)
    q_prev = _level_modularity(nbrs, loops, list(range(len(nbrs))), total_weight, resolution)
    while True:
        moved, labels = _one_level(nbrs, loops, total_weight, resolution, rng)
        q_here = _level_modularity(nbrs, loops, labels, total_weight, resolution)
        if q_here < q_prev - 1e-12:
            raise RuntimeError(f"modularity decreased across a phase: {q_prev} -> {q_here}")
        q_prev = q_here
        if not moved:
            break
        label_arr = np.asarray(labels, dtype=np.int64)
        node_to_comm = label_arr[node_to_comm]
        nbrs, loops = _aggregate(nbrs, loops, labels, int(label_arr.max()) + 1)
    return renumber_by_size(node_to_comm)


def filter_communities(p: Partition, min_size: int = 100) -> list[int]:
    """Ids of communities holding at least ``min_size`` nodes, largest first."""
    if min_size < 1:
        raise DataError(f"min_size must be >= 1, got {min_size}")
    kept = [c for c in range(p.count) if p.sizes[c] >= min_size]
    kept.sort(key=lambda c: (-p.sizes[c], c))
    if not kept:
        largest = max(p.sizes)
        raise DataError(f"no community reaches min_size={min_size} (largest is {largest}); "
                        f"lower the threshold")
    return kept


def label_communities(g: Graph, p: Partition, bundle: CentralityBundle) -> dict[int, str]:
    """Name each community after its highest-betweenness member (ties: name ascending)."""
    labels: dict[int, str] = {}
    for c in range(p.count):
        members = p.members(c)
        best = min(members.tolist(), key=lambda v: (-bundle.betweenness[v], g.names[v]))
        labels[c] = g.names[best]
    return labels


@dataclass(frozen=True)
class CommunitySummary:
    """Per-community mean scores plus size and internal density."""

    community: int
    label: str
    mean_betweenness: float
    size: int
    mean_closeness: float
    mean_eigenvector: float
    mean_clustering: float
    internal_density: float


def community_summary(g: Graph, p: Partition, bundle: CentralityBundle,
                      communities: Sequence[int]) -> list[CommunitySummary]:
    """Mean member scores per community, sorted by mean betweenness descending.

    Internal density is intra-community edges over C(size, 2); a singleton
    community scores 0.
    """
    labels = label_communities(g, p, bundle)
    sizes = np.asarray(p.sizes, dtype=np.float64)
    mean_b = np.bincount(p.labels, weights=bundle.betweenness, minlength=p.count) / sizes
    mean_c = np.bincount(p.labels, weights=bundle.closeness, minlength=p.count) / sizes
    mean_e = np.bincount(p.labels, weights=bundle.eigenvector, minlength=p.count) / sizes
    mean_cc = np.bincount(p.labels, weights=bundle.clustering, minlength=p.count) / sizes
    us, vs = g.edge_arrays()
    lu = p.labels[us]
    lv = p.labels[vs]
    intra = np.bincount(lu[lu == lv], minlength=p.count)

    out = []
    for c in communities:
        c = int(c)
        if not 0 <= c < p.count:
            raise DataError(f"unknown community id {c}")
        s = p.sizes[c]
        d = float(intra[c]) / (s * (s - 1) / 2.0) if s > 1 else 0.0
        out.append(CommunitySummary(
            community=c, label=labels[c], mean_betweenness=float(mean_b[c]), size=s,
            mean_closeness=float(mean_c[c]), mean_eigenvector=float(mean_e[c]),
            mean_clustering=float(mean_cc[c]), internal_density=d))
    out.sort(key=lambda r: (-r.mean_betweenness, r.community))
    return out


@dataclass(frozen=True)
class InducedGraph:
    """Community-level view of the person graph.

    Nodes are retained communities (plus an optional pseudo-node ``OTHER``
    absorbing everything else); an edge weight counts original edges with one
    endpoint in each community.  ``dropped_edges`` counts original edges not
    represented, so weights + intra counts + dropped always total m.
    """

    community_ids: tuple[int, ...]
    labels: dict[int, str]
    sizes: dict[int, int]
    mean_betweenness: dict[int, float]
    intra_weights: dict[int, int]
    edges: tuple[tuple[int, int, int], ...]
    dropped_edges: int

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)


def induced_graph(g: Graph, p: Partition, retained: Sequence[int],
                  bundle: CentralityBundle | None = None,
                  include_other: bool = False) -> InducedGraph:
    """Collapse the partition into a weighted community network.

    Every original edge lands in exactly one bucket: intra weight of a
    retained community, weight of an induced edge, intra weight of ``OTHER``
    (when ``include_other``), or the dropped count.
    """
    retained = [int(c) for c in retained]
    retained_set = set(retained)
    if len(retained_set) != len(retained):
        raise DataError("retained community ids must be unique")
    for c in retained:
        if not 0 <= c < p.count:
            raise DataError(f"unknown community id {c}")

    # map each node's community onto retained ids or OTHER
    fold = np.full(p.count, OTHER, dtype=np.int64)
    for c in retained:
        fold[c] = c
    node_comm = fold[p.labels]

    us, vs = g.edge_arrays()
    cu = node_comm[us]
    cv = node_comm[vs]

    ids = list(retained)
    other_members = int((node_comm == OTHER).sum())
    has_other = include_other and other_members > 0
    if has_other:
        ids.append(OTHER)

    position = {c: i for i, c in enumerate(ids)}
    intra_weights: dict[int, int] = {c: 0 for c in ids}
    weight_at: dict[tuple[int, int], int] = {}
    dropped = 0
    for a, b in zip(cu.tolist(), cv.tolist()):
        a_in = a in position
        b_in = b in position
        if not (a_in and b_in):
            dropped += 1
            continue
        if a == b:
            intra_weights[a] += 1
            continue
        if position[a] > position[b]:
            a, b = b, a
        weight_at[(a, b)] = weight_at.get((a, b), 0) + 1

    labels = {c: "" for c in ids}
    sizes = {c: p.sizes[c] for c in retained}
    means = {c: 0.0 for c in ids}
    if bundle is not None:
        named = label_communities(g, p, bundle)
        for c in retained:
            labels[c] = named[c]
            members = p.members(c)
            means[c] = float(bundle.betweenness[members].mean())
    if has_other:
        labels[OTHER] = "other"
        sizes[OTHER] = other_members
        if bundle is not None:
            outside = np.flatnonzero(node_comm == OTHER)
            means[OTHER] = float(bundle.betweenness[outside].mean())

    edges = sorted(((a, b, w) for (a, b), w in weight_at.items()),
                   key=lambda e: (position[e[0]], position[e[1]]))
    return InducedGraph(
        community_ids=tuple(ids), labels=labels, sizes=sizes, mean_betweenness=means,
        intra_weights=intra_weights, edges=tuple(edges), dropped_edges=dropped)


def top_members(g: Graph, p: Partition, bundle: CentralityBundle,
                communities: Sequence[int], k: int = 5) -> dict[int, list[str]]:
    """Top-k members per community by betweenness, ties broken by name ascending."""
    if k <= 0:
        raise DataError(f"k must be positive, got {k}")
    out: dict[int, list[str]] = {}
    for c in communities:
        c = int(c)
        if not 0 <= c < p.count:
            raise DataError(f"unknown community id {c}")
        members = p.members(c).tolist()
        members.sort(key=lambda v: (-bundle.betweenness[v], g.names[v]))
        out[c] = [g.names[v] for v in members[:k]]
    return out
