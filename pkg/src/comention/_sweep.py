"""Level-synchronous BFS engines shared by the distance and betweenness code.

Each BFS level is processed with whole-array numpy operations instead of a
per-edge Python loop.  Work is split into fixed-size source chunks whose
partial results are reduced in ascending chunk order, so numbers come out
bit-identical no matter how many worker threads run the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

CHUNK = 256


@dataclass(frozen=True)
class SweepResult:
    """Per-source BFS aggregates.

    ``eccentricity``, ``distance_sum`` and ``reachable`` align with the
    ``sources`` array handed to :func:`sweep`.  ``betweenness_raw`` is per
    node and holds directed pair-dependency sums (both orientations of every
    pair), or ``None`` when dependency accumulation was not requested.
    """

    eccentricity: np.ndarray
    distance_sum: np.ndarray
    reachable: np.ndarray
    betweenness_raw: np.ndarray | None


def gather_rows(indptr: np.ndarray, adjacency: np.ndarray, rows: np.ndarray):
    """Concatenate the adjacency rows of ``rows``.

    Returns ``(neighbors, owners)`` where ``owners[i]`` is the row that
    contributed ``neighbors[i]``.
    """
    counts = indptr[rows + 1] - indptr[rows]
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=adjacency.dtype)
        return empty, empty
    offsets = np.repeat(indptr[rows] - np.concatenate(([0], np.cumsum(counts[:-1]))), counts)
    neighbors = adjacency[offsets + np.arange(total)]
    owners = np.repeat(rows, counts)
    return neighbors, owners


def bfs_distances(indptr, adjacency, node_count: int, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes get -1."""
    dist = np.full(node_count, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        neighbors, _ = gather_rows(indptr, adjacency, frontier)
        fresh = neighbors[dist[neighbors] == -1]
        if fresh.size == 0:
            break
        frontier = np.unique(fresh)
        level += 1
        dist[frontier] = level
    return dist


def _chunk_sweep(indptr, adjacency, node_count, sources, want_betweenness):
    k = sources.size
    ecc = np.zeros(k, dtype=np.int64)
    dist_sum = np.zeros(k, dtype=np.int64)
    reach = np.zeros(k, dtype=np.int64)
    raw = np.zeros(node_count, dtype=np.float64) if want_betweenness else None
    sigma = np.zeros(node_count, dtype=np.float64)
    delta = np.zeros(node_count, dtype=np.float64)

    for i in range(k):
        s = int(sources[i])
        dist = np.full(node_count, -1, dtype=np.int64)
        dist[s] = 0
        frontier = np.array([s], dtype=np.int64)
        level = 0
        if not want_betweenness:
            total = 0
            count = 1
            while frontier.size:
                neighbors, _ = gather_rows(indptr, adjacency, frontier)
                fresh = neighbors[dist[neighbors] == -1]
                if fresh.size == 0:
                    break
                frontier = np.unique(fresh)
                level += 1
                dist[frontier] = level
                total += level * frontier.size
                count += frontier.size
            ecc[i] = level
            dist_sum[i] = total
            reach[i] = count
            continue

        sigma[:] = 0.0
        sigma[s] = 1.0
        level_edges: list[tuple[np.ndarray, np.ndarray]] = []
        total = 0
        count = 1
        while frontier.size:
            neighbors, owners = gather_rows(indptr, adjacency, frontier)
            fresh_mask = dist[neighbors] == -1
            if fresh_mask.any():
                dist[neighbors[fresh_mask]] = level + 1
            onward = dist[neighbors] == level + 1
            e_src = owners[onward]
            e_dst = neighbors[onward]
            if e_dst.size:
                sigma += np.bincount(e_dst, weights=sigma[e_src], minlength=node_count)
                level_edges.append((e_src, e_dst))
            frontier = np.unique(neighbors[fresh_mask])
            if frontier.size == 0:
                break
            level += 1
            total += level * frontier.size
            count += frontier.size
        ecc[i] = level
        dist_sum[i] = total
        reach[i] = count

        delta[:] = 0.0
        for e_src, e_dst in reversed(level_edges):
            contrib = sigma[e_src] / sigma[e_dst] * (1.0 + delta[e_dst])
            delta += np.bincount(e_src, weights=contrib, minlength=node_count)
        delta[s] = 0.0
        raw += delta
    return ecc, dist_sum, reach, raw


def sweep(indptr, adjacency, node_count: int, sources: np.ndarray, *,
          betweenness: bool = False, threads: int | None = None) -> SweepResult:
    """Run one BFS per source and aggregate the results.

    ``threads`` only changes wall time, never the numbers: chunk boundaries
    are fixed at ``CHUNK`` sources and partial sums are combined in ascending
    chunk order.
    """
    sources = np.asarray(sources, dtype=np.int64)
    if sources.size == 0:
        zero = np.zeros(0, dtype=np.int64)
        raw = np.zeros(node_count, dtype=np.float64) if betweenness else None
        return SweepResult(zero, zero.copy(), zero.copy(), raw)

    chunks = [sources[i:i + CHUNK] for i in range(0, sources.size, CHUNK)]
    run = lambda part: _chunk_sweep(indptr, adjacency, node_count, part, betweenness)
    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]

    ecc = np.concatenate([p[0] for p in parts])
    dist_sum = np.concatenate([p[1] for p in parts])
    reach = np.concatenate([p[2] for p in parts])
    raw = None
    if betweenness:
        raw = np.zeros(node_count, dtype=np.float64)
        for p in parts:
            raw += p[3]
    return SweepResult(ecc, dist_sum, reach, raw)
