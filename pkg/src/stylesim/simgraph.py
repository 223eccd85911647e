"""Weighted undirected product similarity graph.

Nodes are products (or images, in image scope); an edge weight is the
reciprocal Euclidean distance between embeddings. The pipeline mirrors how the
graph is prepared for visualization: build complete, drop staged-together
pairs, keep a weight window, drop under-represented groups, then aggregate to
group level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from .catalog import ImageSet, ProductCatalog
from .retrieval import EmbeddingStore, top_k

log = logging.getLogger(__name__)

# pairs closer than this are treated as duplicate listings, not edges
DUPLICATE_DISTANCE = 1e-9

DEFAULT_W_MIN = 1.0
DEFAULT_W_MAX = 10.0
DEFAULT_MIN_GROUP_SIZE = 10

GraphScope = Literal["products", "images"]


def edge_key(a: str, b: str) -> tuple[str, str]:
    """Canonical unordered pair."""
    if a == b:
        raise ValueError(f"self-loop {a!r}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class SimilarityGraph:
    """Immutable snapshot of the similarity graph.

    nodes maps id -> group; edges maps canonical pairs -> weight.
    provenance records how the graph was produced and is ignored by equality,
    so differently-ordered but equivalent pipelines compare equal.
    """

    scope: str
    nodes: dict[str, str]
    edges: dict[tuple[str, str], float]
    duplicate_pairs: tuple[tuple[str, str], ...] = ()
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for (a, b), w in self.edges.items():
            if a >= b:
                raise ValueError(f"edge key ({a!r}, {b!r}) is not in canonical order")
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge ({a!r}, {b!r}) references a missing node")
            if not (np.isfinite(w) and w > 0):
                raise ValueError(f"edge ({a!r}, {b!r}) has invalid weight {w!r}")

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def weighted_degrees(self) -> dict[str, float]:
        """Sum of incident edge weights per node; isolated nodes map to 0.0."""
        degrees = {node: 0.0 for node in self.nodes}
        for (a, b), w in self.edges.items():
            degrees[a] += w
            degrees[b] += w
        return degrees

    def group_sizes(self) -> dict[str, int]:
        sizes: dict[str, int] = {}
        for group in self.nodes.values():
            sizes[group] = sizes.get(group, 0) + 1
        return sizes


def _scope_entries(
    store: EmbeddingStore,
    catalog: ProductCatalog,
    scope: GraphScope,
    images: ImageSet | None,
) -> tuple[tuple[str, ...], np.ndarray, dict[str, str]]:
    if scope == "products":
        groups = {sku: catalog.get(sku).group for sku in store.product_skus}
        return store.product_skus, store.product_matrix, groups
    if scope == "images":
        if images is None:
            raise ValueError("image-scope graphs need the image set for group lookup")
        groups = {
            image_id: catalog.get(images.get(image_id).target_sku).group
            for image_id in store.image_ids
        }
        return store.image_ids, store.image_matrix, groups
    raise ValueError(f"scope must be 'products' or 'images', got {scope!r}")


def build_graph(
    store: EmbeddingStore,
    catalog: ProductCatalog,
    scope: GraphScope = "products",
    images: ImageSet | None = None,
) -> SimilarityGraph:
    """Complete graph over the store's entries with weight = 1/distance.

    Pairs closer than DUPLICATE_DISTANCE get no edge; they are recorded in
    duplicate_pairs and logged, since a reciprocal weight there would explode.
    """
    ids, matrix, groups = _scope_entries(store, catalog, scope, images)
    if len(ids) < 2:
        raise ValueError(f"need at least 2 {scope} to build a graph, got {len(ids)}")

    edges: dict[tuple[str, str], float] = {}
    duplicates: list[tuple[str, str]] = []
    for i in range(len(ids) - 1):
        delta = matrix[i + 1 :] - matrix[i]
        dists = np.sqrt(np.sum(delta * delta, axis=1))
        for off, dist in enumerate(dists):
            j = i + 1 + off
            key = edge_key(ids[i], ids[j])
            if dist < DUPLICATE_DISTANCE:
                duplicates.append(key)
                log.info("skipping duplicate pair %s / %s (distance %.3e)", key[0], key[1], dist)
                continue
            edges[key] = 1.0 / float(dist)

    return SimilarityGraph(
        scope=scope,
        nodes={entry_id: groups[entry_id] for entry_id in ids},
        edges=edges,
        duplicate_pairs=tuple(duplicates),
        provenance={"built_from": store.checkpoint_id, "scope": scope},
    )


def _cooccurring_pairs(graph: SimilarityGraph, images: ImageSet) -> set[tuple[str, str]]:
    pairs: set[tuple[str, str]] = set()
    if graph.scope == "products":
        for rec in images:
            skus = sorted(set(rec.skus))
            for i in range(len(skus) - 1):
                for j in range(i + 1, len(skus)):
                    pairs.add((skus[i], skus[j]))
    else:
        by_sku: dict[str, list[str]] = {}
        for rec in images:
            for sku in set(rec.skus):
                by_sku.setdefault(sku, []).append(rec.image_id)
        for shared in by_sku.values():
            ids = sorted(set(shared))
            for i in range(len(ids) - 1):
                for j in range(i + 1, len(ids)):
                    pairs.add((ids[i], ids[j]))
    return pairs


def remove_overlap_edges(graph: SimilarityGraph, images: ImageSet) -> SimilarityGraph:
    """Drop edges between entries staged together.

    Product scope: two products co-occur when one image lists both skus.
    Image scope: two images co-occur when their sku lists intersect.
    Similarity between staged-together items reflects the shared scene, not
    style, so those edges are biased upward.
    """
    pairs = _cooccurring_pairs(graph, images)
    kept = {key: w for key, w in graph.edges.items() if key not in pairs}
    removed = len(graph.edges) - len(kept)
    return SimilarityGraph(
        scope=graph.scope,
        nodes=dict(graph.nodes),
        edges=kept,
        duplicate_pairs=graph.duplicate_pairs,
        provenance={**graph.provenance, "overlap_edges_removed": removed},
    )


def filter_edges(
    graph: SimilarityGraph,
    w_min: float = DEFAULT_W_MIN,
    w_max: float = DEFAULT_W_MAX,
) -> SimilarityGraph:
    """Keep edges with weight in [w_min, w_max], bounds inclusive.

    Nodes are never dropped here; isolated nodes stay until group filtering.
    """
    if not (w_min < w_max):
        raise ValueError(f"require w_min < w_max, got [{w_min}, {w_max}]")
    kept = {key: w for key, w in graph.edges.items() if w_min <= w <= w_max}
    return SimilarityGraph(
        scope=graph.scope,
        nodes=dict(graph.nodes),
        edges=kept,
        duplicate_pairs=graph.duplicate_pairs,
        provenance={**graph.provenance, "w_min": w_min, "w_max": w_max},
    )


def filter_small_groups(graph: SimilarityGraph, min_group_size: int = DEFAULT_MIN_GROUP_SIZE) -> SimilarityGraph:
    """Remove nodes whose group has fewer than min_group_size members in the
    current graph, along with their edges. Applied once, not iterated, so a
    group that shrinks below the threshold due to another group's removal
    stays."""
    if min_group_size < 0:
        raise ValueError(f"min_group_size must be >= 0, got {min_group_size}")
    sizes = graph.group_sizes()
    nodes = {n: g for n, g in graph.nodes.items() if sizes[g] >= min_group_size}
    edges = {key: w for key, w in graph.edges.items() if key[0] in nodes and key[1] in nodes}
    return SimilarityGraph(
        scope=graph.scope,
        nodes=nodes,
        edges=edges,
        duplicate_pairs=graph.duplicate_pairs,
        provenance={
            **graph.provenance,
            "min_group_size": min_group_size,
            "nodes_removed": graph.node_count - len(nodes),
        },
    )


class GroupStats(NamedTuple):
    group: str
    product_count: int
    degree_sum: float


@dataclass(frozen=True)
class GroupGraph:
    """Group-level aggregation: one node per group, edge weight = cumulative
    weight of product edges crossing the two groups; intra-group weight is
    kept per group in self_weights."""

    stats: tuple[GroupStats, ...]
    edges: dict[tuple[str, str], float]
    self_weights: dict[str, float]

    @property
    def groups(self) -> tuple[str, ...]:
        return tuple(s.group for s in self.stats)

    def stats_for(self, group: str) -> GroupStats:
        for s in self.stats:
            if s.group == group:
                return s
        raise KeyError(f"unknown group {group!r}")


def group_graph(graph: SimilarityGraph) -> GroupGraph:
    """Aggregate the product graph to group level."""
    degrees = graph.weighted_degrees()
    counts = graph.group_sizes()
    degree_sums = {group: 0.0 for group in counts}
    for node, group in graph.nodes.items():
        degree_sums[group] += degrees[node]

    edges: dict[tuple[str, str], float] = {}
    self_weights = {group: 0.0 for group in counts}
    for (a, b), w in graph.edges.items():
        ga, gb = graph.nodes[a], graph.nodes[b]
        if ga == gb:
            self_weights[ga] += w
            continue
        key = edge_key(ga, gb)
        edges[key] = edges.get(key, 0.0) + w

    stats = tuple(
        GroupStats(group=g, product_count=counts[g], degree_sum=degree_sums[g])
        for g in sorted(counts)
    )
    return GroupGraph(stats=stats, edges=edges, self_weights=self_weights)


class MostConnected(NamedTuple):
    sku: str
    weighted_degree: float
    zero_degree: bool


def most_connected(graph: SimilarityGraph, group: str) -> MostConnected:
    """Member of the group with the highest weighted degree; ties break to the
    ascending id. zero_degree flags a group whose members are all isolated."""
    members = sorted(n for n, g in graph.nodes.items() if g == group)
    if not members:
        raise KeyError(f"unknown group {group!r}")
    degrees = graph.weighted_degrees()
    best = min(members, key=lambda n: (-degrees[n], n))
    return MostConnected(sku=best, weighted_degree=degrees[best], zero_degree=degrees[best] == 0.0)


@dataclass(frozen=True)
class RecommendationFrequency:
    """How often each entry appears in other entries' top-k lists.

    Retrieval here is unfiltered: every embedding participates regardless of
    graph windowing, so even low-similarity recommendations count.
    """

    counts: dict[str, int]
    k: int
    seed_count: int

    def top_n(self, n: int) -> list[tuple[str, int]]:
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        ranked = sorted(self.counts.items(), key=lambda item: (-item[1], item[0]))
        return ranked[:n]


def recommendation_frequency(
    store: EmbeddingStore,
    ids: tuple[str, ...] | list[str],
    k: int,
    scope: str = "images",
) -> RecommendationFrequency:
    """Count top-k appearances over all seeds in ids. Entries never retrieved
    are present with count 0."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    universe = store.image_ids if scope == "images" else store.product_skus
    counts = {entry_id: 0 for entry_id in universe}
    for seed_id in ids:
        for neighbor_id, _ in top_k(store, seed_id, k, scope=scope).entries:
            counts[neighbor_id] += 1
    return RecommendationFrequency(counts=counts, k=k, seed_count=len(tuple(ids)))


def export_graph(graph, fmt: str, path: str) -> None:
    """Write the graph in graphml, gexf, or edge-csv form. See graph_io."""
    from .graph_io import export_graph as _export

    _export(graph, fmt, path)
