"""Designer-in-the-loop scoring: evaluate a candidate design's feature vector
against the trained model and the filtered similarity graph.

The engine bundles the artifacts a scoring service needs (catalog, model,
embedding store, graph) plus the windowing config, loaded once and treated as
immutable; a reload builds a whole new engine.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .catalog import CatalogError, ProductCatalog
from .graph_io import guess_format, read_graph, similarity_from_loaded
from .retrieval import EmbeddingStore, distance, read_embeddings
from .simgraph import (
    DEFAULT_W_MAX,
    DEFAULT_W_MIN,
    DUPLICATE_DISTANCE,
    GroupGraph,
    SimilarityGraph,
    group_graph,
)
from .style_model import StyleModel, forward, load_checkpoint, style_probabilities

NO_CONNECTION_FLAG = "no in-window connections"


class Neighbor(NamedTuple):
    sku: str
    group: str
    distance: float


@dataclass(frozen=True)
class DesignReport:
    """Similarity feedback for one candidate design.

    group_connections holds the cumulative weight of would-be in-window edges
    per group; similarity_score is their total, so broad compatibility scores
    higher than a single tight match.
    """

    style_probs: tuple[float, float, float, float]
    top_neighbors: tuple[Neighbor, ...]
    group_connections: dict[str, float]
    similarity_score: float
    flags: tuple[str, ...]


class GroupGapStats(NamedTuple):
    group: str
    node_count: int
    isolated_count: int
    isolated_skus: tuple[str, ...]
    degree_min: float
    degree_median: float
    degree_max: float


@dataclass(frozen=True)
class GapReport:
    """Where the graph is thin: per-group connectivity summaries and group
    pairs with no cross connections at all."""

    groups: tuple[GroupGapStats, ...]
    zero_weight_pairs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class EngineConfig:
    products_path: str
    checkpoint_path: str
    embeddings_path: str
    graph_path: str
    graph_format: str | None = None
    w_min: float = DEFAULT_W_MIN
    w_max: float = DEFAULT_W_MAX
    default_k: int = 5
    port: int = 8000
    admin_token: str | None = None

    @classmethod
    def from_file(cls, path: str, **overrides) -> "EngineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        merged = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
        return cls(**merged)


@dataclass(frozen=True)
class EngineState:
    config: EngineConfig
    catalog: ProductCatalog
    model: StyleModel
    store: EmbeddingStore
    graph: SimilarityGraph
    groups: GroupGraph = field(repr=False)
    gaps: GapReport = field(repr=False)
    checkpoint_sha256: str = ""

    @property
    def input_dim(self) -> int:
        return self.model.input_dim


def _file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_products_only(path: str) -> ProductCatalog:
    from .catalog import _Issues, _read_products

    issues = _Issues()
    products = _read_products(path, issues)
    if issues.errors:
        raise CatalogError("; ".join(msg for _, msg in issues.errors))
    return ProductCatalog(products)


def load_engine(config: EngineConfig) -> EngineState:
    """Load all artifacts; fails fast with the missing path in the message."""
    for label, path in (
        ("products", config.products_path),
        ("checkpoint", config.checkpoint_path),
        ("embeddings", config.embeddings_path),
        ("graph", config.graph_path),
    ):
        if not os.path.exists(path):
            raise FileNotFoundError(f"{label} artifact not found: {path}")
    if not (config.w_min < config.w_max):
        raise ValueError(f"require w_min < w_max, got [{config.w_min}, {config.w_max}]")
    if config.default_k < 1:
        raise ValueError(f"default_k must be >= 1, got {config.default_k}")

    catalog = _read_products_only(config.products_path)
    model = load_checkpoint(config.checkpoint_path)
    store = read_embeddings(config.embeddings_path)
    fmt = config.graph_format or guess_format(config.graph_path)
    graph = similarity_from_loaded(read_graph(config.graph_path, fmt))

    unknown = [sku for sku in graph.nodes if sku not in catalog]
    if unknown:
        raise CatalogError(
            "graph references products missing from the catalog: " + ", ".join(sorted(unknown))
        )
    missing = [sku for sku in graph.nodes if sku not in set(store.product_skus)]
    if missing:
        raise CatalogError(
            "graph references products missing from the embedding store: "
            + ", ".join(sorted(missing))
        )

    return EngineState(
        config=config,
        catalog=catalog,
        model=model,
        store=store,
        graph=graph,
        groups=group_graph(graph),
        gaps=find_gaps(graph),
        checkpoint_sha256=_file_sha256(config.checkpoint_path),
    )


def score_design(engine: EngineState, features, k: int | None = None) -> DesignReport:
    """Score a candidate design against every product in the graph.

    The candidate is embedded, then treated as if inserted into the similarity
    graph: a would-be edge (weight = 1/distance, same window as the graph) is
    computed against every graph product and aggregated per group. The k
    nearest graph products are reported for display; k only affects that list.
    """
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 1 or f.shape[0] != engine.input_dim:
        raise ValueError(
            f"features must be a vector of length {engine.input_dim}, got shape {f.shape}"
        )
    if not np.all(np.isfinite(f)):
        raise ValueError("features contain non-finite values")
    if k is None:
        k = engine.config.default_k
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    result = forward(engine.model, f)
    probs = style_probabilities(result.scores)

    ranked: list[tuple[float, str]] = []
    group_connections: dict[str, float] = {}
    flags: list[str] = []
    for sku in sorted(engine.graph.nodes):
        d = distance(result.embedding, engine.store.embedding_of(sku, scope="products"))
        ranked.append((d, sku))
        if d < DUPLICATE_DISTANCE:
            flags.append(f"duplicate of {sku}")
            continue
        w = 1.0 / d
        if engine.config.w_min <= w <= engine.config.w_max:
            group = engine.graph.nodes[sku]
            group_connections[group] = group_connections.get(group, 0.0) + w

    ranked.sort()
    top = tuple(
        Neighbor(sku=sku, group=engine.graph.nodes[sku], distance=d) for d, sku in ranked[:k]
    )
    group_connections = dict(sorted(group_connections.items()))
    score = sum(group_connections.values())
    if not group_connections:
        flags.append(NO_CONNECTION_FLAG)
    return DesignReport(
        style_probs=tuple(float(p) for p in probs),  # type: ignore[arg-type]
        top_neighbors=top,
        group_connections=group_connections,
        similarity_score=score,
        flags=tuple(flags),
    )


def find_gaps(graph: SimilarityGraph) -> GapReport:
    """Summarize under-connected regions of the graph."""
    degrees = graph.weighted_degrees()
    members: dict[str, list[str]] = {}
    for node, group in graph.nodes.items():
        members.setdefault(group, []).append(node)

    stats: list[GroupGapStats] = []
    for group in sorted(members):
        skus = sorted(members[group])
        isolated = tuple(sku for sku in skus if degrees[sku] == 0.0)
        dvals = np.asarray([degrees[sku] for sku in skus])
        stats.append(
            GroupGapStats(
                group=group,
                node_count=len(skus),
                isolated_count=len(isolated),
                isolated_skus=isolated,
                degree_min=float(dvals.min()),
                degree_median=float(np.median(dvals)),
                degree_max=float(dvals.max()),
            )
        )

    gg = group_graph(graph)
    groups = sorted(members)
    zero_pairs = tuple(
        (groups[i], groups[j])
        for i in range(len(groups) - 1)
        for j in range(i + 1, len(groups))
        if (groups[i], groups[j]) not in gg.edges
    )
    return GapReport(groups=tuple(stats), zero_weight_pairs=zero_pairs)


def reload_engine(engine: EngineState) -> EngineState:
    """Fresh engine from the same config; artifacts are re-read from disk."""
    return load_engine(replace(engine.config))
