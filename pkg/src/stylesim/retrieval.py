"""Embedding store with exact nearest-neighbor retrieval.

Image embeddings come straight from the model; a product embedding is the
arithmetic mean of the embeddings of images that advertise it (their first
sku). Retrieval is exact brute force over Euclidean distances, with ties
broken by ascending id so results never depend on insertion order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .catalog import ImageSet, ProductCatalog
from .style_model import EMBEDDING_DIM, StyleModel, _forward_batch

Scope = Literal["images", "products"]


class RankedNeighbors(NamedTuple):
    """Nearest neighbors, ascending by (distance, id); the seed is excluded.
    truncated is set when fewer than the requested k entries exist."""

    entries: tuple[tuple[str, float], ...]
    truncated: bool


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable embedding matrices for images and products.

    checkpoint_id ties the store to the model that produced it;
    skipped_products lists skus excluded for having no target images.
    """

    image_ids: tuple[str, ...]
    image_matrix: np.ndarray
    product_skus: tuple[str, ...]
    product_matrix: np.ndarray
    checkpoint_id: str
    skipped_products: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.image_matrix.shape != (len(self.image_ids), EMBEDDING_DIM):
            raise ValueError(
                f"image matrix shape {self.image_matrix.shape} does not match "
                f"{len(self.image_ids)} ids x {EMBEDDING_DIM}"
            )
        if self.product_matrix.shape != (len(self.product_skus), EMBEDDING_DIM):
            raise ValueError(
                f"product matrix shape {self.product_matrix.shape} does not match "
                f"{len(self.product_skus)} skus x {EMBEDDING_DIM}"
            )
        if len(set(self.image_ids)) != len(self.image_ids):
            raise ValueError("duplicate image ids")
        if len(set(self.product_skus)) != len(self.product_skus):
            raise ValueError("duplicate product skus")
        if not (np.all(np.isfinite(self.image_matrix)) and np.all(np.isfinite(self.product_matrix))):
            raise ValueError("embeddings contain non-finite values")
        self.image_matrix.setflags(write=False)
        self.product_matrix.setflags(write=False)
        object.__setattr__(self, "_image_index", {i: n for n, i in enumerate(self.image_ids)})
        object.__setattr__(self, "_product_index", {s: n for n, s in enumerate(self.product_skus)})

    def _scope(self, scope: Scope) -> tuple[tuple[str, ...], np.ndarray, dict[str, int]]:
        if scope == "images":
            return self.image_ids, self.image_matrix, self._image_index  # type: ignore[attr-defined]
        if scope == "products":
            return self.product_skus, self.product_matrix, self._product_index  # type: ignore[attr-defined]
        raise ValueError(f"scope must be 'images' or 'products', got {scope!r}")

    def embedding_of(self, entry_id: str, scope: Scope = "images") -> np.ndarray:
        ids, matrix, index = self._scope(scope)
        try:
            return matrix[index[entry_id]]
        except KeyError:
            raise KeyError(f"unknown {scope[:-1]} id {entry_id!r}") from None


def embed_all(
    model: StyleModel, images: ImageSet, catalog: ProductCatalog
) -> EmbeddingStore:
    """Embed every image and aggregate per product.

    A product's embedding is the mean over images whose target (first) sku is
    that product. Products with no target images are skipped and listed in
    skipped_products.
    """
    ids = images.ids
    if ids:
        features = np.stack([rec.features for rec in images])
        _, emb, _ = _forward_batch(model, features)
    else:
        emb = np.zeros((0, EMBEDDING_DIM))

    row_of = {image_id: i for i, image_id in enumerate(ids)}
    target_rows: dict[str, list[int]] = {}
    for rec in images:
        target_rows.setdefault(rec.target_sku, []).append(row_of[rec.image_id])

    skus: list[str] = []
    skipped: list[str] = []
    product_rows: list[np.ndarray] = []
    for product in catalog:
        rows = target_rows.get(product.sku)
        if not rows:
            skipped.append(product.sku)
            continue
        skus.append(product.sku)
        product_rows.append(emb[rows].mean(axis=0))

    product_matrix = np.stack(product_rows) if product_rows else np.zeros((0, EMBEDDING_DIM))
    return EmbeddingStore(
        image_ids=ids,
        image_matrix=emb.copy(),
        product_skus=tuple(skus),
        product_matrix=product_matrix,
        checkpoint_id=model.fingerprint(),
        skipped_products=tuple(skipped),
    )


def distance(e1: np.ndarray, e2: np.ndarray) -> float:
    """Euclidean distance, computed as an explicit sequential reduction so the
    result is bit-stable across numpy builds."""
    a = np.asarray(e1, dtype=np.float64)
    b = np.asarray(e2, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(np.sum(d * d)))


def _distances_to(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    d = matrix - query
    return np.sqrt(np.sum(d * d, axis=1))


def top_k(store: EmbeddingStore, seed_id: str, k: int, scope: Scope = "images") -> RankedNeighbors:
    """The k nearest entries to seed_id within one scope, seed excluded.

    Ordering is ascending (distance, id). When fewer than k other entries
    exist, all are returned with truncated=True.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ids, matrix, index = store._scope(scope)
    if seed_id not in index:
        raise KeyError(f"unknown {scope[:-1]} id {seed_id!r}")
    seed_row = index[seed_id]
    dists = _distances_to(matrix, matrix[seed_row])

    ranked = sorted(
        ((float(dists[i]), ids[i]) for i in range(len(ids)) if i != seed_row)
    )
    entries = tuple((entry_id, dist) for dist, entry_id in ranked[:k])
    return RankedNeighbors(entries=entries, truncated=len(entries) < k)


def retrieval_accuracy(
    store: EmbeddingStore,
    test_ids: tuple[str, ...] | list[str],
    votes,
    k: int,
) -> float:
    """Fraction of retrieved images sharing the seed's majority style.

    Counts every (seed, retrieved) event across all test seeds and their
    top-k image neighbors; a retrieved image with no votes counts as a miss.
    """
    from .catalog import NoVotesError, majority_style

    ids = tuple(test_ids)
    if not ids:
        raise ValueError("test set is empty")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    hits = 0
    events = 0
    for seed_id in ids:
        seed_style = majority_style(seed_id, votes).style
        for neighbor_id, _ in top_k(store, seed_id, k, scope="images").entries:
            events += 1
            try:
                if majority_style(neighbor_id, votes).style == seed_style:
                    hits += 1
            except NoVotesError:
                pass
    if events == 0:
        raise ValueError("no retrieval events: test images have no neighbors")
    return hits / events


EMBEDDINGS_FORMAT = "style-embeddings"
EMBEDDINGS_VERSION = 1


def write_embeddings(store: EmbeddingStore, path: str) -> None:
    """Line-delimited JSON: one meta line, then image lines, then product lines."""
    with open(path, "w", encoding="utf-8") as fh:
        meta = {
            "format": EMBEDDINGS_FORMAT,
            "version": EMBEDDINGS_VERSION,
            "checkpoint_id": store.checkpoint_id,
            "dim": EMBEDDING_DIM,
            "skipped_products": list(store.skipped_products),
        }
        fh.write(json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n")
        for image_id, row in zip(store.image_ids, store.image_matrix):
            fh.write(
                json.dumps(
                    {"image_id": image_id, "embedding": row.tolist()},
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )
        for sku, row in zip(store.product_skus, store.product_matrix):
            fh.write(
                json.dumps(
                    {"sku": sku, "embedding": row.tolist()},
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_embeddings(path: str) -> EmbeddingStore:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty embeddings file")
    meta = json.loads(lines[0])
    if meta.get("format") != EMBEDDINGS_FORMAT:
        raise ValueError(f"{path}: not an embeddings file")
    if meta.get("version") != EMBEDDINGS_VERSION:
        raise ValueError(f"{path}: unsupported embeddings version {meta.get('version')!r}")
    image_ids: list[str] = []
    image_rows: list[list[float]] = []
    skus: list[str] = []
    product_rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        obj = json.loads(line)
        if "image_id" in obj:
            image_ids.append(obj["image_id"])
            image_rows.append(obj["embedding"])
        elif "sku" in obj:
            skus.append(obj["sku"])
            product_rows.append(obj["embedding"])
        else:
            raise ValueError(f"{path}:{lineno}: record has neither image_id nor sku")
    return EmbeddingStore(
        image_ids=tuple(image_ids),
        image_matrix=np.asarray(image_rows, dtype=np.float64).reshape(len(image_ids), EMBEDDING_DIM),
        product_skus=tuple(skus),
        product_matrix=np.asarray(product_rows, dtype=np.float64).reshape(len(skus), EMBEDDING_DIM),
        checkpoint_id=meta.get("checkpoint_id", ""),
        skipped_products=tuple(meta.get("skipped_products", [])),
    )
