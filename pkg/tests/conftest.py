"""Shared fixtures: a small trained pipeline reused across test modules."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import pytest

import stylesim as ss


@dataclass(frozen=True)
class Pipeline:
    """Everything one training run produces, plus the paths it was written to."""

    dataset: ss.SynthDataset
    split: ss.DatasetSplit
    model: ss.StyleModel
    history: ss.TrainHistory
    store: ss.EmbeddingStore
    graph: ss.SimilarityGraph
    paths: dict[str, str]


def build_pipeline(root: str, seed: int = 11, min_group_size: int = 3) -> Pipeline:
    config = ss.SynthConfig(n_products=60, n_images=180, seed=seed)
    dataset = ss.generate_dataset(config)
    paths = ss.write_dataset(dataset, root)

    split = ss.split_dataset(dataset.images.ids, seed=seed)
    train_config = ss.TrainConfig(
        learning_rate=0.05, epochs=8, comparisons_per_epoch=128, seed=seed
    )
    model, history = ss.train(
        ss.init_model(config.dim, hidden=8, seed=seed),
        dataset.images,
        dataset.votes,
        split,
        train_config,
    )
    paths["checkpoint"] = os.path.join(root, "checkpoint.json")
    ss.save_checkpoint(model, paths["checkpoint"])

    store = ss.embed_all(model, dataset.images, dataset.catalog)
    paths["embeddings"] = os.path.join(root, "embeddings.jsonl")
    ss.write_embeddings(store, paths["embeddings"])

    graph = ss.build_graph(store, dataset.catalog)
    graph = ss.remove_overlap_edges(graph, dataset.images)
    graph = ss.filter_edges(graph)
    graph = ss.filter_small_groups(graph, min_group_size)
    paths["graph"] = os.path.join(root, "graph.graphml")
    ss.export_graph(graph, "graphml", paths["graph"])

    return Pipeline(
        dataset=dataset,
        split=split,
        model=model,
        history=history,
        store=store,
        graph=graph,
        paths=paths,
    )


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory) -> Pipeline:
    return build_pipeline(str(tmp_path_factory.mktemp("pipeline")))


@pytest.fixture(scope="session")
def engine(pipeline: Pipeline) -> ss.EngineState:
    return ss.load_engine(
        ss.EngineConfig(
            products_path=pipeline.paths["products"],
            checkpoint_path=pipeline.paths["checkpoint"],
            embeddings_path=pipeline.paths["embeddings"],
            graph_path=pipeline.paths["graph"],
            default_k=5,
            admin_token="test-token",
        )
    )


def make_votes(counts_by_image: dict[str, tuple[int, int, int, int]]) -> ss.VoteTable:
    """VoteTable from per-image style counts; expert ids are generated."""
    votes = []
    for image_id, counts in counts_by_image.items():
        expert = 0
        for style, count in enumerate(counts):
            for _ in range(count):
                votes.append(
                    ss.Vote(image_id=image_id, expert_id=f"e{expert}", style=ss.Style(style))
                )
                expert += 1
    return ss.VoteTable(votes, image_ids=counts_by_image.keys())


def make_store(
    ids: list[str], matrix: np.ndarray, skus: list[str] | None = None, product_matrix=None
) -> ss.EmbeddingStore:
    """Embedding store from raw arrays (products default to empty)."""
    if skus is None:
        skus = []
        product_matrix = np.zeros((0, ss.EMBEDDING_DIM))
    return ss.EmbeddingStore(
        image_ids=tuple(ids),
        image_matrix=np.asarray(matrix, dtype=np.float64),
        product_skus=tuple(skus),
        product_matrix=np.asarray(product_matrix, dtype=np.float64),
        checkpoint_id="test",
    )


def pad16(*rows: list[float]) -> np.ndarray:
    """Pad short vectors to embedding width for store construction."""
    out = np.zeros((len(rows), ss.EMBEDDING_DIM))
    for i, row in enumerate(rows):
        out[i, : len(row)] = row
    return out
