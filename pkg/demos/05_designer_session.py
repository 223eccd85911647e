#!/usr/bin/env python3
"""A designer-in-the-loop scoring session.

Builds the full artifact set (dataset, checkpoint, embeddings, graph), loads
the scoring engine, and walks a candidate design through three iterations:
score, read the feedback, nudge the features, rescore. The numbers shown here
are exactly what the HTTP service returns for the same inputs.

Usage: python3 demos/05_designer_session.py [work_dir]
"""

import os
import sys

import numpy as np

import stylesim as ss


def describe(report: ss.DesignReport, label: str) -> None:
    print(f"--- {label} ---")
    best = max(range(4), key=lambda s: report.style_probs[s])
    probs = "  ".join(
        f"{style.label}={report.style_probs[style]:.2f}" for style in ss.Style
    )
    print(f"style probabilities: {probs}  (reads as {ss.Style(best).label})")
    print("nearest products:")
    for n in report.top_neighbors:
        print(f"  {n.sku}  d={n.distance:6.3f}  {n.group}")
    if report.group_connections:
        connections = ", ".join(f"{g}: {w:.2f}" for g, w in report.group_connections.items())
        print(f"in-window connections by group: {connections}")
    print(f"similarity score: {report.similarity_score:.2f}")
    for flag in report.flags:
        print(f"flag: {flag}")
    print()


def main() -> None:
    work_dir = sys.argv[1] if len(sys.argv) > 1 else "demo-output/designer"
    os.makedirs(work_dir, exist_ok=True)

    # full pipeline: dataset -> checkpoint -> embeddings -> filtered graph
    dataset = ss.generate_dataset(ss.SynthConfig(n_products=100, n_images=300, seed=5))
    paths = ss.write_dataset(dataset, work_dir)
    split = ss.split_dataset(dataset.images.ids, seed=5)
    config = ss.TrainConfig(learning_rate=0.05, epochs=30, comparisons_per_epoch=256, seed=5)
    model, _ = ss.train(ss.init_model(16, hidden=16, seed=5), dataset.images, dataset.votes, split, config)

    checkpoint_path = os.path.join(work_dir, "checkpoint.json")
    ss.save_checkpoint(model, checkpoint_path)
    store = ss.embed_all(model, dataset.images, dataset.catalog)
    embeddings_path = os.path.join(work_dir, "embeddings.jsonl")
    ss.write_embeddings(store, embeddings_path)

    graph = ss.build_graph(store, dataset.catalog)
    graph = ss.remove_overlap_edges(graph, dataset.images)
    graph = ss.filter_edges(graph)
    graph = ss.filter_small_groups(graph, min_group_size=5)
    graph_path = os.path.join(work_dir, "graph.graphml")
    ss.export_graph(graph, "graphml", graph_path)

    engine = ss.load_engine(
        ss.EngineConfig(
            products_path=paths["products"],
            checkpoint_path=checkpoint_path,
            embeddings_path=embeddings_path,
            graph_path=graph_path,
            default_k=4,
        )
    )
    print(
        f"engine loaded: {engine.graph.node_count} products in the graph, "
        f"window [{engine.config.w_min}, {engine.config.w_max}]\n"
    )

    # iteration 1: start from a real image's features, roughed up
    rng = np.random.default_rng(5)
    seed_image = dataset.images.get(split.test[0])
    candidate = seed_image.features + rng.normal(size=16) * 0.8
    report = ss.score_design(engine, candidate)
    describe(report, "iteration 1: rough draft")
    history = [report.similarity_score]

    # iteration 2: features live in input space, so pull the candidate toward
    # a source image of the nearest product rather than its embedding
    target_image = next(
        rec for rec in dataset.images if rec.target_sku == report.top_neighbors[0].sku
    )
    candidate = 0.5 * candidate + 0.5 * target_image.features
    report = ss.score_design(engine, candidate)
    describe(report, "iteration 2: pulled toward the closest product")
    history.append(report.similarity_score)

    # iteration 3: land on the image itself
    report = ss.score_design(engine, target_image.features)
    describe(report, "iteration 3: identical to an existing image")
    history.append(report.similarity_score)

    # an outlier lands too far from every product to connect, and gets flagged
    outlier = np.full(16, 50.0)
    report = ss.score_design(engine, outlier)
    describe(report, "aside: a candidate unlike anything in the catalog")

    print("session history (similarity score per iteration):")
    for i, score in enumerate(history, start=1):
        print(f"  iteration {i}: {score:8.2f}")


if __name__ == "__main__":
    main()
