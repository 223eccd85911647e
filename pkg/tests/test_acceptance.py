"""Acceptance gate: one test per shipping criterion, each printing a single
PASS/FAIL line with its measured numbers.

Every check here is an end-to-end statement about the public API; the
per-module suites cover the fine-grained cases.
"""

from __future__ import annotations

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

import stylesim as ss
from stylesim.catalog import STYLE_ATTRIBUTES
from stylesim.graph_io import FORMATS, export_graph_string, read_graph
from stylesim.service import create_app
from stylesim.simgraph import most_connected

from conftest import build_pipeline, make_store, make_votes
from test_retrieval import brute_force_top_k
from test_style_model import finite_difference_gradient, relative_error


def emit(capsys, name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}: {name}: {detail}"
    with capsys.disabled():
        print(line)
    assert ok, line


def test_gradient_correctness(capsys):
    """Analytic gradients vs central finite differences on random instances."""
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    instances = 120
    max_rel = 0.0
    for trial in range(instances):
        dim = int(rng.integers(2, 7))
        hidden = int(rng.integers(2, 5))
        model = ss.init_model(dim, hidden, seed=int(rng.integers(1_000_000)))
        fa = rng.normal(size=dim)
        fb = rng.normal(size=dim)
        style = ss.Style(int(rng.integers(4)))
        label = 1 if rng.random() < 0.5 else -1

        analytic = ss.loss_gradient(model, fa, fb, style, label).as_dict()
        numeric = finite_difference_gradient(model, fa, fb, style, label)
        for name, grad in analytic.items():
            a = grad.reshape(-1)
            n = numeric[name].reshape(-1)
            for idx in range(a.size):
                max_rel = max(max_rel, relative_error(a[idx], n[idx]))
    elapsed = time.perf_counter() - started
    ok = max_rel < 1e-4 and elapsed < 10.0
    emit(
        capsys,
        "gradient correctness",
        ok,
        f"instances={instances} max_rel_err={max_rel:.3e} (<1e-4) elapsed={elapsed:.2f}s (<10s)",
    )


def test_comparison_label_suite(capsys):
    """Antisymmetry, discard symmetry, threshold monotonicity, split confinement."""
    started = time.perf_counter()
    rng = np.random.default_rng(202)
    cases = 1000
    checked = 0
    for _ in range(cases):
        counts_a = tuple(int(c) for c in rng.integers(0, 9, size=4))
        counts_b = tuple(int(c) for c in rng.integers(0, 9, size=4))
        votes = make_votes({"a": counts_a, "b": counts_b})
        style = ss.Style(int(rng.integers(4)))
        for x in range(1, 5):
            fwd = ss.generate_comparison("a", "b", style, votes, threshold_x=x)
            rev = ss.generate_comparison("b", "a", style, votes, threshold_x=x)
            assert (fwd is None) == (rev is None)
            if fwd is not None:
                assert fwd.label == -rev.label
            tighter = ss.generate_comparison("a", "b", style, votes, threshold_x=x + 1)
            if tighter is not None:
                assert fwd is not None and fwd.label == tighter.label
            if fwd is None:
                assert tighter is None
        checked += 1

    leakage_instances = 50
    for trial in range(leakage_instances):
        ids = [f"img-{trial}-{i}" for i in range(40)]
        counts = {i: tuple(int(c) for c in rng.integers(0, 9, size=4)) for i in ids}
        votes = make_votes(counts)
        split = ss.split_dataset(ids, seed=trial)
        for partition in (split.train, split.validation, split.test):
            sampled = ss.sample_comparisons(partition, votes, n=20, seed=trial)
            allowed = set(partition)
            for comp in sampled:
                assert comp.image_a in allowed and comp.image_b in allowed

    elapsed = time.perf_counter() - started
    ok = checked == cases and elapsed < 5.0
    emit(
        capsys,
        "comparison label suite",
        ok,
        f"cases={checked} leakage_instances={leakage_instances} elapsed={elapsed:.2f}s (<5s)",
    )


def test_synthetic_benchmark(capsys):
    """End-to-end learning quality on the reference synthetic dataset."""
    started = time.perf_counter()
    dataset = ss.generate_dataset(ss.SynthConfig())
    split = ss.split_dataset(dataset.images.ids, seed=42)
    config = ss.TrainConfig(
        learning_rate=0.05,
        epochs=60,
        batch_size=32,
        comparisons_per_epoch=512,
        seed=42,
    )
    model, history = ss.train(
        ss.init_model(16, seed=42), dataset.images, dataset.votes, split, config
    )
    estimation = ss.evaluate_estimation(model, dataset.images, split.test, dataset.votes)
    store = ss.embed_all(model, dataset.images, dataset.catalog)
    retrieval = ss.retrieval_accuracy(store, split.test, dataset.votes, k=5)
    elapsed = time.perf_counter() - started

    loss_decreased = history.epoch_losses[-1] < history.epoch_losses[0]
    ok = (
        config.epochs <= 200
        and estimation.overall >= 0.90
        and retrieval >= 0.80
        and loss_decreased
        and elapsed < 60.0
    )
    emit(
        capsys,
        "synthetic benchmark",
        ok,
        f"epochs={config.epochs} (<=200) accuracy={estimation.overall:.4f} (>=0.90) "
        f"retrieval@5={retrieval:.4f} (>=0.80) "
        f"loss {history.epoch_losses[0]:.4f}->{history.epoch_losses[-1]:.4f} "
        f"elapsed={elapsed:.2f}s (<60s)",
    )


def test_retrieval_oracle(capsys):
    """top_k must equal an independent full sort, including tie order."""
    started = time.perf_counter()
    rng = np.random.default_rng(303)
    stores = 1000
    for trial in range(stores):
        n = int(rng.integers(2, 201))
        order = rng.permutation(n)
        ids = [f"e{order[i]:05d}" for i in range(n)]
        matrix = rng.normal(size=(n, ss.EMBEDDING_DIM))
        if n >= 4 and rng.random() < 0.5:
            # plant exact ties to exercise the id ordering
            dups = rng.integers(0, n, size=n // 4)
            srcs = rng.integers(0, n, size=n // 4)
            matrix[dups] = matrix[srcs]
        store = make_store(ids, matrix)
        seed_idx = int(rng.integers(n))
        k = int(rng.integers(1, n + 3))
        result = ss.top_k(store, ids[seed_idx], k)
        expected = brute_force_top_k(ids, matrix, seed_idx, k)
        assert list(result.entries) == expected
        assert result.truncated == (len(expected) < k)
    elapsed = time.perf_counter() - started
    ok = elapsed < 10.0
    emit(
        capsys,
        "retrieval oracle",
        ok,
        f"stores={stores} max_size=200 bit-identical elapsed={elapsed:.2f}s (<10s)",
    )


def test_graph_pipeline_invariant(capsys):
    """Window, overlap, and group-size invariants plus aggregation totals."""
    started = time.perf_counter()
    rng = np.random.default_rng(404)
    instances = 100
    max_aggregation_error = 0.0
    for trial in range(instances):
        n = int(rng.integers(8, 41))
        n_groups = int(rng.integers(3, 7))
        skus = [f"P{i:02d}" for i in range(n)]
        groups = {s: f"G{int(rng.integers(n_groups))}" for s in skus}
        catalog = ss.ProductCatalog(ss.Product(sku=s, group=g) for s, g in groups.items())
        scale = float(rng.uniform(0.3, 1.5))
        store = make_store(
            [],
            np.zeros((0, ss.EMBEDDING_DIM)),
            skus=skus,
            product_matrix=rng.normal(size=(n, ss.EMBEDDING_DIM)) * scale,
        )
        records = []
        for j in range(int(rng.integers(3, 11))):
            listed = tuple(skus[i] for i in rng.choice(n, size=int(rng.integers(1, 4)), replace=False))
            feats = np.zeros(2)
            feats.setflags(write=False)
            records.append(ss.ImageRecord(image_id=f"i{j}", skus=listed, features=feats))
        images = ss.ImageSet(records)
        co_pairs = set()
        for rec in records:
            uniq = sorted(set(rec.skus))
            for x in range(len(uniq) - 1):
                for y in range(x + 1, len(uniq)):
                    co_pairs.add((uniq[x], uniq[y]))

        min_size = int(rng.integers(2, 7))
        graph = ss.build_graph(store, catalog)
        graph = ss.remove_overlap_edges(graph, images)
        graph = ss.filter_edges(graph, 1.0, 10.0)
        graph = ss.filter_small_groups(graph, min_size)

        sizes = graph.group_sizes()
        for (a, b), w in graph.edges.items():
            assert 1.0 <= w <= 10.0
            assert (a, b) not in co_pairs
        for size in sizes.values():
            assert size >= min_size

        gg = ss.group_graph(graph)
        expected_cross: dict[tuple[str, str], float] = {}
        expected_self: dict[str, float] = {g: 0.0 for g in sizes}
        for (a, b), w in graph.edges.items():
            ga, gb = graph.nodes[a], graph.nodes[b]
            if ga == gb:
                expected_self[ga] += w
            else:
                key = tuple(sorted((ga, gb)))
                expected_cross[key] = expected_cross.get(key, 0.0) + w
        assert set(gg.edges) == set(expected_cross)
        for key, w in expected_cross.items():
            max_aggregation_error = max(max_aggregation_error, abs(gg.edges[key] - w))
        for g, w in expected_self.items():
            max_aggregation_error = max(max_aggregation_error, abs(gg.self_weights[g] - w))
        total = sum(graph.edges.values())
        aggregated = sum(gg.edges.values()) + sum(gg.self_weights.values())
        max_aggregation_error = max(max_aggregation_error, abs(total - aggregated))
        assert max_aggregation_error < 1e-9

    elapsed = time.perf_counter() - started
    ok = max_aggregation_error < 1e-9 and elapsed < 10.0
    emit(
        capsys,
        "graph pipeline invariant",
        ok,
        f"instances={instances} max_aggregation_error={max_aggregation_error:.2e} (<1e-9) "
        f"elapsed={elapsed:.2f}s (<10s)",
    )


def test_export_roundtrip(capsys, tmp_path):
    """Write then re-read every format; node and edge data must be identical."""
    rng = np.random.default_rng(505)
    graphs = 50
    for trial in range(graphs):
        n = int(rng.integers(2, 25))
        nodes = {f"N{i:02d}": f"G{int(rng.integers(4))}" for i in range(n)}
        ids = sorted(nodes)
        edges = {}
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.25:
                    edges[(ids[i], ids[j])] = float(rng.uniform(1e-3, 1e3))
        graph = ss.SimilarityGraph(scope="products", nodes=nodes, edges=edges)
        for fmt in FORMATS:
            path = str(tmp_path / f"g{trial}.{fmt}")
            ss.export_graph(graph, fmt, path)
            loaded = read_graph(path, fmt)
            assert loaded.edges == edges
            if fmt == "edge-csv":
                endpoints = {endpoint for pair in edges for endpoint in pair}
                assert set(loaded.nodes) == endpoints
            else:
                assert set(loaded.nodes) == set(nodes)
                for node_id, attrs in loaded.nodes.items():
                    assert attrs["group"] == nodes[node_id]
    emit(
        capsys,
        "export roundtrip",
        True,
        f"graphs={graphs} formats={'/'.join(FORMATS)} node+edge data identical",
    )


def test_full_pipeline_determinism(capsys, tmp_path):
    """Same seed twice: checkpoint, embeddings, and graph bytes must match."""
    first = build_pipeline(str(tmp_path / "run1"), seed=5)
    second = build_pipeline(str(tmp_path / "run2"), seed=5)
    compared = []
    for key in ("checkpoint", "embeddings", "graph"):
        with open(first.paths[key], "rb") as fa, open(second.paths[key], "rb") as fb:
            assert fa.read() == fb.read(), f"{key} differs between identical runs"
        compared.append(key)
    assert first.model.fingerprint() == second.model.fingerprint()
    emit(
        capsys,
        "full pipeline determinism",
        True,
        f"files bit-identical: {', '.join(compared)}",
    )


def test_service_conformance(capsys, engine):
    """Every endpoint answer equals the corresponding library call."""
    client = TestClient(create_app(engine), raise_server_exceptions=False)
    checks = 0

    assert client.get("/health").json() == {
        "status": "ok",
        "checkpoint_sha256": engine.checkpoint_sha256,
        "model_fingerprint": engine.model.fingerprint(),
        "input_dim": engine.input_dim,
        "graph": {"nodes": engine.graph.node_count, "edges": engine.graph.edge_count},
    }
    checks += 1

    assert client.get("/styles").json() == {
        "styles": [
            {"id": int(s), "name": s.label, "attributes": STYLE_ATTRIBUTES[s]} for s in ss.Style
        ]
    }
    checks += 1

    graph_sizes = engine.graph.group_sizes()
    assert client.get("/groups").json() == {
        "groups": [
            {"group": g, "product_count": c, "graph_product_count": graph_sizes.get(g, 0)}
            for g, c in engine.catalog.group_counts().items()
        ]
    }
    checks += 1

    for sku in sorted(engine.graph.nodes)[:3]:
        product = engine.catalog.get(sku)
        assert client.get(f"/products/{sku}").json() == {
            "sku": sku,
            "group": product.group,
            "name": product.display_name,
            "in_graph": True,
            "weighted_degree": engine.graph.weighted_degrees()[sku],
            "embedding": engine.store.embedding_of(sku, scope="products").tolist(),
        }
        ranked = ss.top_k(engine.store, sku, 3, scope="products")
        assert client.get(f"/products/{sku}/neighbors", params={"k": 3}).json() == {
            "sku": sku,
            "k": 3,
            "truncated": ranked.truncated,
            "neighbors": [
                {"sku": n, "group": engine.catalog.get(n).group, "distance": d}
                for n, d in ranked.entries
            ],
        }
        checks += 2

    rng = np.random.default_rng(606)
    for _ in range(2):
        features = rng.normal(size=engine.input_dim).tolist()
        report = ss.score_design(engine, features, k=4)
        assert client.post("/score", json={"features": features, "k": 4}).json() == {
            "style_probs": list(report.style_probs),
            "top_neighbors": [
                {"sku": n.sku, "group": n.group, "distance": n.distance}
                for n in report.top_neighbors
            ],
            "group_connections": report.group_connections,
            "similarity_score": report.similarity_score,
            "flags": list(report.flags),
        }
        checks += 1

    gg = engine.groups
    assert client.get("/graph/groups").json() == {
        "nodes": [
            {
                "group": s.group,
                "product_count": s.product_count,
                "degree_sum": s.degree_sum,
                "self_weight": gg.self_weights.get(s.group, 0.0),
                "most_connected": most_connected(engine.graph, s.group).sku,
            }
            for s in gg.stats
        ],
        "edges": [
            {"source": a, "target": b, "weight": w} for (a, b), w in sorted(gg.edges.items())
        ],
    }
    checks += 1

    gaps = engine.gaps
    assert client.get("/graph/gaps").json() == {
        "groups": [
            {
                "group": g.group,
                "node_count": g.node_count,
                "isolated_count": g.isolated_count,
                "isolated_skus": list(g.isolated_skus),
                "degree_min": g.degree_min,
                "degree_median": g.degree_median,
                "degree_max": g.degree_max,
            }
            for g in gaps.groups
        ],
        "zero_weight_pairs": [list(p) for p in gaps.zero_weight_pairs],
    }
    checks += 1

    for fmt in FORMATS:
        resp = client.get("/graph/export", params={"format": fmt})
        assert resp.status_code == 200
        assert resp.text == export_graph_string(engine.graph, fmt)
        checks += 1

    error_cases = [
        (client.get("/products/NOPE-404"), 404, "not_found"),
        (client.get("/products/NOPE-404/neighbors"), 404, "not_found"),
        (client.get("/missing/path"), 404, "not_found"),
        (client.get("/score"), 405, "method_not_allowed"),
        (client.post("/score", json={"features": "bad"}), 400, "invalid_request"),
        (client.post("/score", json={"features": [0.1] * (engine.input_dim + 1)}), 400, "invalid_request"),
        (client.get("/graph/export", params={"format": "dot"}), 400, "invalid_request"),
        (client.post("/admin/reload", headers={"x-admin-token": "wrong"}), 403, "forbidden"),
    ]
    for resp, status, error in error_cases:
        assert resp.status_code == status
        body = resp.json()
        assert set(body) == {"error", "detail"} and body["error"] == error
        checks += 1

    emit(
        capsys,
        "service conformance",
        True,
        f"responses field-for-field: checks={checks} including {len(error_cases)} error shapes",
    )
