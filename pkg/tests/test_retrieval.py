"""Embedding store, exact nearest neighbors, and the retrieval metric."""

from __future__ import annotations

import numpy as np
import pytest

import stylesim as ss

from conftest import make_store, make_votes, pad16


def brute_force_top_k(ids, matrix, seed_idx, k):
    """Independent oracle: full sort by (distance, id) using per-pair math."""
    ranked = []
    for i, entry_id in enumerate(ids):
        if i == seed_idx:
            continue
        d = np.sqrt(np.sum((matrix[i] - matrix[seed_idx]) ** 2))
        ranked.append((float(d), entry_id))
    ranked.sort()
    return [(entry_id, d) for d, entry_id in ranked[:k]]


class TestEmbedAll:
    @pytest.fixture
    def setup(self):
        catalog = ss.ProductCatalog(
            [
                ss.Product(sku="A", group="Beds"),
                ss.Product(sku="B", group="Beds"),
                ss.Product(sku="C", group="Sofas"),
            ]
        )
        rng = np.random.default_rng(0)
        records = []
        # A advertised by i0; B by i1, i2; C never the first sku
        for image_id, skus in [("i0", ("A",)), ("i1", ("B",)), ("i2", ("B", "C"))]:
            f = rng.normal(size=6)
            f.setflags(write=False)
            records.append(ss.ImageRecord(image_id=image_id, skus=skus, features=f))
        return catalog, ss.ImageSet(records), ss.init_model(6, 4, seed=1)

    def test_store_covers_every_image(self, setup):
        catalog, images, model = setup
        store = ss.embed_all(model, images, catalog)
        assert store.image_ids == ("i0", "i1", "i2")
        assert store.image_matrix.shape == (3, ss.EMBEDDING_DIM)

    def test_image_embeddings_match_forward(self, setup):
        # batched and single-row matmul may differ in the last ulp, so this is
        # a tight numeric check rather than a bitwise one
        catalog, images, model = setup
        store = ss.embed_all(model, images, catalog)
        for image_id in images.ids:
            expected = ss.forward(model, images.get(image_id).features).embedding
            np.testing.assert_allclose(store.embedding_of(image_id), expected, rtol=1e-12)

    def test_single_image_product_equals_image(self, setup):
        catalog, images, model = setup
        store = ss.embed_all(model, images, catalog)
        np.testing.assert_array_equal(
            store.embedding_of("A", scope="products"), store.embedding_of("i0")
        )

    def test_product_embedding_is_target_mean(self, setup):
        catalog, images, model = setup
        store = ss.embed_all(model, images, catalog)
        expected = (store.embedding_of("i1") + store.embedding_of("i2")) / 2
        np.testing.assert_allclose(
            store.embedding_of("B", scope="products"), expected, rtol=0, atol=0
        )

    def test_product_without_target_images_skipped(self, setup):
        catalog, images, model = setup
        store = ss.embed_all(model, images, catalog)
        assert store.skipped_products == ("C",)
        assert "C" not in store.product_skus
        with pytest.raises(KeyError):
            store.embedding_of("C", scope="products")

    def test_opposite_embeddings_average_to_zero(self):
        store = make_store(
            ["x", "y"],
            pad16([1.0, -2.0, 3.0], [-1.0, 2.0, -3.0]),
            skus=["P"],
            product_matrix=pad16([0.0]),
        )
        mean = (store.image_matrix[0] + store.image_matrix[1]) / 2
        np.testing.assert_array_equal(mean, np.zeros(ss.EMBEDDING_DIM))

    def test_checkpoint_id_matches_model(self, setup):
        catalog, images, model = setup
        store = ss.embed_all(model, images, catalog)
        assert store.checkpoint_id == model.fingerprint()


class TestDistance:
    def test_identity(self):
        v = np.arange(16.0)
        assert ss.distance(v, v) == 0.0

    def test_three_four_five(self):
        a = pad16([3.0, 4.0])[0]
        b = np.zeros(16)
        assert ss.distance(a, b) == 5.0

    def test_symmetry_exact(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b = rng.normal(size=16), rng.normal(size=16)
            assert ss.distance(a, b) == ss.distance(b, a)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            a, b, c = rng.normal(size=16), rng.normal(size=16), rng.normal(size=16)
            assert ss.distance(a, c) <= ss.distance(a, b) + ss.distance(b, c) + 1e-9

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ss.distance(np.zeros(16), np.zeros(8))


class TestTopK:
    def test_three_entries_ordering(self):
        store = make_store(
            ["seed", "near", "mid", "far"],
            pad16([0.0], [1.0], [2.0], [3.0]),
        )
        result = ss.top_k(store, "seed", 2)
        assert [e[0] for e in result.entries] == ["near", "mid"]
        assert [e[1] for e in result.entries] == [1.0, 2.0]
        assert not result.truncated

    def test_duplicate_of_seed_ranks_first_at_zero(self):
        store = make_store(["seed", "twin", "other"], pad16([5.0], [5.0], [9.0]))
        result = ss.top_k(store, "seed", 2)
        assert result.entries[0] == ("twin", 0.0)

    def test_seed_excluded(self):
        store = make_store(["a", "b"], pad16([0.0], [1.0]))
        result = ss.top_k(store, "a", 5)
        assert [e[0] for e in result.entries] == ["b"]
        assert result.truncated

    def test_ties_break_by_ascending_id(self):
        store = make_store(["seed", "zz", "aa", "mm"], pad16([0.0], [2.0], [2.0], [2.0]))
        result = ss.top_k(store, "seed", 3)
        assert [e[0] for e in result.entries] == ["aa", "mm", "zz"]

    def test_k_zero_rejected(self):
        store = make_store(["a", "b"], pad16([0.0], [1.0]))
        with pytest.raises(ValueError, match="k must be >= 1"):
            ss.top_k(store, "a", 0)

    def test_unknown_seed(self):
        store = make_store(["a", "b"], pad16([0.0], [1.0]))
        with pytest.raises(KeyError, match="ghost"):
            ss.top_k(store, "ghost", 1)

    def test_matches_brute_force_on_random_stores(self):
        rng = np.random.default_rng(3)
        for trial in range(50):
            n = int(rng.integers(2, 40))
            ids = [f"e{i:03d}" for i in range(n)]
            matrix = rng.normal(size=(n, ss.EMBEDDING_DIM))
            store = make_store(ids, matrix)
            seed_idx = int(rng.integers(n))
            k = int(rng.integers(1, n + 3))
            expected = brute_force_top_k(ids, matrix, seed_idx, k)
            got = ss.top_k(store, ids[seed_idx], k)
            assert list(got.entries) == expected

    def test_insertion_order_invariance(self):
        rng = np.random.default_rng(4)
        n = 20
        ids = [f"e{i}" for i in range(n)]
        matrix = rng.normal(size=(n, ss.EMBEDDING_DIM))
        store = make_store(ids, matrix)
        perm = rng.permutation(n)
        store2 = make_store([ids[i] for i in perm], matrix[perm])
        r1 = ss.top_k(store, "e5", 7)
        r2 = ss.top_k(store2, "e5", 7)
        assert r1 == r2

    def test_products_scope(self):
        store = make_store(
            ["i0"],
            pad16([0.0]),
            skus=["A", "B", "C"],
            product_matrix=pad16([0.0], [1.0], [4.0]),
        )
        result = ss.top_k(store, "A", 2, scope="products")
        assert [e[0] for e in result.entries] == ["B", "C"]
        assert result.entries[1][1] == 4.0


class TestRetrievalAccuracy:
    def test_tight_clusters_are_perfect(self):
        # two well separated style clusters, k=1
        ids = ["m0", "m1", "m2", "t0", "t1", "t2"]
        matrix = pad16([0.0], [0.01], [0.02], [10.0], [10.01], [10.02])
        store = make_store(ids, matrix)
        votes = make_votes(
            {
                "m0": (3, 0, 0, 0),
                "m1": (3, 0, 0, 0),
                "m2": (3, 0, 0, 0),
                "t0": (0, 3, 0, 0),
                "t1": (0, 3, 0, 0),
                "t2": (0, 3, 0, 0),
            }
        )
        assert ss.retrieval_accuracy(store, ids, votes, k=1) == 1.0

    def test_identical_embeddings_counted_by_oracle(self):
        ids = ["a", "b", "c", "d"]
        store = make_store(ids, pad16([0.0], [0.0], [0.0], [0.0]))
        votes = make_votes(
            {"a": (3, 0, 0, 0), "b": (3, 0, 0, 0), "c": (0, 3, 0, 0), "d": (0, 0, 3, 0)}
        )
        # ties resolve by id; k=1: a->b (hit), b->a (hit), c->a (miss), d->a (miss)
        assert ss.retrieval_accuracy(store, ids, votes, k=1) == 0.5

    def test_counts_every_retrieved_event(self):
        ids = ["a", "b", "c"]
        store = make_store(ids, pad16([0.0], [1.0], [2.0]))
        votes = make_votes({"a": (3, 0, 0, 0), "b": (3, 0, 0, 0), "c": (0, 3, 0, 0)})
        # k=2: every seed retrieves both others; 6 events, hits: a->b, b->a
        assert ss.retrieval_accuracy(store, ids, votes, k=2) == 2 / 6

    def test_unvoted_neighbor_is_a_miss(self):
        ids = ["a", "b"]
        store = make_store(ids, pad16([0.0], [1.0]))
        votes = make_votes({"a": (3, 0, 0, 0), "b": (0, 0, 0, 0)})
        assert ss.retrieval_accuracy(store, ["a"], votes, k=1) == 0.0

    def test_k_zero_rejected(self):
        store = make_store(["a", "b"], pad16([0.0], [1.0]))
        votes = make_votes({"a": (1, 0, 0, 0), "b": (1, 0, 0, 0)})
        with pytest.raises(ValueError, match="k"):
            ss.retrieval_accuracy(store, ["a"], votes, k=0)

    def test_empty_test_set_rejected(self):
        store = make_store(["a", "b"], pad16([0.0], [1.0]))
        votes = make_votes({"a": (1, 0, 0, 0), "b": (1, 0, 0, 0)})
        with pytest.raises(ValueError, match="empty"):
            ss.retrieval_accuracy(store, [], votes, k=1)


class TestEmbeddingsFile:
    def test_roundtrip_bit_exact(self, tmp_path, pipeline):
        path = tmp_path / "emb.jsonl"
        ss.write_embeddings(pipeline.store, str(path))
        loaded = ss.read_embeddings(str(path))
        assert loaded.image_ids == pipeline.store.image_ids
        assert loaded.product_skus == pipeline.store.product_skus
        assert np.array_equal(loaded.image_matrix, pipeline.store.image_matrix)
        assert np.array_equal(loaded.product_matrix, pipeline.store.product_matrix)
        assert loaded.checkpoint_id == pipeline.store.checkpoint_id
        assert loaded.skipped_products == pipeline.store.skipped_products

    def test_write_is_deterministic(self, tmp_path, pipeline):
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        ss.write_embeddings(pipeline.store, str(p1))
        ss.write_embeddings(pipeline.store, str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_meta_line_first(self, tmp_path, pipeline):
        import json

        path = tmp_path / "emb.jsonl"
        ss.write_embeddings(pipeline.store, str(path))
        first = json.loads(path.read_text().splitlines()[0])
        assert first["format"] == "style-embeddings"
        assert first["dim"] == ss.EMBEDDING_DIM

    def test_reader_rejects_other_files(self, tmp_path):
        path = tmp_path / "junk.jsonl"
        path.write_text('{"format": "nope"}\n')
        with pytest.raises(ValueError, match="not an embeddings file"):
            ss.read_embeddings(str(path))


class TestStoreValidation:
    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            make_store(["a", "a"], pad16([0.0], [1.0]))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            make_store(["a"], pad16([float("nan")]))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="does not match"):
            ss.EmbeddingStore(
                image_ids=("a",),
                image_matrix=np.zeros((2, ss.EMBEDDING_DIM)),
                product_skus=(),
                product_matrix=np.zeros((0, ss.EMBEDDING_DIM)),
                checkpoint_id="x",
            )

    def test_matrices_read_only(self):
        store = make_store(["a"], pad16([1.0]))
        with pytest.raises(ValueError):
            store.image_matrix[0, 0] = 2.0
