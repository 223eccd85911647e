#!/usr/bin/env python3
"""Nearest-neighbor retrieval in style space.

Embeds every image and product, pulls the closest products for a few seeds,
measures retrieval accuracy on the test split, and counts which products are
recommended most often.
"""

import stylesim as ss


def main() -> None:
    dataset = ss.generate_dataset(ss.SynthConfig(n_products=80, n_images=240, seed=11))
    split = ss.split_dataset(dataset.images.ids, seed=11)
    config = ss.TrainConfig(learning_rate=0.05, epochs=30, comparisons_per_epoch=256, seed=11)
    model, _ = ss.train(ss.init_model(16, hidden=16, seed=11), dataset.images, dataset.votes, split, config)

    store = ss.embed_all(model, dataset.images, dataset.catalog)
    print(
        f"embedded {len(store.image_ids)} images and {len(store.product_skus)} products "
        f"into {ss.EMBEDDING_DIM}-d style space"
    )

    print()
    print("top-5 products nearest each seed (distance, group):")
    for sku in ("SKU-0000", "SKU-0001", "SKU-0002"):
        seed_group = dataset.catalog.get(sku).group
        seed_style = dataset.true_styles[sku]
        print(f"  {sku} [{seed_group}, true style {seed_style.label}]")
        ranked = ss.top_k(store, sku, k=5, scope="products")
        for neighbor, dist in ranked.entries:
            group = dataset.catalog.get(neighbor).group
            style = dataset.true_styles[neighbor]
            print(f"    {neighbor}  d={dist:6.3f}  {group:13s} {style.label}")

    accuracy = ss.retrieval_accuracy(store, split.test, dataset.votes, k=5)
    print()
    print(f"retrieval accuracy on the test split (k=5): {accuracy:.3f}")
    print("(fraction of retrieved images sharing the seed image's majority style)")

    freq = ss.recommendation_frequency(store, store.product_skus, k=5, scope="products")
    print()
    print("most-recommended products (appearances in other products' top-5):")
    for sku, count in freq.top_n(8):
        group = dataset.catalog.get(sku).group
        print(f"  {sku}  {count:3d}x  {group:13s} {dataset.true_styles[sku].label}")
    never = sum(1 for c in freq.counts.values() if c == 0)
    print(f"({never} of {len(freq.counts)} products never appear in a top-5 list)")


if __name__ == "__main__":
    main()
