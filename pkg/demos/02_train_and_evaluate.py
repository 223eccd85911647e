#!/usr/bin/env python3
"""Train the style model on a synthetic catalog and evaluate it.

Generates a small four-style dataset with simulated expert votes, trains the
pairwise comparison model, and reports the loss curve plus estimation
accuracy per style on the held-out test split.
"""

import time

import stylesim as ss


def main() -> None:
    config = ss.SynthConfig(n_products=120, n_images=360, seed=7)
    dataset = ss.generate_dataset(config)
    print(
        f"dataset: {len(dataset.catalog)} products, {len(dataset.images)} images, "
        f"{len(dataset.votes)} votes from {config.n_experts} simulated experts"
    )

    split = ss.split_dataset(dataset.images.ids, seed=7)
    print(f"split: train={len(split.train)} validation={len(split.validation)} test={len(split.test)}")

    train_config = ss.TrainConfig(
        learning_rate=0.05,
        epochs=40,
        batch_size=32,
        comparisons_per_epoch=256,
        seed=7,
    )
    model = ss.init_model(config.dim, hidden=16, seed=7)
    print(f"model: {config.dim} -> 16 hidden -> {ss.EMBEDDING_DIM}-d embedding -> {ss.N_STYLES} styles "
          f"({model.parameter_count()} parameters)")

    started = time.perf_counter()
    model, history = ss.train(model, dataset.images, dataset.votes, split, train_config)
    elapsed = time.perf_counter() - started

    print()
    print("epoch   loss    val_acc")
    for epoch in range(0, train_config.epochs, 5):
        print(
            f"{epoch + 1:5d}  {history.epoch_losses[epoch]:.4f}   "
            f"{history.validation_accuracy[epoch]:.3f}"
        )
    print(
        f"final  {history.epoch_losses[-1]:.4f}   {history.validation_accuracy[-1]:.3f}"
        f"   ({elapsed:.2f}s)"
    )

    result = ss.evaluate_estimation(model, dataset.images, split.test, dataset.votes)
    print()
    print(f"test estimation accuracy: {result.overall:.3f} over {sum(result.per_style_counts)} images")
    for style in ss.Style:
        count = result.per_style_counts[style]
        acc = result.per_style[style]
        shown = f"{acc:.3f}" if count else "  n/a"
        print(f"  {style.label:12s} {shown}  ({count} test images)")

    # the model's own view of one test image
    image_id = split.test[0]
    record = dataset.images.get(image_id)
    probs = ss.style_probabilities(ss.forward(model, record.features).scores)
    voted = ss.majority_style(image_id, dataset.votes).style
    print()
    print(f"example {image_id}: expert majority={voted.label}")
    for style in ss.Style:
        bar = "#" * round(40 * float(probs[style]))
        print(f"  {style.label:12s} {float(probs[style]):.3f} {bar}")


if __name__ == "__main__":
    main()
