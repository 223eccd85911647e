"""Synthetic benchmark dataset: four style clusters in feature space plus
simulated expert votes.

Each style owns a cluster mean (a scaled one-hot direction), products scatter
around their style's mean, and images scatter around their product. Simulated
experts vote for the product's true style with a configurable fidelity,
otherwise uniformly at random. The construction is separable by design, so a
correct training pipeline should reach high estimation and retrieval accuracy
on it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .catalog import (
    ImageRecord,
    ImageSet,
    Product,
    ProductCatalog,
    Style,
    Vote,
    VoteTable,
)

DEFAULT_GROUPS = (
    "Accent Chairs",
    "Bar Stools",
    "Beds",
    "Dining Tables",
    "Dressers",
    "End Tables",
    "Nightstands",
    "Sofas",
)


@dataclass(frozen=True)
class SynthConfig:
    n_products: int = 400
    n_images: int = 1200
    dim: int = 16
    n_experts: int = 10
    expert_fidelity: float = 0.8
    seed: int = 42
    groups: tuple[str, ...] = DEFAULT_GROUPS
    style_separation: float = 4.0
    product_spread: float = 0.6
    image_noise: float = 0.3
    overlap_prob: float = 0.05

    def __post_init__(self) -> None:
        if self.n_products < 2:
            raise ValueError("n_products must be >= 2")
        if self.n_images < self.n_products:
            raise ValueError("n_images must be >= n_products so every product has an image")
        if self.dim < 4:
            raise ValueError("dim must be >= 4 to fit the four style directions")
        if self.n_experts < 1:
            raise ValueError("n_experts must be >= 1")
        if not (0.0 <= self.expert_fidelity <= 1.0):
            raise ValueError("expert_fidelity must be in [0, 1]")
        if not self.groups:
            raise ValueError("groups must be non-empty")
        if not (0.0 <= self.overlap_prob <= 1.0):
            raise ValueError("overlap_prob must be in [0, 1]")


@dataclass(frozen=True)
class SynthDataset:
    catalog: ProductCatalog
    images: ImageSet
    votes: VoteTable
    true_styles: dict[str, Style]  # sku -> the style its cluster was drawn from


def generate_dataset(config: SynthConfig) -> SynthDataset:
    """Deterministic per seed: separate child streams drive product placement,
    image placement, and voting, so the three stages cannot perturb each other."""
    streams = np.random.SeedSequence(config.seed).spawn(3)
    rng_products = np.random.default_rng(streams[0])
    rng_images = np.random.default_rng(streams[1])
    rng_votes = np.random.default_rng(streams[2])

    style_means = np.zeros((4, config.dim))
    for s in range(4):
        style_means[s, s] = config.style_separation

    # style cycles every product, group every 4, so each group sees all styles
    products: list[Product] = []
    true_styles: dict[str, Style] = {}
    centers = np.zeros((config.n_products, config.dim))
    for i in range(config.n_products):
        style = Style(i % 4)
        group = config.groups[(i // 4) % len(config.groups)]
        sku = f"SKU-{i:04d}"
        products.append(Product(sku=sku, group=group, display_name=f"{group} {i:04d}"))
        true_styles[sku] = style
        centers[i] = style_means[style] + config.product_spread * rng_products.standard_normal(
            config.dim
        )

    images: list[ImageRecord] = []
    for j in range(config.n_images):
        product_row = j % config.n_products
        sku = products[product_row].sku
        features = centers[product_row] + config.image_noise * rng_images.standard_normal(
            config.dim
        )
        features.setflags(write=False)
        skus = [sku]
        if config.n_products > 1 and rng_images.random() < config.overlap_prob:
            other = int(rng_images.integers(config.n_products - 1))
            if other >= product_row:
                other += 1
            skus.append(products[other].sku)
        images.append(
            ImageRecord(image_id=f"IMG-{j:05d}", skus=tuple(skus), features=features)
        )

    votes: list[Vote] = []
    for rec in images:
        true_style = true_styles[rec.target_sku]
        for e in range(config.n_experts):
            if rng_votes.random() < config.expert_fidelity:
                style = true_style
            else:
                style = Style(int(rng_votes.integers(4)))
            votes.append(Vote(image_id=rec.image_id, expert_id=f"expert-{e:02d}", style=style))

    image_set = ImageSet(images)
    return SynthDataset(
        catalog=ProductCatalog(products),
        images=image_set,
        votes=VoteTable(votes, image_ids=image_set.ids),
        true_styles=true_styles,
    )


def write_dataset(dataset: SynthDataset, out_dir: str) -> dict[str, str]:
    """Write products.jsonl / images.jsonl / votes.jsonl; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "products": os.path.join(out_dir, "products.jsonl"),
        "images": os.path.join(out_dir, "images.jsonl"),
        "votes": os.path.join(out_dir, "votes.jsonl"),
    }
    with open(paths["products"], "w", encoding="utf-8") as fh:
        for p in dataset.catalog:
            fh.write(
                json.dumps(
                    {"sku": p.sku, "group": p.group, "name": p.display_name},
                    separators=(",", ":"),
                )
                + "\n"
            )
    with open(paths["images"], "w", encoding="utf-8") as fh:
        for rec in dataset.images:
            fh.write(
                json.dumps(
                    {
                        "image_id": rec.image_id,
                        "skus": list(rec.skus),
                        "features": rec.features.tolist(),
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )
    with open(paths["votes"], "w", encoding="utf-8") as fh:
        for v in dataset.votes.entries:
            fh.write(
                json.dumps(
                    {"image_id": v.image_id, "expert_id": v.expert_id, "style": v.style.label},
                    separators=(",", ":"),
                )
                + "\n"
            )
    return paths
