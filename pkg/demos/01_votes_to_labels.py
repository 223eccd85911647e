#!/usr/bin/env python3
"""From expert votes to pairwise training labels.

Walks the smallest interesting dataset by hand: three images, a panel of
experts, and the margin rule that turns per-style vote counts into the
+1 / -1 comparison labels the model trains on. No files, no model.
"""

import numpy as np

import stylesim as ss


def banner(title: str) -> None:
    print()
    print(title)
    print("-" * len(title))


def main() -> None:
    # Three images of two products. Image features are irrelevant here; the
    # labeling pipeline looks only at votes.
    feat = np.zeros(4)
    feat.setflags(write=False)
    images = ss.ImageSet(
        [
            ss.ImageRecord(image_id="img-armchair", skus=("CHAIR-1",), features=feat),
            ss.ImageRecord(image_id="img-sofa", skus=("SOFA-1",), features=feat),
            ss.ImageRecord(image_id="img-set", skus=("SOFA-1", "CHAIR-1"), features=feat),
        ]
    )

    # Seven experts, one vote each per image they reviewed.
    votes = ss.VoteTable(
        [
            ss.Vote("img-armchair", "expert-1", ss.Style.MODERN),
            ss.Vote("img-armchair", "expert-2", ss.Style.MODERN),
            ss.Vote("img-armchair", "expert-3", ss.Style.MODERN),
            ss.Vote("img-armchair", "expert-4", ss.Style.COTTAGE),
            ss.Vote("img-sofa", "expert-1", ss.Style.MODERN),
            ss.Vote("img-sofa", "expert-2", ss.Style.TRADITIONAL),
            ss.Vote("img-sofa", "expert-3", ss.Style.TRADITIONAL),
            ss.Vote("img-sofa", "expert-5", ss.Style.COASTAL),
            ss.Vote("img-set", "expert-1", ss.Style.MODERN),
            ss.Vote("img-set", "expert-6", ss.Style.MODERN),
            ss.Vote("img-set", "expert-7", ss.Style.TRADITIONAL),
        ],
        image_ids=images.ids,
    )

    banner("Vote counts per image (modern, traditional, cottage, coastal)")
    for image_id in images.ids:
        counts = ss.vote_counts(image_id, votes)
        majority = ss.majority_style(image_id, votes)
        tie = " (tie broken to lowest code)" if majority.tied else ""
        print(f"  {image_id:14s} {counts}  majority={majority.style.label}{tie}")

    banner("Margin rule at threshold x=1")
    for style in ss.Style:
        comp = ss.generate_comparison("img-armchair", "img-sofa", style, votes)
        shown = "discarded (margin 0)" if comp is None else f"label {comp.label:+d}"
        margin = ss.vote_counts("img-armchair", votes)[style] - ss.vote_counts("img-sofa", votes)[style]
        print(f"  {style.label:12s} margin {margin:+d} -> {shown}")

    banner("Raising the threshold discards narrow margins")
    for x in (1, 2, 3):
        comp = ss.generate_comparison("img-armchair", "img-sofa", ss.Style.MODERN, votes, threshold_x=x)
        shown = "discarded" if comp is None else f"label {comp.label:+d}"
        print(f"  x={x}: modern margin +2 -> {shown}")

    banner("Order antisymmetry")
    fwd = ss.generate_comparison("img-armchair", "img-sofa", ss.Style.MODERN, votes)
    rev = ss.generate_comparison("img-sofa", "img-armchair", ss.Style.MODERN, votes)
    print(f"  (armchair, sofa) -> {fwd.label:+d},  (sofa, armchair) -> {rev.label:+d}")

    banner("Sampling decisive comparisons from a partition")
    sampled = ss.sample_comparisons(images.ids, votes, n=6, seed=7)
    for comp in sampled:
        print(f"  {comp.image_a} vs {comp.image_b}  style={comp.style.label:12s} label={comp.label:+d}")
    print(f"  ({len(sampled)} draws, all decisive by construction)")


if __name__ == "__main__":
    main()
