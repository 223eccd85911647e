"""Pairwise style comparisons derived from expert votes.

A comparison says "image A reads more <style> than image B". We only keep
pairs where the vote margin is decisive: at least ``threshold_x`` more votes
on one side. Near-ties carry little signal and are discarded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .catalog import Style, VoteTable, vote_counts


class SamplingError(Exception):
    """Rejection sampling could not draw enough decisive comparisons."""


@dataclass(frozen=True)
class ComparisonLabel:
    """A decisive pairwise judgement for one style.

    ``label`` is +1 when image_a wins, -1 when image_b wins.
    """

    image_a: str
    image_b: str
    style: Style
    label: int


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[str, ...]
    validation: tuple[str, ...]
    test: tuple[str, ...]
    ratios: tuple[float, float, float]
    seed: int

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (len(self.train), len(self.validation), len(self.test))


def generate_comparison(
    image_a: str,
    image_b: str,
    style: Style,
    votes: VoteTable,
    threshold_x: int = 1,
) -> ComparisonLabel | None:
    """Label the ordered pair (image_a, image_b) for one style, or None if indecisive.

    The margin rule: votes_a - votes_b >= threshold_x labels +1,
    votes_b - votes_a >= threshold_x labels -1, anything in between is
    discarded. threshold_x must be at least 1, otherwise equal counts would
    produce both labels at once.
    """
    if threshold_x < 1:
        raise ValueError(f"threshold_x must be >= 1, got {threshold_x}")
    if image_a == image_b:
        raise ValueError(f"cannot compare image {image_a!r} with itself")
    margin = vote_counts(image_a, votes)[style] - vote_counts(image_b, votes)[style]
    if margin >= threshold_x:
        return ComparisonLabel(image_a=image_a, image_b=image_b, style=style, label=1)
    if margin <= -threshold_x:
        return ComparisonLabel(image_a=image_a, image_b=image_b, style=style, label=-1)
    return None


def split_dataset(
    image_ids: tuple[str, ...] | list[str],
    seed: int,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
) -> DatasetSplit:
    """Shuffle ids and split into train/validation/test partitions.

    Partition sizes are the largest-remainder rounding of ``ratios`` so they
    always sum to the input size; remainder ties go to the earlier partition.
    The shuffle is a deterministic function of ``seed``.
    """
    ids = tuple(image_ids)
    if len(set(ids)) != len(ids):
        raise ValueError("image_ids contains duplicates")
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ValueError(f"ratios must be three non-negative numbers, got {ratios!r}")
    total_ratio = sum(ratios)
    if total_ratio <= 0:
        raise ValueError("ratios must not all be zero")

    n = len(ids)
    exact = [n * r / total_ratio for r in ratios]
    sizes = [int(np.floor(x)) for x in exact]
    remainders = [x - s for x, s in zip(exact, sizes)]
    leftover = n - sum(sizes)
    # hand out leftover slots by descending remainder, earlier partition wins ties
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    for i in order[:leftover]:
        sizes[i] += 1

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    shuffled = [ids[i] for i in perm]
    a, b = sizes[0], sizes[0] + sizes[1]
    return DatasetSplit(
        train=tuple(shuffled[:a]),
        validation=tuple(shuffled[a:b]),
        test=tuple(shuffled[b:]),
        ratios=tuple(float(r) for r in ratios),  # type: ignore[arg-type]
        seed=seed,
    )


def sample_comparisons(
    partition_ids: tuple[str, ...] | list[str],
    votes: VoteTable,
    n: int,
    threshold_x: int = 1,
    seed: int = 0,
    style: Style | None = None,
    rng: np.random.Generator | None = None,
) -> list[ComparisonLabel]:
    """Draw n decisive comparisons by rejection sampling within one partition.

    Each draw picks an ordered pair of distinct images uniformly, plus a style
    (uniform over all four unless ``style`` pins one), keeping the draw only if
    the margin rule is decisive. Draws are with replacement, so repeats can
    occur. Gives up with SamplingError after 1000 * n attempts, which only
    happens when the partition is tiny or the votes are nearly all ties.
    """
    ids = tuple(partition_ids)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if threshold_x < 1:
        raise ValueError(f"threshold_x must be >= 1, got {threshold_x}")
    if n == 0:
        return []
    if len(ids) < 2:
        raise SamplingError(f"need at least 2 images to compare, got {len(ids)}")

    if rng is None:
        rng = np.random.default_rng(seed)
    styles = tuple(Style) if style is None else (style,)
    out: list[ComparisonLabel] = []
    budget = 1000 * n
    attempts = 0
    while len(out) < n:
        if attempts >= budget:
            raise SamplingError(
                f"drew {attempts} candidate pairs but only {len(out)} of {n} were decisive"
            )
        attempts += 1
        i = int(rng.integers(len(ids)))
        j = int(rng.integers(len(ids) - 1))
        if j >= i:
            j += 1
        s = styles[int(rng.integers(len(styles)))]
        cmp = generate_comparison(ids[i], ids[j], s, votes, threshold_x)
        if cmp is not None:
            out.append(cmp)
    return out


def write_comparisons(comparisons: list[ComparisonLabel], path: str) -> None:
    """Write comparisons as line-delimited JSON records {a, b, style, label}."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in comparisons:
            fh.write(
                json.dumps(
                    {"a": c.image_a, "b": c.image_b, "style": c.style.label, "label": c.label},
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_comparisons(path: str) -> list[ComparisonLabel]:
    """Read comparisons written by :func:`write_comparisons`."""
    out: list[ComparisonLabel] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            label = obj.get("label")
            if label not in (1, -1):
                raise ValueError(f"{path}:{lineno}: label must be 1 or -1, got {label!r}")
            out.append(
                ComparisonLabel(
                    image_a=obj["a"],
                    image_b=obj["b"],
                    style=Style.from_name(obj["style"]),
                    label=label,
                )
            )
    return out
