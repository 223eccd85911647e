"""Catalog data model: products, images with feature vectors, and expert style votes.

Datasets are loaded from line-delimited JSON files and are immutable after
loading, so they are safe to share across threads.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, NamedTuple

import numpy as np

log = logging.getLogger(__name__)


class Style(IntEnum):
    """The four room styles. Code order is load-bearing: ties break to the lowest code."""

    MODERN = 0
    TRADITIONAL = 1
    COTTAGE = 2
    COASTAL = 3

    @classmethod
    def from_name(cls, name: str) -> "Style":
        try:
            return cls[name.upper()]
        except KeyError:
            valid = ", ".join(s.name.lower() for s in cls)
            raise ValueError(f"unknown style {name!r} (expected one of: {valid})") from None

    @property
    def label(self) -> str:
        return self.name.lower()


STYLE_NAMES: tuple[str, ...] = tuple(s.label for s in Style)

# Descriptive metadata per style. Carried opaquely through the catalog and the
# API; nothing in the engine interprets these strings.
STYLE_ATTRIBUTES: dict[Style, dict[str, str]] = {
    Style.MODERN: {
        "fabric": "smooth leather and plain linen",
        "color_scheme": "neutral greys, blacks, and muted solids",
        "furniture": "low profile with clean straight lines",
        "material": "mixed metals, glass, light wood",
        "flooring": "flat natural-fiber rugs",
    },
    Style.TRADITIONAL: {
        "fabric": "velvet, silk, and woven florals",
        "color_scheme": "deep blues, reds, greens, and browns",
        "furniture": "dark wood with antique detailing",
        "color_accent": "gold and brass hardware",
        "material": "marble and polished hardwood",
        "flooring": "ornately patterned carpet",
    },
    Style.COTTAGE: {
        "fabric": "soft florals, gingham, and light linen",
        "color_scheme": "whites, pale yellows, and washed pastels",
        "furniture": "vintage pieces with a lightly worn finish",
        "material": "painted wood, wicker, aged metal",
        "flooring": "braided cotton or checked rugs",
    },
    Style.COASTAL: {
        "fabric": "striped linen with nautical motifs",
        "color_scheme": "blues and whites with red or green accents",
        "furniture": "whitewashed and weathered pieces",
        "material": "driftwood, rattan, sea glass",
        "flooring": "woven sisal or jute",
    },
}


class CatalogError(Exception):
    """Dataset ingestion or validation failure."""


class ParseError(CatalogError):
    """A file could not be parsed; the message carries file and line number."""


class DanglingReferenceError(CatalogError):
    """A record references an id that does not exist."""


class DimensionMismatchError(CatalogError):
    """Feature vectors in one image set differ in length."""


class DuplicateVoteError(CatalogError):
    """An expert voted more than once on the same image."""


class NoVotesError(CatalogError):
    """A majority style was requested for an image with no votes."""


@dataclass(frozen=True)
class Product:
    sku: str
    group: str
    display_name: str | None = None


@dataclass(frozen=True, eq=False)
class ImageRecord:
    """One catalog image. ``skus`` lists every product visible in it; the first
    entry is the product the image advertises.

    Identity equality: the ndarray field makes element-wise __eq__ ambiguous.
    """

    image_id: str
    skus: tuple[str, ...]
    features: np.ndarray

    @property
    def target_sku(self) -> str:
        return self.skus[0]


@dataclass(frozen=True)
class Vote:
    image_id: str
    expert_id: str
    style: Style


class ProductCatalog:
    """Insertion-ordered, sku-indexed product collection."""

    def __init__(self, products: Iterable[Product]):
        items = tuple(products)
        index: dict[str, Product] = {}
        for p in items:
            if not p.group:
                raise CatalogError(f"product {p.sku!r} has an empty group")
            if p.sku in index:
                raise CatalogError(f"duplicate sku {p.sku!r}")
            index[p.sku] = p
        self._products = items
        self._index = index

    def __len__(self) -> int:
        return len(self._products)

    def __iter__(self) -> Iterator[Product]:
        return iter(self._products)

    def __contains__(self, sku: str) -> bool:
        return sku in self._index

    def get(self, sku: str) -> Product:
        try:
            return self._index[sku]
        except KeyError:
            raise KeyError(f"unknown sku {sku!r}") from None

    @property
    def skus(self) -> tuple[str, ...]:
        return tuple(p.sku for p in self._products)

    def group_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for p in self._products:
            counts[p.group] = counts.get(p.group, 0) + 1
        return dict(sorted(counts.items()))


class ImageSet:
    """Insertion-ordered image collection with a single feature dimension."""

    def __init__(self, images: Iterable[ImageRecord]):
        items = tuple(images)
        index: dict[str, ImageRecord] = {}
        dim: int | None = None
        for rec in items:
            if not rec.skus:
                raise CatalogError(f"image {rec.image_id!r} lists no skus")
            if rec.image_id in index:
                raise CatalogError(f"duplicate image id {rec.image_id!r}")
            f = rec.features
            if f.ndim != 1 or f.size < 1:
                raise CatalogError(f"image {rec.image_id!r} features must be a non-empty vector")
            if not np.all(np.isfinite(f)):
                raise CatalogError(f"image {rec.image_id!r} has non-finite feature components")
            if dim is None:
                dim = int(f.size)
            elif f.size != dim:
                raise DimensionMismatchError(
                    f"image {rec.image_id!r} has feature dimension {f.size}, expected {dim}"
                )
            index[rec.image_id] = rec
        self._images = items
        self._index = index
        self._dim = dim

    def __len__(self) -> int:
        return len(self._images)

    def __iter__(self) -> Iterator[ImageRecord]:
        return iter(self._images)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._index

    def get(self, image_id: str) -> ImageRecord:
        try:
            return self._index[image_id]
        except KeyError:
            raise KeyError(f"unknown image id {image_id!r}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(rec.image_id for rec in self._images)

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise CatalogError("image set is empty; feature dimension undefined")
        return self._dim


class VoteTable:
    """Expert style votes, at most one per (image, expert) pair.

    ``image_ids`` fixes the universe of known images so that an id with zero
    votes is distinguishable from an unknown id; when omitted, the universe is
    the set of ids appearing in the entries.
    """

    def __init__(self, votes: Iterable[Vote], image_ids: Iterable[str] | None = None):
        entries = tuple(votes)
        by_image: dict[str, dict[str, Style]] = {}
        counts: dict[str, tuple[int, int, int, int]] = {}
        for v in entries:
            per_image = by_image.setdefault(v.image_id, {})
            if v.expert_id in per_image:
                raise DuplicateVoteError(
                    f"duplicate vote by expert {v.expert_id!r} on image {v.image_id!r}"
                )
            per_image[v.expert_id] = v.style
            c = counts.get(v.image_id, (0, 0, 0, 0))
            counts[v.image_id] = tuple(
                n + 1 if s == v.style else n for s, n in enumerate(c)
            )  # type: ignore[assignment]
        self._entries = entries
        self._by_image = by_image
        self._counts = counts
        self._known = frozenset(image_ids) if image_ids is not None else frozenset(by_image)

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> tuple[Vote, ...]:
        return self._entries

    @property
    def known_image_ids(self) -> frozenset[str]:
        return self._known

    def votes_for(self, image_id: str) -> dict[str, Style]:
        if image_id not in self._known:
            raise KeyError(f"unknown image id {image_id!r}")
        return dict(self._by_image.get(image_id, {}))

    def counts_for(self, image_id: str) -> tuple[int, int, int, int]:
        if image_id not in self._known:
            raise KeyError(f"unknown image id {image_id!r}")
        return self._counts.get(image_id, (0, 0, 0, 0))


class MajorityStyle(NamedTuple):
    style: Style
    tied: bool


def vote_counts(image_id: str, votes: VoteTable) -> tuple[int, int, int, int]:
    """Per-style vote counts for one image, in style-code order."""
    return votes.counts_for(image_id)


def majority_style(image_id: str, votes: VoteTable) -> MajorityStyle:
    """Style with the most votes; ties resolve to the lowest style code and are flagged."""
    counts = vote_counts(image_id, votes)
    total = sum(counts)
    if total == 0:
        raise NoVotesError(f"image {image_id!r} has no votes")
    best = max(counts)
    return MajorityStyle(Style(counts.index(best)), counts.count(best) > 1)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of dataset validation: errors block loading, warnings do not."""

    errors: tuple[str, ...]
    warnings: tuple[str, ...]
    product_count: int
    image_count: int
    vote_count: int
    group_counts: dict[str, int]
    style_counts: dict[str, int]

    @property
    def ok(self) -> bool:
        return not self.errors


_PRODUCT_KEYS = frozenset({"sku", "group", "name"})
_IMAGE_KEYS = frozenset({"image_id", "skus", "features"})
_VOTE_KEYS = frozenset({"image_id", "expert_id", "style"})

# error kinds, in the priority used to pick the exception type
_KIND_PARSE = "parse"
_KIND_DANGLING = "dangling"
_KIND_DIMENSION = "dimension"
_KIND_DUPLICATE_VOTE = "duplicate-vote"
_KIND_OTHER = "other"

_KIND_EXCEPTIONS = {
    _KIND_PARSE: ParseError,
    _KIND_DANGLING: DanglingReferenceError,
    _KIND_DIMENSION: DimensionMismatchError,
    _KIND_DUPLICATE_VOTE: DuplicateVoteError,
    _KIND_OTHER: CatalogError,
}


class _Issues:
    def __init__(self) -> None:
        self.errors: list[tuple[str, str]] = []  # (kind, message)
        self.warnings: list[str] = []

    def error(self, kind: str, message: str) -> None:
        self.errors.append((kind, message))

    def warn(self, message: str) -> None:
        self.warnings.append(message)


def _iter_jsonl(path: str, issues: _Issues) -> Iterator[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                issues.error(_KIND_PARSE, f"{path}:{lineno}: invalid JSON ({exc.msg})")
                continue
            if not isinstance(obj, dict):
                issues.error(_KIND_PARSE, f"{path}:{lineno}: expected a JSON object")
                continue
            yield lineno, obj


def _check_keys(path: str, lineno: int, obj: dict, known: frozenset[str], issues: _Issues) -> None:
    for key in obj:
        if key not in known:
            issues.warn(f"{path}:{lineno}: ignoring unknown key {key!r}")


def _read_products(path: str, issues: _Issues) -> list[Product]:
    out: list[Product] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path, issues):
        _check_keys(path, lineno, obj, _PRODUCT_KEYS, issues)
        sku = obj.get("sku")
        group = obj.get("group")
        name = obj.get("name")
        if not isinstance(sku, str) or not sku:
            issues.error(_KIND_PARSE, f"{path}:{lineno}: 'sku' must be a non-empty string")
            continue
        if not isinstance(group, str) or not group:
            issues.error(_KIND_PARSE, f"{path}:{lineno}: 'group' must be a non-empty string")
            continue
        if name is not None and not isinstance(name, str):
            issues.error(_KIND_PARSE, f"{path}:{lineno}: 'name' must be a string")
            continue
        if sku in seen:
            issues.error(_KIND_OTHER, f"{path}:{lineno}: duplicate sku {sku!r}")
            continue
        seen.add(sku)
        out.append(Product(sku=sku, group=group, display_name=name))
    return out


def _read_images(path: str, issues: _Issues) -> list[ImageRecord]:
    out: list[ImageRecord] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path, issues):
        _check_keys(path, lineno, obj, _IMAGE_KEYS, issues)
        image_id = obj.get("image_id")
        skus = obj.get("skus")
        features = obj.get("features")
        if not isinstance(image_id, str) or not image_id:
            issues.error(_KIND_PARSE, f"{path}:{lineno}: 'image_id' must be a non-empty string")
            continue
        if (
            not isinstance(skus, list)
            or not skus
            or not all(isinstance(s, str) and s for s in skus)
        ):
            issues.error(
                _KIND_PARSE, f"{path}:{lineno}: 'skus' must be a non-empty list of strings"
            )
            continue
        if (
            not isinstance(features, list)
            or not features
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in features)
        ):
            issues.error(
                _KIND_PARSE, f"{path}:{lineno}: 'features' must be a non-empty list of numbers"
            )
            continue
        if image_id in seen:
            issues.error(_KIND_OTHER, f"{path}:{lineno}: duplicate image id {image_id!r}")
            continue
        seen.add(image_id)
        arr = np.asarray(features, dtype=np.float64)
        arr.setflags(write=False)
        out.append(ImageRecord(image_id=image_id, skus=tuple(skus), features=arr))
    return out


def _read_votes(path: str, issues: _Issues) -> list[Vote]:
    out: list[Vote] = []
    for lineno, obj in _iter_jsonl(path, issues):
        _check_keys(path, lineno, obj, _VOTE_KEYS, issues)
        image_id = obj.get("image_id")
        expert_id = obj.get("expert_id")
        style_name = obj.get("style")
        if not isinstance(image_id, str) or not image_id:
            issues.error(_KIND_PARSE, f"{path}:{lineno}: 'image_id' must be a non-empty string")
            continue
        if not isinstance(expert_id, str) or not expert_id:
            issues.error(_KIND_PARSE, f"{path}:{lineno}: 'expert_id' must be a non-empty string")
            continue
        if not isinstance(style_name, str):
            issues.error(_KIND_PARSE, f"{path}:{lineno}: 'style' must be a string")
            continue
        try:
            style = Style.from_name(style_name)
        except ValueError as exc:
            issues.error(_KIND_PARSE, f"{path}:{lineno}: {exc}")
            continue
        out.append(Vote(image_id=image_id, expert_id=expert_id, style=style))
    return out


def _cross_validate(
    products: list[Product],
    images: list[ImageRecord],
    votes: list[Vote],
    issues: _Issues,
) -> None:
    known_skus = {p.sku for p in products}
    known_images = {rec.image_id for rec in images}

    dangling_skus = sorted(
        {s for rec in images for s in rec.skus if s not in known_skus}
    )
    if dangling_skus:
        issues.error(
            _KIND_DANGLING,
            "images reference unknown skus: " + ", ".join(dangling_skus),
        )

    dims = {int(rec.features.size) for rec in images}
    if len(dims) > 1:
        issues.error(
            _KIND_DIMENSION,
            "inconsistent feature dimensions across images: " + ", ".join(map(str, sorted(dims))),
        )
    for rec in images:
        if not np.all(np.isfinite(rec.features)):
            issues.error(_KIND_OTHER, f"image {rec.image_id!r} has non-finite feature components")

    dangling_votes = sorted({v.image_id for v in votes if v.image_id not in known_images})
    if dangling_votes:
        issues.error(
            _KIND_DANGLING,
            "votes reference unknown image ids: " + ", ".join(dangling_votes),
        )

    seen_votes: set[tuple[str, str]] = set()
    for v in votes:
        key = (v.image_id, v.expert_id)
        if key in seen_votes:
            issues.error(
                _KIND_DUPLICATE_VOTE,
                f"duplicate vote by expert {v.expert_id!r} on image {v.image_id!r}",
            )
        seen_votes.add(key)


def _build_report(
    products: list[Product], images: list[ImageRecord], votes: list[Vote], issues: _Issues
) -> ValidationReport:
    group_counts: dict[str, int] = {}
    for p in products:
        group_counts[p.group] = group_counts.get(p.group, 0) + 1
    style_counts = {name: 0 for name in STYLE_NAMES}
    for v in votes:
        style_counts[v.style.label] += 1
    return ValidationReport(
        errors=tuple(msg for _, msg in issues.errors),
        warnings=tuple(issues.warnings),
        product_count=len(products),
        image_count=len(images),
        vote_count=len(votes),
        group_counts=dict(sorted(group_counts.items())),
        style_counts=style_counts,
    )


def _load(
    products_path: str, images_path: str, votes_path: str
) -> tuple[ValidationReport, list[Product], list[ImageRecord], list[Vote], _Issues]:
    issues = _Issues()
    products = _read_products(products_path, issues)
    images = _read_images(images_path, issues)
    votes = _read_votes(votes_path, issues)
    _cross_validate(products, images, votes, issues)
    report = _build_report(products, images, votes, issues)
    for message in issues.warnings:
        log.warning("%s", message)
    return report, products, images, votes, issues


def validate_files(products_path: str, images_path: str, votes_path: str) -> ValidationReport:
    """Validate the three dataset files without raising; all problems end up in the report."""
    report, _, _, _, _ = _load(products_path, images_path, votes_path)
    return report


def load_catalog(
    products_path: str, images_path: str, votes_path: str
) -> tuple[ProductCatalog, ImageSet, VoteTable]:
    """Load and cross-link the dataset, raising on any validation error.

    The returned objects are immutable and preserve file order.
    """
    report, products, images, votes, issues = _load(products_path, images_path, votes_path)
    if issues.errors:
        first_kind = issues.errors[0][0]
        exc_type = _KIND_EXCEPTIONS.get(first_kind, CatalogError)
        raise exc_type("; ".join(report.errors))
    catalog = ProductCatalog(products)
    image_set = ImageSet(images)
    vote_table = VoteTable(votes, image_ids=image_set.ids)
    return catalog, image_set, vote_table
