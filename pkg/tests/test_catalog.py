"""Catalog loading, vote counting, and validation."""

from __future__ import annotations

import json

import numpy as np
import pytest

import stylesim as ss
from stylesim.catalog import _Issues, _read_products

from conftest import make_votes


class TestStyle:
    def test_codes_are_stable(self):
        assert [int(s) for s in ss.Style] == [0, 1, 2, 3]
        assert ss.STYLE_NAMES == ("modern", "traditional", "cottage", "coastal")

    def test_from_name(self):
        assert ss.Style.from_name("modern") is ss.Style.MODERN
        assert ss.Style.from_name("COASTAL") is ss.Style.COASTAL

    def test_from_name_rejects_unknown(self):
        with pytest.raises(ValueError, match="unknown style"):
            ss.Style.from_name("brutalist")

    def test_attributes_cover_every_style(self):
        assert set(ss.STYLE_ATTRIBUTES) == set(ss.Style)
        for attrs in ss.STYLE_ATTRIBUTES.values():
            assert attrs


class TestVoteCounts:
    def test_counts_in_code_order(self):
        votes = make_votes({"img": (3, 1, 0, 2)})
        assert ss.vote_counts("img", votes) == (3, 1, 0, 2)

    def test_zero_votes_for_known_image(self):
        votes = make_votes({"img": (0, 0, 0, 0)})
        assert ss.vote_counts("img", votes) == (0, 0, 0, 0)

    def test_unknown_image_raises(self):
        votes = make_votes({"img": (1, 0, 0, 0)})
        with pytest.raises(KeyError, match="nope"):
            ss.vote_counts("nope", votes)

    def test_duplicate_expert_vote_rejected(self):
        votes = [
            ss.Vote(image_id="img", expert_id="e0", style=ss.Style.MODERN),
            ss.Vote(image_id="img", expert_id="e0", style=ss.Style.COASTAL),
        ]
        with pytest.raises(ss.DuplicateVoteError):
            ss.VoteTable(votes)


class TestMajorityStyle:
    def test_clear_majority(self):
        votes = make_votes({"img": (1, 5, 2, 2)})
        assert ss.majority_style("img", votes) == (ss.Style.TRADITIONAL, False)

    def test_tie_breaks_to_lowest_code_and_is_flagged(self):
        votes = make_votes({"img": (0, 3, 3, 1)})
        result = ss.majority_style("img", votes)
        assert result.style is ss.Style.TRADITIONAL
        assert result.tied

    def test_four_way_tie(self):
        votes = make_votes({"img": (2, 2, 2, 2)})
        assert ss.majority_style("img", votes) == (ss.Style.MODERN, True)

    def test_no_votes_raises(self):
        votes = make_votes({"img": (0, 0, 0, 0)})
        with pytest.raises(ss.NoVotesError):
            ss.majority_style("img", votes)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


@pytest.fixture
def dataset_files(tmp_path):
    products = tmp_path / "products.jsonl"
    images = tmp_path / "images.jsonl"
    votes = tmp_path / "votes.jsonl"
    write_jsonl(
        products,
        [
            {"sku": "A", "group": "Beds", "name": "Bed A"},
            {"sku": "B", "group": "Beds"},
            {"sku": "C", "group": "Sofas", "name": "Sofa C"},
        ],
    )
    write_jsonl(
        images,
        [
            {"image_id": "i1", "skus": ["A"], "features": [0.0, 1.0]},
            {"image_id": "i2", "skus": ["B", "C"], "features": [1.0, 0.0]},
            {"image_id": "i3", "skus": ["C"], "features": [0.5, 0.5]},
        ],
    )
    write_jsonl(
        votes,
        [
            {"image_id": "i1", "expert_id": "e1", "style": "modern"},
            {"image_id": "i1", "expert_id": "e2", "style": "modern"},
            {"image_id": "i2", "expert_id": "e1", "style": "coastal"},
        ],
    )
    return str(products), str(images), str(votes)


class TestLoadCatalog:
    def test_happy_path_preserves_order(self, dataset_files):
        catalog, images, votes = ss.load_catalog(*dataset_files)
        assert catalog.skus == ("A", "B", "C")
        assert images.ids == ("i1", "i2", "i3")
        assert len(votes) == 3
        assert catalog.get("A").display_name == "Bed A"
        assert catalog.get("B").display_name is None
        assert images.get("i2").target_sku == "B"
        assert images.dim == 2

    def test_features_are_readonly(self, dataset_files):
        _, images, _ = ss.load_catalog(*dataset_files)
        with pytest.raises(ValueError):
            images.get("i1").features[0] = 9.9

    def test_vote_universe_is_image_set(self, dataset_files):
        _, _, votes = ss.load_catalog(*dataset_files)
        assert ss.vote_counts("i3", votes) == (0, 0, 0, 0)

    def test_group_counts(self, dataset_files):
        catalog, _, _ = ss.load_catalog(*dataset_files)
        assert catalog.group_counts() == {"Beds": 2, "Sofas": 1}

    def test_parse_error_names_file_and_line(self, dataset_files, tmp_path):
        products, images, votes = dataset_files
        bad = tmp_path / "bad_votes.jsonl"
        bad.write_text('{"image_id": "i1", "expert_id": "e1", "style": "modern"}\nnot json\n')
        with pytest.raises(ss.ParseError, match=r"bad_votes\.jsonl:2"):
            ss.load_catalog(products, images, str(bad))

    def test_dangling_image_sku(self, dataset_files, tmp_path):
        products, _, votes = dataset_files
        bad = tmp_path / "bad_images.jsonl"
        write_jsonl(bad, [{"image_id": "i1", "skus": ["GHOST"], "features": [0.0]}])
        with pytest.raises(ss.DanglingReferenceError, match="GHOST"):
            ss.load_catalog(products, str(bad), votes)

    def test_dangling_vote_image(self, dataset_files, tmp_path):
        products, images, _ = dataset_files
        bad = tmp_path / "bad_votes.jsonl"
        write_jsonl(bad, [{"image_id": "ghost", "expert_id": "e1", "style": "modern"}])
        with pytest.raises(ss.DanglingReferenceError, match="ghost"):
            ss.load_catalog(products, images, str(bad))

    def test_dimension_mismatch(self, dataset_files, tmp_path):
        products, _, votes = dataset_files
        bad = tmp_path / "bad_images.jsonl"
        write_jsonl(
            bad,
            [
                {"image_id": "i1", "skus": ["A"], "features": [0.0, 1.0]},
                {"image_id": "i2", "skus": ["B"], "features": [1.0]},
            ],
        )
        with pytest.raises(ss.DimensionMismatchError):
            ss.load_catalog(products, str(bad), votes)

    def test_duplicate_vote(self, dataset_files, tmp_path):
        products, images, _ = dataset_files
        bad = tmp_path / "bad_votes.jsonl"
        write_jsonl(
            bad,
            [
                {"image_id": "i1", "expert_id": "e1", "style": "modern"},
                {"image_id": "i1", "expert_id": "e1", "style": "coastal"},
            ],
        )
        with pytest.raises(ss.DuplicateVoteError):
            ss.load_catalog(products, images, str(bad))

    def test_duplicate_sku(self, dataset_files, tmp_path):
        _, images, votes = dataset_files
        bad = tmp_path / "bad_products.jsonl"
        write_jsonl(
            bad,
            [
                {"sku": "A", "group": "Beds"},
                {"sku": "A", "group": "Sofas"},
                {"sku": "B", "group": "Beds"},
                {"sku": "C", "group": "Beds"},
            ],
        )
        with pytest.raises(ss.CatalogError, match="duplicate sku"):
            ss.load_catalog(str(bad), images, votes)

    def test_non_finite_features_rejected(self, dataset_files, tmp_path):
        products, _, votes = dataset_files
        bad = tmp_path / "bad_images.jsonl"
        write_jsonl(bad, [{"image_id": "i1", "skus": ["A"], "features": [1.0, float("nan")]}])
        with pytest.raises(ss.CatalogError, match="non-finite"):
            ss.load_catalog(products, str(bad), votes)


class TestValidateFiles:
    def test_clean_dataset(self, dataset_files):
        report = ss.validate_files(*dataset_files)
        assert report.ok
        assert report.product_count == 3
        assert report.image_count == 3
        assert report.vote_count == 3
        assert report.group_counts == {"Beds": 2, "Sofas": 1}
        assert report.style_counts["modern"] == 2
        assert report.style_counts["coastal"] == 1

    def test_unknown_keys_warn_but_pass(self, dataset_files, tmp_path):
        _, images, votes = dataset_files
        odd = tmp_path / "products_extra.jsonl"
        write_jsonl(odd, [{"sku": "A", "group": "Beds", "price": 12}, {"sku": "B", "group": "Beds"}, {"sku": "C", "group": "Sofas"}])
        report = ss.validate_files(str(odd), images, votes)
        assert report.ok
        assert any("price" in w for w in report.warnings)

    def test_collects_multiple_errors(self, dataset_files, tmp_path):
        products, _, _ = dataset_files
        bad_images = tmp_path / "imgs.jsonl"
        write_jsonl(bad_images, [{"image_id": "i1", "skus": ["GHOST"], "features": [1.0]}])
        bad_votes = tmp_path / "vts.jsonl"
        bad_votes.write_text("not json\n")
        report = ss.validate_files(products, str(bad_images), str(bad_votes))
        assert not report.ok
        assert len(report.errors) >= 2

    def test_blank_lines_ignored(self, tmp_path, dataset_files):
        _, images, votes = dataset_files
        products = tmp_path / "p.jsonl"
        products.write_text('{"sku": "A", "group": "Beds"}\n\n{"sku": "B", "group": "Beds"}\n{"sku": "C", "group": "Sofas"}\n')
        report = ss.validate_files(str(products), images, votes)
        assert report.ok
        assert report.product_count == 3


class TestContainers:
    def test_empty_group_rejected(self):
        with pytest.raises(ss.CatalogError, match="empty group"):
            ss.ProductCatalog([ss.Product(sku="A", group="")])

    def test_image_set_empty_dim_undefined(self):
        images = ss.ImageSet([])
        with pytest.raises(ss.CatalogError):
            images.dim

    def test_read_products_helper_flags_missing_fields(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('{"sku": "", "group": "Beds"}\n')
        issues = _Issues()
        _read_products(str(path), issues)
        assert issues.errors
