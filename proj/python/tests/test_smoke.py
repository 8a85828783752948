"""End-to-end smoke of the python surface: every exported name gets exercised
once against small in-memory or tmp-path fixtures."""

import csv
import math
import os

import pytest

import cropweed as cw


def make_taxonomy():
    tax = cw.Taxonomy()
    tax.add("crop_a", "crop")
    tax.add("crop_b", "crop")
    tax.add("weed_x", "weed")
    tax.add("weed_y", "weed")
    return tax


def test_taxonomy_shape():
    tax = make_taxonomy()
    assert tax.size == 4
    assert tax.unknown_index == 4
    assert tax.crops == ["crop_a", "crop_b"]
    assert tax.weeds == ["weed_x", "weed_y"]
    assert tax.index_of("weed_x") == 2
    assert tax.name_of(4) == "unknown"
    assert tax.is_crop(0) and not tax.is_crop(2)


def test_contain_example():
    assert cw.contain([0, 2], [1, 0, 2, 1]) == [0, 1, 1, 0]


def test_metrics_worked_example():
    tax = make_taxonomy()
    y = [2, 2, 2, 2, 3, 3, 3, 0, 0, 1]
    yhat = [2, 2, 2, 2, 3, 3, 2, 0, 2, 1]
    assert cw.accuracy(y, yhat) == 0.8
    report = cw.evaluate(y, yhat, tax)
    assert abs(report["recall_crop"] - 2.0 / 3.0) <= 1e-12
    assert report["dangerous"] == 1 and report["minor"] == 1
    assert report["confusion_labels"][-1] == "unknown"
    assert cw.error_category(0, 2, tax) == "dangerous"
    assert cw.error_category(2, 4, tax) == "moderate"
    assert cw.nmw_indicator([0], [2], tax) == [0]
    assert cw.nmw_indicator([2], [0], tax) == [1]
    assert cw.nmw_indicator([2], [0], tax, strictness="symmetric") == [0]


def test_genotype_space_and_budget():
    assert len(cw.enumerate_genotypes("vanilla")) == 774
    assert len(cw.enumerate_genotypes("conv")) == 84
    assert len(cw.enumerate_genotypes("dilated")) == 584
    assert cw.param_count("conv:c8,c16", 5) == 24781
    assert cw.param_count("vanilla:k3c8:h32", head_classes=5, input_side=32) == 65957


def test_ensemble_rules():
    tax = make_taxonomy()
    votes = [[0, 2, 2], [0, 2, 3], [0, 2, 4]]  # three models, three objects
    decisions = cw.ensemble_run(votes, tax, {"crop_a": 5, "crop_b": 5})
    assert [d["rule_fired"] for d in decisions] == [1, 1, 3]
    assert decisions[0]["cate"] == "crop_a" and decisions[0]["act"] == "cultivate"
    assert decisions[1]["type"] == "weed" and decisions[1]["act"] == "remove"
    assert decisions[2]["type"] == "unknown" and decisions[2]["act"] == "review"
    with pytest.raises(Exception):
        cw.ensemble_run(votes, tax, {"not_a_category": 1})


def test_pipeline_on_generated_plants(tmp_path):
    plants = tmp_path / "plants"
    n = cw.gen_plants(str(plants), per_category=6, seed=3, side=32)
    assert n == 24

    manifest = str(plants / "manifest.csv")
    counts = cw.class_counts(manifest)
    assert set(counts) == {"crop_disk", "crop_triangle", "weed_cross", "weed_ring"}
    assert all(c == 6 for c in counts.values())

    # two equal weed classes: k = 0.7 * (1/2) + 0.3 / 2 = 0.5 each
    rates = cw.sample_rates(manifest)
    assert set(rates) == {"weed_cross", "weed_ring"}
    assert all(r == pytest.approx(0.5, abs=1e-12) for r in rates.values())

    with open(manifest, newline="") as fh:
        first = next(csv.DictReader(fh))
    image = os.path.join(str(plants), first["path"])
    segments = cw.segment_image(image)
    assert len(segments) >= 1
    assert all(s["area_fraction"] > 0 for s in segments)

    weights = str(tmp_path / "m.cwnn")
    result = cw.train(manifest, manifest, "vanilla:k3c8:h32", objective="cce",
                      epochs=2, batch_size=8, input_side=32, seed=5,
                      weights_out=weights)
    assert len(result["history"]) == 2
    assert 0.0 <= result["final_accuracy"] <= 1.0
    assert os.path.exists(weights)

    preds = cw.predict(weights, manifest)
    assert len(preds) == 24
    assert all(0 <= p <= 3 for p in preds)  # cce head has no unknown slot
