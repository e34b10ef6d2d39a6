import json

import numpy as np

from immunoscan.pipeline import detect_snapshot, run_analysis
from immunoscan.synth import generate_panel
from immunoscan.trials import TrialConfig


def small_fixture():
    return generate_panel(entities=4, features=3, years=4, seed=21)


def test_report_is_json_ready_and_complete():
    result = run_analysis(small_fixture(), "SELF", TrialConfig(trials=40, seed=9))
    text = json.dumps(result.report)
    parsed = json.loads(text)
    assert parsed["tool"]["name"] == "immunoscan"
    assert parsed["config"]["self"] == "SELF"
    assert parsed["config"]["seed"] == 9
    assert len(parsed["config"]["panel_digest"]) == 64
    assert set(parsed["rank_tables"]) == {"euclidean", "cosine"}
    assert set(parsed["summaries"]) == {"euclidean", "cosine"}
    assert parsed["baseline"]["ordering"]
    assert "normalization" in parsed["warnings"]
    snapshot = parsed["detectors"]
    assert snapshot["u"] == 0.0
    assert len(snapshot["lower"]) == 3
    assert len(snapshot["accepted"]) == 4


def test_report_counts_match_tables():
    result = run_analysis(small_fixture(), "SELF", TrialConfig(trials=30, seed=2))
    for measure, table in result.tables.items():
        assert result.report["rank_tables"][measure]["counts"] == (
            table.counts.tolist()
        )
        csvs = result.rank_csvs()
        assert csvs[measure].startswith("rank,")


def test_identical_inputs_reproduce_the_report():
    config = TrialConfig(trials=64, seed=33)
    a = run_analysis(small_fixture(), "SELF", config)
    b = run_analysis(small_fixture(), "SELF", config, workers=4)
    assert json.dumps(a.report) == json.dumps(b.report)


def test_accepts_csv_text_input():
    from immunoscan.panel import serialize_panel_csv

    text = serialize_panel_csv(small_fixture())
    result = run_analysis(text, "SELF", TrialConfig(trials=10, seed=1))
    assert result.report["config"]["trials"] == 10


def test_single_measure_run():
    config = TrialConfig(trials=25, seed=4, measures=("euclidean",))
    result = run_analysis(small_fixture(), "SELF", config)
    assert list(result.tables) == ["euclidean"]
    assert list(result.report["rank_tables"]) == ["euclidean"]


def test_detect_snapshot_matrix_consistency():
    snapshot = detect_snapshot(small_fixture(), "SELF", n=0.45)
    accepted = np.array(snapshot["detectors"]["accepted"])
    kept = np.array(snapshot["detectors"]["kept_mask"])
    lower = np.array(snapshot["detectors"]["lower"])
    upper = np.array(snapshot["detectors"]["upper"])
    assert accepted.shape == kept.shape
    # masked cells are exactly zero; kept cells sit outside the interval
    assert np.all(accepted[~kept] == 0.0)
    outside = (accepted[kept] < np.broadcast_to(lower, accepted.shape)[kept]) | (
        accepted[kept] > np.broadcast_to(upper, accepted.shape)[kept]
    )
    assert np.all(outside)


def test_detect_snapshot_interval_formula():
    snapshot = detect_snapshot(small_fixture(), "SELF", n=0.45)
    det = snapshot["detectors"]
    for mu, sd, lo, hi in zip(det["mean"], det["std"], det["lower"], det["upper"]):
        assert lo == mu - 0.45 * sd
        assert hi == mu + 0.45 * sd


def test_detect_snapshot_n_zero_masks_only_exact_mean_cells():
    from immunoscan.normalize import normalize_minmax

    fixture = small_fixture()
    snapshot = detect_snapshot(fixture, "SELF", n=0.0)
    det = snapshot["detectors"]
    kept = np.array(det["kept_mask"])
    mean = np.array(det["mean"])
    # with u = 0 and n = 0 the interval degenerates to the mean point,
    # so exactly the cells equal to their feature mean are masked
    assert np.all(np.array(det["lower"]) == mean)
    assert np.all(np.array(det["upper"]) == mean)
    grid = normalize_minmax(fixture).values[0]
    assert np.array_equal(kept, grid != mean)
