import os

import numpy as np
import pytest

import canids

DATA = os.environ.get("CANIDS_TEST_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))


def test_parse_fixture():
    log = canids.read_log(os.path.join(DATA, "rawcan_sample.csv"))
    assert len(log) == 5
    assert log.ids[0] == 0x316
    assert log.injected == [False, False, False, True, False]


def test_candump_text():
    log = canids.parse_candump("(0.023000) can0 130#11223344\n")
    assert log.ids == [0x130]
    assert log.timestamps == [pytest.approx(0.023)]


def test_bad_record_raises():
    with pytest.raises(ValueError, match="payload arity mismatch at line 1"):
        canids.parse_csv("0.1,0316,8,05,R\n")


def test_pagerank_and_features():
    scores = canids.pagerank([1, 2, 3, 4, 1])
    assert all(s == pytest.approx(0.25) for s in scores.values())
    two = canids.pagerank([1, 2])
    assert two[1] == pytest.approx(1 / 3)
    assert two[2] == pytest.approx(2 / 3)
    f = canids.graph_features([1, 2, 1, 2])
    assert f["nodes"] == 2 and f["edges"] == 2
    assert f["median_pagerank"] == pytest.approx(0.5)


def test_pipeline_matches_between_fit_and_evaluate():
    log = canids.synth(attack="dos", seed=7)
    m = canids.featurize(log, window_ms=23)
    assert m.names == canids.FEATURE_NAMES
    assert m.values.shape == (len(m), 9)
    report = canids.evaluate(m, model="ggnb", seed=7)
    assert report["accuracy"] >= 0.99
    assert report["tp"] + report["fp"] + report["tn"] + report["fn"] == report["test_rows"]

    model = canids.fit(m, "ggnb")
    restored = canids.Model.from_string(model.to_string())
    labels, posterior = restored.predict_all(m)
    assert labels == model.predict_all(m)[0]
    assert len(posterior) == len(m)


def test_matrix_from_numpy():
    rng = np.random.default_rng(0)
    x = np.vstack([rng.normal(0, 1, (50, 2)), rng.normal(5, 1, (50, 2))])
    y = [0] * 50 + [1] * 50
    m = canids.FeatureMatrix(x, y, ["a", "b"])
    model = canids.fit(m)
    assert model.predict([5.0, 5.0])["label"] == 1
    assert model.predict([0.0, 0.0])["label"] == 0
    names, corr = canids.correlation(m)
    assert names[-1] == "label"
    assert corr[0, 0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        canids.FeatureMatrix(x, y[:-1])


def test_synth_is_deterministic():
    a = canids.synth(attack="replay", seed=3).to_csv()
    b = canids.synth(attack="replay", seed=3).to_csv()
    assert a == b
    with pytest.raises(ValueError):
        canids.synth(attack="teleport")
