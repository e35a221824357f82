# Copyright (c) 2026, The unimodal authors
# SPDX-License-Identifier: Apache-2.0

import json
import math

import pytest

import unimodal


def test_softmax_and_predictions():
    p = unimodal.softmax([1.0, 2.0, 1.0])
    assert p[1] == pytest.approx(0.576116884765829110, abs=1e-15)
    assert unimodal.predict_argmax([0.1, 0.2, 0.4, 0.3]) == 3
    assert unimodal.predict_expectation([0.2] * 5) == 3


def test_losses():
    assert unimodal.loss("CE", [0.0, 0.0], 1, 2) == pytest.approx(math.log(2.0))
    assert unimodal.loss("ELB", [0.0, 0.0, 0.0], 2, 3, t=1.0) == pytest.approx(math.log(3.0) + 2.0)
    assert unimodal.loss("PN", [2.0, 1.0, 3.0], 2, 3, lam=1.0) == pytest.approx(2.40760596444438030 + 5.62)
    value, grad = unimodal.loss_and_grad("CE", [0.0, 0.0], 1, 2)
    assert grad == pytest.approx([-0.5, 0.5])
    with pytest.raises(ValueError):
        unimodal.loss("XE", [0.0, 0.0], 1, 2)
    with pytest.raises(ValueError):
        unimodal.loss("PO", [-1.0], 1, 4)


def test_metrics():
    assert unimodal.soi([0.1, 0.2, 0.4, 0.3], 3) == 1.0
    assert unimodal.soi([0.3, 0.2, 0.4, 0.1], 3) == pytest.approx(2.0 / 3.0)
    assert unimodal.mae([1, 3], [2, 5]) == 1.5
    p = unimodal.po_distribution(1.0, 2)
    assert p == pytest.approx([2.0 / 3.0, 1.0 / 3.0])


def test_generate_is_deterministic():
    x1, y1 = unimodal.generate(c=4, d=3, n=50)
    x2, y2 = unimodal.generate(c=4, d=3, n=50)
    assert x1 == x2 and y1 == y2
    assert set(y1) <= {1, 2, 3, 4}
    text = unimodal.gen_data_csv(c=4, d=3, n=5)
    assert text.splitlines()[:2] == ["# c=4", "f1,f2,f3,label"]


def test_run_and_report(tmp_path):
    config = {
        "dataset": {"synthetic": {"c": 3, "d": 4, "n": 30}},
        "sweep": [{"loss": "CE"}, {"loss": "ELB"}],
        "trainer": {"epochs": 2, "hidden": [4]},
        "output_dir": str(tmp_path / "run"),
    }
    result = unimodal.run_experiment(json.dumps(config))
    assert result["failed_runs"] == 0
    assert [r["name"] for r in result["records"]] == ["CE", "ELB"]
    table, warnings = unimodal.report(str(tmp_path / "run"))
    assert table == result["table"]
    assert warnings == []
    with pytest.raises(ValueError):
        unimodal.run_experiment(json.dumps({**config, "sweep": [{"loss": "nope"}]}))
