# Copyright 2026  The wcfa Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

import json
import math
import os
import subprocess

import pytest

import wcfa

TRUTH = json.dumps({"family": "plda", "d": [0.5, 1.0, 2.0],
                    "n_speakers": 30, "scores_per_pair": 4, "seed": 1})


def two_impostor():
    return wcfa.PairScoreTable.from_rows(
        [("A", "X", 0.1), ("A", "X", 0.3), ("A", "Y", 0.5), ("A", "Y", 0.7)])


def test_table_and_estimates():
    t = two_impostor()
    assert t.speakers == ["A", "X", "Y"]
    assert t.pair_count == 2
    assert t.score_count == 4
    assert wcfa.zero_effort_fa(t, 0.2) == 0.75
    assert wcfa.worst_case_fa(t, 2, 0.6, trials=100) == 0.5


def test_errors_surface_as_value_errors():
    t = two_impostor()
    with pytest.raises(wcfa.WcfaError):
        wcfa.worst_case_fa(t, 5, 0.0)
    with pytest.raises(ValueError):
        wcfa.PairScoreTable.from_rows([("A", "X", float("nan"))])


def test_plda_helpers():
    assert math.isclose(wcfa.plda_llr([1.0], [0.0], [0.0]), 0.5 * math.log(4 / 3))
    transform, d = wcfa.simultaneous_diagonalize([[1, 0], [0, 1]], [[2, 0], [0, 3]])
    assert d == pytest.approx([3.0, 2.0])
    assert len(transform) == 2


def test_synthetic_fit_and_extrapolate(tmp_path):
    table = wcfa.generate_synthetic_table(TRUTH)
    assert table.pair_count == 30 * 29
    path = str(tmp_path / "s.csv")
    table.save(path)
    again = wcfa.PairScoreTable.load(path)
    assert again.score_count == table.score_count

    model, losses = wcfa.fit(table, "plda", dim=3, steps=3, trials=50, n_train_max=10)
    assert len(losses) == 3
    assert json.loads(model)["family"] == "plda"
    rows = wcfa.extrapolate(model, [1, 1000], [0.0], trials=100)
    assert [r["n"] for r in rows] == [1, 1000]
    for r in rows:
        assert r["ci_lo"] <= r["p_fa"] <= r["ci_hi"]

    base = wcfa.fit_generative_baseline(table)
    mae = wcfa.validate_mae(base, table, 1, 20, -5.0, 2.0, queries=5, trials=100)
    assert mae >= 0.0

    oracle = wcfa.oracle_curve(TRUTH, [1, 5], [0.0], trials=200)
    assert len(oracle) == 2


def test_curve_and_threshold():
    table = wcfa.generate_synthetic_table(TRUTH)
    rows = wcfa.empirical_curve(table, [1, 10], [-1.0, 0.0], trials=200, seed=3)
    assert len(rows) == 4
    assert rows[1]["p_fa"] <= rows[0]["p_fa"]
    tau = wcfa.min_dcf_threshold([2.0, 3.0], [0.0, 1.0], 1.0, 1.0, 0.5)
    assert 1.0 < tau < 2.0


def test_gradcheck():
    passed, err = wcfa.gradcheck("pwl-ls")
    assert passed and err < 1e-4


@pytest.mark.skipif("WCFA_CLI" not in os.environ, reason="command-line binary not provided")
def test_cli_gradcheck():
    out = subprocess.run([os.environ["WCFA_CLI"], "gradcheck", "--family", "pwl-ls"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("PASS max_rel_err<1e-4")
