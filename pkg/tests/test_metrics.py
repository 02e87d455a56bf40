import json
import math

import numpy as np
import pytest

from scarforge import circuits, metrics as mt, qsim, refstates as rs, xiprep


def test_bhattacharyya_basic():
    p = mt.Distribution({0: 0.25, 1: 0.75})
    assert mt.bhattacharyya(p, p) == 0.0
    assert mt.bhattacharyya(mt.Distribution({0: 1.0}), mt.Distribution({1: 1.0})) == math.inf
    q = mt.Distribution({0: 0.6, 1: 0.4})
    assert mt.bhattacharyya(p, q) == pytest.approx(mt.bhattacharyya(q, p), abs=1e-14)
    assert mt.bhattacharyya(p, q) > 0


def test_bhattacharyya_sampled_xi_block():
    exact = mt.distribution_from_state(refstates_xi6())
    assert len(exact.probs) == 21
    counts = qsim.sample(refstates_xi6(), 100_000, seed=3)
    assert mt.bhattacharyya(exact, mt.distribution_from_counts(counts, 100_000)) < 0.02


def refstates_xi6():
    return circuits.simulate(xiprep.build_linear_circuit(6, 1.0, tilde=True))


def test_fidelity():
    v = rs.xi_state(6, 0.5)
    assert mt.fidelity(v, v) == pytest.approx(1)
    assert mt.fidelity(qsim.basis_state("0"), qsim.basis_state("1")) == 0
    w = qsim.Statevector(6, np.exp(0.7j) * np.asarray(v.amplitudes))
    assert mt.fidelity(v, w) == pytest.approx(1)
    with pytest.raises(ValueError):
        mt.fidelity(v, qsim.zero_state(3))


def test_counts():
    d = mt.distribution_from_counts({0: 50, 1: 50}, 100)
    assert d.probs == {0: 0.5, 1: 0.5}
    assert mt.distribution_from_counts({0: 100}, 100).probs == {0: 1.0}
    with pytest.raises(ValueError):
        mt.distribution_from_counts({0: 10}, 100)
    with pytest.raises(ValueError):
        mt.Distribution({0: -0.1})


def test_json_sentinel(tmp_path):
    doc = mt.jsonable({"d": math.inf, "x": np.float64(0.5), "a": np.arange(2), "c": 1 + 2j})
    text = json.dumps(doc, allow_nan=False)
    assert json.loads(text)["d"] == {"$float": "inf"}
    p = tmp_path / "c.csv"
    mt.write_csv(p, ["a", "b"], [(1, 0.1)])
    assert p.read_text().splitlines() == ["a,b", "1,0.1"]
