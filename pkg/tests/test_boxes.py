import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainedbell.boxes import (
    BipartiteBox,
    BoxFormatError,
    BoxShapeError,
    ScenarioSpec,
    SignallingError,
    alice_marginals,
    dumps_box,
    load_box,
    loads_box,
    marginal_alice,
    marginal_bob,
    no_signalling_violation,
    save_box,
    uniform_box,
    validate_box,
)
from chainedbell.lhv import DeterministicStrategy, random_strategy, strategy_box
from chainedbell.quantum import quantum_box


@pytest.mark.parametrize("d, n", [(1, 2), (2, 1), (0, 0), (-3, 4)])
def test_scenario_rejects_small(d, n):
    with pytest.raises(ValueError):
        ScenarioSpec(d, n)


def test_scenario_rejects_non_integer():
    with pytest.raises(TypeError):
        ScenarioSpec(2.5, 2)


def test_box_shape_mismatch():
    with pytest.raises(BoxShapeError):
        BipartiteBox(ScenarioSpec(2, 2), np.zeros((2, 2, 3, 3)))


def test_box_table_is_read_only():
    box = uniform_box(ScenarioSpec(2, 2))
    with pytest.raises(ValueError):
        box.table[0, 0, 0, 0] = 1.0


def test_uniform_box_entries():
    box = uniform_box(ScenarioSpec(2, 2))
    assert box.table.size == 16
    assert np.all(box.table == 0.25)
    box3 = uniform_box(ScenarioSpec(3, 2))
    assert np.all(box3.table == 1 / 9)


def test_uniform_box_valid_and_non_signalling():
    for d, n in [(2, 2), (3, 2), (4, 5)]:
        box = uniform_box(ScenarioSpec(d, n))
        assert validate_box(box).ok
        ns = no_signalling_violation(box)
        assert ns.max_alice_deviation == 0.0
        assert ns.max_bob_deviation == 0.0


def test_range_violation_reported_at_index():
    t = uniform_box(ScenarioSpec(2, 2)).table.copy()
    t[1, 0, 1, 0] = 1.5
    result = validate_box(BipartiteBox(ScenarioSpec(2, 2), t))
    assert not result.ok
    ranges = [v for v in result.violations if v.kind == "range"]
    assert len(ranges) == 1
    assert ranges[0].index == (2, 1, 1, 0)
    assert ranges[0].magnitude == pytest.approx(0.5)
    # the same block is then also mis-normalized
    norms = [v for v in result.violations if v.kind == "normalization"]
    assert [v.index for v in norms] == [(2, 1)]
    assert norms[0].value == pytest.approx(2.25)


def test_negative_entry_reported():
    t = uniform_box(ScenarioSpec(2, 2)).table.copy()
    t[0, 0, 0, 0] = -0.25
    t[0, 0, 0, 1] = 0.75
    result = validate_box(BipartiteBox(ScenarioSpec(2, 2), t))
    assert [v.kind for v in result.violations] == ["range"]
    assert result.violations[0].magnitude == pytest.approx(0.25)


def test_quantum_box_validates():
    assert validate_box(quantum_box(2, 2)).ok


def _signalling_box():
    s = ScenarioSpec(2, 2)
    t = uniform_box(s).table.copy()
    t[0, 0] = [[1, 0], [0, 0]]  # P(0,0|1,1) = 1
    t[0, 1] = [[0, 0], [1, 0]]  # P(1,0|1,2) = 1
    return BipartiteBox(s, t)


def test_maximal_signalling_example():
    ns = no_signalling_violation(_signalling_box())
    assert ns.max_alice_deviation == 1.0
    # Alice's setting 1, outcome 0, compared across Bob settings 2 and 1
    assert ns.alice_worst == (1, 0, 2, 1)
    assert ns.worst_indices[0] == "alice"
    assert 0.0 <= ns.max_bob_deviation <= 1.0


def test_quantum_box_non_signalling():
    ns = no_signalling_violation(quantum_box(3, 3))
    assert ns.max_alice_deviation <= 1e-12
    assert ns.max_bob_deviation <= 1e-12


def test_marginals_uniform_box():
    box = uniform_box(ScenarioSpec(3, 4))
    for k in range(1, 5):
        for a in range(3):
            assert marginal_alice(box, k, a) == pytest.approx(1 / 3, abs=1e-15)


def test_marginals_quantum_box():
    box = quantum_box(2, 2)
    for k in (1, 2):
        for a in (0, 1):
            assert abs(marginal_alice(box, k, a) - 0.5) <= 1e-12
            assert abs(marginal_bob(box, k, a) - 0.5) <= 1e-12


def test_marginal_deterministic():
    s = ScenarioSpec(3, 2)
    box = strategy_box(DeterministicStrategy.constant(2, 0), s)
    assert marginal_alice(box, 1, 0) == 1.0
    assert marginal_alice(box, 1, 1) == 0.0


def test_marginal_on_signalling_box_names_indices():
    with pytest.raises(SignallingError, match=r"P\(A_1=0\).*l=2.*l=1"):
        marginal_alice(_signalling_box(), 1, 0)


def test_marginal_index_checks():
    box = uniform_box(ScenarioSpec(2, 2))
    with pytest.raises(IndexError):
        marginal_alice(box, 0, 0)
    with pytest.raises(IndexError):
        marginal_alice(box, 1, 2)


def _random_ns_box(seed, d, n):
    rng = np.random.default_rng(seed)
    s = ScenarioSpec(d, n)
    w = rng.dirichlet(np.ones(3))
    t = sum(wi * strategy_box(random_strategy(s, rng), s).table for wi in w)
    return BipartiteBox(s, t)


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    d=st.integers(2, 4),
    n=st.integers(2, 4),
    p=st.floats(0, 1),
)
def test_mixture_of_ns_boxes_is_valid_ns(seed, d, n, p):
    x = _random_ns_box(seed, d, n)
    y = _random_ns_box(seed + 1, d, n)
    mixed = x.mix(y, p)
    assert validate_box(mixed).ok
    assert no_signalling_violation(mixed).is_non_signalling()
    marg = alice_marginals(mixed)
    np.testing.assert_allclose(marg.sum(axis=1), 1.0, atol=1e-9)


def test_box_file_round_trip(tmp_path):
    box = quantum_box(3, 4)
    path = tmp_path / "box.json"
    save_box(box, path)
    back = load_box(path)
    assert back == box  # bit-exact
    doc = json.loads(path.read_text())
    assert doc["d"] == 3 and doc["N"] == 4
    assert len(doc["P"]) == 4 and len(doc["P"][0][0]) == 3


def test_box_file_layout_index_order():
    s = ScenarioSpec(2, 3)
    t = np.zeros(s.shape)
    t[:, :, 0, 0] = 1.0
    t[2, 1] = [[0, 0], [0.25, 0.75]]
    doc = json.loads(dumps_box(BipartiteBox(s, t)))
    assert doc["P"][2][1][1] == [0.25, 0.75]


@pytest.mark.parametrize(
    "text, match",
    [
        ('{"d": 2, "N": 2,\n "P": [}', r"line 2"),
        ('{"d": 2, "P": []}', r"missing field 'N'"),
        ('{"d": "2", "N": 2, "P": []}', r"'d' must be an integer"),
        ('{"d": 2, "N": 2, "P": [[], []]}', r"P\[0\] must be a list of length 2"),
        ('{"d": 1, "N": 2, "P": []}', r"invalid scenario"),
        ("[1, 2]", r"top level"),
    ],
)
def test_box_file_parse_errors(text, match):
    with pytest.raises(BoxFormatError, match=match):
        loads_box(text)


def test_box_file_non_number_entry():
    doc = json.loads(dumps_box(uniform_box(ScenarioSpec(2, 2))))
    doc["P"][1][0][1][0] = "x"
    with pytest.raises(BoxFormatError, match=r"P\[1\]\[0\]\[1\]\[0\]"):
        loads_box(json.dumps(doc))
