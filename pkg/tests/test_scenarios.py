from fractions import Fraction

import pytest

from majoranahv.core import Braid, Direction, JointMeasure, MeasurePair, PairSpec, Parity, parse_scenario, render_scenario
from majoranahv.evaluate import enumerate_exact
from majoranahv.hv2 import CALIBRATED, CalibrationConvention, Mover
from majoranahv.scenarios import (
    CalibrationError,
    calibrate,
    calibration_table,
    catalog,
    get_builtin,
    random_scenario,
)

E, O = Parity.EVEN, Parity.ODD


def test_successive_n2_shape():
    sc = get_builtin("successive-braiding-n2").scenario
    assert sc.box_count == 4
    assert sc.steps[1:] == (Braid(2, 3, Direction.CCW), Braid(2, 3, Direction.CCW), MeasurePair(PairSpec(3, 4)))


def test_interference_shape():
    b = get_builtin("interference-6box")
    assert b.scenario.box_count == 6
    assert b.scenario.steps[1:] == (JointMeasure(PairSpec(2, 3), PairSpec(4, 5)), MeasurePair(PairSpec(2, 5)))
    assert b.postselect == "e"


def test_unknown_and_reserved():
    with pytest.raises(KeyError):
        get_builtin("nope")
    with pytest.raises(NotImplementedError):
        get_builtin("cnot")


@pytest.mark.parametrize("name", list(catalog()))
def test_builtin_expectations(name):
    b = get_builtin(name)
    assert b.expectations
    for exp in b.expectations:
        for engine in exp.engines:
            assert exp.check(engine, enumerate_exact(engine, b.scenario)) <= 1e-9, (name, engine)


@pytest.mark.parametrize("name", list(catalog()))
def test_builtin_files_round_trip(name):
    sc = get_builtin(name).scenario
    assert parse_scenario(render_scenario(sc)) == sc


def test_random_scenario_contract():
    init_only = random_scenario(4, 0, False, seed=3)
    assert len(init_only.steps) == 1
    for seed in range(200):
        sc = random_scenario(6, 10, False, seed)
        assert not any(isinstance(s, JointMeasure) for s in sc.steps)
        assert len(sc.steps) <= 11
    assert any(isinstance(s, JointMeasure) for seed in range(50) for s in random_scenario(8, 10, True, seed).steps)
    with pytest.raises(ValueError):
        random_scenario(5, 3)


@pytest.mark.parametrize("oracle", ["stab", "quantum"])
def test_calibration_is_unique(oracle):
    result = calibrate(oracle)
    assert result.convention == CALIBRATED
    failing = [r for r in result.table if not r["match"]]
    assert failing and all(r["ccw_front"] == Mover.LEFTWARD.value for r in failing)


def test_calibration_knot_outcome():
    # under the chosen convention P23 P23 reads odd-odd
    d = enumerate_exact("hv2", get_builtin("knot-p23p23").scenario)
    assert d.entries == {(O, O): Fraction(1)}


def test_calibration_rejects_bad_oracle():
    with pytest.raises(ValueError):
        calibration_table("hv1")


def test_calibration_error_carries_table():
    err = CalibrationError("x", [{"a": 1}])
    assert err.table == [{"a": 1}]
    assert CalibrationConvention(Mover.LEFTWARD).cw_front is Mover.RIGHTWARD
