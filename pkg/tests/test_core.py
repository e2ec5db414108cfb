from fractions import Fraction

import pytest

from majoranahv.core import (
    Arithmetic,
    Braid,
    Direction,
    Distribution,
    Init,
    MeasurePair,
    PairSpec,
    Parity,
    Scenario,
    ScenarioError,
    distributions_equal,
    parse_scenario,
    render_scenario,
    snap,
    tv_distance,
    xor_all,
)

from conftest import scenario

E, O = Parity.EVEN, Parity.ODD


def exact(d):
    return Distribution({k: Fraction(v) for k, v in d.items()}, Arithmetic.EXACT)


def test_parity_xor_algebra():
    assert E ^ E is E and E ^ O is O and O ^ O is E
    assert xor_all([O, O, O]) is O
    assert Parity.parse("e") is E and Parity.parse("Odd") is O


def test_pair_normalizes_and_rejects_equal_boxes():
    assert PairSpec(3, 1) == PairSpec(1, 3)
    with pytest.raises(ValueError):
        PairSpec(2, 2)


def test_parse_measure():
    sc = scenario("boxes 4 / init (1,2)=even (3,4)=even / measure 1 2")
    assert sc.box_count == 4
    assert sc.steps == (
        Init(((PairSpec(1, 2), E), (PairSpec(3, 4), E))),
        MeasurePair(PairSpec(1, 2)),
    )


def test_parse_braid():
    sc = scenario("boxes 4 / init (1,2)=even (3,4)=even / braid 2 3 ccw")
    assert sc.steps[1] == Braid(2, 3, Direction.CCW)


def test_parse_rejects_partial_matching():
    with pytest.raises(ScenarioError, match="matching"):
        scenario("boxes 4 / init (1,2)=even / measure 1 2")


@pytest.mark.parametrize(
    "text, line",
    [
        ("boxes 4 / init (1,2)=even (3,4)=even / braid 1 3 ccw", None),
        ("boxes 4 / init (1,2)=even (3,4)=even / measure 1 5", None),
        ("boxes 4 / init (1,2)=even (3,4)=even / frobnicate 1 2", 3),
        ("boxes 4 / init (1,2)=maybe (3,4)=even", 2),
        ("boxes 4 / measure 1 2", None),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(ScenarioError) as info:
        scenario(text)
    if line is not None:
        assert info.value.line == line


def test_joint_needs_four_boxes():
    with pytest.raises(ScenarioError):
        scenario("boxes 4 / init (1,2)=even (3,4)=even / joint (1,2) (2,3)")


def test_comments_and_render_round_trip():
    text = "# demo\nname demo\nboxes 4\ninit (1,2)=odd (3,4)=even  # trailing\nbraid 2 3 cw\njoint (1,2) (3,4)\n"
    sc = parse_scenario(text)
    assert sc.name == "demo"
    assert parse_scenario(render_scenario(sc)) == sc


def test_scenario_rejects_double_init():
    init = Init(((PairSpec(1, 2), E), (PairSpec(3, 4), E)))
    with pytest.raises(ScenarioError):
        Scenario(4, (init, init))


def test_tv_identical_and_disjoint():
    p = exact({"e": Fraction(1, 2), "o": Fraction(1, 2)})
    assert tv_distance(p, p) == 0
    assert tv_distance(exact({"e": 1}), exact({"o": 1})) == 1


def test_tv_half():
    assert tv_distance(exact({"e": 1}), exact({"e": Fraction(1, 2), "o": Fraction(1, 2)})) == 0.5


def test_tv_length_mismatch():
    with pytest.raises(ValueError):
        tv_distance(exact({"e": 1}), exact({"ee": 1}))


def test_distributions_equal_examples():
    fusion = {"ee": Fraction(1, 2), "oo": Fraction(1, 2)}
    assert distributions_equal(exact(fusion), exact(fusion), 0)
    q = Distribution({(E,): 0.5000000001, (O,): 0.4999999999}, Arithmetic.FLOAT)
    assert distributions_equal(q, exact({"e": Fraction(1, 2), "o": Fraction(1, 2)}), 1e-6)
    definite = Distribution({(E,): 1.0}, Arithmetic.FLOAT)
    assert not distributions_equal(definite, exact({"e": Fraction(1, 2), "o": Fraction(1, 2)}), 0.49)


def test_distribution_validation():
    with pytest.raises(ValueError):
        exact({"e": Fraction(1, 3), "o": Fraction(2, 3)})
    with pytest.raises(ValueError):
        exact({"e": Fraction(1, 2)})
    with pytest.raises(ValueError):
        exact({"e": Fraction(1, 2), "oo": Fraction(1, 2)})


def test_condition_and_marginal():
    d = exact({"ee": Fraction(1, 4), "eo": Fraction(1, 4), "oo": Fraction(1, 2)})
    c = d.condition("e")
    assert c[(E, E)] == Fraction(1, 2)
    assert d.marginal(0) == {E: Fraction(1, 2), O: Fraction(1, 2)}
    with pytest.raises(ValueError):
        exact({"ee": 1}).condition("o")


def test_json_round_trip():
    d = exact({"ee": Fraction(1, 4), "eo": Fraction(3, 4)})
    assert Distribution.from_json(d.to_json()) == d


def test_snap():
    assert snap(0.5000000000001) == Fraction(1, 2)
    assert snap(0.3) == 0.3
