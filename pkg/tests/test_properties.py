"""Randomized invariants across engines."""

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from majoranahv.core import (
    Arithmetic,
    Direction,
    Distribution,
    JointMeasure,
    MeasurePair,
    PairSpec,
    Parity,
    parse_scenario,
    render_scenario,
    tv_distance,
)
from majoranahv.evaluate import ENGINE_NAMES, enumerate_exact, get_engine
from majoranahv.hv2 import hv2_braid, hv2_init, hv2_measure_pair, hv2_standardize
from majoranahv.quantum import QuantumState
from majoranahv.scenarios import random_scenario

box_counts = st.sampled_from([4, 6, 8])
seeds = st.integers(0, 2**32 - 1)


@given(box_counts, st.integers(0, 12), st.booleans(), seeds)
def test_render_parse_round_trip(n, steps, joint, seed):
    sc = random_scenario(n, steps, joint, seed)
    assert parse_scenario(render_scenario(sc)) == sc


def small_distributions(length):
    traces = st.lists(st.tuples(*[st.sampled_from(list(Parity))] * length), min_size=1, max_size=4, unique=True)

    @st.composite
    def build(draw):
        ts = draw(traces)
        k = draw(st.integers(0, 3))
        weights = [Fraction(1, 2**k)] * (2**k)
        # spread 2^k equal atoms over the traces
        entries: dict = {}
        for i, w in enumerate(weights):
            t = ts[i % len(ts)]
            entries[t] = entries.get(t, 0) + w
        return Distribution(entries, Arithmetic.EXACT)

    return build()


@given(small_distributions(2), small_distributions(2), small_distributions(2))
def test_tv_metric(p, q, r):
    assert tv_distance(p, q) == tv_distance(q, p)
    assert 0 <= tv_distance(p, q) <= 1
    assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12
    assert tv_distance(p, p) == 0


def walk(engine, sc, rng):
    """One random trajectory; yields (step, branches, state before)."""
    state = engine.init(sc.init, sc.box_count)
    for step in sc.steps[1:]:
        branches = engine.step(state, step)
        yield step, branches, state
        weights = [float(p) for _, p, _ in branches]
        state = rng.choices(branches, weights)[0][2]


def test_total_parity_conserved_on_random_steps():
    rng = random.Random(0)
    checked = 0
    while checked < 1000:
        sc = random_scenario(rng.choice([4, 6, 8]), 10, True, rng.getrandbits(32))
        for name in ENGINE_NAMES:
            engine = get_engine(name)
            for step, branches, before in walk(engine, sc, rng):
                for _, _, after in branches:
                    assert after.total_parity == before.total_parity, (name, step)
                checked += 1


def test_measurement_idempotence():
    rng = random.Random(1)
    for _ in range(60):
        sc = random_scenario(rng.choice([4, 6, 8]), 8, True, rng.getrandbits(32))
        for name in ENGINE_NAMES:
            engine = get_engine(name)
            for step, branches, _ in walk(engine, sc, rng):
                if isinstance(step, (MeasurePair, JointMeasure)):
                    for outcome, _, after in branches:
                        again = engine.step(after, step)
                        assert len(again) == 1
                        assert again[0][0] == outcome
                        assert abs(float(again[0][1]) - 1) < 1e-10
                        if isinstance(after, QuantumState):
                            assert again[0][2].same_ray(after)
                        else:
                            assert again[0][2] == after


def test_braid_inverse_on_all_engines():
    rng = random.Random(2)
    for _ in range(60):
        n = rng.choice([4, 6, 8])
        sc = random_scenario(n, 8, True, rng.getrandbits(32))
        a = rng.randint(1, n - 1)
        d = rng.choice(list(Direction))
        for name in ENGINE_NAMES:
            engine = get_engine(name)
            state = engine.init(sc.init, sc.box_count)
            for step, branches, _ in walk(engine, sc, rng):
                state = branches[0][2]
            back = engine.braid(engine.braid(state, a, a + 1, d), a, a + 1, d.inverse)
            if isinstance(state, QuantumState):
                assert back.same_ray(state)
            elif name == "stab":
                assert back.canonical() == state.canonical()
            else:
                assert back == state


def random_raw_hv2(rng):
    """A reachable hv2 state with a pile of unstandardized crossings."""
    n = rng.choice([4, 6, 8])
    s = hv2_init([((2 * k + 1, 2 * k + 2), rng.choice(list(Parity))) for k in range(n // 2)], n)
    for _ in range(rng.randint(0, 4)):
        if rng.random() < 0.3:
            a, b = rng.sample(range(1, n + 1), 2)
            s = rng.choice(hv2_measure_pair(s, PairSpec(a, b)))[2]
        else:
            a = rng.randint(1, n - 1)
            s = hv2_braid(s, a, a + 1, rng.choice(list(Direction)))
    for _ in range(rng.randint(1, 8)):
        a = rng.randint(1, n - 1)
        s = hv2_braid(s, a, a + 1, rng.choice(list(Direction)), standardize=False)
    return s


def test_standardization_confluence():
    rng = random.Random(3)
    for _ in range(500):
        raw = random_raw_hv2(rng)
        canonical = hv2_standardize(raw)
        assert canonical.is_standard()
        for _ in range(3):
            assert hv2_standardize(raw, random.Random(rng.getrandbits(32))) == canonical


@settings(max_examples=50, deadline=None)
@given(box_counts, seeds)
def test_normalization_everywhere(n, seed):
    sc = random_scenario(n, 6, True, seed)
    for name in ENGINE_NAMES:
        d = enumerate_exact(name, sc)
        total = sum(d.entries.values())
        if d.arithmetic is Arithmetic.EXACT:
            assert total == 1
        else:
            assert abs(total - 1) < 1e-9
