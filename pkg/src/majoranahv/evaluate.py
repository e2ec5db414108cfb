"""Run scenarios on any engine, exactly or by sampling, and compare engines."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from . import hv1, hv2, quantum, stab
from .core import (
    Arithmetic,
    Braid,
    Distribution,
    Init,
    JointMeasure,
    MeasurePair,
    Scenario,
    as_trace,
    round_sig,
    snap,
    tv_distance,
)

MAX_LEAVES = 2**20
DEFAULT_FLOAT_TOL = 1e-6


class EvaluationGuardError(RuntimeError):
    """Branch enumeration exceeded :data:`MAX_LEAVES`."""


@dataclass(frozen=True)
class Engine:
    name: str
    exact: bool
    init: Callable[[Init, int], Any]
    braid: Callable[[Any, int, int, Any], Any]
    measure: Callable
    joint: Callable

    @property
    def arithmetic(self) -> Arithmetic:
        return Arithmetic.EXACT if self.exact else Arithmetic.FLOAT

    def step(self, state, step):
        """Branches ``(outcome or None, probability, state)`` for one step."""
        if isinstance(step, Braid):
            return [(None, self._one, self.braid(state, step.a, step.b, step.direction))]
        if isinstance(step, MeasurePair):
            return self.measure(state, step.pair)
        if isinstance(step, JointMeasure):
            return self.joint(state, step.pair_a, step.pair_b)
        raise TypeError(f"unexpected step {step!r}")

    @property
    def _one(self):
        return Fraction(1) if self.exact else 1.0


def _hv2_engine(convention: hv2.CalibrationConvention) -> Engine:
    return Engine(
        "hv2",
        True,
        lambda init, n: hv2.hv2_init(init.pairs, n, convention),
        hv2.hv2_braid,
        hv2.hv2_measure_pair,
        hv2.hv2_joint_measure,
    )


ENGINES: dict[str, Engine] = {
    "quantum": Engine(
        "quantum",
        False,
        lambda init, n: quantum.q_init(init.pairs, n),
        quantum.q_braid,
        quantum.q_measure_pair,
        quantum.q_joint_measure,
    ),
    "hv1": Engine(
        "hv1",
        True,
        lambda init, n: hv1.hv1_init(init.pairs, n),
        hv1.hv1_braid,
        hv1.hv1_measure_pair,
        hv1.hv1_joint_measure,
    ),
    "hv2": _hv2_engine(hv2.CALIBRATED),
    "stab": Engine(
        "stab",
        True,
        lambda init, n: stab.stab_init(init.pairs, n),
        stab.stab_braid,
        stab.stab_measure_pair,
        stab.stab_joint_measure,
    ),
}
ENGINE_NAMES = tuple(ENGINES)


def get_engine(name: str | Engine, convention: hv2.CalibrationConvention | None = None) -> Engine:
    if isinstance(name, Engine):
        return name
    if name not in ENGINES:
        raise ValueError(f"unknown engine {name!r}; choose from {', '.join(ENGINES)}")
    if name == "hv2" and convention is not None:
        return _hv2_engine(convention)
    return ENGINES[name]


def enumerate_exact(engine, scenario: Scenario, max_leaves: int | None = None) -> Distribution:
    """Expand every measurement branch; ``max_leaves`` defaults to :data:`MAX_LEAVES`."""
    engine = get_engine(engine)
    if max_leaves is None:
        max_leaves = MAX_LEAVES
    root = engine.init(scenario.init, scenario.box_count)
    frontier = [(root, engine._one, ())]
    for step in scenario.steps[1:]:
        nxt = []
        for state, prob, trace in frontier:
            for outcome, p, child in engine.step(state, step):
                t = trace if outcome is None else trace + (outcome,)
                nxt.append((child, prob * p, t))
        if len(nxt) > max_leaves:
            raise EvaluationGuardError(
                f"{scenario.name}: more than {max_leaves} branches on engine {engine.name}"
            )
        frontier = nxt
    entries: dict = {}
    for _, prob, trace in frontier:
        entries[trace] = entries.get(trace, 0) + prob
    return Distribution(entries, engine.arithmetic, scenario.name, engine.name, branches=len(frontier))


def _stream(seed: int, shot: int) -> np.random.Generator:
    return np.random.default_rng([seed & (2**64 - 1), shot])


def sample(engine, scenario: Scenario, shots: int, seed: int = 0) -> Distribution:
    """Empirical trace frequencies over ``shots`` seeded trajectories.

    Shot ``k`` draws from a stream keyed by ``(seed, k)`` alone, so results do
    not depend on evaluation order.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    engine = get_engine(engine)
    root = engine.init(scenario.init, scenario.box_count)
    steps = scenario.steps[1:]
    # branch lists keyed by the path of branch indices; engines are pure
    cache: dict[tuple, list] = {}
    counts: dict[tuple, int] = {}
    for shot in range(shots):
        rng = _stream(seed, shot)
        state, path, trace = root, (), ()
        for step in steps:
            if path not in cache:
                cache[path] = engine.step(state, step)
            branches = cache[path]
            if len(branches) == 1:
                choice = 0
            else:
                weights = np.array([float(p) for _, p, _ in branches])
                choice = int(rng.choice(len(branches), p=weights / weights.sum()))
            outcome, _, state = branches[choice]
            path = path + (choice,)
            if outcome is not None:
                trace = trace + (outcome,)
        counts[trace] = counts.get(trace, 0) + 1
    entries = {t: c / shots for t, c in counts.items()}
    return Distribution(entries, Arithmetic.FLOAT, scenario.name, engine.name, branches=len(counts))


def evaluate(engine, scenario: Scenario, mode: str = "exact", shots: int = 10_000, seed: int = 0) -> Distribution:
    if mode == "exact":
        return enumerate_exact(engine, scenario)
    if mode == "sampled":
        return sample(engine, scenario, shots, seed)
    raise ValueError(f"unknown mode {mode!r}")


def default_tol(p: Distribution, q: Distribution) -> float:
    both_exact = p.arithmetic is Arithmetic.EXACT and q.arithmetic is Arithmetic.EXACT
    return 0.0 if both_exact else DEFAULT_FLOAT_TOL


def _snap_label(p: float) -> str:
    s = snap(p)
    return str(s) if isinstance(s, Fraction) else repr(round_sig(s))


@dataclass
class ComparisonReport:
    scenario: str
    engines: list[str]
    mode: str
    tol: float | None
    tv_matrix: list[list[float]]
    verdicts: dict[str, bool]
    branch_counts: dict[str, int]
    arithmetic: dict[str, str]
    postselect: tuple = ()
    distributions: dict[str, Distribution] = field(default_factory=dict, repr=False)

    def tv(self, a: str, b: str) -> float:
        return self.tv_matrix[self.engines.index(a)][self.engines.index(b)]

    @property
    def all_match(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        snapped = {}
        for name, dist in self.distributions.items():
            if dist.arithmetic is Arithmetic.FLOAT:
                snapped[name] = [
                    {"trace": [x.label for x in t], "p": _snap_label(float(p))} for t, p in dist.entries.items()
                ]
        doc = {
            "scenario": self.scenario,
            "engines": self.engines,
            "mode": self.mode,
            "tol": self.tol,
            "postselect": [x.label for x in self.postselect],
            "tv_matrix": [[round_sig(x) for x in row] for row in self.tv_matrix],
            "verdicts": {k: ("match" if v else "mismatch") for k, v in self.verdicts.items()},
            "branch_counts": self.branch_counts,
            "arithmetic": self.arithmetic,
        }
        if snapped:
            doc["snapped"] = snapped
        return doc


def compare(
    scenario: Scenario,
    engines: Sequence,
    mode: str = "exact",
    tol: float | None = None,
    *,
    shots: int = 10_000,
    seed: int = 0,
    postselect=(),
) -> ComparisonReport:
    """Pairwise TV distances between engines, optionally conditioned on a trace prefix.

    ``tol=None`` uses 0 between exact engines and 1e-6 otherwise.
    """
    engines = [get_engine(e) for e in engines]
    if len(engines) < 2:
        raise ValueError("compare needs at least two engines")
    names = [e.name for e in engines]
    dists = {}
    for e in engines:
        d = evaluate(e, scenario, mode, shots, seed)
        dists[e.name] = d.condition(postselect) if postselect else d
    k = len(engines)
    matrix = [[0.0] * k for _ in range(k)]
    verdicts = {}
    for i, j in itertools.combinations(range(k), 2):
        p, q = dists[names[i]], dists[names[j]]
        tv = tv_distance(p, q)
        matrix[i][j] = matrix[j][i] = tv
        limit = default_tol(p, q) if tol is None else tol
        verdicts[f"{names[i]}-{names[j]}"] = tv <= limit
    report = ComparisonReport(
        scenario=scenario.name,
        engines=names,
        mode=mode,
        tol=tol,
        tv_matrix=matrix,
        verdicts=verdicts,
        branch_counts={n: d.branches for n, d in dists.items()},
        arithmetic={n: d.arithmetic.value for n, d in dists.items()},
        postselect=as_trace(postselect) if postselect else (),
        distributions=dists,
    )
    return report
