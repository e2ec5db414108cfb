"""Quantum, stabilizer and hidden-variable simulators of Majorana box protocols."""

from .core import (
    Braid,
    Direction,
    Distribution,
    Init,
    JointMeasure,
    MeasurePair,
    PairSpec,
    Parity,
    Scenario,
    ScenarioError,
    parse_scenario,
    render_scenario,
    tv_distance,
)
from .evaluate import ENGINE_NAMES, compare, enumerate_exact, sample
from .scenarios import calibrate, get_builtin, random_scenario

__all__ = [
    "Braid",
    "Direction",
    "Distribution",
    "ENGINE_NAMES",
    "Init",
    "JointMeasure",
    "MeasurePair",
    "PairSpec",
    "Parity",
    "Scenario",
    "ScenarioError",
    "calibrate",
    "compare",
    "enumerate_exact",
    "get_builtin",
    "parse_scenario",
    "random_scenario",
    "render_scenario",
    "sample",
    "tv_distance",
]
