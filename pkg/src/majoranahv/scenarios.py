"""Named scenario library, random scenario generator and hv2 calibration."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import hv2
from .core import (
    Arithmetic,
    Braid,
    Direction,
    Distribution,
    Init,
    JointMeasure,
    MeasurePair,
    PairSpec,
    Parity,
    Scenario,
    as_trace,
    parse_scenario,
    tv_distance,
)
from .evaluate import enumerate_exact, get_engine

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)
ALL = ("quantum", "stab", "hv1", "hv2")
TOPOLOGICAL = ("quantum", "stab", "hv2")
ORACLES = ("quantum", "stab")
RESERVED = {"cnot": "the CNOT protocol is reserved but not implemented"}


@dataclass(frozen=True)
class Expectation:
    """Expected trace distribution for some engines, optionally conditioned on a prefix.

    ``dist`` maps trace strings such as ``"eo"`` to probabilities.
    """

    engines: tuple[str, ...]
    dist: dict
    given: str = ""
    note: str = ""

    def distribution(self) -> Distribution:
        entries = {as_trace(t): Fraction(p) for t, p in self.dist.items()}
        return Distribution(entries, Arithmetic.EXACT)

    def check(self, engine: str, dist: Distribution) -> float:
        """TV distance between ``dist`` (conditioned as needed) and the expectation."""
        if self.given:
            dist = dist.condition(self.given)
        return tv_distance(dist, self.distribution())


@dataclass(frozen=True)
class BuiltinScenario:
    name: str
    scenario: Scenario
    expectations: tuple[Expectation, ...] = ()
    postselect: str = ""
    category: str = ""

    def expectation_for(self, engine: str) -> list[Expectation]:
        return [e for e in self.expectations if engine in e.engines]


def _load(name: str) -> Scenario:
    text = resources.files(__package__).joinpath("data").joinpath(f"{name}.scn").read_text()
    return parse_scenario(text, name)


def _period4(n: int) -> dict:
    return [{"o": HALF, "e": HALF}, {"o": 1}, {"o": HALF, "e": HALF}, {"e": 1}][(n - 1) % 4]


def _catalog() -> dict[str, BuiltinScenario]:
    out: dict[str, BuiltinScenario] = {}

    def add(name, *expectations, postselect="", category=""):
        out[name] = BuiltinScenario(name, _load(name), tuple(expectations), postselect, category)

    add(
        "fusion-same-pair",
        Expectation(ALL, {"eee": HALF, "ooo": HALF}, note="second (1,2) repeats the first"),
        category="fusion",
    )
    add(
        "fusion-cross-pair",
        Expectation(ALL, {"eee": QUARTER, "eeo": QUARTER, "ooe": QUARTER, "ooo": QUARTER}),
        Expectation(ALL, {"eee": HALF, "eeo": HALF}, given="ee", note="final (1,2) uniform"),
        category="fusion",
    )
    for n in range(1, 9):
        add(
            f"successive-braiding-n{n}",
            Expectation(TOPOLOGICAL, _period4(n)),
            category="braiding",
        )
    # frozen from the quantum engine
    add("hadamard-braid", Expectation(TOPOLOGICAL, {"e": HALF, "o": HALF}), category="braiding")
    add("hadamard-braid-x", Expectation(TOPOLOGICAL, {"e": 1}), category="braiding")
    add("hadamard-braid-y", Expectation(TOPOLOGICAL, {"e": HALF, "o": HALF}), category="braiding")
    add(
        "hv1-braid-failure",
        Expectation(TOPOLOGICAL, {"o": 1}),
        Expectation(("hv1",), {"e": 1}),
        category="braiding",
    )
    add("knot-p23p23", Expectation(TOPOLOGICAL, {"oo": 1}), category="braiding")
    add("knot-p23p32", Expectation(TOPOLOGICAL, {"ee": 1}), category="braiding")
    add(
        "joint-zz-entangle",
        Expectation(
            ALL,
            {"eeeee": QUARTER, "eoooo": QUARTER, "oeoeo": QUARTER, "ooeoe": QUARTER},
            note="(1,2) and (5,6) agree on an even joint outcome",
        ),
        category="joint",
    )
    add(
        "interference-6box",
        Expectation(ORACLES, {"ee": 1}, given="e"),
        Expectation(("hv1", "hv2"), {"ee": HALF, "eo": HALF}, given="e"),
        postselect="e",
        category="joint",
    )
    add(
        "interference-6box-literal",
        Expectation(ALL, {"ee": HALF, "eo": HALF}, given="e"),
        postselect="e",
    )
    return out


_CACHE: dict[str, BuiltinScenario] = {}


def catalog() -> dict[str, BuiltinScenario]:
    if not _CACHE:
        _CACHE.update(_catalog())
    return dict(_CACHE)


def builtin_names() -> list[str]:
    return list(catalog())


def get_builtin(name: str) -> BuiltinScenario:
    key = name.lower()
    if key in RESERVED:
        raise NotImplementedError(f"{name}: {RESERVED[key]}")
    try:
        return catalog()[key]
    except KeyError:
        raise KeyError(f"unknown built-in scenario {name!r}") from None


def hierarchy_suite() -> dict[str, list[BuiltinScenario]]:
    """Built-ins grouped by test class, in display order."""
    groups: dict[str, list[BuiltinScenario]] = {"fusion": [], "braiding": [], "joint": []}
    for b in catalog().values():
        if b.category:
            groups[b.category].append(b)
    return groups


def random_scenario(
    box_count: int,
    max_steps: int,
    allow_joint: bool = False,
    seed: int = 0,
    allow_braid: bool = True,
) -> Scenario:
    """All-even init on (1,2),(3,4),... followed by up to ``max_steps`` random steps."""
    if box_count % 2 or not 4 <= box_count <= 10:
        raise ValueError("box_count must be even and between 4 and 10")
    rng = random.Random(seed)
    kinds = ["measure"] + (["braid"] if allow_braid else []) + (["joint"] if allow_joint else [])
    steps: list = [Init(tuple((PairSpec(2 * k + 1, 2 * k + 2), Parity.EVEN) for k in range(box_count // 2)))]
    boxes = range(1, box_count + 1)
    for _ in range(rng.randint(0, max_steps)):
        kind = rng.choice(kinds)
        if kind == "braid":
            a = rng.randint(1, box_count - 1)
            steps.append(Braid(a, a + 1, rng.choice(list(Direction))))
        elif kind == "measure":
            a, b = rng.sample(boxes, 2)
            steps.append(MeasurePair(PairSpec(a, b)))
        else:
            a, b, c, d = rng.sample(boxes, 4)
            steps.append(JointMeasure(PairSpec(a, b), PairSpec(c, d)))
    return Scenario(box_count, tuple(steps), f"random-{box_count}-{seed}")


# --- calibration ------------------------------------------------------------

CALIBRATION_SUITE = (
    "hv1-braid-failure",
    "knot-p23p23",
    "knot-p23p32",
    "successive-braiding-n1",
    "successive-braiding-n2",
    "successive-braiding-n3",
    "successive-braiding-n4",
    "hadamard-braid",
    "hadamard-braid-x",
    "hadamard-braid-y",
)
CONVENTIONS = tuple(hv2.CalibrationConvention(m) for m in hv2.Mover)


class CalibrationError(RuntimeError):
    def __init__(self, message: str, table: list[dict]):
        super().__init__(message)
        self.table = table


@dataclass
class CalibrationResult:
    oracle: str
    convention: hv2.CalibrationConvention
    table: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "oracle": self.oracle,
            "convention": {"ccw_front": self.convention.ccw_front.value},
            "table": self.table,
        }


def calibration_table(oracle: str) -> list[dict]:
    """hv2 under each convention against ``oracle`` on the calibration suite."""
    if oracle not in ORACLES:
        raise ValueError(f"oracle must be one of {ORACLES}, got {oracle!r}")
    tol = 0.0 if oracle == "stab" else 1e-9
    rows = []
    for name in CALIBRATION_SUITE:
        sc = get_builtin(name).scenario
        ref = enumerate_exact(oracle, sc)
        for conv in CONVENTIONS:
            tv = tv_distance(enumerate_exact(get_engine("hv2", conv), sc), ref)
            rows.append(
                {"scenario": name, "ccw_front": conv.ccw_front.value, "tv": tv, "match": tv <= tol}
            )
    return rows


def calibrate(oracle: str = "stab") -> CalibrationResult:
    """The unique convention under which hv2 reproduces the oracle on the suite."""
    table = calibration_table(oracle)
    passing = [
        conv
        for conv in CONVENTIONS
        if all(r["match"] for r in table if r["ccw_front"] == conv.ccw_front.value)
    ]
    if len(passing) != 1:
        raise CalibrationError(f"{len(passing)} conventions satisfy the calibration suite", table)
    return CalibrationResult(oracle, passing[0], table)


def render_calibration(result_or_table, oracle: str | None = None) -> str:
    """Markdown log of a calibration run."""
    if isinstance(result_or_table, CalibrationResult):
        table, oracle = result_or_table.table, result_or_table.oracle
        head = f"chosen convention: ccw front = {result_or_table.convention.ccw_front.value}\n\n"
    else:
        table, head = result_or_table, "no unique convention\n\n"
    lines = [
        f"# hv2 calibration against {oracle}",
        "",
        head.rstrip("\n"),
        "",
        "| scenario | ccw front | TV | result |",
        "|---|---|---|---|",
    ]
    for r in table:
        lines.append(
            f"| {r['scenario']} | {r['ccw_front']} | {r['tv']:.12g} | {'match' if r['match'] else 'mismatch'} |"
        )
    return "\n".join(lines) + "\n"
