"""Protocol data model shared by every engine.

A scenario is a line-oriented program over ``2n`` boxes (Majorana modes)::

    boxes 4
    init (1,2)=even (3,4)=even
    braid 2 3 ccw
    measure 1 3
    joint (1,2) (3,4)

Running a scenario produces a :class:`Distribution` over outcome traces, one
parity per measurement step.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union


class ScenarioError(ValueError):
    """Raised for malformed or invalid scenario text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Parity(enum.IntEnum):
    EVEN = 0
    ODD = 1

    def __xor__(self, other):
        return Parity(int(self) ^ int(other))

    __rxor__ = __xor__

    @classmethod
    def parse(cls, text: str) -> "Parity":
        key = text.strip().lower()
        key = {"e": "even", "o": "odd"}.get(key, key)
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown parity {text!r}") from None

    @property
    def label(self) -> str:
        return self.name.lower()


EVEN = Parity.EVEN
ODD = Parity.ODD


def xor_all(parities: Iterable[int]) -> Parity:
    acc = 0
    for p in parities:
        acc ^= int(p)
    return Parity(acc)


class Direction(enum.Enum):
    CCW = "ccw"
    CW = "cw"

    @property
    def inverse(self) -> "Direction":
        return Direction.CW if self is Direction.CCW else Direction.CCW


@dataclass(frozen=True, order=True)
class PairSpec:
    """Two distinct box positions, stored with ``a < b``."""

    a: int
    b: int

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"pair needs two distinct boxes, got ({self.a},{self.b})")
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    def __iter__(self):
        yield self.a
        yield self.b

    def __contains__(self, box: int) -> bool:
        return box == self.a or box == self.b

    def other(self, box: int) -> int:
        if box == self.a:
            return self.b
        if box == self.b:
            return self.a
        raise ValueError(f"box {box} not in {self}")

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


def pair(a: int, b: int) -> PairSpec:
    return PairSpec(a, b)


# --- protocol steps -------------------------------------------------------


@dataclass(frozen=True)
class Init:
    pairs: tuple[tuple[PairSpec, Parity], ...]


@dataclass(frozen=True)
class Braid:
    """Exchange of adjacent boxes ``a < b``."""

    a: int
    b: int
    direction: Direction = Direction.CCW

    def __post_init__(self):
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class MeasurePair:
    pair: PairSpec


@dataclass(frozen=True)
class JointMeasure:
    pair_a: PairSpec
    pair_b: PairSpec


ProtocolStep = Union[Init, Braid, MeasurePair, JointMeasure]
MEASUREMENT_STEPS = (MeasurePair, JointMeasure)


def check_matching(pairs: Iterable[PairSpec], box_count: int) -> None:
    """Raise ``ValueError`` unless ``pairs`` is a perfect matching of 1..box_count."""
    seen: set[int] = set()
    for p in pairs:
        for box in p:
            if not 1 <= box <= box_count:
                raise ValueError(f"box {box} outside 1..{box_count}")
            if box in seen:
                raise ValueError(f"box {box} appears in more than one pair")
            seen.add(box)
    if len(seen) != box_count:
        missing = sorted(set(range(1, box_count + 1)) - seen)
        raise ValueError(f"init is not a perfect matching; unpaired boxes {missing}")


def normalize_pairs(pairs) -> tuple[tuple[PairSpec, Parity], ...]:
    out = []
    for p, parity in pairs:
        if not isinstance(p, PairSpec):
            p = PairSpec(*p)
        out.append((p, Parity(parity)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class Scenario:
    box_count: int
    steps: tuple[ProtocolStep, ...]
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        validate_scenario(self)

    @property
    def init(self) -> Init:
        return self.steps[0]  # type: ignore[return-value]

    @property
    def measurement_count(self) -> int:
        return sum(isinstance(s, MEASUREMENT_STEPS) for s in self.steps)

    def with_name(self, name: str) -> "Scenario":
        return Scenario(self.box_count, self.steps, name)


def validate_scenario(sc: Scenario) -> None:
    n2 = sc.box_count
    if n2 < 2 or n2 % 2:
        raise ScenarioError(f"box count must be a positive even number, got {n2}")
    if not sc.steps or not isinstance(sc.steps[0], Init):
        raise ScenarioError("first step must be init")

    def in_range(box: int) -> None:
        if not 1 <= box <= n2:
            raise ScenarioError(f"box {box} outside 1..{n2}")

    for index, step in enumerate(sc.steps):
        if isinstance(step, Init):
            if index:
                raise ScenarioError("init may appear only once")
            try:
                check_matching([p for p, _ in step.pairs], n2)
            except ValueError as exc:
                raise ScenarioError(str(exc)) from None
        elif isinstance(step, Braid):
            in_range(step.a)
            in_range(step.b)
            if step.b - step.a != 1:
                raise ScenarioError(f"braid {step.a} {step.b}: only adjacent boxes may be exchanged")
        elif isinstance(step, MeasurePair):
            for box in step.pair:
                in_range(box)
        elif isinstance(step, JointMeasure):
            boxes = [*step.pair_a, *step.pair_b]
            for box in boxes:
                in_range(box)
            if len(set(boxes)) != 4:
                raise ScenarioError("joint measurement needs four distinct boxes")
        else:
            raise ScenarioError(f"unknown step {step!r}")


# --- text format ----------------------------------------------------------

_PAIR = r"\(\s*(\d+)\s*,\s*(\d+)\s*\)"
_INIT_ITEM = re.compile(_PAIR + r"\s*=\s*(\w+)")
_JOINT = re.compile(r"^" + _PAIR + r"\s+" + _PAIR + r"$")


def parse_scenario(text: str, name: str | None = None) -> Scenario:
    """Parse scenario text; see the module docstring for the grammar.

    An optional ``name <label>`` line sets the scenario name.
    """
    box_count = None
    steps: list[ProtocolStep] = []
    label = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        keyword = keyword.lower()
        rest = rest.strip()
        try:
            if keyword == "name":
                label = rest
            elif keyword == "boxes":
                if box_count is not None:
                    raise ScenarioError("boxes declared twice", lineno)
                box_count = int(rest)
            elif box_count is None:
                raise ScenarioError("'boxes' must come before any step", lineno)
            elif keyword == "init":
                items = _INIT_ITEM.findall(rest)
                if not items or _INIT_ITEM.sub("", rest).strip():
                    raise ScenarioError(f"cannot parse init list {rest!r}", lineno)
                pairs = [(PairSpec(int(a), int(b)), Parity.parse(p)) for a, b, p in items]
                steps.append(Init(normalize_pairs(pairs)))
            elif keyword == "braid":
                a, b, d = rest.split()
                steps.append(Braid(int(a), int(b), Direction(d.lower())))
            elif keyword == "measure":
                a, b = rest.split()
                steps.append(MeasurePair(PairSpec(int(a), int(b))))
            elif keyword == "joint":
                m = _JOINT.match(rest)
                if not m:
                    raise ScenarioError(f"cannot parse joint targets {rest!r}", lineno)
                a1, a2, b1, b2 = map(int, m.groups())
                steps.append(JointMeasure(PairSpec(a1, a2), PairSpec(b1, b2)))
            else:
                raise ScenarioError(f"unknown keyword {keyword!r}", lineno)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno) from None
    if box_count is None:
        raise ScenarioError("missing 'boxes' line")
    return Scenario(box_count, tuple(steps), name or label or "scenario")


def render_step(step: ProtocolStep) -> str:
    if isinstance(step, Init):
        return "init " + " ".join(f"{p}={par.label}" for p, par in step.pairs)
    if isinstance(step, Braid):
        return f"braid {step.a} {step.b} {step.direction.value}"
    if isinstance(step, MeasurePair):
        return f"measure {step.pair.a} {step.pair.b}"
    if isinstance(step, JointMeasure):
        return f"joint {step.pair_a} {step.pair_b}"
    raise TypeError(step)


def render_scenario(sc: Scenario) -> str:
    lines = [f"name {sc.name}", f"boxes {sc.box_count}"]
    lines += [render_step(s) for s in sc.steps]
    return "\n".join(lines) + "\n"


# --- distributions --------------------------------------------------------

Trace = tuple  # tuple[Parity, ...]
Probability = Union[Fraction, float]


class Arithmetic(enum.Enum):
    EXACT = "exact-dyadic"
    FLOAT = "float"


def is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


def as_trace(trace) -> Trace:
    return tuple(Parity.parse(t) if isinstance(t, str) else Parity(t) for t in trace)


@dataclass(frozen=True)
class Distribution:
    """Probability of each outcome trace.

    Exact distributions hold :class:`~fractions.Fraction` values with
    power-of-two denominators and sum to exactly one; float distributions
    sum to one within 1e-9.
    """

    entries: Mapping[Trace, Probability]
    arithmetic: Arithmetic
    scenario: str = ""
    engine: str = ""
    branches: int = field(default=0, compare=False)

    def __post_init__(self):
        entries = {as_trace(t): p for t, p in self.entries.items()}
        if self.arithmetic is Arithmetic.FLOAT:
            # clamp round-off just above one
            entries = {t: min(float(p), 1.0) if p <= 1 + 1e-9 else p for t, p in entries.items()}
        lengths = {len(t) for t in entries}
        if len(lengths) > 1:
            raise ValueError(f"traces of different lengths: {sorted(lengths)}")
        for t, p in entries.items():
            if not 0 < p <= 1:
                raise ValueError(f"probability {p} of trace {t} outside (0,1]")
        total = sum(entries.values())
        if self.arithmetic is Arithmetic.EXACT:
            for p in entries.values():
                if not isinstance(p, Fraction) or not is_dyadic(p):
                    raise ValueError(f"{p!r} is not a dyadic rational")
            if entries and total != 1:
                raise ValueError(f"exact probabilities sum to {total}, not 1")
        elif entries and abs(total - 1) > 1e-9:
            raise ValueError(f"probabilities sum to {total}")
        object.__setattr__(self, "entries", dict(sorted(entries.items())))

    def __getitem__(self, trace) -> Probability:
        return self.entries.get(as_trace(trace), 0)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def support(self) -> frozenset:
        return frozenset(self.entries)

    @property
    def trace_length(self) -> int | None:
        return len(next(iter(self.entries))) if self.entries else None

    def prefix_probability(self, prefix) -> Probability:
        prefix = as_trace(prefix)
        k = len(prefix)
        return sum((p for t, p in self.entries.items() if t[:k] == prefix), Fraction(0) if self.arithmetic is Arithmetic.EXACT else 0.0)

    def condition(self, prefix) -> "Distribution":
        """Restrict to traces starting with ``prefix`` and renormalize."""
        prefix = as_trace(prefix)
        k = len(prefix)
        total = self.prefix_probability(prefix)
        if not total:
            raise ValueError(f"prefix {prefix} has probability zero")
        kept = {t: p / total for t, p in self.entries.items() if t[:k] == prefix}
        return Distribution(kept, self.arithmetic, self.scenario, self.engine, self.branches)

    def marginal(self, index: int) -> dict[Parity, Probability]:
        out: dict[Parity, Probability] = {}
        for t, p in self.entries.items():
            out[t[index]] = out.get(t[index], 0) + p
        return out

    def to_json(self) -> dict:
        rows = []
        for t, p in self.entries.items():
            row: dict = {"trace": [x.label for x in t]}
            if isinstance(p, Fraction):
                row["p_num"] = p.numerator
                row["p_den"] = p.denominator
            else:
                row["p_float"] = round_sig(p)
            rows.append(row)
        return {
            "scenario": self.scenario,
            "engine": self.engine,
            "arithmetic": self.arithmetic.value,
            "entries": rows,
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "Distribution":
        arithmetic = Arithmetic(doc["arithmetic"])
        entries = {}
        for row in doc["entries"]:
            if "p_float" in row:
                p = float(row["p_float"])
            else:
                p = Fraction(row["p_num"], row["p_den"])
            entries[as_trace(row["trace"])] = p
        return cls(entries, arithmetic, doc.get("scenario", ""), doc.get("engine", ""))


def round_sig(x: float, digits: int = 12) -> float:
    return float(f"{x:.{digits}g}")


def dumps(doc) -> str:
    """Stable JSON text: sorted keys, floats already rounded by callers."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _check_comparable(p: Distribution, q: Distribution) -> None:
    lp, lq = p.trace_length, q.trace_length
    if lp is not None and lq is not None and lp != lq:
        raise ValueError(f"trace length mismatch: {lp} vs {lq}")


def tv_distance(p: Distribution, q: Distribution) -> float:
    """Total variation distance, half the L1 distance over the union of supports."""
    _check_comparable(p, q)
    total = 0.0
    for t in p.support | q.support:
        total += abs(float(p[t]) - float(q[t]))
    return min(1.0, max(0.0, total / 2))


def distributions_equal(p: Distribution, q: Distribution, tol: float = 0.0) -> bool:
    _check_comparable(p, q)
    if p.support != q.support:
        return False
    if tol == 0:
        return all(p[t] == q[t] for t in p.support)
    return all(abs(float(p[t]) - float(q[t])) <= tol for t in p.support)


def snap(p: float, eps: float = 1e-9) -> Fraction | float:
    """Nearest of {0, 1/2, 1} within ``eps``; otherwise ``p`` unchanged."""
    for v in (Fraction(0), Fraction(1, 2), Fraction(1)):
        if math.isclose(p, v, abs_tol=eps):
            return v
    return p

