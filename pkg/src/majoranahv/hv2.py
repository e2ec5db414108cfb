"""Hidden-variable model II: connection diagrams with over/under data.

Every exchange of two boxes from different connections draws one crossing
between those connections, with one of the two moving strands in front.
Which strand goes in front on an anticlockwise exchange is the single free
bit of the model (:class:`CalibrationConvention`); see
:func:`majoranahv.scenarios.calibrate`.

After each braid the diagram is brought back to standard form: two crossings
between the same pair of connections with the same strand in front pull
apart (Reidemeister II), a pair whose strands alternate is a knot and needs a
crossover first, and a lone crossing with the left connection in front gets
a crossover.  Crossovers flip both connections' parities.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from . import arcs
from .core import Direction, PairSpec, Parity, check_matching, normalize_pairs
from .hv1 import swap_positions


class StandardizationError(RuntimeError):
    """Standard form not reached within the iteration bound."""


class Mover(enum.Enum):
    RIGHTWARD = "rightward"
    LEFTWARD = "leftward"

    @property
    def opposite(self) -> "Mover":
        return Mover.LEFTWARD if self is Mover.RIGHTWARD else Mover.RIGHTWARD


class Sense(enum.Enum):
    RIGHT_FRONT = "right-front"
    LEFT_FRONT = "left-front"


@dataclass(frozen=True)
class CalibrationConvention:
    """Which moving box's strand passes in front on a CCW exchange."""

    ccw_front: Mover

    @property
    def cw_front(self) -> Mover:
        return self.ccw_front.opposite

    def front(self, direction: Direction) -> Mover:
        return self.ccw_front if direction is Direction.CCW else self.cw_front


# Fixed by `majoranahv.scenarios.calibrate` against both oracles; the log is
# data/calibration.md.
CALIBRATED = CalibrationConvention(Mover.RIGHTWARD)


@dataclass(frozen=True)
class Crossing:
    front: int  # index into HV2State.connections
    back: int

    @property
    def key(self) -> tuple[int, int]:
        return (min(self.front, self.back), max(self.front, self.back))


@dataclass(frozen=True)
class HV2State:
    connections: tuple[tuple[PairSpec, Parity], ...]
    ledger: tuple[Crossing, ...]
    box_count: int
    convention: CalibrationConvention = field(default=CALIBRATED, compare=False)

    @property
    def diagram(self) -> dict[PairSpec, Parity]:
        return dict(self.connections)

    @property
    def total_parity(self) -> Parity:
        return arcs.total_parity(self.diagram)

    def pair_of(self, index: int) -> PairSpec:
        return self.connections[index][0]

    def sense(self, c: Crossing) -> Sense:
        front, back = self.pair_of(c.front), self.pair_of(c.back)
        return Sense.RIGHT_FRONT if arcs.right_of(front, back) else Sense.LEFT_FRONT

    def is_standard(self) -> bool:
        by_pair: dict[tuple[int, int], list[Crossing]] = {}
        for c in self.ledger:
            by_pair.setdefault(c.key, []).append(c)
        n = len(self.connections)
        for i in range(n):
            for j in range(i + 1, n):
                cs = by_pair.get((i, j), [])
                if arcs.interleaved(self.pair_of(i), self.pair_of(j)):
                    if len(cs) != 1 or self.sense(cs[0]) is not Sense.RIGHT_FRONT:
                        return False
                elif cs:
                    return False
        return True

    def readout(self, p: PairSpec) -> Parity:
        if not self.is_standard():
            raise ValueError("readout needs a standard diagram")
        return arcs.readout(self.diagram, p)

    def dump(self) -> str:
        """One line per connection, then one per crossing."""
        lines = [f"{p}={par.label}" for p, par in self.connections]
        for c in self.ledger:
            i, j = c.key
            lines.append(f"x({self.pair_of(i)}|{self.pair_of(j)})={self.sense(c).value}")
        return "\n".join(lines) + "\n"

    def check(self) -> None:
        check_matching([p for p, _ in self.connections], self.box_count)


def standard_state(diagram, box_count: int, convention: CalibrationConvention = CALIBRATED) -> HV2State:
    conns = tuple(sorted(diagram.items()))
    ledger = []
    for i in range(len(conns)):
        for j in range(i + 1, len(conns)):
            p, q = conns[i][0], conns[j][0]
            if arcs.interleaved(p, q):
                front, back = (i, j) if arcs.right_of(p, q) else (j, i)
                ledger.append(Crossing(front, back))
    return HV2State(conns, tuple(ledger), box_count, convention)


def hv2_init(pairs, box_count: int, convention: CalibrationConvention = CALIBRATED) -> HV2State:
    """Standard diagram whose connections read the declared parities."""
    pairs = normalize_pairs(pairs)
    check_matching([p for p, _ in pairs], box_count)
    return standard_state(arcs.stored_from_readout(dict(pairs)), box_count, convention)


def hv2_braid(
    state: HV2State,
    a: int,
    b: int,
    direction: Direction = Direction.CCW,
    standardize: bool = True,
) -> HV2State:
    """Exchange adjacent boxes, record the crossing, and (by default) standardize."""
    if abs(a - b) != 1:
        raise ValueError("only adjacent boxes can be exchanged")
    left, right = min(a, b), max(a, b)
    index = {box: i for i, (p, _) in enumerate(state.connections) for box in p}
    i, j = index[left], index[right]
    if i == j:
        return state
    conns = [(swap_positions(p, left, right), par) for p, par in state.connections]
    # i's box moves rightward, j's box moves leftward
    if state.convention.front(direction) is Mover.RIGHTWARD:
        crossing = Crossing(i, j)
    else:
        crossing = Crossing(j, i)
    moved = HV2State(tuple(conns), state.ledger + (crossing,), state.box_count, state.convention)
    return hv2_standardize(moved) if standardize else moved


def hv2_standardize(state: HV2State, rng: random.Random | None = None) -> HV2State:
    """Cancel and cross over until standard; returns the canonical standard state.

    Crossing pairs are processed in ascending order of their connections'
    positions, or in a random valid order when ``rng`` is given.  Either way
    the resulting connections and parities agree.
    """
    conns = [[p, par] for p, par in state.connections]
    n = len(conns)
    fronts: dict[tuple[int, int], list[int]] = {}
    for c in state.ledger:
        fronts.setdefault(c.key, []).append(c.front)
    bound = 4 * len(state.ledger) + 4 * n * n
    steps = 0

    def crossover(key, seq, k):
        i, j = key
        seq[k] = j if seq[k] == i else i
        conns[i][1] ^= Parity.ODD
        conns[j][1] ^= Parity.ODD

    def right_index(key):
        i, j = key
        return i if arcs.right_of(conns[i][0], conns[j][0]) else j

    def unsettled(key):
        seq = fronts[key]
        return len(seq) >= 2 or (len(seq) == 1 and seq[0] != right_index(key))

    def tick():
        nonlocal steps
        steps += 1
        if steps > bound:
            raise StandardizationError(f"no standard form after {bound} moves")

    if rng is None:
        order = sorted(fronts, key=lambda k: sorted((conns[k[0]][0], conns[k[1]][0])))
        for key in order:
            seq = fronts[key]
            while len(seq) >= 2:
                tick()
                if seq[0] != seq[1]:
                    crossover(key, seq, 1)
                del seq[:2]
            if seq and seq[0] != right_index(key):
                tick()
                crossover(key, seq, 0)
    else:
        while True:
            pending = [k for k in sorted(fronts) if unsettled(k)]
            if not pending:
                break
            tick()
            key = rng.choice(pending)
            seq = fronts[key]
            equal = [k for k in range(len(seq) - 1) if seq[k] == seq[k + 1]]
            if equal:
                k = rng.choice(equal)
                del seq[k:k + 2]
            elif len(seq) >= 2:
                k = rng.choice([k for k in range(len(seq) - 1) if seq[k] != seq[k + 1]])
                crossover(key, seq, k + rng.randint(0, 1))
            else:
                crossover(key, seq, 0)

    for (i, j), seq in fronts.items():
        if arcs.interleaved(conns[i][0], conns[j][0]) != (len(seq) == 1):
            raise StandardizationError(
                f"crossings of {conns[i][0]} and {conns[j][0]} disagree with their overlap"
            )
    diagram = {p: par for p, par in conns}
    return standard_state(diagram, state.box_count, state.convention)


def _wrap(branches, state: HV2State):
    return [(o, pr, standard_state(d, state.box_count, state.convention)) for o, pr, d in branches]


def hv2_measure_pair(state: HV2State, p: PairSpec):
    std = hv2_standardize(state)
    return _wrap(arcs.measure_diagram(std.diagram, p), std)


def hv2_joint_measure(state: HV2State, pa: PairSpec, pb: PairSpec):
    std = hv2_standardize(state)
    return _wrap(arcs.joint_measure_diagram(std.diagram, pa, pb), std)
