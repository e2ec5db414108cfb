"""Hidden-variable model I: connections and parities, no topology.

Braids move boxes around and connections follow their boxes; nothing else
changes, whichever way the exchange goes.  This is enough for fusion-only
protocols and deliberately blind to braiding.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import arcs
from .core import Direction, PairSpec, Parity, check_matching, normalize_pairs


@dataclass(frozen=True)
class HV1State:
    connections: tuple[tuple[PairSpec, Parity], ...]
    box_count: int

    def __post_init__(self):
        object.__setattr__(self, "connections", tuple(sorted(self.connections)))

    @classmethod
    def from_diagram(cls, diagram, box_count: int) -> "HV1State":
        return cls(tuple(diagram.items()), box_count)

    @property
    def diagram(self) -> dict[PairSpec, Parity]:
        return dict(self.connections)

    @property
    def total_parity(self) -> Parity:
        return arcs.total_parity(self.diagram)

    def readout(self, p: PairSpec) -> Parity:
        return arcs.readout(self.diagram, p)

    def check(self) -> None:
        check_matching([p for p, _ in self.connections], self.box_count)


def hv1_init(pairs, box_count: int) -> HV1State:
    """Connections reading the declared parities."""
    pairs = normalize_pairs(pairs)
    check_matching([p for p, _ in pairs], box_count)
    return HV1State.from_diagram(arcs.stored_from_readout(dict(pairs)), box_count)


def swap_positions(p: PairSpec, a: int, b: int) -> PairSpec:
    def move(x):
        return b if x == a else a if x == b else x

    return PairSpec(move(p.a), move(p.b))


def hv1_braid(state: HV1State, a: int, b: int, direction: Direction = Direction.CCW) -> HV1State:
    """Exchange boxes ``a`` and ``b``; ``direction`` is ignored."""
    if abs(a - b) != 1:
        raise ValueError("only adjacent boxes can be exchanged")
    moved = {swap_positions(p, a, b): par for p, par in state.connections}
    return HV1State.from_diagram(moved, state.box_count)


def _wrap(branches, box_count):
    return [(o, pr, HV1State.from_diagram(d, box_count)) for o, pr, d in branches]


def hv1_measure_pair(state: HV1State, p: PairSpec):
    return _wrap(arcs.measure_diagram(state.diagram, p), state.box_count)


def hv1_joint_measure(state: HV1State, pa: PairSpec, pb: PairSpec):
    return _wrap(arcs.joint_measure_diagram(state.diagram, pa, pb), state.box_count)
