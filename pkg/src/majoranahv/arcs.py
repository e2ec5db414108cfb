"""Connection diagrams shared by the two hidden-variable engines.

A diagram is a perfect matching of box positions (connections) with one
parity bit per connection.  Overlapping connections ``p1 < q1 < p2 < q2``
are drawn with the *right* connection (the one reaching further right) in
front.  A crossover swaps the front/back order of one crossing and flips the
parity of both connections involved, so the XOR of all connection parities
never changes.

Measurements read a connection as it would appear pushed to the very back
of the diagram: its stored parity flipped once for every connection it lies
in front of.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping

from .core import PairSpec, Parity, xor_all

Diagram = dict  # PairSpec -> Parity


def interleaved(p: PairSpec, q: PairSpec) -> bool:
    return p.a < q.a < p.b < q.b or q.a < p.a < q.b < p.b


def right_of(p: PairSpec, q: PairSpec) -> bool:
    """True if ``p`` reaches further right than ``q``."""
    return p.b > q.b


def in_front_of(p: PairSpec, others: Iterable[PairSpec]) -> list[PairSpec]:
    """Connections that ``p`` covers in the standard configuration."""
    return [q for q in others if q != p and interleaved(p, q) and right_of(p, q)]


def readout(diagram: Mapping[PairSpec, Parity], p: PairSpec) -> Parity:
    return diagram[p] ^ (len(in_front_of(p, diagram)) % 2)


def stored_from_readout(readouts: Mapping[PairSpec, Parity]) -> Diagram:
    """Stored parities of a standard diagram whose connections read ``readouts``."""
    return {p: r ^ (len(in_front_of(p, readouts)) % 2) for p, r in readouts.items()}


def partner_map(diagram: Iterable[PairSpec]) -> dict[int, PairSpec]:
    return {box: p for p in diagram for box in p}


def send_back(diagram: Diagram, moved: Iterable[PairSpec], bystanders: Iterable[PairSpec]) -> None:
    """Crossover each of ``moved`` behind every bystander it covers (in place).

    The same crossovers bring a freshly drawn back connection forward into
    standard position, so this also restandardizes new connections.
    """
    bystanders = list(bystanders)
    for x in moved:
        for c in in_front_of(x, bystanders):
            diagram[x] ^= Parity.ODD
            diagram[c] ^= Parity.ODD


def _merge(branches):
    merged: dict = {}
    for outcome, prob, diagram in branches:
        key = (outcome, tuple(sorted(diagram.items())))
        merged[key] = merged.get(key, 0) + prob
    return [(outcome, prob, dict(items)) for (outcome, items), prob in sorted(merged.items())]


def measure_diagram(diagram: Mapping[PairSpec, Parity], target: PairSpec):
    """Two-box measurement on a standard diagram.

    Returns ``(outcome, probability, diagram)`` branches.  Measuring an
    existing connection reads it and leaves the diagram alone.  Otherwise the
    two connections through the measured boxes are pushed to the back, the
    boxes re-pair as ``(a,b)`` and ``(p,q)`` with a fair coin for the new
    ``(a,b)`` parity and ``(p,q)`` taking whatever keeps the pair's XOR, and
    the new connections are brought forward into standard position.
    """
    if target in diagram:
        return [(readout(diagram, target), Fraction(1), dict(diagram))]
    partners = partner_map(diagram)
    old_a, old_b = partners[target.a], partners[target.b]
    rest = PairSpec(old_a.other(target.a), old_b.other(target.b))
    work = dict(diagram)
    bystanders = [c for c in diagram if c not in (old_a, old_b)]
    send_back(work, (old_a, old_b), bystanders)
    branches = []
    for coin in Parity:
        new = {c: work[c] for c in bystanders}
        new[target] = coin
        new[rest] = work[old_a] ^ work[old_b] ^ coin
        send_back(new, (target, rest), bystanders)
        branches.append((readout(new, target), Fraction(1, 2), new))
    return _merge(branches)


def joint_partners(diagram: Iterable[PairSpec], pa: PairSpec, pb: PairSpec) -> list[PairSpec]:
    """New connections formed by a four-box measurement of ``pa`` and ``pb``.

    Displaced partners of ``pa``'s boxes pair together, likewise for ``pb``;
    a single leftover from each side pairs across.
    """
    partners = partner_map(diagram)
    measured = {*pa, *pb}
    new = [pa, pb]
    loose = []
    for group in (pa, pb):
        displaced = [partners[x].other(x) for x in group if partners[x].other(x) not in measured]
        if len(displaced) == 2:
            new.append(PairSpec(*displaced))
        else:
            loose += displaced
    if loose:
        new.append(PairSpec(*loose))
    return new


def _components(old: list[PairSpec], new: list[PairSpec]) -> list[tuple[list[PairSpec], list[PairSpec]]]:
    parent = {p: p for p in old + new}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for o in old:
        for n in new:
            if set(o) & set(n):
                parent[find(o)] = find(n)
    groups: dict = {}
    for p in old:
        groups.setdefault(find(p), ([], []))[0].append(p)
    for p in new:
        groups.setdefault(find(p), ([], []))[1].append(p)
    return list(groups.values())


def joint_measure_diagram(diagram: Mapping[PairSpec, Parity], pa: PairSpec, pb: PairSpec):
    """Four-box parity measurement on a standard diagram.

    With both pairs already connected the outcome is their XOR.  Otherwise
    every connection through a measured box is pushed to the back, the boxes
    re-pair (see :func:`joint_partners`), and new parities are drawn
    uniformly among assignments that keep, within each group of connections
    linked by shared boxes, the XOR of new parities equal to the XOR of old.
    """
    if len({*pa, *pb}) != 4:
        raise ValueError("joint measurement needs four distinct boxes")
    if pa in diagram and pb in diagram:
        return [(readout(diagram, pa) ^ readout(diagram, pb), Fraction(1), dict(diagram))]
    partners = partner_map(diagram)
    old = sorted({partners[x] for x in (*pa, *pb)})
    new = joint_partners(diagram, pa, pb)
    work = dict(diagram)
    bystanders = [c for c in diagram if c not in old]
    send_back(work, old, bystanders)
    comps = _components(old, new)
    options = []
    for assignment in itertools.product(Parity, repeat=len(new)):
        chosen = dict(zip(new, assignment))
        if all(xor_all(chosen[n] for n in ns) == xor_all(work[o] for o in os_) for os_, ns in comps):
            options.append(chosen)
    weight = Fraction(1, len(options))
    branches = []
    for chosen in options:
        out = {c: work[c] for c in bystanders}
        out.update(chosen)
        send_back(out, new, bystanders)
        branches.append((readout(out, pa) ^ readout(out, pb), weight, out))
    return _merge(branches)


def total_parity(diagram: Mapping[PairSpec, Parity]) -> Parity:
    return xor_all(diagram.values())


def render(diagram: Mapping[PairSpec, Parity]) -> list[str]:
    return [f"{p}={par.label}" for p, par in sorted(diagram.items())]
