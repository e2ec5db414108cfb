"""Majorana stabilizer oracle.

A monomial is ``sign * i^(k) * gamma_{m1} ... gamma_{m2k}`` with modes in
ascending order; that canonical form is Hermitian and squares to one.  Mode
sets are bitmasks (bit ``i-1`` for mode ``i``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Direction, PairSpec, Parity, check_matching, normalize_pairs

HALF = Fraction(1, 2)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _modes(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _mask(modes) -> int:
    m = 0
    for i in modes:
        m |= 1 << (i - 1)
    return m


def _swap_count(s: int, t: int) -> int:
    """Number of pairs (x in s, y in t) with x > y."""
    count = 0
    for y in _modes(t):
        count += _popcount(s >> y)  # modes of s strictly above y
    return count


@dataclass(frozen=True, order=True)
class MajoranaMonomial:
    mask: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if _popcount(self.mask) % 2:
            raise ValueError("monomial needs an even number of modes")

    @classmethod
    def of(cls, modes, sign: int = 1) -> "MajoranaMonomial":
        modes = tuple(modes)
        if len(set(modes)) != len(modes):
            raise ValueError(f"repeated mode in {modes}")
        return cls(_mask(modes), sign)

    @classmethod
    def pair(cls, p: PairSpec, parity: Parity = Parity.EVEN) -> "MajoranaMonomial":
        return cls.of((p.a, p.b), 1 if parity is Parity.EVEN else -1)

    @classmethod
    def joint(cls, pa: PairSpec, pb: PairSpec) -> "MajoranaMonomial":
        """``(i g_a1 g_a2)(i g_b1 g_b2)`` in canonical form."""
        return cls.pair(pa) * cls.pair(pb)

    @property
    def modes(self) -> tuple[int, ...]:
        return _modes(self.mask)

    @property
    def weight(self) -> int:
        return _popcount(self.mask)

    def commutes(self, other: "MajoranaMonomial") -> bool:
        return _popcount(self.mask & other.mask) % 2 == 0

    def __mul__(self, other: "MajoranaMonomial") -> "MajoranaMonomial":
        # gamma_S gamma_T = (-1)^swaps gamma_{S^T}; i-powers leave i^{|S&T|}
        phase = _swap_count(self.mask, other.mask) * 2 + _popcount(self.mask & other.mask)
        phase %= 4
        if phase % 2:
            raise ValueError("product of anticommuting monomials is not Hermitian")
        sign = self.sign * other.sign * (-1 if phase == 2 else 1)
        return MajoranaMonomial(self.mask ^ other.mask, sign)

    def __neg__(self) -> "MajoranaMonomial":
        return MajoranaMonomial(self.mask, -self.sign)

    def conjugate_braid(self, a: int, b: int, direction: Direction) -> "MajoranaMonomial":
        """Image under ``U . U^dagger`` with ``U = (1 + g_a g_b)/sqrt 2`` (CCW, a < b).

        CCW sends ``g_a -> -g_b`` and ``g_b -> g_a``; CW is the inverse.
        """
        a, b = min(a, b), max(a, b)
        if direction is Direction.CCW:
            image = {a: (b, -1), b: (a, 1)}
        else:
            image = {a: (b, 1), b: (a, -1)}
        sign = self.sign
        seq = []
        for m in self.modes:
            target, s = image.get(m, (m, 1))
            sign *= s
            seq.append(target)
        inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
        if inversions % 2:
            sign = -sign
        return MajoranaMonomial(_mask(seq), sign)

    def __str__(self) -> str:
        body = "".join(f"g{m}" for m in self.modes)
        return ("+" if self.sign > 0 else "-") + (f"i^{self.weight // 2}" if body else "") + body


def _reduce(vectors: list[int], target: int):
    """Express ``target`` as XOR of a subset of ``vectors``; indices or None."""
    basis: dict[int, tuple[int, int]] = {}  # pivot -> (vector, index bitset)
    for idx, v in enumerate(vectors):
        used = 1 << idx
        while v:
            pivot = v.bit_length() - 1
            if pivot not in basis:
                basis[pivot] = (v, used)
                break
            bv, bu = basis[pivot]
            v ^= bv
            used ^= bu
    used = 0
    while target:
        pivot = target.bit_length() - 1
        if pivot not in basis:
            return None
        bv, bu = basis[pivot]
        target ^= bv
        used ^= bu
    return [i for i in range(len(vectors)) if used >> i & 1]


def rank(masks: list[int]) -> int:
    basis: dict[int, int] = {}
    for v in masks:
        while v:
            pivot = v.bit_length() - 1
            if pivot not in basis:
                basis[pivot] = v
                break
            v ^= basis[pivot]
    return len(basis)


@dataclass(frozen=True)
class StabGroup:
    generators: tuple[MajoranaMonomial, ...]
    box_count: int

    def check(self) -> None:
        gens = self.generators
        if len(gens) != self.box_count // 2:
            raise AssertionError(f"expected {self.box_count // 2} generators, got {len(gens)}")
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                if not g.commutes(h):
                    raise AssertionError(f"{g} and {h} anticommute")
        if rank([g.mask for g in gens]) != len(gens):
            raise AssertionError("generators are not independent")

    def value(self, m: MajoranaMonomial) -> int | None:
        """+1/-1 if ``m`` is determined by the group, None otherwise."""
        if not all(m.commutes(g) for g in self.generators):
            return None
        idx = _reduce([g.mask for g in self.generators], m.mask)
        if idx is None:
            return None
        prod = MajoranaMonomial(0, 1)
        for i in idx:
            prod = prod * self.generators[i]
        return prod.sign * m.sign

    def canonical(self) -> frozenset:
        """The full group's element set; equal for equal states."""
        elems = {MajoranaMonomial(0, 1)}
        for g in self.generators:
            elems |= {e * g for e in elems}
        return frozenset(elems)

    @property
    def total_parity(self) -> Parity:
        full = MajoranaMonomial((1 << self.box_count) - 1, 1)
        # i^n g1..g2n equals the product of i g_{2k-1} g_{2k}
        v = self.value(full)
        return Parity.EVEN if v == 1 else Parity.ODD


def stab_init(pairs, box_count: int) -> StabGroup:
    pairs = normalize_pairs(pairs)
    check_matching([p for p, _ in pairs], box_count)
    return StabGroup(tuple(MajoranaMonomial.pair(p, par) for p, par in pairs), box_count)


def stab_braid(group: StabGroup, a: int, b: int, direction: Direction = Direction.CCW) -> StabGroup:
    if a == b:
        raise ValueError("braid needs two distinct modes")
    gens = tuple(g.conjugate_braid(a, b, direction) for g in group.generators)
    return StabGroup(gens, group.box_count)


def stab_measure(group: StabGroup, m: MajoranaMonomial):
    """Branches (parity, probability, group) for measuring ``m`` (even is +1)."""
    if m.weight not in (2, 4):
        raise ValueError(f"can only measure 2- or 4-mode parities, got {m}")
    if any(mode > group.box_count for mode in m.modes):
        raise ValueError(f"{m} acts outside {group.box_count} modes")
    gens = list(group.generators)
    anti = [i for i, g in enumerate(gens) if not g.commutes(m)]
    if not anti:
        v = group.value(m)
        assert v is not None, "maximal group must fix every commuting parity"
        return [(Parity.EVEN if v == 1 else Parity.ODD, Fraction(1), group)]
    pivot = anti[0]
    for i in anti[1:]:
        gens[i] = gens[i] * gens[pivot]
    branches = []
    for parity in (Parity.EVEN, Parity.ODD):
        new = list(gens)
        new[pivot] = m if parity is Parity.EVEN else -m
        branches.append((parity, HALF, StabGroup(tuple(new), group.box_count)))
    return branches


def stab_measure_pair(group: StabGroup, p: PairSpec):
    return stab_measure(group, MajoranaMonomial.pair(p))


def stab_joint_measure(group: StabGroup, pa: PairSpec, pb: PairSpec):
    if len({*pa, *pb}) != 4:
        raise ValueError("joint measurement needs four distinct modes")
    return stab_measure(group, MajoranaMonomial.joint(pa, pb))
