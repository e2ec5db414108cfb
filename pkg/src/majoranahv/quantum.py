"""Dense state-vector reference engine for 2n Majorana modes.

Modes are fermionized with a Jordan-Wigner string over ``n`` qubits:
``gamma_{2k-1} = Z..Z X_k`` and ``gamma_{2k} = Z..Z Y_k``.  Which string is
used is internal; the visible convention is that pair ``(a, b)`` with
``a < b`` reads ``even`` on the +1 eigenspace of ``i gamma_a gamma_b``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .core import Direction, PairSpec, Parity, check_matching, normalize_pairs

PRUNE = 1e-12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@functools.lru_cache(maxsize=None)
def majoranas(box_count: int) -> tuple[np.ndarray, ...]:
    """Matrices of gamma_1..gamma_{2n}; index 0 is gamma_1."""
    if box_count % 2 or box_count < 2:
        raise ValueError("box count must be a positive even number")
    n = box_count // 2
    ops = []
    for k in range(n):
        for local in (_X, _Y):
            factors = [_Z] * k + [local] + [_I2] * (n - k - 1)
            m = factors[0]
            for f in factors[1:]:
                m = np.kron(m, f)
            m.setflags(write=False)
            ops.append(m)
    return tuple(ops)


def gamma(box_count: int, i: int) -> np.ndarray:
    if not 1 <= i <= box_count:
        raise ValueError(f"mode {i} outside 1..{box_count}")
    return majoranas(box_count)[i - 1]


@functools.lru_cache(maxsize=None)
def pair_operator(box_count: int, a: int, b: int) -> np.ndarray:
    """``i gamma_a gamma_b`` for the canonical ordering ``a < b``."""
    a, b = min(a, b), max(a, b)
    m = 1j * gamma(box_count, a) @ gamma(box_count, b)
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=None)
def joint_operator(box_count: int, pa: PairSpec, pb: PairSpec) -> np.ndarray:
    m = pair_operator(box_count, pa.a, pa.b) @ pair_operator(box_count, pb.a, pb.b)
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=None)
def total_parity_operator(box_count: int) -> np.ndarray:
    m = np.eye(2 ** (box_count // 2), dtype=complex)
    for k in range(1, box_count, 2):
        m = m @ pair_operator(box_count, k, k + 1)
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=None)
def braid_unitary(box_count: int, a: int, b: int, direction: Direction) -> np.ndarray:
    """``(1 + gamma_a gamma_b)/sqrt 2`` for CCW with ``a < b``; the inverse for CW."""
    a, b = min(a, b), max(a, b)
    gg = gamma(box_count, a) @ gamma(box_count, b)
    sign = 1 if direction is Direction.CCW else -1
    u = (np.eye(gg.shape[0]) + sign * gg) / np.sqrt(2)
    u.setflags(write=False)
    return u


def expectation(op: np.ndarray, psi: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, op @ psi)))


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray
    box_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def total_parity(self) -> Parity:
        v = expectation(total_parity_operator(self.box_count), self.amplitudes)
        if abs(abs(v) - 1) > 1e-9:
            raise ValueError("state has no definite total parity")
        return Parity.EVEN if v > 0 else Parity.ODD

    def pair_expectation(self, a: int, b: int) -> float:
        return expectation(pair_operator(self.box_count, a, b), self.amplitudes)

    def fidelity(self, other: "QuantumState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def same_ray(self, other: "QuantumState", tol: float = 1e-10) -> bool:
        return self.box_count == other.box_count and self.fidelity(other) >= 1 - tol


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def q_init(pairs, box_count: int, total_parity: Parity | None = None) -> QuantumState:
    """Joint eigenstate of ``i gamma_a gamma_b`` with the declared parities.

    ``total_parity``, when given, must agree with the parity the matching implies.
    """
    pairs = normalize_pairs(pairs)
    check_matching([p for p, _ in pairs], box_count)
    dim = 2 ** (box_count // 2)
    proj = np.eye(dim, dtype=complex)
    for p, parity in pairs:
        sign = 1 if parity is Parity.EVEN else -1
        proj = proj @ (np.eye(dim) + sign * pair_operator(box_count, p.a, p.b)) / 2
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    v = proj[:, col]
    v = _fix_phase(v / np.linalg.norm(v))
    state = QuantumState(v, box_count)
    if total_parity is not None and state.total_parity is not Parity(total_parity):
        raise ValueError(
            f"declared parities fix total parity {state.total_parity.label}, "
            f"not {Parity(total_parity).label}"
        )
    return state


def q_braid(state: QuantumState, a: int, b: int, direction: Direction = Direction.CCW) -> QuantumState:
    if a == b:
        raise ValueError("braid needs two distinct modes")
    u = braid_unitary(state.box_count, a, b, direction)
    return QuantumState(u @ state.amplitudes, state.box_count)


def _project(state: QuantumState, op: np.ndarray):
    dim = op.shape[0]
    branches = []
    for parity, sign in ((Parity.EVEN, 1), (Parity.ODD, -1)):
        v = ((np.eye(dim) + sign * op) / 2) @ state.amplitudes
        prob = float(np.real(np.vdot(v, v)))
        if prob > PRUNE:
            branches.append((parity, prob, QuantumState(v / np.sqrt(prob), state.box_count)))
    return branches


def q_measure_pair(state: QuantumState, p: PairSpec):
    """Projective measurement of ``i gamma_a gamma_b``: list of (parity, probability, state)."""
    return _project(state, pair_operator(state.box_count, p.a, p.b))


def q_joint_measure(state: QuantumState, pa: PairSpec, pb: PairSpec):
    """Measurement of ``(i gamma_a1 gamma_a2)(i gamma_b1 gamma_b2)``; even is +1."""
    if len({*pa, *pb}) != 4:
        raise ValueError("joint measurement needs four distinct modes")
    return _project(state, joint_operator(state.box_count, pa, pb))
