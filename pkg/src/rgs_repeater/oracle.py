"""Dense state-vector reference used to check the graph-state engine.

Qubits are ordered by ascending vertex id; the first id is the most
significant tensor axis. Global phase is ignored everywhere.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from rgs_repeater.clifford import PAULI_MATRICES
from rgs_repeater.graphstate import GraphState

MAX_QUBITS = 22

_EIGVECS = {
    ("Z", 0): np.array([1, 0], dtype=complex),
    ("Z", 1): np.array([0, 1], dtype=complex),
    ("X", 0): np.array([1, 1], dtype=complex) / np.sqrt(2),
    ("X", 1): np.array([1, -1], dtype=complex) / np.sqrt(2),
    ("Y", 0): np.array([1, 1j], dtype=complex) / np.sqrt(2),
    ("Y", 1): np.array([1, -1j], dtype=complex) / np.sqrt(2),
}


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class DenseState:
    amplitudes: np.ndarray  # shape (2,) * n
    qubit_order: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.qubit_order)) != len(self.qubit_order):
            raise OracleError("duplicate qubits")
        if self.amplitudes.shape != (2,) * len(self.qubit_order):
            raise OracleError("amplitude shape does not match qubit order")
        if abs(np.linalg.norm(self.amplitudes) - 1) > 1e-9:
            raise OracleError("state is not normalised")

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def axis(self, q: int) -> int:
        try:
            return self.qubit_order.index(q)
        except ValueError:
            raise OracleError(f"qubit {q} not present") from None

    def apply_1q(self, q: int, mat: np.ndarray) -> DenseState:
        ax = self.axis(q)
        amp = np.moveaxis(np.tensordot(mat, self.amplitudes, axes=([1], [ax])), 0, ax)
        return DenseState(amp, self.qubit_order)


def apply_cz(amp: np.ndarray, i: int, j: int) -> np.ndarray:
    out = amp.copy()
    idx = [slice(None)] * amp.ndim
    idx[i] = 1
    idx[j] = 1
    out[tuple(idx)] *= -1
    return out


def dense_from_graph(state: GraphState) -> DenseState:
    """|+>^n, one CZ per edge, then each vertex's VOP."""
    order = tuple(state.vertices)
    n = len(order)
    if n > MAX_QUBITS:
        raise OracleError(f"{n} qubits exceeds the oracle cap of {MAX_QUBITS}")
    amp = np.full((2,) * n, 2 ** (-n / 2), dtype=complex)
    pos = {v: k for k, v in enumerate(order)}
    for u, v in state.edges():
        amp = apply_cz(amp, pos[u], pos[v])
    dense = DenseState(amp, order)
    for v in order:
        dense = dense.apply_1q(v, state.vop(v).matrix)
    return dense


def project_pauli(state: DenseState, vertex: int, basis: str, outcome: int) -> tuple[DenseState, float]:
    """Project ``vertex`` onto the ``basis`` eigenstate for ``outcome`` and drop it.

    Returns the normalised state of the remaining qubits and the Born
    probability of the outcome.
    """
    ax = state.axis(vertex)
    bra = _EIGVECS[(basis, outcome)].conj()
    rest = np.tensordot(bra, state.amplitudes, axes=([0], [ax]))
    prob = float(np.vdot(rest, rest).real)
    if prob < 1e-12:
        raise OracleError(f"outcome {outcome} of {basis} on {vertex} has zero probability")
    order = tuple(q for q in state.qubit_order if q != vertex)
    return DenseState(rest / np.sqrt(prob), order), prob


def fidelity(a: DenseState, b: DenseState) -> float:
    """|<a|b>|^2 for states on the same qubits."""
    if a.qubit_order != b.qubit_order:
        perm = [a.qubit_order.index(q) for q in b.qubit_order]
        a = DenseState(np.transpose(a.amplitudes, perm), b.qubit_order)
    return float(abs(np.vdot(a.vector, b.vector)) ** 2)


def canonical_bell(q1: int, q2: int) -> DenseState:
    amp = np.array([[1, 1], [1, -1]], dtype=complex) / 2
    return DenseState(amp, (q1, q2))


def bell_fidelity(state: DenseState, q1: int, q2: int, frame: Mapping[int, str] | None = None) -> float:
    """Fidelity with CZ|++> after applying the Pauli ``frame`` corrections."""
    if set(state.qubit_order) != {q1, q2} or len(state.qubit_order) != 2:
        raise OracleError(f"expected exactly qubits {{{q1}, {q2}}}, got {state.qubit_order}")
    for q, p in (frame or {}).items():
        state = state.apply_1q(q, PAULI_MATRICES[p])
    return fidelity(state, canonical_bell(q1, q2))
