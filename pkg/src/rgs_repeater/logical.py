"""Logical X and Z measurements of tree-encoded inner qubits.

Level-1 tree nodes carry the logical qubit: logical Z is the parity of the
Z values of all level-1 nodes, logical X is the X value of any one level-1
node times the Z values of its children. A node's Z value can be recovered
without the photon ("indirect" Z) from one child measured in X together with
the Z values of that child's own children, recursively.

Arrays are indexed ``levels[k]`` for tree level k+1 with shape
``prefix + b[:k+1]``; any leading ``prefix`` (arms, Monte Carlo samples) is
carried through. Outcome arrays hold *effective* bits, i.e. X outcomes
already corrected for a Z vertex operator.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

LogicalBasis = Literal["X", "Z"]


def pattern_basis(logical: LogicalBasis, level: int) -> str:
    """Physical basis at tree ``level`` (1-based) for a logical measurement."""
    odd = level % 2 == 1
    if logical == "Z":
        return "Z" if odd else "X"
    return "X" if odd else "Z"


def _xor_reduce(a: np.ndarray) -> np.ndarray:
    return np.bitwise_xor.reduce(a, axis=-1)


def _first(values: np.ndarray, ok: np.ndarray) -> np.ndarray:
    idx = np.argmax(ok, axis=-1)[..., None]
    return np.take_along_axis(values, idx, axis=-1)[..., 0]


def _z_values(
    arrived: Sequence[np.ndarray], outcomes: Sequence[np.ndarray], start: int
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Direct-or-indirect Z success and value for level indices start, start+2, ..."""
    n = len(arrived)
    out: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for k in reversed(range(start, n, 2)):
        direct = arrived[k]
        if k + 1 >= n:
            out[k] = (direct, outcomes[k])
            continue
        child_ok = arrived[k + 1]
        child_val = outcomes[k + 1]
        if k + 2 < n:
            gc_ok, gc_val = out[k + 2]
            child_ok = child_ok & gc_ok.all(axis=-1)
            child_val = child_val ^ _xor_reduce(gc_val)
        ok = direct | child_ok.any(axis=-1)
        val = np.where(direct, outcomes[k], _first(child_val, child_ok))
        out[k] = (ok, val)
    return out


@dataclass
class LogicalResult:
    success: np.ndarray  # bool, shape prefix
    value: np.ndarray  # int, meaningful only where success


def logical_z(arrived: Sequence[np.ndarray], outcomes: Sequence[np.ndarray]) -> LogicalResult:
    """Succeeds iff every level-1 Z value is available (direct or indirect)."""
    ok, val = _z_values(arrived, outcomes, 0)[0]
    val = np.where(ok, val, 0)
    return LogicalResult(ok.all(axis=-1), _xor_reduce(val))


def logical_x(arrived: Sequence[np.ndarray], outcomes: Sequence[np.ndarray]) -> LogicalResult:
    """Succeeds iff at least one level-1 branch yields an X value.

    The first (lowest index) complete branch supplies the value.
    """
    branch_ok = arrived[0]
    branch_val = outcomes[0]
    if len(arrived) > 1:
        ok2, val2 = _z_values(arrived, outcomes, 1)[1]
        branch_ok = branch_ok & ok2.all(axis=-1)
        branch_val = branch_val ^ _xor_reduce(np.where(ok2, val2, 0))
    return LogicalResult(branch_ok.any(axis=-1), _first(branch_val, branch_ok))


def logical_measure(
    basis: LogicalBasis, arrived: Sequence[np.ndarray], outcomes: Sequence[np.ndarray] | None = None
) -> LogicalResult:
    if outcomes is None:
        outcomes = [np.zeros(a.shape, dtype=np.int64) for a in arrived]
    arrived = [np.asarray(a, dtype=bool) for a in arrived]
    outcomes = [np.asarray(o, dtype=np.int64) for o in outcomes]
    return logical_z(arrived, outcomes) if basis == "Z" else logical_x(arrived, outcomes)


def effective_outcomes(
    logical: LogicalBasis, raw: Sequence[np.ndarray], vop_bits: Sequence[np.ndarray]
) -> list[np.ndarray]:
    """Fold Z vertex operators into the outcomes of X-measured levels."""
    out = []
    for k, (r, v) in enumerate(zip(raw, vop_bits)):
        r = np.asarray(r, dtype=np.int64)
        out.append(r ^ np.asarray(v, dtype=np.int64) if pattern_basis(logical, k + 1) == "X" else r)
    return out
