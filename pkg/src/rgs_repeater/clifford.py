"""Single-qubit Clifford group used as vertex operators (VOPs).

The 24 elements are generated from H and S and stored as 2x2 unitaries
normalised up to global phase. Every element is interned, so equality and
hashing are by table index.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_SQ2 = 1 / np.sqrt(2)

PAULI_MATRICES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _canonical(mat: np.ndarray) -> np.ndarray:
    flat = mat.ravel()
    k = int(np.argmax(np.abs(flat) > 1e-9))
    return mat * (abs(flat[k]) / flat[k])


def _key(mat: np.ndarray) -> tuple[complex, ...]:
    return tuple(np.round(_canonical(mat).ravel(), 8) + 0.0)


def _rot(pauli: str, sign: int) -> np.ndarray:
    """exp(sign * i*pi/4 * P), i.e. sqrt(sign * i P)."""
    return _SQ2 * (PAULI_MATRICES["I"] + sign * 1j * PAULI_MATRICES[pauli])


@lru_cache(maxsize=None)
def _tables() -> tuple[list[np.ndarray], dict[tuple, int], np.ndarray, list[dict[str, tuple[int, str]]]]:
    h = _SQ2 * np.array([[1, 1], [1, -1]], dtype=complex)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)
    mats = [np.eye(2, dtype=complex)]
    index = {_key(mats[0]): 0}
    frontier = [mats[0]]
    while frontier:
        nxt = []
        for m in frontier:
            for g in (h, s):
                cand = _canonical(g @ m)
                k = _key(cand)
                if k not in index:
                    index[k] = len(mats)
                    mats.append(cand)
                    nxt.append(cand)
        frontier = nxt
    assert len(mats) == 24
    n = len(mats)
    mult = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            mult[i, j] = index[_key(mats[i] @ mats[j])]
    conj: list[dict[str, tuple[int, str]]] = []
    for m in mats:
        row = {}
        for p in "XYZ":
            img = m.conj().T @ PAULI_MATRICES[p] @ m
            for q in "XYZ":
                for sign in (1, -1):
                    if np.allclose(img, sign * PAULI_MATRICES[q]):
                        row[p] = (sign, q)
        conj.append(row)
    return mats, index, mult, conj


class LocalClifford:
    """One of the 24 single-qubit Clifford operators, up to global phase."""

    __slots__ = ("index",)
    _instances: list[LocalClifford] = []

    def __new__(cls, index: int) -> LocalClifford:
        if not cls._instances:
            for i in range(24):
                obj = object.__new__(cls)
                obj.index = i
                cls._instances.append(obj)
        return cls._instances[index]

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> LocalClifford:
        try:
            return cls(_tables()[1][_key(np.asarray(mat, dtype=complex))])
        except KeyError:
            raise ValueError("matrix is not a single-qubit Clifford") from None

    @property
    def matrix(self) -> np.ndarray:
        return _tables()[0][self.index].copy()

    def __matmul__(self, other: LocalClifford) -> LocalClifford:
        return LocalClifford(int(_tables()[2][self.index, other.index]))

    def dagger(self) -> LocalClifford:
        return LocalClifford.from_matrix(self.matrix.conj().T)

    def conjugate(self, pauli: str) -> tuple[int, str]:
        """Return ``(sign, Q)`` with ``C^dagger P C = sign * Q``."""
        return _tables()[3][self.index][pauli]

    @property
    def is_diagonal(self) -> bool:
        return self.conjugate("Z") == (1, "Z")

    @property
    def name(self) -> str:
        return _NAMES.get(self.index, f"C{self.index}")

    def __repr__(self) -> str:
        return f"LocalClifford({self.name})"

    def __reduce__(self):
        return (LocalClifford, (self.index,))


I = LocalClifford.from_matrix(PAULI_MATRICES["I"])
X = LocalClifford.from_matrix(PAULI_MATRICES["X"])
Y = LocalClifford.from_matrix(PAULI_MATRICES["Y"])
Z = LocalClifford.from_matrix(PAULI_MATRICES["Z"])
H = LocalClifford.from_matrix(_SQ2 * np.array([[1, 1], [1, -1]]))
S = LocalClifford.from_matrix(np.diag([1, 1j]))
SDG = LocalClifford.from_matrix(np.diag([1, -1j]))
SQRT_IX = LocalClifford.from_matrix(_rot("X", 1))
SQRT_MIX = LocalClifford.from_matrix(_rot("X", -1))
SQRT_IY = LocalClifford.from_matrix(_rot("Y", 1))
SQRT_MIY = LocalClifford.from_matrix(_rot("Y", -1))
SQRT_IZ = LocalClifford.from_matrix(_rot("Z", 1))
SQRT_MIZ = LocalClifford.from_matrix(_rot("Z", -1))

_NAMES = {
    c.index: n
    for n, c in [
        ("sqrt(iX)", SQRT_IX), ("sqrt(-iX)", SQRT_MIX),
        ("sqrt(iY)", SQRT_IY), ("sqrt(-iY)", SQRT_MIY),
        ("H", H), ("S", S), ("Sdg", SDG),
        ("I", I), ("X", X), ("Y", Y), ("Z", Z),
    ]
}

PAULIS = {"I": I, "X": X, "Y": Y, "Z": Z}
ALL = tuple(LocalClifford(i) for i in range(24))
