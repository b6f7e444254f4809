"""Graph states with vertex operators.

A :class:`GraphState` represents ``(prod_v vop_v) |G>`` where ``|G>`` is the
canonical graph state of the edge set. Pauli measurements use the standard
graph-state rules (Hein, Eisert & Briegel, PRA 69, 062311): a measurement of
``P`` on a vertex with VOP ``C`` is a measurement of ``C^dagger P C`` on the
bare graph, followed by the Z/Y/X graph update and byproduct Cliffords that
are multiplied onto the surviving vertices' VOPs.

Operations mutate the state in place; use :meth:`GraphState.copy` to branch.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Literal, Optional

from rgs_repeater import clifford as cl
from rgs_repeater.clifford import LocalClifford

Basis = Literal["X", "Y", "Z"]


class GraphStateError(ValueError):
    """Raised when an operation's precondition on the graph is violated."""


@dataclass(frozen=True)
class MeasurementRecord:
    vertex: int
    basis: Basis
    outcome: Optional[int]  # 0 for the +1 eigenvalue, None when lost
    lost: bool = False

    def __post_init__(self) -> None:
        if self.lost and self.outcome is not None:
            raise ValueError("a lost photon has no outcome")


class GraphState:
    """Graph plus per-vertex local Clifford.

    Parameters
    ----------
    restrict_vops : bool
        When set, :meth:`check_restricted` is called after every public
        operation and raises if any VOP left ``{I, Z}``.
    """

    def __init__(self, restrict_vops: bool = False) -> None:
        self._adj: dict[int, set[int]] = {}
        self._vop: dict[int, LocalClifford] = {}
        self._next_id = 0
        self.restrict_vops = restrict_vops

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[int],
        edges: Iterable[tuple[int, int]] = (),
        vops: Mapping[int, LocalClifford] | None = None,
    ) -> GraphState:
        g = cls()
        for v in vertices:
            g.add_vertex(vid=v)
        for u, v in edges:
            g.add_edge(u, v)
        for v, c in (vops or {}).items():
            g.set_vop(v, c)
        return g

    # -- construction / inspection -------------------------------------

    def add_vertex(self, vop: LocalClifford = cl.I, vid: int | None = None) -> int:
        if vid is None:
            vid = self._next_id
        elif vid < self._next_id and vid not in self._adj:
            raise GraphStateError(f"vertex id {vid} was already used")
        if vid in self._adj:
            raise GraphStateError(f"vertex {vid} already exists")
        self._adj[vid] = set()
        self._vop[vid] = vop
        self._next_id = max(self._next_id, vid + 1)
        return vid

    def add_edge(self, u: int, v: int) -> None:
        """Insert an edge of the underlying graph (no VOP bookkeeping)."""
        self._require(u, v)
        if u == v:
            raise GraphStateError("self-loops are not allowed")
        self._adj[u].add(v)
        self._adj[v].add(u)

    def remove_edge(self, u: int, v: int) -> None:
        """Delete an edge of the underlying graph (no VOP bookkeeping)."""
        self._require(u, v)
        if v not in self._adj[u]:
            raise GraphStateError(f"no edge ({u}, {v})")
        self._adj[u].discard(v)
        self._adj[v].discard(u)

    def set_vop(self, v: int, vop: LocalClifford) -> None:
        self._require(v)
        self._vop[v] = vop

    @property
    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v: int) -> bool:
        return v in self._adj

    def neighbors(self, v: int) -> set[int]:
        self._require(v)
        return set(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u, nb in self._adj.items() for v in nb if u < v)

    def vop(self, v: int) -> LocalClifford:
        self._require(v)
        return self._vop[v]

    def vops(self) -> dict[int, LocalClifford]:
        return dict(self._vop)

    def copy(self) -> GraphState:
        g = GraphState(self.restrict_vops)
        g._adj = {v: set(nb) for v, nb in self._adj.items()}
        g._vop = dict(self._vop)
        g._next_id = self._next_id
        return g

    def check_restricted(self) -> None:
        bad = {v: c.name for v, c in self._vop.items() if c not in (cl.I, cl.Z)}
        if bad:
            raise GraphStateError(f"VOPs outside {{I, Z}}: {bad}")

    def dump(self) -> str:
        """Deterministic text form: ``u v`` edge lines, then ``vop id name``."""
        lines = [f"{u} {v}" for u, v in self.edges()]
        lines += [f"vop {v} {self._vop[v].name}" for v in self.vertices]
        return "\n".join(lines) + "\n"

    def _require(self, *vs: int) -> None:
        for v in vs:
            if v not in self._adj:
                raise GraphStateError(f"unknown vertex {v}")

    def _after_op(self) -> None:
        if self.restrict_vops:
            self.check_restricted()

    # -- graph-only primitives ------------------------------------------

    def _toggle(self, u: int, v: int) -> None:
        if v in self._adj[u]:
            self._adj[u].discard(v)
            self._adj[v].discard(u)
        else:
            self._adj[u].add(v)
            self._adj[v].add(u)

    def _complement_neighborhood(self, v: int) -> None:
        nb = sorted(self._adj[v])
        for i, a in enumerate(nb):
            for b in nb[i + 1 :]:
                self._toggle(a, b)

    def _remove(self, v: int) -> None:
        for u in self._adj.pop(v):
            self._adj[u].discard(v)
        del self._vop[v]

    def _right_multiply(self, v: int, c: LocalClifford) -> None:
        self._vop[v] = self._vop[v] @ c

    # -- public operations ------------------------------------------------

    def apply_cz(self, u: int, v: int) -> None:
        """Apply CZ between ``u`` and ``v``; both VOPs must be diagonal."""
        self._require(u, v)
        if u == v:
            raise GraphStateError("CZ needs two distinct vertices")
        for w in (u, v):
            if not self._vop[w].is_diagonal:
                raise GraphStateError(f"vertex {w} has non-diagonal VOP {self._vop[w].name}")
        self._toggle(u, v)
        self._after_op()

    def local_complement(self, v: int) -> None:
        """Local complementation at ``v`` leaving the represented state unchanged."""
        self._require(v)
        self._complement_neighborhood(v)
        self._right_multiply(v, cl.SQRT_IX)
        for b in self._adj[v]:
            self._right_multiply(b, cl.SQRT_MIZ)
        self._after_op()

    def bare_basis(self, v: int, basis: Basis) -> tuple[int, Basis]:
        """Pauli measured on the bare graph when ``basis`` is measured at ``v``."""
        return self.vop(v).conjugate(basis)

    def outcome_probability(self, v: int, basis: Basis, outcome: int) -> float:
        """Born probability of ``outcome`` (0, 1/2 or 1 for stabilizer states)."""
        sign, q = self.bare_basis(v, basis)
        if self._adj[v] or q != "X":
            return 0.5
        forced = 0 if sign == 1 else 1
        return 1.0 if outcome == forced else 0.0

    def measure(
        self, v: int, basis: Basis, outcome: int, special_neighbor: int | None = None
    ) -> MeasurementRecord:
        """Measure ``basis`` on ``v`` with the given outcome and remove ``v``.

        Raises :class:`GraphStateError` for a zero-probability outcome.
        """
        self._require(v)
        if outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")
        if self.outcome_probability(v, basis, outcome) == 0.0:
            raise GraphStateError(f"outcome {outcome} of {basis} on {v} has probability 0")
        sign, q = self.bare_basis(v, basis)
        bare = outcome ^ (sign == -1)
        if q == "Z":
            self._bare_z(v, bare)
        elif q == "Y":
            self._bare_y(v, bare)
        else:
            self._bare_x(v, bare, special_neighbor)
        self._after_op()
        return MeasurementRecord(v, basis, outcome)

    def measure_z(self, v: int, outcome: int) -> MeasurementRecord:
        return self.measure(v, "Z", outcome)

    def measure_x(self, v: int, outcome: int, special_neighbor: int | None = None) -> MeasurementRecord:
        return self.measure(v, "X", outcome, special_neighbor)

    def measure_xx(
        self, u: int, v: int, outcomes: tuple[int, int]
    ) -> tuple[MeasurementRecord, MeasurementRecord]:
        """X on two adjacent vertices that share no neighbours.

        The former neighbours of ``u`` and of ``v`` are joined pairwise; for
        diagonal VOPs the byproducts left on them are ``I`` or ``Z``.
        """
        self._require(u, v)
        if v not in self._adj[u]:
            raise GraphStateError(f"{u} and {v} are not adjacent")
        if self._adj[u] & self._adj[v]:
            raise GraphStateError(f"{u} and {v} share neighbours")
        restrict, self.restrict_vops = self.restrict_vops, False
        try:
            first = self.measure(u, "X", outcomes[0], special_neighbor=v)
            second = self.measure(v, "X", outcomes[1])
        finally:
            self.restrict_vops = restrict
        self._after_op()
        return first, second

    # -- bare-graph measurement rules ------------------------------------

    def _bare_z(self, a: int, bare: int) -> None:
        nb = self._adj[a]
        if bare:
            for b in nb:
                self._right_multiply(b, cl.Z)
        self._remove(a)

    def _bare_y(self, a: int, bare: int) -> None:
        nb = list(self._adj[a])
        byproduct = cl.SQRT_IZ if bare else cl.SQRT_MIZ
        self._complement_neighborhood(a)
        for b in nb:
            self._right_multiply(b, byproduct)
        self._remove(a)

    def _bare_x(self, a: int, bare: int, b0: int | None) -> None:
        na = self._adj[a]
        if not na:
            self._remove(a)
            return
        if b0 is None:
            b0 = min(na)
        elif b0 not in na:
            raise GraphStateError(f"special neighbour {b0} is not adjacent to {a}")
        nb0 = self._adj[b0]
        if bare == 0:
            zs = na - nb0 - {b0}
            root = cl.SQRT_IY
        else:
            zs = nb0 - na - {a}
            root = cl.SQRT_MIY
        zs = set(zs)
        self._complement_neighborhood(b0)
        self._complement_neighborhood(a)
        self._complement_neighborhood(b0)
        self._right_multiply(b0, root)
        for b in zs:
            self._right_multiply(b, cl.Z)
        self._remove(a)
