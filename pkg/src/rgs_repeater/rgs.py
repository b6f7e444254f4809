"""Repeater graph state (RGS) construction.

Each of the 2m arms has one outer photon and a tree-encoded inner qubit.
The inner qubit is logical: its tree root is not a photon. Level-1 tree
nodes carry the logical qubit's edges, so

* the outer photon of an arm is adjacent to every level-1 node of that arm;
* level-1 nodes of different arms are fully connected (the encoded form of
  the complete graph on the 2m inner qubits);
* every level-k node has ``b[k]`` children at level k+1.

With ``b = (1,)`` this is the plain, unencoded RGS.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from math import prod
from typing import Literal, Union

import numpy as np

from rgs_repeater import clifford as cl
from rgs_repeater.graphstate import GraphState

Side = Literal["left", "right"]
SIDES: tuple[Side, Side] = ("left", "right")


@dataclass(frozen=True)
class RgsSpec:
    m: int
    b: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if not self.b or any(x < 1 for x in self.b):
            raise ValueError(f"branching vector needs n >= 1 positive entries, got {self.b}")

    @property
    def level_sizes(self) -> list[int]:
        """Nodes per arm at levels 1..n."""
        return [prod(self.b[: k + 1]) for k in range(len(self.b))]

    @property
    def tree_size(self) -> int:
        return sum(self.level_sizes)

    @property
    def photons_per_half(self) -> int:
        return self.m * (1 + self.tree_size)

    def __str__(self) -> str:
        return f"m={self.m} b=({','.join(map(str, self.b))})"


def photons_per_rgs(spec: RgsSpec) -> int:
    """2m * (1 + sum_k prod_{i<=k} b_i): outer photon plus tree per arm."""
    return 2 * spec.photons_per_half


@dataclass(frozen=True)
class Outer:
    side: Side
    arm: int


@dataclass(frozen=True)
class InnerTree:
    side: Side
    arm: int
    level: int
    position: tuple[int, ...]


Role = Union[Outer, InnerTree]


@dataclass
class Arm:
    """Vertex ids of one arm; ``levels[k]`` has shape ``b[:k+1]``."""

    outer: int
    levels: list[np.ndarray]

    def tree_vertices(self) -> list[int]:
        return [int(v) for lvl in self.levels for v in lvl.ravel()]


@dataclass
class RgsInstance:
    spec: RgsSpec
    graph: GraphState
    roles: dict[int, Role]
    arms: dict[Side, list[Arm]] = field(default_factory=dict)

    def vertices(self, side: Side | None = None) -> list[int]:
        return sorted(v for v, r in self.roles.items() if side is None or r.side == side)


def build_rgs(
    spec: RgsSpec,
    vop_assignment: Mapping[int, cl.LocalClifford] | Literal["identity"] = "identity",
    graph: GraphState | None = None,
) -> RgsInstance:
    """Build RGS(m, b) into ``graph`` (a fresh one by default).

    Vertices are numbered side by side, then arm by arm, outer photon first
    and tree in level order. ``vop_assignment`` maps *relative* indices
    (0 for the first vertex of this RGS) to ``I`` or ``Z``.
    """
    g = graph if graph is not None else GraphState()
    roles: dict[int, Role] = {}
    arms: dict[Side, list[Arm]] = {}
    for side in SIDES:
        arms[side] = []
        for j in range(spec.m):
            outer = g.add_vertex()
            roles[outer] = Outer(side, j)
            levels = []
            for k, size in enumerate(spec.level_sizes):
                ids = np.array([g.add_vertex() for _ in range(size)], dtype=np.int64)
                ids = ids.reshape(spec.b[: k + 1])
                for pos in np.ndindex(ids.shape):
                    roles[int(ids[pos])] = InnerTree(side, j, k + 1, pos)
                levels.append(ids)
            arms[side].append(Arm(outer, levels))

    all_arms = arms["left"] + arms["right"]
    for a, arm in enumerate(all_arms):
        first = arm.levels[0].ravel()
        for c in first:
            g.add_edge(arm.outer, int(c))
        for other in all_arms[a + 1 :]:
            for c in first:
                for d in other.levels[0].ravel():
                    g.add_edge(int(c), int(d))
        for k in range(len(arm.levels) - 1):
            parents, children = arm.levels[k], arm.levels[k + 1]
            for pos in np.ndindex(parents.shape):
                for c in children[pos].ravel():
                    g.add_edge(int(parents[pos]), int(c))

    if vop_assignment != "identity":
        base = min(roles)
        for rel, vop in vop_assignment.items():
            if vop not in (cl.I, cl.Z):
                raise ValueError("RGS VOPs are restricted to I or Z")
            g.set_vop(base + rel, vop)
    return RgsInstance(spec, g, roles, arms)


def random_vop_assignment(spec: RgsSpec, rng: np.random.Generator) -> dict[int, cl.LocalClifford]:
    """Each photon independently gets Z with probability 1/2."""
    bits = rng.integers(0, 2, size=photons_per_rgs(spec))
    return {i: cl.Z if b else cl.I for i, b in enumerate(bits)}


def emission_order(instance: RgsInstance, side: Side) -> list[int]:
    """Outer photons of ``side`` first, then tree photons level by level."""
    arms = instance.arms[side]
    order = [a.outer for a in arms]
    for k in range(len(instance.spec.b)):
        for a in arms:
            order.extend(int(v) for v in a.levels[k].ravel())
    return order
