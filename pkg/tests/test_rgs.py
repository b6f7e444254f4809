from __future__ import annotations

from math import prod

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgs_repeater import clifford as cl
from rgs_repeater.oracle import dense_from_graph
from rgs_repeater.rgs import (
    InnerTree,
    Outer,
    RgsSpec,
    build_rgs,
    emission_order,
    photons_per_rgs,
    random_vop_assignment,
)

from test_oracle import kron_circuit


def independent_count(m: int, b: tuple[int, ...]) -> int:
    """Per arm: one outer photon plus prod(b[:k]) tree photons at level k."""
    return 2 * m * (1 + sum(prod(b[:k]) for k in range(1, len(b) + 1)))


class TestSpec:
    @pytest.mark.parametrize("m,b", [(0, (1,)), (1, ()), (1, (0,)), (2, (3, -1))])
    def test_invalid(self, m, b):
        with pytest.raises(ValueError):
            RgsSpec(m, b)

    def test_level_sizes(self):
        assert RgsSpec(14, (10, 5)).level_sizes == [10, 50]

    @pytest.mark.parametrize(
        "m,b,expected",
        [((1), (1,), 4), (2, (2,), 12), (14, (10, 5), 1708), (2, (2, 2), 28)],
    )
    def test_photon_counts(self, m, b, expected):
        assert photons_per_rgs(RgsSpec(m, b)) == expected == independent_count(m, b)


class TestBuild:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.lists(st.integers(1, 3), min_size=1, max_size=3))
    def test_vertex_count_matches_formula(self, m, b):
        inst = build_rgs(RgsSpec(m, tuple(b)))
        assert len(inst.graph) == photons_per_rgs(inst.spec) == len(inst.roles)

    def test_smallest_instance_is_a_path(self):
        inst = build_rgs(RgsSpec(1, (1,)))
        (ol,), (or_,) = [[a.outer for a in inst.arms[s]] for s in ("left", "right")]
        cl_, cr = inst.arms["left"][0].levels[0][0], inst.arms["right"][0].levels[0][0]
        assert set(inst.graph.edges()) == {tuple(sorted(e)) for e in [(ol, cl_), (cl_, cr), (cr, or_)]}

    @pytest.mark.parametrize("m,b", [(1, (2,)), (2, (2,)), (2, (1, 2)), (3, (2, 1))])
    def test_degrees(self, m, b):
        inst = build_rgs(RgsSpec(m, b))
        g = inst.graph
        for v, role in inst.roles.items():
            if isinstance(role, Outer):
                assert g.degree(v) == b[0]
            elif role.level == 1:
                children = b[1] if len(b) > 1 else 0
                assert g.degree(v) == 1 + (2 * m - 1) * b[0] + children
            elif role.level == len(b):
                assert g.degree(v) == 1
            else:
                assert g.degree(v) == 1 + b[role.level]

    def test_level_one_core_is_complete_across_arms(self):
        inst = build_rgs(RgsSpec(2, (2,)))
        firsts = [int(v) for s in ("left", "right") for a in inst.arms[s] for v in a.levels[0]]
        g = inst.graph
        for i, u in enumerate(firsts):
            for w in firsts[i + 1 :]:
                same_arm = inst.roles[u].arm == inst.roles[w].arm and inst.roles[u].side == inst.roles[w].side
                assert g.has_edge(u, w) != same_arm

    def test_roles(self):
        inst = build_rgs(RgsSpec(2, (2, 3)))
        trees = [r for r in inst.roles.values() if isinstance(r, InnerTree)]
        assert sum(r.level == 2 for r in trees) == 2 * 2 * 6
        assert {r.position for r in trees if r.level == 2 and r.arm == 0 and r.side == "left"} == {
            (i, j) for i in range(2) for j in range(3)
        }

    def test_appends_to_existing_graph(self):
        first = build_rgs(RgsSpec(1, (1,)))
        second = build_rgs(RgsSpec(1, (1,)), graph=first.graph)
        assert len(second.graph) == 8
        assert min(second.roles) == 4

    @pytest.mark.parametrize("m,b", [(1, (1,)), (1, (2,)), (2, (1,)), (1, (1, 2))])
    def test_state_matches_circuit(self, m, b, rng):
        inst = build_rgs(RgsSpec(m, b), random_vop_assignment(RgsSpec(m, b), rng))
        d = dense_from_graph(inst.graph)
        ref = kron_circuit(len(inst.graph), inst.graph.edges(), inst.graph.vops())
        assert abs(abs(np.vdot(ref, d.vector)) - 1) < 1e-9


class TestVops:
    def test_default_identity(self):
        assert set(build_rgs(RgsSpec(1, (2,))).graph.vops().values()) == {cl.I}

    def test_rejects_non_pauli_z(self):
        with pytest.raises(ValueError):
            build_rgs(RgsSpec(1, (1,)), {0: cl.H})

    def test_random_assignment_is_balanced(self):
        spec = RgsSpec(14, (10, 5))
        vops = random_vop_assignment(spec, np.random.default_rng(3))
        frac = sum(v is cl.Z for v in vops.values()) / len(vops)
        assert abs(frac - 0.5) < 3 * np.sqrt(0.25 / len(vops))


class TestEmissionOrder:
    def test_single_arm(self):
        inst = build_rgs(RgsSpec(1, (1, 1)))
        arm = inst.arms["left"][0]
        assert emission_order(inst, "left") == [arm.outer, int(arm.levels[0][0]), int(arm.levels[1][0, 0])]

    def test_level_by_level(self):
        inst = build_rgs(RgsSpec(2, (1, 1)))
        roles = [inst.roles[v] for v in emission_order(inst, "left")]
        assert [type(r).__name__ for r in roles] == ["Outer", "Outer"] + ["InnerTree"] * 4
        assert [r.level for r in roles[2:]] == [1, 1, 2, 2]

    @pytest.mark.parametrize("side", ["left", "right"])
    def test_outers_precede_trees(self, side):
        inst = build_rgs(RgsSpec(3, (2, 2)))
        order = emission_order(inst, side)
        assert sorted(order) == inst.vertices(side)
        last_outer = max(i for i, v in enumerate(order) if isinstance(inst.roles[v], Outer))
        first_tree = min(i for i, v in enumerate(order) if isinstance(inst.roles[v], InnerTree))
        assert last_outer < first_tree
