from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logical_reference import exact_success_probability, logical, positions, to_levels
from rgs_repeater.logical import effective_outcomes, logical_measure, pattern_basis

SHAPES = [(1,), (2,), (3,), (2, 2), (1, 2), (2, 1, 2), (3, 2)]


class TestPattern:
    @pytest.mark.parametrize("level,z,x", [(1, "Z", "X"), (2, "X", "Z"), (3, "Z", "X"), (4, "X", "Z")])
    def test_alternation(self, level, z, x):
        assert pattern_basis("Z", level) == z
        assert pattern_basis("X", level) == x


class TestDocumentedCases:
    @pytest.mark.parametrize("b", SHAPES)
    @pytest.mark.parametrize("basis", "XZ")
    def test_lossless_always_succeeds(self, b, basis):
        arrived = [np.ones(b[: k + 1], bool) for k in range(len(b))]
        assert logical_measure(basis, arrived).success

    def test_lost_first_level_recovered_through_children(self):
        b = (2, 2)
        arrived = [np.array([False, True]), np.ones((2, 2), bool)]
        assert logical_measure("Z", arrived).success
        arrived[1][0] = [False, False]
        assert not logical_measure("Z", arrived).success
        arrived[1][0] = [False, True]
        assert logical_measure("Z", arrived).success

    def test_all_first_level_lost_fails_x(self):
        assert not logical_measure("X", [np.zeros(2, bool)]).success

    def test_x_needs_only_one_branch(self):
        arrived = [np.array([False, True]), np.array([[False, False], [True, True]])]
        assert logical_measure("X", arrived).success


class TestAgainstReference:
    @pytest.mark.parametrize("b", SHAPES)
    @pytest.mark.parametrize("basis", "XZ")
    def test_every_loss_pattern(self, b, basis):
        pos = positions(b)
        rng = np.random.default_rng(len(pos))
        for pattern in itertools.product((False, True), repeat=len(pos)):
            arrived = dict(zip(pos, pattern))
            out = {p: int(rng.integers(2)) for p in pos}
            ok, val = logical(basis, b, arrived, out)
            res = logical_measure(basis, to_levels(b, arrived), to_levels(b, out))
            assert bool(res.success) == ok
            if ok:
                assert int(res.value) == val

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(1, 3), min_size=1, max_size=3), st.sampled_from("XZ"), st.integers(0, 2**32 - 1))
    def test_batched_prefix_matches_scalar(self, b, basis, seed):
        b = tuple(b)
        rng = np.random.default_rng(seed)
        batch = 16
        arrived = [rng.random((batch, *b[: k + 1])) < 0.6 for k in range(len(b))]
        out = [rng.integers(0, 2, (batch, *b[: k + 1])) for k in range(len(b))]
        res = logical_measure(basis, arrived, out)
        for i in range(batch):
            single = logical_measure(basis, [a[i] for a in arrived], [o[i] for o in out])
            assert bool(res.success[i]) == bool(single.success)
            if single.success:
                assert int(res.value[i]) == int(single.value)

    @pytest.mark.parametrize("b", [(2,), (2, 2)])
    @pytest.mark.parametrize("loss", [0.0, 0.5])
    def test_exact_probability_sanity(self, b, loss):
        p = exact_success_probability("Z", b, loss)
        assert 0 <= p <= 1
        if loss == 0:
            assert p == 1


class TestEffectiveOutcomes:
    def test_vop_flips_only_x_levels(self):
        raw = [np.array([0, 0]), np.zeros((2, 2), np.int64)]
        vop = [np.array([1, 0]), np.array([[1, 0], [0, 0]])]
        z = effective_outcomes("Z", raw, vop)
        assert z[0].tolist() == [0, 0] and z[1].tolist() == [[1, 0], [0, 0]]
        x = effective_outcomes("X", raw, vop)
        assert x[0].tolist() == [1, 0] and x[1].tolist() == [[0, 0], [0, 0]]

    def test_flipping_one_x_vop_flips_logical_x(self):
        b = (2, 2)
        arrived = [np.ones(2, bool), np.ones((2, 2), bool)]
        raw = [np.array([1, 0]), np.array([[0, 1], [1, 1]])]
        vops = [np.zeros(2, np.int64), np.zeros((2, 2), np.int64)]
        base = logical_measure("X", arrived, effective_outcomes("X", raw, vops)).value
        vops[0][0] = 1
        assert logical_measure("X", arrived, effective_outcomes("X", raw, vops)).value == base ^ 1
