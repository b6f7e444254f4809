from __future__ import annotations

import itertools

import numpy as np
import pytest

from rgs_repeater.correction import frames_for
from rgs_repeater.protocol import (
    BSM_FAIL,
    BSM_LOST,
    BSM_SUCCESS,
    AccountingBackend,
    prepare_ports,
    run_absa,
    run_attempt,
    trial_rng,
)
from rgs_repeater.rgs import RgsSpec
from rgs_repeater.topology import ChainConfig, plan_chain
from rgs_repeater.verification import check_trial_frames


class FixedRng:
    """Stands in for the BSM herald generator with preset draws."""

    def __init__(self, draws):
        self.draws = np.asarray(draws, dtype=float)

    def random(self, n):
        assert n == len(self.draws)
        return self.draws


def two_ports(m: int, b=(1,), outer_arrived=None):
    config = ChainConfig(12, 4, 0.0, 1.0, rgs_spec=RgsSpec(m, b))
    ports = prepare_ports(config, plan_chain(config), np.random.default_rng(0))
    left, right = ports[1]  # RGS halves on both sides
    if outer_arrived is not None:
        left.outer_arrived = np.array(outer_arrived[0])
        right.outer_arrived = np.array(outer_arrived[1])
    return left, right


class TestRunAbsa:
    def test_all_outers_lost(self):
        left, right = two_ports(1, outer_arrived=([False], [False]))
        rep = run_absa(1, left, right, AccountingBackend(np.random.default_rng(0)), FixedRng([0.0]))
        assert rep.chosen is None and not rep.link_success and not rep.success
        assert rep.bsm_status.tolist() == [BSM_LOST]
        assert rep.left.tree_basis == ["Z"]

    def test_first_arm_kept_second_pruned(self):
        left, right = two_ports(2, b=(2,))
        rep = run_absa(1, left, right, AccountingBackend(np.random.default_rng(0)), FixedRng([0.1, 0.9]), 0.5)
        assert rep.bsm_status.tolist() == [BSM_SUCCESS, BSM_FAIL]
        assert rep.chosen == 0
        for _, rec in rep.ports():
            assert rec.tree_basis == ["X", "Z"]
            assert rec.outer_basis == ["X", "Z"]
            assert all(rec.logical_success)

    def test_lowest_success_wins(self):
        left, right = two_ports(3)
        rep = run_absa(1, left, right, AccountingBackend(np.random.default_rng(0)), FixedRng([0.9, 0.1, 0.2]), 0.5)
        assert rep.chosen == 1
        assert rep.left.tree_basis == ["Z", "X", "Z"]

    def test_one_sided_loss_measures_survivor_in_z(self):
        left, right = two_ports(1, outer_arrived=([True], [False]))
        rep = run_absa(1, left, right, AccountingBackend(np.random.default_rng(0)), FixedRng([0.0]))
        assert rep.left.outer_basis == ["Z"] and rep.right.outer_basis == [None]

    def test_photon_count(self):
        left, right = two_ports(2, b=(2, 3))
        rep = run_absa(1, left, right, AccountingBackend(np.random.default_rng(0)), FixedRng([0, 0]))
        assert rep.n_photons == 2 * 2 * (1 + 2 + 6)


def link_probability_enumerated(m: int, p: float, q: float) -> float:
    """Sum over every arrival and herald pattern of m outer-photon pairs."""
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=3 * m):
        weight = 1.0
        ok = False
        for j in range(m):
            a, b, h = pattern[3 * j : 3 * j + 3]
            weight *= (p if a else 1 - p) * (p if b else 1 - p) * (q if h else 1 - q)
            ok |= bool(a and b and h)
        total += weight * ok
    return total


class TestLinkSuccess:
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_formula_matches_enumeration(self, m):
        p, q = 10 ** -0.04, 0.5
        assert link_probability_enumerated(m, p, q) == pytest.approx(1 - (1 - p * p * q) ** m)

    @pytest.mark.parametrize("m", [1, 3])
    def test_monte_carlo_matches_enumeration(self, m):
        config = ChainConfig(4, 4, 0.2, 0.5, rgs_spec=RgsSpec(m, (1,)))
        n = 4000
        hits = sum(run_attempt(config, trial_rng(7, t)).reports[0].link_success for t in range(n))
        p = 10 ** -0.04
        expected = link_probability_enumerated(m, p, 0.5)
        assert abs(hits / n - expected) < 3 * np.sqrt(expected * (1 - expected) / n)


class TestRunAttempt:
    @pytest.mark.parametrize("spec", [RgsSpec(1, (1,)), RgsSpec(2, (2, 2)), RgsSpec(3, (2,))])
    def test_lossless_full_cap_always_succeeds(self, spec):
        config = ChainConfig(20, 4, 0.0, 1.0, rgs_spec=spec)
        assert all(run_attempt(config, trial_rng(0, t)).success for t in range(20))

    def test_zero_cap_never_succeeds(self):
        config = ChainConfig(20, 4, 0.0, 0.0, rgs_spec=RgsSpec(2, (1,)))
        assert not any(run_attempt(config, trial_rng(0, t)).success for t in range(20))

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            run_attempt(ChainConfig(8), mode="fast")

    def test_deterministic(self):
        config = ChainConfig(40, 4, 0.2, 0.5, rgs_spec=RgsSpec(3, (2, 2)))
        a = run_attempt(config, trial_rng(11, 3))
        b = run_attempt(config, trial_rng(11, 3))
        assert a.success == b.success
        for ra, rb in zip(a.reports, b.reports):
            assert ra.chosen == rb.chosen
            assert np.array_equal(ra.bsm_status, rb.bsm_status)
            assert ra.left.logical_value == rb.left.logical_value

    def test_exact_single_source_gives_bell_pair(self):
        config = ChainConfig(8, 4, 0.0, 1.0, rgs_spec=RgsSpec(1, (1,)))
        for t in range(10):
            trial = run_attempt(config, trial_rng(2, t), mode="exact")
            assert trial.success
            assert len(trial.final_graph) == 2
            f1, f2, agree = check_trial_frames(trial)
            assert f1 == pytest.approx(1.0, abs=1e-9) and agree

    @pytest.mark.parametrize("spec", [RgsSpec(1, (2, 2)), RgsSpec(2, (1, 2))])
    def test_exact_lossy_chains(self, spec):
        config = ChainConfig(8, 4, 0.5, 0.7, rgs_spec=spec)
        successes = 0
        for t in range(60):
            trial = run_attempt(config, trial_rng(4, t), mode="exact")
            if trial.success:
                successes += 1
                f1, f2, agree = check_trial_frames(trial)
                assert f1 == pytest.approx(1.0, abs=1e-9)
                assert f2 == pytest.approx(1.0, abs=1e-9)
                assert agree
        assert successes > 0


class TestMonotonicity:
    @staticmethod
    def rate(config: ChainConfig, n: int = 600) -> float:
        return sum(run_attempt(config, trial_rng(5, t)).success for t in range(n)) / n

    def test_non_increasing_in_attenuation(self):
        rates = [self.rate(ChainConfig(24, 4, att, rgs_spec=RgsSpec(2, (2, 1)))) for att in (0.1, 0.5, 1.0)]
        sigma = np.sqrt(0.25 / 600)
        assert rates[0] + 3 * sigma >= rates[1] and rates[1] + 3 * sigma >= rates[2]

    def test_non_decreasing_in_m(self):
        rates = [self.rate(ChainConfig(24, 4, 0.3, rgs_spec=RgsSpec(m, (2, 1)))) for m in (1, 2, 4)]
        sigma = np.sqrt(0.25 / 600)
        assert rates[0] <= rates[1] + 3 * sigma and rates[1] <= rates[2] + 3 * sigma
