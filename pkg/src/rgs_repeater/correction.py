"""Pauli-frame corrections for the end-to-end Bell pair.

Every byproduct in the protocol is a Z on a vertex, so the frame is a Z
power on each end memory. With the chain of kept inner qubits
``q_A - w_1 - w_2 - ... - w_2N - q_B`` (odd ``w`` on ABSA right inputs,
even ``w`` on left inputs), measuring all ``w`` in X leaves

    Z_A ** (beta_A + sum_even (x_w + beta_w))  Z_B ** (beta_B + sum_odd (x_w + beta_w))

where ``x_w`` is the logical X outcome and ``beta_w`` the Z byproducts that
reached ``w`` before its measurement: the BSM partner photon's X outcome and
the parity of the logical Z outcomes of every pruned arm of the same RGS.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from rgs_repeater import logical
from rgs_repeater.protocol import AbsaReport, PortRecord, TrialOutcome


class CorrectionError(RuntimeError):
    """Raised when a frame is requested for a failed attempt."""


@dataclass(frozen=True)
class PauliFrame:
    corrections: dict[str, str] = field(default_factory=lambda: {"A": "I", "B": "I"})

    @classmethod
    def from_bits(cls, z_a: int, z_b: int) -> PauliFrame:
        return cls({"A": "Z" if z_a else "I", "B": "Z" if z_b else "I"})

    def on_qubits(self, qa: int, qb: int) -> dict[int, str]:
        return {qa: self.corrections["A"], qb: self.corrections["B"]}


@dataclass(frozen=True)
class TwoBitSummary:
    x_outcome_left: int
    x_outcome_right: int


def _require_success(reports: Sequence[AbsaReport]) -> None:
    if not reports or not all(r.success for r in reports):
        raise CorrectionError("corrections exist only for successful attempts")


def _decode(rec: PortRecord, arm: int) -> tuple[bool, int]:
    """Logical outcome of one arm, recomputed from raw bits and VOP bits."""
    basis = rec.tree_basis[arm]
    raw = [r[arm] for r in rec.tree_raw]
    eff = logical.effective_outcomes(basis, raw, [v[arm] for v in rec.tree_vop])
    res = logical.logical_measure(basis, [a[arm] for a in rec.tree_arrived], eff)
    return bool(res.success), int(res.value)


def correction_one_stage(reports: Sequence[AbsaReport]) -> PauliFrame:
    """Frame computed at an end node from every photon's outcome and VOP bit."""
    _require_success(reports)
    pruned: dict[int, int] = {}  # RGSS index -> parity of pruned logical Z outcomes
    kept: list[tuple[int, str, int, int]] = []  # (absa, side, x value, partner photon bit)
    for r in reports:
        for side, rec in r.ports():
            other = r.right if side == "left" else r.left
            partner = other.effective_outer(r.chosen)
            if rec.kind != "rgs":
                kept.append((r.index, side, 0, partner))
                continue
            for arm in range(len(rec.tree_basis)):
                ok, value = _decode(rec, arm)
                if arm == r.chosen:
                    kept.append((r.index, side, value, partner))
                else:
                    pruned[rec.source] = pruned.get(rec.source, 0) ^ value

    # kept is in chain order: q_A, w_1, ..., w_2N, q_B
    z_a, z_b = kept[0][3], kept[-1][3]
    for pos, (k, side, x, partner) in enumerate(kept[1:-1], start=1):
        source = k - 1 if side == "left" else k
        bare = x ^ partner ^ pruned.get(source, 0)
        if pos % 2 == 0:
            z_a ^= bare
        else:
            z_b ^= bare
    return PauliFrame.from_bits(z_a, z_b)


def two_bit_summary(report: AbsaReport) -> TwoBitSummary:
    """ABSA-local reduction of all its outcome and VOP bits to two bits."""
    _require_success([report])
    j = report.chosen
    parity = 0
    xs = {}
    for side, rec in report.ports():
        if rec.kind != "rgs":
            xs[side] = 0
            continue
        eff_values = []
        for arm in range(len(rec.tree_basis)):
            basis = rec.tree_basis[arm]
            eff = logical.effective_outcomes(basis, [r[arm] for r in rec.tree_raw], [v[arm] for v in rec.tree_vop])
            eff_values.append(int(logical.logical_measure(basis, [a[arm] for a in rec.tree_arrived], eff).value))
        xs[side] = eff_values[j]
        for arm, value in enumerate(eff_values):
            if arm != j:
                parity ^= value
    left = xs["left"] ^ report.right.effective_outer(j) ^ parity
    right = xs["right"] ^ report.left.effective_outer(j) ^ parity
    return TwoBitSummary(left, right)


def correction_two_stage(summaries: Sequence[TwoBitSummary]) -> PauliFrame:
    """Frame computed at the end nodes from two bits per ABSA."""
    if not summaries:
        raise CorrectionError("no ABSA summaries")
    z_a = z_b = 0
    for s in summaries:
        z_a ^= s.x_outcome_left
        z_b ^= s.x_outcome_right
    return PauliFrame.from_bits(z_a, z_b)


def frames_for(trial: TrialOutcome) -> tuple[PauliFrame, PauliFrame]:
    """(One-Stage, Two-Stage) frames of a successful attempt."""
    if not trial.success:
        raise CorrectionError("corrections exist only for successful attempts")
    one = correction_one_stage(trial.reports)
    two = correction_two_stage([two_bit_summary(r) for r in trial.reports])
    return one, two
