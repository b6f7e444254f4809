"""Repeater graph state quantum repeater simulator with local Pauli correction."""

from __future__ import annotations

from rgs_repeater.clifford import LocalClifford
from rgs_repeater.correction import (
    PauliFrame,
    TwoBitSummary,
    correction_one_stage,
    correction_two_stage,
    frames_for,
    two_bit_summary,
)
from rgs_repeater.graphstate import GraphState, GraphStateError, MeasurementRecord
from rgs_repeater.ledger import CommsLedger, comms_ledger, reconcile
from rgs_repeater.logical import logical_measure
from rgs_repeater.protocol import TrialOutcome, run_absa, run_attempt
from rgs_repeater.rgs import RgsSpec, build_rgs, photons_per_rgs
from rgs_repeater.topology import ChainConfig, ChainTopology, plan_chain

__all__ = [
    "ChainConfig", "ChainTopology", "CommsLedger", "GraphState", "GraphStateError",
    "LocalClifford", "MeasurementRecord", "PauliFrame", "RgsSpec", "TrialOutcome",
    "TwoBitSummary", "build_rgs", "comms_ledger", "correction_one_stage",
    "correction_two_stage", "frames_for", "logical_measure", "photons_per_rgs",
    "plan_chain", "reconcile", "run_absa", "run_attempt", "two_bit_summary",
]
