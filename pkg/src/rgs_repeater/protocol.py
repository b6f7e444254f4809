"""One end-to-end Bell-pair attempt over an RGS repeater chain.

Layout: ABSA ``k`` receives on its left input the right half of RGS ``k-1``
(or end node A when ``k == 0``) and on its right input the left half of
RGS ``k`` (or end node B when ``k`` is the last ABSA). End nodes hold ``m``
memory qubits, each entangled with one emitted photon.

The measurement schedule is shared by two physical backends:

* :class:`AccountingBackend` draws independent random outcome bits. It is
  used at full scale, where only loss, BSM success, logical success and
  the classical bit flow matter.
* :class:`ExactBackend` runs the measurements on a :class:`GraphState`
  holding the whole chain, so outcomes follow the Born rule and the final
  two memory qubits can be checked against the dense oracle.

Lost photons are traced out; the exact backend models this as a Z
measurement whose outcome is hidden from the protocol.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from rgs_repeater import clifford as cl
from rgs_repeater import logical
from rgs_repeater.graphstate import GraphState
from rgs_repeater.rgs import RgsSpec, Side, build_rgs
from rgs_repeater.topology import ChainConfig, ChainTopology, plan_chain, survival_probability

PortKind = Literal["rgs", "end"]
Mode = Literal["accounting", "exact"]

BSM_SUCCESS, BSM_FAIL, BSM_LOST = 0, 1, 2


def trial_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for one unit of work, keyed by its indices."""
    return np.random.default_rng(np.random.SeedSequence([master_seed & (2**64 - 1), *keys]))


def sample_arrivals(shape: int | tuple[int, ...], survival: float, rng: np.random.Generator) -> np.ndarray:
    """Independent arrival flags; ``False`` marks a flagged loss."""
    if survival >= 1:
        return np.ones(shape, dtype=bool)
    return rng.random(shape) < survival


@dataclass
class Port:
    """Photons reaching one ABSA input, plus vertex ids in exact mode."""

    kind: PortKind
    m: int
    source: Optional[int]  # RGSS index for an RGS half
    outer_arrived: np.ndarray
    outer_vop: np.ndarray
    tree_arrived: list[np.ndarray] = field(default_factory=list)
    tree_vop: list[np.ndarray] = field(default_factory=list)
    outer_ids: Optional[np.ndarray] = None
    tree_ids: Optional[list[np.ndarray]] = None
    memory_ids: Optional[np.ndarray] = None  # end ports only

    @property
    def n_photons(self) -> int:
        return self.m + sum(a.size for a in self.tree_arrived)


def _rgs_port(spec: RgsSpec, source: int, survival: float, rng: np.random.Generator) -> Port:
    m = spec.m
    shapes = [(m, *spec.b[: k + 1]) for k in range(len(spec.b))]
    return Port(
        kind="rgs",
        m=m,
        source=source,
        outer_vop=rng.integers(0, 2, m),
        tree_vop=[rng.integers(0, 2, s) for s in shapes],
        outer_arrived=sample_arrivals(m, survival, rng),
        tree_arrived=[sample_arrivals(s, survival, rng) for s in shapes],
    )


def _end_port(m: int, survival: float, rng: np.random.Generator) -> Port:
    return Port(
        kind="end",
        m=m,
        source=None,
        outer_vop=np.zeros(m, dtype=np.int64),
        outer_arrived=sample_arrivals(m, survival, rng),
    )


def prepare_ports(config: ChainConfig, topology: ChainTopology, rng: np.random.Generator) -> list[tuple[Port, Port]]:
    """Generation VOPs and arrival flags for every ABSA input, in chain order."""
    spec = config.rgs_spec
    p = survival_probability(topology.segment_length_km, config.attenuation_db_per_km, config.detector_efficiency)
    n = topology.n_rgss
    end_a = _end_port(spec.m, p, rng)
    halves = [(_rgs_port(spec, s, p, rng), _rgs_port(spec, s, p, rng)) for s in range(n)]
    end_b = _end_port(spec.m, p, rng)
    lefts = [end_a] + [h[1] for h in halves]
    rights = [h[0] for h in halves] + [end_b]
    return list(zip(lefts, rights))


# -- backends ---------------------------------------------------------------


class AccountingBackend:
    """Outcomes are fair coin flips; no quantum state is kept."""

    def __init__(self, rng: np.random.Generator) -> None:
        self.rng = rng

    def bsm(self, left: Port, right: Port, arm: int) -> tuple[int, int]:
        a, b = self.rng.integers(0, 2, 2)
        return int(a), int(b)

    def measure_outer_z(self, port: Port, arm: int) -> int:
        return int(self.rng.integers(0, 2))

    def discard_outer(self, port: Port, arm: int) -> None:
        pass

    def measure_tree(self, port: Port, arm: int, basis: logical.LogicalBasis) -> list[np.ndarray]:
        return [self.rng.integers(0, 2, a.shape[1:]) * a[arm] for a in port.tree_arrived]

    def measure_memory(self, port: Port, arm: int) -> int:
        return int(self.rng.integers(0, 2))


Chooser = Callable[[float], int]


def random_chooser(rng: np.random.Generator) -> Chooser:
    def choose(p0: float) -> int:
        if p0 >= 1:
            return 0
        if p0 <= 0:
            return 1
        return int(rng.random() >= p0)

    return choose


class ExactBackend:
    """Runs every measurement on a shared graph state of the whole chain."""

    def __init__(self, graph: GraphState, choose: Chooser) -> None:
        self.graph = graph
        self.choose = choose

    def _measure(self, v: int, basis: str, special: int | None = None) -> int:
        bit = self.choose(self.graph.outcome_probability(v, basis, 0))
        self.graph.measure(v, basis, bit, special_neighbor=special)
        return bit

    def bsm(self, left: Port, right: Port, arm: int) -> tuple[int, int]:
        u, v = int(left.outer_ids[arm]), int(right.outer_ids[arm])
        self.graph.apply_cz(u, v)
        # same update as GraphState.measure_xx, with each outcome drawn in turn
        a = self._measure(u, "X", special=v)
        b = self._measure(v, "X")
        return a, b

    def measure_outer_z(self, port: Port, arm: int) -> int:
        return self._measure(int(port.outer_ids[arm]), "Z")

    def discard_outer(self, port: Port, arm: int) -> None:
        self._measure(int(port.outer_ids[arm]), "Z")

    def measure_tree(self, port: Port, arm: int, basis: logical.LogicalBasis) -> list[np.ndarray]:
        raws = []
        for k, ids in enumerate(port.tree_ids):
            phys = logical.pattern_basis(basis, k + 1)
            arrived = port.tree_arrived[k][arm]
            raw = np.zeros(ids.shape[1:], dtype=np.int64)
            for pos in np.ndindex(raw.shape):
                v = int(ids[(arm, *pos)])
                if arrived[pos]:
                    raw[pos] = self._measure(v, phys)
                else:
                    self._measure(v, "Z")  # traced out, outcome never reported
            raws.append(raw)
        return raws

    def measure_memory(self, port: Port, arm: int) -> int:
        return self._measure(int(port.memory_ids[arm]), "Z")


def build_chain_graph(config: ChainConfig, ports: list[tuple[Port, Port]]) -> GraphState:
    """Place end-node memories/photons and every RGS in one graph; fill port ids."""
    spec = config.rgs_spec
    g = GraphState()

    def end_node(port: Port) -> None:
        mem, pho = [], []
        for _ in range(spec.m):
            q, p = g.add_vertex(), g.add_vertex()
            g.add_edge(q, p)
            mem.append(q)
            pho.append(p)
        port.memory_ids = np.array(mem)
        port.outer_ids = np.array(pho)

    end_node(ports[0][0])
    for s in range(len(ports) - 1):
        inst = build_rgs(spec, graph=g)
        for port, side in ((ports[s][1], "left"), (ports[s + 1][0], "right")):
            arms = inst.arms[side]
            port.outer_ids = np.array([a.outer for a in arms])
            port.tree_ids = [np.stack([a.levels[k] for a in arms]) for k in range(len(spec.b))]
            for j, v in enumerate(port.outer_ids):
                g.set_vop(int(v), cl.Z if port.outer_vop[j] else cl.I)
            for ids, vops in zip(port.tree_ids, port.tree_vop):
                for v, bit in zip(ids.ravel(), vops.ravel()):
                    g.set_vop(int(v), cl.Z if bit else cl.I)
    end_node(ports[-1][1])
    return g


# -- ABSA -------------------------------------------------------------------


@dataclass
class PortRecord:
    """Everything measured on one ABSA input.

    ``outer_raw``/``tree_raw`` are physical outcome bits (0 where nothing was
    recorded); ``*_vop`` are the generation VOP bits sent by the source.
    """

    kind: PortKind
    source: Optional[int]
    outer_basis: list[Optional[str]]  # "X" (BSM), "Z" (failed BSM) or None (lost)
    outer_raw: np.ndarray
    outer_vop: np.ndarray
    tree_arrived: list[np.ndarray]
    tree_vop: list[np.ndarray]
    tree_raw: list[np.ndarray] = field(default_factory=list)
    tree_basis: list[str] = field(default_factory=list)  # logical basis per arm
    logical_success: list[bool] = field(default_factory=list)
    logical_value: list[int] = field(default_factory=list)
    memory_outcomes: dict[int, int] = field(default_factory=dict)  # measured at the end node

    @property
    def n_photons(self) -> int:
        return len(self.outer_raw) + sum(a.size for a in self.tree_arrived)

    def effective_outer(self, arm: int) -> int:
        """BSM X outcome corrected for the photon's VOP."""
        return int(self.outer_raw[arm]) ^ int(self.outer_vop[arm])


@dataclass
class AbsaReport:
    index: int
    bsm_status: np.ndarray  # BSM_SUCCESS / BSM_FAIL / BSM_LOST per arm
    chosen: Optional[int]
    left: PortRecord
    right: PortRecord

    @property
    def link_success(self) -> bool:
        return self.chosen is not None

    def ports(self) -> tuple[tuple[Side, PortRecord], tuple[Side, PortRecord]]:
        return (("left", self.left), ("right", self.right))

    @property
    def success(self) -> bool:
        if self.chosen is None:
            return False
        return all(all(rec.logical_success) for _, rec in self.ports() if rec.kind == "rgs")

    @property
    def n_photons(self) -> int:
        return self.left.n_photons + self.right.n_photons


def _new_record(port: Port) -> PortRecord:
    return PortRecord(
        kind=port.kind,
        source=port.source,
        outer_basis=[None] * port.m,
        outer_raw=np.zeros(port.m, dtype=np.int64),
        outer_vop=np.asarray(port.outer_vop, dtype=np.int64),
        tree_arrived=port.tree_arrived,
        tree_vop=port.tree_vop,
    )


def absa_stage1(
    index: int, left: Port, right: Port, backend, rng: np.random.Generator, bsm_success_cap: float
) -> AbsaReport:
    """Bell-state measurements on every arm pair of outer photons."""
    m = left.m
    both = left.outer_arrived & right.outer_arrived
    heralded = rng.random(m) < bsm_success_cap
    status = np.where(both, np.where(heralded, BSM_SUCCESS, BSM_FAIL), BSM_LOST)
    lrec, rrec = _new_record(left), _new_record(right)
    for j in range(m):
        if status[j] == BSM_SUCCESS:
            a, b = backend.bsm(left, right, j)
            lrec.outer_raw[j], rrec.outer_raw[j] = a, b
            lrec.outer_basis[j] = rrec.outer_basis[j] = "X"
            continue
        for port, rec in ((left, lrec), (right, rrec)):
            if port.outer_arrived[j]:
                rec.outer_raw[j] = backend.measure_outer_z(port, j)
                rec.outer_basis[j] = "Z"
            else:
                backend.discard_outer(port, j)
    ok = np.flatnonzero(status == BSM_SUCCESS)
    chosen = int(ok[0]) if ok.size else None
    return AbsaReport(index, status, chosen, lrec, rrec)


def absa_stages23(report: AbsaReport, left: Port, right: Port, backend) -> AbsaReport:
    """Logical Z on every arm except the chosen one, then logical X on it.

    With no successful BSM every arm is measured in Z.
    """
    for port, rec in ((left, report.left), (right, report.right)):
        for j in range(port.m):
            basis = "X" if j == report.chosen else "Z"
            if port.kind == "end":
                if j != report.chosen:
                    rec.memory_outcomes[j] = backend.measure_memory(port, j)
                continue
            raw = backend.measure_tree(port, j, basis)
            rec.tree_raw.append(raw)
            rec.tree_basis.append(basis)
            eff = logical.effective_outcomes(basis, raw, [v[j] for v in port.tree_vop])
            res = logical.logical_measure(basis, [a[j] for a in port.tree_arrived], eff)
            rec.logical_success.append(bool(res.success))
            rec.logical_value.append(int(res.value))
        if port.kind == "rgs":
            rec.tree_raw = [np.stack([r[k] for r in rec.tree_raw]) for k in range(len(port.tree_arrived))]
    return report


def run_absa(index: int, left: Port, right: Port, backend, rng: np.random.Generator, bsm_success_cap: float = 0.5) -> AbsaReport:
    report = absa_stage1(index, left, right, backend, rng, bsm_success_cap)
    return absa_stages23(report, left, right, backend)


# -- attempts ---------------------------------------------------------------


@dataclass
class TrialOutcome:
    success: bool
    reports: list[AbsaReport]
    topology: ChainTopology
    spec: RgsSpec
    final_graph: Optional[GraphState] = None
    end_qubits: Optional[tuple[int, int]] = None  # exact mode, successful attempts

    @property
    def local_bits(self) -> tuple[int, int]:
        """Memory measurement outcomes recorded at end nodes A and B."""
        return len(self.reports[0].left.memory_outcomes), len(self.reports[-1].right.memory_outcomes)


def run_attempt(
    config: ChainConfig,
    rng: np.random.Generator | None = None,
    mode: Mode = "accounting",
    choose: Chooser | None = None,
) -> TrialOutcome:
    """Simulate one attempt: generation, loss, and all three ABSA stages everywhere.

    ``choose`` overrides Born-rule sampling in exact mode (used to enumerate
    outcome branches).
    """
    if rng is None:
        rng = trial_rng(config.rng_seed, 0)
    phys_rng, outcome_rng = rng.spawn(2)
    topology = plan_chain(config)
    ports = prepare_ports(config, topology, phys_rng)
    graph = None
    if mode == "exact":
        graph = build_chain_graph(config, ports)
        backend = ExactBackend(graph, choose or random_chooser(outcome_rng))
    elif mode == "accounting":
        backend = AccountingBackend(outcome_rng)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    reports = [
        absa_stage1(k, left, right, backend, phys_rng, config.bsm_success_cap)
        for k, (left, right) in enumerate(ports)
    ]
    for report, (left, right) in zip(reports, ports):
        absa_stages23(report, left, right, backend)
    success = all(r.success for r in reports)
    end_qubits = None
    if success and graph is not None:
        end_qubits = (
            int(ports[0][0].memory_ids[reports[0].chosen]),
            int(ports[-1][1].memory_ids[reports[-1].chosen]),
        )
    return TrialOutcome(success, reports, topology, config.rgs_spec, graph, end_qubits)
