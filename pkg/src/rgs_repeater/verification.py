"""Property checks of the graph simulator and protocol against the dense oracle.

Used by the ``verify`` CLI subcommand and by the acceptance tests.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from rgs_repeater import clifford as cl
from rgs_repeater.correction import frames_for
from rgs_repeater.graphstate import GraphState
from rgs_repeater.oracle import OracleError, bell_fidelity, dense_from_graph, fidelity, project_pauli
from rgs_repeater.protocol import TrialOutcome, run_attempt, trial_rng
from rgs_repeater.topology import ChainConfig

TOLERANCE = 1e-9


@dataclass
class VerificationReport:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checks > 0 and not self.failures

    def record(self, ok: bool, message: str) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(message)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.checks} checks, {len(self.failures)} failures"


def random_graph(
    rng: np.random.Generator,
    n: int,
    vops: Sequence[cl.LocalClifford] = (cl.I, cl.Z),
    edge_probability: float = 0.5,
) -> GraphState:
    g = GraphState()
    for _ in range(n):
        g.add_vertex(vops[int(rng.integers(len(vops)))])
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < edge_probability:
            g.add_edge(u, v)
    return g


def _same_state(graph: GraphState, dense) -> bool:
    if len(graph) == 0:
        return dense.amplitudes.size == 1
    return abs(fidelity(dense, dense_from_graph(graph)) - 1.0) <= TOLERANCE


def _check_single(report: VerificationReport, g: GraphState, tag: str) -> None:
    dense = dense_from_graph(g)
    for v in g.vertices:
        h = g.copy()
        h.local_complement(v)
        report.record(_same_state(h, dense), f"{tag}: LC at {v}")
        for basis in ("Z", "X"):
            specials: list[int | None] = [None]
            if basis == "X":
                specials = list(g.neighbors(v)) or [None]
            for special, outcome in itertools.product(specials, (0, 1)):
                p = g.outcome_probability(v, basis, outcome)
                try:
                    expected, p_dense = project_pauli(dense, v, basis, outcome)
                except OracleError:
                    report.record(p == 0, f"{tag}: {basis}{v}={outcome} should be impossible")
                    continue
                if abs(p - p_dense) > TOLERANCE:
                    report.record(False, f"{tag}: {basis}{v}={outcome} probability {p} vs {p_dense}")
                    continue
                h = g.copy()
                h.measure(v, basis, outcome, special_neighbor=special)
                report.record(_same_state(h, expected), f"{tag}: {basis}{v}={outcome} via {special}")


def _check_xx(report: VerificationReport, g: GraphState, tag: str) -> None:
    dense = dense_from_graph(g)
    for u, v in g.edges():
        if g.neighbors(u) & g.neighbors(v):
            continue
        for a, b in itertools.product((0, 1), repeat=2):
            try:
                mid, _ = project_pauli(dense, u, "X", a)
                expected, _ = project_pauli(mid, v, "X", b)
            except OracleError:
                continue
            h = g.copy()
            h.measure_xx(u, v, (a, b))
            report.record(_same_state(h, expected), f"{tag}: XX({u},{v})={a}{b}")


def _xx_friendly(rng: np.random.Generator, n: int, vops: Sequence[cl.LocalClifford]) -> GraphState:
    """Random graph guaranteed to hold an adjacent pair with no common neighbour."""
    g = random_graph(rng, n, vops, edge_probability=0.4)
    if n >= 2:
        g.add_edge(0, 1)
        for w in sorted(g.neighbors(0) & g.neighbors(1)):
            g.remove_edge(1, w)
    return g


def verify_graph_rules(
    n_graphs: int = 500,
    seed: int = 0,
    max_vertices: int = 8,
    vops: Sequence[cl.LocalClifford] = (cl.I, cl.Z),
) -> VerificationReport:
    """Every LC, Z, X, and XX branch on random graphs versus dense projection."""
    report = VerificationReport("graph rules vs dense oracle")
    rng = np.random.default_rng(seed)
    for i in range(n_graphs):
        n = int(rng.integers(1, max_vertices + 1))
        _check_single(report, random_graph(rng, n, vops), f"graph {i}")
        if n >= 2:
            _check_xx(report, _xx_friendly(rng, n, vops), f"xx graph {i}")
    return report


def enumerate_branches(run: Callable[[Callable[[float], int]], object]) -> Iterator[object]:
    """Depth-first replay over every random outcome branch of ``run``.

    ``run`` receives a chooser mapping the probability of outcome 0 to an
    outcome; deterministic calls (p0 of 0 or 1) are not branch points.
    """
    prefix: list[int] = []
    while True:
        path: list[int] = []

        def choose(p0: float) -> int:
            if p0 >= 1.0 - TOLERANCE:
                return 0
            if p0 <= TOLERANCE:
                return 1
            bit = prefix[len(path)] if len(path) < len(prefix) else 0
            path.append(bit)
            return bit

        yield run(choose)
        while path and path[-1] == 1:
            path.pop()
        if not path:
            return
        prefix = path[:-1] + [1]


def check_trial_frames(trial: TrialOutcome) -> tuple[float, float, bool]:
    """Bell fidelity under both frames and whether the frames agree."""
    one, two = frames_for(trial)
    qa, qb = trial.end_qubits
    dense = dense_from_graph(trial.final_graph)
    return (
        bell_fidelity(dense, qa, qb, one.on_qubits(qa, qb)),
        bell_fidelity(dense, qa, qb, two.on_qubits(qa, qb)),
        one == two,
    )


def verify_chain_exhaustive(config: ChainConfig, seed: int = 0) -> VerificationReport:
    """All outcome branches of one lossless exact-mode attempt."""
    report = VerificationReport(f"exhaustive chain {config.rgs_spec}")

    def run(choose):
        return run_attempt(config, trial_rng(seed, 0), mode="exact", choose=choose)

    for i, trial in enumerate(enumerate_branches(run)):
        if not trial.success:
            report.record(False, f"branch {i}: attempt failed")
            continue
        f1, f2, agree = check_trial_frames(trial)
        report.record(abs(f1 - 1) <= TOLERANCE, f"branch {i}: one-stage fidelity {f1}")
        report.record(abs(f2 - 1) <= TOLERANCE, f"branch {i}: two-stage fidelity {f2}")
        report.record(agree, f"branch {i}: frames differ")
    return report


def verify_chain_sampled(
    config: ChainConfig, successes: int, seed: int = 0, max_attempts: int | None = None
) -> VerificationReport:
    """Random exact-mode attempts, possibly lossy, until ``successes`` are checked."""
    report = VerificationReport(f"sampled chain {config.rgs_spec}")
    limit = max_attempts if max_attempts is not None else 100 * successes
    for t in range(limit):
        if report.checks >= successes:
            break
        trial = run_attempt(config, trial_rng(seed, t), mode="exact")
        if trial.success:
            f1, f2, agree = check_trial_frames(trial)
            report.record(abs(f1 - 1) <= TOLERANCE and abs(f2 - 1) <= TOLERANCE and agree,
                          f"attempt {t}: fidelities {f1}, {f2}, agree={agree}")
    return report
