"""Seeded Monte Carlo sweeps over distance and RGS shape.

Each trial draws its randomness from ``(master_seed, cell, trial)`` so the
output does not depend on how work is split across threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Literal

from rgs_repeater.correction import frames_for
from rgs_repeater.ledger import comms_ledger
from rgs_repeater.protocol import TrialOutcome, run_attempt, trial_rng
from rgs_repeater.rgs import RgsSpec
from rgs_repeater.topology import ChainConfig

Mode = Literal["exact", "accounting"]
Progress = Callable[[str], None]


class SweepError(ValueError):
    """Raised for an invalid sweep configuration or output path."""


@dataclass(frozen=True)
class SweepSpec:
    distances_km: list[float]
    specs: list[RgsSpec]
    trials: int
    master_seed: int
    output_path: str
    mode: Mode = "accounting"
    rgss_spacing_km: float = 4.0
    attenuation_db_per_km: float = 0.2
    bsm_success_cap: float = 0.5
    detector_efficiency: float = 1.0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise SweepError("trials must be >= 1")
        if not self.distances_km or any(d <= 0 for d in self.distances_km):
            raise SweepError("distances must be positive")
        if not self.specs:
            raise SweepError("at least one RGS spec is required")
        if self.mode not in ("exact", "accounting"):
            raise SweepError(f"unknown mode {self.mode!r}")
        if self.workers < 1:
            raise SweepError("workers must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise SweepError("master_seed must be a 64-bit unsigned integer")

    def cells(self) -> list[tuple[float, RgsSpec]]:
        return [(d, s) for d in self.distances_km for s in self.specs]

    def config_for(self, distance_km: float, spec: RgsSpec) -> ChainConfig:
        try:
            return ChainConfig(
                distance_km=distance_km,
                rgss_spacing_km=self.rgss_spacing_km,
                attenuation_db_per_km=self.attenuation_db_per_km,
                bsm_success_cap=self.bsm_success_cap,
                detector_efficiency=self.detector_efficiency,
                rgs_spec=spec,
                rng_seed=self.master_seed,
            )
        except ValueError as exc:
            raise SweepError(str(exc)) from exc


@dataclass(frozen=True)
class SweepRow:
    distance_km: float
    m: int
    b: str
    success_rate: float
    success_stderr: float
    one_stage_end_bits: float
    two_stage_end_bits: float
    per_absa_bits: int
    ratio: float

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_strings(cls, record: dict[str, str]) -> SweepRow:
        kwargs: dict[str, object] = {}
        for f in fields(cls):
            raw = record[f.name]
            kwargs[f.name] = {"int": int, "float": float, "str": str}[f.type](raw)
        return cls(**kwargs)  # type: ignore[arg-type]


def format_b(b: Sequence[int]) -> str:
    return "-".join(str(x) for x in b)


def parse_b(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", "-").split("-") if x.strip())


def binomial(successes: int, n: int) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("no trials")
    p = successes / n
    return p, math.sqrt(p * (1 - p) / n)


def estimate_rate(
    outcomes: Sequence[TrialOutcome | bool], trial_period_s: float
) -> tuple[float, float]:
    """Bell pairs per second and its binomial standard error."""
    if trial_period_s <= 0:
        raise ValueError("trial_period_s must be positive")
    if len(outcomes) == 0:
        raise ValueError("no outcomes to estimate a rate from")
    wins = sum(bool(o.success if isinstance(o, TrialOutcome) else o) for o in outcomes)
    p, se = binomial(wins, len(outcomes))
    return p / trial_period_s, se / trial_period_s


@dataclass
class _TrialStats:
    success: bool
    one_stage: int
    two_stage: int
    absa_max: int


def _run_trial(spec: SweepSpec, cell: int, trial: int) -> _TrialStats:
    distance, rgs = spec.cells()[cell]
    config = spec.config_for(distance, rgs)
    outcome = run_attempt(config, trial_rng(spec.master_seed, cell, trial), mode=spec.mode)
    if outcome.success:
        # exercised so that a failing frame computation surfaces in sweeps
        frames_for(outcome)
    one = comms_ledger(outcome, "one_stage")
    two = comms_ledger(outcome, "two_stage")
    return _TrialStats(outcome.success, one.end_bits, two.end_bits, max(two.absa_processed()))


def _summarise(spec: SweepSpec, cell: int, stats: list[_TrialStats]) -> SweepRow:
    distance, rgs = spec.cells()[cell]
    p, se = binomial(sum(s.success for s in stats), len(stats))
    one = sum(s.one_stage for s in stats) / len(stats)
    two = sum(s.two_stage for s in stats) / len(stats)
    return SweepRow(
        distance_km=float(distance),
        m=rgs.m,
        b=format_b(rgs.b),
        success_rate=p,
        success_stderr=se,
        one_stage_end_bits=one,
        two_stage_end_bits=two,
        per_absa_bits=max(s.absa_max for s in stats),
        ratio=one / two if one > 0 and two > 0 else 0.0,
    )


def run_sweep(spec: SweepSpec, progress: Progress | None = None, write: bool = True) -> list[SweepRow]:
    """One row per (distance, spec) cell, ordered by cell index."""
    cells = spec.cells()
    jobs = [(c, t) for c in range(len(cells)) for t in range(spec.trials)]
    results: list[_TrialStats | None] = [None] * len(jobs)
    with ThreadPoolExecutor(max_workers=spec.workers) as pool:
        futures = {pool.submit(_run_trial, spec, c, t): i for i, (c, t) in enumerate(jobs)}
        done = 0
        for fut, i in futures.items():
            results[i] = fut.result()
            done += 1
            if progress and (done == len(jobs) or done % max(1, len(jobs) // 10) == 0):
                progress(f"{done}/{len(jobs)} trials")
    rows = []
    for c in range(len(cells)):
        chunk = results[c * spec.trials : (c + 1) * spec.trials]
        rows.append(_summarise(spec, c, [s for s in chunk if s is not None]))
    if write:
        write_outputs(rows, spec.output_path)
    return rows


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SweepRow.field_names())
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in asdict(row).values()])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[SweepRow]:
    return [SweepRow.from_strings(r) for r in csv.DictReader(io.StringIO(text))]


def rows_to_json(rows: Sequence[SweepRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"


def rows_from_json(text: str) -> list[SweepRow]:
    return [SweepRow(**r) for r in json.loads(text)]


def output_paths(output_path: str) -> tuple[Path, Path]:
    """CSV and JSON paths derived from one output stem."""
    base = Path(output_path)
    if base.suffix.lower() in (".csv", ".json"):
        base = base.with_suffix("")
    return base.with_suffix(".csv"), base.with_suffix(".json")


def write_outputs(rows: Sequence[SweepRow], output_path: str) -> tuple[Path, Path]:
    csv_path, json_path = output_paths(output_path)
    try:
        csv_path.write_text(rows_to_csv(rows))
        json_path.write_text(rows_to_json(rows))
    except OSError as exc:
        raise SweepError(f"cannot write output {output_path!r}: {exc}") from exc
    return csv_path, json_path


__all__ = [
    "SweepError", "SweepRow", "SweepSpec", "estimate_rate", "format_b", "parse_b",
    "rows_from_csv", "rows_from_json", "rows_to_csv", "rows_to_json", "run_sweep",
    "write_outputs",
]
