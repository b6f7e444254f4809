"""Command-line driver: ``simulate``, ``sweep`` and ``verify``.

Settings come from an optional flat ``key = value`` file and are overridden
by command-line flags. Progress goes to stderr; data goes to the output
file or stdout.
"""

from __future__ import annotations

import argparse
import configparser
import itertools
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from rgs_repeater.analytics import (
    SweepError,
    SweepSpec,
    estimate_rate,
    parse_b,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)
from rgs_repeater.ledger import comms_ledger, reconcile
from rgs_repeater.protocol import run_attempt, trial_rng
from rgs_repeater.rgs import RgsSpec
from rgs_repeater.topology import ChainConfig
from rgs_repeater.verification import (
    verify_chain_exhaustive,
    verify_chain_sampled,
    verify_graph_rules,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

DEFAULTS: dict[str, str] = {
    "distance": "1000",
    "spacing": "4",
    "attenuation": "0.2",
    "cap": "0.5",
    "efficiency": "1.0",
    "m": "14",
    "b": "10,5",
    "trials": "10",
    "seed": "0",
    "mode": "accounting",
    "out": "",
    "workers": "1",
    "period": "1e-6",
}

_SECTION = "settings"


class ConfigError(ValueError):
    """Raised for unreadable or invalid settings."""


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc
    values = dict(parser[_SECTION])
    unknown = sorted(set(values) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return values


def merged_settings(args: argparse.Namespace) -> dict[str, str]:
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(read_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = str(value)
    return settings


def _floats(text: str, key: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: expected numbers, got {text!r}") from exc


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from exc


def parse_specs(m_text: str, b_text: str) -> list[RgsSpec]:
    """``m`` is a comma list; ``b`` is a ``;``-separated list of branchings."""
    try:
        ms = [int(x) for x in m_text.split(",") if x.strip()]
        bs = [parse_b(chunk) for chunk in b_text.split(";") if chunk.strip()]
        return [RgsSpec(m, b) for m, b in itertools.product(ms, bs)]
    except ValueError as exc:
        raise ConfigError(f"invalid RGS shape m={m_text!r} b={b_text!r}: {exc}") from exc


def sweep_spec(settings: dict[str, str]) -> SweepSpec:
    try:
        return SweepSpec(
            distances_km=_floats(settings["distance"], "distance"),
            specs=parse_specs(settings["m"], settings["b"]),
            trials=_int(settings["trials"], "trials"),
            master_seed=_int(settings["seed"], "seed"),
            output_path=settings["out"],
            mode=settings["mode"],  # type: ignore[arg-type]
            rgss_spacing_km=_floats(settings["spacing"], "spacing")[0],
            attenuation_db_per_km=_floats(settings["attenuation"], "attenuation")[0],
            bsm_success_cap=_floats(settings["cap"], "cap")[0],
            detector_efficiency=_floats(settings["efficiency"], "efficiency")[0],
            workers=_int(settings["workers"], "workers"),
        )
    except (SweepError, IndexError) as exc:
        raise ConfigError(str(exc) or "missing value") from exc


def _progress(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def _emit(text: str, out: str) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {out!r}: {exc}") from exc
    else:
        sys.stdout.write(text)


def cmd_simulate(settings: dict[str, str]) -> int:
    spec = sweep_spec(settings)
    distance, rgs = spec.cells()[0]
    config = spec.config_for(distance, rgs)
    period = _floats(settings["period"], "period")[0]
    if period <= 0:
        raise ConfigError("period must be positive")
    outcomes = []
    for t in range(spec.trials):
        outcomes.append(run_attempt(config, trial_rng(spec.master_seed, 0, t), mode=spec.mode))
        if (t + 1) % max(1, spec.trials // 10) == 0:
            _progress(f"{t + 1}/{spec.trials} attempts")
    rate, rate_err = estimate_rate(outcomes, period)
    last = outcomes[-1]
    one = comms_ledger(last, "one_stage")
    two = comms_ledger(last, "two_stage")
    result: dict[str, Any] = {
        "distance_km": distance,
        "m": rgs.m,
        "b": list(rgs.b),
        "mode": spec.mode,
        "trials": spec.trials,
        "n_rgss": last.topology.n_rgss,
        "n_absa": last.topology.n_absa,
        "successes": sum(o.success for o in outcomes),
        "rate_pairs_per_s": rate,
        "rate_stderr": rate_err,
        "one_stage_end_bits": one.end_bits,
        "two_stage_end_bits": two.end_bits,
        "per_absa_bits_distinct": sorted(set(two.absa_processed())),
    }
    rec = reconcile(last)
    result["reconciliation"] = {
        "formula_total": rec.formula_total,
        "ledger_total": rec.ledger_total,
        "reference_total": rec.reference_total,
        "ratio": rec.ratio,
        "note": rec.note(),
    }
    _emit(json.dumps(result, indent=2) + "\n", settings["out"])
    return EXIT_OK


def cmd_sweep(settings: dict[str, str]) -> int:
    spec = sweep_spec(settings)
    rows = run_sweep(spec, progress=_progress, write=bool(spec.output_path))
    if not spec.output_path:
        sys.stdout.write(rows_to_csv(rows))
    else:
        _progress(f"wrote {len(rows)} rows to {spec.output_path} (.csv, .json)")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    reports = [verify_graph_rules(args.graphs, seed=args.seed)]
    for m, b in ((1, (1,)), (1, (2,))):
        reports.append(verify_chain_exhaustive(ChainConfig(8, 4, 0.0, 1.0, rgs_spec=RgsSpec(m, b))))
    lossy = ChainConfig(8, 4, 0.5, 0.7, rgs_spec=RgsSpec(1, (2, 2)))
    reports.append(verify_chain_sampled(lossy, args.chain_successes, seed=args.seed))
    for report in reports:
        print(report.summary())
        for failure in report.failures[:5]:
            print(f"  {failure}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rgs-repeater", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key = value settings file")
        p.add_argument("--distance", help="end-to-end distance in km (comma list for sweeps)")
        p.add_argument("--spacing", help="RGS source spacing in km")
        p.add_argument("--attenuation", help="fibre loss in dB/km")
        p.add_argument("--cap", help="BSM success probability cap")
        p.add_argument("--efficiency", help="detector efficiency")
        p.add_argument("--m", help="arms per half (comma list for sweeps)")
        p.add_argument("--b", help="branching, e.g. 10,5 (';' separates shapes)")
        p.add_argument("--trials", help="attempts per cell")
        p.add_argument("--seed", help="master seed")
        p.add_argument("--mode", choices=("accounting", "exact"))
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--workers", help="worker threads")
        p.add_argument("--period", help="attempt period in seconds for rate estimates")

    add_run_flags(sub.add_parser("simulate", help="run attempts for one configuration"))
    add_run_flags(sub.add_parser("sweep", help="sweep distances and RGS shapes"))
    verify = sub.add_parser("verify", help="check the simulator against the dense oracle")
    verify.add_argument("--graphs", type=int, default=500)
    verify.add_argument("--chain-successes", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        settings = merged_settings(args)
        if args.command == "simulate":
            return cmd_simulate(settings)
        return cmd_sweep(settings)
    except (ConfigError, SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
