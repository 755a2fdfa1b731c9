"""Command-line front end.

Subcommands: ``run`` (one key session, JSON/CSV/text report), ``states``
(catalog of the 12 protocol states with amplitudes, phases in degrees,
polarization degree and Poincare points) and ``sweep`` (one CSV row per
filter/eavesdropper combination).

Angles cross the I/O boundary in degrees; JSON carries 12 significant
digits, human-readable text 6.  Exit codes: 0 success, 1 internal
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .optics import FilterMode, LossModel
from .polarization import degree_of_polarization, poincare_points
from .protocol import (
    Eavesdropper,
    PulseLog,
    SessionConfig,
    SessionStats,
    run_session,
)
from .qutrit import protocol_state

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

JSON_SIGFIGS = 12
TEXT_SIGFIGS = 6

_FORMATS = ("json", "csv", "text")
_EVE_CHOICES = tuple(e.value for e in Eavesdropper)
_FILTER_CHOICES = tuple(f.value for f in FilterMode)
_CONFIG_KEYS = ("pulses", "seed", "eve", "filter", "efficiency", "format", "records")

RUN_CSV_COLUMNS = (
    "pulses",
    "seed",
    "eve",
    "filter",
    "efficiency",
    "n_pulses",
    "n_basis_matched",
    "n_registered_matched",
    "sifted_length",
    "trit_error_rate",
    "total_loss_fraction",
    "loss_percent",
    "matched_basis_registration_percent",
    "wall_time_s",
)

STATES_CSV_COLUMNS = (
    "basis",
    "state",
    "label",
    "c1_re",
    "c1_im",
    "c2_re",
    "c2_im",
    "c3_re",
    "c3_im",
    "amp1",
    "amp2",
    "amp3",
    "phase1_deg",
    "phase2_deg",
    "phase3_deg",
    "dop",
    "theta1_deg",
    "phi1_deg",
    "theta2_deg",
    "phi2_deg",
)

RECORD_CSV_COLUMNS = (
    "alice_basis",
    "alice_state",
    "eve_basis",
    "eve_outcome",
    "bob_basis",
    "bob_outcome",
)


class UsageError(Exception):
    """Bad flags or configuration; reported on one line with exit code 2."""


def _round_sig(x: float, sig: int = JSON_SIGFIGS) -> float:
    if x == 0.0:
        return 0.0
    return float(f"{x:.{sig}g}")


def _fmt_text(value) -> str:
    if isinstance(value, float):
        return f"{value:.{TEXT_SIGFIGS}g}"
    return str(value)


@dataclass
class RunReport:
    """Session report: config echo, statistics, derived percentages, timing.

    Floats are stored at JSON precision so a report round-trips losslessly
    through its JSON form.
    """

    config: dict
    stats: SessionStats
    loss_percent: float
    matched_registration_percent: float
    wall_time_s: float

    @classmethod
    def from_session(cls, config: dict, stats: SessionStats, wall_time_s: float) -> "RunReport":
        matched_pct = (
            100.0 * stats.n_registered_matched / stats.n_basis_matched
            if stats.n_basis_matched
            else 0.0
        )
        rounded = SessionStats(
            n_pulses=stats.n_pulses,
            n_basis_matched=stats.n_basis_matched,
            n_registered_matched=stats.n_registered_matched,
            sifted_length=stats.sifted_length,
            trit_error_rate=_round_sig(stats.trit_error_rate),
            total_loss_fraction=_round_sig(stats.total_loss_fraction),
        )
        return cls(
            config=dict(config),
            stats=rounded,
            loss_percent=_round_sig(100.0 * stats.total_loss_fraction),
            matched_registration_percent=_round_sig(matched_pct),
            wall_time_s=_round_sig(wall_time_s),
        )

    def to_dict(self) -> dict:
        return {
            "config": dict(self.config),
            "stats": asdict(self.stats),
            "derived": {
                "loss_percent": self.loss_percent,
                "matched_basis_registration_percent": self.matched_registration_percent,
            },
            "wall_time_s": self.wall_time_s,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(
            config=dict(d["config"]),
            stats=SessionStats(**d["stats"]),
            loss_percent=d["derived"]["loss_percent"],
            matched_registration_percent=d["derived"]["matched_basis_registration_percent"],
            wall_time_s=d["wall_time_s"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def flat(self) -> dict:
        row = dict(self.config)
        row.update(asdict(self.stats))
        row["loss_percent"] = self.loss_percent
        row["matched_basis_registration_percent"] = self.matched_registration_percent
        row["wall_time_s"] = self.wall_time_s
        return row


def state_label(basis: int, state: int) -> str:
    return ("alpha", "beta", "gamma")[state] + "'" * basis


def state_rows() -> list[dict]:
    """One dict per protocol state, in catalog column order."""
    rows = []
    for b in range(4):
        for s in range(3):
            q = protocol_state(b, s)
            p1, p2 = poincare_points(q)
            row = {"basis": b, "state": s, "label": state_label(b, s)}
            for i, c in enumerate(q.amplitudes(), start=1):
                amp = abs(c)
                row[f"c{i}_re"] = _round_sig(c.real)
                row[f"c{i}_im"] = _round_sig(c.imag)
                row[f"amp{i}"] = _round_sig(amp)
                row[f"phase{i}_deg"] = _round_sig(
                    math.degrees(cmath.phase(c)) if amp > 1e-12 else 0.0
                )
            row["dop"] = _round_sig(degree_of_polarization(q))
            row["theta1_deg"] = _round_sig(math.degrees(p1.theta))
            row["phi1_deg"] = _round_sig(math.degrees(p1.phi))
            row["theta2_deg"] = _round_sig(math.degrees(p2.theta))
            row["phi2_deg"] = _round_sig(math.degrees(p2.phi))
            rows.append({k: row[k] for k in STATES_CSV_COLUMNS})
    return rows


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def _write_records_csv(path: str, log: PulseLog) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_CSV_COLUMNS)
        a_b = log.alice_basis.tolist()
        a_s = log.alice_state.tolist()
        b_b = log.bob_basis.tolist()
        b_o = log.bob_outcome.tolist()
        if log.eve_basis is None:
            e_b = e_o = [""] * len(a_b)
        else:
            e_b = log.eve_basis.tolist()
            e_o = log.eve_outcome.tolist()
        for row in zip(a_b, a_s, e_b, e_o, b_b, b_o):
            writer.writerow(row[:5] + ("" if row[5] < 0 else row[5],))


def _load_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key '{key}'")
        out[key] = value
    return out


def _convert(name: str, raw: str, kind):
    try:
        return kind(raw)
    except ValueError:
        raise UsageError(f"config key '{name}': cannot parse {raw!r}")


def _merged(args, name: str, cfg: dict[str, str], kind, default):
    """Flag value if given, else config-file value, else the default."""
    value = getattr(args, name)
    if value is not None:
        return value
    if name in cfg:
        return _convert(name, cfg[name], kind)
    return default


def _check_choice(name: str, value: str, choices) -> str:
    if value not in choices:
        raise UsageError(f"--{name} must be one of {', '.join(choices)} (got '{value}')")
    return value


def _session_options(args) -> dict:
    cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}
    pulses = _merged(args, "pulses", cfg, int, 100_000)
    seed = _merged(args, "seed", cfg, int, 0)
    eve = _check_choice("eve", _merged(args, "eve", cfg, str, "none"), _EVE_CHOICES)
    filt = _check_choice("filter", _merged(args, "filter", cfg, str, "worst"), _FILTER_CHOICES)
    efficiency = _merged(args, "efficiency", cfg, float, 1.0)
    fmt = _check_choice("format", _merged(args, "format", cfg, str, "text"), _FORMATS)
    records = _merged(args, "records", cfg, str, None)
    if pulses < 1:
        raise UsageError(f"--pulses must be at least 1 (got {pulses})")
    if not 0 <= seed < 2 ** 64:
        raise UsageError(f"--seed must be an unsigned 64-bit integer (got {seed})")
    if not 0.0 < efficiency <= 1.0:
        raise UsageError(f"--efficiency must lie in (0, 1] (got {efficiency})")
    return {
        "pulses": pulses,
        "seed": seed,
        "eve": eve,
        "filter": filt,
        "efficiency": efficiency,
        "format": fmt,
        "records": records,
    }


def _run_one(
    pulses: int, seed: int, eve: str, filt: str, efficiency: float
) -> tuple[RunReport, PulseLog]:
    cfg = SessionConfig(
        n_pulses=pulses,
        seed=seed,
        eavesdropper=Eavesdropper(eve),
        loss=LossModel(filter_mode=FilterMode(filt), detector_efficiency=efficiency),
    )
    start = time.perf_counter()
    stats, log = run_session(cfg)
    wall = time.perf_counter() - start
    echo = {
        "pulses": pulses,
        "seed": seed,
        "eve": eve,
        "filter": filt,
        "efficiency": _round_sig(efficiency),
    }
    report = RunReport.from_session(echo, stats, wall)
    return report, log


def cmd_run(args) -> int:
    opts = _session_options(args)
    report, log = _run_one(
        opts["pulses"], opts["seed"], opts["eve"], opts["filter"], opts["efficiency"]
    )
    if opts["records"]:
        _write_records_csv(opts["records"], log)
    fmt = opts["format"]
    if fmt == "json":
        print(report.to_json())
    elif fmt == "csv":
        sys.stdout.write(_csv_text(RUN_CSV_COLUMNS, [report.flat()]))
    else:
        flat = report.flat()
        for key in RUN_CSV_COLUMNS:
            print(f"{key}: {_fmt_text(flat[key])}")
    return EXIT_OK


def cmd_states(args) -> int:
    fmt = args.format
    rows = state_rows()
    if fmt == "json":
        print(json.dumps({"states": rows}, indent=2, sort_keys=True))
    elif fmt == "csv":
        sys.stdout.write(_csv_text(STATES_CSV_COLUMNS, rows))
    else:
        head = ("label", "amp1", "amp2", "amp3", "phase1_deg", "phase2_deg",
                "phase3_deg", "dop", "theta1_deg", "phi1_deg", "theta2_deg", "phi2_deg")
        print("  ".join(f"{h:>10}" for h in head))
        for row in rows:
            print("  ".join(f"{_fmt_text(row[h]):>10}" for h in head))
    return EXIT_OK


def _parse_list(name: str, raw: str, choices) -> list[str]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise UsageError(f"--{name} needs at least one entry")
    for item in items:
        _check_choice(name, item, choices)
    return items


def cmd_sweep(args) -> int:
    filters = _parse_list("filters", args.filters, _FILTER_CHOICES)
    eves = _parse_list("eves", args.eves, _EVE_CHOICES)
    if args.pulses < 1:
        raise UsageError(f"--pulses must be at least 1 (got {args.pulses})")
    if not 0.0 < args.efficiency <= 1.0:
        raise UsageError(f"--efficiency must lie in (0, 1] (got {args.efficiency})")
    rows = []
    index = 0
    for filt in filters:
        for eve in eves:
            seed = (args.seed + index) % 2 ** 64
            report, _ = _run_one(args.pulses, seed, eve, filt, args.efficiency)
            rows.append(report.flat())
            index += 1
    sys.stdout.write(_csv_text(RUN_CSV_COLUMNS, rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biphoton-qkd",
        description="Four-basis biphoton-qutrit key distribution simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one key session and report statistics")
    run.add_argument("--pulses", type=int, default=None, help="number of pulses (default 100000)")
    run.add_argument("--seed", type=int, default=None, help="session seed (default 0)")
    run.add_argument("--eve", choices=_EVE_CHOICES, default=None,
                     help="eavesdropper model (default none)")
    run.add_argument("--filter", choices=_FILTER_CHOICES, default=None,
                     help="polarization-filter loss bound (default worst)")
    run.add_argument("--efficiency", type=float, default=None,
                     help="detector efficiency in (0, 1] (default 1)")
    run.add_argument("--format", choices=_FORMATS, default=None,
                     help="report format (default text)")
    run.add_argument("--config", default=None,
                     help="key = value config file; flags take precedence")
    run.add_argument("--records", default=None,
                     help="write the per-pulse record CSV to this path")
    run.set_defaults(func=cmd_run)

    states = sub.add_parser("states", help="print the 12-state protocol catalog")
    states.add_argument("--format", choices=_FORMATS, default="csv",
                        help="catalog format (default csv)")
    states.set_defaults(func=cmd_states)

    sweep = sub.add_parser("sweep", help="run a filter/eavesdropper grid, one CSV row each")
    sweep.add_argument("--pulses", type=int, default=100_000)
    sweep.add_argument("--seed", type=int, default=0,
                       help="base seed; row i runs with seed + i")
    sweep.add_argument("--efficiency", type=float, default=1.0)
    sweep.add_argument("--filters", default="worst,best",
                       help="comma-separated filter modes")
    sweep.add_argument("--eves", default="none,intercept-resend",
                       help="comma-separated eavesdropper models")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse printed its own diagnostic
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # internal failure contract: one line, exit 1
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
