"""Command-line front end.

Examples:

    wideband-tradeoff analyze --channel awgn --gain 1
    wideband-tradeoff curve --channel awgn --gain 1 --n-points 200 -o curve.csv
    wideband-tradeoff validate --spec channel.toml --format json

A channel spec file is TOML with either

    kind = "awgn"
    gain = 1.0

or

    kind = "tabulated"
    points = [[0.0, 0.0], [0.1, 0.1375], ...]
    c1_prime = 1.4427          # optional, with c2_double_prime
    c2_double_prime = -1.4427

Exit status: 0 success, 1 validation or solver failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from wideband_tradeoff.approx import DEFAULT_EPSILON, c1_affine, c1_eps, c2_nonlinear
from wideband_tradeoff.channel_models import (
    AWGN,
    TABULATED,
    ChannelModel,
    DerivativesAtZero,
    derivatives_at_zero,
    has_estimated_derivatives,
)
from wideband_tradeoff.errors import ConvergenceError, InvalidChannelError, WidebandError
from wideband_tradeoff.tradeoff import generate_curve, shannon_limit, wideband_slope
from wideband_tradeoff.validate import (
    ValidationReport,
    check_lower_bound,
    check_sandwich,
    check_slope_equality,
    convexity_probe,
    error_report,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

CURVE_HEADER = ("gamma_db", "ebn0_linear", "se_true", "se_c1", "se_c2", "se_avg", "se_c1_eps")
REPORT_HEADER = (
    "check_name", "required", "passed", "worst_violation", "worst_gamma_db", "n_points", "tolerance",
)
SPEC_KEYS = {"kind", "gain", "points", "c1_prime", "c2_double_prime"}
# bound-check tolerances, b/s/Hz
AWGN_TOL = 1e-9
TABULATED_TOL = 1e-4
# interpolant curvature inside the first table interval is unreliable, so
# tabulated slopes are probed further out and judged more loosely
AWGN_SLOPE = {"eps_db": 1e-4, "rtol": 1e-3}
TABULATED_SLOPE = {"eps_db": 1e-2, "rtol": 1e-2}
REQUIRED_CHECKS = ("lower_bound", "sandwich", "slope_equality")


class ConfigError(WidebandError):
    """Invalid command-line options or channel spec file."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    channel: ChannelModel
    gamma_offset_max_db: float = 10.0
    n_points: int = 200
    epsilon: float = DEFAULT_EPSILON
    output_format: str = "csv"
    output_path: Optional[Path] = None
    tol: Optional[float] = None

    def __post_init__(self):
        if self.command not in ("analyze", "curve", "validate"):
            raise ConfigError(f"unknown command {self.command!r}")
        if self.n_points < 2:
            raise ConfigError(f"n_points must be >= 2, got {self.n_points}")
        if not (math.isfinite(self.gamma_offset_max_db) and self.gamma_offset_max_db > 0):
            raise ConfigError(f"gamma offset must be > 0, got {self.gamma_offset_max_db}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if self.tol is not None and not (math.isfinite(self.tol) and self.tol >= 0):
            raise ConfigError(f"tol must be >= 0, got {self.tol}")

    @property
    def bound_tol(self) -> float:
        if self.tol is not None:
            return self.tol
        return AWGN_TOL if self.channel.kind == AWGN else TABULATED_TOL


def format_number(x: float) -> str:
    """12 significant digits; scientific only for |x| < 1e-4 or |x| >= 1e7."""
    x = float(x)
    if x == 0:
        return "0"
    if not math.isfinite(x):
        return repr(x)
    if 1e-4 <= abs(x) < 1e7:
        return format(x, ".12g")
    return format(x, ".11e")


def _json_number(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return float(format_number(x))


def load_channel_spec(path: Path) -> ChannelModel:
    try:
        with open(path, "rb") as fh:
            spec = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read channel spec {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed channel spec {path}: {exc}") from exc
    return channel_from_mapping(spec)


def channel_from_mapping(spec: dict) -> ChannelModel:
    unknown = set(spec) - SPEC_KEYS
    if unknown:
        raise ConfigError(f"unknown channel spec keys: {', '.join(sorted(unknown))}")
    kind = spec.get("kind")
    if kind == AWGN:
        extra = set(spec) - {"kind", "gain"}
        if extra:
            raise ConfigError(f"keys not valid for awgn: {', '.join(sorted(extra))}")
        return ChannelModel.awgn(_as_float(spec.get("gain", 1.0), "gain"))
    if kind == TABULATED:
        if "gain" in spec:
            raise ConfigError("gain is not valid for a tabulated channel")
        points = spec.get("points")
        if not isinstance(points, list) or not all(
            isinstance(p, list) and len(p) == 2 for p in points
        ):
            raise ConfigError("points must be a list of [snr, capacity] pairs")
        derivs = None
        has_c1, has_c2 = "c1_prime" in spec, "c2_double_prime" in spec
        if has_c1 != has_c2:
            raise ConfigError("c1_prime and c2_double_prime must be given together")
        if has_c1:
            derivs = DerivativesAtZero(
                _as_float(spec["c1_prime"], "c1_prime"),
                _as_float(spec["c2_double_prime"], "c2_double_prime"),
            )
        pairs = [(_as_float(s, "snr"), _as_float(c, "capacity")) for s, c in points]
        return ChannelModel.tabulated(pairs, derivs)
    raise ConfigError(f"channel kind must be 'awgn' or 'tabulated', got {kind!r}")


def _as_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _derivs(config: RunConfig) -> DerivativesAtZero:
    if has_estimated_derivatives(config.channel):
        print(
            "warning: derivatives at zero SNR estimated by finite differences on the "
            "interpolated table; declare c1_prime and c2_double_prime to override",
            file=sys.stderr,
        )
    return derivatives_at_zero(config.channel)


def run_analyze(config: RunConfig) -> dict:
    derivs = _derivs(config)
    ebn0_min, gamma_min = shannon_limit(derivs)
    slope_linear, slope_db = wideband_slope(derivs)
    return {
        "c1_prime": derivs.c1,
        "c2_double_prime": derivs.c2,
        "ebn0_min_linear": ebn0_min,
        "gamma_min_db": gamma_min,
        "slope_linear": slope_linear,
        "slope_db": slope_db,
    }


def curve_rows(config: RunConfig) -> list[tuple[float, ...]]:
    """Rows of CURVE_HEADER for the configured grid."""
    derivs = _derivs(config)
    curve = generate_curve(config.channel, config.gamma_offset_max_db, config.n_points)
    rows = []
    for p in curve.points:
        if abs(p.ebn0 * p.se - p.snr) > 1e-12 * p.snr:
            raise ConvergenceError(f"Eb/N0 * C != SNR at gamma {p.gamma_db!r}")
        upper = c1_affine(derivs, p.gamma_db)
        lower = c2_nonlinear(derivs, p.ebn0)
        rows.append(
            (p.gamma_db, p.ebn0, p.se, upper, lower, 0.5 * (upper + lower),
             c1_eps(derivs, p.gamma_db, config.epsilon))
        )
    return rows


def run_curve(config: RunConfig) -> str:
    rows = curve_rows(config)
    if config.output_format == "json":
        records = [{k: _json_number(v) for k, v in zip(CURVE_HEADER, row)} for row in rows]
        return json.dumps({"columns": list(CURVE_HEADER), "rows": records}, indent=2) + "\n"
    return _csv_text(CURVE_HEADER, [[format_number(v) for v in row] for row in rows])


def average_improvement_report(errors) -> ValidationReport:
    best_single = min(errors.max_abs_c1, errors.max_abs_c2)
    return ValidationReport(
        check_name="average_improvement",
        passed=errors.average_improves,
        worst_violation=errors.max_abs_avg - best_single,
        worst_gamma_db=float(errors.gamma_db[-1]),
        n_points=len(errors.gamma_db),
        tolerance=0.0,
        details=errors.summary(),
    )


def run_validate(config: RunConfig) -> tuple[list[ValidationReport], bool]:
    """Run every check; returns the reports and whether all required ones passed.

    Convexity and average improvement are informational: neither is a
    guaranteed property of a channel, so they never fail the run.
    """
    derivs = _derivs(config)
    tol = config.bound_tol
    curve = generate_curve(config.channel, config.gamma_offset_max_db, config.n_points)
    reports = [
        check_lower_bound(curve, derivs, tol),
        check_sandwich(curve, derivs, config.epsilon, tol),
        check_slope_equality(
            config.channel,
            derivs,
            **(AWGN_SLOPE if config.channel.kind == AWGN else TABULATED_SLOPE),
        ),
        convexity_probe(config.channel),
        average_improvement_report(error_report(curve, derivs)),
    ]
    ok = all(r.passed for r in reports if r.check_name in REQUIRED_CHECKS)
    return reports, ok


def render_reports(reports: list[ValidationReport], ok: bool, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "passed": ok,
            "checks": [
                {
                    "check_name": r.check_name,
                    "required": r.check_name in REQUIRED_CHECKS,
                    "passed": r.passed,
                    "worst_violation": _json_number(r.worst_violation),
                    "worst_gamma_db": _json_number(r.worst_gamma_db),
                    "n_points": r.n_points,
                    "tolerance": _json_number(r.tolerance),
                    "details": {k: _json_number(v) for k, v in r.details.items()},
                }
                for r in reports
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    rows = [
        [
            r.check_name,
            str(r.check_name in REQUIRED_CHECKS).lower(),
            str(r.passed).lower(),
            format_number(r.worst_violation),
            format_number(r.worst_gamma_db),
            str(r.n_points),
            format_number(r.tolerance),
        ]
        for r in reports
    ]
    return _csv_text(REPORT_HEADER, rows)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _render_analyze(summary: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({k: _json_number(v) for k, v in summary.items()}, indent=2) + "\n"
    return _csv_text(("quantity", "value"), [[k, format_number(v)] for k, v in summary.items()])


def _write(text: str, path: Optional[Path]):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wideband-tradeoff",
        description="Spectral efficiency versus Eb/N0 in the wideband regime.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text, default_fmt in (
        ("analyze", "Shannon limit and wideband slope", "json"),
        ("curve", "true curve and approximations on a dB grid", "csv"),
        ("validate", "check bounds, slope and curvature claims", "csv"),
    ):
        p = sub.add_parser(name, help=help_text)
        source = p.add_mutually_exclusive_group()
        source.add_argument("--channel", choices=[AWGN], help="inline channel kind")
        source.add_argument("--spec", type=Path, help="channel spec file (TOML)")
        p.add_argument("--gain", type=float, default=None, help="AWGN channel gain (default 1)")
        p.add_argument("--format", dest="output_format", choices=["csv", "json"], default=default_fmt)
        p.add_argument("-o", "--output", dest="output_path", type=Path, default=None)
        if name in ("curve", "validate"):
            p.add_argument("--max-db", dest="gamma_offset_max_db", type=float, default=10.0,
                           help="grid extent above the Shannon limit, dB (default 10)")
            p.add_argument("--n-points", type=int, default=200)
            p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                           help="slope inflation for the upper bracket, b/s/Hz/dB")
        if name == "validate":
            p.add_argument("--tol", type=float, default=None,
                           help="bound-check tolerance, b/s/Hz (default 1e-9 awgn, 1e-4 tabulated)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.spec is not None:
        if args.gain is not None:
            raise ConfigError("--gain cannot be combined with --spec")
        channel = load_channel_spec(args.spec)
    else:
        channel = ChannelModel.awgn(1.0 if args.gain is None else args.gain)
    return RunConfig(
        command=args.command,
        channel=channel,
        gamma_offset_max_db=getattr(args, "gamma_offset_max_db", 10.0),
        n_points=getattr(args, "n_points", 200),
        epsilon=getattr(args, "epsilon", DEFAULT_EPSILON),
        output_format=args.output_format,
        output_path=args.output_path,
        tol=getattr(args, "tol", None),
    )


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except WidebandError as exc:
        print(f"error: invalid channel or configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if config.command == "analyze":
            text = _render_analyze(run_analyze(config), config.output_format)
            status = EXIT_OK
        elif config.command == "curve":
            text = run_curve(config)
            status = EXIT_OK
        else:
            reports, ok = run_validate(config)
            text = render_reports(reports, ok, config.output_format)
            status = EXIT_OK if ok else EXIT_FAILED
            for r in reports:
                if not r.passed:
                    tag = "FAIL" if r.check_name in REQUIRED_CHECKS else "note"
                    print(f"{tag} {r.check_name}: worst violation {format_number(r.worst_violation)} "
                          f"at gamma {format_number(r.worst_gamma_db)} dB "
                          f"(tolerance {format_number(r.tolerance)})", file=sys.stderr)
    except (ConfigError, InvalidChannelError) as exc:
        print(f"error: invalid channel or configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WidebandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED

    try:
        _write(text, config.output_path)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return status


if __name__ == "__main__":
    sys.exit(main())
