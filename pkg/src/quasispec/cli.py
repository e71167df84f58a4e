"""Command-line front end.

Configuration is an INI file layered over the packaged ``default.ini``; any key
may be overridden with a dedicated flag or ``--set section.key=value``. Keys
not present in the defaults are rejected. Tabular output is CSV (17
significant digits, header comments carrying the version and a hash of the
resolved configuration) or, with ``--json``, an object with the keys
``tool, version, config_hash, config, meta, columns, rows``.

Exit status: 0 on success, 1 when a check fails or a computation errors,
2 on configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .errors import ConfigError, QuasispecError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


# ---------------------------------------------------------------- configuration

def load_defaults() -> dict[str, dict[str, str]]:
    text = resources.files("quasispec").joinpath("default.ini").read_text()
    return _parse_ini(text, "<defaults>")


def _parse_ini(text: str, origin: str) -> dict[str, dict[str, str]]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep key case (the coupling list is "T")
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from None
    return {s: dict(cp[s]) for s in cp.sections()}


def resolve_config(path: str | None, overrides: Sequence[tuple[str, str, str]]) -> dict[str, dict[str, str]]:
    """Defaults, then the file at ``path``, then ``(section, key, value)`` overrides."""
    cfg = load_defaults()

    def put(section, key, value, origin):
        if section not in cfg:
            raise ConfigError(f"{origin}: unknown section [{section}]")
        if key not in cfg[section]:
            raise ConfigError(f"{origin}: unknown key '{key}' in [{section}]")
        cfg[section][key] = str(value)

    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        for section, items in _parse_ini(text, path).items():
            for key, value in items.items():
                put(section, key, value, path)
    for section, key, value in overrides:
        put(section, key, value, "command line")
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Settings:
    raw: dict[str, dict[str, str]]

    def get(self, section: str, key: str) -> str:
        return self.raw[section][key]

    def _conv(self, section, key, fn, what):
        value = self.get(section, key)
        try:
            return fn(value)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"[{section}] {key} = {value!r} is not {what}") from None

    def float(self, section, key) -> float:
        v = self._conv(section, key, float, "a number")
        if not math.isfinite(v):
            raise ConfigError(f"[{section}] {key} must be finite")
        return v

    def int(self, section, key, minimum: int | None = None) -> int:
        v = self._conv(section, key, int, "an integer")
        if minimum is not None and v < minimum:
            raise ConfigError(f"[{section}] {key} must be >= {minimum}")
        return v

    def floats(self, section, key) -> list[float]:
        return self._conv(section, key, lambda s: [float(x) for x in s.split(",") if x.strip()], "a number list")

    def ints(self, section, key) -> list[int]:
        return self._conv(section, key, lambda s: [int(x) for x in s.split(",") if x.strip()], "an integer list")

    def model(self):
        from .arithmetic import parse_frequency
        from .model import ModelParams

        lam = self.float("model", "lambda")
        T = self.floats("model", "T")
        if not T:
            raise ConfigError("[model] T must list at least one coupling")
        freq = parse_frequency(self.get("model", "alpha"))
        alpha = freq.exact if freq.exact is not None else freq.alpha
        try:
            return ModelParams.from_alpha(lam, T, alpha), freq
        except ValueError as exc:
            raise ConfigError(f"[model] {exc}") from None


# ---------------------------------------------------------------- output

@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def _jsonable(x: Any) -> Any:
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def render(table: Table, cfg: dict, as_json: bool) -> str:
    h = config_hash(cfg)
    if as_json:
        doc = {"tool": "quasispec", "version": __version__, "config_hash": h, "config": cfg,
               "meta": _jsonable(table.meta), "columns": table.columns, "rows": _jsonable(table.rows)}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# quasispec {__version__} config_hash={h}\n")
    buf.write(f"# config {json.dumps(cfg, sort_keys=True, separators=(',', ':'))}\n")
    for k, v in table.meta.items():
        buf.write(f"# {k}: {json.dumps(_jsonable(v))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------- commands

class CheckFailed(Exception):
    """A command's own consistency check did not hold."""


def _energy_grid(s: Settings) -> np.ndarray:
    lo, hi = s.float("lyapunov", "e_min"), s.float("lyapunov", "e_max")
    n = s.int("lyapunov", "e_points", 1)
    if hi < lo:
        raise ConfigError("[lyapunov] e_max must be >= e_min")
    return np.linspace(lo, hi, n)


def cmd_lyapunov(s: Settings, threads: int | None) -> Table:
    from .lyapunov import le_sweep

    params, _ = s.model()
    schedule = s.ints("lyapunov", "schedule")
    if not schedule or min(schedule) < 1:
        raise ConfigError("[lyapunov] schedule needs positive step counts")
    sweep = le_sweep(params, _energy_grid(s), schedule, s.int("lyapunov", "grid", 1), threads)
    return Table(["E", "L", "m", "spread"], [[E, est.value, est.m, est.spread] for E, est in sweep])


def cmd_herman(s: Settings, threads: int | None) -> Table:
    from .lyapunov import herman_lower_bound, le_sweep

    params, _ = s.model()
    bound = herman_lower_bound(params)
    sweep = le_sweep(params, _energy_grid(s), s.ints("lyapunov", "schedule"), s.int("lyapunov", "grid", 1), threads)
    rows = [[E, est.value, bound, est.value - bound] for E, est in sweep]
    table = Table(["E", "L", "herman_bound", "margin"], rows, {"herman_bound": bound})
    if any(r[3] < -0.05 for r in rows):
        raise CheckFailed(("lyapunov.herman_lower_bound", f"lambda={params.lam}, T={params.T}",
                           "an estimate lies more than 0.05 below the bound"), table)
    return table


def cmd_spectrum(s: Settings, threads: int | None) -> Table:
    from .numerics import IntervalUnion, hausdorff_distance
    from .spectrum import rational_bands, truncated_spectrum_oracle

    params, freq = s.model()
    if freq.exact is None:
        raise ConfigError("[model] alpha must be an exact rational p/q for band spectra")
    bands = rational_bands(params, s.int("spectrum", "theta_samples", 1), s.float("spectrum", "e_resolution"),
                           s.get("spectrum", "method"))
    meta = {"p": bands.p, "q": bands.q, "P": bands.P, "measure": bands.measure, "bands": len(bands.bands)}
    n = s.int("spectrum", "oracle_n", 0)
    if n >= 2:
        ev = truncated_spectrum_oracle(params, s.float("spectrum", "oracle_theta"), n)
        meta["oracle_n"] = n
        meta["oracle_hausdorff"] = hausdorff_distance(bands.bands, IntervalUnion.from_points(ev))
    return Table(["lo", "hi"], [[lo, hi] for lo, hi in bands.bands], meta)


def cmd_cf(s: Settings, threads: int | None) -> Table:
    from .arithmetic import beta_estimate, liouville_construct, parse_frequency

    levels = s.int("cf", "liouville_levels", 0)
    if levels > 0:
        cf, _ = liouville_construct(levels)
    else:
        cf = parse_frequency(s.get("model", "alpha"), terms=s.int("cf", "terms", 1)).cf
    quotients = (cf.a0,) + cf.quotients
    rows = [[n, quotients[n] if n < len(quotients) else "", p, q] for n, (p, q) in enumerate(cf.convergents)]
    meta = {"alpha": cf.alpha, "halt_reason": cf.halt_reason}
    if len(cf.convergents) >= 2:
        beta, arg = beta_estimate(cf)
        meta["beta_max"], meta["beta_argmax"] = beta, arg
    return Table(["n", "a", "p", "q"], rows, meta)


def cmd_gordon(s: Settings, threads: int | None) -> Table:
    from .gordon import gordon_diagnostics

    params, freq = s.model()
    theta = s.float("gordon", "theta")
    cols = None
    rows = []
    failures = []
    for level in s.ints("gordon", "levels"):
        for E in s.floats("gordon", "energies"):
            if level >= len(freq.cf.convergents):
                continue
            r = gordon_diagnostics(params, E, theta, level, cf=freq.cf).to_dict()
            if cols is None:
                cols = ["E"] + list(r)
            rows.append([E] + list(r.values()))
            if r["approximant_periodic"] and r["four_norm"] < 0.5 - 1e-9:
                failures.append((level, E))
    table = Table(cols or ["E"], rows, {"theta": theta})
    if failures:
        raise CheckFailed(("gordon.gordon_diagnostics", f"(level, E) = {failures}",
                           "four-norm of the periodic block below 1/2"), table)
    return table


def cmd_cohomology(s: Settings, threads: int | None) -> Table:
    from .cohomology import residual_slope, residual_sup, solve_for_model

    params, _ = s.model()
    try:
        sol = solve_for_model(params, s.float("cohomology", "divisor_floor"))
    except ValueError as exc:
        raise ConfigError(f"[model] {exc}") from None
    energies = s.floats("cohomology", "energies")
    fit = residual_slope(params, sol.h, energies)
    at_zero = residual_sup(params, 0.0, sol.h)
    coeffs = {int(n): [c.real, c.imag] for n, c in zip(sol.h.modes(), sol.h.coeffs) if c != 0}
    meta = {"h_coefficients": coeffs, "smallest_divisor": sol.smallest_divisor,
            "equation_residual": sol.residual_sup, "residual_at_E0": at_zero, "slope": fit.slope}
    table = Table(["E", "residual_sup"], [[E, r] for E, r in zip(fit.energies, fit.residuals)], meta)
    if at_zero > 1e-10:
        raise CheckFailed(("cohomology.residual_sup", f"E=0, T={params.T}",
                           f"conjugated cocycle differs from -I by {at_zero:.3e}"), table)
    return table


def cmd_equivalence(s: Settings, threads: int | None) -> Table:
    from .cohomology import amo_equivalence_check, equivalence_sweep

    params, _ = s.model()
    rng = np.random.default_rng(s.int("run", "seed"))
    m = s.int("equivalence", "m", 1)
    B = 2.0 + abs(params.lam)
    rows = []
    for _ in range(s.int("equivalence", "samples", 1)):
        E, theta = float(rng.uniform(-B, B)), float(rng.uniform(0, 2 * math.pi))
        rows.append([E, theta, amo_equivalence_check(params.lam, params.omega, E, theta, m)])
    sweep = equivalence_sweep(params.lam, params.omega, np.linspace(-B, B, s.int("equivalence", "sweep_points", 1)),
                              threads=threads)
    tol = 1e-8 * max(1.0, m / 1e4)
    table = Table(["E", "theta", "max_difference"], rows, {"m": m, "max_exponent_difference": sweep, "tolerance": tol})
    if max(r[2] for r in rows) > tol or sweep > 1e-3:
        raise CheckFailed(("cohomology.amo_equivalence_check", f"lambda={params.lam}, m={m}",
                           "the two models disagree"), table)
    return table


def cmd_verify(s: Settings, threads: int | None, out=sys.stdout) -> tuple[Table, bool]:
    from .acceptance import CRITERIA, AcceptanceSettings, run_all

    chosen = s.get("verify", "criteria").strip().lower()
    numbers = sorted(CRITERIA) if chosen == "all" else s.ints("verify", "criteria")
    bad = [n for n in numbers if n not in CRITERIA]
    if bad:
        raise ConfigError(f"[verify] criteria: unknown numbers {bad}")
    settings = AcceptanceSettings(seed=s.int("run", "seed"), threads=threads, grid=s.int("verify", "grid", 1))

    def report(r, seconds):
        print(f"{r.line()} [{seconds:.1f}s]", file=out, flush=True)

    results = run_all(settings, numbers, report)
    table = Table(["criterion", "name", "passed", "measured", "tolerance"],
                  [[r.number, r.name, r.passed, r.measured, r.tolerance] for r in results])
    outdir = Path(s.get("verify", "outdir"))
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "acceptance.csv").write_text(render(table, s.raw, False))
    detail = {"tool": "quasispec", "version": __version__, "config_hash": config_hash(s.raw), "config": s.raw,
              "results": _jsonable([r.to_dict() for r in results])}
    (outdir / "acceptance.json").write_text(json.dumps(detail, indent=1) + "\n")
    return table, all(r.passed for r in results)


COMMANDS: dict[str, tuple[Callable | None, str, str]] = {
    "lyapunov": (cmd_lyapunov, "lyapunov.le_sweep", "Lyapunov exponent sweep over an energy grid"),
    "herman": (cmd_herman, "lyapunov.herman_lower_bound", "Lyapunov estimates against the Herman lower bound"),
    "spectrum": (cmd_spectrum, "spectrum.rational_bands",
                 "band spectrum of a rational approximant with oracle cross-check"),
    "cf": (cmd_cf, "arithmetic.continued_fraction_expand",
           "continued fraction expansion, convergents and beta estimate"),
    "gordon": (cmd_gordon, "gordon.gordon_diagnostics", "periodic-approximant non-decay diagnostics"),
    "cohomology": (cmd_cohomology, "cohomology.solve_cohomological",
                   "cohomological equation and conjugated cocycle (k=2, T(0)=0)"),
    "equivalence": (cmd_equivalence, "cohomology.amo_equivalence_check",
                    "alternating coupling versus constant coupling at omega + pi"),
    "verify": (None, "acceptance.run_all", "run the acceptance checks and write acceptance.csv / acceptance.json"),
}

# flag -> (section, key); flags are shared by every subcommand
FLAGS: dict[str, tuple[str, str, str]] = {
    "--lambda": ("model", "lambda", "coupling lambda"),
    "--T": ("model", "T", "comma-separated couplings T(0),...,T(k-1)"),
    "--alpha": ("model", "alpha", "frequency: golden, sqrt2, p/q, cf:[a1,...], liouville:N or a decimal"),
    "--seed": ("run", "seed", "seed for randomized checks"),
    "--emin": ("lyapunov", "e_min", "lower end of the energy grid"),
    "--emax": ("lyapunov", "e_max", "upper end of the energy grid"),
    "--points": ("lyapunov", "e_points", "number of energies"),
    "--schedule": ("lyapunov", "schedule", "comma-separated step counts"),
    "--grid": ("lyapunov", "grid", "phase samples per residue"),
    "--theta-samples": ("spectrum", "theta_samples", "phase samples for band unions"),
    "--method": ("spectrum", "method", "floquet or scan"),
    "--e-resolution": ("spectrum", "e_resolution", "energy step of the scan method"),
    "--oracle-n": ("spectrum", "oracle_n", "truncation size of the eigenvalue oracle (0 disables)"),
    "--terms": ("cf", "terms", "number of partial quotients"),
    "--liouville": ("cf", "liouville_levels", "build a Liouville frequency with this many levels"),
    "--energies": ("gordon", "energies", "comma-separated energies"),
    "--theta": ("gordon", "theta", "starting phase"),
    "--levels": ("gordon", "levels", "comma-separated convergent indices"),
    "--m": ("equivalence", "m", "steps per product"),
    "--samples": ("equivalence", "samples", "random (E, theta) samples"),
    "--outdir": ("verify", "outdir", "directory for acceptance.csv and acceptance.json"),
    "--criteria": ("verify", "criteria", "'all' or comma-separated criterion numbers"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file layered over the defaults")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override any configuration key")
    common.add_argument("--threads", type=int, help="worker threads (default: QUASISPEC_THREADS or CPU count)")
    common.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    common.add_argument("--out", help="write the table here instead of stdout")
    for flag, (section, key, help_text) in FLAGS.items():
        common.add_argument(flag, dest=f"flag_{section}_{key}", help=help_text)
    parser = argparse.ArgumentParser(prog="quasispec", description="Quasiperiodic Schrodinger cocycle toolkit")
    parser.add_argument("--version", action="version", version=f"quasispec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def _overrides(args) -> list[tuple[str, str, str]]:
    out = []
    for item in args.set:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        lhs, value = item.split("=", 1)
        section, key = lhs.split(".", 1)
        out.append((section.strip(), key.strip(), value.strip()))
    for flag, (section, key, _) in FLAGS.items():
        value = getattr(args, f"flag_{section}_{key}")
        if value is not None:
            out.append((section, key, value))
    return out


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    settings = None
    try:
        settings = Settings(resolve_config(args.config, _overrides(args)))
        threads = args.threads
        if threads is None and os.environ.get("QUASISPEC_THREADS"):
            threads = Settings({"env": {"QUASISPEC_THREADS": os.environ["QUASISPEC_THREADS"]}}).int(
                "env", "QUASISPEC_THREADS", 1)
        if threads is not None and threads < 1:
            raise ConfigError("--threads must be >= 1")
        status = EXIT_OK
        func, operation, _ = COMMANDS[args.command]
        try:
            if args.command == "verify":
                table, ok = cmd_verify(settings, threads, stdout)
                status = EXIT_OK if ok else EXIT_FAIL
            else:
                table = func(settings, threads)
        except CheckFailed as exc:
            (where, inputs, what), table = exc.args
            print(f"quasispec {args.command}: check failed in {where}({inputs}): {what}", file=stderr)
            status = EXIT_FAIL
    except ConfigError as exc:
        print(f"quasispec: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (QuasispecError, ValueError, ArithmeticError) as exc:
        model = settings.raw["model"] if settings is not None else {}
        inputs = ", ".join(f"{k}={v}" for k, v in model.items())
        print(f"quasispec {args.command}: {operation}({inputs}) failed: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_FAIL
    text = render(table, settings.raw, args.json)
    if args.out:
        Path(args.out).write_text(text)
    elif args.command != "verify":
        stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
