"""Command-line interface.

Usage::

    lgpovm COMMAND [--config FILE] [options]

Commands: ``klg``, ``sweep-kb``, ``sweep-fsigma``, ``threshold``, ``check``.

Config files hold one ``key=value`` per line; keys are the long option names
without the leading dashes (``theta-over-pi``, ``b``, ...), ``#`` starts a
comment line, and list values are comma separated. A list item may also be an
inclusive range ``start:stop:step``. Command-line options override the file.

Exit codes: 0 success, 2 usage error or unknown/conflicting key,
3 malformed half-integer, 4 value out of domain, 5 missing required field,
6 ill-posed computation (an outcome with zero probability),
7 self-check failure, 8 malformed numeric value or config line.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .checks import run_checks
from .correlations import DynamicsParams, k_lg, maximally_mixed
from .errors import InvalidInputError, OutcomeImpossibleError
from .measurability import MeasurabilityParam, build_A, build_povm, sigma_to_b
from .spin_ops import HalfInt
from .sweep import (
    FIG4_B_GRID,
    FIG4_THETA_OVER_PI,
    SweepSpec,
    make_partition,
    sweep_f_vs_sigma,
    sweep_k_vs_b,
    violation_threshold,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BAD_HALFINT = 3
EXIT_DOMAIN = 4
EXIT_MISSING = 5
EXIT_ILL_POSED = 6
EXIT_CHECK_FAILED = 7
EXIT_MALFORMED = 8

COMMANDS = ("klg", "sweep-kb", "sweep-fsigma", "threshold", "check")
KEYS = ("j", "partition", "b", "sigma", "theta-over-pi", "gaps", "Omega", "omega", "output", "precision", "jobs")


class ConfigError(Exception):
    def __init__(self, code: int, key: str | None, message: str):
        self.code = code
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


@dataclass
class RunConfig:
    command: str
    j: HalfInt | None = None
    partition: str | None = None
    b: list[float] | None = None
    sigma: list[float] | None = None
    theta_over_pi: list[float] | None = None
    gaps: tuple[float, float, float] | None = None
    Omega: float = 0.0
    omega: float = 1.0
    output: Path | None = None
    precision: int = 12
    jobs: int = 1
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def b_values(self) -> list[float] | None:
        if self.sigma is not None:
            return [sigma_to_b(s) for s in self.sigma]
        return self.b


def read_config_file(path) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(EXIT_USAGE, "config", f"cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("_", "-")
        if not sep:
            raise ConfigError(EXIT_MALFORMED, None, f"{path}:{lineno}: expected key=value, got {line!r}")
        if key not in KEYS:
            raise ConfigError(EXIT_USAGE, key, f"unknown key in {path}:{lineno}")
        values[key] = value.strip()
    return values


def _number(key, text) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(EXIT_MALFORMED, key, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(EXIT_DOMAIN, key, f"must be finite, got {text!r}")
    return value


def parse_list(key, text) -> list[float]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise ConfigError(EXIT_MALFORMED, key, f"empty list item in {text!r}")
        if ":" in item:
            parts = item.split(":")
            if len(parts) != 3:
                raise ConfigError(EXIT_MALFORMED, key, f"range must be start:stop:step, got {item!r}")
            start, stop, step = (_number(key, p) for p in parts)
            if step <= 0 or stop < start:
                raise ConfigError(EXIT_MALFORMED, key, f"range {item!r} is empty or has a non-positive step")
            n = round((stop - start) / step)
            if abs(start + n * step - stop) > 1e-9 * max(1.0, abs(stop)):
                raise ConfigError(EXIT_MALFORMED, key, f"step does not divide range {item!r}")
            out.extend(round(start + i * step, 12) for i in range(n + 1))
        else:
            out.append(_number(key, item))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lgpovm", description="Leggett-Garg violation under a measurability POVM.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--j", help='spin, e.g. "5/2" or "1"')
    p.add_argument("--partition", help='"edge5_2" or "uniform:<block_size>"')
    p.add_argument("--b", help="measurability b in [0,1] (list)")
    p.add_argument("--sigma", help="measurability sigma > 0 (list); exclusive with --b")
    p.add_argument("--theta-over-pi", dest="theta-over-pi", help="gap angle theta/pi (list)")
    p.add_argument("--gaps", help="three time gaps dt12,dt23,dt34 (klg only)")
    p.add_argument("--Omega", help="J^2 coefficient (default 0)")
    p.add_argument("--omega", help="J_x coefficient (default 1)")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.add_argument("--precision", help="significant digits in output (default 12)")
    p.add_argument("--jobs", help="worker threads for sweeps (default 1)")
    return p


def parse_config(argv=None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    cli_values = {k: v for k, v in args.items() if k in KEYS and v is not None}
    file_values = read_config_file(args["config"]) if args["config"] else {}
    if "b" in cli_values or "sigma" in cli_values:
        file_values.pop("b", None)
        file_values.pop("sigma", None)
    raw = {**file_values, **cli_values}

    command = args["command"]
    if command is None:
        raise ConfigError(EXIT_MISSING, "command", f"one of {', '.join(COMMANDS)} is required")
    if "b" in raw and "sigma" in raw:
        raise ConfigError(EXIT_USAGE, "sigma", "b and sigma are mutually exclusive")

    cfg = RunConfig(command=command, raw=raw)
    if "j" in raw:
        try:
            cfg.j = HalfInt.parse(raw["j"])
        except InvalidInputError as exc:
            raise ConfigError(EXIT_BAD_HALFINT, "j", str(exc)) from None
        if cfg.j.twice < 0:
            raise ConfigError(EXIT_DOMAIN, "j", "spin must be non-negative")
    cfg.partition = raw.get("partition")
    if "b" in raw:
        cfg.b = parse_list("b", raw["b"])
        bad = [v for v in cfg.b if not 0.0 <= v <= 1.0]
        if bad:
            raise ConfigError(EXIT_DOMAIN, "b", f"{bad[0]} outside [0, 1]")
    if "sigma" in raw:
        cfg.sigma = parse_list("sigma", raw["sigma"])
        bad = [v for v in cfg.sigma if v <= 0]
        if bad:
            raise ConfigError(EXIT_DOMAIN, "sigma", f"{bad[0]} is not positive")
    if "theta-over-pi" in raw:
        cfg.theta_over_pi = parse_list("theta-over-pi", raw["theta-over-pi"])
    if "gaps" in raw:
        gaps = parse_list("gaps", raw["gaps"])
        if len(gaps) != 3:
            raise ConfigError(EXIT_MALFORMED, "gaps", f"need exactly three values, got {len(gaps)}")
        cfg.gaps = tuple(gaps)
    for key in ("Omega", "omega"):
        if key in raw:
            setattr(cfg, key, _number(key, raw[key]))
    if "output" in raw:
        cfg.output = Path(raw["output"])
    for key, lo, hi in (("precision", 1, 17), ("jobs", 1, 256)):
        if key in raw:
            try:
                value = int(raw[key])
            except ValueError:
                raise ConfigError(EXIT_MALFORMED, key, f"not an integer: {raw[key]!r}") from None
            if not lo <= value <= hi:
                raise ConfigError(EXIT_DOMAIN, key, f"must be in [{lo}, {hi}]")
            setattr(cfg, key, value)

    _check_required(cfg)
    return cfg


def _check_required(cfg: RunConfig):
    def need(*keys):
        for key in keys:
            if getattr(cfg, key.replace("-", "_")) is None:
                raise ConfigError(EXIT_MISSING, key, f"required for {cfg.command}")

    if cfg.command in ("klg", "sweep-kb", "threshold"):
        need("j", "partition")
        try:
            make_partition(cfg.j, cfg.partition)
        except InvalidInputError as exc:
            raise ConfigError(EXIT_DOMAIN, "partition", str(exc)) from None
    if cfg.command == "klg":
        if cfg.b is None and cfg.sigma is None:
            raise ConfigError(EXIT_MISSING, "b", "b or sigma is required for klg")
        if cfg.gaps is None:
            need("theta-over-pi")
            if cfg.omega == 0:
                raise ConfigError(EXIT_DOMAIN, "omega", "theta-over-pi needs a nonzero omega; use --gaps")
    if cfg.command == "threshold":
        need("theta-over-pi")
    if cfg.command == "sweep-fsigma":
        need("sigma")


def fmt(x: float, precision: int) -> str:
    text = f"{x:.{precision}g}"
    return "0" if text in ("-0", "0") else text


def _bool(v: bool) -> str:
    return "true" if v else "false"


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, text: str, stdout):
    if cfg.output is None:
        stdout.write(text)
    else:
        cfg.output.parent.mkdir(parents=True, exist_ok=True)
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _run_klg(cfg: RunConfig, stdout) -> int:
    p = cfg.precision
    part = make_partition(cfg.j, cfg.partition)
    dyn = DynamicsParams(part.sys.j, cfg.omega, cfg.Omega)
    rho = maximally_mixed(part.sys)
    if cfg.gaps is not None:
        gap_sets = [cfg.gaps]
    else:
        gap_sets = [(math.pi * t / cfg.omega,) * 3 for t in cfg.theta_over_pi]
    lines = []
    for b in cfg.b_values:
        param = MeasurabilityParam(b)
        povm = build_povm(build_A(part, param), part, param)
        for gaps in gap_sets:
            r = k_lg(povm, rho, dyn, gaps)
            fields = [
                ("theta_over_pi", fmt(r.theta / math.pi, p)),
                ("b", fmt(b, p)),
                ("C12", fmt(r.C12, p)),
                ("C23", fmt(r.C23, p)),
                ("C34", fmt(r.C34, p)),
                ("C14", fmt(r.C14, p)),
                ("K", fmt(r.K, p)),
                ("violated", _bool(r.violated)),
            ]
            lines.append(" ".join(f"{k}={v}" for k, v in fields) + "\n")
    text = "".join(lines)
    stdout.write(text)
    if cfg.output is not None:
        _emit(cfg, text, stdout)
    return EXIT_OK


def _run_sweep_kb(cfg: RunConfig, stdout) -> int:
    p = cfg.precision
    spec = SweepSpec(
        cfg.j,
        cfg.partition,
        tuple(cfg.theta_over_pi or FIG4_THETA_OVER_PI),
        tuple(cfg.b_values or FIG4_B_GRID),
    )
    rows = sweep_k_vs_b(spec, jobs=cfg.jobs)
    body = [
        (fmt(r.theta_over_pi, p), fmt(r.b, p), fmt(r.C_theta, p), fmt(r.C_3theta, p), fmt(r.K, p), _bool(r.violated))
        for r in rows
    ]
    _emit(cfg, csv_text(("theta_over_pi", "b", "C_theta", "C_3theta", "K", "violated"), body), stdout)
    return EXIT_OK


def _run_sweep_fsigma(cfg: RunConfig, stdout) -> int:
    p = cfg.precision
    rows = sweep_f_vs_sigma(cfg.sigma)
    body = [(fmt(r.sigma, p), fmt(r.a, p), fmt(r.b, p), fmt(r.c, p)) for r in rows]
    _emit(cfg, csv_text(("sigma", "a", "b", "c"), body), stdout)
    return EXIT_OK


def _run_threshold(cfg: RunConfig, stdout) -> int:
    lines = []
    for t in cfg.theta_over_pi:
        res = violation_threshold(cfg.j, cfg.partition, t)
        if res.b_star is not None:
            value = fmt(res.b_star, cfg.precision)
        elif not res.roots:
            value = "none"
        else:
            value = "multiple:" + ";".join(fmt(r, cfg.precision) for r in res.roots)
        lines.append(value if len(cfg.theta_over_pi) == 1 else f"{fmt(t, cfg.precision)} {value}")
    stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _run_check(cfg: RunConfig, stdout) -> int:
    failed = 0
    for name, ok, detail in run_checks():
        failed += not ok
        stdout.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


RUNNERS = {
    "klg": _run_klg,
    "sweep-kb": _run_sweep_kb,
    "sweep-fsigma": _run_sweep_fsigma,
    "threshold": _run_threshold,
    "check": _run_check,
}


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        return RUNNERS[cfg.command](cfg, stdout)
    except OutcomeImpossibleError as exc:
        print(f"lgpovm: ill-posed correlation: {exc}", file=sys.stderr)
        return EXIT_ILL_POSED
    except InvalidInputError as exc:
        print(f"lgpovm: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main(argv=None, stdout=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"lgpovm: {exc}", file=sys.stderr)
        return exc.code
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    return run(cfg, stdout)


def entry():
    sys.exit(main())
