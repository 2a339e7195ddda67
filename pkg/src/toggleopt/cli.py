"""Command-line front end: sim, opt, power, check and the chained ``all``.

Exit codes: 1 unreadable/unparsable input, 2 simulation error, 3 profile and
netlist disagree, 4 zero baseline power, 5 equivalence mismatch, 64 usage.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .activity import ProfileError, Stimulus, StimulusError, generate_stimulus, \
    read_profile, simulate, write_profile
from .equiv import MISMATCH, check_equivalence
from .netlist import Netlist, NetlistError, emit_blif, parse_blif
from .optpass import ALL_TRANSFORMS, OptConfig, OptError, run_pass
from .presets import PRESETS
from .power import PowerConfig, PowerError, ZeroBaselineError, estimate_dynamic_power, \
    format_reports

EXIT_PARSE = 1
EXIT_SIM = 2
EXIT_MISMATCH = 3
EXIT_ZERO_BASELINE = 4
EXIT_NOT_EQUIVALENT = 5
EXIT_USAGE = 64


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    blif: Optional[Path] = None
    optimized: Optional[Path] = None
    profile: Optional[Path] = None
    out: Optional[Path] = None
    report: Optional[Path] = None
    cycles: int = 4096
    seed: int = 1
    verify_cycles: int = 10000
    hold: dict = field(default_factory=dict)
    free: frozenset = frozenset()
    opt: OptConfig = OptConfig()
    power: PowerConfig = PowerConfig()
    verbose: bool = False
    strict: bool = False
    verify: bool = True

    def validate(self) -> None:
        if self.cycles < 2:
            raise CliError("--cycles must be >= 2", EXIT_USAGE)
        paths = [p.resolve() for p in (self.blif, self.optimized, self.profile, self.out,
                                       self.report) if p is not None]
        if len(set(paths)) != len(paths):
            raise CliError("input and output paths must all be distinct", EXIT_USAGE)


# -- manifest assembly ----------------------------------------------------

def read_config(path: Path) -> dict[str, str]:
    """key=value lines; '#' starts a comment."""
    try:
        text = path.read_text()
    except OSError as e:
        raise CliError(f"cannot read config {path}: {e}", EXIT_PARSE) from None
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value", EXIT_PARSE)
        k, v = line.split("=", 1)
        cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def _parse_transforms(text: str) -> frozenset:
    text = text.strip()
    if text == "none":
        return frozenset()
    if text == "all":
        return ALL_TRANSFORMS
    names = {t.strip() for t in text.split(",") if t.strip()}
    aliases = {"shannon": "shannon_split", "duplicate": "driver_duplicate", "dup":
               "driver_duplicate"}
    return frozenset(aliases.get(n, n) for n in names)


def _parse_threshold(text: str) -> tuple[str, Optional[float]]:
    if text == "median":
        return "median", None
    mode, _, value = text.partition(":")
    if mode not in ("percentile", "absolute") or not value:
        raise CliError(f"bad threshold {text!r}; use median, percentile:Q or absolute:N",
                       EXIT_USAGE)
    return mode, float(value)


def _parse_bits(items: Sequence[str]) -> dict[str, int]:
    out = {}
    for item in items:
        name, _, bit = item.partition("=")
        if bit not in ("0", "1"):
            raise CliError(f"bad --hold {item!r}; use NAME=0 or NAME=1", EXIT_USAGE)
        out[name] = int(bit)
    return out


def build_manifest(args: argparse.Namespace) -> RunManifest:
    cfg = read_config(Path(args.config)) if getattr(args, "config", None) else {}

    def pick(key, conv=str):
        v = getattr(args, key, None)
        if v is not None:
            return v
        if key in cfg:
            try:
                return conv(cfg[key])
            except ValueError:
                raise CliError(f"bad config value {key}={cfg[key]!r}", EXIT_USAGE) from None
        return None

    m = RunManifest()
    for key in ("blif", "optimized", "profile", "out", "report"):
        v = pick(key, Path)
        if v is not None:
            setattr(m, key, Path(v))
    for key in ("cycles", "seed", "verify_cycles"):
        v = pick(key, int)
        if v is not None:
            setattr(m, key, int(v))
    hold = list(cfg.get("hold", "").split(",")) if cfg.get("hold") else []
    hold += getattr(args, "hold", None) or []
    m.hold = _parse_bits(hold)
    free = list(cfg.get("free", "").split(",")) if cfg.get("free") else []
    free += getattr(args, "free", None) or []
    m.free = frozenset(f for f in free if f)

    preset = pick("preset") or "default"
    if preset not in PRESETS:
        raise CliError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}", EXIT_USAGE)
    base_opt, base_power = PRESETS[preset]
    opt_kw = {}
    t = pick("transforms")
    if t is not None:
        opt_kw["transforms"] = _parse_transforms(t)
    th = pick("threshold")
    if th is not None:
        opt_kw["threshold_mode"], opt_kw["threshold_value"] = _parse_threshold(th)
    g = pick("max_area_growth", float)
    if g is not None:
        opt_kw["max_area_growth_pct"] = float(g)
    mf = pick("min_fanout", int)
    if mf is not None:
        opt_kw["min_fanout_for_duplication"] = int(mf)
    try:
        m.opt = replace(base_opt, **opt_kw)
    except OptError as e:
        raise CliError(str(e), EXIT_USAGE) from None

    pw_kw = {}
    for key, fname in (("vdd", "supply_voltage"), ("freq", "clock_freq"),
                       ("c_base", "c_base"), ("c_fanout", "c_per_fanout"),
                       ("c_dup", "c_dup_overhead"), ("fanout_exponent", "fanout_exponent")):
        v = pick(key, float)
        if v is not None:
            pw_kw[fname] = float(v)
    try:
        m.power = replace(base_power, **pw_kw)
    except PowerError as e:
        raise CliError(str(e), EXIT_USAGE) from None

    m.verbose = bool(getattr(args, "verbose", False) or cfg.get("verbose") == "1")
    m.strict = bool(getattr(args, "strict", False) or cfg.get("strict") == "1")
    m.verify = not (getattr(args, "no_verify", False) or cfg.get("no_verify") == "1")
    m.validate()
    return m


# -- helpers --------------------------------------------------------------

def load_netlist(path: Optional[Path]) -> Netlist:
    if path is None:
        raise CliError("--blif is required", EXIT_USAGE)
    try:
        return parse_blif(path.read_text())
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_PARSE) from None
    except NetlistError as e:
        raise CliError(f"{path}: {e}", EXIT_PARSE) from None


def make_stimulus(nl: Netlist, m: RunManifest, cycles: Optional[int] = None) -> Stimulus:
    try:
        return generate_stimulus(nl, cycles or m.cycles, m.seed, m.hold, m.free)
    except StimulusError as e:
        raise CliError(f"stimulus: {e}", EXIT_SIM) from None


def _write(path: Optional[Path], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


# -- commands -------------------------------------------------------------

def cmd_sim(m: RunManifest) -> int:
    nl = load_netlist(m.blif)
    stim = make_stimulus(nl, m)
    try:
        profile = simulate(nl, stim)
    except (StimulusError, ValueError) as e:
        raise CliError(f"simulation failed: {e}", EXIT_SIM) from None
    _write(m.out, write_profile(profile))
    return 0


def _load_profile(m: RunManifest):
    if m.profile is None:
        raise CliError("--profile is required", EXIT_USAGE)
    try:
        return read_profile(m.profile.read_text())
    except OSError as e:
        raise CliError(f"cannot read {m.profile}: {e.strerror}", EXIT_PARSE) from None
    except ProfileError as e:
        raise CliError(f"{m.profile}: {e}", EXIT_PARSE) from None


def optimize(nl: Netlist, profile, m: RunManifest):
    """run_pass plus the optional post-check; returns (netlist, report, check result)."""
    if set(profile.counters) != set(nl.net_names):
        raise CliError("profile does not match the netlist's nets", EXIT_MISMATCH)
    expected = make_stimulus(nl, m, profile.num_cycles).digest
    if expected != profile.stimulus_digest:
        msg = (f"profile digest {profile.stimulus_digest:016x} does not match "
               f"stimulus (cycles={profile.num_cycles}, seed={m.seed}) {expected:016x}")
        if m.strict:
            raise CliError(msg, EXIT_MISMATCH)
        _warn(msg)
    try:
        out, report = run_pass(nl, profile, m.opt)
    except OptError as e:
        raise CliError(str(e), EXIT_MISMATCH) from None
    result = None
    if m.verify:
        result = check_equivalence(nl, out, make_stimulus(nl, m, m.verify_cycles))
        if result.verdict == MISMATCH:
            raise CliError(f"internal post-check failed: {result.format()}",
                           EXIT_NOT_EQUIVALENT)
    return out, report, result


def cmd_opt(m: RunManifest) -> int:
    if m.out is None:
        raise CliError("--out is required", EXIT_USAGE)
    nl = load_netlist(m.blif)
    profile = _load_profile(m)
    out, report, _ = optimize(nl, profile, m)
    m.out.write_text(emit_blif(out))
    _write(m.report, report.format())
    return 0


def power_reports(base: Netlist, opt: Netlist, m: RunManifest):
    """Re-simulate both netlists under one shared stimulus and compare."""
    stim = make_stimulus(base, m)
    try:
        p0 = estimate_dynamic_power(base, simulate(base, stim), m.power)
        p1 = estimate_dynamic_power(opt, simulate(opt, stim), m.power, baseline=p0)
    except ZeroBaselineError as e:
        raise CliError(str(e), EXIT_ZERO_BASELINE) from None
    except StimulusError as e:
        raise CliError(f"simulation failed: {e}", EXIT_SIM) from None
    p1 = replace(p1, name=f"{opt.name}+opt")
    return p0, p1


def cmd_power(m: RunManifest) -> int:
    base = load_netlist(m.blif)
    opt = load_netlist(m.optimized) if m.optimized else base
    p0, p1 = power_reports(base, opt, m)
    _write(m.out, format_reports([p0, p1], m.verbose))
    return 0


def cmd_check(m: RunManifest) -> int:
    if m.optimized is None:
        raise CliError("--optimized is required", EXIT_USAGE)
    a = load_netlist(m.blif)
    b = load_netlist(m.optimized)
    try:
        result = check_equivalence(a, b, make_stimulus(a, m, m.verify_cycles))
    except ValueError as e:
        raise CliError(str(e), EXIT_MISMATCH) from None
    _write(m.out, result.format() + "\n")
    return EXIT_NOT_EQUIVALENT if result.verdict == MISMATCH else 0


def run_pipeline(m: RunManifest) -> str:
    """sim -> opt -> power -> check for one netlist; returns its summary row."""
    nl = load_netlist(m.blif)
    out_dir = m.out
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = m.blif.stem
    stim = make_stimulus(nl, m)
    profile = simulate(nl, stim)
    (out_dir / f"{stem}.prof").write_text(write_profile(profile))
    opt, report, _ = optimize(nl, profile, replace(m, verify=False))
    (out_dir / f"{stem}.opt.blif").write_text(emit_blif(opt))
    (out_dir / f"{stem}.pass.txt").write_text(report.format())
    p0, p1 = power_reports(nl, opt, m)
    (out_dir / f"{stem}.power.txt").write_text(format_reports([p0, p1], m.verbose))
    result = check_equivalence(nl, opt, make_stimulus(nl, m, m.verify_cycles))
    (out_dir / f"{stem}.check.txt").write_text(result.format() + "\n")
    if result.verdict == MISMATCH:
        raise CliError(f"{stem}: {result.format()}", EXIT_NOT_EQUIVALENT)
    lines = format_reports([p0, p1]).splitlines()[1:]
    return "\n".join(lines) + f"\n# {stem}: {result.format()}\n"


def _pipeline_job(m: RunManifest):
    try:
        return 0, run_pipeline(m)
    except CliError as e:
        return e.code, str(e)


def cmd_all(m: RunManifest, blifs: Sequence[Path], jobs: int) -> int:
    if m.out is None:
        raise CliError("--out directory is required", EXIT_USAGE)
    manifests = [replace(m, blif=p) for p in blifs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_pipeline_job, manifests))
    else:
        results = [_pipeline_job(x) for x in manifests]
    code = 0
    rows = ["name, power_W, area_luts, dP_pct, dA_pct"]
    for rc, text in results:
        if rc:
            print(f"error: {text}", file=sys.stderr)
            code = code or rc
        else:
            rows.append(text.rstrip("\n"))
    summary = "\n".join(rows) + "\n"
    m.out.mkdir(parents=True, exist_ok=True)
    (m.out / "summary.txt").write_text(summary)
    sys.stdout.write(summary)
    return code


# -- argument parsing -----------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="manifest file of key=value lines")
    p.add_argument("--cycles", type=int, help="simulated cycles (default 4096)")
    p.add_argument("--seed", type=int, help="stimulus seed (default 1)")
    p.add_argument("--hold", action="append", metavar="NAME=BIT",
                   help="hold an input constant (repeatable)")
    p.add_argument("--free", action="append", metavar="NAME",
                   help="drive a reset/clock-named input randomly (repeatable)")
    p.add_argument("--verbose", action="store_true", default=None)
    p.add_argument("--preset", help=f"configuration preset: {', '.join(PRESETS)}")


def _opt_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--transforms", help="all, none, or comma list of "
                   "shannon_split,driver_duplicate")
    p.add_argument("--threshold", help="median (default), percentile:Q or absolute:N")
    p.add_argument("--max-area-growth", type=float, dest="max_area_growth",
                   help="area budget in percent")
    p.add_argument("--min-fanout", type=int, dest="min_fanout",
                   help="minimum fanout for driver duplication (default 2)")
    p.add_argument("--strict", action="store_true", default=None,
                   help="fail on profile digest mismatch")
    p.add_argument("--no-verify", action="store_true", default=None, dest="no_verify")
    p.add_argument("--verify-cycles", type=int, dest="verify_cycles",
                   help="lockstep cycles for sequential checks (default 10000)")


def _power_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vdd", type=float, help="supply voltage in volts")
    p.add_argument("--freq", type=float, help="clock frequency in hertz")
    p.add_argument("--c-base", type=float, dest="c_base", help="farads per net")
    p.add_argument("--c-fanout", type=float, dest="c_fanout", help="farads per sink")
    p.add_argument("--c-dup", type=float, dest="c_dup", help="farads per duplicated driver")
    p.add_argument("--fanout-exponent", type=float, dest="fanout_exponent",
                   help="exponent on fanout in the capacitance proxy (default 1)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="toggleopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sim", help="simulate and write an activity profile")
    p.add_argument("--blif")
    p.add_argument("-o", "--out")
    _common(p)

    p = sub.add_parser("opt", help="rewrite high-activity nets")
    p.add_argument("--blif")
    p.add_argument("--profile")
    p.add_argument("-o", "--out")
    p.add_argument("--report", help="pass report path (default stdout)")
    _common(p)
    _opt_flags(p)

    p = sub.add_parser("power", help="modeled power of baseline vs optimized")
    p.add_argument("--blif")
    p.add_argument("--optimized")
    p.add_argument("-o", "--out")
    _common(p)
    _power_flags(p)

    p = sub.add_parser("check", help="equivalence of baseline and optimized")
    p.add_argument("--blif")
    p.add_argument("--optimized")
    p.add_argument("-o", "--out")
    p.add_argument("--verify-cycles", type=int, dest="verify_cycles")
    _common(p)

    p = sub.add_parser("all", help="run sim, opt, power and check per netlist")
    p.add_argument("blifs", nargs="*", help="netlists (or --blif)")
    p.add_argument("--blif", action="append", dest="blif_list")
    p.add_argument("-o", "--out", help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    _common(p)
    _opt_flags(p)
    _power_flags(p)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "all":
            blifs = [Path(x) for x in (args.blifs or []) + (args.blif_list or [])]
            if not blifs:
                raise CliError("no netlists given", EXIT_USAGE)
            args.blif = None
            return cmd_all(build_manifest(args), blifs, args.jobs)
        m = build_manifest(args)
        return {"sim": cmd_sim, "opt": cmd_opt, "power": cmd_power,
                "check": cmd_check}[args.command](m)
    except CliError as e:
        print(f"toggleopt: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
