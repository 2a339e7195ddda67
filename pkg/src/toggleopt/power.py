"""Switching-power estimate P = alpha * C * V^2 * f with a fanout capacitance proxy."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .activity import ActivityProfile
from .netlist import Netlist, NetRef, area_luts, fanout

# Nets created by driver duplication carry this tag followed by an optional index.
DUP_TAG = "$dup"
_DUP_NAME = re.compile(re.escape(DUP_TAG) + r"\d*$")


class PowerError(ValueError):
    pass


class ZeroBaselineError(PowerError):
    pass


def is_duplicate_net(name: str) -> bool:
    return _DUP_NAME.search(name) is not None


@dataclass(frozen=True)
class PowerConfig:
    """Operating point and capacitance proxy.

    Net capacitance is ``c_base + c_per_fanout * fanout ** fanout_exponent``,
    plus ``c_dup_overhead`` on nets driven by a duplicated driver. The default
    exponent of 1 gives the plain fanout-linear proxy; exponents above 1
    stand in for high-fanout nets spanning disproportionately long wires.
    """

    supply_voltage: float = 1.0
    clock_freq: float = 1e8
    c_base: float = 5e-15
    c_per_fanout: float = 2e-15
    c_dup_overhead: float = 1e-15
    fanout_exponent: float = 1.0

    def __post_init__(self):
        for fname in ("supply_voltage", "clock_freq", "c_base", "c_per_fanout",
                      "c_dup_overhead", "fanout_exponent"):
            if not getattr(self, fname) > 0:
                raise PowerError(f"{fname} must be strictly positive")


# Superlinear wire proxy under which duplicating high-fanout drivers can pay off.
WIRE_SUPERLINEAR = PowerConfig(fanout_exponent=2.0)


def net_capacitance(nl: Netlist, net: NetRef, cfg: PowerConfig = PowerConfig()) -> float:
    fo = fanout(nl, net)
    if cfg.fanout_exponent == 1.0:
        c = cfg.c_base + cfg.c_per_fanout * fo
    else:
        c = cfg.c_base + cfg.c_per_fanout * fo ** cfg.fanout_exponent
    if is_duplicate_net(nl.net_name(net)):
        c += cfg.c_dup_overhead
    return c


@dataclass(frozen=True)
class NetPower:
    name: str
    alpha: float
    capacitance: float
    power: float


@dataclass(frozen=True)
class DeltaSummary:
    """Percent deltas: positive dp_pct is power saved, positive da_pct is area grown."""

    power_before: float
    power_after: float
    area_before: int
    area_after: int
    dp_pct: float
    da_pct: float


@dataclass(frozen=True)
class PowerReport:
    """Modeled dynamic power of one netlist.

    ``entries`` is None for reports built from externally measured totals.
    """

    name: str
    total_power: float
    area_luts: int
    entries: Optional[tuple[NetPower, ...]] = None
    delta: Optional[DeltaSummary] = None

    def __post_init__(self):
        if self.entries is not None:
            s = math.fsum(e.power for e in self.entries)
            if not math.isclose(s, self.total_power, rel_tol=4 * 2**-52, abs_tol=0.0):
                raise PowerError(f"total {self.total_power!r} != sum of entries {s!r}")

    @classmethod
    def measured(cls, name: str, power: float, area: int) -> PowerReport:
        return cls(name, power, area)


def estimate_dynamic_power(nl: Netlist, profile: ActivityProfile,
                           cfg: PowerConfig = PowerConfig(),
                           baseline: Optional[PowerReport] = None) -> PowerReport:
    names = set(nl.net_names)
    covered = set(profile.counters)
    if names != covered:
        raise PowerError(
            f"profile/netlist net mismatch: {len(names - covered)} nets unprofiled, "
            f"{len(covered - names)} profiled nets absent")
    v2f = cfg.supply_voltage * cfg.supply_voltage * cfg.clock_freq
    entries = []
    for nid in sorted(range(len(nl.net_names)), key=lambda i: nl.net_names[i]):
        name = nl.net_names[nid]
        alpha = profile.counters[name] / profile.num_cycles
        c = net_capacitance(nl, nid, cfg)
        entries.append(NetPower(name, alpha, c, alpha * c * v2f))
    total = math.fsum(e.power for e in entries)
    area = area_luts(nl)
    delta = None
    if baseline is not None:
        delta = percent_deltas(baseline.total_power, total, baseline.area_luts, area)
    return PowerReport(nl.name, total, area, tuple(entries), delta)


def percent_deltas(power_before: float, power_after: float,
                   area_before: int, area_after: int) -> DeltaSummary:
    if power_before <= 0:
        raise ZeroBaselineError("baseline power must be positive")
    if area_before <= 0:
        raise ZeroBaselineError("baseline area must be positive")
    return DeltaSummary(
        power_before, power_after, area_before, area_after,
        100.0 * (power_before - power_after) / power_before,
        100.0 * (area_after - area_before) / area_before)


def compare_reports(baseline: PowerReport, optimized: PowerReport) -> DeltaSummary:
    return percent_deltas(baseline.total_power, optimized.total_power,
                          baseline.area_luts, optimized.area_luts)


REPORT_HEADER = "name, power_W, area_luts, dP_pct, dA_pct"


def format_row(report: PowerReport) -> str:
    dp = da = "-"
    if report.delta is not None:
        dp = f"{report.delta.dp_pct:.1f}"
        da = f"{report.delta.da_pct:.1f}"
    return f"{report.name}, {report.total_power:.6e}, {report.area_luts}, {dp}, {da}"


def format_reports(reports: Sequence[PowerReport], verbose: bool = False) -> str:
    lines = [REPORT_HEADER] + [format_row(r) for r in reports]
    if verbose:
        for r in reports:
            if r.entries is None:
                continue
            lines.append(f"# nets of {r.name}: net, alpha, C_F, power_W")
            lines += [f"{e.name}, {e.alpha:.6f}, {e.capacitance:.6e}, {e.power:.6e}"
                      for e in r.entries]
    return "\n".join(lines) + "\n"
