"""Activity-driven rewriting of LUT netlists.

Nets whose toggle counter exceeds a design-wide threshold get their driving
LUT Shannon-split into two cofactor LUTs plus a recombination mux, and/or get
their driver cloned so each copy serves half the loads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .activity import ActivityProfile
from .netlist import Cell, Latch, Netlist, NetlistBuilder, NetRef, area_luts, fanout
from .power import DUP_TAG
from .truthtable import Cut, DecomposeTrace, TruthTable, find_split_var, permute, \
    truth_table_decompose

SHANNON = "shannon_split"
DUPLICATE = "driver_duplicate"
ALL_TRANSFORMS = frozenset({SHANNON, DUPLICATE})

# Recombination mux over inputs (f0, f1, s): s ? f1 : f0.
MUX_TABLE = TruthTable.from_int(3, 0xCA)


class OptError(ValueError):
    pass


class RewriteError(OptError):
    pass


@dataclass(frozen=True)
class OptConfig:
    """Threshold and transform selection.

    ``threshold_mode`` is ``"median"``, ``"percentile"`` (``threshold_value``
    = q in (0, 100)) or ``"absolute"`` (``threshold_value`` = toggle count).
    ``max_area_growth_pct`` of None means unlimited.
    """

    threshold_mode: str = "median"
    threshold_value: Optional[float] = None
    transforms: frozenset = ALL_TRANSFORMS
    max_area_growth_pct: Optional[float] = None
    min_fanout_for_duplication: int = 2

    def __post_init__(self):
        object.__setattr__(self, "transforms", frozenset(self.transforms))
        unknown = self.transforms - ALL_TRANSFORMS
        if unknown:
            raise OptError(f"unknown transforms {sorted(unknown)}")
        if self.threshold_mode == "percentile":
            if self.threshold_value is None or not 0 < self.threshold_value < 100:
                raise OptError("percentile q must be in (0, 100)")
        elif self.threshold_mode == "absolute":
            if self.threshold_value is None or self.threshold_value < 0:
                raise OptError("absolute threshold must be a nonnegative count")
        elif self.threshold_mode != "median":
            raise OptError(f"unknown threshold mode {self.threshold_mode!r}")
        if self.max_area_growth_pct is not None and self.max_area_growth_pct < 0:
            raise OptError("max_area_growth_pct must be nonnegative")
        if self.min_fanout_for_duplication < 2:
            raise OptError("min_fanout_for_duplication must be >= 2")


def _lut_counters(profile: ActivityProfile, nl: Netlist) -> list[int]:
    nets = nl.lut_output_nets()
    if not nets:
        raise OptError("netlist has no LUT output nets")
    try:
        return sorted(profile.counters[nl.net_name(n)] for n in nets)
    except KeyError as e:
        raise OptError(f"profile lacks LUT output net {e.args[0]!r}") from None


def median_threshold(profile: ActivityProfile, nl: Netlist) -> int:
    """Lower median of the counters of LUT output nets."""
    values = _lut_counters(profile, nl)
    return values[(len(values) - 1) // 2]


def percentile_threshold(profile: ActivityProfile, nl: Netlist, q: float) -> int:
    values = _lut_counters(profile, nl)
    return values[int(q / 100.0 * (len(values) - 1))]


def compute_threshold(profile: ActivityProfile, nl: Netlist, cfg: OptConfig) -> int:
    if cfg.threshold_mode == "median":
        return median_threshold(profile, nl)
    if cfg.threshold_mode == "percentile":
        return percentile_threshold(profile, nl, cfg.threshold_value)
    return int(cfg.threshold_value)


def select_targets(profile: ActivityProfile, nl: Netlist,
                   cfg: OptConfig = OptConfig()) -> list[int]:
    """LUT output nets strictly above threshold, hottest first, ties by name."""
    threshold = compute_threshold(profile, nl, cfg)
    hot = [n for n in nl.lut_output_nets()
           if profile.counters[nl.net_name(n)] > threshold]
    return sorted(hot, key=lambda n: (-profile.counters[nl.net_name(n)], nl.net_name(n)))


# -- Shannon rewrite ------------------------------------------------------

@dataclass(frozen=True)
class ShannonPlan:
    cell_index: int
    cut: Cut
    trace: DecomposeTrace

    @property
    def split_pin(self) -> int:
        return self.trace.steps[0].var


def plan_shannon(nl: Netlist, net: NetRef,
                 activity: Optional[Mapping[str, int]] = None) -> ShannonPlan:
    """Choose the split input of ``net``'s driver and decompose its table.

    The driver's input pins form the right cut, hottest first; pins whose
    nets also feed a load of ``net`` form the left cut, so the split lands on
    the hottest input that does not reconverge downstream.
    """
    nid = nl.net_id(net)
    d = nl.nets[nid].driver
    if d.kind != "cell":
        raise RewriteError(f"net {nl.net_name(nid)} is not driven by a LUT")
    cell = nl.cells[d.index]
    n = len(cell.input_nets)
    if n < 2:
        raise RewriteError(f"driver of {nl.net_name(nid)} has {n} inputs, nothing to split")
    activity = activity or {}

    def heat(pin: int) -> int:
        return activity.get(nl.net_name(cell.input_nets[pin]), 0)

    right = tuple(sorted(range(n), key=lambda p: (-heat(p), p)))
    load_inputs = set()
    for s in nl.nets[nid].loads:
        if s.kind == "cell":
            load_inputs.update(nl.cells[s.index].input_nets)
    left = tuple(p for p in range(n) if cell.input_nets[p] in load_inputs)
    cut = Cut(left, right)
    if find_split_var(cut, "right") is None:
        raise RewriteError(f"no split variable for {nl.net_name(nid)}: "
                           f"every input reconverges into its loads")
    # forced guard: callers have already thresholded the net
    _, trace = truth_table_decompose(permute(cell.function, right), cut, 1, 0)
    return ShannonPlan(d.index, cut, trace)


def shannon_rewrite(nl: Netlist, net: NetRef,
                    activity: Optional[Mapping[str, int]] = None) -> Netlist:
    """Replace ``net``'s driver by two cofactor LUTs and an s ? f1 : f0 mux."""
    plan = plan_shannon(nl, net, activity)
    cell = nl.cells[plan.cell_index]
    step = plan.trace.steps[0]
    rest_pins = plan.trace.binding_out[:-1]
    rest = [nl.net_name(cell.input_nets[p]) for p in rest_pins]
    sel = nl.net_name(cell.input_nets[step.var])
    out = nl.net_name(cell.output_net)

    b = NetlistBuilder.from_netlist(nl)
    n1 = b.fresh_name(f"{out}$s1")
    b.net(n1)
    n0 = b.fresh_name(f"{out}$s0")
    b.net(n0)
    f1 = Cell(n1, tuple(b.net(x) for x in rest), b.net(n1), step.t1)
    f0 = Cell(n0, tuple(b.net(x) for x in rest), b.net(n0), step.t0)
    mux = Cell(cell.id, (b.net(n0), b.net(n1), b.net(sel)), cell.output_net, MUX_TABLE)
    b.cells[plan.cell_index:plan.cell_index + 1] = [f1, f0, mux]
    return b.build()


# -- driver duplication ---------------------------------------------------

def duplicate_driver(nl: Netlist, net: NetRef, min_fanout: int = 2) -> Netlist:
    """Clone ``net``'s driving LUT and move the second half of its loads to the clone.

    Loads are ordered by sink id; the original keeps the first half (the
    larger one for odd counts) and every primary-output load.
    """
    nid = nl.net_id(net)
    name = nl.net_name(nid)
    info = nl.nets[nid]
    if info.driver.kind == "latch":
        raise RewriteError(f"net {name} is latch-driven")
    if info.driver.kind != "cell" or not nl.cells[info.driver.index].input_nets:
        raise RewriteError(f"net {name} is not driven by a LUT")
    fo = fanout(nl, nid)
    if fo < min_fanout:
        raise RewriteError(f"net {name} has fanout {fo} < {min_fanout}")

    sinks = {}
    for s in info.loads:
        if s.kind == "cell":
            sinks[nl.cells[s.index].id] = s
        elif s.kind == "latch":
            sinks[nl.latches[s.index].id] = s
    order = sorted(sinks)
    if len(order) < 2:
        raise RewriteError(f"net {name} has fewer than two non-output loads")
    moved = {(sinks[k].kind, sinks[k].index) for k in order[(len(order) + 1) // 2:]}

    cell = nl.cells[info.driver.index]
    b = NetlistBuilder.from_netlist(nl)
    new_name = b.fresh_name(name + DUP_TAG)
    new = b.net(new_name)
    for ci, c in enumerate(b.cells):
        if ("cell", ci) in moved:
            b.cells[ci] = Cell(c.id, tuple(new if x == nid else x for x in c.input_nets),
                               c.output_net, c.function)
    for li, l in enumerate(b.latches):
        if ("latch", li) in moved:
            b.latches[li] = Latch(l.id, new, l.data_out, l.init, l.kind, l.control)
    clone = Cell(new_name, cell.input_nets, new, cell.function)
    b.cells.insert(info.driver.index + 1, clone)
    return b.build()


# -- the pass -------------------------------------------------------------

@dataclass(frozen=True)
class TargetRecord:
    net: str
    counter: int
    transform: str
    delta_luts: int


@dataclass(frozen=True)
class SkipRecord:
    net: str
    transform: str
    reason: str


@dataclass
class PassReport:
    threshold: Optional[int]
    luts_before: int
    luts_after: int
    targets: list[TargetRecord] = field(default_factory=list)
    skipped: list[SkipRecord] = field(default_factory=list)

    @property
    def delta_luts(self) -> int:
        return sum(t.delta_luts for t in self.targets)

    def format(self) -> str:
        lines = [f"{t.net} {t.counter} {t.transform} {t.delta_luts:+d}" for t in self.targets]
        lines += [f"# skipped {s.net} {s.transform}: {s.reason}" for s in self.skipped]
        thr = "-" if self.threshold is None else str(self.threshold)
        lines.append(f"summary threshold={thr} targets={len(self.targets)} "
                     f"skipped={len(self.skipped)} luts_before={self.luts_before} "
                     f"luts_after={self.luts_after} delta={self.delta_luts:+d}")
        return "\n".join(lines) + "\n"


_LUT_DELTA = {SHANNON: 2, DUPLICATE: 1}


def run_pass(nl: Netlist, profile: ActivityProfile,
             cfg: OptConfig = OptConfig()) -> tuple[Netlist, PassReport]:
    missing = [n for n in nl.net_names if n not in profile.counters]
    if missing:
        raise OptError(f"profile does not cover nets {missing[:5]}")
    luts_before = area_luts(nl)
    if not cfg.transforms or not nl.lut_output_nets():
        return nl, PassReport(None, luts_before, luts_before)

    threshold = compute_threshold(profile, nl, cfg)
    report = PassReport(threshold, luts_before, luts_before)
    activity = dict(profile.counters)
    cur = nl
    for nid in select_targets(profile, nl, cfg):
        name = nl.net_name(nid)
        counter = activity[name]
        for transform in (SHANNON, DUPLICATE):
            if transform not in cfg.transforms:
                continue
            delta = _LUT_DELTA[transform]
            if cfg.max_area_growth_pct is not None:
                grown = area_luts(cur) + delta - luts_before
                if 100.0 * grown > cfg.max_area_growth_pct * luts_before:
                    report.skipped.append(SkipRecord(name, transform, "area budget"))
                    continue
            try:
                if transform == SHANNON:
                    nxt = shannon_rewrite(cur, name, activity)
                else:
                    nxt = duplicate_driver(cur, name, cfg.min_fanout_for_duplication)
            except RewriteError as e:
                report.skipped.append(SkipRecord(name, transform, str(e)))
                continue
            if transform == DUPLICATE:
                # the clone carries the same signal as the original
                added = set(nxt.net_names) - set(cur.net_names)
                for n in added:
                    activity[n] = counter
            cur = nxt
            report.targets.append(TargetRecord(name, counter, transform, delta))
    report.luts_after = area_luts(cur)
    return cur, report
