"""Functional equivalence: exhaustive for small combinational designs, lockstep otherwise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .activity import Stimulus, run_simulation
from .netlist import Netlist

EXHAUSTIVE_MAX_INPUTS = 16

EQUIVALENT = "equivalent"
MISMATCH = "mismatch"
INCONCLUSIVE = "inconclusive"


class EquivError(ValueError):
    pass


@dataclass(frozen=True)
class Counterexample:
    inputs: dict[str, int]  # values applied at the failing cycle/assignment
    outputs: tuple[str, ...]  # outputs that differ
    cycle: Optional[int] = None
    trace: Optional[dict[str, tuple[int, ...]]] = None  # stimulus samples up to the cycle

    def format(self) -> str:
        text = " ".join(f"{k}={v}" for k, v in self.inputs.items())
        if self.cycle is not None:
            text = f"cycle {self.cycle}: {text}"
        return text


@dataclass(frozen=True)
class EquivResult:
    verdict: str
    coverage: int
    counterexample: Optional[Counterexample] = None
    method: str = ""

    def __post_init__(self):
        if self.verdict == MISMATCH and self.counterexample is None:
            raise EquivError("a mismatch verdict needs a counterexample")

    @property
    def ok(self) -> bool:
        return self.verdict != MISMATCH

    def format(self) -> str:
        line = f"{self.method} {self.verdict} coverage={self.coverage}"
        if self.counterexample is not None:
            line += f" counterexample: {self.counterexample.format()}"
        return line


def _check_io(a: Netlist, b: Netlist) -> None:
    if set(a.input_names) != set(b.input_names):
        raise EquivError("primary input names differ")
    if set(a.output_names) != set(b.output_names):
        raise EquivError("primary output names differ")


def _variable_pattern(bit: int, size: int) -> int:
    """Integer whose bit j is bit ``bit`` of j, for j < size."""
    period = 1 << (bit + 1)
    block = ((1 << (1 << bit)) - 1) << (1 << bit)
    reps = max(1, size // period)
    # repeat ``block`` reps times at stride ``period``
    ones = ((1 << (period * reps)) - 1) // ((1 << period) - 1)
    return (block * ones) & ((1 << size) - 1)


def _lut_parallel(table: int, ins: list[int], mask: int) -> int:
    """Evaluate a LUT on bit-parallel input vectors by recursive Shannon expansion."""
    n = len(ins)
    if n == 0:
        return mask if table & 1 else 0
    if table == 0:
        return 0
    full = (1 << (1 << n)) - 1
    if table == full:
        return mask
    half = 1 << (n - 1)
    lo = _lut_parallel(table & ((1 << half) - 1), ins[:-1], mask)
    hi = _lut_parallel(table >> half, ins[:-1], mask)
    x = ins[-1]
    return (x & hi) | (~x & lo & mask)


def _eval_all(nl: Netlist, order: list[str]) -> dict[str, int]:
    k = len(order)
    size = 1 << k
    mask = (1 << size) - 1
    vals = [0] * len(nl.net_names)
    for pos, name in enumerate(order):
        # first listed input is the most significant bit of the assignment index
        vals[nl.net_id(name)] = _variable_pattern(k - 1 - pos, size)
    for ci in nl.topo_order:
        c = nl.cells[ci]
        vals[c.output_net] = _lut_parallel(c.function.to_int(),
                                           [vals[i] for i in c.input_nets], mask)
    return {nl.net_name(o): vals[o] for o in nl.outputs}


def exhaustive_equiv(a: Netlist, b: Netlist) -> EquivResult:
    """Compare all 2^k assignments, k = number of primary inputs (first input is the MSB)."""
    if not (a.is_combinational and b.is_combinational):
        raise EquivError("exhaustive check needs combinational netlists")
    _check_io(a, b)
    order = list(a.input_names)
    k = len(order)
    if k > EXHAUSTIVE_MAX_INPUTS:
        raise EquivError(f"{k} inputs exceeds the exhaustive limit of {EXHAUSTIVE_MAX_INPUTS}")
    va = _eval_all(a, order)
    vb = _eval_all(b, order)
    diff = 0
    for name in va:
        diff |= va[name] ^ vb[name]
    if not diff:
        return EquivResult(EQUIVALENT, 1 << k, method="exhaustive")
    j = (diff & -diff).bit_length() - 1
    inputs = {name: (j >> (k - 1 - pos)) & 1 for pos, name in enumerate(order)}
    outs = tuple(n for n in a.output_names if ((va[n] ^ vb[n]) >> j) & 1)
    return EquivResult(MISMATCH, j + 1, Counterexample(inputs, outs), method="exhaustive")


def lockstep_equiv(a: Netlist, b: Netlist, stim: Stimulus) -> EquivResult:
    """Bounded check: simulate both under ``stim`` and compare outputs every cycle."""
    _check_io(a, b)
    if stim.num_cycles == 0:
        return EquivResult(INCONCLUSIVE, 0, method="lockstep")
    ra = run_simulation(a, stim)
    rb = run_simulation(b, stim)
    names = list(a.output_names)
    ta = ra.output_trace()
    tb = rb.trace[:, [b.net_id(n) for n in names]]
    bad = np.nonzero((ta != tb).any(axis=1))[0]
    if bad.size == 0:
        return EquivResult(INCONCLUSIVE, stim.num_cycles, method="lockstep")
    cyc = int(bad[0])
    sample = max(cyc - 1, 0)
    trace = {n: tuple(int(x) for x in stim.values(n)[:sample + 1]) for n in a.input_names}
    inputs = {n: v[-1] for n, v in trace.items()}
    outs = tuple(n for i, n in enumerate(names) if ta[cyc, i] != tb[cyc, i])
    return EquivResult(MISMATCH, cyc, Counterexample(inputs, outs, cyc, trace),
                       method="lockstep")


def check_equivalence(a: Netlist, b: Netlist, stim: Optional[Stimulus] = None) -> EquivResult:
    """Exhaustive for combinational designs within the input cap, lockstep otherwise."""
    if a.is_combinational and b.is_combinational \
            and len(a.inputs) <= EXHAUSTIVE_MAX_INPUTS:
        return exhaustive_equiv(a, b)
    if stim is None:
        raise EquivError("lockstep check needs a stimulus")
    return lockstep_equiv(a, b, stim)
