"""Cycle-based two-valued simulation with per-net toggle counting.

Timing model: cycle 0 evaluates the design with latch initial values and the
first stimulus sample and is never counted. Each counted cycle ``c`` in
``1..num_cycles`` starts with the rising clock edge (latches capture the
previous cycle's settled data), then applies stimulus sample ``c - 1``,
settles the combinational logic in topological order, and counts every net
whose settled value differs from the previous cycle's.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

import numpy as np

from .netlist import Netlist

log = logging.getLogger(__name__)

PROFILE_MAGIC = "simopt-profile"
PROFILE_VERSION = "v1"


class StimulusError(ValueError):
    pass


class ProfileError(ValueError):
    pass


# -- waveforms ------------------------------------------------------------

@dataclass(frozen=True)
class ToggleEvery:
    period: int

    def __post_init__(self):
        if self.period < 1:
            raise StimulusError("toggle period must be >= 1")

    def token(self) -> str:
        return f"toggle_every({self.period})"

    def expand(self, num_cycles: int, rng) -> np.ndarray:
        return ((np.arange(num_cycles) // self.period) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Random:
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise StimulusError("probability must be in [0, 1]")

    def token(self) -> str:
        return f"random({self.p!r})"

    def expand(self, num_cycles: int, rng) -> np.ndarray:
        return (rng.random(num_cycles) < self.p).astype(np.uint8)


@dataclass(frozen=True)
class Constant:
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise StimulusError("constant must be 0 or 1")

    def token(self) -> str:
        return f"constant({self.bit})"

    def expand(self, num_cycles: int, rng) -> np.ndarray:
        return np.full(num_cycles, self.bit, dtype=np.uint8)


@dataclass(frozen=True)
class Explicit:
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise StimulusError("explicit waveform bits must be 0 or 1")

    def token(self) -> str:
        return "explicit(" + "".join(map(str, self.bits)) + ")"

    def expand(self, num_cycles: int, rng) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)


Waveform = Union[ToggleEvery, Random, Constant, Explicit]


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode(), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class Stimulus:
    """Per-input waveform specs; random waveforms are seeded per input name."""

    num_cycles: int
    seed: int
    waveforms: Mapping[str, Waveform]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.num_cycles < 0:
            raise StimulusError("num_cycles must be nonnegative")
        object.__setattr__(self, "waveforms", dict(sorted(self.waveforms.items())))
        for name, wf in self.waveforms.items():
            if isinstance(wf, Explicit) and len(wf.bits) != self.num_cycles:
                raise StimulusError(
                    f"explicit waveform for {name!r} has {len(wf.bits)} bits, "
                    f"expected {self.num_cycles}")

    def values(self, name: str) -> np.ndarray:
        rng = np.random.default_rng([self.seed & (2**64 - 1), _name_key(name)])
        return self.waveforms[name].expand(self.num_cycles, rng)

    @property
    def digest(self) -> int:
        h = hashlib.blake2b(digest_size=8)
        h.update(f"cycles={self.num_cycles};seed={self.seed};".encode())
        for name, wf in self.waveforms.items():
            h.update(f"{name}={wf.token()};".encode())
        return int.from_bytes(h.digest(), "big")


_RESET = re.compile(r"^(rst|reset)", re.IGNORECASE)
_ACTIVE_LOW = re.compile(r"^_?(n|b|l|ni)$", re.IGNORECASE)


def reset_inactive_value(name: str) -> Optional[int]:
    """Inactive level for reset-like input names, None for ordinary inputs."""
    m = _RESET.match(name)
    if not m:
        return None
    return 1 if _ACTIVE_LOW.match(name[m.end():]) else 0


def generate_stimulus(nl: Netlist, num_cycles: int, seed: int,
                      hold: Optional[Mapping[str, int]] = None,
                      free: frozenset[str] = frozenset()) -> Stimulus:
    """Random p=0.5 stimulus for every data input.

    Reset-like inputs (``rst*``/``reset*``) are held inactive and latch
    clock inputs are held at 0, unless listed in ``free``. ``hold`` pins
    inputs to constants and wins over everything else.
    """
    if num_cycles < 2:
        raise StimulusError("num_cycles must be >= 2")
    hold = dict(hold or {})
    unknown = set(hold) | set(free)
    unknown -= set(nl.input_names)
    if unknown:
        raise StimulusError(f"override names are not inputs: {sorted(unknown)}")
    clocks = nl.clock_names
    waves: dict[str, Waveform] = {}
    warnings = []
    for name in nl.input_names:
        if name in hold:
            waves[name] = Constant(hold[name])
            continue
        if name not in free:
            if name in clocks:
                waves[name] = Constant(0)
                continue
            inactive = reset_inactive_value(name)
            if inactive is not None:
                waves[name] = Constant(inactive)
                continue
        waves[name] = Random(0.5)
    stim = Stimulus(num_cycles, seed, waves)

    # Force a toggle on any random input that happened to stay flat.
    for name, wf in list(waves.items()):
        if isinstance(wf, Random):
            v = stim.values(name)
            if not (v[1:] != v[:-1]).any():
                bits = v.copy()
                bits[-1] ^= 1
                waves[name] = Explicit(tuple(int(b) for b in bits))
                warnings.append(f"input {name} did not toggle under its random seed; "
                                f"forced a final-cycle toggle")
    return Stimulus(num_cycles, seed, waves, tuple(warnings))


# -- profiles -------------------------------------------------------------

@dataclass(frozen=True)
class ActivityProfile:
    """Toggle counters per net name over ``num_cycles`` counted cycles."""

    num_cycles: int
    counters: Mapping[str, int]
    stimulus_digest: int
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.num_cycles < 1:
            raise ProfileError("num_cycles must be positive")
        if not 0 <= self.stimulus_digest < 2**64:
            raise ProfileError("digest must be a 64-bit value")
        object.__setattr__(self, "counters", dict(sorted(self.counters.items())))
        for name, c in self.counters.items():
            if not 0 <= c <= self.num_cycles:
                raise ProfileError(
                    f"counter {c} for net {name!r} outside [0, {self.num_cycles}]")
        object.__setattr__(self, "warnings", tuple(self.warnings))

    def alpha(self, name: str) -> Fraction:
        return Fraction(self.counters[name], self.num_cycles)

    def activity_factors(self) -> dict[str, Fraction]:
        return {name: Fraction(c, self.num_cycles) for name, c in self.counters.items()}


def merge_profiles(a: ActivityProfile, b: ActivityProfile) -> ActivityProfile:
    """Sum two profiles of the same net set taken under different stimuli."""
    if a.stimulus_digest == b.stimulus_digest:
        raise ProfileError("refusing to merge profiles from the same stimulus")
    if set(a.counters) != set(b.counters):
        raise ProfileError("profiles cover different nets")
    h = hashlib.blake2b(digest_size=8)
    h.update(f"{a.stimulus_digest:016x}+{b.stimulus_digest:016x}".encode())
    return ActivityProfile(
        a.num_cycles + b.num_cycles,
        {n: a.counters[n] + b.counters[n] for n in a.counters},
        int.from_bytes(h.digest(), "big"),
        a.warnings + b.warnings)


def write_profile(p: ActivityProfile) -> str:
    lines = [f"{PROFILE_MAGIC} {PROFILE_VERSION} cycles={p.num_cycles} "
             f"digest={p.stimulus_digest:016x}"]
    lines += [f"# warning: {w}" for w in p.warnings]
    lines += [f"{name} {c}" for name, c in p.counters.items()]
    return "\n".join(lines) + "\n"


_HEADER = re.compile(r"^(\S+) (\S+) cycles=(\d+) digest=([0-9a-f]{16})$")


def read_profile(text: str) -> ActivityProfile:
    lines = text.splitlines()
    if not lines:
        raise ProfileError("empty profile")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise ProfileError(f"line 1: malformed header {lines[0]!r}")
    magic, version, cycles, digest = m.groups()
    if magic != PROFILE_MAGIC:
        raise ProfileError(f"line 1: not an activity profile ({magic!r})")
    if version != PROFILE_VERSION:
        raise ProfileError(f"line 1: unsupported profile version {version!r}")
    num_cycles = int(cycles)
    counters: dict[str, int] = {}
    warnings = []
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if line.startswith("# warning: "):
            warnings.append(line[len("# warning: "):])
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise ProfileError(f"line {lineno}: malformed entry {raw!r}")
        name, c = parts[0], int(parts[1])
        if name in counters:
            raise ProfileError(f"line {lineno}: duplicate net {name!r}")
        if c > num_cycles:
            raise ProfileError(
                f"line {lineno}: counter {c} for {name!r} exceeds cycles={num_cycles}")
        counters[name] = c
    return ActivityProfile(num_cycles, counters, int(digest, 16), tuple(warnings))


# -- simulation -----------------------------------------------------------

@dataclass
class SimulationResult:
    """Settled net values per cycle; row 0 is the uncounted initial cycle."""

    netlist: Netlist
    trace: np.ndarray  # shape (num_cycles + 1, num_nets), uint8
    stimulus: Stimulus
    warnings: list[str] = field(default_factory=list)

    def net_trace(self, name: str) -> np.ndarray:
        return self.trace[:, self.netlist.net_id(name)]

    def output_trace(self) -> np.ndarray:
        return self.trace[:, list(self.netlist.outputs)]

    def toggle_counts(self) -> np.ndarray:
        return (self.trace[1:] != self.trace[:-1]).sum(axis=0)

    def profile(self) -> ActivityProfile:
        counts = self.toggle_counts()
        return ActivityProfile(
            self.stimulus.num_cycles,
            {name: int(counts[i]) for i, name in enumerate(self.netlist.net_names)},
            self.stimulus.digest,
            tuple(self.stimulus.warnings) + tuple(self.warnings))


def _check_stimulus(nl: Netlist, stim: Stimulus) -> None:
    names = set(nl.input_names)
    given = set(stim.waveforms)
    if names != given:
        missing = sorted(names - given)
        extra = sorted(given - names)
        raise StimulusError(f"stimulus/input mismatch: missing {missing}, extra {extra}")


def run_simulation(nl: Netlist, stim: Stimulus) -> SimulationResult:
    """Simulate ``nl`` and keep the full settled-value trace."""
    _check_stimulus(nl, stim)
    n_cyc = stim.num_cycles
    n_nets = len(nl.net_names)
    warnings = []
    inputs = list(nl.inputs)
    waves = np.stack([stim.values(nl.net_name(i)) for i in inputs], axis=1) if inputs \
        else np.zeros((n_cyc, 0), dtype=np.uint8)
    if n_cyc == 0:
        waves = np.zeros((1, len(inputs)), dtype=np.uint8)

    program = []
    for ci in nl.topo_order:
        c = nl.cells[ci]
        program.append((c.output_net, c.input_nets, c.function.to_int()))
    latch_pairs = [(l.data_out, l.data_in) for l in nl.latches]

    values = [0] * n_nets
    for l in nl.latches:
        if l.init is None:
            warnings.append(f"latch {l.id} has unknown init; simulating as 0")
            log.warning("latch %s has unknown init; simulating as 0", l.id)
        values[l.data_out] = l.init or 0

    trace = np.zeros((n_cyc + 1, n_nets), dtype=np.uint8)

    def settle(sample) -> None:
        for k, net in enumerate(inputs):
            values[net] = int(sample[k])
        for out, ins, table in program:
            idx = 0
            for i, net in enumerate(ins):
                idx |= values[net] << i
            values[out] = (table >> idx) & 1

    settle(waves[0])
    trace[0] = values
    for c in range(1, n_cyc + 1):
        captured = [values[d] for _, d in latch_pairs]
        for (q, _), bit in zip(latch_pairs, captured):
            values[q] = bit
        settle(waves[c - 1])
        trace[c] = values
    return SimulationResult(nl, trace, stim, warnings)


def simulate(nl: Netlist, stim: Stimulus) -> ActivityProfile:
    if stim.num_cycles < 1:
        raise StimulusError("simulation needs at least one cycle")
    return run_simulation(nl, stim).profile()
