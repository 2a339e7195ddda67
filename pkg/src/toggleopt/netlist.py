"""LUT-level netlists: construction, validation, traversal and BLIF I/O.

Nets are identified by integer ids; names live in a side table and are
unique within a netlist. A :class:`Netlist` is immutable once built; rewrites
go through :class:`NetlistBuilder` and produce a fresh netlist.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .truthtable import MAX_VARS, TruthTable

NetRef = Union[int, str]


class NetlistError(ValueError):
    pass


class BlifSyntaxError(NetlistError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Cell:
    """A LUT; variable ``i`` of ``function`` is bound to ``input_nets[i]``."""

    id: str
    input_nets: tuple[int, ...]
    output_net: int
    function: TruthTable

    def __post_init__(self):
        object.__setattr__(self, "input_nets", tuple(self.input_nets))
        if self.function.num_vars != len(self.input_nets):
            raise NetlistError(
                f"cell {self.id}: function has {self.function.num_vars} variables "
                f"but {len(self.input_nets)} inputs")

    @property
    def is_constant(self) -> bool:
        return not self.input_nets


@dataclass(frozen=True)
class Latch:
    """Rising-edge flip-flop on the single global clock.

    ``init`` is 0, 1 or None (unknown). ``kind``/``control`` carry the
    optional BLIF type and clock tokens so they survive a round trip.
    """

    id: str
    data_in: int
    data_out: int
    init: Optional[int] = None
    kind: Optional[str] = None
    control: Optional[str] = None


@dataclass(frozen=True)
class Driver:
    kind: str  # "input" | "cell" | "latch"
    index: int


@dataclass(frozen=True)
class Sink:
    kind: str  # "cell" | "latch" | "output"
    index: int
    pin: int = 0


@dataclass(frozen=True)
class NetInfo:
    name: str
    driver: Driver
    loads: tuple[Sink, ...]


class Netlist:
    """Validated, immutable LUT/latch netlist."""

    def __init__(self, name: str, net_names: Sequence[str], inputs: Sequence[int],
                 outputs: Sequence[int], cells: Sequence[Cell] = (),
                 latches: Sequence[Latch] = ()):
        self._name = name
        self._net_names = tuple(net_names)
        self._inputs = tuple(inputs)
        self._outputs = tuple(outputs)
        self._cells = tuple(cells)
        self._latches = tuple(latches)
        self._name_to_id = {}
        for i, nm in enumerate(self._net_names):
            if nm in self._name_to_id:
                raise NetlistError(f"duplicate net name {nm!r}")
            self._name_to_id[nm] = i
        self._nets = self._index()
        self._topo = self._toposort()

    # -- validation -------------------------------------------------------

    def _check_id(self, net: int, what: str) -> None:
        if not 0 <= net < len(self._net_names):
            raise NetlistError(f"{what} references unknown net id {net}")

    def _index(self) -> tuple[NetInfo, ...]:
        n = len(self._net_names)
        drivers: list[Optional[Driver]] = [None] * n
        loads: list[list[Sink]] = [[] for _ in range(n)]

        def drive(net: int, d: Driver, what: str) -> None:
            self._check_id(net, what)
            if drivers[net] is not None:
                raise NetlistError(f"net {self._net_names[net]!r} has multiple drivers")
            drivers[net] = d

        if len(set(self._inputs)) != len(self._inputs):
            raise NetlistError("primary input listed twice")
        for i, net in enumerate(self._inputs):
            drive(net, Driver("input", i), "input")
        for ci, c in enumerate(self._cells):
            if len(c.input_nets) > MAX_VARS:
                raise NetlistError(f"cell {c.id} has arity {len(c.input_nets)} > {MAX_VARS}")
            drive(c.output_net, Driver("cell", ci), f"cell {c.id}")
            for pin, net in enumerate(c.input_nets):
                self._check_id(net, f"cell {c.id}")
                loads[net].append(Sink("cell", ci, pin))
        for li, l in enumerate(self._latches):
            if l.init not in (0, 1, None):
                raise NetlistError(f"latch {l.id}: bad init {l.init!r}")
            drive(l.data_out, Driver("latch", li), f"latch {l.id}")
            self._check_id(l.data_in, f"latch {l.id}")
            loads[l.data_in].append(Sink("latch", li))
        for oi, net in enumerate(self._outputs):
            self._check_id(net, "output")
            loads[net].append(Sink("output", oi))
        for net, d in enumerate(drivers):
            if d is None:
                raise NetlistError(f"net {self._net_names[net]!r} has no driver")
        return tuple(NetInfo(self._net_names[i], drivers[i], tuple(loads[i]))
                     for i in range(n))

    def _toposort(self) -> tuple[int, ...]:
        # Kahn's algorithm over cells; latch outputs and inputs are sources.
        pending = [0] * len(self._cells)
        for ci, c in enumerate(self._cells):
            pending[ci] = sum(1 for net in c.input_nets
                              if self._nets[net].driver.kind == "cell")
        ready = [ci for ci, k in enumerate(pending) if k == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            ci = heapq.heappop(ready)
            order.append(ci)
            for s in self._nets[self._cells[ci].output_net].loads:
                if s.kind == "cell":
                    pending[s.index] -= 1
                    if pending[s.index] == 0:
                        heapq.heappush(ready, s.index)
        if len(order) != len(self._cells):
            stuck = sorted(self._net_names[c.output_net]
                           for ci, c in enumerate(self._cells) if pending[ci] > 0)
            raise NetlistError(f"combinational cycle through nets {stuck}")
        return tuple(order)

    # -- accessors --------------------------------------------------------

    @property
    def name(self) -> str:
        return self._name

    @property
    def inputs(self) -> tuple[int, ...]:
        return self._inputs

    @property
    def outputs(self) -> tuple[int, ...]:
        return self._outputs

    @property
    def cells(self) -> tuple[Cell, ...]:
        return self._cells

    @property
    def latches(self) -> tuple[Latch, ...]:
        return self._latches

    @property
    def nets(self) -> tuple[NetInfo, ...]:
        return self._nets

    @property
    def net_names(self) -> tuple[str, ...]:
        return self._net_names

    @property
    def topo_order(self) -> tuple[int, ...]:
        """Cell indices in dependency order."""
        return self._topo

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(self._net_names[i] for i in self._inputs)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(self._net_names[i] for i in self._outputs)

    @property
    def is_combinational(self) -> bool:
        return not self._latches

    @property
    def clock_names(self) -> frozenset[str]:
        return frozenset(l.control for l in self._latches if l.control)

    def net_id(self, net: NetRef) -> int:
        if isinstance(net, str):
            try:
                return self._name_to_id[net]
            except KeyError:
                raise NetlistError(f"unknown net {net!r}") from None
        self._check_id(net, "lookup")
        return net

    def net_name(self, net: NetRef) -> str:
        return self._net_names[self.net_id(net)]

    def has_net(self, name: str) -> bool:
        return name in self._name_to_id

    def driver_cell(self, net: NetRef) -> Optional[Cell]:
        d = self._nets[self.net_id(net)].driver
        return self._cells[d.index] if d.kind == "cell" else None

    def lut_output_nets(self) -> list[int]:
        """Outputs of cells with at least one input (constants excluded)."""
        return [c.output_net for c in self._cells if c.input_nets]

    def __repr__(self):
        return (f"Netlist({self._name!r}, inputs={len(self._inputs)}, "
                f"outputs={len(self._outputs)}, cells={len(self._cells)}, "
                f"latches={len(self._latches)})")


def area_luts(nl: Netlist) -> int:
    return sum(1 for c in nl.cells if c.input_nets)


def fanout(nl: Netlist, net: NetRef) -> int:
    """Number of distinct cells, latches and primary-output slots reading ``net``."""
    return len({(s.kind, s.index) for s in nl.nets[nl.net_id(net)].loads})


class NetlistBuilder:
    """Mutable scratch space for assembling or rewriting a netlist by net name."""

    def __init__(self, name: str):
        self.name = name
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        self.inputs: list[int] = []
        self.outputs: list[int] = []
        self.cells: list[Cell] = []
        self.latches: list[Latch] = []

    @classmethod
    def from_netlist(cls, nl: Netlist) -> NetlistBuilder:
        b = cls(nl.name)
        for nm in nl.net_names:
            b.net(nm)
        b.inputs = list(nl.inputs)
        b.outputs = list(nl.outputs)
        b.cells = list(nl.cells)
        b.latches = list(nl.latches)
        return b

    def net(self, name: str) -> int:
        nid = self._ids.get(name)
        if nid is None:
            nid = len(self._names)
            self._names.append(name)
            self._ids[name] = nid
        return nid

    def has_net(self, name: str) -> bool:
        return name in self._ids

    def fresh_name(self, base: str) -> str:
        if base not in self._ids:
            return base
        k = 1
        while f"{base}{k}" in self._ids:
            k += 1
        return f"{base}{k}"

    def add_input(self, name: str) -> int:
        nid = self.net(name)
        self.inputs.append(nid)
        return nid

    def add_output(self, name: str) -> int:
        nid = self.net(name)
        self.outputs.append(nid)
        return nid

    def add_cell(self, inputs: Iterable[str], output: str, function: TruthTable,
                 cell_id: Optional[str] = None) -> Cell:
        c = Cell(cell_id or output, tuple(self.net(n) for n in inputs),
                 self.net(output), function)
        self.cells.append(c)
        return c

    def add_latch(self, data_in: str, data_out: str, init: Optional[int] = None,
                  kind: Optional[str] = None, control: Optional[str] = None,
                  latch_id: Optional[str] = None) -> Latch:
        l = Latch(latch_id or data_out, self.net(data_in), self.net(data_out), init,
                  kind, control)
        self.latches.append(l)
        return l

    def build(self) -> Netlist:
        return Netlist(self.name, self._names, self.inputs, self.outputs,
                       self.cells, self.latches)


# -- BLIF -----------------------------------------------------------------

_SUPPORTED = {"model", "inputs", "outputs", "names", "latch", "end"}
_LATCH_TYPES = {"fe", "re", "ah", "al", "as"}


def _logical_lines(text: str):
    """Yield (line_no, column_offsets, tokens) with comments and continuations folded."""
    pending: list[tuple[str, int, int]] = []
    start_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        cont = line.rstrip().endswith("\\")
        if cont:
            line = line.rstrip()[:-1]
        if start_line is None:
            start_line = lineno
        col = 0
        for tok in line.split():
            col = line.index(tok, col)
            pending.append((tok, lineno, col + 1))
            col += len(tok)
        if cont:
            continue
        if pending:
            yield start_line, pending
        pending = []
        start_line = None
    if pending:
        yield start_line, pending


def parse_blif(text: str) -> Netlist:
    """Parse a single-model BLIF document into a validated :class:`Netlist`."""
    model = None
    ended = False
    inputs: list[tuple[str, int, int]] = []
    outputs: list[tuple[str, int, int]] = []
    # (signal tokens, rows, line)
    tables: list[tuple[list[tuple[str, int, int]], list, int]] = []
    latches: list[tuple[list[tuple[str, int, int]], int]] = []
    current = None

    for lineno, toks in _logical_lines(text):
        head, hline, hcol = toks[0]
        if ended:
            raise BlifSyntaxError("content after .end", hline, hcol)
        if head.startswith("."):
            directive = head[1:]
            current = None
            if directive not in _SUPPORTED:
                raise BlifSyntaxError(f"unsupported construct .{directive}", hline, hcol)
            args = toks[1:]
            if directive == "model":
                if model is not None:
                    raise BlifSyntaxError("multiple .model blocks are not supported",
                                          hline, hcol)
                if len(args) > 1:
                    raise BlifSyntaxError(".model takes one name", hline, args[1][2])
                model = args[0][0] if args else "top"
            elif directive == "inputs":
                inputs.extend(args)
            elif directive == "outputs":
                outputs.extend(args)
            elif directive == "names":
                if not args:
                    raise BlifSyntaxError(".names needs an output signal", hline, hcol)
                if len(args) - 1 > MAX_VARS:
                    raise BlifSyntaxError(
                        f"LUT arity {len(args) - 1} exceeds {MAX_VARS}", hline, args[-1][2])
                current = (args, [], hline)
                tables.append(current)
            elif directive == "latch":
                if not 2 <= len(args) <= 5:
                    raise BlifSyntaxError(".latch takes 2 to 5 arguments", hline, hcol)
                latches.append((args, hline))
            else:
                if args:
                    raise BlifSyntaxError(".end takes no arguments", hline, args[0][2])
                ended = True
            continue
        if current is None:
            raise BlifSyntaxError(f"unexpected token {head!r}", hline, hcol)
        current[1].append(toks)

    if model is None:
        raise BlifSyntaxError("missing .model", 1)

    b = NetlistBuilder(model)
    for nm, _, _ in inputs:
        b.add_input(nm)
    for args, rows, line in tables:
        names = [a[0] for a in args]
        b.add_cell(names[:-1], names[-1], _cover_to_table(len(names) - 1, rows, line))
    for args, line in latches:
        names = [a[0] for a in args]
        kind = control = None
        init = None
        rest = names[2:]
        if len(rest) in (2, 3):
            kind, control = rest[0], rest[1]
            if kind not in _LATCH_TYPES:
                raise BlifSyntaxError(f"unknown latch type {kind!r}", line, args[2][2])
            rest = rest[2:]
        if rest:
            if rest[0] not in ("0", "1", "2", "3"):
                raise BlifSyntaxError(f"bad latch init {rest[0]!r}", line, args[-1][2])
            init = int(rest[0]) if rest[0] in ("0", "1") else None
        b.add_latch(names[0], names[1], init, kind, control)
    for nm, _, _ in outputs:
        b.add_output(nm)
    if len(set(b.outputs)) != len(b.outputs):
        raise NetlistError("primary output listed twice")
    return b.build()


def _cover_to_table(k: int, rows: list, line: int) -> TruthTable:
    on = 0
    polarity = None
    for toks in rows:
        if k == 0:
            if len(toks) != 1:
                raise BlifSyntaxError("constant cover row takes one token", toks[0][1], toks[0][2])
            pattern, out = "", toks[0]
        else:
            if len(toks) != 2:
                raise BlifSyntaxError("cover row must be '<inputs> <output>'",
                                      toks[0][1], toks[0][2])
            (pattern, pl, pc), out = toks[0], toks[1]
            if len(pattern) != k or any(ch not in "01-" for ch in pattern):
                raise BlifSyntaxError(f"bad input pattern {pattern!r} for {k} inputs", pl, pc)
        bit, ol, oc = out
        if bit not in ("0", "1"):
            raise BlifSyntaxError(f"bad output bit {bit!r}", ol, oc)
        if polarity is None:
            polarity = bit
        elif polarity != bit:
            raise BlifSyntaxError("mixed ON-set and OFF-set rows in one cover", ol, oc)
        for m in _expand(pattern):
            on |= 1 << m
    full = (1 << (1 << k)) - 1
    if polarity == "0":
        on = full & ~on
    return TruthTable.from_int(k, on)


def _expand(pattern: str) -> list[int]:
    ms = [0]
    for i, ch in enumerate(pattern):
        if ch == "1":
            ms = [m | (1 << i) for m in ms]
        elif ch == "-":
            ms = ms + [m | (1 << i) for m in ms]
    return ms


def emit_blif(nl: Netlist) -> str:
    """Serialize ``nl``; covers list ON-set minterms in ascending order."""
    names = nl.net_names
    lines = [f".model {nl.name}"]
    if nl.inputs:
        lines.append(".inputs " + " ".join(names[i] for i in nl.inputs))
    if nl.outputs:
        lines.append(".outputs " + " ".join(names[i] for i in nl.outputs))
    for l in nl.latches:
        parts = [".latch", names[l.data_in], names[l.data_out]]
        if l.kind is not None:
            parts += [l.kind, l.control]
        parts.append("3" if l.init is None else str(l.init))
        lines.append(" ".join(parts))
    for c in nl.cells:
        lines.append(".names " + " ".join([names[i] for i in c.input_nets]
                                          + [names[c.output_net]]))
        k = len(c.input_nets)
        for m in c.function.minterms():
            if k == 0:
                lines.append("1")
            else:
                lines.append("".join("1" if (m >> i) & 1 else "0" for i in range(k)) + " 1")
    lines.append(".end")
    return "\n".join(lines) + "\n"
