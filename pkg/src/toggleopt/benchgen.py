"""Generators for the bundled benchmark netlists.

The ``.blif`` files under ``toggleopt/benchmarks`` are written by
:func:`write_all`; tests check the files still match these generators.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .netlist import Netlist, NetlistBuilder, emit_blif, parse_blif
from .truthtable import TruthTable


def lut(b: NetlistBuilder, ins: list[str], out: str, fn: Callable[..., int]) -> str:
    b.add_cell(ins, out, TruthTable.from_function(len(ins), lambda *x: int(bool(fn(*x)))))
    return out


def _full_add(b: NetlistBuilder, x: str, y: str, c: Optional[str], s: str, co: str):
    if c is None:
        lut(b, [x, y], s, lambda p, q: p ^ q)
        lut(b, [x, y], co, lambda p, q: p & q)
    else:
        lut(b, [x, y, c], s, lambda p, q, r: p ^ q ^ r)
        lut(b, [x, y, c], co, lambda p, q, r: (p + q + r) >= 2)


def toggle1() -> Netlist:
    b = NetlistBuilder("toggle1")
    b.add_input("clk")
    lut(b, ["q"], "q_next", lambda q: not q)
    b.add_latch("q_next", "q", 0, "re", "clk")
    b.add_output("q")
    return b.build()


def counter3() -> Netlist:
    b = NetlistBuilder("counter3")
    b.add_input("clk")
    q = [f"q[{i}]" for i in range(3)]
    lut(b, [q[0]], "q_next[0]", lambda a: not a)
    lut(b, [q[0], q[1]], "q_next[1]", lambda a, c: a ^ c)
    lut(b, [q[0], q[1], q[2]], "q_next[2]", lambda a, c, d: d ^ (a & c))
    for i in range(3):
        b.add_latch(f"q_next[{i}]", q[i], 0, "re", "clk")
    for n in q:
        b.add_output(n)
    return b.build()


def updown_counter(width: int = 4) -> Netlist:
    b = NetlistBuilder("updown_counter")
    for n in ("clk", "rst", "en", "up"):
        b.add_input(n)
    q = [f"q[{i}]" for i in range(width)]
    # up_src/dn_src: all lower bits 1 / all lower bits 0
    up_src = dn_src = None
    for i in range(width):
        if i == 0:
            lut(b, ["en"], "t[0]", lambda e: e)
        else:
            if i == 1:
                up_src = q[0]
                dn_src = lut(b, [q[0]], "dn[1]", lambda a: not a)
            else:
                up_src = lut(b, [up_src, q[i - 1]], f"up[{i}]", lambda c, a: c & a)
                dn_src = lut(b, [dn_src, q[i - 1]], f"dn[{i}]", lambda c, a: c & (not a))
            lut(b, ["en", "up", up_src, dn_src], f"t[{i}]",
                lambda e, u, cu, cd: e & (cu if u else cd))
        lut(b, ["rst", q[i], f"t[{i}]"], f"q_next[{i}]", lambda r, a, t: (not r) & (a ^ t))
        b.add_latch(f"q_next[{i}]", q[i], 0, "re", "clk")
    lut(b, q, "zero", lambda *bits: not any(bits))
    for n in q:
        b.add_output(n)
    b.add_output("zero")
    return b.build()


def adder8(width: int = 8) -> Netlist:
    b = NetlistBuilder(f"adder{width}")
    a = [f"a[{i}]" for i in range(width)]
    for n in a:
        b.add_input(n)
    for i in range(width):
        b.add_input(f"b[{i}]")
    carry = None
    for i in range(width):
        _full_add(b, a[i], f"b[{i}]", carry, f"s[{i}]", f"c[{i + 1}]")
        carry = f"c[{i + 1}]"
    for i in range(width):
        b.add_output(f"s[{i}]")
    b.add_output(carry)
    return b.build()


_ALU_OPS = {
    0: lambda a, b, c: a & b,
    1: lambda a, b, c: a | b,
    2: lambda a, b, c: a ^ b,
    3: lambda a, b, c: a ^ b ^ c,
}


def alu8(width: int = 8) -> Netlist:
    b = NetlistBuilder(f"alu{width}")
    for i in range(width):
        b.add_input(f"a[{i}]")
    for i in range(width):
        b.add_input(f"b[{i}]")
    b.add_input("op[0]")
    b.add_input("op[1]")
    res = []
    for i in range(width):
        ai, bi = f"a[{i}]", f"b[{i}]"
        if i == 0:
            lut(b, [ai, bi, "op[0]", "op[1]"], "res[0]",
                lambda x, y, o0, o1: _ALU_OPS[o0 | o1 << 1](x, y, 0))
            lut(b, [ai, bi], "c[1]", lambda x, y: x & y)
        else:
            ci = f"c[{i}]"
            lut(b, [ai, bi, ci, "op[0]", "op[1]"], f"res[{i}]",
                lambda x, y, c, o0, o1: _ALU_OPS[o0 | o1 << 1](x, y, c))
            lut(b, [ai, bi, ci], f"c[{i + 1}]", lambda x, y, c: (x + y + c) >= 2)
        res.append(f"res[{i}]")
    lut(b, [f"c[{width}]", "op[0]", "op[1]"], "cout", lambda c, o0, o1: c & o0 & o1)
    lut(b, res, "zero", lambda *bits: not any(bits))
    for n in res:
        b.add_output(n)
    b.add_output("cout")
    b.add_output("zero")
    return b.build()


def mult4x4(width: int = 4) -> Netlist:
    b = NetlistBuilder(f"mult{width}x{width}")
    for i in range(width):
        b.add_input(f"a[{i}]")
    for i in range(width):
        b.add_input(f"b[{i}]")
    # acc[k] is the running sum bit of weight 2^k (None = constant 0)
    acc: list[Optional[str]] = [None] * (2 * width)
    for i in range(width):
        row: list[Optional[str]] = [None] * (2 * width)
        for j in range(width):
            pp = f"pp[{i}][{j}]"
            lut(b, [f"a[{j}]", f"b[{i}]"], pp, lambda x, y: x & y)
            row[i + j] = pp
        if i == 0:
            acc = row
            continue
        carry = None
        new: list[Optional[str]] = [None] * (2 * width)
        for k in range(2 * width):
            terms = [t for t in (acc[k], row[k], carry) if t is not None]
            s, co = f"r{i}s[{k}]", f"r{i}c[{k + 1}]"
            if not terms:
                new[k], carry = None, None
            elif len(terms) == 1:
                new[k], carry = terms[0], None
            elif len(terms) == 2:
                _full_add(b, terms[0], terms[1], None, s, co)
                new[k], carry = s, co
            else:
                _full_add(b, terms[0], terms[1], terms[2], s, co)
                new[k], carry = s, co
        acc = new
    for k in range(2 * width):
        src = acc[k]
        if src is None:
            b.add_cell([], f"p[{k}]", TruthTable.constant(0))
        else:
            lut(b, [src], f"p[{k}]", lambda x: x)
        b.add_output(f"p[{k}]")
    return b.build()


def fifo_ctrl(depth_bits: int = 2) -> Netlist:
    """Pointer and occupancy logic of a 2^depth_bits-entry FIFO."""
    b = NetlistBuilder("fifo_ctrl")
    for n in ("clk", "rst", "push", "pop"):
        b.add_input(n)
    nb = depth_bits + 1
    depth = 1 << depth_bits
    cnt = [f"count[{i}]" for i in range(nb)]
    w = [f"wptr[{i}]" for i in range(depth_bits)]
    r = [f"rptr[{i}]" for i in range(depth_bits)]

    def value(bits):
        return sum(v << i for i, v in enumerate(bits))

    lut(b, cnt, "full", lambda *c: value(c) == depth)
    lut(b, cnt, "empty", lambda *c: value(c) == 0)
    lut(b, ["push", "full"], "do_push", lambda p, f: p & (not f))
    lut(b, ["pop", "empty"], "do_pop", lambda p, e: p & (not e))
    for i in range(nb):
        lut(b, ["rst", "do_push", "do_pop"] + cnt, f"count_next[{i}]",
            lambda rs, dp, dq, *c, i=i:
            (not rs) and ((value(c) + dp - dq) >> i) & 1)
    for ptr, en in ((w, "do_push"), (r, "do_pop")):
        for i in range(depth_bits):
            lut(b, ["rst", en] + ptr, f"{ptr[i][:4]}_next[{i}]",
                lambda rs, e, *p, i=i: (not rs) and ((value(p) + e) >> i) & 1)
    for i in range(nb):
        b.add_latch(f"count_next[{i}]", cnt[i], 0, "re", "clk")
    for ptr in (w, r):
        for i in range(depth_bits):
            b.add_latch(f"{ptr[i][:4]}_next[{i}]", ptr[i], 0, "re", "clk")
    for n in ["full", "empty"] + w + r:
        b.add_output(n)
    return b.build()


GENERATORS: dict[str, Callable[[], Netlist]] = {
    "toggle1": toggle1,
    "counter3": counter3,
    "updown_counter": updown_counter,
    "adder8": adder8,
    "alu8": alu8,
    "mult4x4": mult4x4,
    "fifo_ctrl": fifo_ctrl,
}


def benchmark_names() -> list[str]:
    return list(GENERATORS)


def benchmark_text(name: str) -> str:
    if name not in GENERATORS:
        raise KeyError(f"unknown benchmark {name!r}")
    return resources.files("toggleopt").joinpath("benchmarks", f"{name}.blif").read_text()


def load_benchmark(name: str) -> Netlist:
    return parse_blif(benchmark_text(name))


def write_all(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, gen in GENERATORS.items():
        p = directory / f"{name}.blif"
        p.write_text(emit_blif(gen()))
        paths.append(p)
    return paths


if __name__ == "__main__":
    for p in write_all(Path(__file__).parent / "benchmarks"):
        print(p)
