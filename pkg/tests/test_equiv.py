import pytest
from hypothesis import given, settings, strategies as st

from reference import eval_comb, reference_simulate
from toggleopt.activity import Stimulus, generate_stimulus, run_simulation
from toggleopt.benchgen import counter3
from toggleopt.equiv import (EQUIVALENT, INCONCLUSIVE, MISMATCH, EquivError, check_equivalence,
                             exhaustive_equiv, lockstep_equiv)
from toggleopt.netlist import NetlistBuilder, emit_blif, parse_blif
from toggleopt.optpass import run_pass
from toggleopt.activity import simulate
from toggleopt.truthtable import TruthTable, tt_eval

BUF = ".model m\n.inputs a\n.outputs y\n.names a y\n1 1\n.end\n"
DINV = ".model m\n.inputs a\n.outputs y\n.names a t\n0 1\n.names t y\n0 1\n.end\n"
AND2 = ".model m\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n"
OR2 = ".model m\n.inputs a b\n.outputs y\n.names a b y\n1- 1\n-1 1\n.end\n"


def inverted_counter():
    nl = counter3()
    text = emit_blif(nl).replace(".names q[0] q_next[0]\n0 1", ".names q[0] q_next[0]\n1 1")
    return parse_blif(text)


def test_buffer_vs_double_inverter():
    r = exhaustive_equiv(parse_blif(BUF), parse_blif(DINV))
    assert (r.verdict, r.coverage) == (EQUIVALENT, 2)
    assert r.counterexample is None


def test_and_vs_or():
    r = exhaustive_equiv(parse_blif(AND2), parse_blif(OR2))
    assert r.verdict == MISMATCH
    assert r.counterexample.inputs == {"a": 0, "b": 1}
    assert r.counterexample.outputs == ("y",)
    assert r.counterexample.format() == "a=0 b=1"


@pytest.mark.parametrize("name", ["adder8", "mult4x4"])
def test_reflexive(benchmarks, name):
    nl = benchmarks[name]
    r = exhaustive_equiv(nl, nl)
    assert r.verdict == EQUIVALENT and r.coverage == 1 << len(nl.inputs)


def test_io_mismatch_and_limits(benchmarks):
    with pytest.raises(EquivError):
        exhaustive_equiv(parse_blif(BUF), parse_blif(AND2))
    with pytest.raises(EquivError, match="exceeds"):
        exhaustive_equiv(benchmarks["alu8"], benchmarks["alu8"])
    with pytest.raises(EquivError, match="combinational"):
        exhaustive_equiv(benchmarks["counter3"], benchmarks["counter3"])


def test_inverted_next_state_mismatch_at_cycle_1():
    a, b = counter3(), inverted_counter()
    r = lockstep_equiv(a, b, generate_stimulus(a, 100, 1))
    assert r.verdict == MISMATCH
    assert r.counterexample.cycle == 1 and r.coverage == 1
    assert "q[0]" in r.counterexample.outputs
    assert r.counterexample.format().startswith("cycle 1: ")


def test_zero_cycle_stimulus():
    nl = counter3()
    r = lockstep_equiv(nl, inverted_counter(), Stimulus(0, 0, {}))
    assert (r.verdict, r.coverage) == (INCONCLUSIVE, 0)


def test_counter_vs_optimized_10000_cycles(benchmarks):
    nl = benchmarks["counter3"]
    opt, _ = run_pass(nl, simulate(nl, generate_stimulus(nl, 512, 1)))
    r = lockstep_equiv(nl, opt, generate_stimulus(nl, 10_000, 3))
    assert (r.verdict, r.coverage) == (INCONCLUSIVE, 10_000)


def test_dispatch(benchmarks):
    assert check_equivalence(benchmarks["adder8"], benchmarks["adder8"]).method == "exhaustive"
    nl = benchmarks["fifo_ctrl"]
    r = check_equivalence(nl, nl, generate_stimulus(nl, 64, 1))
    assert r.method == "lockstep" and r.coverage == 64
    with pytest.raises(EquivError):
        check_equivalence(nl, nl)


def _random_comb(data, names, outs=2):
    b = NetlistBuilder("r")
    for x in names:
        b.add_input(x)
    avail = list(names)
    for k in range(data.draw(st.integers(1, 6))):
        ins = data.draw(st.lists(st.sampled_from(avail), max_size=3))
        t = TruthTable.from_int(len(ins), data.draw(st.integers(0, (1 << (1 << len(ins))) - 1)))
        b.add_cell(ins, f"n{k}", t)
        avail.append(f"n{k}")
    for i in range(outs):
        b.add_cell([data.draw(st.sampled_from(avail))], f"o{i}", TruthTable.from_int(1, 0b10))
        b.add_output(f"o{i}")
    return b.build()


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_counterexample_replays(data):
    names = ["p", "q", "r", "s"]
    a = _random_comb(data, names)
    b = _random_comb(data, names)
    r = exhaustive_equiv(a, b)
    if r.verdict == MISMATCH:
        cx = r.counterexample
        ra, rb = eval_comb(a, cx.inputs), eval_comb(b, cx.inputs)
        assert set(cx.outputs) == {o for o in ra if ra[o] != rb[o]} != set()
        # nothing earlier in enumeration order differs
        idx = int("".join(str(cx.inputs[n]) for n in names), 2)
        for j in range(idx):
            asg = {n: (j >> (3 - k)) & 1 for k, n in enumerate(names)}
            assert eval_comb(a, asg) == eval_comb(b, asg)
    else:
        for j in range(16):
            asg = {n: (j >> (3 - k)) & 1 for k, n in enumerate(names)}
            assert eval_comb(a, asg) == eval_comb(b, asg)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data())
def test_single_cell_matches_tt_eval(n, data):
    names = [f"x{i}" for i in range(n)]
    tabs = [TruthTable.from_int(n, data.draw(st.integers(0, (1 << (1 << n)) - 1)))
            for _ in range(2)]
    nets = []
    for t in tabs:
        b = NetlistBuilder("c")
        for x in names:
            b.add_input(x)
        b.add_cell(names, "y", t)
        b.add_output("y")
        nets.append(b.build())
    same = all(tt_eval(tabs[0], list(bits)) == tt_eval(tabs[1], list(bits))
               for bits in ([(m >> i) & 1 for i in range(n)] for m in range(1 << n)))
    assert (exhaustive_equiv(*nets).verdict == EQUIVALENT) == same


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 60))
def test_lockstep_never_equivalent_and_replays(seed, cycles):
    a, b = counter3(), inverted_counter()
    for x, y in ((a, a), (a, b)):
        stim = generate_stimulus(x, max(cycles, 2), seed)
        r = lockstep_equiv(x, y, stim)
        assert r.verdict != EQUIVALENT
        if r.verdict == MISMATCH:
            c = r.counterexample.cycle
            ta, tb = run_simulation(x, stim), run_simulation(y, stim)
            assert any(ta.net_trace(o)[c] != tb.net_trace(o)[c] for o in r.counterexample.outputs)


def test_lockstep_replay_through_reference(benchmarks):
    nl = benchmarks["updown_counter"]
    text = emit_blif(nl).replace(".names rst q[3] t[3] q_next[3]", ".names rst q[3] t[3] qq")
    text = text.replace(".latch q_next[3]", ".names qq q_next[3]\n0 1\n.latch q_next[3]")
    bad = parse_blif(text)
    stim = generate_stimulus(nl, 500, 4)
    r = lockstep_equiv(nl, bad, stim)
    assert r.verdict == MISMATCH
    cx = r.counterexample
    rows = {n: list(v) for n, v in cx.trace.items()}
    ra = reference_simulate(nl, rows, cx.cycle)
    rb = reference_simulate(bad, rows, cx.cycle)
    assert any(ra[-1][o] != rb[-1][o] for o in cx.outputs)
