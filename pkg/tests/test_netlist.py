import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from conftest import BUF
from toggleopt.benchgen import GENERATORS, benchmark_text
from toggleopt.netlist import (BlifSyntaxError, NetlistBuilder, NetlistError, area_luts,
                               emit_blif, fanout, parse_blif)
from toggleopt.truthtable import TruthTable

GOLDEN = Path(__file__).parent / "golden"


def isomorphic(a, b) -> bool:
    """Same graph once nets are matched by name, independent of id assignment."""
    if (a.name, a.input_names, a.output_names) != (b.name, b.input_names, b.output_names):
        return False

    def cells(nl):
        return sorted((tuple(nl.net_name(i) for i in c.input_nets), nl.net_name(c.output_net),
                       c.function.to_int()) for c in nl.cells)

    def latches(nl):
        return sorted((nl.net_name(l.data_in), nl.net_name(l.data_out), l.init)
                      for l in nl.latches)

    return cells(a) == cells(b) and latches(a) == latches(b)


class TestParse:
    def test_buffer(self, buf_netlist):
        assert len(buf_netlist.cells) == 1
        assert buf_netlist.cells[0].function == TruthTable.from_int(1, 0b10)
        assert buf_netlist.input_names == ("a",)
        assert buf_netlist.output_names == ("y",)

    def test_and_cover(self):
        nl = parse_blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n")
        assert nl.cells[0].function.minterms() == [3]

    def test_dont_care_rows_expand(self):
        nl = parse_blif(".model m\n.inputs a b c\n.outputs y\n.names a b c y\n1-0 1\n--1 1\n.end")
        f = nl.cells[0].function
        assert f.minterms() == sorted({1, 3, 4, 5, 6, 7})

    def test_offset_cover_is_complemented(self):
        nl = parse_blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n11 0\n.end\n")
        assert nl.cells[0].function.minterms() == [0, 1, 2]

    def test_comments_and_continuations(self):
        text = ("# header\n.model m # trailing\n.inputs a \\\n  b\n.outputs y\n"
                ".names a b y\n11 1\n.end\n")
        nl = parse_blif(text)
        assert nl.input_names == ("a", "b")

    def test_latch_forms(self):
        text = (".model m\n.inputs clk d\n.outputs q r s\n.latch d q re clk 1\n"
                ".latch d r 0\n.latch d s\n.end\n")
        nl = parse_blif(text)
        assert [l.init for l in nl.latches] == [1, 0, None]
        assert nl.latches[0].control == "clk" and nl.latches[0].kind == "re"
        assert nl.clock_names == {"clk"}

    def test_constant_cells(self):
        nl = parse_blif(".model m\n.outputs one zero\n.names one\n1\n.names zero\n.end\n")
        assert [c.function.to_int() for c in nl.cells] == [1, 0]
        assert area_luts(nl) == 0

    def test_multiple_drivers(self):
        text = ".model m\n.inputs a b\n.outputs y\n.names a y\n1 1\n.names b y\n1 1\n.end\n"
        with pytest.raises(NetlistError, match="multiple drivers"):
            parse_blif(text)

    def test_input_driven_by_cell(self):
        with pytest.raises(NetlistError, match="multiple drivers"):
            parse_blif(".model m\n.inputs a\n.outputs a\n.names a\n1\n.end\n")

    def test_combinational_cycle(self):
        text = (".model m\n.inputs a\n.outputs y\n.names a z y\n11 1\n.names y z\n1 1\n.end\n")
        with pytest.raises(NetlistError, match="cycle"):
            parse_blif(text)

    def test_cycle_through_latch_is_fine(self):
        text = ".model m\n.outputs q\n.names q d\n0 1\n.latch d q 0\n.end\n"
        assert len(parse_blif(text).latches) == 1

    def test_undriven_net(self):
        with pytest.raises(NetlistError, match="no driver"):
            parse_blif(".model m\n.outputs y\n.names a y\n1 1\n.end\n")

    def test_arity_limit(self):
        ins = " ".join(f"i{k}" for k in range(17))
        with pytest.raises(BlifSyntaxError, match="arity"):
            parse_blif(f".model m\n.inputs {ins}\n.outputs y\n.names {ins} y\n.end\n")

    @pytest.mark.parametrize("text,line,col", [
        (".model m\n.inputs a\n.outputs y\n.names a y\n2 1\n.end\n", 5, 1),
        (".model m\n.inputs a\n.outputs y\n.names a y\n1 x\n.end\n", 5, 3),
        (".model m\n.inputs a\n.outputs y\n.subckt foo a=a\n.end\n", 4, 1),
        (".model m\n.inputs a\n11 1\n.end\n", 3, 1),
        (".model m\n.inputs a\n.outputs y\n.names a y\n1 1\n0 0\n.end\n", 6, 3),
        (".model m\n.end\n.model n\n", 3, 1),
    ])
    def test_syntax_errors_report_position(self, text, line, col):
        with pytest.raises(BlifSyntaxError) as info:
            parse_blif(text)
        assert (info.value.line, info.value.column) == (line, col)

    def test_second_model_rejected(self):
        with pytest.raises(BlifSyntaxError, match="multiple .model"):
            parse_blif(".model a\n.model b\n.end\n")


class TestEmit:
    def test_buffer_round_trip(self, buf_netlist):
        assert isomorphic(parse_blif(emit_blif(buf_netlist)), buf_netlist)
        assert emit_blif(buf_netlist) == BUF

    def test_constant_one(self):
        b = NetlistBuilder("c")
        b.add_cell([], "y", TruthTable.constant(1))
        b.add_output("y")
        assert ".names y\n1\n" in emit_blif(b.build())

    def test_rows_ascending_on_set(self):
        nl = parse_blif(".model m\n.inputs a b\n.outputs y\n.names a b y\n-1 1\n1- 1\n.end\n")
        assert emit_blif(nl).splitlines()[4:7] == ["10 1", "01 1", "11 1"]

    def test_counter_round_trip(self, benchmarks):
        nl = GENERATORS["counter3"]()
        again = parse_blif(emit_blif(nl))
        assert isomorphic(again, nl)
        assert len(again.latches) == 3 and len(again.cells) == len(nl.cells)

    @pytest.mark.parametrize("name", sorted(GENERATORS))
    def test_fixpoint(self, name):
        once = emit_blif(parse_blif(benchmark_text(name)))
        assert emit_blif(parse_blif(once)) == once

    def test_fixpoint_normalizes_dialect(self):
        text = ("# c\n.model m\n.inputs a b c\n.outputs y q\n.names a b c y\n1-- 1\n"
                ".latch y q re c 2\n.end\n")
        once = emit_blif(parse_blif(text))
        assert emit_blif(parse_blif(once)) == once


class TestMetrics:
    def test_area_buffer(self, buf_netlist):
        assert area_luts(buf_netlist) == 1

    def test_area_excludes_constants(self):
        text = (".model m\n.inputs a\n.outputs y z k\n.names a y\n1 1\n.names a z\n0 1\n"
                ".names k\n1\n.end\n")
        assert area_luts(parse_blif(text)) == 2

    def test_area_golden(self, benchmarks):
        golden = json.loads((GOLDEN / "area_luts.json").read_text())
        assert {n: area_luts(nl) for n, nl in benchmarks.items()} == golden

    def test_area_invariant_under_renaming(self, benchmarks):
        nl = benchmarks["alu8"]
        text = emit_blif(nl)
        for name in sorted(nl.net_names, key=len, reverse=True):
            text = text.replace(name, "n_" + name.replace("[", "_").replace("]", "_"))
        assert area_luts(parse_blif(text)) == area_luts(nl)

    def test_fanout_output_only(self, buf_netlist):
        assert fanout(buf_netlist, "y") == 1

    def test_fanout_cells_and_output(self):
        text = (".model m\n.inputs a\n.outputs n\n.names a n\n1 1\n.names n x\n1 1\n"
                ".names n y\n0 1\n.names n x z\n11 1\n.names a d\n1 1\n.end\n")
        nl = parse_blif(text)
        assert fanout(nl, "n") == 4
        assert fanout(nl, "d") == 0

    def test_fanout_counts_a_cell_once(self):
        nl = parse_blif(".model m\n.inputs a\n.outputs y\n.names a a y\n11 1\n.end\n")
        assert fanout(nl, "a") == 1

    def test_fanout_unknown_net(self, buf_netlist):
        with pytest.raises(NetlistError):
            fanout(buf_netlist, "nope")


def test_bundled_files_match_generators():
    for name, gen in GENERATORS.items():
        assert benchmark_text(name) == emit_blif(gen()), name


@st.composite
def random_netlists(draw):
    n_in = draw(st.integers(1, 4))
    b = NetlistBuilder("rand")
    avail = [b.add_input(f"i{k}") and f"i{k}" for k in range(n_in)]
    avail = [f"i{k}" for k in range(n_in)]
    for k in range(draw(st.integers(1, 6))):
        ins = draw(st.lists(st.sampled_from(avail), min_size=0, max_size=3))
        t = TruthTable.from_int(len(ins), draw(st.integers(0, (1 << (1 << len(ins))) - 1)))
        b.add_cell(ins, f"n{k}", t)
        avail.append(f"n{k}")
    for name in draw(st.lists(st.sampled_from(avail[n_in:]), min_size=1, unique=True)):
        b.add_output(name)
    return b.build()


@settings(max_examples=60, deadline=None)
@given(random_netlists())
def test_round_trip_property(nl):
    text = emit_blif(nl)
    again = parse_blif(text)
    assert isomorphic(again, nl)
    assert emit_blif(again) == text
