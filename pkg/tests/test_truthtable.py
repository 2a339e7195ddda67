import random

import pytest
from hypothesis import given, strategies as st

from reference import assignments, brute_cofactor, table_bits
from toggleopt.truthtable import (Cut, TruthTable, TruthTableError, concat_cofactors,
                                  find_split_var, move_to_msb, n_words_for, permute,
                                  shannon_cofactor, truth_table_decompose, tt_eval)

AND2 = TruthTable.from_int(2, 0b1000)
XOR2 = TruthTable.from_int(2, 0b0110)
XNOR2 = TruthTable.from_int(2, 0b1001)
XOR3 = TruthTable.from_hex(3, "96")
MAJ3 = TruthTable.from_hex(3, "E8")


@st.composite
def tables(draw, min_vars=1, max_vars=8, word_width=None):
    n = draw(st.integers(min_vars, max_vars))
    ww = word_width or draw(st.sampled_from([8, 16, 32, 64]))
    value = draw(st.integers(0, (1 << (1 << n)) - 1))
    return TruthTable.from_int(n, value, ww)


class TestRepresentation:
    @pytest.mark.parametrize("n,ww,expected", [
        (0, 64, 1), (3, 64, 1), (6, 64, 1), (7, 64, 2), (10, 64, 16),
        (10, 8, 128), (16, 64, 1024), (2, 8, 1),
    ])
    def test_n_words(self, n, ww, expected):
        assert n_words_for(n, ww) == expected
        assert len(TruthTable.constant(0, n, ww).words) == expected

    def test_padding_must_be_zero(self):
        with pytest.raises(TruthTableError):
            TruthTable(2, (0x10,))

    @pytest.mark.parametrize("ww", [4, 12, 48])
    def test_word_width_must_be_power_of_two(self, ww):
        with pytest.raises(TruthTableError):
            TruthTable.from_int(2, 1, ww)

    def test_hex_is_msb_first(self):
        assert MAJ3.minterms() == [3, 5, 6, 7]
        assert MAJ3.to_hex() == "E8"
        assert TruthTable.from_hex(4, "8000").minterms() == [15]

    def test_multiword_round_trip(self):
        t = TruthTable.from_int(8, (1 << 255) | (1 << 64) | 5, 16)
        assert len(t.words) == 16
        assert t.minterms() == [0, 2, 64, 255]
        assert TruthTable.from_hex(8, t.to_hex(), 16) == t


class TestEval:
    def test_and2(self):
        assert tt_eval(AND2, (1, 1)) == 1
        assert tt_eval(AND2, (1, 0)) == 0

    def test_xor3_even_parity(self):
        assert tt_eval(XOR3, (1, 1, 0)) == 0

    def test_length_mismatch(self):
        with pytest.raises(TruthTableError):
            tt_eval(AND2, (1,))


class TestCofactor:
    def test_and2_cofactors(self):
        assert shannon_cofactor(AND2, 1, 1) == TruthTable.from_int(1, 0b10)
        assert shannon_cofactor(AND2, 1, 0) == TruthTable.from_int(1, 0b00)

    def test_maj3_on_msb(self):
        # brute-force enumeration of the 8 minterms gives OR(x0, x1)
        expected = brute_cofactor(table_bits(MAJ3), 3, 2, 1)
        assert expected == [0, 1, 1, 1]
        assert shannon_cofactor(MAJ3, 2, 1).to_int() == 0b1110

    @pytest.mark.parametrize("p", [-1, 2])
    def test_position_out_of_range(self, p):
        with pytest.raises(TruthTableError):
            shannon_cofactor(AND2, p, 0)

    def test_zero_vars(self):
        with pytest.raises(TruthTableError):
            shannon_cofactor(TruthTable.constant(1), 0, 0)

    @given(tables(), st.data())
    def test_matches_brute_force(self, t, data):
        p = data.draw(st.integers(0, t.num_vars - 1))
        v = data.draw(st.sampled_from([0, 1]))
        c = shannon_cofactor(t, p, v)
        assert table_bits(c) == brute_cofactor(table_bits(t), t.num_vars, p, v)
        assert c.word_width == t.word_width

    @given(tables(), st.data())
    def test_popcount_partition(self, t, data):
        p = data.draw(st.integers(0, t.num_vars - 1))
        assert t.popcount() == (shannon_cofactor(t, p, 0).popcount()
                                + shannon_cofactor(t, p, 1).popcount())

    @given(tables(max_vars=7), st.data())
    def test_independent_variable_has_equal_cofactors(self, t, data):
        p = data.draw(st.integers(0, t.num_vars))
        # widen t by a fresh variable at position p that it ignores
        g = TruthTable.from_function(t.num_vars + 1,
                                     lambda *x: tt_eval(t, x[:p] + x[p + 1:]), t.word_width)
        assert shannon_cofactor(g, p, 0) == shannon_cofactor(g, p, 1) == t

    @given(tables(min_vars=1, max_vars=10))
    def test_padding_stays_zero(self, t):
        for p in range(t.num_vars):
            for v in (0, 1):
                c = shannon_cofactor(t, p, v)
                size = 1 << c.num_vars
                if size < c.word_width:
                    assert c.words[0] >> size == 0


class TestConcat:
    def test_rebuilds_and2(self):
        assert concat_cofactors(TruthTable.from_int(1, 0b10),
                                TruthTable.from_int(1, 0b00)) == AND2

    def test_equal_halves_ignore_new_variable(self):
        f = TruthTable.from_int(2, 0b0110)
        g = concat_cofactors(f, f)
        assert g.to_int() == 0b01100110
        assert not g.depends_on(2)

    def test_xnor_xor_gives_xor3(self):
        g = concat_cofactors(XNOR2, XOR2)
        for a in assignments(3):
            assert tt_eval(g, a) == (sum(a) & 1)
        assert g == XOR3

    def test_size_mismatch(self):
        with pytest.raises(TruthTableError):
            concat_cofactors(AND2, TruthTable.from_int(1, 1))

    def test_multiword_block_copy(self):
        t1 = TruthTable.from_int(7, 1 << 127, 64)
        t0 = TruthTable.from_int(7, 1, 64)
        g = concat_cofactors(t1, t0)
        assert g.words == t0.words + t1.words
        assert g.minterms() == [0, 255]

    @given(tables(max_vars=9), st.data())
    def test_recombination_identity(self, t, data):
        p = data.draw(st.integers(0, t.num_vars - 1))
        g = concat_cofactors(shannon_cofactor(t, p, 1), shannon_cofactor(t, p, 0))
        assert g == move_to_msb(t, p)


class TestPermute:
    def test_rejects_non_permutation(self):
        with pytest.raises(TruthTableError):
            permute(AND2, [0, 0])

    def test_swap(self):
        t = TruthTable.from_function(2, lambda a, b: a & (1 - b))
        s = permute(t, [1, 0])
        for a, b in assignments(2):
            assert tt_eval(s, (a, b)) == tt_eval(t, (b, a))


class TestSplitVar:
    def test_first_non_shared(self):
        assert find_split_var(Cut((5, 7), (2, 5, 7)), "right") == 2

    def test_full_overlap(self):
        assert find_split_var(Cut((5, 7), (5, 7)), "right") is None

    def test_left_side(self):
        assert find_split_var(Cut((4, 9), (9,)), "left") == 4

    def test_repeated_index_rejected(self):
        with pytest.raises(TruthTableError):
            Cut((1, 1), (2,))


def _check_binding(t_in, t_out, trace):
    support = sorted(trace.binding_in)
    for a in assignments(len(support)):
        glob = dict(zip(support, a))
        x_in = [glob[v] for v in trace.binding_in]
        x_out = [glob[v] for v in trace.binding_out]
        assert tt_eval(t_out, x_out) == tt_eval(t_in, x_in)


class TestDecompose:
    def test_guard_rejects_quiet_nets(self):
        out, trace = truth_table_decompose(XOR3, Cut((1, 2), (0, 1, 2)), 2, 5)
        assert out == XOR3 and trace.steps == ()

    def test_guard_is_strict(self):
        _, trace = truth_table_decompose(XOR3, Cut((1, 2), (0, 1, 2)), 5, 5)
        assert trace.steps == ()

    def test_xor3(self):
        out, trace = truth_table_decompose(XOR3, Cut((1, 2), (0, 1, 2)), 9, 5)
        assert len(trace.steps) == 1
        step = trace.steps[0]
        assert (step.side, step.var, step.position) == ("right", 0, 0)
        assert step.t1.to_int() == 0b1001
        assert step.t0.to_int() == 0b0110
        assert out.to_int() == 0x96
        assert trace.binding_out == (1, 2, 0)
        _check_binding(XOR3, out, trace)

    def test_fully_shared_cut(self):
        out, trace = truth_table_decompose(MAJ3, Cut((0, 1, 2), (0, 1, 2)), 9, 5)
        assert out == MAJ3 and trace.steps == ()

    def test_both_sides_split(self):
        t = TruthTable.from_function(4, lambda a, b, c, d: (a & b) | (c ^ d))
        cut = Cut(left_vars=(11, 13), right_vars=(10, 11, 12))
        assert cut.support() == (10, 11, 12, 13)
        out, trace = truth_table_decompose(t, cut, 3, 1)
        assert [s.var for s in trace.steps] == [10, 13]
        assert trace.binding_out == (11, 12, 10, 13)
        _check_binding(t, out, trace)

    def test_arity_must_match_cut(self):
        with pytest.raises(TruthTableError):
            truth_table_decompose(AND2, Cut((0,), (0, 1, 2)), 3, 1)

    def test_random_tables_preserve_function(self):
        rng = random.Random(20261018)
        for _ in range(200):
            n = rng.randint(2, 8)
            support = rng.sample(range(40), n)
            r = rng.randint(1, n)
            right = support[:r]
            left_only = support[r:]
            shared = rng.sample(right, rng.randint(0, r))
            left = shared + left_only
            rng.shuffle(left)
            cut = Cut(tuple(left), tuple(right))
            t = TruthTable.from_int(n, rng.getrandbits(1 << n), rng.choice([8, 64]))
            t = permute(t, list(range(n)))
            out, trace = truth_table_decompose(t, cut, 1, 0)
            _check_binding(t, out, trace)
