import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlut.exceptions import CircuitError, FormatRangeError
from qlut.fxp import Domain, FxFormat, Tolerances, decode, encode, grid, input_format
from qlut.funcspec import evaluate, parse
from qlut.qir import CSWAP, MCX, Control
from qlut.resx import rows
from qlut.sim import run_basis, truth_table
from qlut.synth import (
    Layout,
    Table,
    apply_function_with_lookup,
    build_lookup,
    build_select,
    build_subtract_const,
    build_swap_network,
    compute_table,
    make_clean,
)


def toy_table():
    entries = [0] * 8
    entries[0], entries[4] = 0b10, 0b01
    return Table.from_codes(entries, 3, 2)


def read(state, wires):
    return sum(state[w] << i for i, w in enumerate(wires))


def run_code(circuit, layout, code):
    state = [0] * circuit.width
    for i, w in enumerate(layout.input_wires):
        state[w] = (code >> i) & 1
    return run_basis(circuit, state)


class TestTable:
    def test_entry_too_wide(self):
        with pytest.raises(ValueError):
            Table.from_codes([0, 4], 1, 2)

    def test_length_must_match(self):
        with pytest.raises(ValueError):
            Table.from_codes([0, 1, 2], 2, 2)


class TestSelect:
    def test_toy_first_row(self):
        layout = Layout(3, 2, 1)
        c = build_select(toy_table(), 1, layout)
        (first,) = [r for r in rows(c) if isinstance(r, tuple)][:1]
        controls, targets = first
        assert controls == (Control(0, False), Control(1, False))
        bank0, bank1 = layout.bank(0), layout.bank(1)
        # bank0 <- 10 (bit 1), bank1 <- 01 (bit 0)
        assert targets == [bank0[1], bank1[0]]

    def test_all_zero_table_is_empty(self):
        c = build_select(Table.from_codes([0] * 16, 4, 3), 2)
        assert c.gates == ()

    def test_n2_table(self):
        c = build_select(Table.from_codes([0b01, 0b10, 0b11, 0b00], 2, 2), 0)
        assert sum(1 for r in rows(c) if isinstance(r, tuple)) == 3  # the zero row is dropped
        assert truth_table(c, [0, 1], [2, 3]) == [0b01, 0b10, 0b11, 0b00]

    def test_layout_mismatch(self):
        with pytest.raises(CircuitError):
            build_select(toy_table(), 1, Layout(3, 3, 1))
        with pytest.raises(CircuitError):
            build_select(toy_table(), 1, Layout(3, 2, 2))

    @settings(max_examples=60, deadline=None)
    @given(data=st.data(), n=st.integers(1, 6), m=st.integers(1, 4))
    def test_row_count_and_banks(self, data, n, m):
        l = data.draw(st.integers(0, n))
        entries = data.draw(st.lists(st.integers(1, (1 << m) - 1), min_size=1 << n, max_size=1 << n))
        layout = Layout(n, m, l)
        c = build_select(Table.from_codes(entries, n, m), l, layout)
        # every entry nonzero, so every row survives; a row with no low bits has no controls
        assert len({g.controls for g in c.gates}) == 1 << (n - l)
        for b in range(1 << (n - l)):
            state = run_code(c, layout, b)
            for j in range(1 << l):
                assert read(state, layout.bank(j)) == entries[(j << (n - l)) | b]


class TestSwapNetwork:
    def test_l0_empty(self):
        assert build_swap_network(0, Layout(3, 2, 0)).gates == ()

    def test_l1_m2(self):
        layout = Layout(3, 2, 1)
        c = build_swap_network(1, layout)
        assert c.gates == (
            CSWAP(Control(2), layout.bank(0)[0], layout.bank(1)[0]),
            CSWAP(Control(2), layout.bank(0)[1], layout.bank(1)[1]),
        )

    def test_l2_m1(self):
        layout = Layout(2, 1, 2)
        c = build_swap_network(2, layout)
        b = [layout.bank(j)[0] for j in range(4)]
        assert c.gates == (
            CSWAP(Control(0), b[0], b[1]),
            CSWAP(Control(0), b[2], b[3]),
            CSWAP(Control(1), b[0], b[2]),
        )
        for s in range(4):
            state = [(s >> 0) & 1, (s >> 1) & 1] + [1 if j == s else 0 for j in range(4)]
            assert run_basis(c, state)[b[0]] == 1

    @pytest.mark.parametrize("l", range(5))
    def test_routes_selected_bank(self, l):
        m = 3
        layout = Layout(l, m, l) if l else Layout(1, m, 0)
        c = build_swap_network(l, layout)
        for s in range(1 << l):
            state = [0] * layout.width
            for i, w in enumerate(layout.swap_wires):
                state[w] = (s >> i) & 1
            for j in range(layout.banks):
                for i, w in enumerate(layout.bank(j)):
                    state[w] = ((j * 5 + 1) >> i) & 1
            out = run_basis(c, state)
            assert read(out, layout.bank(0)) == (s * 5 + 1) % (1 << m)


class TestSubtractConst:
    def test_zero_is_empty(self):
        assert build_subtract_const(FxFormat(5, 5), 0).gates == ()

    def test_n3_c1(self):
        c = build_subtract_const(FxFormat(3, 3), 1)
        assert truth_table(c, [0, 1, 2], [0, 1, 2])[0] == 7

    @pytest.mark.parametrize("c", range(16))
    def test_n4_exhaustive(self, c):
        circ = build_subtract_const(FxFormat(4, 4), c)
        assert truth_table(circ, [0, 1, 2, 3], [0, 1, 2, 3]) == [(x - c) % 16 for x in range(16)]
        carries = list(range(4, 7))
        assert set(truth_table(circ, [0, 1, 2, 3], carries)) == {0}

    def test_signed_constant(self):
        fmt = FxFormat(4, 1, True)  # ulp 1/4
        circ = build_subtract_const(fmt, -0.5)
        k = encode(-0.5, fmt)
        assert truth_table(circ, [0, 1, 2, 3], [0, 1, 2, 3]) == [(x - k) % 16 for x in range(16)]

    def test_unrepresentable(self):
        with pytest.raises(FormatRangeError):
            build_subtract_const(FxFormat(3, 3), 9)


class TestApplyFunction:
    def test_exp_neg_layout(self, exp_neg_instance):
        art = apply_function_with_lookup(*exp_neg_instance, 0)
        t = art.table
        assert (t.in_fmt.total_bits, t.in_fmt.integer_bits, t.out_fmt.total_bits, t.out_fmt.integer_bits) == (7, 4, 25, 1)
        assert art.offset_code == 0 and art.layout.carries == 0

    def test_accuracy_on_grid(self, exp_neg_instance):
        f, dom, tol = exp_neg_instance
        t = compute_table(f, dom, tol)
        for x, e in zip(grid(dom, t.in_fmt), t.entries):
            assert abs(decode(e, t.out_fmt) - evaluate(f, x)) <= tol.eps_out

    def test_constant_function(self):
        art = apply_function_with_lookup(parse("1"), Domain(-3, 5), Tolerances(0.5, 0.01), 2)
        outs = truth_table(art.circuit, art.layout.input_wires, art.layout.output_wires)
        assert len(set(outs)) == 1

    def test_toy_direct_table(self):
        art = build_lookup(toy_table(), 1)
        assert read(run_code(art.circuit, art.layout, 0b000), art.layout.bank(0)) == 0b10
        assert read(run_code(art.circuit, art.layout, 0b100), art.layout.bank(0)) == 0b01

    def test_l_out_of_range(self, exp_neg_instance):
        with pytest.raises(ValueError):
            apply_function_with_lookup(*exp_neg_instance, 8)

    def test_offset_domain_functional(self):
        # x_min = 1.5 is not code 0, so a subtraction precedes the lookup
        f, dom, tol = parse("x*x - 3"), Domain(1.5, 4.0), Tolerances(0.25, 2.0**-6)
        for restore in (True, False):
            art = apply_function_with_lookup(f, dom, tol, 1, restore=restore)
            n = art.layout.n
            assert art.offset_code == encode(1.5, art.table.in_fmt) != 0
            for code in range(1 << n):
                s = run_code(art.circuit, art.layout, code)
                idx = (code - art.offset_code) % (1 << n)
                assert read(s, art.layout.bank(0)) == art.table.entries[idx]
                assert read(s, art.layout.input_wires) == (code if restore else idx)
                assert read(s, art.layout.ancilla_wires) == 0


class TestMakeClean:
    def test_toy_input_100(self):
        art = make_clean(build_lookup(toy_table(), 1))
        s = run_code(art.circuit, art.layout, 0b100)
        assert read(s, art.layout.result_wires) == 0b01
        assert read(s, art.layout.bank_wires) == 0

    def test_empty_table(self):
        art = make_clean(build_lookup(Table.from_codes([0] * 8, 3, 2), 1))
        for code in range(8):
            s = run_code(art.circuit, art.layout, code)
            assert read(s, art.layout.result_wires) == 0
            assert read(s, art.layout.bank_wires) == 0

    def test_random_n5(self):
        rng = random.Random(5)
        entries = [rng.randrange(16) for _ in range(32)]
        art = make_clean(build_lookup(Table.from_codes(entries, 5, 4), 2, offset_code=11))
        for code in range(32):
            s = run_code(art.circuit, art.layout, code)
            assert read(s, art.layout.result_wires) == entries[(code - 11) % 32]
            assert read(s, art.layout.bank_wires) == 0
            assert read(s, art.layout.ancilla_wires) == 0
            assert read(s, art.layout.input_wires) == code

    def test_twice_rejected(self):
        art = make_clean(build_lookup(toy_table(), 1))
        with pytest.raises(ValueError):
            make_clean(art)

    def test_registers(self):
        art = make_clean(build_lookup(toy_table(), 1))
        assert art.circuit.register("result").size == 2
        assert art.clean
