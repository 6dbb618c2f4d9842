"""End-to-end exit criteria. Run with ``pytest tests/test_acceptance.py`` for the summary lines."""

import math
import random
import time

import pytest

from qlut.errband import bound, derivative_blowup, estimate_lipschitz, validate
from qlut.exceptions import ParseError
from qlut.fxp import Domain, FxFormat, Tolerances, input_format
from qlut.funcspec import evaluate, parse
from qlut.resx import count_row_depth, estimate_artifact
from qlut.sim import codes_from_slices, run_basis, simulate_codes, truth_table
from qlut.synth import Table, apply_function_with_lookup, build_lookup, build_subtract_const, make_clean
from qlut.cli import RunConfig, sweep_rows


def acceptance(number, title):
    return pytest.mark.acceptance(number, title)


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def read(state, wires):
    return sum(state[w] << i for i, w in enumerate(wires))


@acceptance(1, "toy table: 000 -> 10 and 100 -> 01 in bank 0")
def test_criterion_1_toy_table():
    with Timer(1.0):
        entries = [0] * 8
        entries[0b000], entries[0b100] = 0b10, 0b01
        art = build_lookup(Table.from_codes(entries, 3, 2), 1)
        for inp, want in ((0b000, 0b10), (0b100, 0b01)):
            state = [0] * art.circuit.width
            for i, w in enumerate(art.layout.input_wires):
                state[w] = (inp >> i) & 1
            assert read(run_basis(art.circuit, state), art.layout.bank(0)) == want


@acceptance(2, "row depth 2^(n-l)+l and bank wires m*2^l for n<=10, l<=n, m<=8")
def test_criterion_2_structure():
    rng = random.Random(2)
    with Timer(30.0):
        for n in range(1, 11):
            for l in range(n + 1):
                for m in range(1, 9):
                    # nonzero entries keep every select row present in the gate list
                    entries = [rng.randrange(1, 1 << m) for _ in range(1 << n)]
                    art = build_lookup(Table.from_codes(entries, n, m), l)
                    assert count_row_depth(art.circuit) == 2 ** (n - l) + l, (n, l, m)
                    assert estimate_artifact(art).row_depth == 2 ** (n - l) + l
                    assert len(art.circuit.wires_with_role("bank")) == m * 2**l


@acceptance(3, "200 random tables: raw and clean truth tables match, clean wires zero, input restored")
def test_criterion_3_oracle_equivalence():
    rng = random.Random(3)
    with Timer(120.0):
        for _ in range(200):
            n = rng.randint(1, 12)
            m = rng.randint(1, 8)
            l = rng.randint(0, min(n, 4))
            offset = rng.randrange(1 << n) if rng.random() < 0.7 else 0
            entries = [rng.randrange(1 << m) for _ in range(1 << n)]
            raw = build_lookup(Table.from_codes(entries, n, m), l, offset_code=offset)
            clean = make_clean(raw)
            codes = list(range(1 << n))
            expected = [entries[(x - offset) % (1 << n)] for x in codes]
            for art in (raw, clean):
                lay = art.layout
                final = simulate_codes(art.circuit, lay.input_wires, codes)
                got = codes_from_slices([final[w] for w in lay.output_wires], len(codes))
                assert got == expected
                assert codes_from_slices([final[w] for w in lay.input_wires], len(codes)) == codes
                assert all(final[w] == 0 for w in lay.ancilla_wires)
                if art.clean:
                    assert all(final[w] == 0 for w in lay.bank_wires)


@acceptance(4, "constant subtractor is (x - c) mod 2^n for n<=10, 50 constants each")
def test_criterion_4_subtractor():
    rng = random.Random(4)
    with Timer(60.0):
        for n in range(1, 11):
            fmt = FxFormat(n, n)
            for _ in range(50):
                c = rng.randrange(1 << n)
                circ = build_subtract_const(fmt, c)
                xs = list(range(n))
                assert truth_table(circ, xs, xs) == [(x - c) % (1 << n) for x in range(1 << n)]
                if n > 1:
                    assert set(truth_table(circ, xs, list(range(n, 2 * n - 1)))) == {0}


@acceptance(5, "error bound eps_out + L*eps_in holds on grid plus 10^4 off-grid samples")
@pytest.mark.parametrize(
    "text,lo,hi,eps_in,eps_out,analytic_L",
    [("exp(-x)", 0, 10, 2**-3, 1e-7, 1.0), ("exp(-x^2)", 0, 4, 2**-6, 1e-5, None)],
)
def test_criterion_5_error_bound(text, lo, hi, eps_in, eps_out, analytic_L):
    with Timer(30.0):
        f, dom, tol = parse(text), Domain(lo, hi), Tolerances(eps_in, eps_out)
        L = analytic_L if analytic_L is not None else estimate_lipschitz(f, dom)
        art = apply_function_with_lookup(f, dom, tol, 0)
        eb = bound(L, tol)
        v = validate(art, f, eb, 10_000, seed=5, include_grid=True)
        assert v.samples == 10_000 + 2**art.layout.n
        assert v.empirical_max <= eb.total
        if analytic_L == 1.0:
            assert v.empirical_max <= 0.1250001


@acceptance(6, "e^-x resource rows within factor 4 (T-count) and 2 (qubits) of published figures")
@pytest.mark.parametrize("eps_in,eps_out,ref_t,ref_q", [(2**-3, 1e-7, 1176, 36), (2**-4, 1e-9, 2310, 45)])
def test_criterion_6_published_rows(eps_in, eps_out, ref_t, ref_q):
    with Timer(10.0):
        art = apply_function_with_lookup(parse("exp(-x)"), Domain(0, 10), Tolerances(eps_in, eps_out), 0)
        r = estimate_artifact(art)
        print(f"\n  e^-x (0,10) eps=({eps_in}, {eps_out}): t_count {r.t_count} vs {ref_t}, qubits {r.qubits_total} vs {ref_q}")
        assert ref_t / 4 <= r.t_count <= ref_t * 4
        assert ref_q / 2 <= r.qubits_total <= ref_q * 2


@acceptance(7, "swap-qubit sweep: row depth minimum, qubit growth, t_count(1) <= t_count(0)")
def test_criterion_7_sweep_shape():
    with Timer(30.0):
        cfg = RunConfig("exp(-x^2)", 0.0, 4.0, 2.0**-6, 1e-5)
        sweep = sweep_rows(cfg)
        n = len(sweep) - 1
        assert n == input_format(Domain(0, 4), 2.0**-6).total_bits
        depth = [r["row_depth"] for r in sweep]
        assert depth == [2 ** (n - l) + l for l in range(n + 1)]
        best = min(range(n + 1), key=lambda l: (depth[l], l))
        formula_best = min(range(n + 1), key=lambda l: (2 ** (n - l) + l, l))
        assert best == formula_best and best > 0
        qubits = [r["qubits_total"] for r in sweep]
        assert all(a < b for a, b in zip(qubits, qubits[1:]))
        assert sweep[1]["t_count"] <= sweep[0]["t_count"]


@acceptance(7, "swap-qubit sweep: row depth minimum, qubit growth, t_count(1) <= t_count(0)")
@pytest.mark.parametrize("text,lo,hi", [("sin(x)", 0, 3), ("exp(-x)", 0, 8), ("x^3 - x", -2, 2)])
def test_criterion_7_sweep_shape_other_instances(text, lo, hi):
    with Timer(30.0):
        sweep = sweep_rows(RunConfig(text, float(lo), float(hi), 2.0**-5, 1e-4))
        n = len(sweep) - 1
        assert n >= 6
        qubits = [r["qubits_total"] for r in sweep]
        assert all(a < b for a, b in zip(qubits, qubits[1:]))
        assert sweep[1]["t_count"] <= sweep[0]["t_count"]


# expected values are hand-derived; None marks a parse error at the given offset
PARSER_FIXTURES = [
    ("1+2*3", None, 7.0),
    ("2^3^2", None, 512.0),
    ("-x^2", 2.0, -4.0),
    ("(-x)^2", 2.0, 4.0),
    ("2**3", None, 8.0),
    ("8/4/2", None, 1.0),
    ("8-4-2", None, 2.0),
    ("2*3+4*5", None, 26.0),
    ("(1+2)*3", None, 9.0),
    ("--x", 3.0, 3.0),
    ("2^-1", None, 0.5),
    ("-2^-2", None, -0.25),
    ("exp(-x)", 0.0, 1.0),
    ("sqrt(x)", 4.0, 2.0),
    ("exp(-x^2)", 1.0, 0.36787944117144233),
    ("abs(x - 5)", 2.0, 3.0),
    ("ln(e)", None, 1.0),
    ("log(1)", None, 0.0),
    ("cos(pi)", None, -1.0),
    ("3x", 1.0, ("error", 1)),
    ("2*+", None, ("error", 2)),
    ("x +", 1.0, ("error", 3)),
    ("(x", 1.0, ("error", 2)),
    ("x)", 1.0, ("error", 1)),
    ("foo(x)", 1.0, ("error", 0)),
    ("y", 1.0, ("error", 0)),
    ("exp x", 1.0, ("error", 4)),
    ("", None, ("error", 0)),
    ("2 $ 3", None, ("error", 2)),
    ("1 + * 2", None, ("error", 4)),
]


@acceptance(8, "30 parser fixtures evaluate or fail as expected")
@pytest.mark.parametrize("text,x,want", PARSER_FIXTURES, ids=[repr(t) for t, _, _ in PARSER_FIXTURES])
def test_criterion_8_parser(text, x, want):
    with Timer(1.0):
        if isinstance(want, tuple):
            with pytest.raises(ParseError) as err:
                parse(text)
            assert err.value.offset == want[1]
        else:
            assert evaluate(parse(text), 0.0 if x is None else x) == pytest.approx(want, rel=1e-15, abs=1e-15)


def test_parser_fixture_count():
    assert len(PARSER_FIXTURES) == 30


@acceptance(9, "Lipschitz estimates within [0.99, 1.06] of sup|f'|; sqrt at 0 flagged")
@pytest.mark.parametrize(
    "text,lo,hi,sup",
    [("exp(-x)", 0, 10, 1.0), ("3*x", -1, 1, 3.0), ("sin(x)", 0, 2 * math.pi, 1.0), ("5", -1, 1, 0.0)],
)
def test_criterion_9_lipschitz(text, lo, hi, sup):
    with Timer(5.0):
        L = estimate_lipschitz(parse(text), Domain(lo, hi))
        assert 0.99 * sup <= L <= 1.06 * sup


@acceptance(9, "Lipschitz estimates within [0.99, 1.06] of sup|f'|; sqrt at 0 flagged")
def test_criterion_9_sqrt_flagged():
    with Timer(5.0):
        f, dom, tol = parse("sqrt(x)"), Domain(0, 4), Tolerances(2**-5, 2**-5)
        art = apply_function_with_lookup(f, dom, tol, 0)
        v = validate(art, f, bound(estimate_lipschitz(f, dom), tol), 10_000, seed=9)
        assert v.lipschitz_risk
        assert derivative_blowup(f, dom)
