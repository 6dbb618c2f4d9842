"""SelectSwap lookup-table synthesis.

Wire layout of a lookup artifact (little-endian within every register)::

    [0, n)                      input register x
    [n + j*m, n + (j+1)*m)      output bank j, j = 0 .. 2**l - 1
    next n - 1 wires            carry ancillas (only when x_min encodes to a non-zero code)
    next m wires                result register (clean variant only)

The low ``n - l`` input wires drive the select rows, the top ``l`` wires
drive the swap layers, and bank 0 ends up holding the looked-up entry.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .exceptions import CircuitError, FormatRangeError
from .fxp import Domain, FxFormat, Tolerances, encode, encode_many, grid, input_format, output_format
from .funcspec import Expr, as_expr, evaluate_many
from .qir import CSWAP, MCX, Circuit, CircuitBuilder, Control, Gate, Register, X, compose, reverse


@dataclass(frozen=True)
class Table:
    entries: tuple[int, ...]
    in_fmt: FxFormat
    out_fmt: FxFormat

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) != self.in_fmt.size:
            raise ValueError(
                f"table has {len(self.entries)} entries, input format needs {self.in_fmt.size}"
            )
        for e in self.entries:
            if not 0 <= e < self.out_fmt.size:
                raise ValueError(f"entry {e} does not fit in {self.out_fmt.total_bits} bits")

    @property
    def n(self) -> int:
        return self.in_fmt.total_bits

    @property
    def m(self) -> int:
        return self.out_fmt.total_bits

    @classmethod
    def from_codes(cls, entries: Sequence[int], n: int, m: int) -> "Table":
        """Integer-valued table, handy for injecting raw bit patterns."""
        return cls(tuple(entries), FxFormat(n, n), FxFormat(m, m))


@dataclass(frozen=True)
class Layout:
    n: int
    m: int
    l: int
    carries: int = 0
    result: bool = False

    def __post_init__(self):
        if not 0 <= self.l <= self.n:
            raise ValueError(f"swap qubits l={self.l} must satisfy 0 <= l <= n={self.n}")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")

    @property
    def banks(self) -> int:
        return 1 << self.l

    @property
    def input_wires(self) -> list[int]:
        return list(range(self.n))

    @property
    def select_wires(self) -> list[int]:
        return list(range(self.n - self.l))

    @property
    def swap_wires(self) -> list[int]:
        return list(range(self.n - self.l, self.n))

    def bank(self, j: int) -> list[int]:
        start = self.n + j * self.m
        return list(range(start, start + self.m))

    @property
    def bank_wires(self) -> list[int]:
        return list(range(self.n, self.n + self.m * self.banks))

    @property
    def ancilla_wires(self) -> list[int]:
        start = self.n + self.m * self.banks
        return list(range(start, start + self.carries))

    @property
    def result_wires(self) -> list[int]:
        if not self.result:
            return []
        start = self.n + self.m * self.banks + self.carries
        return list(range(start, start + self.m))

    @property
    def output_wires(self) -> list[int]:
        return self.result_wires if self.result else self.bank(0)

    @property
    def width(self) -> int:
        return self.n + self.m * self.banks + self.carries + (self.m if self.result else 0)

    def registers(self) -> tuple[Register, ...]:
        regs = [Register("x", "input", 0, self.n)]
        regs += [Register(f"bank{j}", "bank", self.n + j * self.m, self.m) for j in range(self.banks)]
        if self.carries:
            regs.append(Register("carry", "ancilla", self.ancilla_wires[0], self.carries))
        if self.result:
            regs.append(Register("result", "result", self.result_wires[0], self.m))
        return tuple(regs)

    def empty(self) -> Circuit:
        return Circuit(self.width, (), self.registers())


@dataclass(frozen=True)
class LookupArtifact:
    circuit: Circuit
    table: Table
    domain: Domain
    swap_qubits: int
    layout: Layout
    clean: bool
    restore: bool
    offset_code: int

    @property
    def select_rows(self) -> int:
        return 1 << (self.layout.n - self.swap_qubits)

    @property
    def row_depth(self) -> int:
        """Select rows (no-op rows included) plus swap layers."""
        return self.select_rows + self.swap_qubits

    @property
    def bank_qubits(self) -> int:
        return len(self.layout.bank_wires)


def _row_controls(wires: Sequence[int], b: int) -> tuple[Control, ...]:
    return tuple(Control(w, bool((b >> i) & 1)) for i, w in enumerate(wires))


def select_gates(table: Table, layout: Layout) -> list[Gate]:
    n, m, l = layout.n, layout.m, layout.l
    low = n - l
    gates: list[Gate] = []
    sel = layout.select_wires
    for b in range(1 << low):
        controls = _row_controls(sel, b)
        for j in range(layout.banks):
            entry = table.entries[(j << low) | b]
            bank = layout.bank(j)
            for bit in range(m):
                if (entry >> bit) & 1:
                    gates.append(MCX(controls, bank[bit]))
    return gates


def _check_layout(table: Table, layout: Layout) -> None:
    if table.n != layout.n or table.m != layout.m:
        raise CircuitError(
            f"layout (n={layout.n}, m={layout.m}) does not match table (n={table.n}, m={table.m})"
        )


def build_select(table: Table, l: int, layout: Layout | None = None) -> Circuit:
    """One multi-controlled fan-out row per value of the low ``n - l`` input bits.

    Row ``b`` writes entry ``j * 2**(n-l) + b`` into bank ``j``. Rows whose
    output words are all zero emit no gates.
    """
    layout = layout or Layout(table.n, table.m, l)
    if layout.l != l:
        raise CircuitError(f"layout has l={layout.l}, requested l={l}")
    _check_layout(table, layout)
    return Circuit(layout.width, tuple(select_gates(table, layout)), layout.registers())


def swap_gates(layout: Layout) -> list[Gate]:
    gates: list[Gate] = []
    for j, wire in enumerate(layout.swap_wires):
        stride = 1 << j
        for k in range(0, layout.banks, stride << 1):
            for a, b in zip(layout.bank(k), layout.bank(k + stride)):
                gates.append(CSWAP(Control(wire, True), a, b))
    return gates


def build_swap_network(l: int, layout: Layout) -> Circuit:
    """``l`` layers of controlled swaps routing the selected bank into bank 0.

    Layer ``j`` is controlled on swap wire ``j`` and swaps bank ``k`` with
    bank ``k + 2**j`` for every ``k`` that is a multiple of ``2**(j+1)``.
    """
    if layout.l != l:
        raise CircuitError(f"layout has l={layout.l}, requested l={l}")
    return Circuit(layout.width, tuple(swap_gates(layout)), layout.registers())


def add_const_gates(x_wires: Sequence[int], carry_wires: Sequence[int], a: int) -> list[Gate]:
    """In-place ``x <- (x + a) mod 2**n`` with a ripple-carry over clean carry wires.

    ``carry_wires[i-1]`` holds the carry into bit ``i``. The carry into bit
    ``i + 1`` is ``x_i AND c_i`` when bit ``a_i`` is 0 and ``x_i OR c_i``
    when it is 1; carries are computed bottom-up and uncomputed top-down,
    each just before the sum bit it depends on is overwritten.
    """
    n = len(x_wires)
    a %= 1 << n
    if a == 0:
        return []
    if len(carry_wires) < n - 1:
        raise CircuitError(f"need {n - 1} carry wires, got {len(carry_wires)}")
    abit = [(a >> i) & 1 for i in range(n)]

    def carry(i: int) -> int:
        return carry_wires[i - 1]

    def compute(i: int) -> list[Gate]:
        # gates setting carry(i + 1) from x_i and carry(i)
        t = carry(i + 1)
        if i == 0:
            return [MCX((Control(x_wires[0]),), t)] if abit[0] else []
        if abit[i]:
            return [X(t), MCX((Control(x_wires[i], False), Control(carry(i), False)), t)]
        return [MCX((Control(x_wires[i]), Control(carry(i))), t)]

    gates: list[Gate] = []
    for i in range(n - 1):
        gates += compute(i)
    for i in range(n - 1, 0, -1):
        if i + 1 <= n - 1:
            gates += reversed(compute(i))
        gates.append(MCX((Control(carry(i)),), x_wires[i]))
        if abit[i]:
            gates.append(X(x_wires[i]))
    if n > 1:
        gates += reversed(compute(0))
    if abit[0]:
        gates.append(X(x_wires[0]))
    return gates


def _const_code(fmt: FxFormat, c: float) -> int:
    try:
        return encode(c, fmt)
    except FormatRangeError as exc:
        raise FormatRangeError(f"constant {c} not representable: {exc}", exc.low, exc.high) from None


def build_subtract_const(fmt: FxFormat, c: float, layout: Layout | None = None) -> Circuit:
    """Map the input code ``k`` to ``(k - code(c)) mod 2**n`` in place.

    Standalone layout: input wires ``[0, n)``, carry ancillas ``[n, 2n - 1)``.
    """
    code = _const_code(fmt, c)
    n = fmt.total_bits
    if layout is None:
        regs = [Register("x", "input", 0, n)]
        if n > 1:
            regs.append(Register("carry", "ancilla", n, n - 1))
        width = 2 * n - 1
        x_wires, carries = list(range(n)), list(range(n, 2 * n - 1))
    else:
        regs, width = list(layout.registers()), layout.width
        x_wires, carries = layout.input_wires, layout.ancilla_wires
    gates = add_const_gates(x_wires, carries, -code) if code else []
    return Circuit(width, tuple(gates), tuple(regs))


def build_add_const(fmt: FxFormat, c: float, layout: Layout | None = None) -> Circuit:
    """Inverse of :func:`build_subtract_const`."""
    return reverse(build_subtract_const(fmt, c, layout))


def build_lookup(
    table: Table,
    swap_qubits: int,
    domain: Domain | None = None,
    *,
    offset_code: int = 0,
    restore: bool = True,
) -> LookupArtifact:
    """Assemble subtract -> select -> swap -> (restore-add) for a precomputed table."""
    n = table.n
    carries = n - 1 if offset_code % (1 << n) else 0
    layout = Layout(n, table.m, swap_qubits, carries=carries)
    if domain is None:
        domain = Domain(table.in_fmt.min_value, table.in_fmt.max_value)
    b = CircuitBuilder(layout.width, list(layout.registers()))
    sub = add_const_gates(layout.input_wires, layout.ancilla_wires, -offset_code)
    b.extend(sub)
    b.extend(select_gates(table, layout))
    b.extend(swap_gates(layout))
    if restore:
        b.extend(reversed(sub))
    return LookupArtifact(
        circuit=b.freeze(),
        table=table,
        domain=domain,
        swap_qubits=swap_qubits,
        layout=layout,
        clean=False,
        restore=restore,
        offset_code=offset_code % (1 << n),
    )


def compute_table(
    f: Expr | Callable[[float], float] | str,
    domain: Domain,
    tol: Tolerances,
    *,
    allow_large: bool = False,
) -> Table:
    """Sample ``f`` on the input grid and quantise the outputs."""
    f = as_expr(f)
    in_fmt = input_format(domain, tol.eps_in, allow_large=allow_large)
    values = evaluate_many(f, grid(domain, in_fmt))
    out_fmt = output_format(values, tol.eps_out)
    return Table(tuple(encode_many(values, out_fmt)), in_fmt, out_fmt)


def apply_function_with_lookup(
    f: Expr | Callable[[float], float] | str,
    domain: Domain,
    tol: Tolerances,
    l: int,
    *,
    restore: bool = True,
    allow_large: bool = False,
) -> LookupArtifact:
    """Build the complete lookup artifact for ``f`` on ``domain``.

    The input register is sized from ``tol.eps_in``, outputs are quantised
    to ``tol.eps_out``, and a constant subtraction maps ``x_min`` to code 0
    when it is not already there. With ``restore`` the subtraction is undone
    after the lookup so the input register keeps its original value.
    """
    table = compute_table(f, domain, tol, allow_large=allow_large)
    if not 0 <= l <= table.n:
        raise ValueError(f"swap qubits l={l} must satisfy 0 <= l <= n={table.n}")
    offset = encode(domain.x_min, table.in_fmt)
    return build_lookup(table, l, domain, offset_code=offset, restore=restore)


def make_clean(a: LookupArtifact) -> LookupArtifact:
    """Compute, copy bank 0 into a fresh result register, uncompute.

    The returned circuit maps ``|x>|0...0>`` to ``|x>|f(x)>`` with every
    bank and ancilla wire back at zero.
    """
    if a.clean:
        raise ValueError("artifact is already clean")
    layout = replace(a.layout, result=True)
    regs = layout.registers()
    base = a.circuit.with_registers(regs, layout.width)
    copy = Circuit(
        layout.width,
        tuple(MCX((Control(s),), t) for s, t in zip(layout.bank(0), layout.result_wires)),
        regs,
    )
    circuit = compose(compose(base, copy), reverse(base))
    return replace(a, circuit=circuit, layout=layout, clean=True)
