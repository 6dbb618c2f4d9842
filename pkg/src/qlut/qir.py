"""Reversible circuit IR: X / MCX / SWAP / CSWAP gates over indexed wires.

Text format (``qlut-circuit v1``), one item per line::

    qlut-circuit v1
    qubits 7
    reg input input 0 3
    x 2
    mcx +0 -1 : 2
    swap 3 4
    cswap +1 : 3 4
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

from .exceptions import CircuitError, CircuitParseError

HEADER = "qlut-circuit v1"
ROLES = ("input", "bank", "ancilla", "result")


class Control(NamedTuple):
    wire: int
    positive: bool = True

    def __str__(self) -> str:
        return f"{'+' if self.positive else '-'}{self.wire}"


@dataclass(frozen=True)
class X:
    target: int

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class MCX:
    """Multi-controlled X; an empty control list is a plain X."""

    controls: tuple[Control, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(Control(*c) for c in self.controls))

    @property
    def wires(self) -> tuple[int, ...]:
        return tuple(c.wire for c in self.controls) + (self.target,)


@dataclass(frozen=True)
class SWAP:
    a: int
    b: int

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class CSWAP:
    control: Control
    a: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "control", Control(*self.control))

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.control.wire, self.a, self.b)


Gate = Union[X, MCX, SWAP, CSWAP]


@dataclass(frozen=True)
class Register:
    name: str
    role: str
    start: int
    size: int

    @property
    def wires(self) -> range:
        return range(self.start, self.start + self.size)


def _check_gate(g: Gate, width: int) -> None:
    ws = g.wires
    for w in ws:
        if not 0 <= w < width:
            raise CircuitError(f"{g}: wire {w} out of range for width {width}")
    if len(set(ws)) != len(ws):
        raise CircuitError(f"{g}: duplicate wire within gate")


def _check_registers(registers: Sequence[Register], width: int) -> None:
    used: dict[int, str] = {}
    names = set()
    for r in registers:
        if r.role not in ROLES:
            raise CircuitError(f"register {r.name!r}: unknown role {r.role!r}")
        if r.size < 1 or r.start < 0 or r.start + r.size > width:
            raise CircuitError(f"register {r.name!r} [{r.start}, {r.start + r.size}) exceeds width {width}")
        if r.name in names:
            raise CircuitError(f"duplicate register name {r.name!r}")
        names.add(r.name)
        for w in r.wires:
            if w in used:
                raise CircuitError(f"registers {used[w]!r} and {r.name!r} overlap on wire {w}")
            used[w] = r.name


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list over ``width`` wires with named register ranges."""

    width: int
    gates: tuple[Gate, ...] = ()
    registers: tuple[Register, ...] = ()

    def __post_init__(self):
        if self.width < 0:
            raise CircuitError(f"negative width {self.width}")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "registers", tuple(self.registers))
        for g in self.gates:
            _check_gate(g, self.width)
        _check_registers(self.registers, self.width)

    def __len__(self) -> int:
        return len(self.gates)

    def register(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def wires_with_role(self, role: str) -> list[int]:
        return [w for r in self.registers if r.role == role for w in r.wires]

    def with_registers(self, registers: Iterable[Register], width: int | None = None) -> "Circuit":
        return Circuit(self.width if width is None else width, self.gates, tuple(registers))


@dataclass
class CircuitBuilder:
    """Mutable accumulator for building a circuit gate by gate, then :meth:`freeze`."""

    width: int
    registers: list[Register] = field(default_factory=list)
    gates: list[Gate] = field(default_factory=list)

    def add(self, g: Gate) -> "CircuitBuilder":
        _check_gate(g, self.width)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "CircuitBuilder":
        for g in gates:
            self.add(g)
        return self

    def freeze(self) -> Circuit:
        return Circuit(self.width, tuple(self.gates), tuple(self.registers))


def append(c: Circuit, g: Gate) -> Circuit:
    _check_gate(g, c.width)
    return Circuit(c.width, c.gates + (g,), c.registers)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Gates of ``a`` followed by gates of ``b``; register maps are merged."""
    if a.width != b.width:
        raise CircuitError(f"width mismatch: {a.width} vs {b.width}")
    regs = list(a.registers)
    by_name = {r.name: r for r in regs}
    for r in b.registers:
        if r.name in by_name:
            if by_name[r.name] != r:
                raise CircuitError(f"incompatible register {r.name!r}: {by_name[r.name]} vs {r}")
        else:
            regs.append(r)
    return Circuit(a.width, a.gates + b.gates, tuple(regs))


def reverse(c: Circuit) -> Circuit:
    """Inverse circuit; every gate in the set is self-inverse."""
    return Circuit(c.width, tuple(reversed(c.gates)), c.registers)


def _gate_line(g: Gate) -> str:
    if isinstance(g, X):
        return f"x {g.target}"
    if isinstance(g, MCX):
        ctrl = " ".join(str(c) for c in g.controls)
        return f"mcx {ctrl} : {g.target}" if ctrl else f"mcx : {g.target}"
    if isinstance(g, SWAP):
        return f"swap {g.a} {g.b}"
    if isinstance(g, CSWAP):
        return f"cswap {g.control} : {g.a} {g.b}"
    raise TypeError(f"not a gate: {g!r}")


def serialize(c: Circuit) -> str:
    lines = [HEADER, f"qubits {c.width}"]
    lines += [f"reg {r.name} {r.role} {r.start} {r.size}" for r in c.registers]
    lines += [_gate_line(g) for g in c.gates]
    return "\n".join(lines) + "\n"


def _int(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise CircuitParseError(f"expected a non-negative integer, got {tok!r}", lineno)
    return int(tok)


def _control(tok: str, lineno: int) -> Control:
    if len(tok) < 2 or tok[0] not in "+-":
        raise CircuitParseError(f"control {tok!r} needs a '+' or '-' polarity prefix", lineno)
    return Control(_int(tok[1:], lineno), tok[0] == "+")


def _split_controls(rest: list[str], lineno: int) -> tuple[list[str], list[str]]:
    if rest.count(":") != 1:
        raise CircuitParseError("expected exactly one ':' between controls and targets", lineno)
    i = rest.index(":")
    return rest[:i], rest[i + 1:]


def deserialize(text: str) -> Circuit:
    """Parse ``qlut-circuit v1`` text; errors carry 1-based line numbers."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != HEADER:
        raise CircuitParseError(f"missing {HEADER!r} header", 1)
    if len(lines) < 2 or not lines[1].split() or lines[1].split()[0] != "qubits":
        raise CircuitParseError("expected 'qubits <width>'", 2)
    head = lines[1].split()
    if len(head) != 2:
        raise CircuitParseError("expected 'qubits <width>'", 2)
    width = _int(head[1], 2)
    registers: list[Register] = []
    gates: list[Gate] = []
    for lineno, raw in enumerate(lines[2:], start=3):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        op, rest = toks[0], toks[1:]
        try:
            if op == "reg":
                if gates:
                    raise CircuitParseError("register declarations must precede gates", lineno)
                if len(rest) != 4:
                    raise CircuitParseError("expected 'reg <name> <role> <start> <size>'", lineno)
                registers.append(Register(rest[0], rest[1], _int(rest[2], lineno), _int(rest[3], lineno)))
                continue
            if op == "x":
                if len(rest) != 1:
                    raise CircuitParseError("expected 'x <wire>'", lineno)
                g: Gate = X(_int(rest[0], lineno))
            elif op == "mcx":
                ctrl, tgt = _split_controls(rest, lineno)
                if len(tgt) != 1:
                    raise CircuitParseError("mcx takes exactly one target", lineno)
                g = MCX(tuple(_control(t, lineno) for t in ctrl), _int(tgt[0], lineno))
            elif op == "swap":
                if len(rest) != 2:
                    raise CircuitParseError("expected 'swap <a> <b>'", lineno)
                g = SWAP(_int(rest[0], lineno), _int(rest[1], lineno))
            elif op == "cswap":
                ctrl, tgt = _split_controls(rest, lineno)
                if len(ctrl) != 1 or len(tgt) != 2:
                    raise CircuitParseError("expected 'cswap <±c> : <a> <b>'", lineno)
                g = CSWAP(_control(ctrl[0], lineno), _int(tgt[0], lineno), _int(tgt[1], lineno))
            else:
                raise CircuitParseError(f"unknown gate {op!r}", lineno)
            _check_gate(g, width)
        except CircuitParseError:
            raise
        except CircuitError as exc:
            raise CircuitParseError(str(exc), lineno) from None
        gates.append(g)
    try:
        return Circuit(width, tuple(gates), tuple(registers))
    except CircuitError as exc:
        raise CircuitParseError(str(exc), 2) from None
