"""Classical basis-state simulation of permutation circuits.

Batch runs are bit-sliced: each wire holds one Python int whose bit ``k``
is that wire's value in the ``k``-th basis state of the batch, so every gate
is a handful of big-int operations regardless of batch size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import CircuitError
from .qir import CSWAP, MCX, SWAP, Circuit, X

MAX_TABLE_BITS = 24


def run_basis(c: Circuit, state: Sequence[int | bool]) -> list[int]:
    """Apply ``c`` to one computational basis state given as a bit list (index = wire)."""
    if len(state) != c.width:
        raise CircuitError(f"state has {len(state)} bits, circuit width is {c.width}")
    s = [1 if b else 0 for b in state]
    for g in c.gates:
        if isinstance(g, X):
            s[g.target] ^= 1
        elif isinstance(g, MCX):
            if all(s[w] == pos for w, pos in g.controls):
                s[g.target] ^= 1
        elif isinstance(g, SWAP):
            s[g.a], s[g.b] = s[g.b], s[g.a]
        elif isinstance(g, CSWAP):
            if s[g.control.wire] == g.control.positive:
                s[g.a], s[g.b] = s[g.b], s[g.a]
        else:
            raise TypeError(f"unsupported gate {g!r}")
    return s


def run_sliced(c: Circuit, slices: list[int], batch: int) -> list[int]:
    """Apply ``c`` to ``batch`` basis states at once, one int per wire."""
    if len(slices) != c.width:
        raise CircuitError(f"{len(slices)} wire slices for circuit width {c.width}")
    ones = (1 << batch) - 1
    s = list(slices)
    last_controls = None
    mask = ones
    for g in c.gates:
        if isinstance(g, MCX):
            if g.controls != last_controls:
                # consecutive fan-out gates share a control pattern; reuse the mask
                mask = ones
                for w, pos in g.controls:
                    mask &= s[w] if pos else ~s[w]
                last_controls = g.controls
            s[g.target] ^= mask
            continue
        last_controls = None
        if isinstance(g, X):
            s[g.target] ^= ones
        elif isinstance(g, SWAP):
            s[g.a], s[g.b] = s[g.b], s[g.a]
        elif isinstance(g, CSWAP):
            w, pos = g.control
            m = s[w] if pos else ~s[w] & ones
            diff = (s[g.a] ^ s[g.b]) & m
            s[g.a] ^= diff
            s[g.b] ^= diff
        else:
            raise TypeError(f"unsupported gate {g!r}")
    return [v & ones for v in s]


def pack_bits(bits: np.ndarray) -> int:
    """Bool vector -> int with element ``k`` at bit ``k``."""
    return int.from_bytes(np.packbits(np.asarray(bits, dtype=bool), bitorder="little").tobytes(), "little")


def unpack_bits(value: int, count: int) -> np.ndarray:
    raw = np.frombuffer(value.to_bytes((count + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:count].astype(bool)


def slices_for_codes(codes: Sequence[int], nbits: int) -> list[int]:
    """Bit-slices for a register loaded with ``codes[k]`` in batch slot ``k``."""
    arr = np.asarray(codes, dtype=object)
    out = []
    for i in range(nbits):
        bits = np.fromiter(((int(v) >> i) & 1 for v in arr), dtype=bool, count=len(arr))
        out.append(pack_bits(bits))
    return out


def _counting_slices(nbits: int) -> list[int]:
    """Slices for the batch of all codes 0 .. 2**nbits - 1 in order."""
    total = 1 << nbits
    out = []
    for i in range(nbits):
        block = 1 << i
        pattern = ((1 << block) - 1) << block
        span = block << 1
        while span < total:
            pattern |= pattern << span
            span <<= 1
        out.append(pattern)
    return out


def codes_from_slices(slices: Sequence[int], batch: int) -> list[int]:
    """Inverse of :func:`slices_for_codes`."""
    if not slices:
        return [0] * batch
    if len(slices) <= 63:
        acc = np.zeros(batch, dtype=np.uint64)
        for j, v in enumerate(slices):
            acc |= unpack_bits(v, batch).astype(np.uint64) << np.uint64(j)
        return [int(a) for a in acc]
    acc = [0] * batch
    for j, v in enumerate(slices):
        for k in np.flatnonzero(unpack_bits(v, batch)):
            acc[k] |= 1 << j
    return acc


def simulate_codes(
    c: Circuit, in_wires: Sequence[int], codes: Sequence[int]
) -> list[int]:
    """Run ``c`` once per code with ``in_wires`` loaded and all other wires zero.

    Returns the final wire slices (see :func:`run_sliced`).
    """
    batch = len(codes)
    slices = [0] * c.width
    for w, v in zip(in_wires, slices_for_codes(codes, len(in_wires))):
        slices[w] = v
    return run_sliced(c, slices, batch)


def truth_table(c: Circuit, in_wires: Sequence[int], out_wires: Sequence[int]) -> list[int]:
    """Output code for every input code ``0 .. 2**len(in_wires) - 1``.

    Wires outside ``in_wires`` start at zero.
    """
    n = len(in_wires)
    if n > MAX_TABLE_BITS:
        raise ValueError(f"truth table over {n} input wires exceeds the 2^{MAX_TABLE_BITS} guard")
    batch = 1 << n
    slices = [0] * c.width
    for w, v in zip(in_wires, _counting_slices(n)):
        slices[w] = v
    final = run_sliced(c, slices, batch)
    return codes_from_slices([final[w] for w in out_wires], batch)


@dataclass(frozen=True)
class LookupCheck:
    max_abs_error: float
    clean_ok: bool
    input_restored: bool
    checked: int
    exhaustive: bool
    seed: int | None = None


def check_lookup(artifact, f, *, exhaustive_limit: int = 12, samples: int = 1000, seed: int = 0) -> LookupCheck:
    """Simulate a lookup artifact and compare its output register with ``f`` on the grid.

    Inputs are checked exhaustively up to ``exhaustive_limit`` input bits;
    beyond that ``samples`` codes are drawn with a fixed ``seed``.
    ``clean_ok`` is true when every ancilla wire, and every bank wire other
    than the output register, ends at zero for every checked input.
    """
    from .fxp import decode, grid
    from .funcspec import evaluate_many

    layout = artifact.layout
    n = layout.n
    if n > MAX_TABLE_BITS:
        raise ValueError(f"n={n} exceeds the 2^{MAX_TABLE_BITS} guard")
    if n <= exhaustive_limit:
        codes = list(range(1 << n))
        used_seed = None
    else:
        rng = np.random.default_rng(seed)
        codes = [int(v) for v in rng.integers(0, 1 << n, size=samples)]
        used_seed = seed
    final = simulate_codes(artifact.circuit, layout.input_wires, codes)
    batch = len(codes)

    outs = codes_from_slices([final[w] for w in layout.output_wires], batch)
    xs = grid(artifact.domain, artifact.table.in_fmt)
    offset = artifact.offset_code
    size = 1 << n
    points = np.array([xs[(code - offset) % size] for code in codes])
    exact = evaluate_many(f, points)
    got = np.array([decode(o, artifact.table.out_fmt) for o in outs])
    max_err = float(np.max(np.abs(got - exact))) if batch else 0.0

    ones = (1 << batch) - 1
    aux = set(layout.ancilla_wires) | (set(layout.bank_wires) - set(layout.output_wires))
    clean_ok = all(final[w] & ones == 0 for w in aux)
    ins = codes_from_slices([final[w] for w in layout.input_wires], batch)
    return LookupCheck(max_err, clean_ok, ins == codes, batch, used_seed is None, used_seed)
