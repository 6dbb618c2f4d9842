"""Clifford+T resource counting for X/MCX/SWAP/CSWAP circuits.

Gates are costed in units of Toffoli-equivalents, each worth
``toffoli_t_count`` T gates. Consecutive MCX gates with an identical control
list form one fan-out *row*: the AND of the controls is built once and the
targets receive CNOTs. Consecutive rows over the same control wires form a
*segment*; under unary iteration a segment may instead be costed as a full
walk over every control pattern, whichever is cheaper.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Iterator

from .qir import CSWAP, MCX, Circuit, Control, Gate


class MCXStrategy(str, Enum):
    NAIVE_LADDER = "naive-ladder"
    UNARY_ITERATION = "unary-iteration"


@dataclass(frozen=True)
class CostModel:
    toffoli_t_count: int = 4
    toffoli_t_depth: int = 1
    mcx_strategy: MCXStrategy = MCXStrategy.UNARY_ITERATION
    and_uncompute_free: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mcx_strategy", MCXStrategy(self.mcx_strategy))
        if self.toffoli_t_count < 0 or self.toffoli_t_depth < 0:
            raise ValueError("cost model counts must be non-negative")


@dataclass(frozen=True)
class ResourceReport:
    t_count: int
    toffoli_count: int
    t_depth: int
    row_depth: int
    qubits_data: int
    qubits_ancilla: int
    qubits_total: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class _Cost:
    toffolis: int
    depth: int
    ancilla: int


def row_cost(k: int, targets: int, model: CostModel) -> _Cost:
    """Toffoli cost of one fan-out row with ``k`` controls and ``targets`` targets.

    A ladder of ``k - 2`` ANDs reduces the controls to two; then either one
    Toffoli per target, or one more AND into an ancilla followed by CNOT
    fan-out, whichever is cheaper.
    """
    if k <= 1 or targets == 0:
        return _Cost(0, 0, 0)
    free = model.and_uncompute_free
    chain = k - 2
    via_ancilla = 1 if free else 2
    central = min(targets, via_ancilla)
    uncompute = 0 if free else chain
    toffolis = chain + central + uncompute
    ancilla = chain + (1 if central < targets else 0)
    return _Cost(toffolis, toffolis, ancilla)


def walk_cost(k: int, model: CostModel) -> _Cost:
    """Unary iteration over all ``2**k`` patterns of ``k`` control wires.

    Every AND node at prefix length ``j`` (``2 <= j <= k``) is visited once;
    the second child of each node comes from its sibling by a CNOT with the
    parent, leaving ``2**(j-1)`` ANDs per level, ``2**k - 2`` in total.
    """
    if k <= 1:
        return _Cost(0, 0, 0)
    ands = (1 << k) - 2
    toffolis = ands if model.and_uncompute_free else 2 * ands
    return _Cost(toffolis, toffolis, k - 1)


def rows(c: Circuit) -> Iterator[tuple[tuple[Control, ...], list[int]] | Gate]:
    """Yield ``(controls, targets)`` for each fan-out row, other gates as-is."""
    cur: tuple[Control, ...] | None = None
    targets: list[int] = []
    for g in c.gates:
        if isinstance(g, MCX):
            if g.controls == cur:
                targets.append(g.target)
                continue
            if cur is not None:
                yield cur, targets
            cur, targets = g.controls, [g.target]
            continue
        if cur is not None:
            yield cur, targets
            cur, targets = None, []
        yield g
    if cur is not None:
        yield cur, targets


def _segments(c: Circuit) -> Iterator[list[tuple[tuple[Control, ...], list[int]]] | Gate]:
    seg: list = []
    key = None
    seen: set = set()
    for item in rows(c):
        if isinstance(item, tuple):
            controls, _ = item
            wires = tuple(w for w, _ in controls)
            pattern = tuple(p for _, p in controls)
            if wires == key and pattern not in seen:
                seg.append(item)
                seen.add(pattern)
                continue
            if seg:
                yield seg
            seg, key, seen = [item], wires, {pattern}
            continue
        if seg:
            yield seg
            seg, key, seen = [], None, set()
        yield item
    if seg:
        yield seg


def _segment_cost(seg, model: CostModel) -> _Cost:
    k = len(seg[0][0])
    per_row = [row_cost(k, len(t), model) for _, t in seg]
    rows_total = _Cost(
        sum(r.toffolis for r in per_row),
        sum(r.depth for r in per_row),
        max((r.ancilla for r in per_row), default=0),
    )
    if model.mcx_strategy is MCXStrategy.UNARY_ITERATION and len(seg) > 1:
        walk = walk_cost(k, model)
        if walk.toffolis < rows_total.toffolis:
            return walk
    return rows_total


def count_row_depth(c: Circuit) -> int:
    """Fan-out rows plus controlled-swap layers (runs of CSWAPs on one control)."""
    depth = 0
    last_swap_control = None
    for item in rows(c):
        if isinstance(item, CSWAP):
            if item.control != last_swap_control:
                depth += 1
                last_swap_control = item.control
            continue
        last_swap_control = None
        if isinstance(item, tuple):
            depth += 1
    return depth


def estimate(c: Circuit, model: CostModel | None = None, *, row_depth: int | None = None) -> ResourceReport:
    """Count T gates, Toffolis, T-depth and qubits of ``c`` under ``model``.

    T-depth comes from an as-soon-as-possible schedule: each Toffoli-bearing
    unit starts once all its wires are free and occupies them for its
    sequential Toffoli depth. ``row_depth`` overrides the structural count
    taken from the gate list (lookup artifacts pass their no-op rows too).
    """
    model = model or CostModel()
    ready = [0] * c.width
    toffolis = 0
    peak_ancilla = 0
    for item in _segments(c):
        if isinstance(item, list):
            cost = _segment_cost(item, model)
            wires = {w for controls, ts in item for w, _ in controls} | {t for _, ts in item for t in ts}
        elif isinstance(item, CSWAP):
            cost = _Cost(1, 1, 0)
            wires = set(item.wires)
        else:
            cost = _Cost(0, 0, 0)
            wires = set(item.wires)
        toffolis += cost.toffolis
        peak_ancilla = max(peak_ancilla, cost.ancilla)
        start = max(ready[w] for w in wires)
        end = start + cost.depth * model.toffoli_t_depth
        for w in wires:
            ready[w] = end
    declared_ancilla = len(c.wires_with_role("ancilla"))
    data = c.width - declared_ancilla
    ancilla = declared_ancilla + peak_ancilla
    return ResourceReport(
        t_count=toffolis * model.toffoli_t_count,
        toffoli_count=toffolis,
        t_depth=max(ready, default=0),
        row_depth=count_row_depth(c) if row_depth is None else row_depth,
        qubits_data=data,
        qubits_ancilla=ancilla,
        qubits_total=data + ancilla,
    )


def estimate_artifact(artifact, model: CostModel | None = None) -> ResourceReport:
    """:func:`estimate` with the artifact's structural row depth."""
    return estimate(artifact.circuit, model, row_depth=artifact.row_depth)


def predicted_row_depth(n: int, l: int) -> int:
    """``2**(n-l) + l``: select rows plus swap layers."""
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got n={n}, l={l}")
    return (1 << (n - l)) + l


def predicted_lookup_qubits(m: int, l: int) -> int:
    """``m * 2**l`` output-bank qubits."""
    if m < 1 or l < 0:
        raise ValueError(f"need m >= 1 and l >= 0, got m={m}, l={l}")
    return m << l
