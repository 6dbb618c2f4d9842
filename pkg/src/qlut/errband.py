"""Lipschitz estimation and the total output-error bound of a lookup table.

A table built with grid spacing ``eps_in`` and output precision ``eps_out``
answers within ``eps_out + L * eps_in`` of the true ``f(x)`` whenever ``f``
is ``L``-Lipschitz on the domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fxp import Domain, Tolerances, decode, encode_many, grid
from .funcspec import evaluate_many
from .sim import codes_from_slices, simulate_codes

INFLATION = 1.05
# derivative growth under step refinement that marks a suspected singularity
_BLOWUP_RATIO = 2.0


@dataclass(frozen=True)
class ErrorBound:
    lipschitz_L: float
    eps_in: float
    eps_out: float
    total: float


@dataclass(frozen=True)
class Validation:
    empirical_max: float
    holds: bool
    bound: float
    worst_x: float
    samples: int
    seed: int
    # true when the derivative appears unbounded, so the bound cannot be trusted
    lipschitz_risk: bool


def _slopes(f, domain: Domain, samples: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(domain.x_min, domain.x_max, samples)
    lo = np.maximum(xs - h, domain.x_min)
    hi = np.minimum(xs + h, domain.x_max)
    d = np.abs(evaluate_many(f, hi) - evaluate_many(f, lo)) / (hi - lo)
    return xs, d


def estimate_lipschitz(f, domain: Domain, samples: int = 1024) -> float:
    """Largest central-difference slope over a uniform grid, inflated by 5%.

    The step is ``(x_max - x_min) / (8 * samples)``; at the domain edges the
    difference becomes one-sided so ``f`` is never evaluated outside the
    domain. This is a sampling estimate, not a certificate.
    """
    if samples < 64:
        raise ValueError(f"need at least 64 samples, got {samples}")
    h = (domain.x_max - domain.x_min) / (8 * samples)
    _, d = _slopes(f, domain, samples, h)
    return float(d.max()) * INFLATION


def derivative_blowup(f, domain: Domain, samples: int = 1024) -> bool:
    """Whether the steepest sampled slope keeps growing as the step shrinks."""
    h = (domain.x_max - domain.x_min) / (8 * samples)
    xs, d = _slopes(f, domain, samples, h)
    i = int(np.argmax(d))
    if d[i] == 0:
        return False
    fine = h / 256
    x = xs[i]
    lo, hi = max(x - fine, domain.x_min), min(x + fine, domain.x_max)
    refined = abs(float(evaluate_many(f, [hi])[0] - evaluate_many(f, [lo])[0])) / (hi - lo)
    return bool(refined > _BLOWUP_RATIO * d[i])


def bound(L: float, tol: Tolerances) -> ErrorBound:
    """``eps_out + L * eps_in``."""
    if L < 0:
        raise ValueError(f"Lipschitz constant must be non-negative, got {L}")
    return ErrorBound(L, tol.eps_in, tol.eps_out, tol.eps_out + L * tol.eps_in)


def validate(
    artifact,
    f,
    error_bound: ErrorBound,
    samples: int = 10_000,
    *,
    seed: int = 0,
    include_grid: bool = True,
) -> Validation:
    """Compare simulated lookups against ``f`` at real inputs.

    Inputs are ``samples`` uniform draws from the domain (fixed ``seed``),
    plus every grid point when ``include_grid`` is set. Each ``x`` is
    encoded into the input register, the circuit is simulated, and the
    decoded output is compared with ``f(x)``. Violations are reported,
    never clipped.
    """
    dom = artifact.domain
    in_fmt = artifact.table.in_fmt
    rng = np.random.default_rng(seed)
    xs = rng.uniform(dom.x_min, dom.x_max, size=samples)
    if include_grid:
        xs = np.concatenate([np.asarray(grid(dom, in_fmt)), xs])
    if xs.size == 0:
        raise ValueError("nothing to validate: no samples and include_grid=False")
    codes = encode_many(xs, in_fmt)
    layout = artifact.layout
    final = simulate_codes(artifact.circuit, layout.input_wires, codes)
    outs = codes_from_slices([final[w] for w in layout.output_wires], len(codes))
    got = np.array([decode(o, artifact.table.out_fmt) for o in outs])
    err = np.abs(got - evaluate_many(f, xs))
    i = int(np.argmax(err))
    worst = float(err[i])
    return Validation(
        empirical_max=worst,
        holds=bool(worst <= error_bound.total),
        bound=error_bound.total,
        worst_x=float(xs[i]),
        samples=len(xs),
        seed=seed,
        lipschitz_risk=derivative_blowup(f, dom),
    )
