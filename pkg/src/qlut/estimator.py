"""scikit-learn compatible front end for lookup-table synthesis."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import errband, resx, sim
from .fxp import Domain, Tolerances, decode, encode_many
from .funcspec import as_expr
from .synth import apply_function_with_lookup, make_clean


def check_domain(x_min, x_max) -> Domain:
    for name, v in (("x_min", x_min), ("x_max", x_max)):
        if not isinstance(v, numbers.Real):
            raise TypeError(f"{name} must be a real number, got {type(v).__name__}")
    return Domain(float(x_min), float(x_max))


def check_tolerances(eps_in, eps_out) -> Tolerances:
    return Tolerances(float(eps_in), float(eps_out))


def check_swap_qubits(swap_qubits) -> int:
    """Type and sign check; the upper bound ``n`` is enforced at synthesis time."""
    if not isinstance(swap_qubits, numbers.Integral) or isinstance(swap_qubits, bool):
        raise TypeError(f"swap_qubits must be an integer, got {swap_qubits!r}")
    if swap_qubits < 0:
        raise ValueError(f"swap_qubits must be non-negative, got {swap_qubits}")
    return int(swap_qubits)


class LookupTableRegressor(RegressorMixin, BaseEstimator):
    """Compile ``function`` into a SelectSwap lookup circuit and predict by simulating it.

    Parameters
    ----------
    function : str or callable
        Expression in ``x`` (e.g. ``"exp(-x)"``) or a Python callable.
    x_min, x_max : float or None
        Input domain. When left as ``None`` they are taken from the range
        of ``X`` passed to :meth:`fit`.
    eps_in : float
        Maximum input grid spacing.
    eps_out : float
        Output quantisation precision.
    swap_qubits : int
        Number of high input bits routed through the swap network.
    clean : bool
        Uncompute the banks so only the result register is left populated.
    restore : bool
        Add ``x_min`` back after the lookup so the input register is preserved.
    allow_large : bool
        Lift the 24-bit input register guard.

    Attributes
    ----------
    artifact_ : LookupArtifact
    in_format_, out_format_ : FxFormat
    n_features_in_ : int
    """

    def __init__(
        self,
        function="x",
        x_min=None,
        x_max=None,
        eps_in=2.0**-3,
        eps_out=1e-3,
        swap_qubits=0,
        clean=False,
        restore=True,
        allow_large=False,
    ):
        self.function = function
        self.x_min = x_min
        self.x_max = x_max
        self.eps_in = eps_in
        self.eps_out = eps_out
        self.swap_qubits = swap_qubits
        self.clean = clean
        self.restore = restore
        self.allow_large = allow_large

    def fit(self, X=None, y=None):
        """Build the lookup circuit. ``y`` is ignored; ``X`` only supplies missing bounds."""
        x_min, x_max = self.x_min, self.x_max
        if x_min is None or x_max is None:
            if X is None:
                raise ValueError("x_min/x_max not set and no X given to infer them from")
            arr = check_array(X, ensure_2d=False).reshape(-1)
            x_min = float(arr.min()) if x_min is None else x_min
            x_max = float(arr.max()) if x_max is None else x_max
        domain = check_domain(x_min, x_max)
        tol = check_tolerances(self.eps_in, self.eps_out)
        self.function_ = as_expr(self.function)
        l = check_swap_qubits(self.swap_qubits)
        artifact = apply_function_with_lookup(
            self.function_, domain, tol, l, restore=self.restore, allow_large=self.allow_large
        )
        if self.clean:
            artifact = make_clean(artifact)
        self.artifact_ = artifact
        self.domain_ = domain
        self.tolerances_ = tol
        self.in_format_ = artifact.table.in_fmt
        self.out_format_ = artifact.table.out_fmt
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        """Simulate the circuit on the encoded inputs and decode the output register."""
        check_is_fitted(self, "artifact_")
        arr = check_array(X, ensure_2d=False)
        if arr.ndim == 2:
            if arr.shape[1] != 1:
                raise ValueError(f"expected a single feature, got {arr.shape[1]}")
            arr = arr[:, 0]
        dom = self.domain_
        if arr.size and (arr.min() < dom.x_min or arr.max() > dom.x_max):
            raise ValueError(f"inputs must lie in [{dom.x_min}, {dom.x_max}]")
        codes = encode_many(arr, self.in_format_)
        layout = self.artifact_.layout
        final = sim.simulate_codes(self.artifact_.circuit, layout.input_wires, codes)
        outs = sim.codes_from_slices([final[w] for w in layout.output_wires], len(codes))
        return np.array([decode(o, self.out_format_) for o in outs], dtype=float)

    def resources(self, model: resx.CostModel | None = None) -> resx.ResourceReport:
        check_is_fitted(self, "artifact_")
        return resx.estimate_artifact(self.artifact_, model)

    def error_bound(self, lipschitz: float | None = None) -> errband.ErrorBound:
        check_is_fitted(self, "artifact_")
        if lipschitz is None:
            lipschitz = errband.estimate_lipschitz(self.function_, self.domain_)
        return errband.bound(lipschitz, self.tolerances_)

    @property
    def layout_(self):
        """``(n, p, m, q)``: input and output total/integer bits."""
        check_is_fitted(self, "artifact_")
        return (
            self.in_format_.total_bits,
            self.in_format_.integer_bits,
            self.out_format_.total_bits,
            self.out_format_.integer_bits,
        )
