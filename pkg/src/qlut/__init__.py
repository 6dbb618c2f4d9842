"""Compile single-variable real functions into SelectSwap lookup circuits.

Typical use::

    from qlut import LookupTableRegressor
    lut = LookupTableRegressor("exp(-x)", x_min=0, x_max=10, eps_in=2**-3, eps_out=1e-7).fit()
    lut.layout_        # (n, p, m, q)
    lut.resources()    # T-count, qubits, ...
    lut.predict([[2.5]])
"""

from .errband import ErrorBound, bound, estimate_lipschitz, validate
from .estimator import LookupTableRegressor
from .exceptions import (
    CircuitError,
    CircuitParseError,
    DomainFault,
    FormatRangeError,
    ParseError,
    QlutError,
    TableTooLargeError,
)
from .fxp import Domain, FxFormat, Tolerances, decode, encode, grid, input_format, output_format
from .funcspec import evaluate, parse
from .qir import CSWAP, MCX, SWAP, Circuit, Control, X, compose, deserialize, serialize
from .resx import CostModel, ResourceReport, estimate, estimate_artifact, predicted_lookup_qubits, predicted_row_depth
from .sim import check_lookup, run_basis, truth_table
from .synth import (
    LookupArtifact,
    Table,
    apply_function_with_lookup,
    build_lookup,
    build_select,
    build_subtract_const,
    build_swap_network,
    make_clean,
)

__version__ = "0.1.0"
