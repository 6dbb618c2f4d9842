"""Fixed-point register formats, encoding and register sizing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import FormatRangeError, TableTooLargeError

MAX_INPUT_BITS = 24


@dataclass(frozen=True)
class FxFormat:
    """Binary fixed-point register layout.

    Bit 0 is the least significant bit. Signed formats use two's complement,
    so the sign bit is the most significant one and is not counted in
    ``integer_bits``.
    """

    total_bits: int
    integer_bits: int
    signed: bool = False

    def __post_init__(self):
        if self.total_bits < 1:
            raise ValueError(f"total_bits must be positive, got {self.total_bits}")
        if self.integer_bits < 0:
            raise ValueError(f"integer_bits must be non-negative, got {self.integer_bits}")
        if self.fractional_bits < 0:
            raise ValueError(
                f"integer_bits={self.integer_bits} plus sign bit exceeds total_bits={self.total_bits}"
            )

    @property
    def fractional_bits(self) -> int:
        return self.total_bits - self.integer_bits - int(self.signed)

    @property
    def ulp(self) -> float:
        return math.ldexp(1.0, -self.fractional_bits)

    @property
    def min_int(self) -> int:
        return -(1 << (self.total_bits - 1)) if self.signed else 0

    @property
    def max_int(self) -> int:
        return (1 << (self.total_bits - 1)) - 1 if self.signed else (1 << self.total_bits) - 1

    @property
    def min_value(self) -> float:
        return math.ldexp(self.min_int, -self.fractional_bits)

    @property
    def max_value(self) -> float:
        return math.ldexp(self.max_int, -self.fractional_bits)

    @property
    def size(self) -> int:
        """Number of distinct codes, ``2**total_bits``."""
        return 1 << self.total_bits


@dataclass(frozen=True)
class Domain:
    x_min: float
    x_max: float

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError(f"domain bounds must be finite, got ({self.x_min}, {self.x_max})")
        if not self.x_min < self.x_max:
            raise ValueError(f"invalid domain: x_min={self.x_min} must be < x_max={self.x_max}")


@dataclass(frozen=True)
class Tolerances:
    eps_in: float
    eps_out: float

    def __post_init__(self):
        if not (math.isfinite(self.eps_in) and self.eps_in > 0):
            raise ValueError(f"eps_in must be positive, got {self.eps_in}")
        if not (math.isfinite(self.eps_out) and 0 < self.eps_out < 1):
            raise ValueError(f"eps_out must lie in (0, 1), got {self.eps_out}")


def fractional_bits_for(eps: float) -> int:
    """Smallest ``f >= 0`` with ``2**-f <= eps``."""
    if not (math.isfinite(eps) and eps > 0):
        raise ValueError(f"precision must be positive and finite, got {eps}")
    # eps = mant * 2**e with mant in [0.5, 1) gives ceil(log2(1/eps)) = 1 - e exactly
    return max(0, 1 - math.frexp(eps)[1])


def integer_bits_for(magnitude: float) -> int:
    """Bits needed left of the binary point: ``max(0, floor(log2(M)) + 1)``."""
    if magnitude <= 0:
        return 0
    return max(0, math.frexp(magnitude)[1])


def _fit_format(low: float, high: float, frac: int) -> FxFormat:
    signed = low < 0
    integer = integer_bits_for(max(abs(low), abs(high)))
    if integer + frac + int(signed) == 0:
        integer = 1
    while True:
        fmt = FxFormat(integer + frac + int(signed), integer, signed)
        # rounding can push a bound one ulp past the representable edge
        lo = round(math.ldexp(low, frac))
        hi = round(math.ldexp(high, frac))
        if fmt.min_int <= lo and hi <= fmt.max_int:
            return fmt
        integer += 1


def input_format(domain: Domain, eps_in: float, *, allow_large: bool = False) -> FxFormat:
    """Size the input register so the grid spacing is at most ``eps_in``.

    Raises
    ------
    TableTooLargeError
        If the register would exceed ``MAX_INPUT_BITS`` and ``allow_large`` is false.
    """
    if not (math.isfinite(eps_in) and eps_in > 0):
        raise ValueError(f"eps_in must be positive, got {eps_in}")
    fmt = _fit_format(domain.x_min, domain.x_max, fractional_bits_for(eps_in))
    if fmt.total_bits > MAX_INPUT_BITS and not allow_large:
        raise TableTooLargeError(fmt.total_bits, MAX_INPUT_BITS)
    return fmt


def output_format(values: Iterable[float], eps_out: float) -> FxFormat:
    """Size the output register to hold every value at precision ``eps_out``."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if arr.size == 0:
        raise ValueError("output_format needs at least one value")
    if not np.all(np.isfinite(arr)):
        raise ValueError("output values must be finite")
    return _fit_format(float(arr.min()), float(arr.max()), fractional_bits_for(eps_out))


def encode(x: float, fmt: FxFormat) -> int:
    """Round ``x`` to the nearest grid point (ties to even) and return its bit code."""
    if not math.isfinite(x):
        raise FormatRangeError(f"cannot encode non-finite value {x}", fmt.min_value, fmt.max_value)
    k = round(math.ldexp(x, fmt.fractional_bits))
    if not fmt.min_int <= k <= fmt.max_int:
        raise FormatRangeError(
            f"{x} is outside the representable interval [{fmt.min_value}, {fmt.max_value}]",
            fmt.min_value,
            fmt.max_value,
        )
    return k % fmt.size


def encode_many(values: Sequence[float] | np.ndarray, fmt: FxFormat) -> list[int]:
    """Vectorised :func:`encode`; returns Python ints so wide formats stay exact."""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise FormatRangeError("cannot encode non-finite values", fmt.min_value, fmt.max_value)
    scaled = np.rint(np.ldexp(arr, fmt.fractional_bits))
    ks = [int(k) for k in scaled]
    if ks and (min(ks) < fmt.min_int or max(ks) > fmt.max_int):
        raise FormatRangeError(
            f"values outside the representable interval [{fmt.min_value}, {fmt.max_value}]",
            fmt.min_value,
            fmt.max_value,
        )
    mod = fmt.size
    return [k % mod for k in ks]


def to_signed_int(code: int, fmt: FxFormat) -> int:
    if fmt.signed and code >= 1 << (fmt.total_bits - 1):
        return code - fmt.size
    return code


def decode(code: int, fmt: FxFormat) -> float:
    if not 0 <= code < fmt.size:
        raise FormatRangeError(f"code {code} does not fit in {fmt.total_bits} bits")
    return math.ldexp(to_signed_int(code, fmt), -fmt.fractional_bits)


def grid(domain: Domain, fmt: FxFormat) -> list[float]:
    """Input sample points ``x_min + i*ulp`` for every code, clamped to ``x_max``."""
    ulp = fmt.ulp
    return [min(domain.x_min + i * ulp, domain.x_max) for i in range(fmt.size)]
