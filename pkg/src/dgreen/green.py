"""Exact Green's function tables and grid evolution for convolution stencils.

The Green's function of n steps is the n-fold self convolution of the stencil
coefficients: G^n = L_a^n delta.  Two routes compute it.  The direct route
iterates np.convolve (cost O(n^2 |support|)) and serves as the oracle.  The
spectral route samples the symbol on N >= n * support_width + 1 points, takes
the pointwise n-th power and inverts the DFT; band-limitedness makes this
exact up to rounding, and it is the workhorse at large n.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .stencil import Stencil, symbol_eval

__all__ = [
    "GreenTable",
    "GridFunction",
    "MemoryBudgetError",
    "apply",
    "green_direct",
    "green_spectral",
    "spectral_sweep",
    "evolve",
    "sample_step",
    "cell_average_indicator",
    "norms",
]

MEMORY_BUDGET_ENV = "DG_MEMORY_BUDGET_MB"
DEFAULT_MEMORY_BUDGET_MB = 512.0


class MemoryBudgetError(RuntimeError):
    """Raised when a spectral transform would exceed the memory budget."""


@dataclass(frozen=True)
class GreenTable:
    """Values of G^n_j on its support window [n*min_offset_1, n*max_offset_1].

    min_offset is the index of values[0].  method records which route built
    the table ("direct" or "spectral").
    """

    n: int
    min_offset: int
    values: np.ndarray
    method: str

    @property
    def max_offset(self) -> int:
        return self.min_offset + len(self.values) - 1

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(self.min_offset, self.max_offset + 1)

    def value_at(self, j: int) -> complex:
        if self.min_offset <= j <= self.max_offset:
            return complex(self.values[j - self.min_offset])
        return 0.0


@dataclass(frozen=True)
class GridFunction:
    """A doubly infinite grid sequence stored on a finite window.

    Outside the stored window the sequence takes the declared constant tail
    values.  dx is optional physical cell size metadata; it does not affect
    any computation here.
    """

    min_index: int
    values: np.ndarray
    dx: float | None = None
    left_tail: complex = 0.0
    right_tail: complex = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or len(vals) == 0:
            raise ValueError("values must be a nonempty 1-d array")
        object.__setattr__(self, "values", vals)

    @property
    def max_index(self) -> int:
        return self.min_index + len(self.values) - 1

    def value_at(self, j: int) -> complex:
        if j < self.min_index:
            return complex(self.left_tail)
        if j > self.max_index:
            return complex(self.right_tail)
        return complex(self.values[j - self.min_index])


def apply(stencil: Stencil, u: GridFunction) -> GridFunction:
    """One step (L_a u)_j = sum_l a_l u_{j-l}.

    The stored window widens by the stencil support; tails map to
    tail * sum(a_l), which preserves them for conservative stencils.
    """
    kernel = stencil.as_array()
    width = stencil.support_width
    padded = np.concatenate([
        np.full(width, complex(u.left_tail)),
        u.values,
        np.full(width, complex(u.right_tail)),
    ])
    full = np.convolve(kernel, padded)
    # full[q] sits at index j = min_offset + (min_index - width) + q; keep
    # j in [min_index + min_offset, max_index + max_offset].
    out = full[width:width + len(u.values) + width]
    total = stencil.coefficient_sum()
    return GridFunction(min_index=u.min_index + stencil.min_offset,
                       values=out, dx=u.dx,
                       left_tail=u.left_tail * total,
                       right_tail=u.right_tail * total)


def green_direct(stencil: Stencil, n: int) -> GreenTable:
    """G^n by iterated convolution of the coefficient array.  Oracle route."""
    if n < 1:
        raise ValueError("n must be >= 1")
    kernel = stencil.as_array()
    values = kernel.copy()
    for _ in range(n - 1):
        values = np.convolve(values, kernel)
    return GreenTable(n=n, min_offset=n * stencil.min_offset,
                      values=values, method="direct")


def _spectral_size(n: int, width: int) -> int:
    needed = n * width + 1
    return max(16, 1 << (needed - 1).bit_length())


def _check_budget(size: int, memory_budget_mb: float | None) -> None:
    if memory_budget_mb is None:
        budget = float(os.environ.get(MEMORY_BUDGET_ENV,
                                      DEFAULT_MEMORY_BUDGET_MB))
    else:
        budget = float(memory_budget_mb)
    # Peak holds about four complex128 arrays of the transform length.
    needed_mb = 4 * 16 * size / 1e6
    if needed_mb > budget:
        raise MemoryBudgetError(
            f"spectral transform of length {size} needs about "
            f"{needed_mb:.0f} MB, budget is {budget:.0f} MB")


def green_spectral(stencil: Stencil, n: int,
                   memory_budget_mb: float | None = None) -> GreenTable:
    """G^n via symbol sampling, pointwise power and inverse DFT.

    The transform length is the next power of two at or above
    n * support_width + 1, so no wrap-around touches the support window.
    Raises MemoryBudgetError when the transform would exceed the budget
    (parameter, else the DG_MEMORY_BUDGET_MB environment variable, else
    512 MB).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    width = stencil.support_width
    if width == 0:
        # Pure shift: G^n is a single coefficient at n * min_offset.
        return GreenTable(n=n, min_offset=n * stencil.min_offset,
                          values=stencil.as_array() ** n, method="spectral")
    size = _spectral_size(n, width)
    _check_budget(size, memory_budget_mb)
    theta = 2.0 * math.pi * np.arange(size) / size
    with np.errstate(under="ignore"):
        powered = symbol_eval(stencil, theta) ** n
        coeffs = np.fft.fft(powered) / size
    indices = (np.arange(n * stencil.min_offset, n * stencil.max_offset + 1)
               % size)
    return GreenTable(n=n, min_offset=n * stencil.min_offset,
                      values=coeffs[indices], method="spectral")


def spectral_sweep(stencil: Stencil, n_max: int,
                   memory_budget_mb: float | None = None):
    """Norms of G^n for every n = 1..n_max off one cached symbol grid.

    Returns (sums, l1, l2, linf) arrays of length n_max (index n-1).  The
    symbol powers are accumulated incrementally on a grid sized for n_max, so
    every intermediate table is still alias-free.  Used for dense conservation
    and contraction sweeps where one transform per n would be wasteful.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    width = stencil.support_width
    if width == 0:
        mags = np.abs(np.asarray(
            [stencil.coefficients[0] ** n for n in range(1, n_max + 1)]))
        sums = np.asarray(
            [stencil.coefficients[0] ** n for n in range(1, n_max + 1)])
        return sums, mags.copy(), mags.copy(), mags.copy()
    size = _spectral_size(n_max, width)
    _check_budget(size, memory_budget_mb)
    theta = 2.0 * math.pi * np.arange(size) / size
    symbol = symbol_eval(stencil, theta)
    powered = np.ones(size, dtype=complex)
    sums = np.empty(n_max, dtype=complex)
    l1 = np.empty(n_max)
    l2 = np.empty(n_max)
    linf = np.empty(n_max)
    with np.errstate(under="ignore"):
        for n in range(1, n_max + 1):
            powered *= symbol
            coeffs = np.fft.fft(powered) / size
            window = coeffs[(np.arange(n * stencil.min_offset,
                                       n * stencil.max_offset + 1) % size)]
            mags = np.abs(window)
            sums[n - 1] = window.sum()
            l1[n - 1] = mags.sum()
            l2[n - 1] = math.sqrt(float((mags * mags).sum()))
            linf[n - 1] = mags.max()
    return sums, l1, l2, linf


def evolve(stencil: Stencil, u0: GridFunction, n: int) -> GridFunction:
    """n-fold application of the stencil; evolve(s, delta, n) matches green_direct."""
    if n < 0:
        raise ValueError("n must be >= 0")
    u = u0
    for _ in range(n):
        u = apply(stencil, u)
    return u


def cell_average_indicator(x_lo: float, x_hi: float, half_width: float) -> float:
    """Average of the indicator of [-half_width, half_width] over [x_lo, x_hi]."""
    if x_hi <= x_lo:
        raise ValueError("empty cell")
    overlap = min(x_hi, half_width) - max(x_lo, -half_width)
    return max(0.0, overlap) / (x_hi - x_lo)


def sample_step(dx: float, half_width: float, j_min: int, j_max: int) -> GridFunction:
    """Cell averages of the indicator of [-half_width, half_width].

    Cell j covers [j*dx, (j+1)*dx]; cells straddling an edge of the step get
    the fractional overlap.  Zero tails.
    """
    if dx <= 0:
        raise ValueError("dx must be positive")
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    if j_max < j_min:
        raise ValueError("empty index range")
    values = [cell_average_indicator(j * dx, (j + 1) * dx, half_width)
              for j in range(j_min, j_max + 1)]
    return GridFunction(min_index=j_min, values=np.asarray(values, dtype=complex),
                        dx=dx)


class Norms(NamedTuple):
    l1: float
    l2: float
    linf: float
    sum: complex


def norms(values) -> Norms:
    """l1, l2, linf and the plain sum of a value array or GreenTable."""
    vals = values.values if isinstance(values, GreenTable) else np.asarray(values)
    mags = np.abs(vals)
    return Norms(l1=float(mags.sum()),
                 l2=float(math.sqrt((mags * mags).sum())),
                 linf=float(mags.max()),
                 sum=complex(vals.sum()))
