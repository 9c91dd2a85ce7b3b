"""Finitely supported convolution stencils and their symbol expansions.

A stencil holds the coefficients a_l of one explicit time step

    (L_a u)_j = sum_l a_l u_{j-l},

together with the offset of the first coefficient.  The symbol (amplification
factor) is F_a(theta) = sum_l a_l exp(i l theta).  A scheme is admissible when
it is conservative (sum a_l = 1), dissipative away from theta = 0, and its
symbol expands near the origin as

    F_a(theta) = exp(i alpha theta - i c3 theta^3 - c4 theta^4 + O(theta^5))

with c3 != 0 and c4 > 0.  The second cumulant must vanish for the expansion to
have this form; its magnitude is reported so callers can see how a candidate
scheme fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Stencil",
    "SymbolExpansion",
    "AssumptionAudit",
    "lax_wendroff",
    "beam_warming",
    "symbol_eval",
    "modulus_identity_check",
    "dissipation_check",
    "expansion_coefficients",
    "assumption_audit",
]

# Admissibility thresholds.  The cumulants come from exact coefficient sums,
# so anything above rounding noise is a genuine violation.
KAPPA2_TOL = 1e-10
C3_FLOOR = 1e-12
C4_FLOOR = 1e-12
CONSERVATION_TOL = 1e-12


def _trimmed(coefficients, min_offset):
    """Drop exactly-zero leading/trailing coefficients, tracking the offset."""
    coeffs = [complex(c) for c in coefficients]
    lo = 0
    while lo < len(coeffs) and coeffs[lo] == 0:
        lo += 1
    if lo == len(coeffs):
        raise ValueError("stencil has no nonzero coefficient")
    hi = len(coeffs)
    while coeffs[hi - 1] == 0:
        hi -= 1
    return tuple(coeffs[lo:hi]), min_offset + lo


@dataclass(frozen=True)
class Stencil:
    """Coefficients a_l for l = min_offset .. min_offset + len(coefficients) - 1.

    The first and last stored coefficients are nonzero; constructors trim
    exact zeros at the ends so the support is tight.
    """

    min_offset: int
    coefficients: tuple
    label: str = ""

    def __post_init__(self):
        coeffs, lo = _trimmed(self.coefficients, self.min_offset)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "min_offset", lo)

    @property
    def max_offset(self) -> int:
        return self.min_offset + len(self.coefficients) - 1

    @property
    def support_width(self) -> int:
        return self.max_offset - self.min_offset

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(self.min_offset, self.max_offset + 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=complex)

    def coefficient(self, offset: int) -> complex:
        if self.min_offset <= offset <= self.max_offset:
            return self.coefficients[offset - self.min_offset]
        return 0.0

    def coefficient_sum(self) -> complex:
        return complex(math.fsum(c.real for c in self.coefficients),
                       math.fsum(c.imag for c in self.coefficients))

    def is_conservative(self, tol: float = CONSERVATION_TOL) -> bool:
        return abs(self.coefficient_sum() - 1.0) <= tol

    def reflected(self) -> "Stencil":
        """Spatial reflection a_l -> a_{-l}; flips the sign of odd cumulants."""
        return Stencil(-self.max_offset, self.coefficients[::-1],
                       label=self.label + "~" if self.label else "")


def lax_wendroff(lam: float) -> Stencil:
    """Second order three point scheme for u_t + u_x = 0 at Courant number lam.

    Coefficients: a_1 = (lam + lam^2)/2, a_0 = 1 - lam^2, a_{-1} = -(lam - lam^2)/2.
    Requires 0 < lam <= 1; at lam = 1 the stencil degenerates to a pure shift.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lax_wendroff requires 0 < lambda <= 1, got {lam}")
    a_m1 = -(lam - lam * lam) / 2.0
    a_0 = 1.0 - lam * lam
    a_p1 = (lam + lam * lam) / 2.0
    return Stencil(-1, (a_m1, a_0, a_p1), label=f"lw(lambda={lam:g})")


def beam_warming(lam: float) -> Stencil:
    """Second order upwind scheme for u_t + u_x = 0 at Courant number lam.

    Coefficients: a_0 = (1-lam)(2-lam)/2, a_1 = lam(2-lam), a_2 = -(lam - lam^2)/2.
    Requires 0 < lam <= 2; lam = 1 and lam = 2 degenerate to pure shifts.
    """
    if not 0.0 < lam <= 2.0:
        raise ValueError(f"beam_warming requires 0 < lambda <= 2, got {lam}")
    a_0 = (1.0 - lam) * (2.0 - lam) / 2.0
    a_1 = lam * (2.0 - lam)
    a_2 = -(lam - lam * lam) / 2.0
    return Stencil(0, (a_0, a_1, a_2), label=f"bw(lambda={lam:g})")


def symbol_eval(stencil: Stencil, theta):
    """Evaluate F_a(theta) = sum_l a_l exp(i l theta); theta scalar or array."""
    th = np.asarray(theta, dtype=float)
    out = np.zeros(th.shape, dtype=complex)
    for offset, coeff in zip(stencil.offsets, stencil.coefficients):
        out += coeff * np.exp(1j * offset * th)
    if np.isscalar(theta) or th.ndim == 0:
        return complex(out)
    return out


def modulus_identity_check(kind: str, lam: float, grid_size: int = 4096) -> float:
    """Max abs deviation of |F_a|^2 from its closed form on a symmetric grid.

    kind "lw": |F|^2 = 1 - 4 lam^2 (1 - lam^2) sin^4(theta/2)
    kind "bw": |F|^2 = 1 - 4 lam (1-lam)^2 (2-lam) sin^4(theta/2)
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    if kind == "lw":
        stencil = lax_wendroff(lam)
        factor = 4.0 * lam**2 * (1.0 - lam**2)
    elif kind == "bw":
        stencil = beam_warming(lam)
        factor = 4.0 * lam * (1.0 - lam) ** 2 * (2.0 - lam)
    else:
        raise ValueError(f"unknown scheme kind {kind!r}")
    theta = np.linspace(-math.pi, math.pi, grid_size)
    modulus_sq = np.abs(symbol_eval(stencil, theta)) ** 2
    closed = 1.0 - factor * np.sin(theta / 2.0) ** 4
    return float(np.max(np.abs(modulus_sq - closed)))


def dissipation_check(stencil: Stencil, grid_size: int = 4096,
                      exclusion_radius: float = 1e-3):
    """Sample |F_a| on [-pi, pi] outside (-r, r); return (dissipative, min_margin).

    min_margin = 1 - max |F_a| over the sampled set.  The exclusion radius
    keeps the neutral point theta = 0 out of the sample; it must satisfy
    0 < r < pi.
    """
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    if not 0.0 < exclusion_radius < math.pi:
        raise ValueError("exclusion_radius must lie in (0, pi)")
    theta = np.linspace(-math.pi, math.pi, grid_size)
    theta = theta[np.abs(theta) >= exclusion_radius]
    modulus = np.abs(symbol_eval(stencil, theta))
    min_margin = float(1.0 - np.max(modulus))
    return min_margin > 0.0, min_margin


@dataclass(frozen=True)
class SymbolExpansion:
    """Cumulant data of log F_a at theta = 0.

    alpha is the drift, kappa2 the magnitude of the second cumulant (zero for
    schemes matching the target expansion), c3 the signed dispersion
    coefficient, c4 the dissipation coefficient, and residual5 an empirical
    bound for the fifth order remainder
    |log F_a(theta) - (i alpha theta - i c3 theta^3 - c4 theta^4)| / |theta|^5
    over a probe grid near the origin.
    """

    alpha: float
    kappa2: float
    c3: float
    c4: float
    residual5: float


def _raw_moments(stencil: Stencil, upto: int):
    """Exact power sums m_k = sum_l l^k a_l for k = 0..upto."""
    moments = []
    for k in range(upto + 1):
        moments.append(complex(
            math.fsum((offset ** k) * c.real
                      for offset, c in zip(stencil.offsets, stencil.coefficients)),
            math.fsum((offset ** k) * c.imag
                      for offset, c in zip(stencil.offsets, stencil.coefficients)),
        ))
    return moments


def _cumulants_from_moments(m):
    """First five cumulants from raw moments m[1..5] (m[0] must be 1)."""
    m1, m2, m3, m4, m5 = m[1], m[2], m[3], m[4], m[5]
    k1 = m1
    k2 = m2 - m1 * m1
    k3 = m3 - 3 * m1 * m2 + 2 * m1 ** 3
    k4 = m4 - 4 * m1 * m3 - 3 * m2 * m2 + 12 * m1 * m1 * m2 - 6 * m1 ** 4
    k5 = (m5 - 5 * m1 * m4 - 10 * m2 * m3 + 20 * m1 * m1 * m3
          + 30 * m1 * m2 * m2 - 60 * m1 ** 3 * m2 + 24 * m1 ** 5)
    return k1, k2, k3, k4, k5


def _expansion_from_normalized_moments(stencil: Stencil, moments,
                                       normalization: complex = 1.0) -> SymbolExpansion:
    k1, k2, k3, k4, _k5 = _cumulants_from_moments(moments)
    alpha = k1.real
    c3 = k3.real / 6.0
    c4 = -k4.real / 24.0
    # Residual probe: the model uses only the real cumulant parts, so any
    # imaginary contamination (complex stencils) also lands in residual5.
    theta = np.linspace(-0.1, 0.1, 41)
    theta = theta[theta != 0.0]
    symbol = symbol_eval(stencil, theta) / normalization
    model = 1j * alpha * theta - 1j * c3 * theta ** 3 - c4 * theta ** 4
    residual5 = float(np.max(np.abs(np.log(symbol) - model) / np.abs(theta) ** 5))
    return SymbolExpansion(alpha=alpha, kappa2=abs(k2), c3=c3, c4=c4,
                           residual5=residual5)


def expansion_coefficients(stencil: Stencil) -> SymbolExpansion:
    """Cumulant expansion of log F_a through order five.

    Moments are exact coefficient sums; no numerical differentiation is
    involved.  Raises ValueError for a non-conservative stencil, where the
    expansion around F_a(0) = 1 does not apply.
    """
    moments = _raw_moments(stencil, 5)
    if abs(moments[0] - 1.0) > CONSERVATION_TOL:
        raise ValueError(
            f"stencil is not conservative: sum a_l = {moments[0]:.17g}")
    return _expansion_from_normalized_moments(stencil, moments)


@dataclass(frozen=True)
class AssumptionAudit:
    """Aggregated admissibility report for one stencil."""

    sums_to_one: bool
    dissipative: bool
    min_margin: float
    expansion: SymbolExpansion
    admissible: bool


def assumption_audit(stencil: Stencil, grid_size: int = 4096,
                     exclusion_radius: float = 1e-3) -> AssumptionAudit:
    """Run every admissibility check and combine the verdict.

    A stencil passes when it is conservative, strictly dissipative on the
    sampled grid, has vanishing second cumulant, and has c3 != 0 and c4 > 0
    beyond rounding floors.  Non-conservative stencils are audited against
    the normalized symbol F_a / F_a(0) so the report stays informative.
    """
    moments = _raw_moments(stencil, 5)
    total = moments[0]
    sums_to_one = abs(total - 1.0) <= CONSERVATION_TOL
    normalization = 1.0
    if not sums_to_one and total != 0:
        moments = [mk / total for mk in moments]
        normalization = total
    expansion = _expansion_from_normalized_moments(stencil, moments,
                                                   normalization)
    dissipative, min_margin = dissipation_check(stencil, grid_size,
                                                exclusion_radius)
    admissible = (sums_to_one and dissipative
                  and expansion.kappa2 <= KAPPA2_TOL
                  and abs(expansion.c3) > C3_FLOOR
                  and expansion.c4 > C4_FLOOR)
    return AssumptionAudit(sums_to_one=sums_to_one, dissipative=dissipative,
                           min_margin=min_margin, expansion=expansion,
                           admissible=admissible)
