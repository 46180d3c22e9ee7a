"""Self-contained special functions: integer-order Bessel J, the real part of
the digamma function on the line Re z = 1/2, and the Fermi function.

Everything here is a pure function of its arguments; tables are immutable
after construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Euler-Mascheroni constant (mathematical constant, not a fitted value).
EULER_GAMMA = 0.57721566490153286

# Bernoulli numbers B_2..B_16 entering the asymptotic digamma series.
_BERNOULLI_TERMS = (
    1.0 / 12.0,          # B2/2
    -1.0 / 120.0,        # B4/4
    1.0 / 252.0,         # B6/6
    -1.0 / 240.0,        # B8/8
    1.0 / 132.0,         # B10/10
    -691.0 / 32760.0,    # B12/12
    1.0 / 12.0,          # B14/14
    -3617.0 / 8160.0,    # B16/16
)

_RESCALE = 1e250


def _bessel_series(order: int, x: float) -> float:
    """Power series for J_n(x), reliable for small |x|."""
    half = 0.5 * x
    term = half**order / math.factorial(order)
    total = term
    for m in range(1, 40):
        term *= -half * half / (m * (m + order))
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def _miller_start(order: int, x: float) -> int:
    # Orders beyond max(n, x) decay super-exponentially; the transition
    # region widens like x^(2/3), so pad by that scale.
    base = max(order, int(x))
    return base + 20 + int(3.0 * base ** (2.0 / 3.0)) if base else 24


def _bessel_downward(max_order: int, x: float) -> np.ndarray:
    """All of J_0(x)..J_max_order(x) by Miller's downward recurrence,
    normalized with J_0 + 2*sum(J_2m) = 1."""
    start = _miller_start(max_order, x)
    if start % 2:
        start += 1
    out = np.zeros(max_order + 1)
    jp = 0.0
    jc = 1e-300
    norm = 0.0
    for m in range(start, 0, -1):
        jm = (2.0 * m / x) * jc - jp
        jp = jc
        jc = jm
        if m - 1 <= max_order:
            out[m - 1] = jc
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2.0 * jc
        if abs(jc) > _RESCALE:
            jc /= _RESCALE
            jp /= _RESCALE
            norm /= _RESCALE
            out /= _RESCALE
    norm += jc  # J_0 contribution
    return out / norm


def bessel_j(order: int, x: float) -> float:
    """Integer-order Bessel function of the first kind J_order(x).

    Uses the power series for x < 1 and Miller's normalized downward
    recurrence otherwise; relative accuracy ~1e-12 for x up to 1e3.
    """
    if not math.isfinite(x):
        raise ValueError(f"bessel_j requires finite x, got {x!r}")
    if x < 0:
        raise ValueError(f"bessel_j requires x >= 0, got {x!r}")
    if abs(order) > 10**6:
        raise ValueError(f"|order| too large: {order}")
    n = abs(order)
    sign = -1.0 if (order < 0 and n % 2 == 1) else 1.0
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x < 1.0:
        return sign * _bessel_series(n, x)
    return sign * _bessel_downward(n, x)[n]


@dataclass(frozen=True)
class BesselTable:
    """J_ell(x) for ell in [-ell_max, ell_max], with the truncation order
    chosen so the discarded tail is negligible."""

    x: float
    ell_max: int
    values: np.ndarray = field(repr=False)  # index ell + ell_max

    def value(self, ell: int) -> float:
        return float(self.values[ell + self.ell_max])

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.ell_max, self.ell_max + 1)

    @property
    def positive_side(self) -> np.ndarray:
        """J_0..J_ell_max."""
        return self.values[self.ell_max:]


def bessel_table(x: float, tol: float = 1e-15) -> BesselTable:
    """Tabulate J_ell(x) for all ell in [-ell_max, ell_max].

    ell_max is the smallest integer >= x + 20 with |J_ell_max(x)| < tol.
    """
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"bessel_table requires finite x >= 0, got {x!r}")
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")
    ell_max = int(math.ceil(x + 20.0))
    if x == 0.0:
        pos = np.zeros(ell_max + 1)
        pos[0] = 1.0
    else:
        while abs(bessel_j(ell_max, x)) >= tol:
            ell_max += 10
        pos = _bessel_downward(ell_max, x)
    values = np.empty(2 * ell_max + 1)
    values[ell_max:] = pos
    signs = np.where(np.arange(1, ell_max + 1) % 2 == 1, -1.0, 1.0)
    values[:ell_max] = (signs * pos[1:])[::-1]
    return BesselTable(x=x, ell_max=ell_max, values=values)


def re_digamma_half_offset(y: float) -> float:
    """Re psi(1/2 - i*y).

    Shifts the argument up the imaginary strip until |z| > 10, then applies
    the 8-term Bernoulli asymptotic series.  Even in y by reflection
    symmetry of psi about the real axis.
    """
    if not math.isfinite(y):
        raise ValueError(f"re_digamma_half_offset requires finite y, got {y!r}")
    z = complex(0.5, abs(y))
    shift = 0.0
    while abs(z) < 10.0:
        shift -= (1.0 / z).real
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0.0 + 0.0j
    power = inv2
    for coeff in _BERNOULLI_TERMS:
        series += coeff * power
        power *= inv2
    psi = np.log(z) - 0.5 / z - series
    return shift + psi.real


def fermi(energy: float, beta: float) -> float:
    """Fermi-Dirac occupation 1/(exp(beta*energy) + 1), overflow safe."""
    if not beta > 0:
        raise ValueError(f"fermi requires beta > 0, got {beta!r}")
    x = beta * energy
    if x >= 0:
        e = math.exp(-min(x, 745.0))
        return e / (1.0 + e)
    e = math.exp(max(x, -745.0))
    return 1.0 / (1.0 + e)
