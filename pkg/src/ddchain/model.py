"""Physical parameters, the Peierls phase integral, the bath spectral weight
and the dissipator coefficient series.

The gain/loss coefficients multiply the particle-injection and
particle-removal parts of the dissipator.  They are evaluated from a
truncated double Bessel sum that factorizes into a product of two single
sums; an independent real-time quadrature path is provided as a cross
check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import _kernels
from .specfun import (EULER_GAMMA, BesselTable, bessel_table, fermi,
                      re_digamma_half_offset)


@dataclass(frozen=True)
class ModelParams:
    """Chain + bath parameters; gamma is the energy unit (hbar = 1).

    omega is the Bloch frequency of the DC drive, big_gamma the golden-rule
    system-bath rate, beta the inverse bath temperature.
    """

    omega: float
    big_gamma: float
    beta: float
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.big_gamma < 0:
            raise ValueError(f"big_gamma must be >= 0, got {self.big_gamma}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.omega < 0:
            raise ValueError(
                f"omega must be >= 0 (negative drive maps to k -> -k), got {self.omega}")

    @property
    def bare_coupling_sq(self) -> float:
        """g^2 N(0), the squared coupling times the flat density of states."""
        return self.big_gamma / math.pi

    @property
    def bloch_period(self) -> float:
        if self.omega == 0:
            raise ValueError("Bloch period undefined at omega = 0")
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class SpectralWeight:
    """Complex bath weights F(Omega*ell) for ell in [-ell_max, ell_max].

    Re F(Omega*ell) is the Fermi factor at -Omega*ell; the imaginary part
    carries the (even-in-ell) digamma contribution.
    """

    beta: float
    omega: float
    ell_max: int
    values: np.ndarray = field(repr=False)  # complex, index ell + ell_max

    def value(self, ell: int) -> complex:
        return complex(self.values[ell + self.ell_max])


def spectral_weight(params: ModelParams, ell_max: int) -> SpectralWeight:
    """F(Omega*ell) = n_F(-Omega*ell) + (i/pi)[Re psi(1/2 - i*beta*Omega*ell/2pi) + gamma_EM]."""
    if ell_max < 0:
        raise ValueError(f"ell_max must be >= 0, got {ell_max}")
    ells = np.arange(-ell_max, ell_max + 1)
    vals = np.empty(2 * ell_max + 1, dtype=np.complex128)
    for i, ell in enumerate(ells):
        re = fermi(-params.omega * ell, params.beta)
        im = (re_digamma_half_offset(params.beta * params.omega * ell / (2.0 * math.pi))
              + EULER_GAMMA) / math.pi
        vals[i] = re + 1j * im
    return SpectralWeight(beta=params.beta, omega=params.omega,
                          ell_max=ell_max, values=vals)


def peierls_phase_integral(params: ModelParams, k: float, t: float) -> float:
    """Accumulated hopping phase f_k(t) = -2 gamma sin(k + Omega t) / Omega."""
    if params.omega == 0:
        raise ValueError("peierls_phase_integral requires omega > 0; "
                         "use the quadrature path at omega = 0")
    return -2.0 * params.gamma * math.sin(k + params.omega * t) / params.omega


@dataclass(frozen=True)
class CoefficientSeries:
    """Bessel-series representation of the dissipator coefficients at one
    momentum.  Immutable; safe to share across workers."""

    params: ModelParams
    k: float
    bessel: BesselTable
    weights: SpectralWeight

    @property
    def ell_max(self) -> int:
        return self.bessel.ell_max

    @classmethod
    def build(cls, params: ModelParams, k: float, tol: float = 1e-15) -> "CoefficientSeries":
        if params.omega <= 0:
            raise ValueError("CoefficientSeries requires omega > 0 "
                             "(Bessel argument 2*gamma/Omega diverges)")
        table = bessel_table(2.0 * params.gamma / params.omega, tol)
        weights = spectral_weight(params, table.ell_max)
        return cls(params=params, k=k, bessel=table, weights=weights)

    def gain(self, t: float) -> complex:
        """Particle-injection coefficient a_k(t); Bloch periodic in t."""
        g, _ = _kernels.coeff_pair(self.k + self.params.omega * t,
                                   self.bessel.values, self.weights.values,
                                   self.params.big_gamma)
        return g

    def loss(self, t: float) -> complex:
        """Particle-removal coefficient A_k(t); Bloch periodic in t."""
        _, l = _kernels.coeff_pair(self.k + self.params.omega * t,
                                   self.bessel.values, self.weights.values,
                                   self.params.big_gamma)
        return l

    def pair(self, t: float) -> tuple[complex, complex]:
        return _kernels.coeff_pair(self.k + self.params.omega * t,
                                   self.bessel.values, self.weights.values,
                                   self.params.big_gamma)


def _phase_diff_back(params: ModelParams, k: float, t: float, s: np.ndarray) -> np.ndarray:
    """f_k(t-s) - f_k(t), valid also at omega = 0."""
    if params.omega > 0:
        f0 = peierls_phase_integral(params, k, t)
        return -2.0 * params.gamma * np.sin(k + params.omega * (t - s)) / params.omega - f0
    # constant dispersion: f is linear in time
    return 2.0 * params.gamma * math.cos(k) * s


def gain_quadrature(params: ModelParams, k: float, t: float,
                    cutoff_time: float, step: float) -> complex:
    """Direct real-time evaluation of the gain coefficient.

    The delta part of the bath correlator sits on the integration boundary
    and carries half weight, contributing exactly Gamma/2 (the unique
    convention consistent with the series path).  The cosech part has an
    integrable form once the bandwidth counterterm cosech(x) e^(-x)
    (x = pi s / beta) is subtracted; the counterterm only removes the
    momentum-independent divergent constant that cancels between the gain
    and loss channels of the master equation, and its finite remainder is
    what the digamma weight encodes.

    Composite Simpson on a uniform grid; cutoff_time >= 20*beta and
    step <= beta/200 are recommended for ~1e-6*Gamma accuracy.
    """
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    if cutoff_time < params.beta:
        raise ValueError(
            f"cutoff_time must be >= beta = {params.beta}, got {cutoff_time}")
    if params.big_gamma == 0:
        return 0.0 + 0.0j
    n = int(math.ceil(cutoff_time / step))
    if n % 2:
        n += 1
    s = np.linspace(0.0, cutoff_time, n + 1)
    beta = params.beta
    fm = _phase_diff_back(params, k, t, s[1:])
    x = math.pi * s[1:] / beta
    cosech = 1.0 / np.sinh(x)
    integrand = np.empty(n + 1, dtype=np.complex128)
    # removable singularity at s = 0: cosech ~ beta/(pi s) while the brace
    # vanishes like -(pi/beta + 2i gamma cos(k + Omega t)) s
    integrand[0] = -1.0 - 2j * params.gamma * beta * math.cos(k + params.omega * t) / math.pi
    integrand[1:] = cosech * (np.exp(-x) - np.exp(1j * fm))
    val = simpson(integrand, x=s)
    return params.big_gamma * (0.5 + 1j * val / beta)
