"""Steady-state observables: momentum occupation profiles, the DC current
vs field strength, and the accuracy norm comparing the master equation
against the exact finite-bath benchmark.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import IntegrationError
from .master import steady_occupation_at_phase
from .model import CoefficientSeries, ModelParams, spectral_weight
from .oracle import FiniteBathSpec, exact_momentum_profile
from .specfun import bessel_table


@dataclass(frozen=True)
class MomentumProfile:
    """Steady-state n(k_m) on a uniform grid over (-pi, pi]."""

    params: ModelParams
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have matching shapes")


def momentum_profile(params: ModelParams, n_k: int = 256) -> MomentumProfile:
    """Closed-form long-time occupation profile of the driven chain."""
    if n_k < 64:
        raise ValueError("n_k must be at least 64")
    series = CoefficientSeries.build(params, k=0.0)
    grid = -math.pi + 2.0 * math.pi * (np.arange(n_k) + 1) / n_k
    vals = steady_occupation_at_phase(params, series, grid)
    return MomentumProfile(params=params, grid=grid, values=np.atleast_1d(vals))


@dataclass(frozen=True)
class CurrentPoint:
    omega: float
    big_gamma: float
    current: float


def dc_current_closed_form(params: ModelParams) -> float:
    """Time-averaged steady-state particle current.

    Only the two Bessel-order-offset-one terms survive the combined k and
    Bloch-period averages; each pairs a spectral weight with a Lorentzian
    in the drive frequency.  The prefactor 2*gamma*Gamma is fixed by exact
    agreement with the defining velocity average
    J = (2 pi)^-1 int dk v(k) n(k), v(k) = 2 gamma sin(k).
    """
    if params.omega <= 0:
        raise ValueError("closed-form current requires omega > 0")
    if params.big_gamma <= 0:
        raise ValueError("closed-form current requires big_gamma > 0")
    table = bessel_table(2.0 * params.gamma / params.omega)
    lmax = table.ell_max
    weights = spectral_weight(params, lmax + 1)
    j = np.zeros(2 * lmax + 3)
    j[1:-1] = table.values  # pad so orders ell +/- 1 stay in range
    f = weights.values
    pref = 2.0 * params.gamma * params.big_gamma
    up = np.sum(j * np.roll(j, -1) * f) / (params.omega - 2j * params.big_gamma)
    down = np.sum(j * np.roll(j, 1) * f) / (params.omega + 2j * params.big_gamma)
    # roll wrap-around terms vanish: j is zero-padded at both ends
    return float(pref * (up.real + down.real))


def current_vs_field(omegas, big_gamma: float, beta: float,
                     gamma: float = 1.0) -> list[CurrentPoint]:
    return [CurrentPoint(omega=float(w), big_gamma=big_gamma,
                         current=dc_current_closed_form(
                             ModelParams(omega=float(w), big_gamma=big_gamma,
                                         beta=beta, gamma=gamma)))
            for w in omegas]


def accuracy_norm(approx: np.ndarray, exact: np.ndarray,
                  grid_a: np.ndarray | None = None,
                  grid_b: np.ndarray | None = None) -> float:
    """Mean relative deviation of the approximate profile from the exact one.

    norm = mean_k |n(k) - n_ex(k)| / n_ex(k); both profiles must be
    positive and, when grids are supplied, sampled at the same momenta.
    """
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if approx.shape != exact.shape:
        raise ValueError("profiles must have matching shapes")
    if grid_a is not None and grid_b is not None:
        if grid_a.shape != grid_b.shape or np.abs(grid_a - grid_b).max() > 1e-12:
            raise ValueError("profiles are sampled on different momentum grids")
    if exact.min() <= 0.0:
        raise ValueError("exact profile must be strictly positive")
    return float(np.mean(np.abs(approx - exact) / exact))


def profile_accuracy(params: ModelParams, n_k: int = 64,
                     n_modes: int = 280, bandwidth: float | None = None,
                     dt: float | None = None,
                     burn_factor: float = 20.0) -> float:
    """Accuracy norm of the master-equation profile at one (Omega, Gamma).

    The bath size is enlarged automatically if the sampling window would
    approach the recurrence time.
    """
    if bandwidth is None:
        bandwidth = 10.0 * params.gamma
    t_need = (burn_factor / (2.0 * params.big_gamma)
              + 2.0 * math.pi / params.omega)
    n_min = int(math.ceil(1.3 * t_need * bandwidth / (2.0 * math.pi)))
    bath = FiniteBathSpec.build(params, n_modes=max(n_modes, n_min),
                                bandwidth=bandwidth)
    grid, exact = exact_momentum_profile(params, bath, n_k=n_k, dt=dt,
                                         burn_factor=burn_factor)
    series = CoefficientSeries.build(params, k=0.0)
    approx = steady_occupation_at_phase(params, series, grid)
    return accuracy_norm(approx, exact, grid, grid)


def norm_heatmap(omegas, big_gammas, beta: float, gamma: float = 1.0,
                 n_k: int = 64, **kwargs) -> np.ndarray:
    """Accuracy-norm grid, shape (len(big_gammas), len(omegas)).

    Cells whose benchmark run fails numerically are set to NaN with a
    warning instead of aborting the sweep.
    """
    out = np.empty((len(big_gammas), len(omegas)))
    for i, gg in enumerate(big_gammas):
        for jx, w in enumerate(omegas):
            params = ModelParams(omega=float(w), big_gamma=float(gg),
                                 beta=beta, gamma=gamma)
            try:
                out[i, jx] = profile_accuracy(params, n_k=n_k, **kwargs)
            except (IntegrationError, ValueError) as err:
                warnings.warn(f"heatmap cell (Gamma={gg}, Omega={w}) "
                              f"failed: {err}", stacklevel=2)
                out[i, jx] = math.nan
    return out
