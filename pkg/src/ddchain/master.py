"""Time evolution of the 2x2 momentum-mode density matrix and the scalar
occupation dynamics derived from it.

Three independent routes to n_k(t) are provided: RK4 on the full density
matrix, the exponential-kernel integral solution, and the long-time closed
form.  They are cross-checked in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import IntegrationError, _kernels
from .model import CoefficientSeries, ModelParams

TRACE_DRIFT_LIMIT = 1e-6


@dataclass
class QubitState:
    """2x2 density matrix of one momentum mode; |0> empty, |1> occupied."""

    matrix: np.ndarray

    @classmethod
    def empty(cls) -> "QubitState":
        return cls(np.diag([1.0, 0.0]).astype(complex))

    @classmethod
    def occupied(cls) -> "QubitState":
        return cls(np.diag([0.0, 1.0]).astype(complex))

    @classmethod
    def from_occupation(cls, n: float) -> "QubitState":
        if not 0.0 <= n <= 1.0:
            raise ValueError(f"occupation must lie in [0, 1], got {n}")
        return cls(np.diag([1.0 - n, n]).astype(complex))

    @property
    def occupation(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def coherence(self) -> complex:
        return complex(self.matrix[0, 1])

    def validate(self, tol: float = 1e-10) -> None:
        m = self.matrix
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > tol:
            raise ValueError(f"trace deviates from 1 by {np.trace(m).real - 1.0:.3e}")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")


@dataclass
class TrajectoryRecord:
    """Sampled occupation (and optionally coherence / full state) history."""

    times: np.ndarray
    occupations: np.ndarray
    coherences: np.ndarray | None = None
    snapshots: list[np.ndarray] | None = None

    def write_csv(self, path, header_lines=()) -> None:
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write("t,n_k,re_rho01,im_rho01\n")
            coh = (self.coherences if self.coherences is not None
                   else np.zeros_like(self.times, dtype=complex))
            for t, n, c in zip(self.times, self.occupations, coh):
                fh.write(f"{t:.17g},{n:.17g},{c.real:.17g},{c.imag:.17g}\n")


def default_time_step(params: ModelParams) -> float:
    return min(0.01 / params.gamma, params.bloch_period / 200.0)


def evolve_density_matrix(series: CoefficientSeries, rho0: QubitState,
                          t_final: float, dt: float | None = None,
                          sample_stride: int = 1,
                          t0: float = 0.0) -> TrajectoryRecord:
    """Integrate the momentum-mode master equation with fixed-step RK4.

    Coefficients are evaluated exactly at the RK sub-step times.  The state
    is carried as (p0, p1, coherence), which is Hermitian by construction;
    trace drift beyond TRACE_DRIFT_LIMIT raises IntegrationError.
    """
    params = series.params
    max_dt = default_time_step(params)
    if dt is None:
        dt = max_dt
    elif dt > max_dt * (1 + 1e-12):
        raise ValueError(f"dt = {dt} exceeds the stability bound {max_dt}")
    if t_final <= t0:
        raise ValueError("t_final must exceed t0")
    n_steps = int(math.ceil((t_final - t0) / dt - 1e-12))
    n_samples = n_steps // sample_stride
    times = np.empty(n_samples + 1)
    occs = np.empty(n_samples + 1)
    cohs = np.empty(n_samples + 1, dtype=np.complex128)
    m = rho0.matrix
    times[0] = t0
    occs[0] = m[1, 1].real
    cohs[0] = m[0, 1]
    p0, p1, coh, n_got = _kernels._rk4_qubit(
        m[0, 0].real, m[1, 1].real, complex(m[0, 1]),
        t0, dt, n_steps, sample_stride,
        series.k, params.omega, params.gamma, params.big_gamma,
        series.bessel.values, series.weights.values,
        times[1:], occs[1:], cohs[1:])
    drift = abs(p0 + p1 - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise IntegrationError(f"trace drifted by {drift:.3e}")
    return TrajectoryRecord(times=times[:n_got + 1], occupations=occs[:n_got + 1],
                            coherences=cohs[:n_got + 1])


def occupation_ode_rhs(series: CoefficientSeries, n: float, t: float) -> float:
    """dn/dt = -2 Gamma n + 2 Re gain(t)."""
    return -2.0 * series.params.big_gamma * n + 2.0 * series.gain(t).real


def occupation_integral(series: CoefficientSeries, n0: float,
                        t0: float, t: float) -> float:
    """Integral solution of the occupation ODE.

    n(t) = exp(-2 Gamma (t - t0)) n0
           + int_t0^t ds exp(-2 Gamma (t - s)) 2 Re gain(s),
    with the integral evaluated adaptively to 1e-9 absolute accuracy.
    """
    if t < t0:
        raise ValueError("t must be >= t0")
    if t == t0:
        return n0
    gam2 = 2.0 * series.params.big_gamma

    def integrand(s):
        return math.exp(-gam2 * (t - s)) * 2.0 * series.gain(s).real

    val, _ = quad(integrand, t0, t, epsabs=1e-9, epsrel=1e-11, limit=4000)
    return math.exp(-gam2 * (t - t0)) * n0 + val


def steady_occupation_at_phase(params: ModelParams, series: CoefficientSeries,
                               theta) -> np.ndarray:
    """Long-time occupation as a function of the drifting momentum
    k_m = k + Omega t (entering only through theta = k_m)."""
    if params.big_gamma <= 0:
        raise ValueError("steady state requires big_gamma > 0")
    j = series.bessel.values
    f = series.weights.values
    ells = np.arange(-series.ell_max, series.ell_max + 1)
    dl = ells[:, None] - ells[None, :]  # ell - ell'
    weight = (np.outer(j * f, j)
              / (2.0 * params.big_gamma - 1j * dl * params.omega))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phases = np.exp(-1j * np.multiply.outer(dl, theta))
    vals = 2.0 * params.big_gamma * np.real(
        np.tensordot(weight, phases, axes=([0, 1], [0, 1])))
    return vals if vals.size > 1 else vals[0]


def steady_state_occupation(series: CoefficientSeries, t: float) -> float:
    """Closed-form long-time n_k(t); depends on k, t only through k + Omega t."""
    params = series.params
    theta = series.k + params.omega * t
    return float(steady_occupation_at_phase(params, series, theta))
