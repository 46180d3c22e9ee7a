"""Quantum-channel view of the single-mode evolution.

The dynamical map phi_t is carried as a 4x4 real-linear matrix F in the
normalized Pauli basis {I, X, Y, Z}/sqrt(2); F obeys dF/dt = L(t) F with
L the Liouvillian in the same basis.  From F the Choi matrix, a Kraus
decomposition, and the analytic long-time Kraus set are produced and
cross-checked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import IntegrationError, NotCompletelyPositiveError
from .model import CoefficientSeries

_SQRT2 = math.sqrt(2.0)

# Orthonormal Hermitian basis: Tr(sigma_a sigma_b) = delta_ab.
PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128) / _SQRT2

# Lowering operator d = |0><1| (|1> = occupied).
_D = np.array([[0, 1], [0, 0]], dtype=np.complex128)
_DDAG = _D.conj().T

# Trace tensor T[a, r, s, b] = Tr(sigma_r sigma_a sigma_s sigma_b), used to
# rotate the map matrix into the Choi matrix.  16 complex entries per
# (a, b); precomputed once.
_TRACE_TENSOR = np.einsum("rij,ajk,skl,bli->arsb",
                          PAULI, PAULI, PAULI, PAULI)


def density_to_coeffs(rho: np.ndarray) -> np.ndarray:
    """Real coefficient vector c_a = Tr(sigma_a rho)."""
    return np.real(np.einsum("aij,ij->a", PAULI.conj(), rho))


def coeffs_to_density(c: np.ndarray) -> np.ndarray:
    return np.einsum("a,aij->ij", c, PAULI)


def generator_action(series: CoefficientSeries, t: float,
                     sigma: np.ndarray) -> np.ndarray:
    """Action of the instantaneous generator on an arbitrary 2x2 matrix.

    Hamiltonian part -i[H, sigma] with H = eps(t) d^dag d, plus the
    gain/loss dissipator with its complex coefficients and their
    conjugate partners, extended linearly off the Hermitian cone.
    """
    params = series.params
    theta = series.k + params.omega * t
    gain, loss = series.pair(t)
    eps = -2.0 * params.gamma * math.cos(theta)
    h = eps * (_DDAG @ _D)
    out = -1j * (h @ sigma - sigma @ h)
    out += gain * (-(_D @ _DDAG) @ sigma + _DDAG @ sigma @ _D)
    out += np.conj(gain) * (-sigma @ (_D @ _DDAG) + _DDAG @ sigma @ _D)
    out += loss * (-(_DDAG @ _D) @ sigma + _D @ sigma @ _DDAG)
    out += np.conj(loss) * (-sigma @ (_DDAG @ _D) + _D @ sigma @ _DDAG)
    return out


def liouvillian_matrix(series: CoefficientSeries, t: float) -> np.ndarray:
    """4x4 real generator matrix L_ab = Tr(sigma_a L(sigma_b)).

    Written in closed form (the coherence sector is multiplication by
    mu = i*eps - gain - conj(loss), the population sector relaxes at
    2*Gamma toward the instantaneous gain/loss balance); equality with the
    column-by-column generator_action construction is asserted in tests.
    """
    params = series.params
    theta = series.k + params.omega * t
    gain, loss = series.pair(t)
    eps = -2.0 * params.gamma * math.cos(theta)
    re_mu = -(gain.real + loss.real)
    im_mu = eps - gain.imag + loss.imag
    out = np.zeros((4, 4))
    out[1, 1] = re_mu
    out[1, 2] = im_mu
    out[2, 1] = -im_mu
    out[2, 2] = re_mu
    out[3, 0] = 2.0 * (loss.real - gain.real)
    out[3, 3] = -2.0 * (gain.real + loss.real)
    return out


def propagate_map(series: CoefficientSeries, t_final: float,
                  dt: float | None = None, t0: float = 0.0) -> np.ndarray:
    """Map matrix F(t_final) from F(t0) = identity, fixed-step RK4 on
    dF/dt = L(t) F.  A vanishing or negative determinant (the map must stay
    invertible at finite time) raises IntegrationError.
    """
    if t_final <= t0:
        raise ValueError("t_final must exceed t0")
    params = series.params
    max_dt = min(0.01 / params.gamma, params.bloch_period / 200.0)
    if dt is None:
        dt = max_dt
    elif dt > max_dt * (1 + 1e-12):
        raise ValueError(f"dt = {dt} exceeds the stability bound {max_dt}")
    n_steps = int(math.ceil((t_final - t0) / dt - 1e-12))
    dt = (t_final - t0) / n_steps
    f = np.eye(4)
    for step in range(n_steps):
        t = t0 + step * dt
        k1 = liouvillian_matrix(series, t) @ f
        k2 = liouvillian_matrix(series, t + 0.5 * dt) @ (f + 0.5 * dt * k1)
        k3 = liouvillian_matrix(series, t + 0.5 * dt) @ (f + 0.5 * dt * k2)
        k4 = liouvillian_matrix(series, t + dt) @ (f + dt * k3)
        f = f + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    det = float(np.linalg.det(f))
    if det <= 0.0:
        raise IntegrationError(f"map determinant {det:.3e} is nonpositive")
    return f


def apply_map(f: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """phi(rho) for a map matrix in the normalized Pauli basis."""
    return coeffs_to_density(f @ density_to_coeffs(rho))


def choi_from_map(f: np.ndarray) -> np.ndarray:
    """Choi matrix S_ab = sum_rs F_sr Tr(sigma_r sigma_a sigma_s sigma_b),
    expressed in the normalized Pauli basis (identity map -> diag(2,0,0,0))."""
    return np.einsum("sr,arsb->ab", f.astype(complex), _TRACE_TENSOR)


def kraus_from_choi(choi: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Kraus operators from the Choi eigendecomposition.

    Eigenvalues below -tol raise NotCompletelyPositiveError; ones in
    [-tol, tol] are dropped.  K_i = sqrt(lambda_i) sum_a x_a sigma_a.
    """
    if np.abs(choi - choi.conj().T).max() > tol:
        raise NotCompletelyPositiveError("Choi matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(choi)
    if vals.min() < -tol:
        raise NotCompletelyPositiveError(
            f"Choi eigenvalue {vals.min():.3e} below -{tol}")
    ops = []
    for lam, x in zip(vals, vecs.T):
        if lam <= tol:
            continue
        ops.append(math.sqrt(lam) * np.einsum("a,aij->ij", x, PAULI))
    return ops


def apply_kraus(kraus: list[np.ndarray], rho: np.ndarray) -> np.ndarray:
    return sum(k @ rho @ k.conj().T for k in kraus)


def completeness_residual(kraus: list[np.ndarray]) -> float:
    """max-abs deviation of sum K^dag K from the identity."""
    acc = sum(k.conj().T @ k for k in kraus)
    return float(np.abs(acc - np.eye(2)).max())


def choi_of_kraus(kraus: list[np.ndarray]) -> np.ndarray:
    """Choi matrix (same basis/normalization as choi_from_map) of an
    explicit Kraus set."""
    out = np.zeros((4, 4), dtype=np.complex128)
    for k in kraus:
        x = np.einsum("aij,ij->a", PAULI.conj(), k)
        out += np.outer(x, x.conj())
    return out


def longtime_kraus(n: float) -> list[np.ndarray]:
    """Analytic long-time channel: full reset onto occupation n.

    Every input is mapped to diag(1-n, n); the four operators realize the
    two decay directions and the two coherence-erasing transfers.
    """
    if not 0.0 <= n <= 1.0:
        raise ValueError(f"occupation must lie in [0, 1], got {n}")
    sn = math.sqrt(n)
    sm = math.sqrt(1.0 - n)
    e00 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    e11 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
    e10 = np.array([[0, 0], [1, 0]], dtype=np.complex128)
    e01 = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    return [sm * e00, sn * e11, sn * e10, sm * e01]
