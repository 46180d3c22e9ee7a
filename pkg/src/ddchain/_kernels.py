"""Hot numerical kernels.

Two implementations live here: plain-numpy reference functions and, when
numba is importable and DDCHAIN_DISABLE_JIT is unset, @njit-compiled
versions of the same code.  `benchmarks/bench_kernels.py` times both paths.

Kernel inputs are plain arrays/scalars so the jitted and fallback paths
share one body.
"""
from __future__ import annotations

import os

import numpy as np

JIT_DISABLED = os.environ.get("DDCHAIN_DISABLE_JIT", "").strip() in ("1", "true", "yes")

try:
    if JIT_DISABLED:
        raise ImportError
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):  # no-op decorator fallback
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


# ---------------------------------------------------------------------------
# Master-equation coefficients and RK4 qubit stepping
# ---------------------------------------------------------------------------

def _coeff_pair_py(theta, j_vals, f_vals, big_gamma):
    """Dissipator coefficient pair (gain, loss) at phase theta = k + Omega*t.

    The double Bessel sum factorizes into a product of single sums; f_vals
    holds the complex spectral weights on orders -L..L (same layout as
    j_vals).
    """
    n = j_vals.shape[0]
    ell_max = (n - 1) // 2
    s_gain = 0.0 + 0.0j
    s_loss = 0.0 + 0.0j
    s_free = 0.0 + 0.0j
    for i in range(n):
        ell = i - ell_max
        ph = np.exp(-1j * ell * theta)
        s_gain += j_vals[i] * f_vals[i] * ph
        # loss uses F(-Omega*ell) with the conjugate phase
        s_loss += j_vals[i] * f_vals[n - 1 - i] * np.conj(ph)
        s_free += j_vals[i] * ph
    gain = big_gamma * s_gain * np.conj(s_free)
    loss = big_gamma * s_loss * s_free
    return gain, loss


def _rk4_qubit_py(p0, p1, coh, t0, dt, n_steps, sample_stride,
                  k, omega, gamma, big_gamma, j_vals, f_vals,
                  times, occs, cohs):
    """Fixed-step RK4 for the 2x2 momentum-mode density matrix.

    State is (p0, p1, coh) with rho = [[p0, coh], [conj(coh), p1]]; this
    representation is exactly Hermitian, so only trace drift needs
    monitoring (done by the caller from the sampled p0+p1).

    d/dt p1 = 2 Re(gain) p0 - 2 Re(loss) p1, p0 likewise with flipped sign,
    d/dt coh = i*eps(t) coh - gain*coh - conj(loss)*coh,
    eps(t) = -2 gamma cos(k + Omega t).
    """
    n_sample = 0
    for step in range(n_steps):
        t = t0 + step * dt
        # RK4 stage evaluations at t, t+dt/2 (twice), t+dt
        y0 = p0
        y1 = p1
        yc = coh
        a0 = p0
        a1 = p1
        ac = coh
        for stage in range(4):
            if stage == 0:
                ts = t
                w = dt / 6.0
            elif stage == 3:
                ts = t + dt
                w = dt / 6.0
            else:
                ts = t + 0.5 * dt
                w = dt / 3.0
            theta = k + omega * ts
            g, l = _coeff_pair(theta, j_vals, f_vals, big_gamma)
            rg = g.real
            rl = l.real
            eps = -2.0 * gamma * np.cos(theta)
            d0 = -2.0 * rg * y0 + 2.0 * rl * y1
            d1 = 2.0 * rg * y0 - 2.0 * rl * y1
            dc = (1j * eps - g - np.conj(l)) * yc
            a0 += w * d0
            a1 += w * d1
            ac += w * dc
            if stage < 3:
                h = 0.5 * dt if stage < 2 else dt
                y0 = p0 + h * d0
                y1 = p1 + h * d1
                yc = coh + h * dc
        p0 = a0
        p1 = a1
        coh = ac
        if (step + 1) % sample_stride == 0:
            times[n_sample] = t0 + (step + 1) * dt
            occs[n_sample] = p1
            cohs[n_sample] = coh
            n_sample += 1
    return p0, p1, coh, n_sample


# ---------------------------------------------------------------------------
# Finite-bath single-particle propagator (Strang splitting)
# ---------------------------------------------------------------------------
#
# One splitting step for h(t) = diag(eps(t_mid), omega_1..omega_Nb) + B,
# with B = -|v| (e0 u^T + u e0^T) the coupling border:
#   E = P R P,  P = exp(-i diag dt/2),  R = exp(-i B dt)
# R acts in span{e0, u}:
#   R = 1 + (cos phi - 1)(e0 e0^T + u u^T) + i sin phi (e0 u^T + u e0^T),
# phi = |v| dt.  Each factor is exactly unitary.


def _propagate_unitary_py(u_mat, sys_phase, bath_phase, u_vec, cos_phi, sin_phi,
                          occ0, sample_steps, samples, scratch):
    """Advance the full (N+1)x(N+1) single-particle unitary.

    sys_phase[s] is the system-site half-step phase for step s; bath_phase
    the static bath half-step phases.  occ0 holds the initial mode
    occupations; at the steps listed in sample_steps the occupation
    n = sum_m occ0[m] |U[0, m]|^2 is written to samples.
    """
    n_steps = sys_phase.shape[0]
    nb = bath_phase.shape[0]
    ncol = u_mat.shape[1]
    cm1 = cos_phi - 1.0
    isin = 1j * sin_phi
    n_sample = 0
    for step in range(n_steps):
        ps = sys_phase[step]
        # P (half step)
        for c in range(ncol):
            u_mat[0, c] *= ps
        for j in range(nb):
            pb = bath_phase[j]
            for c in range(ncol):
                u_mat[j + 1, c] *= pb
        # R: mix row 0 with the coupling direction
        for c in range(ncol):
            scratch[c] = 0.0
        for j in range(nb):
            uj = u_vec[j]
            for c in range(ncol):
                scratch[c] += uj * u_mat[j + 1, c]
        for c in range(ncol):
            w = scratch[c]
            r0 = u_mat[0, c]
            u_mat[0, c] = cos_phi * r0 + isin * w
            scratch[c] = cm1 * w + isin * r0
        for j in range(nb):
            uj = u_vec[j]
            for c in range(ncol):
                u_mat[j + 1, c] += uj * scratch[c]
        # P (second half step)
        for c in range(ncol):
            u_mat[0, c] *= ps
        for j in range(nb):
            pb = bath_phase[j]
            for c in range(ncol):
                u_mat[j + 1, c] *= pb
        if n_sample < sample_steps.shape[0] and sample_steps[n_sample] == step + 1:
            acc = 0.0
            for c in range(ncol):
                a = u_mat[0, c]
                acc += occ0[c] * (a.real * a.real + a.imag * a.imag)
            samples[n_sample] = acc
            n_sample += 1
    return n_sample


def _first_row_at_time_py(t_final, dt, k, omega, gamma,
                          bath_phase_full, bath_energies, u_vec, v_norm, row):
    """First row of the propagator at one time, via the reversed product.

    e0^T U(T) = e0^T E_n E_{n-1} ... E_1 accumulated right-to-left as
    vector-times-step products; each step costs O(N).  The last step (first
    in the reversed order) may be shorter than dt so T is hit exactly.  The
    step operator is symmetric, so v^T E = (E v)^T.

    bath_phase_full holds the static half-step bath phases for a full dt;
    the partial step recomputes them from bath_energies once.
    """
    nb = bath_energies.shape[0]
    n_steps = int(np.ceil(t_final / dt - 1e-12))
    bath_phase_part = np.empty(nb, dtype=np.complex128)
    for c in range(nb + 1):
        row[c] = 0.0
    row[0] = 1.0
    for idx in range(n_steps, 0, -1):
        t_lo = (idx - 1) * dt
        if idx < n_steps:
            h = dt
            bath_phase = bath_phase_full
        else:
            h = t_final - t_lo
            for j in range(nb):
                bath_phase_part[j] = np.exp(-0.5j * bath_energies[j] * h)
            bath_phase = bath_phase_part
        t_mid = t_lo + 0.5 * h
        eps = -2.0 * gamma * np.cos(k + omega * t_mid)
        ps = np.exp(-0.5j * eps * h)
        phi = v_norm * h
        cos_phi = np.cos(phi)
        isin = 1j * np.sin(phi)
        cm1 = cos_phi - 1.0
        # P
        row[0] *= ps
        for j in range(nb):
            row[j + 1] *= bath_phase[j]
        # R
        w = 0.0 + 0.0j
        for j in range(nb):
            w += u_vec[j] * row[j + 1]
        r0 = row[0]
        row[0] = cos_phi * r0 + isin * w
        corr = cm1 * w + isin * r0
        for j in range(nb):
            row[j + 1] += u_vec[j] * corr
        # P
        row[0] *= ps
        for j in range(nb):
            row[j + 1] *= bath_phase[j]


if NUMBA_ENABLED:
    _coeff_pair = njit(cache=True)(_coeff_pair_py)
    _rk4_qubit = njit(cache=True)(_rk4_qubit_py)
    _propagate_unitary = njit(cache=True)(_propagate_unitary_py)
    _first_row_at_time = njit(cache=True)(_first_row_at_time_py)
else:
    _coeff_pair = _coeff_pair_py
    _rk4_qubit = _rk4_qubit_py
    _propagate_unitary = _propagate_unitary_py
    _first_row_at_time = _first_row_at_time_py


def coeff_pair(theta, j_vals, f_vals, big_gamma):
    """Public wrapper for the jitted coefficient kernel."""
    return _coeff_pair(float(theta), j_vals, f_vals, float(big_gamma))
