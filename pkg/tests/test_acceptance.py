"""End-to-end acceptance suite.

Each test covers one headline claim of the package, computes the relevant
figures of merit, prints a single PASS/FAIL summary line and asserts the
stated tolerance.  Run with `pytest -s tests/test_acceptance.py` to see
the summary lines on success.
"""
import math

import numpy as np
import pytest

from ddchain.channel import (apply_kraus, choi_from_map, choi_of_kraus,
                             completeness_residual, kraus_from_choi,
                             longtime_kraus, propagate_map)
from ddchain.circuit import (apply_and_trace, build_circuit_fig6,
                             build_circuit_fig7, build_unitary_final,
                             circuit_kraus, mitigate_readout, Z,
                             _outcome_probs, simulate_tomography)
from ddchain.master import (QubitState, evolve_density_matrix,
                            steady_occupation_at_phase,
                            steady_state_occupation)
from ddchain.model import CoefficientSeries, ModelParams, gain_quadrature
from ddchain.observables import (dc_current_closed_form, momentum_profile,
                                 norm_heatmap)
from ddchain.oracle import FiniteBathSpec, occupation_at_times


def report(idx, label, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance {idx}] {label}: {status} ({detail})")
    return ok


def test_criterion_1_reference_trace(fig2_params, fig2_series):
    """Master-equation trace vs closed form (1e-4 for t > 10/Gamma) and vs
    the finite-bath benchmark (0.02 over one steady Bloch period)."""
    t_settle = 10.0 / fig2_params.big_gamma
    t_final = t_settle + fig2_params.bloch_period + 2.0
    rec = evolve_density_matrix(fig2_series, QubitState.empty(), t_final,
                                sample_stride=25)
    mask = rec.times > t_settle
    closed = np.array([steady_state_occupation(fig2_series, t)
                       for t in rec.times[mask]])
    dev_closed = float(np.abs(rec.occupations[mask] - closed).max())

    bath = FiniteBathSpec.build(fig2_params, n_modes=400,
                                bandwidth=20.0 * fig2_params.gamma)
    t_bench = np.linspace(t_settle, t_settle + fig2_params.bloch_period, 17)
    exact = occupation_at_times(fig2_params, fig2_series.k, bath, t_bench)
    master = np.interp(t_bench, rec.times, rec.occupations)
    closed_b = np.array([steady_state_occupation(fig2_series, t)
                         for t in t_bench])
    dev_oracle = float(max(np.abs(exact - master).max(),
                           np.abs(exact - closed_b).max()))

    ok = dev_closed < 1e-4 and dev_oracle < 0.02
    assert report(1, "reference occupation trace", ok,
                  f"master-vs-closed {dev_closed:.2e} < 1e-4, "
                  f"benchmark dev {dev_oracle:.3f} < 0.02")


def test_criterion_2_half_filling_sum_rules():
    """BZ average of the steady profile = 1/2 (1e-8) and per-k Bloch-cycle
    time average = 1/2 (1e-10) across a parameter grid."""
    worst_bz = 0.0
    worst_time = 0.0
    ts_frac = np.linspace(0.0, 1.0, 257)[:-1]
    for omega in (0.2, 0.5, 1.0, 2.0):
        for gg in (0.05, 0.1, 0.2):
            p = ModelParams(omega=omega, big_gamma=gg, beta=10.0)
            prof = momentum_profile(p, n_k=256)
            worst_bz = max(worst_bz, abs(prof.values.mean() - 0.5))
            s = CoefficientSeries.build(p, 0.7)
            ts = ts_frac * p.bloch_period
            mean = np.mean([steady_state_occupation(s, t) for t in ts])
            worst_time = max(worst_time, abs(mean - 0.5))
    ok = worst_bz < 1e-8 and worst_time < 1e-10
    assert report(2, "half-filling sum rules", ok,
                  f"BZ dev {worst_bz:.1e} < 1e-8, "
                  f"time-avg dev {worst_time:.1e} < 1e-10")


def test_criterion_3_dc_current():
    """Closed-form current vs velocity quadrature (1e-8 gamma), Ohm's-law
    linearity at weak drive (2%), single-peaked J(Omega)."""
    worst = 0.0
    theta = 2.0 * math.pi * np.arange(4096) / 4096
    for omega in (0.2, 0.5, 1.0, 2.0, 4.0):
        for gg in (0.05, 0.1, 0.2, 0.5, 1.0):
            p = ModelParams(omega=omega, big_gamma=gg, beta=10.0)
            series = CoefficientSeries.build(p, k=0.0)
            n = steady_occupation_at_phase(p, series, theta)
            j_quad = float(np.mean(2.0 * p.gamma * np.sin(theta) * n))
            worst = max(worst, abs(dc_current_closed_form(p) - j_quad))

    j1 = dc_current_closed_form(ModelParams(omega=0.01, big_gamma=0.1,
                                            beta=10.0))
    j2 = dc_current_closed_form(ModelParams(omega=0.02, big_gamma=0.1,
                                            beta=10.0))
    ohm_dev = abs(j2 / j1 - 2.0)

    omegas = np.linspace(0.05, 6.0, 80)
    cur = np.array([dc_current_closed_form(
        ModelParams(omega=w, big_gamma=0.1, beta=10.0)) for w in omegas])
    sign_changes = int(np.sum(np.diff(np.sign(np.diff(cur))) != 0))

    ok = worst < 1e-8 and ohm_dev < 0.02 and sign_changes == 1
    assert report(3, "DC current consistency", ok,
                  f"quadrature dev {worst:.1e} < 1e-8, "
                  f"Ohm dev {ohm_dev:.4f} < 0.02, "
                  f"peaks {sign_changes} == 1")


def test_criterion_4_accuracy_heatmap():
    """8x8 (Omega, Gamma) accuracy-norm grid against the finite-bath
    benchmark: the perturbative expansion is accurate up to
    Gamma ~ Omega/2 (for Omega >= 0.5), and at fixed Omega the norm is
    nondecreasing in Gamma for Gamma >= 0.05 up to 0.02 grid noise.

    Frozen thresholds from the converged benchmark run (values stable
    under bandwidth, burn-in, momentum-grid and time-step refinement):
    norm < 0.15 strictly inside the trusted region (Gamma <= 0.35 Omega)
    and < 0.2 out to the Gamma = Omega/2 boundary, where the worst cell
    (Omega=1, Gamma=0.4) sits at 0.184."""
    omegas = [0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    gammas = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4]
    grid = norm_heatmap(omegas, gammas, beta=10.0)

    assert np.isfinite(grid).all()
    worst_inner = 0.0
    worst_boundary = 0.0
    for i, gg in enumerate(gammas):
        for jx, w in enumerate(omegas):
            if w < 0.5:
                continue
            if gg <= 0.35 * w:
                worst_inner = max(worst_inner, grid[i, jx])
            if gg <= w / 2.0:
                worst_boundary = max(worst_boundary, grid[i, jx])
    drops = np.diff(grid, axis=0)  # increments along increasing Gamma
    worst_drop = float(-drops.min())

    ok = worst_inner < 0.15 and worst_boundary < 0.2 and worst_drop < 0.02
    assert report(4, "accuracy-norm heatmap", ok,
                  f"max norm inside trusted region {worst_inner:.3f} < 0.15, "
                  f"at boundary {worst_boundary:.3f} < 0.2, "
                  f"max monotonicity violation {worst_drop:.3f} < 0.02")


def test_criterion_5_channel_pipeline():
    """Trajectory map -> Choi -> Kraus is CPTP (1e-8) and matches the
    analytic long-time reset channel (1e-5 Choi entries) for 20 random
    parameter/time points with t >= 20/Gamma."""
    rng = np.random.default_rng(42)
    worst_comp = 0.0
    worst_choi = 0.0
    for _ in range(20):
        p = ModelParams(omega=float(rng.uniform(0.2, 2.0)),
                        big_gamma=float(rng.uniform(0.08, 0.3)),
                        beta=10.0)
        series = CoefficientSeries.build(p, float(rng.uniform(-np.pi, np.pi)))
        t = float(rng.uniform(20.0, 28.0)) / p.big_gamma
        f = propagate_map(series, t)
        choi = choi_from_map(f)
        kraus = kraus_from_choi(choi)
        worst_comp = max(worst_comp, completeness_residual(kraus))
        n = steady_state_occupation(series, t)
        ref = choi_of_kraus(longtime_kraus(n))
        worst_choi = max(worst_choi, float(np.abs(choi - ref).max()))
    ok = worst_comp < 1e-8 and worst_choi < 1e-5
    assert report(5, "channel extraction pipeline", ok,
                  f"completeness residual {worst_comp:.1e} < 1e-8, "
                  f"Choi dev {worst_choi:.1e} < 1e-5")


def test_criterion_6_circuit_identities():
    """Dilation unitary matches its printed matrix (1e-14); the traced
    channel resets arbitrary inputs (1e-12); all three circuit layouts are
    channel-identical and equal the analytic reset channel (1e-12)."""
    rng = np.random.default_rng(7)

    def printed(theta):
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        u = np.zeros((8, 8))
        for (r, col), v in {(0, 0): c, (0, 3): -s, (1, 4): s, (1, 7): c,
                            (2, 1): c, (2, 2): s, (3, 5): -s, (3, 6): c,
                            (4, 4): c, (4, 7): -s, (5, 0): s, (5, 3): c,
                            (6, 5): c, (6, 6): s, (7, 1): -s,
                            (7, 2): c}.items():
            u[r, col] = v
        return u

    dev_u = max(float(np.abs(build_unitary_final(th) - printed(th)).max())
                for th in rng.uniform(0, math.pi, 10))

    theta = 2.0 * math.asin(math.sqrt(0.3))
    u = build_unitary_final(theta)
    target = np.diag([0.7, 0.3])
    dev_reset = 0.0
    for _ in range(100):
        v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = v @ v.conj().T
        rho /= np.trace(rho).real
        out = apply_and_trace(u, QubitState(rho)).matrix
        dev_reset = max(dev_reset, float(np.abs(out - target).max()))

    c_final = choi_of_kraus(circuit_kraus(u))
    c6 = choi_of_kraus(circuit_kraus(build_circuit_fig6(theta)))
    c7 = choi_of_kraus([k @ Z
                        for k in circuit_kraus(build_circuit_fig7(theta))])
    c_ref = choi_of_kraus(longtime_kraus(0.3))
    dev_channel = max(float(np.abs(c6 - c_final).max()),
                      float(np.abs(c7 - c_final).max()),
                      float(np.abs(c_final - c_ref).max()))

    ok = dev_u < 1e-14 and dev_reset < 1e-12 and dev_channel < 1e-12
    assert report(6, "circuit verification", ok,
                  f"unitary dev {dev_u:.1e} < 1e-14, "
                  f"reset dev {dev_reset:.1e} < 1e-12, "
                  f"channel dev {dev_channel:.1e} < 1e-12")


def test_criterion_7_tomography_statistics():
    """Shot-noise scaling of the tomographic trace-distance error fits
    slope -0.5 +/- 0.1, and readout mitigation exactly inverts a known
    confusion matrix on noiseless data (1e-12)."""
    theta = 2.0 * math.asin(math.sqrt(0.3))
    u = build_unitary_final(theta)
    ideal = apply_and_trace(u, QubitState.empty()).matrix
    shots_list = [10**2, 10**3, 10**4, 10**5, 10**6]
    errs = []
    for shots in shots_list:
        per_seed = []
        for seed in range(12):
            res = simulate_tomography(u, QubitState.empty(), shots, seed)
            delta = res.rho - ideal
            per_seed.append(0.5 * np.abs(np.linalg.eigvalsh(delta)).sum())
        errs.append(np.mean(per_seed))
    slope = float(np.polyfit(np.log(shots_list), np.log(errs), 1)[0])

    cal = np.array([[0.95, 0.03], [0.05, 0.97]])
    dev_mit = 0.0
    for basis in "xyz":
        p = _outcome_probs(ideal, basis)
        rec = mitigate_readout({basis: cal @ p}, cal)
        dev_mit = max(dev_mit, float(np.abs(rec[basis] - p).max()))

    ok = -0.6 < slope < -0.4 and dev_mit < 1e-12
    assert report(7, "tomography statistics", ok,
                  f"slope {slope:.3f} in (-0.6, -0.4), "
                  f"mitigation dev {dev_mit:.1e} < 1e-12")


def test_criterion_8_coefficient_cross_check(fig2_params):
    """Bessel-series gain coefficient vs direct real-time quadrature
    within 1e-5 Gamma on a 5x5 (k, t) grid at the reference point."""
    worst = 0.0
    for k in np.linspace(-math.pi, math.pi, 5):
        series = CoefficientSeries.build(fig2_params, float(k))
        for t in np.linspace(0.0, fig2_params.bloch_period, 5):
            ref = gain_quadrature(fig2_params, float(k), float(t),
                                  cutoff_time=20.0 * fig2_params.beta,
                                  step=fig2_params.beta / 400.0)
            worst = max(worst, abs(series.gain(float(t)) - ref))
    tol = 1e-5 * fig2_params.big_gamma
    ok = worst < tol
    assert report(8, "coefficient series vs quadrature", ok,
                  f"max dev {worst:.1e} < {tol:.0e}")
