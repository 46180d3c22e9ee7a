"""Exact 3-qubit simulator for the dilation circuits realizing the
long-time reset channel, plus simulated finite-shot state tomography and
readout-error mitigation.

Qubit order throughout: |q1> (x) |q2> (x) |q3> with q1 the top ancilla,
q2 the bottom ancilla and q3 the system; q3 is the least significant bit
of the 8-dimensional register index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .master import QubitState

_I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)

_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def ry(theta: float) -> np.ndarray:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rx(theta: float) -> np.ndarray:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def embed_single(gate: np.ndarray, qubit: int) -> np.ndarray:
    """8x8 embedding of a 1-qubit gate on qubit 1, 2 or 3 (3 = system)."""
    ops = [_I2, _I2, _I2]
    ops[qubit - 1] = gate
    return np.kron(np.kron(ops[0], ops[1]), ops[2])


def controlled(gate: np.ndarray, control: int, target: int,
               anti: bool = False) -> np.ndarray:
    """8x8 (anti-)controlled 1-qubit gate; anti fires on |0> instead of |1>."""
    if control == target:
        raise ValueError("control and target must differ")
    p_act, p_idle = (_P0, _P1) if anti else (_P1, _P0)
    return (embed_single(p_idle, control) @ np.eye(8)
            + embed_single(p_act, control) @ embed_single(gate, target))


def cx(control: int, target: int) -> np.ndarray:
    return controlled(X, control, target)


def acx(control: int, target: int) -> np.ndarray:
    return controlled(X, control, target, anti=True)


def build_unitary_final(theta: float) -> np.ndarray:
    """Final economized dilation circuit (rightmost factor acts first):
    cX(3->1) . cX(2->3) . Ry(theta on system) . cX(3->2)."""
    return (cx(3, 1) @ cx(2, 3) @ embed_single(ry(theta), 3) @ cx(3, 2))


def build_circuit_fig6(theta: float) -> np.ndarray:
    """Original four-gate dilation: the system anti-controls Ry(theta) and
    controls Ry(pi - theta) on the top ancilla, the top ancilla kicks the
    system, and the system marks the bottom ancilla."""
    return (cx(3, 2)
            @ cx(1, 3)
            @ controlled(ry(math.pi - theta), 3, 1)
            @ controlled(ry(theta), 3, 1, anti=True))


def build_circuit_fig7(theta: float) -> np.ndarray:
    """Economized circuit with its leading anti-controlled Z kept; as a
    channel it equals the final circuit once the input absorbs a Z
    (rho0' = Z rho0 Z)."""
    return build_unitary_final(theta) @ controlled(Z, 2, 3, anti=True)


def register_state(rho_sys: np.ndarray) -> np.ndarray:
    """|00><00| (x) rho_sys in the full 8-dimensional register."""
    anc = np.zeros((4, 4), dtype=np.complex128)
    anc[0, 0] = 1.0
    return np.kron(anc, np.asarray(rho_sys, dtype=np.complex128))


def partial_trace_ancillas(rho3: np.ndarray) -> np.ndarray:
    """Trace out both ancillas: sum of the diagonal 2x2 blocks."""
    r = np.asarray(rho3).reshape(4, 2, 4, 2)
    return np.einsum("aiaj->ij", r)


def apply_and_trace(u: np.ndarray, rho_sys: QubitState) -> QubitState:
    """Run the register through u from ancillas |00> and return the reduced
    system state."""
    rho3 = u @ register_state(rho_sys.matrix) @ u.conj().T
    return QubitState(partial_trace_ancillas(rho3))


def circuit_kraus(u: np.ndarray) -> list[np.ndarray]:
    """Kraus operators <q1 q2|u|00> of the dilated channel."""
    cols = u.reshape(4, 2, 4, 2)[:, :, 0, :]
    return [np.array(cols[i]) for i in range(4)]


@dataclass
class TomographyResult:
    """Finite-shot single-qubit state tomography summary."""

    counts: dict[str, np.ndarray]
    rho: np.ndarray
    fidelity: float
    seed: int
    shots: int
    clipped: bool = False


_BASIS_ROTATIONS = {"x": H, "y": H @ np.array([[1, 0], [0, -1j]]), "z": _I2}


def _outcome_probs(rho: np.ndarray, basis: str) -> np.ndarray:
    """(p_plus, p_minus) for a measurement of the given Pauli on rho."""
    m = _BASIS_ROTATIONS[basis]
    diag = np.real(np.diag(m @ rho @ m.conj().T))
    return np.clip(diag, 0.0, 1.0) / np.clip(diag, 0.0, 1.0).sum()


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    vals, vecs = np.linalg.eigh(rho)
    sq = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    inner = sq @ sigma @ sq
    ivals = np.linalg.eigvalsh(inner)
    return float(np.sum(np.sqrt(np.clip(ivals, 0.0, None))) ** 2)


def _rho_from_expectations(ex: float, ey: float, ez: float):
    rho = 0.5 * (_I2 + ex * X + ey * Y + ez * Z)
    vals, vecs = np.linalg.eigh(rho)
    clipped = bool(vals.min() < -1e-12)
    if clipped:
        vals = np.clip(vals, 0.0, None)
        rho = (vecs * vals) @ vecs.conj().T
        rho /= np.trace(rho).real
    return rho, clipped


def simulate_tomography(u: np.ndarray, rho_sys: QubitState, shots: int,
                        seed: int,
                        calibration: np.ndarray | None = None) -> TomographyResult:
    """Sample X/Y/Z-basis measurements of the post-circuit system qubit.

    When a readout confusion matrix is supplied, the sampled outcome
    probabilities are corrupted by it (counts as the hardware would report
    them); mitigation is a separate step.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    reduced = apply_and_trace(u, rho_sys).matrix
    ideal = reduced
    counts = {}
    expect = {}
    for basis in ("x", "y", "z"):
        p = _outcome_probs(reduced, basis)
        if calibration is not None:
            p = np.asarray(calibration, dtype=float) @ p
        n_plus = rng.binomial(shots, p[0])
        counts[basis] = np.array([n_plus, shots - n_plus])
        expect[basis] = (2.0 * n_plus - shots) / shots
    rho, clipped = _rho_from_expectations(expect["x"], expect["y"], expect["z"])
    return TomographyResult(counts=counts, rho=rho,
                            fidelity=fidelity(rho, ideal),
                            seed=seed, shots=shots, clipped=clipped)


def mitigate_readout(counts: dict[str, np.ndarray],
                     calibration: np.ndarray) -> dict[str, np.ndarray]:
    """Invert a column-stochastic readout confusion matrix per basis.

    Applies the pseudo-inverse to the outcome-probability vectors, then
    clips the result back onto the probability simplex.
    """
    calibration = np.asarray(calibration, dtype=float)
    if abs(np.linalg.det(calibration)) < 1e-12:
        raise ValueError("calibration matrix is singular")
    inv = np.linalg.pinv(calibration)
    out = {}
    for basis, c in counts.items():
        c = np.asarray(c, dtype=float)
        total = c.sum()
        p = inv @ (c / total)
        p = np.clip(p, 0.0, None)
        out[basis] = p / p.sum()
    return out


def rho_from_probabilities(probs: dict[str, np.ndarray]):
    """Reconstructed state from per-basis outcome probabilities (post
    mitigation); returns (rho, clipped_flag)."""
    ex = {b: float(p[0] - p[1]) for b, p in probs.items()}
    return _rho_from_expectations(ex["x"], ex["y"], ex["z"])
