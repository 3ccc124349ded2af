"""Density-matrix circuit references for the Bell-pair operations.

Everything here simulates the physical two-pair circuits on the full
4-qubit (16 x 16) density matrix and is deliberately independent of the
coefficient algebra in ``bellstate``.  It exists to validate that module
and is never called from the analytic evaluation path.
"""

from __future__ import annotations

import numpy as np

_S2 = 1.0 / np.sqrt(2.0)
# Bell basis order (Phi+, Phi-, Psi+, Psi-), matching bellstate slots.
BELL_VECTORS = np.array(
    [
        [_S2, 0, 0, _S2],
        [_S2, 0, 0, -_S2],
        [0, _S2, _S2, 0],
        [0, _S2, -_S2, 0],
    ],
    dtype=complex,
)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = _S2 * np.array([[1, 1], [1, -1]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def _rx(theta: float) -> np.ndarray:
    return np.cos(theta / 2) * _I2 - 1j * np.sin(theta / 2) * _X


def _kron(*mats: np.ndarray) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def _embed(qubit_ops: dict[int, np.ndarray], n_qubits: int) -> np.ndarray:
    return _kron(*[qubit_ops.get(q, _I2) for q in range(n_qubits)])


def _cnot(control: int, target: int, n_qubits: int) -> np.ndarray:
    return _embed({control: _P0}, n_qubits) + _embed({control: _P1, target: _X}, n_qubits)


def bell_diag_dm(coeffs) -> np.ndarray:
    """4 x 4 density matrix of a Bell-diagonal state."""
    rho = np.zeros((4, 4), dtype=complex)
    for w, v in zip(coeffs, BELL_VECTORS):
        rho += w * np.outer(v, v.conj())
    return rho


def bell_populations(rho: np.ndarray) -> np.ndarray:
    """Diagonal of a two-qubit density matrix in the Bell basis."""
    return np.real(np.einsum("bi,ij,bj->b", BELL_VECTORS.conj(), rho, BELL_VECTORS))


def _ptrace_keep_pair(rho: np.ndarray, keep: tuple[int, int], n_qubits: int) -> np.ndarray:
    t = rho.reshape([2] * (2 * n_qubits))
    remaining = n_qubits
    for q in sorted((q for q in range(n_qubits) if q not in keep), reverse=True):
        t = np.trace(t, axis1=q, axis2=q + remaining)
        remaining -= 1
    if keep[0] > keep[1]:
        t = t.transpose(1, 0, 3, 2)
    return t.reshape(4, 4)


def swap_reference(coeffs_a, coeffs_b, eps_eff: float = 0.0) -> np.ndarray:
    """Bell-state-measurement swap on qubits (A, M1) x (M2, B).

    CNOT M1->M2, Hadamard on M1, Z-readout of both middle qubits, then the
    outcome-dependent Pauli correction on B.  ``eps_eff`` admixes the
    maximally mixed state on the two measured qubits beforehand.  Returns
    the Bell populations of the delivered A-B pair.
    """
    rho = _kron(bell_diag_dm(coeffs_a), bell_diag_dm(coeffs_b))
    n = 4
    u = _embed({1: _H}, n) @ _cnot(1, 2, n)
    rho = u @ rho @ u.conj().T
    if eps_eff:
        # Bell-diagonal inputs have maximally mixed single-qubit marginals,
        # so scrambling the measured pair is the same as admixing I/16.
        rho = (1 - eps_eff) * rho + eps_eff * np.eye(16) / 16.0
    out = np.zeros((4, 4), dtype=complex)
    for z in (0, 1):
        for x in (0, 1):
            proj = _embed({1: (_P0, _P1)[z], 2: (_P0, _P1)[x]}, n)
            reduced = _ptrace_keep_pair(proj @ rho @ proj.conj().T, (0, 3), n)
            corr = np.linalg.matrix_power(_X, x) @ np.linalg.matrix_power(_Z, z)
            c = _kron(_I2, corr)
            out += c @ reduced @ c.conj().T
    return bell_populations(out)


def dejmps_reference(coeffs_a, coeffs_b, eps_eff: float = 0.0) -> tuple[float, np.ndarray]:
    """Full distillation circuit on qubits (A1, B1) x (A2, B2).

    Rx(+pi/2) on Alice's qubits and Rx(-pi/2) on Bob's, bilateral CNOTs from
    the kept pair onto the measured pair, Z-readout of the second pair with
    postselection on coincident outcomes.  The kept pair is reported in the
    standard bookkeeping frame, i.e. after the fixed local rotation
    (S H) x (S^dagger H).  ``eps_eff`` admixes I/16 into the joint state
    just before the measurement.  Returns (acceptance probability, Bell
    populations of the kept pair).
    """
    rho = _kron(bell_diag_dm(coeffs_a), bell_diag_dm(coeffs_b))
    n = 4
    ra, rb = _rx(np.pi / 2), _rx(-np.pi / 2)
    u = _cnot(1, 3, n) @ _cnot(0, 2, n) @ _embed({0: ra, 1: rb, 2: ra, 3: rb}, n)
    rho = u @ rho @ u.conj().T
    if eps_eff:
        rho = (1 - eps_eff) * rho + eps_eff * np.eye(16) / 16.0
    kept = np.zeros((4, 4), dtype=complex)
    for m in (0, 1):
        proj = _embed({2: (_P0, _P1)[m], 3: (_P0, _P1)[m]}, n)
        kept += _ptrace_keep_pair(proj @ rho @ proj.conj().T, (0, 1), n)
    frame = _kron(_S @ _H, _S.conj().T @ _H)
    kept = frame @ kept @ frame.conj().T
    d = float(np.real(np.trace(kept)))
    if d <= 0.0:
        raise ValueError("zero acceptance probability")
    return d, bell_populations(kept / d)
