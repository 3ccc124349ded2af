"""Self-consistency of the density-matrix references.

These checks pin the circuit implementations against textbook facts only
(no calls into the coefficient engine), so that the engine-vs-oracle
comparisons elsewhere actually test something.
"""

import numpy as np
import pytest

from repeaterscope import dmoracle


def pure(i):
    v = np.zeros(4)
    v[i] = 1.0
    return v


def test_bell_vectors_orthonormal():
    gram = dmoracle.BELL_VECTORS.conj() @ dmoracle.BELL_VECTORS.T
    assert np.allclose(gram, np.eye(4), atol=1e-14)


def test_bell_populations_roundtrip():
    coeffs = (0.55, 0.25, 0.15, 0.05)
    rho = dmoracle.bell_diag_dm(coeffs)
    assert np.allclose(dmoracle.bell_populations(rho), coeffs, atol=1e-14)
    assert np.trace(rho) == pytest.approx(1.0)


def test_swap_circuit_composes_bell_indices_by_xor():
    for i in range(4):
        for j in range(4):
            out = dmoracle.swap_reference(pure(i), pure(j))
            assert out[i ^ j] == pytest.approx(1.0, abs=1e-12)


def test_swap_circuit_is_trace_preserving():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a, b = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        out = dmoracle.swap_reference(a, b, eps_eff=0.03)
        assert out.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(out >= -1e-14)


def test_dejmps_circuit_matches_published_werner_recurrence():
    # For two identical Werner states the accepted fidelity and output
    # fidelity of the protocol are
    #   d  = (F + q)^2 + (2q)^2,   F' = (F^2 + q^2) / d,   q = (1 - F) / 3.
    for fidelity in (0.55, 0.7, 0.85, 0.95):
        q = (1 - fidelity) / 3
        coeffs = (fidelity, q, q, q)
        d, out = dmoracle.dejmps_reference(coeffs, coeffs)
        d_expected = (fidelity + q) ** 2 + (2 * q) ** 2
        assert d == pytest.approx(d_expected, abs=1e-12)
        assert out[0] == pytest.approx((fidelity**2 + q**2) / d_expected, abs=1e-12)


def test_dejmps_circuit_keeps_perfect_pairs():
    d, out = dmoracle.dejmps_reference(pure(0), pure(0))
    assert d == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(out, (1, 0, 0, 0), atol=1e-12)


def test_dejmps_circuit_on_maximally_mixed():
    mixed = (0.25, 0.25, 0.25, 0.25)
    d, out = dmoracle.dejmps_reference(mixed, mixed)
    assert d == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(out, mixed, atol=1e-12)


def test_dejmps_noise_admixture_lowers_acceptance_toward_half():
    coeffs = (0.9, 0.1 / 3, 0.1 / 3, 0.1 / 3)
    d_clean, _ = dmoracle.dejmps_reference(coeffs, coeffs)
    d_noisy, _ = dmoracle.dejmps_reference(coeffs, coeffs, eps_eff=0.5)
    assert d_noisy == pytest.approx(0.5 * d_clean + 0.25, abs=1e-12)
