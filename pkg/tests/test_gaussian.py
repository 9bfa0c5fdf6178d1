import numpy as np
import pytest

from tpgsim.errors import ConfigError, UnphysicalCovarianceError
from tpgsim.fock import (DensityOperator, ModeLayout, StateVector,
                         coherent_state, vacuum_state)
from tpgsim.dynamics import classical_coefficients, correlated_pure_state
from tpgsim.gaussian import (CovarianceMatrix, covariance_of, gaussian_entropy,
                             ppt_min_symplectic, steering_R,
                             symplectic_eigenvalues)


def test_vacuum_covariance():
    cov = covariance_of(vacuum_state(ModeLayout(("A", "B"), (4, 4))))
    assert np.allclose(cov.matrix, np.eye(4) / 2, atol=1e-12)
    assert np.allclose(cov.mean, 0.0)
    nus = symplectic_eigenvalues(cov)
    assert np.allclose(nus, 0.5, atol=1e-12)
    assert gaussian_entropy(cov) == 0.0
    cov.validate()


def test_coherent_state_mean_and_covariance():
    alpha = 0.7 - 0.4j
    cov = covariance_of(coherent_state(30, alpha, label="A"))
    assert np.allclose(cov.matrix, np.eye(2) / 2, atol=1e-7)
    assert cov.mean[0] == pytest.approx(np.sqrt(2) * alpha.real, abs=1e-7)
    assert cov.mean[1] == pytest.approx(np.sqrt(2) * alpha.imag, abs=1e-7)


def test_thermal_entropy_matches_von_neumann():
    # single-mode thermal state: covariance (nbar + 1/2) I, entropy known sum
    nbar = 0.8
    d = 60
    p = nbar ** np.arange(d) / (1 + nbar) ** (np.arange(d) + 1.0)
    rho = DensityOperator(ModeLayout(("A",), (d,)), np.diag(p / p.sum()))
    cov = covariance_of(rho)
    assert cov.matrix[0, 0] == pytest.approx(nbar + 0.5, abs=1e-8)
    direct = -np.sum(p * np.log(p))
    assert gaussian_entropy(cov) == pytest.approx(direct, abs=1e-7)


def test_tmsv_covariance_blocks():
    xi = 0.4
    psi = correlated_pure_state(classical_coefficients(xi, 40, "sodc"), "sodc")
    cov = covariance_of(psi)
    V = np.cosh(2 * xi) / 2
    C = np.sinh(2 * xi) / 2
    expect = np.array([[V, 0, C, 0],
                       [0, V, 0, -C],
                       [C, 0, V, 0],
                       [0, -C, 0, V]])
    assert np.abs(cov.matrix - expect).max() < 1e-8


def test_tmsv_ppt_and_steering():
    xi = 0.4
    psi = correlated_pure_state(classical_coefficients(xi, 40, "sodc"), "sodc")
    cov = covariance_of(psi)
    # pure state: plain symplectic spectrum sits on the vacuum floor
    assert np.allclose(symplectic_eigenvalues(cov), 0.5, atol=1e-8)
    nu = ppt_min_symplectic(cov, ("B",))
    assert nu == pytest.approx(np.exp(-2 * xi) / 2, abs=1e-8)
    assert -np.log(2 * nu) == pytest.approx(2 * xi, abs=1e-7)
    r = steering_R(cov, "A", "B")
    assert r == pytest.approx(1.0 / np.cosh(2 * xi), abs=1e-8)
    assert r < 1.0


def test_correlated_triplet_covariance_is_thermal_like():
    # pair moments <a_i a_j> vanish on the triplet diagonal, so each mode
    # looks thermal and partial transposition changes nothing
    psi = correlated_pure_state(classical_coefficients(0.3, 24, "tpg"), "tpg")
    cov = covariance_of(psi)
    nbar = cov.matrix[0, 0] - 0.5
    assert nbar > 0
    off = cov.matrix - np.diag(np.diag(cov.matrix))
    assert np.abs(off).max() < 1e-10
    for cut in (("A",), ("B",), ("C",), ("A", "B")):
        nu = ppt_min_symplectic(cov, cut)
        assert nu == pytest.approx(nbar + 0.5, abs=1e-8)
        assert nu >= 0.5


def test_restricted_and_validation():
    psi = correlated_pure_state(classical_coefficients(0.4, 40, "sodc"), "sodc")
    cov = covariance_of(psi)
    sub = cov.restricted(("B",))
    assert sub.labels == ("B",)
    assert sub.matrix[0, 0] == pytest.approx(np.cosh(0.8) / 2, abs=1e-8)
    with pytest.raises(UnphysicalCovarianceError):
        CovarianceMatrix(np.eye(2) / 4, np.zeros(2), ("A",)).validate()
    with pytest.raises(ConfigError):
        cov.restricted(("Z",))


def test_gaussian_entropy_floor_is_exact_zero():
    assert gaussian_entropy(np.array([0.5, 0.5])) == 0.0
    assert gaussian_entropy(0.5 - 1e-12) == 0.0
    # analytic value at nu = 3/2 (nbar = 1): 2 ln 2 - 1 ln 1
    assert gaussian_entropy(1.5) == pytest.approx(2.0 * np.log(2.0), abs=1e-12)


def test_covariance_matches_between_vector_and_density_paths():
    rng = np.random.default_rng(9)
    lay = ModeLayout(("A", "B"), (5, 5))
    v = rng.normal(size=25) + 1j * rng.normal(size=25)
    psi = StateVector(lay, v / np.linalg.norm(v))
    c1 = covariance_of(psi)
    c2 = covariance_of(psi.density())
    assert np.abs(c1.matrix - c2.matrix).max() < 1e-10
    assert np.abs(c1.mean - c2.mean).max() < 1e-10
