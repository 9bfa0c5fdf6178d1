import numpy as np
import pytest

from tpgsim.errors import ConfigError
from tpgsim.dynamics import classical_coefficients, correlated_pure_state
from tpgsim.baselines import (PerturbativeTPS, perturbative_tps,
                              perturbative_total_photons, scaling_residual,
                              tmsv_entropy, tmsv_log_negativity,
                              tmsv_photon_dist)
from tpgsim.gaussian import gaussian_entropy
from tpgsim.measures import correlated_measures, photon_statistics


def test_tmsv_entropy_equals_gaussian_formula():
    for xi in (0.0, 0.1, 0.5, 0.9):
        nbar = np.sinh(xi) ** 2
        assert tmsv_entropy(xi) == pytest.approx(gaussian_entropy(nbar + 0.5),
                                                 abs=1e-12)


def test_tmsv_photon_dist_properties():
    p = tmsv_photon_dist(0.5, 64)
    assert p.sum() == pytest.approx(1.0, abs=1e-10)
    nbar = np.sum(np.arange(64) * p)
    assert nbar == pytest.approx(np.sinh(0.5) ** 2, abs=1e-10)
    # matches the evolved engine's per-mode distribution
    psi = correlated_pure_state(classical_coefficients(0.5, 64, "sodc"), "sodc")
    st = photon_statistics(psi, "A")
    assert np.abs(st.probs - p).max() < 1e-8


def test_tmsv_log_negativity_linear():
    assert tmsv_log_negativity(0.35) == pytest.approx(0.7)


def test_perturbative_forms():
    p = perturbative_tps(0.1)
    assert p.form == "compact"
    assert np.linalg.norm(p.coefficients) == pytest.approx(1.0)
    assert p.coefficients[1] / p.coefficients[0] == pytest.approx(
        0.1 / (1 - 0.005), abs=1e-12)
    s = perturbative_tps(0.1, "series")
    assert s.coefficients[2] > p.coefficients[2]
    assert s.coefficients[2] / s.coefficients[1] == pytest.approx(
        np.sqrt(2.0) * 0.1, abs=1e-12)
    with pytest.raises(ConfigError):
        perturbative_tps(0.1, "cubic")


def test_perturbative_state_embedding():
    st = perturbative_tps(0.2).state(cutoff=5)
    assert st.layout.cutoffs == (5, 5, 5)
    assert st.norm() == pytest.approx(1.0)
    assert abs(st.amplitudes[st.layout.index((1, 1, 1))]) > 0.19
    with pytest.raises(ConfigError):
        perturbative_tps(0.2).state(cutoff=2)


def test_perturbative_overlap_with_evolved_state():
    c = classical_coefficients(0.1, 16, "tpg")
    p = perturbative_tps(0.1).coefficients
    overlap = float(np.dot(c[:3], p)) ** 2
    assert overlap > 0.999


def test_perturbative_total_photons_against_evolved():
    for xi in (0.1, 0.2):
        lam = perturbative_total_photons(xi)
        c = classical_coefficients(xi, 24, "tpg")
        n_tot = 3.0 * np.sum(np.arange(24) * c ** 2)
        assert lam == pytest.approx(n_tot, rel=0.1)
    assert perturbative_total_photons(0.1) == pytest.approx(0.030125)


def test_scaling_residual_identity_for_pure_states():
    # for a pure classical-pump state the residual collapses to the
    # single-mode entropy
    for xi in (0.1, 0.3):
        c = classical_coefficients(xi, 32, "tpg")
        m = correlated_measures(c, 3)
        lhs, rhs, res = scaling_residual(m.delta_full, m.delta_pair,
                                         m.delta_single)
        assert lhs == pytest.approx(m.delta_full)
        probs = c ** 2
        s_a = -np.sum(probs[probs > 0] * np.log(probs[probs > 0]))
        assert res == pytest.approx(s_a, abs=1e-10)
    # the residual grows with interaction strength
    m1 = correlated_measures(classical_coefficients(0.1, 32, "tpg"), 3)
    m3 = correlated_measures(classical_coefficients(0.3, 32, "tpg"), 3)
    r1 = scaling_residual(m1.delta_full, m1.delta_pair, m1.delta_single)[2]
    r3 = scaling_residual(m3.delta_full, m3.delta_pair, m3.delta_single)[2]
    assert abs(r1) < abs(r3)
