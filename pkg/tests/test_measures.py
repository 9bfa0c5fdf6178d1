import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.special import factorial

from tpgsim.errors import ConfigError, InvalidStateError
from tpgsim.fock import (DensityOperator, ModeLayout, StateVector, basis_state,
                         coherent_state, partial_trace, vacuum_state)
from tpgsim.dynamics import (HamiltonianSpec, classical_coefficients,
                             correlated_pure_state, pump_sector_amplitudes,
                             pump_traced_matrix)
from tpgsim.measures import (CorrelatedMeasures, PhotonStatistics,
                             correlated_measures, joint_quadrature_density,
                             log_negativity, photon_statistics, qre,
                             quadrature_marginal, von_neumann_entropy,
                             wigner_single, wigner_slice)


def test_entropy_pure_and_mixed():
    assert von_neumann_entropy(vacuum_state(ModeLayout(("A",), (3,)))) == 0.0
    lay = ModeLayout(("A",), (2,))
    rho = DensityOperator(lay, np.diag([0.5, 0.5]))
    assert von_neumann_entropy(rho) == pytest.approx(np.log(2.0), abs=1e-12)
    with pytest.raises(InvalidStateError):
        von_neumann_entropy(DensityOperator(lay, np.diag([1.5, -0.5]),
                                            validate=False))


def test_qre_vanishes_for_gaussian_states():
    # coherent and two-mode squeezed states are Gaussian
    assert abs(qre(coherent_state(30, 0.6 + 0.2j))) < 1e-7
    psi = correlated_pure_state(classical_coefficients(0.3, 30, "sodc"), "sodc")
    assert abs(qre(psi)) < 1e-8


def test_qre_of_fock_state():
    # |1> has thermal twin with nbar = 1: delta = 2 ln 2
    lay = ModeLayout(("A",), (4,))
    assert qre(basis_state(lay, (1,))) == pytest.approx(2 * np.log(2), abs=1e-10)


def test_qre_reduction_matches_direct_computation():
    psi = correlated_pure_state(classical_coefficients(0.4, 16, "tpg"), "tpg")
    d_direct = qre(psi, ("A",))
    rho = partial_trace(psi, ("A",))
    assert d_direct == pytest.approx(qre(rho), abs=1e-10)


def test_log_negativity_bell_state():
    lay = ModeLayout(("A", "B"), (2, 2))
    amps = np.zeros(4, dtype=complex)
    amps[lay.index((0, 0))] = amps[lay.index((1, 1))] = 1 / np.sqrt(2)
    assert log_negativity(StateVector(lay, amps), ("B",)) == pytest.approx(
        np.log(2.0), abs=1e-10)


def test_log_negativity_tmsv_equals_2xi():
    for xi in (0.2, 0.5):
        psi = correlated_pure_state(classical_coefficients(xi, 40, "sodc"),
                                    "sodc")
        assert log_negativity(psi, ("B",)) == pytest.approx(2 * xi, abs=1e-5)


def test_log_negativity_separable_diagonal_is_zero():
    lay = ModeLayout(("A", "B"), (3, 3))
    p = np.arange(1.0, 10.0)
    rho = DensityOperator(lay, np.diag(p / p.sum()))
    assert log_negativity(rho, ("B",)) == pytest.approx(0.0, abs=1e-12)


def test_photon_statistics_coherent():
    alpha = 1.1
    st = photon_statistics(coherent_state(40, alpha))
    assert st.nbar == pytest.approx(alpha ** 2, abs=1e-8)
    assert st.mandel_q == pytest.approx(0.0, abs=1e-7)  # Poissonian
    n = np.arange(40)
    ref = np.exp(-alpha ** 2) * alpha ** (2 * n) / factorial(n)
    assert np.abs(st.probs - ref).max() < 1e-8


def test_photon_statistics_super_poissonian_triplet():
    psi = correlated_pure_state(classical_coefficients(0.5, 32, "tpg"), "tpg")
    st = photon_statistics(psi, "A")
    assert st.mandel_q > 0.0
    # thermal reference for the pair process has q = nbar
    pair = photon_statistics(
        correlated_pure_state(classical_coefficients(0.5, 32, "sodc"), "sodc"), "A")
    assert pair.mandel_q == pytest.approx(pair.nbar, abs=1e-6)


def test_quadrature_marginal_vacuum_and_fock():
    xs = np.linspace(-5, 5, 401)
    lay = ModeLayout(("A",), (6,))
    dens = quadrature_marginal(vacuum_state(lay), "A", xs)
    assert np.abs(dens - np.exp(-xs ** 2) / np.sqrt(np.pi)).max() < 1e-12
    dens1 = quadrature_marginal(basis_state(lay, (1,)), "A", xs)
    ref1 = 2 * xs ** 2 * np.exp(-xs ** 2) / np.sqrt(np.pi)
    assert np.abs(dens1 - ref1).max() < 1e-12
    assert trapezoid(dens1, xs) == pytest.approx(1.0, abs=1e-8)


def test_wigner_vacuum_and_fock_one():
    lay = ModeLayout(("A",), (6,))
    xs = np.linspace(-5, 5, 51)
    w = wigner_single(vacuum_state(lay), "A", xs, xs)
    i0 = 25
    assert w.values[i0, i0] == pytest.approx(1 / np.pi, abs=1e-12)
    assert w.integrate() == pytest.approx(1.0, abs=1e-6)
    w1 = wigner_single(basis_state(lay, (1,)), "A", xs, xs)
    assert w1.values[i0, i0] == pytest.approx(-1 / np.pi, abs=1e-12)


def test_wigner_coherent_state_gaussian():
    # exercises the displaced-parity path (off-diagonal Fock matrix)
    alpha = (0.9 + 0.4j) / np.sqrt(2)  # x0 = 0.9, p0 = 0.4
    psi = coherent_state(30, alpha, label="A")
    xs = np.linspace(-2, 3, 41)
    ps = np.linspace(-2, 3, 43)
    w = wigner_single(psi, "A", xs, ps)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    ref = np.exp(-(X - 0.9) ** 2 - (P - 0.4) ** 2) / np.pi
    assert np.abs(w.values - ref).max() < 1e-7


def test_wigner_marginal_consistency():
    # integrating W over p must reproduce the quadrature marginal
    psi = correlated_pure_state(classical_coefficients(0.3, 24, "tpg"), "tpg")
    xs = np.linspace(-4, 4, 81)
    ps = np.linspace(-7, 7, 281)
    w = wigner_single(psi, "A", xs, ps)
    marg = trapezoid(w.values, ps, axis=1)
    direct = quadrature_marginal(psi, "A", xs)
    assert np.abs(marg - direct).max() < 1e-8


def test_wigner_slice_two_vacua():
    lay = ModeLayout(("A", "B"), (4, 4))
    xs = np.linspace(-2, 2, 21)
    w = wigner_slice(vacuum_state(lay), ("A", "B"), "xx", xs, xs)
    assert w.values[10, 10] == pytest.approx(1 / np.pi ** 2, abs=1e-12)
    ref = np.exp(-xs[:, None] ** 2 - xs[None, :] ** 2) / np.pi ** 2
    assert np.abs(w.values - ref).max() < 1e-10
    # pp plane is identical for vacuum
    wpp = wigner_slice(vacuum_state(lay), ("A", "B"), "pp", xs, xs)
    assert np.abs(wpp.values - w.values).max() < 1e-12


def test_wigner_slice_pure_and_density_paths_agree():
    psi = correlated_pure_state(classical_coefficients(0.4, 10, "sodc"), "sodc")
    xs = np.linspace(-2.5, 2.5, 17)
    for plane in ("xx", "pp", "xp"):
        w1 = wigner_slice(psi, ("A", "B"), plane, xs, xs)
        w2 = wigner_slice(psi.density(), ("A", "B"), plane, xs, xs)
        assert np.abs(w1.values - w2.values).max() < 1e-11


def test_wigner_slice_respects_label_order():
    # an asymmetric state distinguishes (A,B) from (B,A)
    lay = ModeLayout(("A", "B"), (3, 3))
    amps = np.zeros(9, dtype=complex)
    amps[lay.index((1, 0))] = 1.0  # one photon in A only
    psi = StateVector(lay, amps)
    xs = np.linspace(-2, 2, 9)
    ys = np.linspace(-1, 1, 7)
    wab = wigner_slice(psi, ("A", "B"), "xx", xs, ys)
    wba = wigner_slice(psi, ("B", "A"), "xx", ys, xs)
    assert np.abs(wab.values - wba.values.T).max() < 1e-12
    # and the density path applies the same ordering fix
    wab2 = wigner_slice(psi.density(), ("A", "B"), "xx", xs, ys)
    wba2 = wigner_slice(psi.density(), ("B", "A"), "xx", ys, xs)
    assert np.abs(wab.values - wab2.values).max() < 1e-12
    assert np.abs(wba.values - wba2.values).max() < 1e-12


def test_joint_quadrature_density_vacuum_and_consistency():
    lay = ModeLayout(("A", "B"), (5, 5))
    xs = np.linspace(-3, 3, 25)
    d = joint_quadrature_density(vacuum_state(lay), ("A", "B"), xs, xs)
    ref = np.exp(-xs[:, None] ** 2 - xs[None, :] ** 2) / np.pi
    assert np.abs(d.values - ref).max() < 1e-12
    psi = correlated_pure_state(classical_coefficients(0.3, 12, "sodc"), "sodc")
    d1 = joint_quadrature_density(psi, ("A", "B"), xs, xs)
    d2 = joint_quadrature_density(psi.density(), ("A", "B"), xs, xs)
    assert np.abs(d1.values - d2.values).max() < 1e-10
    # grid integral close to 1
    total = d1.values.sum() * (xs[1] - xs[0]) ** 2
    assert total == pytest.approx(1.0, abs=1e-3)


def test_correlated_measures_pure_triplet_against_generic():
    c = classical_coefficients(0.3, 14, "tpg")
    psi = correlated_pure_state(c, "tpg")
    m = correlated_measures(c, 3)
    assert m.entropy == pytest.approx(0.0, abs=1e-10)
    assert m.nbar == pytest.approx(photon_statistics(psi, "A").nbar, abs=1e-10)
    assert m.delta_full == pytest.approx(qre(psi), abs=1e-8)
    rho_a = partial_trace(psi, ("A",))
    assert m.delta_single == pytest.approx(qre(rho_a), abs=1e-8)
    rho_ab = partial_trace(psi, ("A", "B"))
    assert m.delta_pair == pytest.approx(qre(rho_ab), abs=1e-8)
    assert m.log_negativity == pytest.approx(log_negativity(psi, ("A",)),
                                             abs=1e-8)


def test_correlated_measures_mixed_matches_generic():
    spec = HamiltonianSpec(pump_amplitude=1.0)
    table = pump_sector_amplitudes(0.4, spec, 8, 16)
    R = pump_traced_matrix(table)
    m = correlated_measures(R, 3)
    # build the dense three-mode state and cross-check every scalar
    lay = ModeLayout(("A", "B", "C"), (8, 8, 8))
    rho = np.zeros((lay.dim, lay.dim))
    for n in range(8):
        for n2 in range(8):
            rho[lay.index((n, n, n)), lay.index((n2, n2, n2))] = R[n, n2]
    rho = DensityOperator(lay, rho / np.trace(rho))
    assert m.entropy == pytest.approx(von_neumann_entropy(rho), abs=1e-9)
    assert m.delta_full == pytest.approx(qre(rho), abs=1e-7)
    assert m.log_negativity == pytest.approx(log_negativity(rho, ("A",)),
                                             abs=1e-9)
    ab = partial_trace(rho, ("A", "B"))
    assert m.delta_pair == pytest.approx(qre(ab), abs=1e-7)
    # pairwise entanglement dies with the third mode traced out
    assert log_negativity(ab, ("B",)) == pytest.approx(0.0, abs=1e-12)


def test_correlated_measures_sodc_gaussian_twin_keeps_correlations():
    # for the pair process the state is Gaussian, so delta_full must vanish
    # even though the naive product-thermal twin would not see that
    c = classical_coefficients(0.5, 40, "sodc")
    m = correlated_measures(c, 2)
    assert abs(m.delta_full) < 1e-8
    assert m.pair_moment == pytest.approx(np.sinh(0.5) * np.cosh(0.5), abs=1e-6)
    assert m.delta_single == pytest.approx(
        qre(partial_trace(correlated_pure_state(c, "sodc"), ("A",))), abs=1e-8)
    assert np.isnan(m.delta_pair)


def test_correlated_measures_validation():
    with pytest.raises(ConfigError):
        correlated_measures(np.ones((3, 2)), 3)
    with pytest.raises(ConfigError):
        correlated_measures(np.eye(3), 4)
    with pytest.raises(InvalidStateError):
        correlated_measures(np.zeros((3, 3)), 3)


def test_photon_statistics_from_probs_normalizes():
    st = PhotonStatistics.from_probs([2.0, 2.0])
    assert st.probs.sum() == pytest.approx(1.0)
    assert st.nbar == pytest.approx(0.5)
    with pytest.raises(InvalidStateError):
        PhotonStatistics.from_probs([0.0, 0.0])
