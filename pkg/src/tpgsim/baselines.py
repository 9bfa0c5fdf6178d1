"""Closed-form reference results.

The pairwise down-conversion process has textbook closed forms (two-mode
squeezed vacuum); the triple process has a short-time perturbative expansion.
Both serve as independent oracles for the evolution engines, and the scaling
relation between the three nonGaussianity levels gets its diagnostic here.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .fock import ModeLayout, StateVector


def tmsv_entropy(xi):
    """Reduced single-mode entropy of the pair process at strength xi."""
    ch2 = np.cosh(xi) ** 2
    sh2 = np.sinh(xi) ** 2
    if sh2 == 0.0:
        return 0.0
    return float(ch2 * np.log(ch2) - sh2 * np.log(sh2))


def tmsv_photon_dist(xi, cutoff):
    """Per-mode photon distribution tanh^(2n)/cosh^2 of the pair process."""
    n = np.arange(cutoff)
    return np.tanh(xi) ** (2 * n) / np.cosh(xi) ** 2


def tmsv_log_negativity(xi):
    """E_N of the pair process grows linearly: 2 xi."""
    return 2.0 * float(xi)


_FORMS = ("compact", "series")


@dataclass
class PerturbativeTPS:
    """Short-time triplet state c0 |000> + c1 |111> + c2 |222>, normalized.

    Two variants of the double-conversion amplitude circulate: the compact
    quadratic form xi^2/2, and the coefficient sqrt(2) xi^2 that falls out of
    carrying the series expansion exactly. The compact form is the default;
    both agree through first order.
    """

    xi: float
    form: str
    coefficients: np.ndarray

    def state(self, cutoff=3):
        if cutoff < 3:
            raise ConfigError("perturbative state needs cutoff >= 3")
        layout = ModeLayout(("A", "B", "C"), (cutoff,) * 3)
        amps = np.zeros(layout.dim, dtype=np.complex128)
        for n, c in enumerate(self.coefficients):
            amps[layout.index((n, n, n))] = c
        return StateVector(layout, amps)


def perturbative_tps(xi, form="compact"):
    if form not in _FORMS:
        raise ConfigError("form must be one of %s" % (_FORMS,))
    xi = float(xi)
    c2 = 0.5 * xi ** 2 if form == "compact" else np.sqrt(2.0) * xi ** 2
    raw = np.array([1.0 - 0.5 * xi ** 2, xi, c2])
    return PerturbativeTPS(xi, form, raw / np.linalg.norm(raw))


def perturbative_total_photons(xi):
    """Leading-order total mean photon number of the triplet state,
    3 xi^2 + (5/4) xi^4."""
    return 3.0 * xi ** 2 + 1.25 * xi ** 4


def scaling_residual(delta_full, delta_pair, delta_single):
    """Residual of the two-for-one reduction relation among the three
    nonGaussianity levels.

    Returns (lhs, rhs, residual) with lhs the full-state delta, rhs the
    combination 2 delta_pair - delta_single, and residual their difference.
    For a pure classical-pump state the residual equals the single-mode
    entropy exactly, so it grows with xi.
    """
    lhs = float(delta_full)
    rhs = 2.0 * float(delta_pair) - float(delta_single)
    return lhs, rhs, lhs - rhs
