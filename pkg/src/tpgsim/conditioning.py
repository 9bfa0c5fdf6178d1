"""Homodyne conditioning: projecting one mode onto a quadrature value and
measuring what is left.

The sweep comes in two flavors matching the two state representations. The
tensor path takes a pure three-mode state, contracts the conditioned mode with
the quadrature eigenvector and analyzes the remaining pure pair exactly (SVD
for entanglement, ladder moments for the Gaussian twin). The correlated path
takes the compact matrix R of a pump-traced state, where conditioning is an
elementwise product with psi psi^T and every measure has a closed form.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateConditioningError
from .fock import DensityOperator, ModeLayout, StateVector
from .gaussian import covariance_of, gaussian_entropy, steering_R
from .measures import correlated_measures

_DENSITY_FLOOR = 1e-250


def quadrature_eigenvector(cutoff, x):
    """Fock-basis components psi_n(x) of the X-quadrature eigenvector <x|."""
    return kernels.hermite_table(np.array([float(x)]), cutoff)[0]


def homodyne_project(state, label, x):
    """Project mode `label` onto X = x.

    Returns (conditional_state, density): the normalized state of the
    remaining modes and the probability density of the outcome. Pure input
    gives a StateVector, mixed input a DensityOperator.
    """
    layout = state.layout
    ax = layout.axis(label)
    if layout.nmodes < 2:
        raise ConfigError("cannot condition away the only mode")
    psi = quadrature_eigenvector(layout.cutoffs[ax], x)
    rest = tuple(l for l in layout.labels if l != label)
    sub = layout.restricted(rest)
    if isinstance(state, StateVector):
        t = np.moveaxis(state.tensor(), ax, -1)
        amps = (t @ psi).reshape(sub.dim)
        density = float(np.vdot(amps, amps).real)
        if density < _DENSITY_FLOOR:
            raise DegenerateConditioningError(
                "outcome x=%g has density %.3e" % (x, density))
        return StateVector(sub, amps / np.sqrt(density)), density
    t = state.tensor()
    nm = layout.nmodes
    t = np.moveaxis(t, (ax, nm + ax), (-2, -1))
    m = ((t @ psi) @ psi).reshape(sub.dim, sub.dim)
    density = float(np.trace(m).real)
    if density < _DENSITY_FLOOR:
        raise DegenerateConditioningError(
            "outcome x=%g has density %.3e" % (x, density))
    return DensityOperator(sub, m / density, validate=False), density


@dataclass
class ConditionalResult:
    """Measures of the two remaining modes after conditioning at x."""

    x: float
    density: float
    log_negativity: float
    steering: float
    delta_pair: float
    delta_single: float
    entropy: float
    nbar: float
    pair_moment: float


def _steering_from_blocks(V, C):
    # symmetric pair: both inferred quadrature variances are V - C^2/V
    return float(2.0 * max(V - C * C / V, 0.0))


def conditional_sweep(state, label, xs):
    """Condition a pure three-mode state on each x in xs.

    The remaining pair is pure, so its entanglement is the Schmidt sum
    (E_N = 2 ln sum of singular values) and its nonGaussianity is the Gaussian
    twin's entropy alone.
    """
    if not isinstance(state, StateVector):
        raise ConfigError("the tensor sweep needs a pure state; use the "
                          "correlated sweep for pump-traced states")
    layout = state.layout
    if layout.nmodes != 3:
        raise ConfigError("conditional_sweep expects exactly three modes")
    ax = layout.axis(label)
    keep = tuple(l for l in layout.labels if l != label)
    sub = layout.restricted(keep)
    tab = kernels.hermite_table(np.asarray(xs, dtype=np.float64),
                                layout.cutoffs[ax])
    t = np.moveaxis(state.tensor(), ax, -1)
    out = []
    for i, x in enumerate(np.asarray(xs, dtype=np.float64)):
        m = t @ tab[i]
        density = float(np.vdot(m, m).real)
        if density < _DENSITY_FLOOR:
            raise DegenerateConditioningError(
                "outcome x=%g has density %.3e" % (x, density))
        m = m / np.sqrt(density)
        sv = np.linalg.svd(m, compute_uv=False)
        e_n = float(2.0 * np.log(sv.sum()))
        pair = StateVector(sub, m.reshape(sub.dim))
        cov = covariance_of(pair)
        delta_pair = gaussian_entropy(cov)  # pure state, S = 0
        red = np.clip(np.linalg.eigvalsh(m @ m.conj().T), 0.0, None)
        red = red[red > 0]
        s_single = float(-np.sum(red * np.log(red)))
        probs = np.real(np.sum(np.abs(m) ** 2, axis=1))
        nbar = float(np.sum(np.arange(probs.size) * probs))
        delta_single = gaussian_entropy(cov.restricted(keep[:1])) - s_single
        steer = steering_R(cov, keep[0], keep[1])
        pm = cov.matrix[0, 2]  # <X_A X_B> covariance entry, for reporting
        out.append(ConditionalResult(float(x), density, e_n, steer,
                                     float(delta_pair), float(delta_single),
                                     0.0, nbar, float(pm)))
    return out


def conditional_sweep_correlated(R, xs):
    """Condition the third mode of a correlated-support state, in closed form.

    For rho = sum R[n,n'] |nnn><n'n'n'|, conditioning mode C at x multiplies R
    elementwise by psi psi^T with psi_n = psi_n(x); the remaining pair keeps
    the correlated-diagonal shape, so correlated_measures applies directly.
    """
    R = np.asarray(R, dtype=np.float64)
    if R.ndim == 1:
        R = np.outer(R, R)
    tr0 = float(np.trace(R))
    if tr0 <= 0:
        raise ConfigError("correlated matrix has nonpositive trace")
    R = R / tr0
    d = R.shape[0]
    tab = kernels.hermite_table(np.asarray(xs, dtype=np.float64), d)
    out = []
    for i, x in enumerate(np.asarray(xs, dtype=np.float64)):
        psi = tab[i]
        Rt = R * np.outer(psi, psi)
        density = float(np.trace(Rt))
        if density < _DENSITY_FLOOR:
            raise DegenerateConditioningError(
                "outcome x=%g has density %.3e" % (x, density))
        m = correlated_measures(Rt, 2)
        V = m.nbar + 0.5
        steer = _steering_from_blocks(V, m.pair_moment)
        entropy = m.entropy
        out.append(ConditionalResult(float(x), density, m.log_negativity,
                                     steer, m.delta_full, m.delta_single,
                                     entropy, m.nbar, m.pair_moment))
    return out


def conditional_state_correlated(R, x):
    """The conditioned pair state itself, as a correlated matrix (unit trace).

    Handy for Wigner sections of the conditional state without materializing
    a large density matrix.
    """
    R = np.asarray(R, dtype=np.float64)
    if R.ndim == 1:
        R = np.outer(R, R)
    psi = quadrature_eigenvector(R.shape[0], x)
    Rt = (R / np.trace(R)) * np.outer(psi, psi)
    tr = float(np.trace(Rt))
    if tr < _DENSITY_FLOOR:
        raise DegenerateConditioningError("outcome x=%g has density %.3e"
                                          % (x, tr))
    return Rt / tr


def correlated_density_operator(R, labels=("A", "B")):
    """Materialize sum R[n,n'] |nn><n'n'| as a dense DensityOperator.

    Only for modest cutoffs; the sweeps never need this, but Wigner sections
    and generic-path cross-checks do.
    """
    R = np.asarray(R, dtype=np.float64)
    if R.ndim == 1:
        R = np.outer(R, R)
    d = R.shape[0]
    layout = ModeLayout(tuple(labels), (d,) * len(labels))
    if layout.dim > 4096:
        raise ConfigError("dimension %d too large to materialize" % layout.dim)
    rho = np.zeros((layout.dim, layout.dim))
    idx = np.array([layout.index((n,) * len(labels)) for n in range(d)])
    rho[np.ix_(idx, idx)] = R / np.trace(R)
    return DensityOperator(layout, rho, validate=False)
