"""State measures: entropies, nonGaussianity, negativity, photon statistics,
quadrature marginals and Wigner functions.

Everything here comes in two flavors. The generic functions take a
StateVector or DensityOperator and work at any cutoff a dense reduced matrix
can afford; they are the oracles. The correlated-support fast paths take the
compact matrix R of a state sum_{n,n'} R[n,n'] |n..n><n'..n'| and evaluate the
same measures in closed form, which is what the production sweeps use.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, InvalidStateError
from .fock import DensityOperator, StateVector, partial_trace, partial_transpose
from .gaussian import covariance_of, gaussian_entropy

_DENSE_LIMIT = 4096  # largest dimension we will hand to a dense eigensolver


def _shannon(probs):
    p = np.asarray(probs, dtype=np.float64)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def _eigen_entropy(matrix):
    w = np.linalg.eigvalsh(matrix)
    if w.min() < -1e-8:
        raise InvalidStateError("density matrix has eigenvalue %.3e" % w.min())
    return _shannon(np.clip(w, 0.0, None))


def von_neumann_entropy(state):
    """Entropy in nats. Pure input short-circuits to an exact zero."""
    if isinstance(state, StateVector):
        return 0.0
    return _eigen_entropy(state.matrix)


def qre(state, labels=None):
    """Relative entropy of nonGaussianity: S(Gaussian twin) - S(state).

    The Gaussian twin shares the state's first and second moments, so its
    entropy comes from the symplectic spectrum of covariance_of. With `labels`
    the measure applies to that reduced state; reductions go through a dense
    partial trace and are limited to small dimensions.
    """
    if labels is not None and tuple(labels) != state.layout.labels:
        cov = covariance_of(state, labels)
        sub = state.layout.restricted(labels)
        if sub.dim > _DENSE_LIMIT:
            raise ConfigError("reduced dimension %d too large for the generic "
                              "path; use the correlated fast path" % sub.dim)
        s = von_neumann_entropy(partial_trace(state, labels))
    else:
        cov = covariance_of(state)
        s = von_neumann_entropy(state)
    return gaussian_entropy(cov) - s


def log_negativity(state, transposed):
    """ln of the trace norm after partial transposition of `transposed` modes.

    A diagonal partial transpose (which is what reduced correlated states
    produce) skips the eigensolve; everything else pays one dense eigh.
    """
    if isinstance(state, StateVector):
        state = state.density()
    pt = partial_transpose(state, transposed)
    off = pt.copy()
    np.fill_diagonal(off, 0.0)
    if np.abs(off).max() < 1e-15:
        total = np.abs(np.diag(pt).real).sum()
    else:
        if pt.shape[0] > _DENSE_LIMIT:
            raise ConfigError("dimension %d too large for dense negativity"
                              % pt.shape[0])
        total = np.abs(np.linalg.eigvalsh(pt)).sum()
    return float(np.log(total))


@dataclass
class PhotonStatistics:
    probs: np.ndarray
    nbar: float
    variance: float
    mandel_q: float

    @classmethod
    def from_probs(cls, probs):
        p = np.asarray(probs, dtype=np.float64)
        total = p.sum()
        if total <= 0:
            raise InvalidStateError("photon distribution has no mass")
        p = p / total
        n = np.arange(p.size)
        nbar = float(np.sum(n * p))
        var = float(np.sum(n * n * p) - nbar ** 2)
        q = (var - nbar) / nbar if nbar > 0 else 0.0
        return cls(p, nbar, var, float(q))

    def log_probs(self, floor=1e-300):
        return np.log(np.maximum(self.probs, floor))


def photon_statistics(state, label=None):
    """Photon-number distribution of one mode (default: the only mode)."""
    layout = state.layout
    if label is None:
        if layout.nmodes != 1:
            raise ConfigError("label required for a multimode state")
        label = layout.labels[0]
    if layout.nmodes == 1:
        if isinstance(state, StateVector):
            probs = np.abs(state.amplitudes) ** 2
        else:
            probs = np.real(np.diag(state.matrix))
    else:
        ax = layout.axis(label)
        if isinstance(state, StateVector):
            probs = np.abs(state.tensor()) ** 2
            probs = probs.sum(axis=tuple(i for i in range(layout.nmodes) if i != ax))
        else:
            probs = np.real(np.diag(partial_trace(state, (label,)).matrix))
    return PhotonStatistics.from_probs(probs)


def _single_mode_density(state, label):
    layout = state.layout
    if layout.nmodes == 1:
        if isinstance(state, StateVector):
            return state.density().matrix
        return state.matrix
    return partial_trace(state, (label,)).matrix


def quadrature_marginal(state, label, xs):
    """Probability density of the X quadrature of one mode on the grid xs."""
    rho = _single_mode_density(state, label)
    d = rho.shape[0]
    tab = kernels.hermite_table(np.asarray(xs, dtype=np.float64), d)
    # sum_mn psi_m(x) rho_mn psi_n(x)
    vals = np.einsum("xm,mn,xn->x", tab, rho, tab).real
    return np.clip(vals, 0.0, None)


@dataclass
class WignerGrid:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    xlabel: str
    ylabel: str

    def integrate(self):
        dx = self.xs[1] - self.xs[0]
        dy = self.ys[1] - self.ys[0]
        return float(self.values.sum() * dx * dy)


def wigner_single(state, label, xs, ps, chunk=1024):
    """Single-mode Wigner function W(x, p), values indexed [ix, ip].

    Diagonal reduced states ride the Laguerre radial kernel; anything with
    coherences goes through displaced-parity kernels, chunked so the kernel
    stacks stay modest.
    """
    rho = _single_mode_density(state, label)
    d = rho.shape[0]
    xs = np.asarray(xs, dtype=np.float64)
    ps = np.asarray(ps, dtype=np.float64)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    off = rho.copy()
    np.fill_diagonal(off, 0.0)
    if np.abs(off).max() < 1e-15:
        probs = np.real(np.diag(rho))
        tab = kernels.laguerre_wigner_table((X * X + P * P).ravel(), d)
        vals = tab @ probs
    else:
        alphas = ((X + 1j * P) / np.sqrt(2.0)).ravel()
        vals = np.empty(alphas.size)
        for lo in range(0, alphas.size, chunk):
            K = kernels.displaced_parity_stack(alphas[lo:lo + chunk], d)
            vals[lo:lo + chunk] = np.einsum("mn,knm->k", rho, K).real / np.pi
    return WignerGrid(xs, ps, vals.reshape(X.shape), "x:%s" % label, "p:%s" % label)


_PLANES = ("xx", "pp", "xp")


def _slice_alphas(plane, xs, ys):
    if plane == "xx":
        return xs / np.sqrt(2.0) + 0.0j, ys / np.sqrt(2.0) + 0.0j
    if plane == "pp":
        return 1j * xs / np.sqrt(2.0), 1j * ys / np.sqrt(2.0)
    if plane == "xp":
        return xs / np.sqrt(2.0) + 0.0j, 1j * ys / np.sqrt(2.0)
    raise ConfigError("plane must be one of %s" % (_PLANES,))


def _pair_tensor(state, labels):
    """Reduced two-mode density tensor [ketA, ketB, braA, braB] in the order
    the caller asked for, regardless of the parent layout's order."""
    layout = state.layout
    if layout.nmodes == 2 and tuple(labels) == layout.labels:
        return state.tensor()
    red = partial_trace(state, labels)
    t = red.tensor()
    if red.layout.labels != tuple(labels):
        t = np.transpose(t, (1, 0, 3, 2))
    return t


def wigner_slice(state, labels, plane, xs, ys):
    """Two-mode Wigner cross section over a pair of modes.

    plane "xx" shows W(x_i, x_j) at p_i = p_j = 0, "pp" the momenta at zero
    positions, "xp" mixes the first mode's position with the second mode's
    momentum. Remaining modes are traced over.
    """
    if len(labels) != 2:
        raise ConfigError("wigner_slice works on exactly two modes")
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    al_a, al_b = _slice_alphas(plane, xs, ys)
    layout = state.layout
    da = layout.cutoff(labels[0])
    db = layout.cutoff(labels[1])
    KA = kernels.displaced_parity_stack(al_a, da)
    KB = kernels.displaced_parity_stack(al_b, db)
    if isinstance(state, StateVector):
        # reorder to (A, B, rest) and contract the pure tensor twice
        ia, ib = layout.axis(labels[0]), layout.axis(labels[1])
        perm = [ia, ib] + [k for k in range(layout.nmodes) if k not in (ia, ib)]
        t = np.transpose(state.tensor(), perm).reshape(da, db, -1)
        u = np.einsum("inm,mbr->inbr", KA, t)
        w = np.einsum("inbr,ncr->ibc", u, t.conj())
        vals = np.einsum("jcb,ibc->ij", KB, w)
    else:
        r4 = _pair_tensor(state, labels)
        u = np.einsum("inm,mbnc->ibc", KA, r4)
        vals = np.einsum("jcb,ibc->ij", KB, u)
    vals = vals.real / np.pi ** 2
    names = {"xx": ("x", "x"), "pp": ("p", "p"), "xp": ("x", "p")}[plane]
    return WignerGrid(xs, ys, vals,
                      "%s:%s" % (names[0], labels[0]),
                      "%s:%s" % (names[1], labels[1]))


def joint_quadrature_density(state, labels, xs, ys):
    """Joint probability density of (X_i, X_j) for two modes."""
    if len(labels) != 2:
        raise ConfigError("joint_quadrature_density works on exactly two modes")
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    layout = state.layout
    da = layout.cutoff(labels[0])
    db = layout.cutoff(labels[1])
    HA = kernels.hermite_table(xs, da)
    HB = kernels.hermite_table(ys, db)
    if isinstance(state, StateVector):
        ia, ib = layout.axis(labels[0]), layout.axis(labels[1])
        perm = [ia, ib] + [k for k in range(layout.nmodes) if k not in (ia, ib)]
        t = np.transpose(state.tensor(), perm).reshape(da, db, -1)
        u = np.einsum("im,mbr->ibr", HA, t)
        v = np.einsum("jb,ibr->ijr", HB, u)
        vals = np.sum(np.abs(v) ** 2, axis=2)
    else:
        r4 = _pair_tensor(state, labels)
        u = np.einsum("im,mbnc->ibnc", HA, r4)
        u = np.einsum("in,ibnc->ibc", HA, u)
        u = np.einsum("jb,ibc->ijc", HB, u)
        vals = np.einsum("jc,ijc->ij", HB, u).real
    return WignerGrid(xs, ys, np.clip(vals, 0.0, None),
                      "x:%s" % labels[0], "x:%s" % labels[1])


# ---------------------------------------------------------------------------
# correlated-support closed forms

@dataclass
class CorrelatedMeasures:
    """Measures of a state sum R[n,n'] |n..n><n'..n'| over `nmodes` modes.

    delta_* are relative entropies of nonGaussianity at the three reduction
    levels (delta_pair only exists for three modes: the pair reduction of a
    two-mode state is the single-mode one). log_negativity splits one mode
    against the rest.
    """

    nmodes: int
    trace: float
    probs: np.ndarray
    nbar: float
    pair_moment: float
    entropy: float
    entropy_reduced: float
    delta_full: float
    delta_pair: float
    delta_single: float
    log_negativity: float


def correlated_measures(R, nmodes):
    """Closed-form measures for a correlated-support state.

    Accepts the matrix R (or a coefficient vector c for the pure case,
    R = c c^T). The Gaussian twin of the full state is a product of thermal
    modes when nmodes = 3 (all pair moments vanish on the triplet diagonal)
    but keeps the <a_A a_B> correlation when nmodes = 2, where the twin's
    symplectic eigenvalue is sqrt(V^2 - C^2).
    """
    R = np.asarray(R, dtype=np.float64)
    if R.ndim == 1:
        R = np.outer(R, R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ConfigError("R must be square (or a coefficient vector)")
    if nmodes not in (2, 3):
        raise ConfigError("nmodes must be 2 or 3")
    tr = float(np.trace(R))
    if tr <= 0:
        raise InvalidStateError("correlated matrix has nonpositive trace")
    Rn = R / tr
    probs = np.clip(np.diag(Rn), 0.0, None)
    n = np.arange(R.shape[0])
    nbar = float(np.sum(n * probs))
    V = nbar + 0.5
    C = float(np.sum(n[1:] * np.diag(Rn, -1)))  # <a_A a_B>, pairs only
    s_full = _eigen_entropy(Rn)
    h = _shannon(probs)
    f1 = gaussian_entropy(V)
    if nmodes == 3:
        delta_full = 3.0 * f1 - s_full
        delta_pair = 2.0 * f1 - h
    else:
        nu = np.sqrt(max(V * V - C * C, 0.25))
        delta_full = 2.0 * gaussian_entropy(nu) - s_full
        delta_pair = float("nan")
    delta_single = f1 - h
    e_n = float(np.log(np.abs(Rn).sum()))
    return CorrelatedMeasures(nmodes, tr, probs, nbar, C, s_full, h,
                              delta_full, delta_pair, delta_single, e_n)
