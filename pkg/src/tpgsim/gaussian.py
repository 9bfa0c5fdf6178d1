"""Second-moment (Gaussian) toolbox.

Conventions: quadratures X = (a + a+)/sqrt(2), P = -i(a - a+)/sqrt(2), so the
vacuum variance is 1/2 and hbar = 1. Covariance matrices are ordered
(X_1, P_1, X_2, P_2, ...) over their label tuple. The symplectic form is
Omega = direct sum of [[0, 1], [-1, 0]].
"""

from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, DegenerateConditioningError,
                     UnphysicalCovarianceError)
from .fock import DensityOperator, StateVector, build_ladder


@dataclass
class CovarianceMatrix:
    """Symmetrized covariance matrix with first moments, over labelled modes."""

    matrix: np.ndarray
    mean: np.ndarray
    labels: tuple

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        mu = np.asarray(self.mean, dtype=np.float64)
        n = 2 * len(self.labels)
        if m.shape != (n, n) or mu.shape != (n,):
            raise ConfigError("covariance shape mismatch for %d modes"
                              % len(self.labels))
        if np.abs(m - m.T).max() > 1e-10:
            raise ConfigError("covariance matrix must be symmetric")
        self.matrix = (m + m.T) / 2.0
        self.mean = mu
        self.labels = tuple(self.labels)

    @property
    def nmodes(self):
        return len(self.labels)

    def restricted(self, labels):
        idx = []
        for l in labels:
            if l not in self.labels:
                raise ConfigError("no mode %r in covariance" % l)
        keep = [l for l in self.labels if l in set(labels)]
        for l in keep:
            i = self.labels.index(l)
            idx.extend([2 * i, 2 * i + 1])
        idx = np.array(idx)
        return CovarianceMatrix(self.matrix[np.ix_(idx, idx)], self.mean[idx],
                                tuple(keep))

    def validate(self, tol=1e-6):
        """Uncertainty check: every symplectic eigenvalue must be >= 1/2."""
        nu = symplectic_eigenvalues(self)
        if nu.min() < 0.5 - tol:
            raise UnphysicalCovarianceError(
                "symplectic eigenvalue %.8f below the vacuum floor" % nu.min())
        return self


def _ladder_moments(state, labels):
    """First moments <a_i>, pair moments <a_i a_j> and <a_i+ a_j>.

    Operators act on the state's full layout, so no reduction (and no large
    intermediate density matrix) is ever needed for pure states.
    """
    ops = [build_ladder(state.layout, l).data for l in labels]
    k = len(ops)
    e1 = np.zeros(k, dtype=np.complex128)
    cc = np.zeros((k, k), dtype=np.complex128)
    gg = np.zeros((k, k), dtype=np.complex128)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        down = [op @ psi for op in ops]          # a_i |psi>
        up = [op.conj().T @ psi for op in ops]   # a_i+ |psi>
        for i in range(k):
            e1[i] = np.vdot(psi, down[i])
            for j in range(k):
                cc[i, j] = np.vdot(up[i], down[j])
                gg[i, j] = np.vdot(down[i], down[j])
    elif isinstance(state, DensityOperator):
        rho = state.matrix
        right = [op @ rho for op in ops]         # a_j rho
        for i in range(k):
            e1[i] = np.trace(right[i])
            for j in range(k):
                cc[i, j] = (ops[i] @ right[j]).diagonal().sum()
                gg[i, j] = (ops[i].conj().T @ right[j]).diagonal().sum()
    else:
        raise ConfigError("state must be a StateVector or DensityOperator")
    return e1, cc, gg


def covariance_of(state, labels=None):
    """Covariance matrix of `state` over `labels` (default: all its modes)."""
    labels = tuple(labels) if labels is not None else state.layout.labels
    e1, cc, gg = _ladder_moments(state, labels)
    k = len(labels)
    # centered moments
    C = cc - np.outer(e1, e1)
    G = gg - np.outer(e1.conj(), e1)
    sigma = np.zeros((2 * k, 2 * k))
    for i in range(k):
        for j in range(k):
            sigma[2 * i, 2 * j] = C[i, j].real + G[i, j].real + 0.5 * (i == j)
            sigma[2 * i + 1, 2 * j + 1] = -C[i, j].real + G[i, j].real + 0.5 * (i == j)
            sigma[2 * i, 2 * j + 1] = C[i, j].imag + G[i, j].imag
            sigma[2 * i + 1, 2 * j] = C[i, j].imag - G[i, j].imag
    mean = np.zeros(2 * k)
    mean[0::2] = np.sqrt(2.0) * e1.real
    mean[1::2] = np.sqrt(2.0) * e1.imag
    return CovarianceMatrix(sigma, mean, labels)


def _omega(nmodes):
    out = np.zeros((2 * nmodes, 2 * nmodes))
    for i in range(nmodes):
        out[2 * i, 2 * i + 1] = 1.0
        out[2 * i + 1, 2 * i] = -1.0
    return out


def _as_matrix(cov):
    return cov.matrix if isinstance(cov, CovarianceMatrix) else np.asarray(cov)


def symplectic_eigenvalues(cov):
    """Symplectic spectrum of a covariance matrix, ascending.

    Eigenvalues of Omega sigma come in +-i nu pairs; the paired magnitudes are
    averaged to wash out the eigensolver's tiny splitting.
    """
    m = _as_matrix(cov)
    nmodes = m.shape[0] // 2
    w = np.linalg.eigvals(_omega(nmodes) @ m)
    mags = np.sort(np.abs(w))
    return (mags[0::2] + mags[1::2]) / 2.0


def gaussian_entropy(nu):
    """Entropy (nats) of a Gaussian state from its symplectic spectrum.

    Accepts a scalar, an array of symplectic eigenvalues or a
    CovarianceMatrix. Values are clamped at the vacuum floor so f(1/2) is an
    exact zero rather than 0 * log(0).
    """
    if isinstance(nu, CovarianceMatrix) or (np.ndim(nu) == 2):
        nu = symplectic_eigenvalues(nu)
    x = np.maximum(np.asarray(nu, dtype=np.float64), 0.5)
    # eigensolver noise a hair above the floor must not leak into entropies
    x = np.where(x - 0.5 < 1e-12, 0.5, x)
    plus = x + 0.5
    minus = x - 0.5
    out = plus * np.log(plus) - np.where(minus > 0.0,
                                         minus * np.log(np.where(minus > 0.0, minus, 1.0)),
                                         0.0)
    return float(np.sum(out))


def ppt_min_symplectic(cov, transposed):
    """Minimum symplectic eigenvalue after partial transposition.

    Partial transposition flips the momenta of the transposed modes. A value
    below 1/2 witnesses entanglement across the cut, and for Gaussian states
    max(0, -ln(2 nu)) is the logarithmic negativity.
    """
    if not isinstance(cov, CovarianceMatrix):
        raise ConfigError("ppt_min_symplectic needs a CovarianceMatrix")
    flip = np.ones(2 * cov.nmodes)
    hit = False
    for l in transposed:
        i = cov.labels.index(l)
        flip[2 * i + 1] = -1.0
        hit = True
    if not hit:
        raise ConfigError("must transpose at least one mode")
    m = cov.matrix * np.outer(flip, flip)
    return float(symplectic_eigenvalues(m).min())


def steering_R(cov, inferred, conditioner):
    """Conditional-variance product for inferring `inferred` from `conditioner`.

    R = 2 sqrt(Vx_inf * Vp_inf) with the optimal linear estimator
    g = Cov(A, B)/Var(B) applied per quadrature; R = 1 for uncorrelated
    vacuum and R < 1 demonstrates steering.
    """
    if not isinstance(cov, CovarianceMatrix):
        raise ConfigError("steering_R needs a CovarianceMatrix")
    i = cov.labels.index(inferred)
    j = cov.labels.index(conditioner)
    if i == j:
        raise ConfigError("inferred and conditioning modes must differ")
    m = cov.matrix
    out = 2.0
    for q in (0, 1):
        va = m[2 * i + q, 2 * i + q]
        vb = m[2 * j + q, 2 * j + q]
        c = m[2 * i + q, 2 * j + q]
        if vb < 1e-12:
            raise DegenerateConditioningError(
                "conditioning quadrature has no variance")
        vinf = va - c * c / vb
        out *= np.sqrt(max(vinf, 0.0))
    return float(out)
