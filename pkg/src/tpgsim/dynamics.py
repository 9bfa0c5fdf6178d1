"""Hamiltonians and time evolution.

Three routes produce states here, each checkable against the others:

* full-space evolution of a StateVector under the sparse Hamiltonian, either
  by dense eigendecomposition (small dims) or by an adaptive Lanczos
  propagator (authored here, no scipy expm on this path);
* the classical-pump ladder engine, which works directly on the correlated
  subspace spanned by |nn> or |nnn> and returns its coefficient vector;
* the quantized-pump sector engine, which block-diagonalizes the interaction
  over conserved sectors and returns an amplitude table indexed by converted
  triplets and initial pump occupation.

The interaction converts one pump photon into one photon per signal mode
(three signal modes by default, two for the pairwise reference process), with
rate kappa. The dimensionless interaction strength is xi = kappa * t * alpha_p,
so times are always derived from xi via xi_to_time().
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.special

from .errors import ConfigError, NumericalError, TruncationError
from .fock import (DensityOperator, ModeLayout, SparseOperator, StateVector,
                   build_ladder)

TRIPLET_LABELS = ("A", "B", "C")
PAIR_LABELS = ("A", "B")
PUMP_LABEL = "P"


@dataclass(frozen=True)
class HamiltonianSpec:
    """Which interaction to build and how the pump is treated.

    interaction: "tpg" (three signal modes) or "sodc" (two, the pairwise
    down-conversion reference). pump: "quantized" keeps the pump as a mode P
    prepared in a coherent state; "classical" replaces it by the fixed
    amplitude pump_amplitude.
    """

    interaction: str = "tpg"
    pump: str = "quantized"
    coupling: float = 1.0
    pump_amplitude: float = 4.0

    def __post_init__(self):
        if self.interaction not in ("tpg", "sodc"):
            raise ConfigError("interaction must be 'tpg' or 'sodc'")
        if self.pump not in ("quantized", "classical"):
            raise ConfigError("pump must be 'quantized' or 'classical'")
        if self.coupling <= 0 or self.pump_amplitude <= 0:
            raise ConfigError("coupling and pump_amplitude must be positive")

    @property
    def signal_labels(self):
        return TRIPLET_LABELS if self.interaction == "tpg" else PAIR_LABELS

    @property
    def mode_labels(self):
        if self.pump == "quantized":
            return self.signal_labels + (PUMP_LABEL,)
        return self.signal_labels


def xi_to_time(xi, spec):
    """Physical time giving interaction strength xi under `spec`."""
    return float(xi) / (spec.coupling * spec.pump_amplitude)


def build_hamiltonian(layout, spec):
    """Sparse Hermitian Hamiltonian for `spec` on `layout`.

    Quantized pump: H = i kappa (a+ b+ c+ p - a b c p+).
    Classical pump: H = i kappa alpha_p (a+ b+ c+ - a b c), with the pump
    amplitude chosen real so the relative phase sits in the quadratures.
    """
    for label in spec.mode_labels:
        layout.axis(label)  # raises on a missing mode
    down = None
    for label in spec.signal_labels:
        op = build_ladder(layout, label).data
        down = op if down is None else (down @ op)
    if spec.pump == "quantized":
        down = build_ladder(layout, PUMP_LABEL).data.conj().T @ down
        rate = spec.coupling
    else:
        rate = spec.coupling * spec.pump_amplitude
    h = 1j * rate * (down.conj().T - down)
    return SparseOperator(layout, h.tocsr())


@dataclass
class EvolutionResult:
    state: StateVector
    method: str
    steps: int
    norm_drift: float
    diagnostics: dict = field(default_factory=dict)


def _lanczos_substep(matvec, v, dt, dim_max):
    """One Krylov approximation of exp(-i dt H) v.

    Returns (w, err) where err is the standard residual estimate
    beta_m * |last eigen-coefficient| * |dt|; a happy breakdown makes the
    result exact within the built subspace.
    """
    nrm = np.linalg.norm(v)
    V = np.empty((dim_max, v.size), dtype=np.complex128)
    alphas = np.empty(dim_max)
    betas = np.empty(dim_max)
    V[0] = v / nrm
    prev = None
    k = 0
    breakdown = False
    for k in range(dim_max):
        w = matvec(V[k])
        if prev is not None:
            w = w - betas[k - 1] * prev
        a = np.vdot(V[k], w).real
        alphas[k] = a
        w = w - a * V[k]
        # one reorthogonalization pass keeps the basis clean
        w = w - V[:k + 1].conj() @ w @ V[:k + 1]
        b = np.linalg.norm(w)
        betas[k] = b
        if b < 1e-13 * max(1.0, abs(a)):
            breakdown = True
            k += 1
            break
        if k + 1 < dim_max:
            prev = V[k]
            V[k + 1] = w / b
    else:
        k = dim_max
    evals, evecs = scipy.linalg.eigh_tridiagonal(alphas[:k], betas[:k - 1])
    phase = np.exp(-1j * dt * evals)
    y = evecs @ (phase * evecs[0, :])
    out = (y * nrm) @ V[:k]
    err = 0.0 if breakdown else abs(betas[k - 1] * y[-1] * dt)
    return out, err


def _evolve_krylov(h_matrix, amplitudes, t, dim_max, tol):
    matvec = h_matrix.dot
    remaining = float(t)
    dt = remaining
    psi = amplitudes.astype(np.complex128)
    steps = 0
    while remaining > 0.0:
        dt = min(dt, remaining)
        out, err = _lanczos_substep(matvec, psi, dt, dim_max)
        budget = tol * (dt / t) if t else tol
        if err > budget:
            if dt <= 1e-12 * abs(t):
                raise NumericalError(
                    "Krylov step size collapsed; the tolerance sits below "
                    "the roundoff floor of the residual estimate")
            dt /= 2.0
            continue
        psi = out
        remaining -= dt
        steps += 1
        if err < 0.1 * budget:
            dt *= 1.5
        if steps > 100000:
            raise NumericalError("Krylov propagator failed to converge")
    return psi, steps


def evolve(state, hamiltonian, t, method="auto", krylov_dim=40, tol=1e-11):
    """Propagate `state` by exp(-i H t).

    method "dense" diagonalizes the full matrix (reference route, only viable
    at small dims); "krylov" runs the adaptive Lanczos propagator; "auto"
    picks dense below 600 dimensions. The two routes are cross-checked in the
    acceptance suite and must not be merged.
    """
    if state.layout != hamiltonian.layout:
        raise ConfigError("state and Hamiltonian layouts differ")
    dim = state.layout.dim
    if method == "auto":
        method = "dense" if dim <= 600 else "krylov"
    if method == "dense":
        h = hamiltonian.data.toarray()
        evals, evecs = scipy.linalg.eigh(h)
        amps = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ state.amplitudes))
        steps = 1
    elif method == "krylov":
        amps, steps = _evolve_krylov(hamiltonian.data, state.amplitudes, t,
                                     krylov_dim, tol)
    else:
        raise ConfigError("method must be 'auto', 'dense' or 'krylov'")
    out = StateVector(state.layout, amps)
    drift = abs(out.norm() - state.norm())
    return EvolutionResult(out, method, steps, drift)


# ---------------------------------------------------------------------------
# classical-pump ladder engine

def classical_ladder_generator(cutoff, kind="tpg"):
    """Antisymmetric generator K of the correlated-subspace flow.

    On the span of |nnn> (kind "tpg") the interaction acts as a nearest
    neighbor ladder with K[n+1, n] = (n+1)^(3/2); on |nn> (kind "sodc") the
    rate is (n+1). The coefficient vector is exp(xi K) e0.
    """
    if kind not in ("tpg", "sodc"):
        raise ConfigError("kind must be 'tpg' or 'sodc'")
    power = 1.5 if kind == "tpg" else 1.0
    n = np.arange(cutoff - 1, dtype=np.float64)
    K = np.zeros((cutoff, cutoff))
    rates = (n + 1.0) ** power
    K[np.arange(1, cutoff), np.arange(cutoff - 1)] = rates
    K -= K.T
    return K


def classical_coefficients(xi, cutoff, kind="tpg"):
    """Coefficients c_n of the classical-pump correlated state at strength xi.

    Computed with the authored Krylov propagator on the Hermitian form iK so
    the dense matrix exponential stays an independent oracle. Orthogonality of
    exp(xi K) keeps the vector exactly normalized even under truncation; what
    truncation distorts is the tail shape, which the audits watch instead.
    """
    K = classical_ladder_generator(cutoff, kind)
    H = 1j * K  # Hermitian
    e0 = np.zeros(cutoff, dtype=np.complex128)
    e0[0] = 1.0
    if xi == 0:
        return e0.real.copy()
    # the residual estimate bottoms out at roundoff ~ eps * |K| * dt, so the
    # tolerance must sit above that floor or the step size collapses
    norm_k = 2.0 * float(cutoff - 1) ** (1.5 if kind == "tpg" else 1.0)
    tol = max(1e-13, 30 * np.finfo(float).eps * norm_k * abs(xi))
    amps, _ = _evolve_krylov(sp.csr_matrix(H), e0, float(xi),
                             dim_max=min(40, cutoff), tol=tol)
    if np.abs(amps.imag).max() > 1e-10:
        raise NumericalError("classical coefficients grew an imaginary part")
    return amps.real.copy()


def correlated_pure_state(coefficients, kind="tpg", cutoffs=None):
    """Embed a coefficient vector on the diagonal |nn..n> of a product space."""
    labels = TRIPLET_LABELS if kind == "tpg" else PAIR_LABELS
    c = np.asarray(coefficients)
    d = c.size
    if cutoffs is None:
        cutoffs = (d,) * len(labels)
    layout = ModeLayout(labels, cutoffs)
    amps = np.zeros(layout.dim, dtype=np.complex128)
    for n in range(min(d, min(cutoffs))):
        amps[layout.index((n,) * len(labels))] = c[n]
    return StateVector(layout, amps)


# ---------------------------------------------------------------------------
# quantized-pump sector engine

@dataclass
class SectorTable:
    """Amplitude table of the quantized-pump state.

    amplitudes[n, m] is the amplitude of n converted multiples starting from
    pump occupation m, weighted by the coherent-state amplitude of |m>; the
    physical state is sum_{n,m} amplitudes[n, m] |n..n, m-n>. Everything is
    real because the coherent amplitude is taken real and the sector
    generators are real antisymmetric.
    """

    amplitudes: np.ndarray
    xi: float
    spec: HamiltonianSpec

    @property
    def triplet_cutoff(self):
        return self.amplitudes.shape[0]

    @property
    def pump_cutoff(self):
        return self.amplitudes.shape[1]


def _log_poisson_amplitude(ms, nbar):
    # log of the coherent-state amplitude sqrt(e^-nbar nbar^m / m!)
    ms = np.asarray(ms, dtype=np.float64)
    return 0.5 * (ms * np.log(nbar) - nbar - scipy.special.gammaln(ms + 1.0))


def pump_sector_amplitudes(xi, spec, triplet_cutoff, pump_cutoff):
    """Evolve every conserved sector of the quantized-pump interaction.

    The interaction preserves m = n_converted + n_pump, so starting from the
    vacuum signal modes and pump occupation m the dynamics stays on the finite
    ladder |n..n, m-n>, n = 0..m, with generator rates
    rate(n) * sqrt(m - n), rate as in the classical ladder. Each sector is a
    small dense exponential; the Poisson amplitude of the initial coherent
    pump weights the sectors coherently.
    """
    if spec.pump != "quantized":
        raise ConfigError("sector engine needs a quantized-pump spec")
    power = 1.5 if spec.interaction == "tpg" else 1.0
    t = xi_to_time(xi, spec)
    nbar = spec.pump_amplitude ** 2
    log_amp = _log_poisson_amplitude(np.arange(pump_cutoff), nbar)
    A = np.zeros((triplet_cutoff, pump_cutoff))
    for m in range(pump_cutoff):
        size = min(m, triplet_cutoff - 1) + 1
        w = math.exp(log_amp[m])
        if size == 1:
            A[0, m] = w
            continue
        n = np.arange(size - 1, dtype=np.float64)
        rates = spec.coupling * (n + 1.0) ** power * np.sqrt(m - n)
        K = np.zeros((size, size))
        K[np.arange(1, size), np.arange(size - 1)] = rates
        K -= K.T
        col = scipy.linalg.expm(t * K)[:, 0]
        A[:size, m] = w * col
    return SectorTable(A, float(xi), spec)


def pump_traced_matrix(table):
    """Signal-sector matrix R after tracing the pump.

    The reduced state of the signal modes is sum_{n,n'} R[n, n'] |n..n><n'..n'|
    with R = sum_k phi_k phi_k^T, phi_k[n] = amplitudes[n, n + k]; k counts the
    pump photons left behind, which is what the trace sums over.
    """
    A = table.amplitudes
    n_max, m_max = A.shape
    R = np.zeros((n_max, n_max))
    for k in range(m_max):
        width = min(n_max, m_max - k)
        phi = A[np.arange(width), np.arange(width) + k]
        R[:width, :width] += np.outer(phi, phi)
    return R


def sector_audit(table):
    """Truncation mass estimates for a sector table.

    'triplet' is the probability in the top two retained conversion levels;
    'pump' is the probability in the top two retained sectors plus the exact
    Poisson mass beyond the cutoff.
    """
    A = table.amplitudes
    triplet = float(np.sum(A[-2:, :] ** 2)) if A.shape[0] >= 2 else float(np.sum(A ** 2))
    pump_cols = float(np.sum(A[:, -2:] ** 2))
    nbar = table.spec.pump_amplitude ** 2
    beyond = float(scipy.special.gammainc(table.pump_cutoff, nbar))
    return {"triplet": triplet, "pump": pump_cols + beyond}


# ---------------------------------------------------------------------------
# open-system cross-validation

@dataclass
class TrajectoryResult:
    density: DensityOperator
    jump_counts: np.ndarray
    ntraj: int


def trajectory_solver(state, hamiltonian, jump_operators, t, ntraj=200,
                      substeps=400, seed=0):
    """Monte Carlo wavefunction unraveling of Lindblad dynamics.

    Propagates each trajectory under the non-Hermitian effective Hamiltonian
    with a fixed-step dense propagator, applying a jump whenever the decaying
    norm crosses the drawn threshold. Trajectory k uses
    np.random.default_rng([seed, k]), so results are reproducible and each
    trajectory is independent of the others.
    """
    layout = state.layout
    dim = layout.dim
    if dim > 4096:
        raise ConfigError("trajectory solver is a dense cross-check, dim %d "
                          "is too large" % dim)
    h_eff = hamiltonian.data.toarray().astype(np.complex128)
    ls = [op.data.toarray() for op in jump_operators]
    for L in ls:
        h_eff = h_eff - 0.5j * (L.conj().T @ L)
    dt = float(t) / substeps
    U = scipy.linalg.expm(-1j * dt * h_eff)
    rho = np.zeros((dim, dim), dtype=np.complex128)
    jump_counts = np.zeros(ntraj, dtype=np.int64)
    for k in range(ntraj):
        rng = np.random.default_rng([seed, k])
        psi = state.amplitudes.copy()
        threshold = rng.random()
        for _ in range(substeps):
            psi = U @ psi
            n2 = np.vdot(psi, psi).real
            if ls and n2 <= threshold:
                weights = np.array([np.linalg.norm(L @ psi) ** 2 for L in ls])
                total = weights.sum()
                if total <= 0:
                    raise NumericalError("jump triggered with no open channel")
                ch = rng.choice(len(ls), p=weights / total)
                psi = ls[ch] @ psi
                psi = psi / np.linalg.norm(psi)
                threshold = rng.random()
                jump_counts[k] += 1
        n2 = np.vdot(psi, psi).real
        rho += np.outer(psi, psi.conj()) / n2
    rho /= ntraj
    return TrajectoryResult(DensityOperator(layout, rho, validate=False),
                            jump_counts, ntraj)


# ---------------------------------------------------------------------------

def cutoff_audit(state, threshold=None, levels=2):
    """Per-mode probability mass in the top `levels` retained Fock levels.

    With `threshold` set, any mode exceeding it raises TruncationError with a
    suggested half-again-larger cutoff.
    """
    layout = state.layout
    if isinstance(state, StateVector):
        probs = np.abs(state.tensor()) ** 2
        def mode_marginal(ax):
            axes = tuple(i for i in range(layout.nmodes) if i != ax)
            return probs.sum(axis=axes)
    else:
        tens = state.tensor()
        def mode_marginal(ax):
            t = tens
            nm = layout.nmodes
            for a in sorted((i for i in range(layout.nmodes) if i != ax),
                            reverse=True):
                t = np.trace(t, axis1=a, axis2=a + nm)
                nm -= 1
            return np.real(np.diag(t))
    out = {}
    for ax, label in enumerate(layout.labels):
        marg = mode_marginal(ax)
        take = min(levels, marg.size)
        out[label] = float(marg[-take:].sum())
    if threshold is not None:
        for label, mass in out.items():
            if mass > threshold:
                c = layout.cutoff(label)
                raise TruncationError(
                    "mode %s holds %.3e probability in its top %d levels"
                    % (label, mass, levels),
                    mode=label, suggested_cutoff=int(math.ceil(c * 1.5)))
    return out
