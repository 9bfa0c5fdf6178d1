"""Pure-numpy grid kernels: Hermite functions, Laguerre radial Wigner terms,
displaced-parity matrices.

These are the hot loops behind marginals, Wigner grids and homodyne
projections. Recurrences run along the order axis with full vectorization over
grid points, which keeps them honest reference implementations for the jitted
variants.
"""

import numpy as np


def hermite_table(xs, nmax):
    """Table psi_n(x) of orthonormal Hermite functions, shape (len(xs), nmax).

    psi_0 = pi^(-1/4) exp(-x^2/2),
    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}.
    """
    xs = np.asarray(xs, dtype=np.float64)
    out = np.zeros((xs.size, nmax))
    out[:, 0] = np.pi ** -0.25 * np.exp(-xs * xs / 2.0)
    if nmax > 1:
        out[:, 1] = np.sqrt(2.0) * xs * out[:, 0]
    for n in range(1, nmax - 1):
        out[:, n + 1] = (np.sqrt(2.0 / (n + 1)) * xs * out[:, n]
                         - np.sqrt(n / (n + 1.0)) * out[:, n - 1])
    return out


def laguerre_wigner_table(r2, d):
    """Diagonal Wigner terms w_n at squared radius r2 = x^2 + p^2, shape (len(r2), d).

    w_n = (1/pi) (-1)^n exp(-r2) L_n(2 r2); the Wigner function of a state with
    diagonal Fock matrix p_n is sum_n p_n w_n. Laguerre values stay below
    exp(r2/...) so the product never overflows for desk-scale grids.
    """
    r2 = np.asarray(r2, dtype=np.float64)
    y = 2.0 * r2
    env = np.exp(-r2) / np.pi
    out = np.zeros((r2.size, d))
    L_prev = np.ones_like(y)
    out[:, 0] = env
    if d > 1:
        L = 1.0 - y
        out[:, 1] = -env * L
        for n in range(1, d - 1):
            L_next = ((2 * n + 1 - y) * L - n * L_prev) / (n + 1.0)
            L_prev, L = L, L_next
            out[:, n + 1] = env * L * (-1.0) ** (n + 1)
    return out


def displaced_parity_stack(alphas, d):
    """Displaced-parity kernel matrices K(alpha), shape (len(alphas), d, d).

    K[m, n] = <m|D(2 alpha)|n> (-1)^n, so that the Wigner function at the phase
    space point alpha = (x + i p)/sqrt(2) is (1/pi) Re Tr[rho K] for a
    single-mode density matrix rho.

    Each diagonal m = n + a is advanced in n by the symmetric three-term
    recurrence of the scaled matrix element itself,

        D_{n+1} = [(2n+1+a-y) D_n - sqrt(n(n+a)) D_{n-1}] / sqrt((n+1)(n+1+a)),

    with y = |beta|^2 and a log-domain start, then the strict upper triangle
    follows from <m|D|n> = (-conj(beta)/beta)^(n-m) <n|D|m>. The bounded true
    solution grows along each diagonal out of the forbidden region, so upward
    recurrence is stable and entries respect |D| <= 1 at any cutoff. Schemes
    that advance whole rows or columns instead amplify roundoff through the
    corner regions and break down near d = 50 for |beta| of a few.
    """
    alphas = np.asarray(alphas, dtype=np.complex128)
    beta = 2.0 * alphas
    npts = alphas.size
    out = np.zeros((npts, d, d), dtype=np.complex128)
    zero = beta == 0.0
    r = np.where(zero, 1.0, np.abs(beta))
    y = (r * r)[:, None]
    phase = (np.where(zero, 1.0, beta) / r)[:, None]
    a = np.arange(d, dtype=np.float64)
    lnfact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, d)))))
    rows = np.arange(d)
    prev = np.exp(-0.5 * y + np.log(r)[:, None] * a - 0.5 * lnfact) * phase ** a
    cur = ((1.0 + a - y) / np.sqrt(1.0 + a)) * prev
    out[:, rows, 0] = prev
    for n in range(1, d):
        amax = d - n
        out[:, rows[:amax] + n, n] = cur[:, :amax]
        if n + 1 < d:
            nxt = ((2 * n + 1 + a - y) * cur - np.sqrt(n * (n + a)) * prev) \
                / np.sqrt((n + 1) * (n + 1 + a))
            prev, cur = cur, nxt
    iu_m, iu_n = np.triu_indices(d, 1)
    base = -np.conj(phase[:, 0]) / phase[:, 0]
    out[:, iu_m, iu_n] = base[:, None] ** (iu_n - iu_m) * out[:, iu_n, iu_m]
    if np.any(zero):
        out[zero] = np.eye(d)
    out[:, :, 1::2] *= -1.0
    return out
