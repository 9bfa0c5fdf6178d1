"""Jitted grid kernels. Same contracts as the numpy versions; the point loop
is parallel and each point runs its recurrence independently, so results are
bit-stable across thread counts."""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def hermite_table(xs, nmax):
    npts = xs.size
    out = np.zeros((npts, nmax))
    for i in prange(npts):
        x = xs[i]
        p0 = np.pi ** -0.25 * np.exp(-x * x / 2.0)
        out[i, 0] = p0
        if nmax > 1:
            p1 = np.sqrt(2.0) * x * p0
            out[i, 1] = p1
            for n in range(1, nmax - 1):
                p2 = np.sqrt(2.0 / (n + 1)) * x * p1 - np.sqrt(n / (n + 1.0)) * p0
                out[i, n + 1] = p2
                p0, p1 = p1, p2
    return out


@njit(cache=True, parallel=True)
def laguerre_wigner_table(r2, d):
    npts = r2.size
    out = np.zeros((npts, d))
    for i in prange(npts):
        y = 2.0 * r2[i]
        env = np.exp(-r2[i]) / np.pi
        L_prev = 1.0
        out[i, 0] = env
        if d > 1:
            L = 1.0 - y
            sign = -1.0
            out[i, 1] = sign * env * L
            for n in range(1, d - 1):
                L_next = ((2 * n + 1 - y) * L - n * L_prev) / (n + 1.0)
                L_prev, L = L, L_next
                sign = -sign
                out[i, n + 1] = sign * env * L
    return out


@njit(cache=True, parallel=True)
def displaced_parity_stack(alphas, d):
    npts = alphas.size
    out = np.zeros((npts, d, d), dtype=np.complex128)
    lnfact = np.zeros(d)
    for k in range(1, d):
        lnfact[k] = lnfact[k - 1] + np.log(k)
    for i in prange(npts):
        b = 2.0 * alphas[i]
        D = out[i]
        r = np.abs(b)
        if r == 0.0:
            for m in range(d):
                D[m, m] = 1.0
        else:
            y = r * r
            phase = b / r
            lnr = np.log(r)
            # each diagonal m = n + a advances in n; the true element grows
            # along the diagonal, so upward recurrence stays stable
            prev = np.empty(d, dtype=np.complex128)
            cur = np.empty(d, dtype=np.complex128)
            ph = 1.0 + 0.0j
            for a in range(d):
                prev[a] = np.exp(-0.5 * y + a * lnr - 0.5 * lnfact[a]) * ph
                cur[a] = ((1.0 + a - y) / np.sqrt(1.0 + a)) * prev[a]
                ph *= phase
            for a in range(d):
                D[a, 0] = prev[a]
            for n in range(1, d):
                for a in range(d - n):
                    D[a + n, n] = cur[a]
                if n + 1 < d:
                    for a in range(d):
                        nxt = ((2 * n + 1 + a - y) * cur[a]
                               - np.sqrt(n * (n + a)) * prev[a]) \
                            / np.sqrt((n + 1.0) * (n + 1 + a))
                        prev[a] = cur[a]
                        cur[a] = nxt
            base = -np.conj(phase) / phase
            for m in range(d):
                f = 1.0 + 0.0j
                for n in range(m + 1, d):
                    f *= base
                    D[m, n] = f * D[n, m]
        for n in range(1, d, 2):
            for m in range(d):
                D[m, n] = -D[m, n]
    return out
