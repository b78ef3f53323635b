"""Hot inner loops: chain stepping and Gaussian-chaos sampling.

Each kernel has a pure-numpy implementation (the reference) and a numba
``@njit`` twin compiled from the same arithmetic. ``_backend.USE_NUMBA``
selects which one the public dispatchers call; both consume identical,
pre-drawn noise arrays so the two paths follow the same random numbers.

Noise layout for stepping kernels: ``noise[t, r, i, j]`` is stochastic
integral ``j`` (0 -> velocity kick, 1 -> position kick, 2 -> half-step
position kick) at step ``t``, replica ``r``, coordinate ``i``. States
``x``, ``v`` have shape ``(R, d)`` and are updated in place.
"""

import numpy as np

from ._backend import USE_NUMBA

# ---------------------------------------------------------------------------
# numpy reference implementations


def _steps_diag_np(x, v, noise, lam, h, c, eh, eh2, fh, fh2, s):
    hc1 = h * eh2 * c
    hc2 = h * fh2 * c
    for t in range(noise.shape[0]):
        n = noise[t]
        y = x + fh2 * v + s * n[..., 2]
        g = lam * y
        x += fh * v - hc2 * g + s * n[..., 1]
        v *= eh
        v += s * n[..., 0] - hc1 * g


def _steps_product_np(x, v, noise, a, b, h, c, eh, eh2, fh, fh2, s):
    ab = a * b
    hc1 = h * eh2 * c
    hc2 = h * fh2 * c
    for t in range(noise.shape[0]):
        n = noise[t]
        y = x + fh2 * v + s * n[..., 2]
        g = y + ab * np.tanh(b * y)
        x += fh * v - hc2 * g + s * n[..., 1]
        v *= eh
        v += s * n[..., 0] - hc1 * g


def _chaos_g_np(values, z):
    d = values.shape[0]
    contracted = (z @ values.reshape(d, d * d)).reshape(z.shape[0], d, d)
    quad = np.einsum("njk,nj->nk", contracted, z)
    return np.einsum("nk,nk->n", quad, quad)


# ---------------------------------------------------------------------------
# numba twins

if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _steps_diag_nb(x, v, noise, lam, h, c, eh, eh2, fh, fh2, s):
        nsteps, nrep, dim = noise.shape[0], noise.shape[1], noise.shape[2]
        hc1 = h * eh2 * c
        hc2 = h * fh2 * c
        for t in range(nsteps):
            for r in range(nrep):
                for i in range(dim):
                    y = x[r, i] + fh2 * v[r, i] + s * noise[t, r, i, 2]
                    g = lam[i] * y
                    xn = x[r, i] + fh * v[r, i] - hc2 * g + s * noise[t, r, i, 1]
                    v[r, i] = eh * v[r, i] - hc1 * g + s * noise[t, r, i, 0]
                    x[r, i] = xn

    @njit(cache=True)
    def _steps_product_nb(x, v, noise, a, b, h, c, eh, eh2, fh, fh2, s):
        nsteps, nrep, dim = noise.shape[0], noise.shape[1], noise.shape[2]
        ab = a * b
        hc1 = h * eh2 * c
        hc2 = h * fh2 * c
        for t in range(nsteps):
            for r in range(nrep):
                for i in range(dim):
                    y = x[r, i] + fh2 * v[r, i] + s * noise[t, r, i, 2]
                    g = y + ab * np.tanh(b * y)
                    xn = x[r, i] + fh * v[r, i] - hc2 * g + s * noise[t, r, i, 1]
                    v[r, i] = eh * v[r, i] - hc1 * g + s * noise[t, r, i, 0]
                    x[r, i] = xn

    @njit(cache=True)
    def _chaos_g_nb(values, z):
        n, d = z.shape
        out = np.empty(n)
        for m in range(n):
            acc = 0.0
            for k in range(d):
                q = 0.0
                for i in range(d):
                    zi = z[m, i]
                    for j in range(d):
                        q += values[i, j, k] * zi * z[m, j]
                acc += q * q
            out[m] = acc
        return out


# ---------------------------------------------------------------------------
# dispatchers


def steps_diag(x, v, noise, lam, h, c, eh, eh2, fh, fh2, s):
    if USE_NUMBA:
        _steps_diag_nb(x, v, noise, lam, h, c, eh, eh2, fh, fh2, s)
    else:
        _steps_diag_np(x, v, noise, lam, h, c, eh, eh2, fh, fh2, s)


def steps_product(x, v, noise, a, b, h, c, eh, eh2, fh, fh2, s):
    if USE_NUMBA:
        _steps_product_nb(x, v, noise, a, b, h, c, eh, eh2, fh, fh2, s)
    else:
        _steps_product_np(x, v, noise, a, b, h, c, eh, eh2, fh, fh2, s)


def chaos_g(values, z):
    if USE_NUMBA:
        return _chaos_g_nb(values, z)
    return _chaos_g_np(values, z)
