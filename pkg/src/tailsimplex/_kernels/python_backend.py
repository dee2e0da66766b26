"""Pure-numpy fallback for the compiled projection kernels.

Same API and same pivot stream (splitmix64) as the Cython extension, so the
two backends are interchangeable and bit-comparable.
"""

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    x = state
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, (x ^ (x >> 31))


def lambda_from_sorted(mu_asc, z):
    """Vectorized threshold scan over ascending-sorted rows.

    Returns (lam, rho); see the compiled kernel for the contract.
    """
    mu_asc = np.ascontiguousarray(mu_asc, dtype=np.float64)
    n, d = mu_asc.shape
    mu = mu_asc[:, ::-1]
    css = np.cumsum(mu, axis=1)
    ranks = np.arange(1, d + 1, dtype=np.float64)
    cond = mu * ranks > css - z
    # last True per row; cond[:, 0] is always True for z > 0
    rho0 = d - 1 - np.argmax(cond[:, ::-1], axis=1)
    lam = (css[np.arange(n), rho0] - z) / (rho0 + 1)
    return lam, (rho0 + 1).astype(np.int64)


def _project_one_median(v, z, seed):
    u = v
    s = 0.0
    rho = 0
    state = int(seed)
    while u.size:
        state, draw = _splitmix64(state)
        pivot = u[draw % u.size]
        ge = u >= pivot
        grabbed = u[ge]
        ds = float(grabbed.sum())
        dr = grabbed.size
        if (s + ds) - (rho + dr) * pivot < z:
            s += ds
            rho += dr
            u = u[~ge]
        else:
            q = int(np.flatnonzero(grabbed == pivot)[0])
            u = np.delete(grabbed, q)
    return (s - z) / rho, rho


def project_rows_median(V, z, seeds):
    """Row-wise randomized pivot projection; mirrors the compiled kernel."""
    V = np.ascontiguousarray(V, dtype=np.float64)
    n, d = V.shape
    lam = np.empty(n, dtype=np.float64)
    rho = np.empty(n, dtype=np.int64)
    for i in range(n):
        lam[i], rho[i] = _project_one_median(V[i], z, seeds[i])
    W = np.maximum(V - lam[:, None], 0.0)
    return W, lam, rho
