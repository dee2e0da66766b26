"""Seeded generators for the simulation designs, plus marginal transforms.

Three designs are provided:

* ``asymptotic_independence_model`` -- correlated Gaussians with rank-
  transformed (unit-Pareto) margins; the tail mass sits on the d axes.
* ``dependent_model`` -- 10 two-dimensional and 10 three-dimensional
  comonotone Pareto blocks in dimension 50.
* ``nonmaximal_model`` -- 20 three-dimensional proportional blocks in
  dimension 60 whose projected angle also charges sub-directions.

All generators are pure functions of an explicit numpy Generator; identical
seeds reproduce identical matrices.
"""

from dataclasses import dataclass

import numpy as np

from tailsimplex.angular import as_direction


@dataclass(frozen=True)
class GroundTruth:
    """The directions a detector is expected to recover."""

    directions: frozenset
    label: str

    def __len__(self):
        return len(self.directions)


def pareto(rng, alpha, size=None):
    """Pareto(alpha) draws with survival function x^-alpha on [1, inf)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    u = 1.0 - rng.random(size)  # uniform on (0, 1], keeps draws finite
    return u ** (-1.0 / alpha)


def random_correlation(d, rng):
    """Random correlation matrix from a normalized Gram construction.

    Draws a d x d matrix with iid U(-1, 1) entries, forms its Gram matrix and
    rescales to unit diagonal.  The result is symmetric positive semidefinite
    with off-diagonal entries strictly inside (-1, 1) almost surely.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    while True:
        raw = rng.uniform(-1.0, 1.0, size=(d, d))
        gram = raw.T @ raw
        diag = np.diag(gram)
        if (diag > 0).all():
            break
    scale = 1.0 / np.sqrt(diag)
    corr = gram * np.outer(scale, scale)
    np.fill_diagonal(corr, 1.0)
    return (corr + corr.T) / 2.0


def gaussian_sample(sigma, n, rng):
    """n rows from N(0, sigma) via Cholesky, with tiny diagonal jitter if needed."""
    sigma = np.asarray(sigma, dtype=np.float64)
    d = sigma.shape[0]
    for jitter in (0.0, 1e-12, 1e-10):
        try:
            chol = np.linalg.cholesky(sigma + jitter * np.eye(d))
            break
        except np.linalg.LinAlgError:
            continue
    else:
        raise ValueError("covariance factorization failed even with jitter")
    return rng.standard_normal((n, d)) @ chol.T


def rank_transform(M):
    """Columnwise empirical unit-Pareto standardization 1 / (1 - F_hat).

    F_hat is the strict-inequality empirical CDF, F_hat(x) = #{values < x}/n,
    so outputs lie in [1, n] and tied entries share a value.
    """
    M = np.asarray(M)
    n = M.shape[0]
    if n < 2:
        raise ValueError("need at least two rows")
    out = np.empty(M.shape, dtype=np.float64)
    for j in range(M.shape[1]):
        col = M[:, j]
        below = np.searchsorted(np.sort(col), col, side="left")
        out[:, j] = n / (n - below)
    return out


def power_transform(M, q):
    """Componentwise q-th power; maps tail index alpha to alpha/q."""
    M = np.asarray(M, dtype=np.float64)
    if q <= 0:
        raise ValueError("q must be positive")
    if (M < 0).any():
        raise ValueError("entries must be nonnegative")
    return M**q


def cumulative_pareto_block(k, alphas, rng, n=None):
    """Comonotone block (P1, P1 + P2, ..., P1 + Pk) with independent Paretos.

    P_j follows Pareto(alphas[j-1]); the first index must be the heaviest
    (alphas[0] < alphas[j] for j >= 2) so the block is regularly varying with
    tail index alphas[0] and angular vector (1/k, ..., 1/k).

    With ``n`` given, returns an (n, k) matrix of independent block draws.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.shape != (k,):
        raise ValueError(f"need {k} tail indices, got shape {alphas.shape}")
    if k > 1 and not (alphas[0] < alphas[1:]).all():
        raise ValueError("alphas[0] must be strictly smaller than the others")
    squeeze = n is None
    m = 1 if squeeze else int(n)
    p1 = pareto(rng, alphas[0], m)
    block = np.empty((m, k))
    block[:, 0] = p1
    for j in range(1, k):
        block[:, j] = p1 + pareto(rng, alphas[j], m)
    return block[0] if squeeze else block


def dependent_model(n, rng):
    """The d = 50 dependent design: 10 pair blocks then 10 triple blocks.

    Pair blocks use tail indices (1, 2), triple blocks (1, 2, 2).  Ground
    truth: the pairs {j, j+1} for j = 1, 3, ..., 19 and the triples
    {j, j+1, j+2} for j = 21, 24, ..., 48.
    """
    cols = [cumulative_pareto_block(2, (1.0, 2.0), rng, n=n) for _ in range(10)]
    cols += [cumulative_pareto_block(3, (1.0, 2.0, 2.0), rng, n=n) for _ in range(10)]
    X = np.hstack(cols)
    directions = {as_direction((j, j + 1)) for j in range(1, 20, 2)}
    directions |= {as_direction((j, j + 1, j + 2)) for j in range(21, 49, 3)}
    return X, GroundTruth(frozenset(directions), "dependent")


NONMAXIMAL_WEIGHTS = (7.0, 6.0, 4.0)


def nonmaximal_model(n, rng, n_blocks=20):
    """The d = 60 proportional design probing non-maximal directions.

    Each block is (a1*P, a2*P + Q2, a3*P + Q3) with a = (7, 6, 4)/17,
    P Pareto(1) and Q2, Q3 independent Pareto(2).  The spectral vector of a
    block is degenerate at a, so the triples {j, j+1, j+2} are the maximal
    directions; the projected angle additionally charges the pairs {j, j+1}
    and the singletons {j} (the descending-prefix chain of a).

    Returns (X, truth) where truth maps class labels "triples", "pairs",
    "singletons" to GroundTruth objects of ``n_blocks`` directions each.
    """
    a = np.asarray(NONMAXIMAL_WEIGHTS)
    a = a / a.sum()
    cols = []
    for _ in range(n_blocks):
        p = pareto(rng, 1.0, n)
        cols.append(np.column_stack([
            a[0] * p,
            a[1] * p + pareto(rng, 2.0, n),
            a[2] * p + pareto(rng, 2.0, n),
        ]))
    X = np.hstack(cols)
    starts = range(1, 3 * n_blocks, 3)
    truth = {
        "triples": GroundTruth(
            frozenset(as_direction((j, j + 1, j + 2)) for j in starts), "triples"
        ),
        "pairs": GroundTruth(
            frozenset(as_direction((j, j + 1)) for j in starts), "pairs"
        ),
        "singletons": GroundTruth(
            frozenset(as_direction((j,)) for j in starts), "singletons"
        ),
    }
    return X, truth


def asymptotic_independence_model(n, d, rng, sigma=None):
    """Rank-transformed correlated Gaussians; the truth is the d singletons.

    Returns (X, truth, raw) where ``raw`` is the untransformed Gaussian
    sample (the DAMEX baseline rank-transforms internally, and the rank
    transform is idempotent, so either matrix may be fed to it).
    """
    if sigma is None:
        sigma = random_correlation(d, rng)
    raw = gaussian_sample(sigma, n, rng)
    X = rank_transform(raw)
    truth = GroundTruth(frozenset((j,) for j in range(1, d + 1)), "axes")
    return X, truth, raw


def hill_tail_index(sample, k):
    """Hill estimator of the tail index from the top k order statistics."""
    x = np.sort(np.asarray(sample, dtype=np.float64))[::-1]
    if not 1 <= k < x.size:
        raise ValueError("need 1 <= k < len(sample)")
    logs = np.log(x[:k]) - np.log(x[k])
    return 1.0 / logs.mean()
