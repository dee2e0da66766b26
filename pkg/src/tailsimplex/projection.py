"""Euclidean projection onto the positive sphere {w >= 0 : sum(w) = z}.

The projected vector is the unique minimizer of 0.5*|w - v|_2^2 under the
constraints, and has the closed form w = max(v - lam, 0) for the unique
threshold lam with sum(max(v - lam, 0)) = z.  Two interchangeable algorithms
are provided: a sort-based one and a randomized pivot one with expected O(d)
work per vector.

Conventions
-----------
* Coordinates are clamped to exact zero, so supports can be read off with
  ``w > 0`` and no epsilon.
* Directions (supports) are tuples of sorted 1-based coordinate indices.
* ``z > sum(v)`` is allowed; the threshold is then negative and every
  coordinate of the output is positive.
"""

from dataclasses import dataclass

import numpy as np

from tailsimplex import _kernels

Direction = tuple[int, ...]


@dataclass(frozen=True)
class SimplexPoint:
    """A nonnegative vector with prescribed coordinate sum ``scale``."""

    values: np.ndarray
    scale: float


@dataclass(frozen=True)
class ProjectionDiagnostics:
    """Threshold ``lam`` and number ``rho`` of positive output coordinates."""

    lam: float
    rho: int


def _validate_rows(V, z):
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    if V.ndim != 2 or V.shape[1] < 1:
        raise ValueError("input must be a vector or a matrix of row vectors")
    if not (np.isscalar(z) or np.ndim(z) == 0) or not np.isfinite(z) or z <= 0:
        raise ValueError(f"target sum z must be a finite positive scalar, got {z!r}")
    if not np.isfinite(V).all():
        raise ValueError("input contains non-finite entries")
    if (V < 0).any():
        raise ValueError("input contains negative entries")
    if not (V > 0).any(axis=1).all():
        raise ValueError("degenerate all-zero input: projection undefined")
    return np.ascontiguousarray(V)


def project_rows(V, z=1.0, method="sorted", rng=None):
    """Project each row of ``V`` onto the positive sphere of scale ``z``.

    Parameters
    ----------
    V : array_like, shape (n, d) or (d,)
        Nonnegative finite rows, each with at least one positive entry.
    z : float
        Target coordinate sum, > 0.
    method : {"sorted", "median"}
        Sort-based or randomized pivot algorithm.  Both compute the same
        (unique) minimizer.
    rng : numpy.random.Generator, optional
        Source of pivot seeds for ``method="median"``; defaults to a fixed
        seed so the call is reproducible.

    Returns
    -------
    (W, lam, rho) : projected rows, per-row thresholds, per-row positive counts.
    """
    V = _validate_rows(V, z)
    z = float(z)
    if method == "sorted":
        mu = np.sort(V, axis=1)
        lam, rho = _kernels.lambda_from_sorted(mu, z)
        W = np.maximum(V - lam[:, None], 0.0)
    elif method == "median":
        if rng is None:
            rng = np.random.default_rng(0)
        seeds = rng.integers(
            0, np.iinfo(np.uint64).max, size=V.shape[0], dtype=np.uint64, endpoint=True
        )
        W, lam, rho = _kernels.project_rows_median(V, z, seeds)
    else:
        raise ValueError(f"unknown method {method!r}")
    return W, lam, rho


def project_sorted(v, z=1.0):
    """Sort-based projection of a single vector.

    Returns a (SimplexPoint, ProjectionDiagnostics) pair.
    """
    W, lam, rho = project_rows(v, z, method="sorted")
    return SimplexPoint(W[0], float(z)), ProjectionDiagnostics(float(lam[0]), int(rho[0]))


def project_median(v, z=1.0, rng=None):
    """Randomized pivot projection of a single vector.

    The pivot stream is drawn from ``rng``; the output does not depend on it
    (the minimizer is unique), only the work per call does.
    """
    W, lam, rho = project_rows(v, z, method="median", rng=rng)
    return SimplexPoint(W[0], float(z)), ProjectionDiagnostics(float(lam[0]), int(rho[0]))


def support(w):
    """1-based indices of the strictly positive coordinates.

    Accepts a SimplexPoint or a plain array.  Comparison is exact: projected
    vectors carry exact zeros outside their support.
    """
    values = w.values if isinstance(w, SimplexPoint) else np.asarray(w)
    return tuple(int(i) + 1 for i in np.flatnonzero(values > 0))


def supports_of_rows(W):
    """Row supports of a matrix, as a list of 1-based index tuples."""
    W = np.atleast_2d(W)
    return [tuple(int(i) + 1 for i in np.flatnonzero(row > 0)) for row in W]


def rescaled_project(x, t):
    """Projection of x/t onto the unit simplex (the rescaled-exceedance angle)."""
    if not np.isfinite(t) or t <= 0:
        raise ValueError(f"rescaling threshold t must be positive, got {t!r}")
    x = np.asarray(x, dtype=np.float64)
    point, _ = project_sorted(x / t, 1.0)
    return point


# ---------------------------------------------------------------------------
# Closed-form characterizations of the projection's support.  These are
# independent of the algorithms above and are used for cross-checks and for
# verifying assignment consistency in the detection step.
# ---------------------------------------------------------------------------


def _beta_to_cols(beta, d):
    cols = np.asarray(sorted(set(int(b) for b in beta)), dtype=np.int64)
    if cols.size == 0:
        raise ValueError("direction must be nonempty")
    if cols[0] < 1 or cols[-1] > d:
        raise ValueError(f"direction {beta} out of range for dimension {d}")
    return cols - 1


def positive_mask(v, z=1.0):
    """Coordinate-wise positivity of the projection, without computing it.

    Coordinate j ends up positive iff
    v_j - (sum_{k: v_k >= v_j} v_k - z) / #{k : v_k >= v_j} > 0.
    """
    v = np.asarray(v, dtype=np.float64)
    ge = v[None, :] >= v[:, None]  # ge[j, k] = v_k >= v_j
    counts = ge.sum(axis=1)
    sums = ge @ v
    return v - (sums - z) / counts > 0


def zeroes_outside(v, beta, z=1.0):
    """True iff the projection of v vanishes on the complement of ``beta``.

    Equivalent condition: min over i outside beta of
    sum_{j in beta} (v_j - v_i)_+  >=  z.
    """
    v = np.asarray(v, dtype=np.float64)
    cols = _beta_to_cols(beta, v.size)
    comp = np.setdiff1d(np.arange(v.size), cols)
    if comp.size == 0:
        return True
    vb = v[cols]
    sums = np.clip(vb[None, :] - v[comp, None], 0.0, None).sum(axis=1)
    return bool(sums.min() >= z)


def face_membership(v, beta, z=1.0):
    """True iff the projection of v is positive exactly on ``beta``.

    Equivalent conditions, with plain sums v_{beta,i} = sum_{j in beta} (v_j - v_i):
    max over i in beta of v_{beta,i} < z, and min over i outside beta >= z.
    """
    v = np.asarray(v, dtype=np.float64)
    cols = _beta_to_cols(beta, v.size)
    comp = np.setdiff1d(np.arange(v.size), cols)
    vb = v[cols]
    inside = vb.sum() - cols.size * v[cols]
    if inside.max() >= z:
        return False
    if comp.size == 0:
        return True
    outside = vb.sum() - cols.size * v[comp]
    return bool(outside.min() >= z)
