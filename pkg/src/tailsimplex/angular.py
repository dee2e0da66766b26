"""Angular models and Monte-Carlo oracles.

A spectral model provides draws of an angular vector Theta on the unit
simplex together with the tail index alpha of the radial part.  The induced
limit angle of rescaled exceedances is Z = proj(Y * Theta) with Y a
Pareto(alpha) variable independent of Theta; its distribution concentrates on
the faces C_beta = {x on the simplex : x_i > 0 exactly for i in beta}.

This module implements samplers for Z, expectation-formula estimators for
P(Z in C_beta), P(Z_{beta^c} = 0), P(Z_j = 1) and the joint tail function
G_beta, closed forms for the worked models, and the maximal-direction
extraction used to compare Z with Theta.
"""

import math
from dataclasses import dataclass

import numpy as np

from tailsimplex.projection import project_rows

_CHUNK = 1 << 18


def as_direction(indices):
    """Canonical direction: sorted tuple of unique 1-based indices."""
    beta = tuple(sorted(set(int(i) for i in indices)))
    if not beta:
        raise ValueError("direction must be nonempty")
    if beta[0] < 1:
        raise ValueError("coordinate indices are 1-based")
    return beta


@dataclass(frozen=True)
class MCEstimate:
    """A Monte-Carlo estimate with its standard error."""

    value: float
    std_error: float
    n_draws: int

    def agrees_with(self, other, n_se=3.0):
        """Two-estimator check: |difference| within n_se joint standard errors."""
        joint = math.hypot(self.std_error, getattr(other, "std_error", 0.0))
        value = other.value if isinstance(other, MCEstimate) else float(other)
        return abs(self.value - value) <= n_se * joint


@dataclass
class SpectralModel:
    """Sampler for the angular vector Theta, tagged with the tail index.

    ``theta_law`` and ``z_law``, when known in closed form, map directions to
    P(Theta in C_beta) and P(Z in C_beta).
    """

    d: int
    alpha: float
    label: str
    _sampler: callable
    theta_law: dict | None = None
    z_law: dict | None = None

    def sample_theta(self, n, rng):
        theta = self._sampler(int(n), rng)
        return np.asarray(theta, dtype=np.float64)


def _check_simplex_weights(weights, tol=1e-12):
    total = sum(weights.values())
    if any(w < 0 for w in weights.values()):
        raise ValueError("weights must be nonnegative")
    if abs(total - 1.0) > tol:
        raise ValueError(f"weights must sum to 1, got {total}")


def discrete_model(weights, d, alpha=1.0, label=None):
    """Discrete angular law on the points e(beta)/|beta|.

    ``weights`` maps directions to probabilities summing to 1.  This family
    is stable under positive scaling followed by projection, so Z has the
    same law as Theta.
    """
    weights = {as_direction(b): float(p) for b, p in weights.items()}
    _check_simplex_weights(weights)
    betas = sorted(weights)
    if betas and max(b[-1] for b in betas) > d:
        raise ValueError("direction index exceeds dimension")
    probs = np.array([weights[b] for b in betas])
    points = np.zeros((len(betas), d))
    for i, b in enumerate(betas):
        points[i, [j - 1 for j in b]] = 1.0 / len(b)

    def sampler(n, rng):
        picks = rng.choice(len(betas), size=n, p=probs)
        return points[picks]

    return SpectralModel(
        d=d,
        alpha=alpha,
        label=label or f"discrete(d={d})",
        _sampler=sampler,
        theta_law=dict(weights),
        z_law=dict(weights),
    )


def constant_model(a, alpha=1.0, label=None):
    """Degenerate angular law Theta = a almost surely, a on the simplex.

    When the entries of ``a`` are strictly positive and pairwise distinct,
    the law of Z is supported on the chain of descending-order prefixes of
    ``a`` and is provided in closed form:  with the entries sorted
    decreasingly as a_(1) > ... > a_(d) and s_r = a_(1) + ... + a_(r),

        P(Z in C_{prefix r}) = (s_r - r a_(r+1))^alpha - (s_r - r a_(r))^alpha

    for r < d, and 1 - (1 - d a_(d))^alpha for the full set.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or (a < 0).any() or abs(a.sum() - 1.0) > 1e-9:
        raise ValueError("a must be a nonnegative vector summing to 1")
    d = a.size
    z_law = None
    if (a > 0).all() and np.unique(a).size == d:
        order = np.argsort(-a)
        z_law = {}
        s = 0.0
        for r in range(1, d + 1):
            s += a[order[r - 1]]
            beta = as_direction(order[:r] + 1)
            if r < d:
                hi = (s - r * a[order[r]]) ** alpha
                lo = (s - r * a[order[r - 1]]) ** alpha
                z_law[beta] = hi - lo
            else:
                z_law[beta] = 1.0 - (1.0 - d * a[order[r - 1]]) ** alpha

    def sampler(n, rng):
        return np.broadcast_to(a, (n, d)).copy()

    return SpectralModel(
        d=d,
        alpha=alpha,
        label=label or "constant",
        _sampler=sampler,
        theta_law={as_direction(np.flatnonzero(a > 0) + 1): 1.0},
        z_law=z_law,
    )


def proportional_model(a=(7.0, 6.0, 4.0), alpha=1.0):
    """The worked degenerate model with a = (7, 6, 4)/17 by default."""
    a = np.asarray(a, dtype=np.float64)
    return constant_model(a / a.sum(), alpha=alpha, label="proportional")


def uniform_pair_model(alpha=1.0):
    """d = 2 with Theta_1 uniform on (0, 1).

    For alpha = 1 the first coordinate of Z has law
    delta_0/4 + delta_1/4 + U(0,1)/2, so the face probabilities are
    {1}: 1/4, {2}: 1/4, {1,2}: 1/2.
    """

    def sampler(n, rng):
        t1 = rng.random(n)
        return np.column_stack([t1, 1.0 - t1])

    z_law = {(1,): 0.25, (2,): 0.25, (1, 2): 0.5} if alpha == 1.0 else None
    return SpectralModel(
        d=2,
        alpha=alpha,
        label="uniform-pair",
        _sampler=sampler,
        theta_law={(1, 2): 1.0},
        z_law=z_law,
    )


# ---------------------------------------------------------------------------
# Sampling Z and direction frequencies
# ---------------------------------------------------------------------------


def pareto_radius(n, alpha, rng):
    """Pareto(alpha) draws with P(Y > y) = y^-alpha for y >= 1 (inverse transform)."""
    u = 1.0 - rng.random(n)  # uniform on (0, 1]
    return u ** (-1.0 / alpha)


def sample_z(model, n, rng):
    """Draws of Z = proj(Y * Theta) on the unit simplex, shape (n, d)."""
    theta = model.sample_theta(n, rng)
    y = pareto_radius(n, model.alpha, rng)
    W, _, _ = project_rows(theta * y[:, None], 1.0)
    return W


def direction_frequencies(Z):
    """Empirical face probabilities of simplex points, keyed by direction.

    Only directions actually hit are stored (supports are tallied through a
    packed bitmask, never by enumerating all 2^d - 1 candidates).
    """
    mask = np.asarray(Z) > 0
    d = mask.shape[1]
    n = len(mask)
    packed = np.packbits(mask, axis=1)
    uniq, counts = np.unique(packed, axis=0, return_counts=True)
    freq = {}
    for row, c in zip(uniq, counts):
        bits = np.unpackbits(row)[:d]
        freq[tuple(int(i) + 1 for i in np.flatnonzero(bits))] = c / n
    return dict(sorted(freq.items()))


def frequency_estimate(Z, beta):
    """Empirical P(support(Z) == beta) with its binomial standard error."""
    Z = np.asarray(Z)
    beta, cols, comp = _split_direction(beta, Z.shape[1])
    ok = (Z[:, cols] > 0).all(axis=1)
    if comp.size:
        ok &= (Z[:, comp] == 0.0).all(axis=1)
    n = len(Z)
    p = float(ok.sum()) / n
    return MCEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


# ---------------------------------------------------------------------------
# Expectation-formula estimators (integrands over Theta, not over Z)
# ---------------------------------------------------------------------------


def _mc_mean(model, seed, n, integrand):
    """Chunked MC average of ``integrand(theta_chunk)`` over Theta draws."""
    rng = np.random.default_rng([int(seed), 0xA17])
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        vals = integrand(model.sample_theta(m, rng))
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return MCEstimate(mean, math.sqrt(var / n), n)


def _split_direction(beta, d):
    beta = as_direction(beta)
    if beta[-1] > d:
        raise ValueError(f"direction {beta} out of range for dimension {d}")
    cols = np.array([j - 1 for j in beta])
    comp = np.setdiff1d(np.arange(d), cols)
    return beta, cols, comp


def _possum(theta, cols, j):
    """sum_{k in cols} (theta_k - theta_j)_+ per row."""
    return np.clip(theta[:, cols] - theta[:, j : j + 1], 0.0, None).sum(axis=1)


def prob_c_beta_mc(model, beta, n, seed):
    """MC estimate of P(Z in C_beta) via the expectation formula

    P(Z in C_beta) = E[( min_{j not in beta} S_j^alpha
                         - max_{j in beta} S_j^alpha )_+],

    with S_j = sum_{k in beta} (Theta_k - Theta_j)_+ and the empty min
    replaced by 1.
    """
    _, cols, comp = _split_direction(beta, model.d)
    alpha = model.alpha

    def integrand(theta):
        m = len(theta)
        lo = np.full(m, 1.0)
        for j in comp:
            np.minimum(lo, _possum(theta, cols, j) ** alpha, out=lo)
        hi = np.zeros(m)
        for j in cols:
            np.maximum(hi, _possum(theta, cols, j) ** alpha, out=hi)
        return np.clip(lo - hi, 0.0, None)

    return _mc_mean(model, seed, n, integrand)


def prob_null_on_complement(model, beta, n, seed):
    """MC estimate of P(Z_{beta^c} = 0) = E[min_{j not in beta} S_j^alpha]."""
    _, cols, comp = _split_direction(beta, model.d)
    if comp.size == 0:
        raise ValueError("beta is the full set: complement is empty")
    alpha = model.alpha

    def integrand(theta):
        lo = np.full(len(theta), np.inf)
        for j in comp:
            np.minimum(lo, _possum(theta, cols, j) ** alpha, out=lo)
        return lo

    return _mc_mean(model, seed, n, integrand)


def prob_axis(model, j, n, seed):
    """MC estimate of P(Z_j = 1) = E[min_{i != j} (Theta_j - Theta_i)_+^alpha]."""
    return prob_c_beta_mc(model, (j,), n, seed)


def g_beta_mc(model, beta, x_beta, n, seed):
    """MC estimate of G_beta(x) = P(Z_beta > x_beta, Z_{beta^c} = 0).

    ``x_beta`` lists the coordinates of x over beta (the rest of x is zero);
    each must be in [0, 1) and differ from 1/|beta|.  The estimator averages

        (1 ^ min_{j in beta_+} B_j^alpha ^ min_{j in beta^c} (|T_b| - b T_j)_+^alpha
           - max_{j in beta_-} B_j^alpha)_+

    with B_j = ((b Theta_j - |Theta_beta|)/(b x_j - 1))_+, b = |beta|, and
    beta_+/- the coordinates with x_j above/below 1/b.
    """
    beta, cols, comp = _split_direction(beta, model.d)
    x = np.asarray(x_beta, dtype=np.float64)
    if x.shape != (len(beta),):
        raise ValueError(f"x must give one value per index of beta={beta}")
    if (x < 0).any() or (x >= 1).any():
        raise ValueError("coordinates of x must lie in [0, 1)")
    b = float(len(beta))
    if np.any(x == 1.0 / b):
        raise ValueError(f"coordinates of x equal to 1/|beta| = {1.0 / b} are excluded")
    plus = cols[x > 1.0 / b]
    minus = cols[x < 1.0 / b]
    x_by_col = dict(zip(cols, x))
    alpha = model.alpha

    def integrand(theta):
        m = len(theta)
        tot = theta[:, cols].sum(axis=1)
        cap = np.full(m, 1.0)
        for j in plus:
            ratio = np.clip((b * theta[:, j] - tot) / (b * x_by_col[j] - 1.0), 0.0, None)
            np.minimum(cap, ratio**alpha, out=cap)
        for j in comp:
            np.minimum(cap, np.clip(tot - b * theta[:, j], 0.0, None) ** alpha, out=cap)
        low = np.zeros(m)
        for j in minus:
            ratio = np.clip((b * theta[:, j] - tot) / (b * x_by_col[j] - 1.0), 0.0, None)
            np.maximum(low, ratio**alpha, out=low)
        return np.clip(cap - low, 0.0, None)

    return _mc_mean(model, seed, n, integrand)


def g_beta_direct(model, beta, x_beta, n, seed):
    """Direct frequency estimate of G_beta(x) from draws of Z."""
    beta, cols, comp = _split_direction(beta, model.d)
    x = np.asarray(x_beta, dtype=np.float64)
    rng = np.random.default_rng([int(seed), 0xD12])
    hits = 0
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        Z = sample_z(model, m, rng)
        ok = (Z[:, cols] > x).all(axis=1)
        if comp.size:
            ok &= (Z[:, comp] == 0.0).all(axis=1)
        hits += int(ok.sum())
        done += m
    p = hits / n
    return MCEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


# ---------------------------------------------------------------------------
# Conditional identity P(Z in . | Y > r) = P(proj(r Z) in .)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheckReport:
    """Two-sample comparison of (Z | Y > r) against proj(r Z)."""

    r: float
    freq_conditional: dict
    freq_projected: dict
    n_conditional: int
    n_projected: int
    tv_distance: float
    tv_std_error: float

    def within(self, n_se=3.0):
        return self.tv_distance <= n_se * self.tv_std_error


def conditional_identity_check(model, r, n, seed):
    """Empirical check of the radial-angular dependence identity.

    Runs two independently seeded simulations: the law of Z conditionally on
    Y > r (by rejection), and the law of proj(r Z).  Reports per-direction
    frequencies and the total-variation distance over observed directions.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    rng_a = np.random.default_rng([int(seed), 1])
    rng_b = np.random.default_rng([int(seed), 2])

    # conditional run: keep Z-draws whose radius exceeds r
    theta = model.sample_theta(n, rng_a)
    y = pareto_radius(n, model.alpha, rng_a)
    keep = y > r
    Za, _, _ = project_rows(theta[keep] * y[keep, None], 1.0)

    # projected run: fresh Z, then project r*Z back onto the simplex
    Zb = sample_z(model, n, rng_b)
    Zb, _, _ = project_rows(r * Zb, 1.0)

    fa = direction_frequencies(Za)
    fb = direction_frequencies(Zb)
    na, nb = len(Za), len(Zb)
    classes = sorted(set(fa) | set(fb))
    tv = 0.0
    var = 0.0
    for beta in classes:
        pa = fa.get(beta, 0.0)
        pb = fb.get(beta, 0.0)
        tv += abs(pa - pb)
        var += pa * (1.0 - pa) / na + pb * (1.0 - pb) / nb
    return IdentityCheckReport(
        r=float(r),
        freq_conditional=fa,
        freq_projected=fb,
        n_conditional=na,
        n_projected=nb,
        tv_distance=0.5 * tv,
        tv_std_error=0.5 * math.sqrt(var),
    )


# ---------------------------------------------------------------------------
# Maximal directions
# ---------------------------------------------------------------------------


def maximal_directions(probs, tol=0.0):
    """Directions with mass above ``tol`` and no strict superset above ``tol``.

    ``tol`` may be a scalar or a per-direction mapping (e.g. 3 standard
    errors for Monte-Carlo inputs; use 0 for closed-form laws).
    """
    if hasattr(tol, "get"):
        cut = lambda b: tol.get(b, 0.0)  # noqa: E731
    else:
        cut = lambda b: tol  # noqa: E731
    alive = [as_direction(b) for b, p in probs.items() if p > cut(b)]
    sets = {b: frozenset(b) for b in alive}
    out = set()
    for b in alive:
        if not any(b != c and sets[b] < sets[c] for c in alive):
            out.add(b)
    return out
