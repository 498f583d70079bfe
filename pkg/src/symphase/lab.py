"""Numerical laboratory for the stability constants.

* :func:`estimate_alpha` searches for the smallest value of
  ``||(x, 0) (*) (y, 0)|| / (||x|| ||y||)`` over s-sparse ``x`` and
  f-sparse ``y`` in C^n (zero padded to 2n-1), i.e. the best constant in
  the restricted norm multiplicativity bound.
* :func:`verify_rnmp_bounds` samples random sparse pairs against both
  sides of that bound.
* :func:`verify_stability_inequality` checks
  ``||m(x1) - m(x2)|| >= c ||x1 - x2|| ||x1 + x2||`` on random pairs.
* :func:`noise_robustness_sweep` measures recovery error against noise.

Every routine takes a master seed; per-trial generators are derived from
``(seed, index)`` so results do not depend on evaluation order.
"""

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import as_vector, circ_conv
from .measurement import NoiseModel, add_noise, measure
from .recovery import dist_up_to_sign, recover_alternating, recover_direct

__all__ = [
    "RnmpEstimate",
    "RnmpBoundsReport",
    "StabilityReport",
    "SweepRow",
    "SweepReport",
    "padded_conv_ratio",
    "estimate_alpha",
    "alpha_grid",
    "alpha_trend",
    "stability_constant",
    "verify_rnmp_bounds",
    "verify_stability_inequality",
    "noise_robustness_sweep",
    "derive_seed",
]


def derive_seed(*key):
    """A 64-bit integer seed determined by ``key`` (master seed, indices...)."""
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1, np.uint64)[0])


def _rng(*key):
    return np.random.default_rng([int(k) for k in key])


def _check_sfn(s, f, n):
    if not (isinstance(s, (int, np.integer)) and isinstance(f, (int, np.integer))
            and isinstance(n, (int, np.integer))):
        raise ValueError("s, f, n must be integers")
    if not 1 <= s <= f <= n:
        raise ValueError(f"need 1 <= s <= f <= n, got s={s}, f={f}, n={n}")


def padded_conv_ratio(x, y):
    """``||(x, 0) (*) (y, 0)|| / (||x|| ||y||)`` with both padded to length 2n-1."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    n = x.size
    if y.size != n:
        raise ValueError("length mismatch")
    pad = np.zeros(n - 1, dtype=np.complex128)
    conv = circ_conv(np.concatenate([x, pad]), np.concatenate([y, pad]))
    return float(np.linalg.norm(conv) / (np.linalg.norm(x) * np.linalg.norm(y)))


# ---------------------------------------------------------------------------
# RNMP constant


@dataclass
class RnmpEstimate:
    s: int
    f: int
    n: int
    alpha_hat: float
    trials: int
    best_x: np.ndarray
    best_y: np.ndarray
    converged: bool
    seed: int = 0
    supports_enumerated: bool = True

    def row(self):
        return {
            "s": self.s,
            "f": self.f,
            "n": self.n,
            "alpha_hat": self.alpha_hat,
            "sqrt_s": math.sqrt(self.s),
            "trials": self.trials,
            "converged": self.converged,
            "supports_enumerated": self.supports_enumerated,
            "seed": self.seed,
        }


def _supports(n, k):
    # shifting both supports leaves the norm unchanged, so one of them may
    # be pinned to contain index 0
    return [(0,) + rest for rest in itertools.combinations(range(1, n), k - 1)]


def _random_supports(rng, n, k, count):
    out = np.empty((count, k), dtype=np.int64)
    for i in range(count):
        out[i, 0] = 0
        out[i, 1:] = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
    return out


def _conv_operator(coef, sup_fixed, sup_free, width):
    """Batched matrices mapping free coefficients to the linear convolution.

    ``coef`` (B, k) lives on ``sup_fixed`` (B, k); the result has shape
    (B, width, len(sup_free)).
    """
    B, k = coef.shape
    j = sup_free.shape[1]
    rows = sup_fixed[:, :, None] + sup_free[:, None, :]
    T = np.zeros((B, width, j), dtype=np.complex128)
    b_idx = np.broadcast_to(np.arange(B)[:, None, None], rows.shape)
    c_idx = np.broadcast_to(np.arange(j)[None, None, :], rows.shape)
    T[b_idx, rows, c_idx] = np.broadcast_to(coef[:, :, None], rows.shape)
    return T


def _smallest_right_singular(T):
    _, sv, vh = np.linalg.svd(T, full_matrices=False)
    return sv[:, -1], np.conj(vh[:, -1, :])


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def estimate_alpha(s, f, n, restarts=32, seed=0, max_iter=500, enum_limit=10_000,
                   sample_supports=1000, init=None):
    """Estimate the RNMP constant for s-sparse times f-sparse vectors in C^n.

    For each pair of supports, minimize the bilinear ratio by alternating
    smallest-right-singular-vector updates of ``y`` (with ``x`` fixed) and
    ``x`` (with ``y`` fixed).  Support pairs are enumerated exhaustively
    when there are at most ``enum_limit`` of them and sampled otherwise;
    the ``restarts`` random starting points are spread over them, at least
    one per support pair.

    ``init`` may be an estimate from a smaller problem (``s' <= s``,
    ``f' <= f``, ``n' <= n``); its minimizer is feasible here and is kept
    when better.

    The returned ``alpha_hat`` is evaluated at the stored unit minimizers
    through the padded circular convolution, so it is always attained by
    an actual feasible pair and therefore an upper bound on the true
    constant.
    """
    _check_sfn(s, f, n)
    rng = _rng(seed, s, f, n)
    width = 2 * n - 1
    total = math.comb(n - 1, s - 1) * math.comb(n - 1, f - 1)
    if total <= enum_limit:
        pairs = list(itertools.product(_supports(n, s), _supports(n, f)))
        sx = np.array([p[0] for p in pairs], dtype=np.int64).reshape(len(pairs), s)
        sy = np.array([p[1] for p in pairs], dtype=np.int64).reshape(len(pairs), f)
        enumerated = True
    else:
        sx = _random_supports(rng, n, s, sample_supports)
        sy = _random_supports(rng, n, f, sample_supports)
        enumerated = False
    per = max(1, math.ceil(restarts / sx.shape[0]))
    sx = np.repeat(sx, per, axis=0)
    sy = np.repeat(sy, per, axis=0)
    B = sx.shape[0]

    X = rng.standard_normal((B, s)) + 1j * rng.standard_normal((B, s))
    # the first start on every support is the flat vector
    X[::per] = 1.0
    X = _unit(X)
    value = np.full(B, np.inf)
    converged = np.zeros(B, dtype=bool)
    for _ in range(max_iter):
        _, Y = _smallest_right_singular(_conv_operator(X, sx, sy, width))
        sv, X = _smallest_right_singular(_conv_operator(Y, sy, sx, width))
        converged = (value - sv) < 1e-12
        value = np.minimum(value, sv)
        if np.all(converged):
            break

    best = int(np.argmin(value))
    bx = np.zeros(n, dtype=np.complex128)
    by = np.zeros(n, dtype=np.complex128)
    bx[sx[best]] = X[best]
    by[sy[best]] = Y[best]
    # Y came from the previous half-step; recompute it for the final X
    _, yb = _smallest_right_singular(_conv_operator(X[best:best + 1], sx[best:best + 1],
                                                    sy[best:best + 1], width))
    by[:] = 0
    by[sy[best]] = yb[0]
    alpha = padded_conv_ratio(bx, by)
    est = RnmpEstimate(s, f, n, alpha, B, bx, by, bool(converged[best]), seed, enumerated)

    if init is not None:
        if not (init.s <= s and init.f <= f and init.n <= n):
            raise ValueError("init must come from a problem with smaller or equal parameters")
        ix = np.concatenate([init.best_x, np.zeros(n - init.n, dtype=np.complex128)])
        iy = np.concatenate([init.best_y, np.zeros(n - init.n, dtype=np.complex128)])
        ia = padded_conv_ratio(ix, iy)
        if ia < est.alpha_hat:
            est.alpha_hat, est.best_x, est.best_y = ia, ix, iy
            est.converged = init.converged
    return est


def alpha_grid(s_max, f_max, n_max, restarts=32, seed=0):
    """Estimates for every ``s <= f <= n`` with ``s <= s_max``, ``f <= f_max``, ``n <= n_max``.

    Neighbouring estimates with smaller parameters are passed as ``init``,
    which makes the table non-increasing in each parameter by construction.
    """
    table = {}
    for n in range(1, n_max + 1):
        for s in range(1, min(s_max, n) + 1):
            for f in range(s, min(f_max, n) + 1):
                est = estimate_alpha(s, f, n, restarts=restarts, seed=seed)
                for key in ((s - 1, f, n), (s, f - 1, n), (s, f, n - 1)):
                    prev = table.get(key)
                    if prev is not None and prev.alpha_hat < est.alpha_hat:
                        est = _adopt(est, prev)
                table[(s, f, n)] = est
    return table


def _adopt(est, smaller):
    n = est.n
    pad = np.zeros(n - smaller.n, dtype=np.complex128)
    bx = np.concatenate([smaller.best_x, pad])
    by = np.concatenate([smaller.best_y, pad])
    a = padded_conv_ratio(bx, by)
    if a < est.alpha_hat:
        est.alpha_hat, est.best_x, est.best_y = a, bx, by
    return est


def alpha_trend(s, f, ns, restarts=32, seed=0):
    """Rows comparing ``alpha_hat(s, f, n)`` with ``alpha_hat(s, f, 2n)``."""
    rows = []
    for n in ns:
        a = estimate_alpha(s, f, n, restarts=restarts, seed=seed).alpha_hat
        b = estimate_alpha(s, f, 2 * n, restarts=restarts, seed=seed).alpha_hat
        rows.append({"s": s, "f": f, "n": n, "alpha_n": a, "alpha_2n": b,
                     "rel_change": abs(b - a) / a})
    return rows


def stability_constant(variant, n, restarts=32, seed=0):
    """``c = alpha_hat / sqrt(n_meas)`` for the block carrying ``S_z(x)``.

    Both ``S_z(x1 - x2)`` and ``S_z(x1 + x2)`` sit on one cyclic block of
    length ``L`` (2n-1 for A, 2n for B) in dimension ``n_meas = 2L - 1``,
    so the relevant constant is the full-support one with ``s = f = L``.
    """
    L = 2 * n - 1 if variant == "A" else 2 * n
    est = estimate_alpha(L, L, L, restarts=restarts, seed=seed)
    return est.alpha_hat / math.sqrt(2 * L - 1), est


@dataclass
class RnmpBoundsReport:
    s: int
    f: int
    n: int
    num_samples: int
    seed: int
    alpha_hat: float
    upper_violations: int
    lower_violations: int
    min_ratio: float
    max_ratio: float

    def row(self):
        return asdict(self)


def _batch_padded_ratio(X, Y):
    B, n = X.shape
    pad = np.zeros((B, n - 1), dtype=np.complex128)
    fx = np.fft.fft(np.concatenate([X, pad], axis=1), axis=1)
    fy = np.fft.fft(np.concatenate([Y, pad], axis=1), axis=1)
    conv = np.fft.ifft(fx * fy, axis=1)
    return np.linalg.norm(conv, axis=1) / (np.linalg.norm(X, axis=1) * np.linalg.norm(Y, axis=1))


def _sparse_draws(rng, count, n, k):
    out = np.zeros((count, n), dtype=np.complex128)
    for i in range(count):
        idx = rng.choice(n, size=k, replace=False)
        out[i, idx] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return out


def verify_rnmp_bounds(s, f, n, num_samples=10_000, seed=0, estimate=None):
    """Check both sides of the RNMP bound on random sparse pairs.

    The upper bound ``ratio <= sqrt(s)`` must never fail.  The lower bound
    is compared with ``estimate.alpha_hat`` (computed here if not given);
    a sample below it is a better feasible point, so ``alpha_hat`` in the
    report is lowered to the smallest ratio seen.
    """
    _check_sfn(s, f, n)
    if estimate is None:
        estimate = estimate_alpha(s, f, n, seed=seed)
    rng = _rng(seed, 1, s, f, n)
    X = _sparse_draws(rng, num_samples, n, s)
    Y = _sparse_draws(rng, num_samples, n, f)
    # flat vectors on leading blocks are a structured extreme case
    X[0] = 0
    X[0, :s] = 1.0
    Y[0] = 0
    Y[0, :f] = 1.0
    ratio = _batch_padded_ratio(X, Y)
    upper = int(np.count_nonzero(ratio > math.sqrt(s) * (1 + 1e-12)))
    lower = int(np.count_nonzero(ratio < estimate.alpha_hat))
    return RnmpBoundsReport(
        s, f, n, num_samples, seed,
        alpha_hat=float(min(estimate.alpha_hat, ratio.min())),
        upper_violations=upper,
        lower_violations=lower,
        min_ratio=float(ratio.min()),
        max_ratio=float(ratio.max()),
    )


# ---------------------------------------------------------------------------
# stability inequality


@dataclass
class StabilityReport:
    variant: str
    n: int
    num_pairs: int
    c_used: float
    violations: int
    min_ratio: float
    sampled_min_ratio: float
    refined_pairs: int
    seed: int
    worst_pair: tuple = field(default=(), repr=False)

    def row(self):
        d = asdict(self)
        d.pop("worst_pair")
        return d


def _draw_signals(rng, count, n, variant):
    X = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    if variant == "A":
        X[:, 0] = X[:, 0].real
    return _unit(X)


def _batch_symmetrize(X, variant):
    B, n = X.shape
    if variant == "A":
        out = np.zeros((B, 4 * n - 3), dtype=np.complex128)
        out[:, :n] = X
        out[:, 4 * n - 3 - n + 1:] = np.conj(X[:, :0:-1])
    else:
        out = np.zeros((B, 4 * n - 1), dtype=np.complex128)
        out[:, n:2 * n] = X
        out[:, 2 * n:3 * n] = np.conj(X[:, ::-1])
    return out


def _batch_measure(X, variant):
    spectrum = np.fft.ifft(_batch_symmetrize(X, variant), axis=1, norm="ortho")
    return spectrum.real**2 + spectrum.imag**2


def _real_basis(n, variant):
    """Complex vectors forming an orthonormal basis of the real parameter space."""
    basis = []
    for j in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[j] = 1.0
        basis.append(e)
        if j > 0 or variant == "B":
            basis.append(1j * e)
    return np.array(basis)


def _refine_pair(d, s, variant, iters=200):
    """Lower the ratio ``||S(d) (*) S(s)|| / (||d|| ||s||)`` by alternating minimization.

    For fixed ``s`` the numerator is real-linear in ``d``, so the best ``d``
    is a smallest right singular vector of a real matrix over the real
    parameters of ``d``; then the roles swap.
    """
    n = d.size
    basis = _real_basis(n, variant)
    sym_basis = _batch_symmetrize(basis, variant)
    fb = np.fft.fft(sym_basis, axis=1)

    def best_partner(v):
        fv = np.fft.fft(_batch_symmetrize(v[None, :], variant)[0])
        cols = np.fft.ifft(fb * fv[None, :], axis=1)
        M = np.concatenate([cols.real, cols.imag], axis=1).T
        _, sv, vh = np.linalg.svd(M, full_matrices=False)
        return sv[-1], vh[-1] @ basis

    prev = np.inf
    for _ in range(iters):
        _, d = best_partner(s)
        val, s = best_partner(d)
        if prev - val < 1e-13 * max(val, 1e-300):
            break
        prev = val
    return d, s


def verify_stability_inequality(variant, n, num_pairs=10_000, seed=0, c_used=0.0,
                                refine=16, rtol=1e-9):
    """Empirical check of ``||m(x1) - m(x2)|| >= c ||x1 - x2|| ||x1 + x2||``.

    Random unit pairs are drawn (variant A: real first entries).  The
    ``refine`` pairs with the smallest ratio are then pushed towards the
    infimum by alternating minimization over ``(x1 - x2, x1 + x2)``; the
    refined pairs are evaluated through :func:`measure` and counted like
    the sampled ones.  Pairs with a vanishing right-hand side are left out
    of the ratio statistics.

    For variant B the inequality carries a factor 2: pass ``c_used = 2c``.
    That bound is attained, so a violation means
    ``LHS < (1 - rtol) * c_used * RHS`` to keep rounding out of the count.
    """
    if variant not in ("A", "B"):
        raise ValueError(f"unknown variant {variant!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed, 2, n, ord(variant))
    X1 = _draw_signals(rng, num_pairs, n, variant)
    X2 = _draw_signals(rng, num_pairs, n, variant)
    lhs = np.linalg.norm(_batch_measure(X1, variant) - _batch_measure(X2, variant), axis=1)
    rhs = np.linalg.norm(X1 - X2, axis=1) * np.linalg.norm(X1 + X2, axis=1)
    slack = (1.0 - rtol) * c_used
    violations = int(np.count_nonzero(lhs < slack * rhs))
    valid = rhs > 0
    ratio = np.full(num_pairs, np.inf)
    ratio[valid] = lhs[valid] / rhs[valid]
    order = np.argsort(ratio, kind="stable")
    sampled_min = float(ratio[order[0]])
    best = sampled_min
    worst = (X1[order[0]], X2[order[0]])

    k = min(refine, int(np.count_nonzero(valid)))
    for i in order[:k]:
        d, s = _refine_pair(X1[i] - X2[i], X1[i] + X2[i], variant)
        x1, x2 = 0.5 * (s + d), 0.5 * (s - d)
        l_ = np.linalg.norm(measure(x1, variant).intensities - measure(x2, variant).intensities)
        r_ = np.linalg.norm(x1 - x2) * np.linalg.norm(x1 + x2)
        if r_ == 0:
            continue
        violations += int(l_ < slack * r_)
        if l_ / r_ < best:
            best = float(l_ / r_)
            worst = (x1, x2)
    return StabilityReport(variant, n, num_pairs, float(c_used), violations, best,
                           sampled_min, k, seed, worst)


# ---------------------------------------------------------------------------
# noise sweep


@dataclass
class SweepRow:
    sigma: float
    relative: bool
    trials: int
    median_err_direct: float
    mean_err_direct: float
    max_err_direct: float
    median_err_alternating: float
    mean_err_alternating: float
    direct_wins: int

    def row(self):
        return asdict(self)


@dataclass
class SweepReport:
    variant: str
    n: int
    seed: int
    rows: list
    trend_ok: bool
    direct_win_fraction: float


def noise_robustness_sweep(variant, n, sigmas, trials=100, seed=0, relative=True,
                           max_iter=200, noise_kind="intensity"):
    """Recovery error of both methods over a list of noise levels.

    With ``relative=True`` each sigma is multiplied by ``max(m)`` of the
    noiseless measurement of the trial.  Errors are
    ``dist_up_to_sign(estimate, x) / ||x||``.  The direct method runs with
    fallback and refinement; the alternating one starts from seeded random
    signs.  ``direct_win_fraction`` is taken over trials with sigma > 0.
    """
    sigmas = [float(s) for s in sigmas]
    if any(s < 0 for s in sigmas):
        raise ValueError("sigmas must be nonnegative")
    rows = []
    wins = noisy = 0
    for i, sigma in enumerate(sigmas):
        err_d = np.empty(trials)
        err_a = np.empty(trials)
        for t in range(trials):
            rng = _rng(seed, 3, i, t)
            x = _draw_signals(rng, 1, n, variant)[0]
            m = measure(x, variant)
            level = sigma * float(m.intensities.max()) if relative else sigma
            noisy_m = add_noise(m, NoiseModel(level, derive_seed(seed, 4, i, t), noise_kind))
            rd = recover_direct(noisy_m, fallback=True)
            ra = recover_alternating(noisy_m, max_iter=max_iter, seed=derive_seed(seed, 5, i, t))
            err_d[t] = dist_up_to_sign(rd.estimate, x)
            err_a[t] = dist_up_to_sign(ra.estimate, x)
        w = int(np.count_nonzero(err_d < err_a))
        if sigma > 0:
            wins += w
            noisy += trials
        rows.append(SweepRow(sigma, relative, trials, float(np.median(err_d)),
                             float(np.mean(err_d)), float(np.max(err_d)), float(np.median(err_a)),
                             float(np.mean(err_a)), w))
    order = np.argsort(sigmas, kind="stable")
    med = [rows[j].median_err_direct for j in order]
    trend = all(b >= a for a, b in zip(med, med[1:]))
    return SweepReport(variant, n, seed, rows, trend, wins / noisy if noisy else float("nan"))
