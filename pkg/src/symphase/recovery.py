"""Recover ``x`` (up to a global sign) from intensities ``|F S_z(x)|^2``.

Two routes are provided:

* :func:`recover_direct` turns the intensities into the circular
  autocorrelation of ``S_z(x)``.  Because ``S_z(x)`` lives on a cyclic
  block short enough that no wrap-around occurs, that autocorrelation is
  a rotated copy of the *linear* self-convolution of the block, i.e. the
  coefficients of ``p(z)**2``.  A polynomial square root then gives the
  block back.
* :func:`recover_alternating` is a hybrid input-output iteration between
  the support/symmetry constraint and the real-spectrum magnitude
  constraint.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import as_vector, dft, idft, linear_conv_matrix
from .errors import MetadataError, NotAPerfectSquare, OddLeadingIndex
from .measurement import MeasurementVector, autocorrelation_from, measure
from .symmetrization import (
    SymmetrizedVector,
    data_mask,
    extract,
    symmetrize_padded,
    symmetrized_length,
)

__all__ = [
    "RecoveryResult",
    "dist_up_to_sign",
    "canonicalize_sign",
    "poly_sqrt",
    "unroll",
    "reembed",
    "measurement_residual",
    "recover_direct",
    "recover_alternating",
]

# coefficients below this fraction of max|c| are treated as exact zeros
_ZERO_TOL = 1e-13
# a raw candidate this close is accepted without Gauss-Newton polishing
_EXACT_TOL = 1e-11
# below this |c_lead| / max|c| the deconvolution recursion is not attempted
_ANCHOR_TOL = 1e-6
_SIGN_TOL = 1e-9
# longest square root attempted with the plain recursion before other methods
_RECURSION_MAX_LEN = 32


@dataclass
class RecoveryResult:
    """Outcome of a recovery.

    ``iterations`` is the number of alternating-projection steps run; it is
    0 for a noiseless direct recovery and counts the refinement steps when
    the direct route had to refine a noisy estimate.
    """

    estimate: np.ndarray
    residual: float
    method: str
    iterations: int
    sign_convention: str
    exact: bool = True
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        est = np.asarray(self.estimate)
        return {
            "method": self.method,
            "iterations": int(self.iterations),
            "residual": float(self.residual),
            "estimate_re": [float(v) for v in est.real],
            "estimate_im": [float(v) for v in est.imag],
            "sign_convention": self.sign_convention,
        }


def dist_up_to_sign(x, y):
    """``min(||x - y||, ||x + y||)``."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} != {y.size}")
    return float(min(np.linalg.norm(x - y), np.linalg.norm(x + y)))


def canonicalize_sign(v, tol=_SIGN_TOL, lead_real=False):
    """Pick the representative of ``{v, -v}`` used throughout the package.

    With ``lead_real`` and a significant real ``v[0]``, ``v[0] > 0`` is
    enforced.  Otherwise the first entry with ``|v_i| > tol * ||v||`` gets a
    positive real part, or a positive imaginary part when its real part is
    negligible.

    Returns the flipped vector and a short description of the rule used.
    """
    v = np.asarray(v, dtype=np.complex128)
    scale = np.linalg.norm(v)
    if scale == 0:
        return v.copy(), "zero"
    thresh = tol * scale
    if lead_real and abs(v[0]) > thresh:
        return (v.copy() if v[0].real > 0 else -v), "x0>0"
    i = int(np.flatnonzero(np.abs(v) > thresh)[0])
    e = v[i]
    if abs(e.real) > thresh:
        flip = e.real < 0
        rule = f"re(x{i})>0"
    else:
        flip = e.imag < 0
        rule = f"im(x{i})>0"
    return (-v if flip else v.copy()), rule


# ---------------------------------------------------------------------------
# polynomial square root


def _square_residual(p, c):
    return float(np.linalg.norm(np.convolve(p, p) - c))


def _sqrt_recursion(c):
    """Coefficient recursion for ``p * p = c`` anchored at ``c[0] != 0``."""
    L = (c.size + 1) // 2
    p = np.zeros(L, dtype=np.complex128)
    p[0] = np.sqrt(c[0])
    denom = 2.0 * p[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, L):
            p[k] = (c[k] - np.dot(p[1:k], p[k - 1:0:-1])) / denom
    return p


def _sqrt_contour(c, oversample=16):
    """Square root from samples of ``c(z)`` on circles ``|z| = rho`` near 1.

    ``c(z) = p(z)**2`` has even winding number around any circle avoiding
    its zeros, so the continuously unwrapped half-phase is single valued
    and ``sqrt|c| * exp(i*phase/2)`` samples ``p`` itself.  Circles just
    off the unit circle are tried because conjugate-symmetric ``p`` keep
    many zeros exactly on it.  The energy aliased beyond degree ``L - 1``
    measures whether the branch was tracked correctly.
    """
    L = (c.size + 1) // 2
    M = 1 << int(np.ceil(np.log2(oversample * c.size)))
    k = np.arange(c.size)
    j = np.arange(L)
    best = None
    for tau in (0.5, -0.5, 1.0, -1.0, 0.25, -0.25, 1.5, -1.5, 2.0, -2.0):
        rho = np.exp(tau / L)
        vals = np.fft.ifft(c * rho**k, M) * M
        phase = np.unwrap(np.angle(vals))
        q = np.fft.fft(np.sqrt(np.abs(vals)) * np.exp(0.5j * phase)) / M
        head = np.linalg.norm(q[:L])
        if head == 0:
            continue
        tail = np.linalg.norm(q[L:]) / head
        if best is None or tail < best[0]:
            best = (tail, q[:L] * rho ** (-j))
        if tail < 1e-10:
            break
    return None if best is None else best[1]


def _pair_roots(r):
    """Greedily pair nearest roots and return one averaged root per pair."""
    if r.size == 0:
        return r
    d = np.abs(r[:, None] - r[None, :])
    iu, ju = np.triu_indices(r.size, 1)
    order = np.argsort(d[iu, ju], kind="stable")
    used = np.zeros(r.size, dtype=bool)
    out = []
    for o in order:
        a, b = iu[o], ju[o]
        if used[a] or used[b]:
            continue
        used[a] = used[b] = True
        out.append(0.5 * (r[a] + r[b]))
        if len(out) == r.size // 2:
            break
    return np.asarray(out)


def _sqrt_roots(c):
    """Root-pairing spectral factorization of ``c`` (anchored, ``c[0] != 0``).

    ``p`` is rebuilt from its roots by evaluating the product on the unit
    circle and transforming back, which avoids expanding a long product
    of linear factors coefficient by coefficient.
    """
    L = (c.size + 1) // 2
    scale = np.max(np.abs(c))
    top = int(np.flatnonzero(np.abs(c) > _ZERO_TOL * scale)[-1])
    deg = top // 2
    p = np.zeros(L, dtype=np.complex128)
    if deg == 0:
        p[0] = np.sqrt(c[0])
        return p
    roots = np.roots(c[: 2 * deg + 1][::-1])
    paired = _pair_roots(roots)
    N = deg + 1
    z = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.sqrt(c[2 * deg]) * np.prod(z[:, None] - paired[None, :], axis=1)
    p[:N] = np.fft.fft(vals) / N
    return p


def _gauss_newton_step(p, r):
    """Least-squares ``d`` minimizing ``||2 p * d - r||``.

    Uses the normal equations; both ``T^H T`` (Hermitian Toeplitz) and
    ``T^H r`` are correlations, so assembly is O(L^2).
    """
    L = p.size
    full = np.correlate(p, p, "full")
    idx = np.arange(L)
    gram = 4.0 * full[(L - 1) + idx[:, None] - idx[None, :]]
    rhs = 2.0 * np.correlate(r, p, "valid")
    try:
        step = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        step = None
    if step is None or not np.all(np.isfinite(step)):
        step = np.linalg.lstsq(2.0 * linear_conv_matrix(p, L), r, rcond=None)[0]
    return step


def _polish(p, c, max_iter=10):
    """Gauss-Newton on ``||p * p - c||`` with step halving; returns (p, residual)."""
    best = p
    best_r = _square_residual(p, c)
    for _ in range(max_iter):
        if best_r == 0:
            break
        step = _gauss_newton_step(best, c - np.convolve(best, best))
        t = 1.0
        improved = False
        for _ in range(6):
            cand = best + t * step
            cr = _square_residual(cand, c)
            if cr < best_r:
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        gain = best_r - cr
        best, best_r = cand, cr
        if gain <= 1e-3 * cr or np.linalg.norm(t * step) <= 1e-15 * np.linalg.norm(best):
            break
    return best, best_r


def poly_sqrt(c, tol=1e-8):
    """Square root of a polynomial given by its ascending coefficients.

    Finds ``p`` of length ``L = (len(c) + 1) // 2`` with
    ``linear_conv(p, p) == c``.  Leading zeros of ``c`` (an even number of
    them) become leading zeros of ``p``.  Candidates are produced by

    1. the coefficient recursion
       ``p_k = (c_k - sum_{i=1}^{k-1} p_i p_{k-i}) / (2 p_0)``,
       skipped when ``|c_0|`` is tiny relative to ``max|c|`` and moved
       after step 2 for roots longer than 32 coefficients;
    2. phase-tracked sampling of ``c(z)`` on circles near ``|z| = 1``;
    3. pairing of the (double) roots of ``c``,

    stopping at the first that reproduces ``c`` to working precision.
    Otherwise the best candidate is refined by Gauss-Newton on
    ``||p * p - c||``.

    The result is sign-canonical: the first significant entry has a
    positive real part (positive imaginary part if the real part vanishes).

    Raises
    ------
    OddLeadingIndex
        If the first nonzero coefficient has an odd index.
    NotAPerfectSquare
        If the best residual exceeds ``tol * ||c||``; the exception carries
        that best candidate as ``best``.
    """
    c = as_vector(c, "c")
    if c.size % 2 == 0:
        raise ValueError("coefficient vector must have odd length 2L-1")
    L = (c.size + 1) // 2
    scale = np.max(np.abs(c))
    p = np.zeros(L, dtype=np.complex128)
    if scale == 0:
        return p
    first = int(np.flatnonzero(np.abs(c) > _ZERO_TOL * scale)[0])
    if first % 2:
        raise OddLeadingIndex(f"first nonzero coefficient at odd index {first}")
    j0 = first // 2
    core = c[first:]
    cnorm = np.linalg.norm(c)
    exact = _EXACT_TOL * cnorm

    candidates = []

    def consider(q):
        if q is None:
            return
        with np.errstate(over="ignore", invalid="ignore"):
            r = _square_residual(q, core)
        if np.isfinite(r):
            candidates.append((r, q))

    anchored = abs(core[0]) >= _ANCHOR_TOL * scale
    # the recursion loses digits geometrically with length; long cores go
    # to the contour method first
    short = core.size <= 2 * _RECURSION_MAX_LEN - 1
    if anchored and short:
        consider(_sqrt_recursion(core))
    if not candidates or candidates[0][0] > exact:
        consider(_sqrt_contour(core))
    if anchored and not short and min(r for r, _ in candidates or [(np.inf, None)]) > exact:
        consider(_sqrt_recursion(core))

    res, q = min(candidates, key=lambda t: t[0]) if candidates else (np.inf, None)
    if res > exact:
        if q is not None:
            q, res = _polish(q, core)
        if res > exact:
            qr, rr = _polish(_sqrt_roots(core), core)
            if rr < res:
                q, res = qr, rr

    p[j0:] = q
    p, _ = canonicalize_sign(p)
    if not res <= tol * cnorm:
        raise NotAPerfectSquare(
            f"best square-root residual {res:.3e} exceeds {tol:.1e} * ||c||",
            best=p,
            residual=res,
        )
    return p


# ---------------------------------------------------------------------------
# direct recovery


def _block_length(n, variant):
    return 2 * n - 1 if variant == "A" else 2 * n


def unroll(a, n, variant):
    """Rotate a circular autocorrelation so it reads as linear-convolution coefficients."""
    a = as_vector(a, "a")
    if a.size != symmetrized_length(n, variant):
        raise MetadataError("autocorrelation length does not match variant")
    shift = 2 * (n - 1) if variant == "A" else -2 * n
    return np.roll(a, shift)


def reembed(p, n, variant):
    """Place the recovered block back at its position in the symmetrized layout."""
    p = as_vector(p, "p")
    if p.size != _block_length(n, variant):
        raise MetadataError("block length does not match variant")
    s = np.zeros(symmetrized_length(n, variant), dtype=np.complex128)
    s[: p.size] = p
    shift = -(n - 1) if variant == "A" else n
    return SymmetrizedVector(np.roll(s, shift), variant, n)


def measurement_residual(x, m):
    """``||measure(x) - m||``."""
    return float(np.linalg.norm(measure(x, m.variant).intensities - m.intensities))


def _finish(x, m):
    if m.variant == "A":
        x = x.copy()
        x[0] = x[0].real
    x, rule = canonicalize_sign(x, lead_real=(m.variant == "A"))
    return x, rule


def recover_direct(m, tol=1e-8, fallback=None, refine_steps=20):
    """Algebraic recovery through the polynomial square root of the autocorrelation.

    Parameters
    ----------
    m : MeasurementVector
    tol : float
        Relative residual allowed for the square root before it is
        declared inexact.
    fallback : bool, optional
        What to do with an inexact square root: continue with the best
        candidate (True) or raise :class:`NotAPerfectSquare` (False).
        Defaults to True exactly when ``m`` records nonzero noise.
    refine_steps : int
        Alternating-projection steps run from the algebraic estimate when
        the measurement is noisy or the square root was inexact.

    Returns
    -------
    RecoveryResult
    """
    if not isinstance(m, MeasurementVector):
        raise TypeError("recover_direct needs a MeasurementVector")
    n, variant = m.origin_n, m.variant
    if fallback is None:
        fallback = m.noise_sigma > 0
    if not np.any(m.intensities):
        return RecoveryResult(np.zeros(n, dtype=np.complex128), 0.0, "direct", 0, "zero")

    c = unroll(autocorrelation_from(m), n, variant)
    exact = True
    try:
        p = poly_sqrt(c, tol=tol)
    except NotAPerfectSquare as err:
        if not fallback:
            raise
        p, exact = err.best, False

    x = extract(reembed(p, n, variant))
    x, rule = _finish(x, m)
    residual = measurement_residual(x, m)
    result = RecoveryResult(x, residual, "direct", 0, rule, exact=exact)

    if (m.noise_sigma > 0 or not exact) and refine_steps > 0:
        refined = recover_alternating(m, max_iter=refine_steps, init=x)
        result.iterations = refined.iterations
        if refined.residual < residual:
            result.estimate = refined.estimate
            result.residual = refined.residual
            result.sign_convention = refined.sign_convention
    return result


# ---------------------------------------------------------------------------
# alternating projections


def recover_alternating(m, max_iter=200, tol=1e-12, seed=None, init=None, beta=0.9,
                        patience=10):
    """Hybrid input-output iteration on the symmetrized layout.

    The time-domain projection zeroes everything outside the support block
    and averages mirrored entries; the frequency-domain projection keeps the
    sign of ``Re(dft(s))`` and imposes the measured magnitudes ``sqrt(m)``.
    The feedback term ``(I - P_time)(s - beta * P_freq(s))`` is what lets the
    iteration change signs; plain alternation stalls at its starting signs.

    The iteration is not monotone, so the iterate with the smallest
    measurement residual is returned, not the last one.

    Parameters
    ----------
    init : array_like, optional
        Starting signal estimate. Without it the spectrum starts from all
        ``+1`` signs, or from seeded random signs when ``seed`` is given.
    tol : float
        Stop once the residual is below ``tol * ||m||``, or once it has moved
        less than that for ``patience`` consecutive steps.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n, variant = m.origin_n, m.variant
    target = np.sqrt(m.intensities)
    mask = data_mask(n, variant)
    mnorm = np.linalg.norm(m.intensities)
    if mnorm == 0:
        return RecoveryResult(np.zeros(n, dtype=np.complex128), 0.0, "alternating", 0, "zero")

    def p_time(t):
        t = np.where(mask, t, 0)
        return 0.5 * (t + np.conj(np.roll(t[::-1], 1)))

    def p_freq(t):
        spectrum = dft(t)
        return idft(np.where(spectrum.real >= 0, target, -target))

    if init is not None:
        x0 = as_vector(init, "init").copy()
        if variant == "A":
            x0[0] = x0[0].real
        t = symmetrize_padded(x0, variant).entries.copy()
    elif seed is None:
        t = idft(target)
    else:
        signs = np.random.default_rng(seed).choice([-1.0, 1.0], size=target.size)
        t = idft(signs * target)

    best_r, best_s = np.inf, None
    prev = np.inf
    flat = 0
    it = 0
    for it in range(1, max_iter + 1):
        y = p_freq(t)
        est = p_time(y)
        spectrum = dft(est)
        r = float(np.linalg.norm(spectrum.real**2 + spectrum.imag**2 - m.intensities))
        if r < best_r:
            best_r, best_s = r, est
        if r <= tol * mnorm:
            break
        flat = flat + 1 if abs(prev - r) < tol * mnorm else 0
        if flat >= patience:
            break
        prev = r
        z = t - beta * y
        t = p_time(y) + z - p_time(z)

    x = extract(SymmetrizedVector(best_s, variant, n))
    x, rule = _finish(x, m)
    residual = measurement_residual(x, m)
    return RecoveryResult(x, residual, "alternating", it, rule,
                          exact=bool(residual <= 1e-8 * mnorm))
