"""Second-moment machinery: the Phi functional, its certified maximization,
and an exact small-n estimator of E_Q (P/Q)^2.

Phi(alpha) = H(alpha) - log k + (d lambda^2 / 2)(|alpha|_F^2 - 1) on the
Birkhoff polytope of doubly stochastic k x k matrices, where
H(alpha) = -(1/k) sum alpha_rs log alpha_rs. Negativity of its maximum is
what makes the second moment bounded; the certificate here combines an
entropy bound at fixed rho = |alpha|_F^2 with a grid over rho.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import BudgetError, DomainError, ProjectionError
from .graphgen import RandomStream, sample_er
from .params import from_d_lambda

_FLOOR = 1e-300
_ETA_CAP = 8.0
SINKHORN_TOL = 1e-12
SINKHORN_MAX_ITER = 10_000


# --- Birkhoff polytope plumbing --------------------------------------------


def sinkhorn(x, tol: float = SINKHORN_TOL, max_iter: int = SINKHORN_MAX_ITER) -> np.ndarray:
    """Project a positive matrix to the doubly stochastic set by alternating
    row/column normalization; entries are floored at 1e-300 first."""
    a = np.maximum(np.asarray(x, dtype=float), _FLOOR)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"sinkhorn needs a square matrix, got shape {a.shape}")
    for _ in range(max_iter):
        a = a / a.sum(axis=1, keepdims=True)
        a = a / a.sum(axis=0, keepdims=True)
        err = max(
            float(np.max(np.abs(a.sum(axis=1) - 1.0))),
            float(np.max(np.abs(a.sum(axis=0) - 1.0))),
        )
        if err <= tol:
            return a
    raise ProjectionError(f"sinkhorn did not reach tol={tol:g} in {max_iter} iterations")


def random_doubly_stochastic(k: int, gen: np.random.Generator) -> np.ndarray:
    """Sinkhorn-normalized i.i.d. exponential entries."""
    return sinkhorn(gen.exponential(1.0, size=(k, k)))


def rescale_to_rho(alpha, rho: float) -> np.ndarray:
    """Move alpha along straight lines (toward flat or toward the identity)
    to hit a target Frobenius norm; stays doubly stochastic."""
    a = np.asarray(alpha, dtype=float)
    k = a.shape[0]
    if not (1.0 <= rho <= k):
        raise DomainError(f"target rho must lie in [1, {k}], got {rho}")
    r0 = float(np.sum(a * a))
    if abs(rho - r0) < 1e-15:
        return a.copy()
    flat = np.full_like(a, 1.0 / k)
    if rho < r0:
        t = math.sqrt((rho - 1.0) / (r0 - 1.0))
        return flat + t * (a - flat)
    eye = np.eye(k)
    # |(1-t) a + t I|^2 is quadratic in t with value k at t = 1
    qa = float(np.sum((a - eye) ** 2))
    qb = 2.0 * (float(np.trace(a)) - r0)
    qc = r0 - rho
    if qa == 0.0:
        raise DomainError("alpha is already the identity")
    t = (-qb + math.sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa)
    return (1.0 - t) * a + t * eye


# --- the Phi functional -----------------------------------------------------


def _xlogx_arr(a: np.ndarray) -> np.ndarray:
    return np.where(a > 0.0, a * np.log(np.maximum(a, _FLOOR)), 0.0)


def row_entropy(alpha) -> float:
    """H(alpha) = -(1/k) sum_rs alpha_rs log alpha_rs; in [0, log k] on the
    Birkhoff polytope, log k only at the flat matrix, 0 only at permutations."""
    a = np.asarray(alpha, dtype=float)
    return float(-_xlogx_arr(a).sum() / a.shape[0])


def phi(alpha, d: float, lam: float) -> float:
    """Phi(alpha) = H(alpha) - log k + (d lambda^2 / 2)(|alpha|_F^2 - 1)."""
    a = np.asarray(alpha, dtype=float)
    k = a.shape[0]
    rho = float(np.sum(a * a))
    return row_entropy(a) - math.log(k) + 0.5 * d * lam * lam * (rho - 1.0)


def phi_gradient(alpha, d: float, lam: float) -> np.ndarray:
    """dPhi/dalpha_rs = -(1 + log alpha_rs)/k + d lambda^2 alpha_rs."""
    a = np.asarray(alpha, dtype=float)
    k = a.shape[0]
    return -(1.0 + np.log(np.maximum(a, _FLOOR))) / k + d * lam * lam * a


def quadratic_form(alpha, gamma) -> float:
    """Tr[alpha^T (gamma - J/k) alpha (gamma - J/k)]; equals
    lambda^2 (|alpha|_F^2 - 1) for doubly stochastic alpha when gamma is the
    normalized connectivity matrix."""
    a = np.asarray(alpha, dtype=float)
    g = np.asarray(gamma, dtype=float)
    if a.shape != g.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"alpha and gamma must be square and matching, got {a.shape}, {g.shape}")
    m = g - 1.0 / a.shape[0]
    return float(np.trace(a.T @ m @ a @ m))


# --- entropy bound at fixed rho ---------------------------------------------


def _h_arr(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, -x * np.log(np.maximum(x, _FLOOR)), 0.0)


def _f_profile(r: np.ndarray, k: int) -> np.ndarray:
    s = np.sqrt(np.maximum((k - 1.0) * (k * r - 1.0), 0.0))
    a = (1.0 + s) / k
    b = (1.0 - a) / (k - 1.0)
    return _h_arr(a) + (k - 1.0) * _h_arr(b)


def an_f(r: float, k: int) -> float:
    """Maximal row entropy of a stochastic row with squared norm r:
    f(r) = h((1+sqrt((k-1)(kr-1)))/k) + (k-1) h((1-...)/(k-1))."""
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    if not (1.0 / k - 1e-12 <= r <= 1.0 + 1e-12):
        raise DomainError(f"r must lie in [1/{k}, 1], got {r}")
    rr = min(max(float(r), 1.0 / k), 1.0)
    return float(_f_profile(np.array([rr]), k)[0])


def _bound_profile(ms: np.ndarray, rho: float, k: int) -> np.ndarray:
    den = k * (k - ms)
    r = np.where(den > 1e-12, (k * rho - ms) / np.maximum(den, 1e-12), 1.0 / k)
    r = np.clip(r, 1.0 / k, 1.0)
    return (ms / k) * math.log(k) + (1.0 - ms / k) * _f_profile(r, k)


def _bound_at(m: float, rho: float, k: int) -> float:
    # Scalar twin of _bound_profile for the golden-section refinement, where
    # one-element numpy arrays would dominate the runtime.
    den = k * (k - m)
    r = (k * rho - m) / den if den > 1e-12 else 1.0 / k
    r = min(max(r, 1.0 / k), 1.0)
    s = math.sqrt(max((k - 1.0) * (k * r - 1.0), 0.0))
    a = (1.0 + s) / k
    b = (1.0 - a) / (k - 1.0)
    ha = -a * math.log(a) if a > 0.0 else 0.0
    hb = -b * math.log(b) if b > 0.0 else 0.0
    return (m / k) * math.log(k) + (1.0 - m / k) * (ha + (k - 1.0) * hb)


def _golden_max(fn, lo: float, hi: float, tol: float = 1e-10):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def an_entropy_bound(rho: float, k: int, grid: int = 2048) -> float:
    """Upper bound on H(alpha) over doubly stochastic alpha with
    |alpha|_F^2 = rho: max over m in [0, k(k-rho)/(k-1)] of
    (m/k) log k + (1 - m/k) f((k rho - m)/(k (k - m))).

    Dense grid plus golden-section refinement around the best grid point.
    """
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    if not (1.0 - 1e-9 <= rho <= k + 1e-9):
        raise DomainError(f"rho must lie in [1, {k}], got {rho}")
    r = min(max(float(rho), 1.0), float(k))
    m_max = k * (k - r) / (k - 1.0)
    ms = np.linspace(0.0, m_max, grid)
    vals = _bound_profile(ms, r, k)
    i = int(np.argmax(vals))
    lo = float(ms[max(i - 1, 0)])
    hi = float(ms[min(i + 1, grid - 1)])
    if hi > lo:
        _, refined = _golden_max(lambda m: _bound_at(m, r, k), lo, hi)
    else:
        refined = float(vals[i])
    return float(max(float(vals[i]), refined))


def an_lemma_check(delta: float, rho: float, m: float, k: int) -> bool:
    """Verify delta (rho - 1) / (k-1)^2 <= (1 - m/k)(f(1/k) - f(r)) at
    r = (k rho - m)/(k (k - m)), valid for delta < (k-1) log(k-1)."""
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    if not delta < (k - 1.0) * math.log(k - 1.0):
        raise DomainError(f"lemma needs delta < (k-1) log(k-1), got delta={delta}")
    if not (1.0 - 1e-9 <= rho <= k + 1e-9):
        raise DomainError(f"rho must lie in [1, {k}], got {rho}")
    r = min(max(float(rho), 1.0), float(k))
    m_max = k * (k - r) / (k - 1.0)
    if not (-1e-9 <= m <= m_max + 1e-9):
        raise DomainError(f"m must lie in [0, {m_max}], got {m}")
    mm = min(max(float(m), 0.0), m_max) if m_max > 0 else 0.0
    lhs = delta * (r - 1.0) / (k - 1.0) ** 2
    rhs = _bound_at(mm, r, k) - (mm / k) * math.log(k)
    # rhs above is (1 - m/k) f(r); compare against (1 - m/k) log k - that
    rhs = (1.0 - mm / k) * math.log(k) - rhs
    return bool(lhs <= rhs + 1e-9)


# --- certified maximization --------------------------------------------------


def one_d_bound(rho: float, k: int, d: float, lam: float) -> float:
    """Upper bound on Phi along the slice |alpha|_F^2 = rho."""
    return an_entropy_bound(rho, k) - math.log(k) + 0.5 * d * lam * lam * (rho - 1.0)


def ascend_phi(alpha0, d: float, lam: float, max_iter: int = 250, tol: float = 1e-13):
    """Monotone exponentiated-gradient ascent of Phi from alpha0.

    Steps multiply by exp(eta * grad) in log space, re-project with Sinkhorn,
    and backtrack eta until the value does not decrease. Returns
    (alpha, value, trace) with trace the accepted Phi values.
    """
    a = sinkhorn(np.maximum(np.asarray(alpha0, dtype=float), _FLOOR))
    val = phi(a, d, lam)
    trace = [val]
    # Start at the cap: escaping a vertex start needs a step large enough to
    # lift floored entries past the log-range clip, and backtracking is cheap.
    eta = _ETA_CAP
    for _ in range(max_iter):
        g = phi_gradient(a, d, lam)
        step = eta
        cand = None
        cv = val
        for _ in range(60):
            y = np.log(np.maximum(a, _FLOOR)) + step * g
            # Keep the candidate's dynamic range bounded: Sinkhorn stalls on
            # ratios like e^600 near polytope vertices, and entries below
            # e^-80 move Phi by ~1e-33, far under the 1e-8 certificate slack.
            y -= y.max()
            np.maximum(y, -80.0, out=y)
            try:
                # A tight sweep budget here only screens candidates: one that
                # projects slowly is rejected like any non-improving step, and
                # every accepted iterate is still doubly stochastic to tol.
                nxt = sinkhorn(np.exp(y), max_iter=200)
            except ProjectionError:
                step *= 0.5
                continue
            nv = phi(nxt, d, lam)
            if nv > val:
                cand, cv = nxt, nv
                break
            step *= 0.5
        if cand is None:
            break
        a, gain, val = cand, cv - val, cv
        trace.append(val)
        eta = min(step * 2.0, _ETA_CAP)
        if gain < tol:
            break
    return a, val, trace


@dataclass(frozen=True, eq=False)
class PhiReport:
    """Outcome of max_phi: the best point found, its value, and the
    rho-certificate (negative_certified means every slice bound is <= 1e-8)."""

    best_alpha: np.ndarray
    phi_value: float
    cert_rho: tuple[float, ...]
    cert_bound: tuple[float, ...]
    negative_certified: bool

    def to_dict(self) -> dict:
        return {
            "best_alpha": self.best_alpha.tolist(),
            "phi_value": self.phi_value,
            "certificate": [[r, b] for r, b in zip(self.cert_rho, self.cert_bound)],
            "negative_certified": self.negative_certified,
        }


def max_phi(
    k: int,
    d: float,
    lam: float,
    restarts: int = 8,
    rng: RandomStream | None = None,
    cert_grid: int = 200,
) -> PhiReport:
    """Ascend Phi from structured and random starts and certify the sign.

    Starts: the flat matrix, the identity, each antidiagonal permutation mixed
    half-and-half with flat, and `restarts` random Sinkhorn points drawn from
    rng (defaults to RandomStream(0)).
    """
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    if not d >= 0.0:
        raise DomainError(f"d must be nonnegative, got {d}")
    lo = -1.0 / (k - 1)
    if not (lo <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [{lo}, 1], got {lam}")
    if restarts < 0:
        raise DomainError(f"restarts must be nonnegative, got {restarts}")
    if rng is None:
        rng = RandomStream(0)

    flat = np.full((k, k), 1.0 / k)
    starts = [flat, np.eye(k)]
    antidiag = np.eye(k)[::-1]
    for j in range(k):
        starts.append(0.5 * np.roll(antidiag, j, axis=1) + 0.5 * flat)
    # One child stream per restart, so the draw is the same whether restarts
    # run sequentially or in parallel; the max below is order-independent.
    for j in range(restarts):
        starts.append(random_doubly_stochastic(k, rng.child(j).generator()))

    best_a, best_v = None, -math.inf
    for s in starts:
        a, v, _ = ascend_phi(s, d, lam)
        if v > best_v:
            best_a, best_v = a, v

    rhos = np.linspace(1.0, float(k), cert_grid)
    bounds = tuple(one_d_bound(float(r), k, d, lam) for r in rhos)
    certified = bool(max(bounds) <= 1e-8)
    return PhiReport(
        best_alpha=best_a,
        phi_value=best_v,
        cert_rho=tuple(float(r) for r in rhos),
        cert_bound=bounds,
        negative_certified=certified,
    )


# --- exact small-n second moment ---------------------------------------------


_SECOND_MOMENT_SPACE_BUDGET = 1e8
_CHUNK = 1 << 20


def _safe_mul(a: np.ndarray, logb: float) -> np.ndarray:
    """a * logb treating 0 * (-inf) as 0."""
    if math.isinf(logb):
        return np.where(a > 0, logb, 0.0)
    return a * logb


def _safe_mul_scalar(a: float, logb: float) -> float:
    if a == 0.0:
        return 0.0
    return a * logb


def _compositions(total: int, k: int) -> np.ndarray:
    """All ordered k-tuples of nonnegative integers summing to total."""
    out = np.empty((math.comb(total + k - 1, k - 1), k), dtype=np.int64)
    for i, bars in enumerate(itertools.combinations(range(total + k - 1), k - 1)):
        prev = -1
        for j, b in enumerate(bars):
            out[i, j] = b - prev - 1
            prev = b
        out[i, k - 1] = total + k - 1 - prev - 1
    return out


def _comb2(x: np.ndarray) -> np.ndarray:
    return x * (x - 1.0) / 2.0


def _lse(a) -> float:
    """log(sum(exp(a))); plain max-shift, cheap on the small arrays used here."""
    arr = np.asarray(a, dtype=float)
    m = float(arr.max()) if arr.size else -math.inf
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.exp(arr - m).sum()))


@functools.lru_cache(maxsize=32)
def _label_block(count: int, n: int, k: int) -> np.ndarray:
    block = np.stack(np.unravel_index(np.arange(count), (k,) * n), axis=1).astype(np.int8)
    block.setflags(write=False)
    return block


def _label_chunks(count: int, n: int, k: int):
    """All k^n label vectors (n columns) in mixed-radix order, chunked."""
    if n == 0:
        yield np.zeros((count, 0), dtype=np.int8)
        return
    if count <= 1 << 16:
        # small enough to memoize; repeated per-trial enumerations hit this
        yield _label_block(count, n, k)
        return
    shape = (k,) * n
    for lo in range(0, count, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, count))
        yield np.stack(np.unravel_index(idx, shape), axis=1).astype(np.int8)


def _log_ratio_direct(g, k: int, c_in: float, c_out: float, d: float) -> float:
    """log(P(G)/Q(G)) by enumerating all k^n labelings; handles zero/full rates."""
    n, m = g.n, g.m
    pairs = n * (n - 1) // 2
    ea = g.edge_array()
    us, vs = ea[:, 0], ea[:, 1]
    log_in = math.log(c_in / n) if c_in > 0 else -math.inf
    log_nin = math.log1p(-c_in / n) if c_in < n else -math.inf
    log_out = math.log(c_out / n) if c_out > 0 else -math.inf
    log_nout = math.log1p(-c_out / n) if c_out < n else -math.inf
    log_q = _safe_mul_scalar(float(m), math.log(d / n) if d > 0 else -math.inf) + _safe_mul_scalar(
        float(pairs - m), math.log1p(-d / n) if d < n else -math.inf
    )
    pieces = []
    for batch in _label_chunks(k**n, n, k):
        rows = batch.shape[0]
        if m:
            e = (batch[:, us] == batch[:, vs]).sum(axis=1).astype(float)
        else:
            e = np.zeros(rows)
        s = np.zeros(rows)
        for r in range(k):
            cnt = (batch == r).sum(axis=1).astype(float)
            s += _comb2(cnt)
        logp = (
            _safe_mul(e, log_in)
            + _safe_mul(m - e, log_out)
            + _safe_mul(s - e, log_nin)
            + _safe_mul(pairs - s - (m - e), log_nout)
        )
        pieces.append(_lse(logp))
    return _lse(pieces) - n * math.log(k) - log_q


def _log_ratio_decomposed(
    g, k: int, c_in: float, c_out: float, d: float, shared: dict | None = None
) -> float:
    """log(P(G)/Q(G)) via the edge-support decomposition.

    P(G|sigma) depends on sigma only through the within-edge count e and the
    within-pair count s; summing over labels of vertices untouched by edges
    collapses into a table over the remaining count compositions. Requires
    all four rates strictly inside (0, n). `shared` carries the count-table
    cache across graphs with the same (k, n, rates).
    """
    n, m = g.n, g.m
    pairs = n * (n - 1) // 2
    a_coef = math.log(c_in / c_out) - math.log1p(-c_in / n) + math.log1p(-c_out / n)
    b_coef = math.log1p(-c_in / n) - math.log1p(-c_out / n)
    const = m * math.log(c_out / d) + (pairs - m) * (math.log1p(-c_out / n) - math.log1p(-d / n))

    ea = g.edge_array()
    support = np.unique(ea)
    w = int(support.size)
    pos = {int(v): i for i, v in enumerate(support)}
    iu = np.array([pos[int(u)] for u in ea[:, 0]], dtype=np.int64)
    iv = np.array([pos[int(v)] for v in ea[:, 1]], dtype=np.int64)

    rest = n - w
    comps_cache = None
    logt_cache = shared if shared is not None else {}
    enc = (n + 1) ** np.arange(k, dtype=np.int64)
    pieces = []
    for batch in _label_chunks(k**w, w, k):
        rows = batch.shape[0]
        if m:
            e = (batch[:, iu] == batch[:, iv]).sum(axis=1).astype(float)
        else:
            e = np.zeros(rows)
        counts = np.empty((rows, k), dtype=np.int64)
        for r in range(k):
            counts[:, r] = (batch == r).sum(axis=1)
        sc = np.sort(counts, axis=1)
        keys = sc @ enc
        logt = np.empty(rows)
        uniq, first = np.unique(keys, return_index=True)
        for key, idx in zip(uniq.tolist(), first.tolist()):
            got = logt_cache.get(key)
            if got is None:
                if comps_cache is None:
                    comps_cache = _compositions(rest, k)
                    log_w = gammaln(rest + 1) - gammaln(comps_cache + 1.0).sum(axis=1)
                tot = sc[idx][None, :] + comps_cache
                got = _lse(log_w + b_coef * _comb2(tot.astype(float)).sum(axis=1))
                logt_cache[key] = got
            logt[keys == key] = got
        pieces.append(_lse(a_coef * e + logt))
    return const + _lse(pieces) - n * math.log(k)


def second_moment_trials(
    k: int,
    d: float,
    lam: float,
    n: int,
    trials: int,
    rng: RandomStream,
    budget: float = _SECOND_MOMENT_SPACE_BUDGET,
) -> np.ndarray:
    """Per-trial squared likelihood ratios (P(G)/Q(G))^2 for G ~ Q = G(n, d/n).

    P(G) = k^-n sum_sigma P(G|sigma) is computed exactly per graph. Trial t
    draws from rng.child(t), so results are independent of execution order.
    """
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    if float(k) ** n > budget:
        raise BudgetError(f"k^n = {k}^{n} exceeds the enumeration budget {budget:g}")
    if not d >= 0.0:
        raise DomainError(f"d must be nonnegative, got {d}")
    if d == 0.0:
        # both laws are the point mass on the empty graph
        return np.ones(int(trials))
    p = from_d_lambda(k, int(n), d, lam)
    c_in, c_out = p.c_in, p.c_out
    if c_in == c_out:
        return np.ones(int(trials))
    interior = 0.0 < c_in < n and 0.0 < c_out < n
    shared: dict = {}
    out = np.empty(int(trials))
    for t in range(int(trials)):
        g = sample_er(int(n), d, rng.child(t))
        if interior:
            lr = _log_ratio_decomposed(g, k, c_in, c_out, d, shared)
        else:
            lr = _log_ratio_direct(g, k, c_in, c_out, d)
        out[t] = math.exp(2.0 * lr) if lr > -math.inf else 0.0
    return out


def second_moment_estimate(
    k: int,
    d: float,
    lam: float,
    n: int,
    trials: int,
    rng: RandomStream,
    budget: float = _SECOND_MOMENT_SPACE_BUDGET,
) -> float:
    """Monte Carlo estimate of E_Q (P/Q)^2 with the exact per-graph ratio."""
    return float(second_moment_trials(k, d, lam, n, trials, rng, budget).mean())
