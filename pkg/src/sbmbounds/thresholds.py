"""Closed-form and root-found bounds on the detectability threshold.

Everything here is a function of (k, lambda) alone. dc_upper is the
first-moment bound 2 k log k / D(lambda) with

    D(lambda) = (1+(k-1)lambda) log(1+(k-1)lambda) + (k-1)(1-lambda) log(1-lambda),

dc_lower is the second-moment bound (2 log(k-1) / (k-1)) / lambda^2, and
kesten_stigum is 1/lambda^2. Infinities are first-class values (lambda = 0),
never errors, so parameter sweeps do not abort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoCrossingError


def _check_k(k) -> int:
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    return k


def _check_lambda(k: int, lam: float) -> float:
    lo = -1.0 / (k - 1)
    if not (lo <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [{lo}, 1] for k={k}, got {lam}")
    return float(lam)


def _xlogx(v: float) -> float:
    return v * math.log(v) if v > 0.0 else 0.0


def _divergence(k: int, lam: float) -> float:
    """D(lambda); log1p keeps both factors accurate near the endpoints."""
    x = (k - 1.0) * lam
    first = (1.0 + x) * math.log1p(x) if 1.0 + x > 0.0 else 0.0
    second = (k - 1.0) * (1.0 - lam) * math.log1p(-lam) if 1.0 - lam > 0.0 else 0.0
    return first + second


def kesten_stigum(lam: float) -> float:
    """d_KS = 1 / lambda^2; +inf at lambda = 0."""
    if not (-1.0 <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [-1, 1], got {lam}")
    if lam == 0.0:
        return math.inf
    return 1.0 / (lam * lam)


def dc_upper(k: int, lam: float) -> float:
    """First-moment upper bound 2 k log k / D(lambda); +inf at lambda = 0."""
    k = _check_k(k)
    lam = _check_lambda(k, lam)
    if lam == 0.0:
        return math.inf
    den = _divergence(k, lam)
    if den <= 0.0:
        return math.inf
    return 2.0 * k * math.log(k) / den


def coloring_dc_upper(k: int) -> float:
    """dc_upper specialized to the coloring point lambda = -1/(k-1):
    2 log k / (-log(1 - 1/k))."""
    k = _check_k(k)
    return 2.0 * math.log(k) / (-math.log1p(-1.0 / k))


def dc_lower(k: int, lam: float) -> float:
    """Second-moment lower bound (2 log(k-1) / (k-1)) / lambda^2.

    Zero for k = 2 (log(k-1) = 0) and +inf at lambda = 0.
    """
    k = _check_k(k)
    lam = _check_lambda(k, lam)
    if k == 2:
        return 0.0
    if lam == 0.0:
        return math.inf
    return (2.0 * math.log(k - 1.0) / (k - 1.0)) / (lam * lam)


def effective_coloring_degree(d: float, k: int, lam: float) -> float:
    """Degree of the reduced coloring instance: d' = d lambda^2 (k-1)^2."""
    k = _check_k(k)
    lam = _check_lambda(k, lam)
    if not d >= 0.0:
        raise DomainError(f"d must be nonnegative, got {d}")
    return d * lam * lam * (k - 1.0) ** 2


def bound_ratio_mu(mu: float) -> float:
    """Ratio mu^2 / ((1+mu) log(1+mu) - mu) controlling how far the first
    moment overshoots; 2 at the removable singularity mu = 0, 1 at mu = -1."""
    if not mu >= -1.0:
        raise DomainError(f"mu must be >= -1, got {mu}")
    if mu == 0.0:
        return 2.0
    den = _xlogx(1.0 + mu) - mu
    return mu * mu / den


def _ks_gap(k: int, lam: float) -> float:
    """Sign of D(lambda) - 2 k log k lambda^2: positive where the first-moment
    bound sits below Kesten-Stigum (detectability strictly below KS)."""
    return _divergence(k, lam) - 2.0 * k * math.log(k) * lam * lam


def lambda_star(k: int, tol: float = 1e-12) -> float:
    """The crossing point where dc_upper(k, lambda) = 1/lambda^2.

    Bisection runs on D(lambda) - 2 k log k lambda^2, which is finite and
    single-crossing on the bracket, avoiding the 0/0 at lambda = 0. For
    k <= 4 the sign never changes and NoCrossingError is raised.
    """
    k = _check_k(k)
    a = -1.0 / (k - 1) + 1e-12
    b = 1.0 - 1e-12
    fa, fb = _ks_gap(k, a), _ks_gap(k, b)
    if not (fa > 0.0 and fb < 0.0):
        raise NoCrossingError(
            f"dc_upper never crosses Kesten-Stigum on ({a:.6g}, {b:.6g}) for k={k}"
        )
    while b - a > tol:
        mid = 0.5 * (a + b)
        if mid == 0.0:
            # s(0) = 0 identically; never test the tangential point itself
            mid = 0.25 * a + 0.75 * b
        if _ks_gap(k, mid) > 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _xlogratio(x: float, y: float) -> float:
    """x log(x/y) with the x -> 0 convention; y must be positive when x > 0."""
    if x <= 0.0:
        return 0.0
    return x * math.log(x / y)


def _overlap_parts(k: int, lam: float, beta: float) -> tuple[float, float]:
    """(numerator, denominator) of the degree condition at overlap beta.

    The ratio is increasing in beta, equals dc_upper at beta = 1/k, and
    diverges as beta -> 1; near that end the denominator is an O((1-beta)^2)
    difference of O(1-beta) terms, so callers that only need a sign should
    compare num - d * den instead of dividing.
    """
    num = 2.0 * k * (-_xlogx(beta) - _xlogx(1.0 - beta) + (1.0 - beta) * math.log(k - 1.0))
    x = k * beta - 1.0
    den = _xlogratio(1.0 + (k - 1.0) * lam, 1.0 + x * lam) + _xlogratio(
        (k - 1.0) * (1.0 - lam), (k - 1.0) - x * lam
    )
    return num, den


def _overlap_rhs(k: int, lam: float, beta: float) -> float:
    num, den = _overlap_parts(k, lam, beta)
    return num / den


def min_overlap_beta(k: int, lam: float, d: float, tol: float = 1e-13) -> float:
    """Smallest overlap beta guaranteed for good partitions at degree d.

    Requires d > dc_upper(k, lambda); bisection on the sign of
    num(beta) - d * den(beta) over beta in (1/k, 1).
    """
    k = _check_k(k)
    lam = _check_lambda(k, lam)
    dc = dc_upper(k, lam)
    if not d > dc:
        raise DomainError(f"d={d} must exceed dc_upper={dc}")

    def gap(beta: float) -> float:
        num, den = _overlap_parts(k, lam, beta)
        return num - d * den

    a = 1.0 / k + 1e-13
    b = 1.0 - 1e-12
    if gap(a) >= 0.0:
        return 1.0 / k
    if gap(b) <= 0.0:
        raise DomainError(f"d={d} beyond the representable overlap range")
    while b - a > tol:
        mid = 0.5 * (a + b)
        if gap(mid) < 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


@dataclass(frozen=True)
class ThresholdReport:
    k: int
    lam: float
    d_lower: float
    d_ks: float
    d_upper: float
    below_ks_detectable: bool

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "lambda": self.lam,
            "d_lower": self.d_lower,
            "d_ks": self.d_ks,
            "d_upper": self.d_upper,
            "below_ks_detectable": self.below_ks_detectable,
        }


def threshold_report(k: int, lam: float) -> ThresholdReport:
    """All three bounds at (k, lambda), plus whether the first-moment bound
    certifies detectability strictly below Kesten-Stigum."""
    k = _check_k(k)
    lam = _check_lambda(k, lam)
    up = dc_upper(k, lam)
    ks = kesten_stigum(lam)
    return ThresholdReport(
        k=k,
        lam=lam,
        d_lower=dc_lower(k, lam),
        d_ks=ks,
        d_upper=up,
        below_ks_detectable=bool(lam != 0.0 and _ks_gap(k, lam) > 0.0),
    )
