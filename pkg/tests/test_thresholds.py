"""Detectability bounds: first-moment upper bound, coloring specialization,
information-theoretic lower bound, Kesten-Stigum, and the derived roots."""

import math

import numpy as np
import pytest

from sbmbounds.errors import DomainError, NoCrossingError
from sbmbounds.thresholds import (
    bound_ratio_mu,
    coloring_dc_upper,
    dc_lower,
    dc_upper,
    effective_coloring_degree,
    kesten_stigum,
    lambda_star,
    min_overlap_beta,
    threshold_report,
)


def _rhs_overlap(beta: float, k: int, lam: float) -> float:
    """Right-hand side of the minimum-overlap equation, written independently:
    2k (h(beta) + (1-beta) log(k-1)) over the relative-entropy denominator."""
    h = 0.0
    if 0.0 < beta < 1.0:
        h = -beta * math.log(beta) - (1 - beta) * math.log(1 - beta)
    num = 2 * k * (h + (1 - beta) * math.log(k - 1))
    a = 1 + (k - 1) * lam
    b = 1 + (k * beta - 1) * lam
    c = (k - 1) * (1 - lam)
    e = k - 1 - (k * beta - 1) * lam
    den = 0.0
    if a > 0:
        den += a * math.log(a / b)
    if c > 0:
        den += c * math.log(c / e)
    return num / den


def test_kesten_stigum():
    assert kesten_stigum(-0.25) == 16.0
    assert kesten_stigum(1.0) == 1.0
    assert kesten_stigum(0.0) == math.inf
    # planted coloring: 1/lambda^2 = (k-1)^2
    assert kesten_stigum(-1.0 / 4.0) == (5 - 1) ** 2


def test_dc_upper_hand_values():
    # coloring endpoint at k=5 collapses to 2 log 5 / (-log(4/5))
    want = 2.0 * math.log(5.0) / -math.log(4.0 / 5.0)
    assert dc_upper(5, -0.25) == pytest.approx(want, rel=1e-14)
    assert dc_upper(5, -0.25) == pytest.approx(14.42513487802156, abs=1e-11)
    for k in (2, 3, 10, 100):
        assert dc_upper(k, 1.0) == pytest.approx(2.0, rel=1e-14)
        assert dc_upper(k, 0.0) == math.inf
    with pytest.raises(DomainError):
        dc_upper(5, -0.3)
    with pytest.raises(DomainError):
        dc_upper(5, 1.1)


def test_coloring_dc_upper():
    assert coloring_dc_upper(2) == pytest.approx(2.0, rel=1e-14)
    assert coloring_dc_upper(5) == pytest.approx(14.42513487802156, abs=1e-11)
    for k in (2, 3, 7, 50, 1000, 10_000):
        assert coloring_dc_upper(k) == pytest.approx(dc_upper(k, -1.0 / (k - 1)), rel=1e-10)
        assert coloring_dc_upper(k) < 2 * k * math.log(k) or k == 2
    assert coloring_dc_upper(2) < 2 * 2 * math.log(2)


def test_dc_lower_hand_values():
    for lam in (0.5, -0.3, 1.0):
        assert dc_lower(2, lam) == 0.0
    assert dc_lower(5, -0.25) == pytest.approx(8.0 * math.log(4.0), rel=1e-14)
    assert dc_lower(5, -0.25) == pytest.approx(11.090354888959125, abs=1e-11)
    assert dc_lower(3, 0.5) == pytest.approx(4.0 * math.log(2.0), rel=1e-14)
    assert dc_lower(3, 0.0) == math.inf


def test_theorem_ordering_lower_below_upper():
    for k in (3, 4, 5, 8, 16, 100, 1000, 10_000):
        lo = -1.0 / (k - 1)
        for lam in np.linspace(lo, 1.0, 100):
            if lam == 0.0:
                continue
            assert dc_lower(k, float(lam)) <= dc_upper(k, float(lam)) * (1 + 1e-12)


def test_lambda_star_roots():
    ls5 = lambda_star(5)
    assert ls5 == pytest.approx(-0.239, abs=2e-3)
    # the root really solves dc_upper = 1/lambda^2
    assert dc_upper(5, ls5) == pytest.approx(1.0 / ls5**2, rel=1e-6)
    assert lambda_star(11) == pytest.approx(0.014, abs=2e-3)
    assert lambda_star(1000) == pytest.approx(0.372, abs=2e-3)
    for k in (2, 3, 4):
        with pytest.raises(NoCrossingError):
            lambda_star(k)


def test_lambda_star_monotone_in_k():
    ks = [5, 6, 7, 8, 9, 10, 11, 15, 20, 50, 100, 1000, 10_000]
    vals = [lambda_star(k) for k in ks]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    # and detectability holds strictly below the root
    assert dc_upper(5, -0.25) < kesten_stigum(-0.25)


def test_min_overlap_beta():
    # beta -> 1/k as d -> dc_upper from above
    for k, lam in ((2, 0.9), (5, -0.25), (3, 0.5)):
        dc = dc_upper(k, lam)
        assert min_overlap_beta(k, lam, dc * (1 + 1e-9)) == pytest.approx(1.0 / k, abs=1e-4)
    # bisection root reproduces d when substituted back
    beta = min_overlap_beta(2, 0.9, 20.0)
    assert _rhs_overlap(beta, 2, 0.9) == pytest.approx(20.0, abs=1e-6)
    assert min_overlap_beta(2, 0.9, 8.0) == pytest.approx(0.7968019265582469, abs=1e-9)
    with pytest.raises(DomainError):
        min_overlap_beta(2, 0.9, 1.0)  # below dc_upper


def test_min_overlap_rhs_matches_dc_upper_at_chance():
    for k, lam in ((2, 0.9), (3, 0.5), (5, -0.25), (7, -0.1), (4, 0.3)):
        assert _rhs_overlap(1.0 / k, k, lam) == pytest.approx(dc_upper(k, lam), rel=1e-10)


def test_min_overlap_beta_monotone_in_d():
    for k, lam in ((2, 0.9), (3, 0.5)):
        dc = dc_upper(k, lam)
        vals = [min_overlap_beta(k, lam, d) for d in np.linspace(dc * 1.001, dc * 8, 25)]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_effective_coloring_degree():
    for k in (3, 5, 9):
        assert effective_coloring_degree(7.5, k, -1.0 / (k - 1)) == pytest.approx(7.5, rel=1e-14)
        assert effective_coloring_degree(7.5, k, 0.0) == 0.0
        for lam in (0.4, -0.5 / (k - 1), 1.0):
            d = dc_lower(k, lam)
            want = 2 * (k - 1) * math.log(k - 1)
            assert effective_coloring_degree(d, k, lam) == pytest.approx(want, abs=1e-10)


def test_bound_ratio_mu():
    assert bound_ratio_mu(-1.0) == pytest.approx(1.0, abs=1e-12)
    assert bound_ratio_mu(0.0) == 2.0
    assert bound_ratio_mu(1.0) == pytest.approx(1.0 / (2.0 * math.log(2.0) - 1.0), rel=1e-14)
    assert bound_ratio_mu(1.0) == pytest.approx(2.5886994495620903, abs=1e-12)
    with pytest.raises(DomainError):
        bound_ratio_mu(-1.5)


def test_asymptotic_regimes():
    # large-k assortative: dc_upper -> 2/lambda, with a log k correction of
    # [lam log lam + (1-lam) log(1-lam)] / (lam log k); at lambda=0.3 that is
    # -0.61/(0.3 log k), so the deviation is 0.173 at k=1e6 and only crosses
    # 0.1 around k~1e10
    devs = [abs(dc_upper(k, 0.3) * 0.3 / 2.0 - 1.0) for k in (10**3, 10**6, 10**9, 10**12)]
    assert all(a > b for a, b in zip(devs, devs[1:]))
    assert devs[1] == pytest.approx(0.1728605916753845, abs=1e-9)
    assert devs[-1] < 0.1
    # small lambda: upper/lower ratio near 2
    ratio = dc_upper(10, 1e-3) / dc_lower(10, 1e-3)
    assert 1.8 <= ratio <= 2.3


def test_threshold_report_flags():
    rep = threshold_report(5, -0.25)
    assert rep.below_ks_detectable
    assert rep.d_lower == pytest.approx(11.090354888959125, abs=1e-11)
    assert rep.d_ks == 16.0
    assert rep.d_upper == pytest.approx(14.42513487802156, abs=1e-11)
    assert not threshold_report(5, -0.2).below_ks_detectable
    for lam in (-1.0 / 3.0, -0.1, 0.0, 0.3, 1.0):
        assert not threshold_report(4, lam).below_ks_detectable
    flat = threshold_report(3, 0.0)
    assert flat.d_ks == math.inf and flat.d_upper == math.inf
    assert not flat.below_ks_detectable
