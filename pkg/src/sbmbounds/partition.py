"""Partitions, overlap statistics, and the good-partition test.

A partition assigns each of n vertices one of k group labels; "balanced"
means every group has exactly n/k vertices. The overlap matrix of two
balanced partitions is alpha_rs = (k/n) |sigma^-1(r) cap tau^-1(s)|, doubly
stochastic, and the scalar overlap is the best trace alignment
beta = (1/k) max_pi sum_r alpha_{r, pi(r)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import gammaln

from .errors import BudgetError, DomainError
from .graphgen import Graph
from .params import ModelParams

_ENUM_CACHE: dict[tuple[int, int], np.ndarray] = {}
_ENUM_CACHE_ROWS = 300_000


@dataclass(frozen=True)
class Partition:
    """Group assignment: labels[v] in [0, k) for each vertex v."""

    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        for x in self.labels:
            if not (0 <= x < self.k):
                raise DomainError(f"label {x} outside [0, {self.k})")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def balanced(self) -> bool:
        if self.n % self.k != 0:
            return False
        counts = np.bincount(self.label_array(), minlength=self.k)
        return bool(np.all(counts == self.n // self.k))

    def label_array(self) -> np.ndarray:
        return np.array(self.labels, dtype=np.int64)


@dataclass(frozen=True)
class EdgeCounts:
    m: int
    m_in: int
    m_out: int


def edge_counts(g: Graph, tau: Partition) -> EdgeCounts:
    """Within/between edge counts of g under tau."""
    if tau.n != g.n:
        raise DomainError(f"partition has {tau.n} labels for a graph on {g.n} vertices")
    ea = g.edge_array()
    labels = tau.label_array()
    m_in = int(np.count_nonzero(labels[ea[:, 0]] == labels[ea[:, 1]])) if g.m else 0
    return EdgeCounts(m=g.m, m_in=m_in, m_out=g.m - m_in)


def expected_counts(p: ModelParams) -> tuple[float, float]:
    """(m_in_bar, m_out_bar) = (c_in n / 2k, (k-1) c_out n / 2k)."""
    return p.c_in * p.n / (2 * p.k), (p.k - 1) * p.c_out * p.n / (2 * p.k)


def is_good(g: Graph, tau: Partition, p: ModelParams) -> bool:
    """True when both edge counts sit within n^(2/3) of their expectations.

    tau must be balanced; the window is the real number n**(2/3) and the
    comparison is strict.
    """
    if not tau.balanced:
        raise DomainError("is_good requires a balanced partition")
    if g.n != p.n:
        raise DomainError(f"graph has n={g.n} but params have n={p.n}")
    c = edge_counts(g, tau)
    mbar_in, mbar_out = expected_counts(p)
    thr = float(g.n) ** (2.0 / 3.0)
    return abs(c.m_in - mbar_in) < thr and abs(c.m_out - mbar_out) < thr


def balance(tau: Partition) -> Partition:
    """Deterministically rebalance: while some group is over-full, move the
    highest-index vertex of the smallest-index over-full group into the
    smallest-index under-full group."""
    if tau.n % tau.k != 0:
        raise DomainError(f"cannot balance n={tau.n} vertices into k={tau.k} groups")
    target = tau.n // tau.k
    labels = tau.label_array()
    counts = np.bincount(labels, minlength=tau.k)
    while True:
        over = np.flatnonzero(counts > target)
        if over.size == 0:
            break
        r = int(over[0])
        s = int(np.flatnonzero(counts < target)[0])
        v = int(np.flatnonzero(labels == r)[-1])
        labels[v] = s
        counts[r] -= 1
        counts[s] += 1
    return Partition(labels=tuple(labels.tolist()), k=tau.k)


def overlap_matrix(sigma: Partition, tau: Partition) -> np.ndarray:
    """alpha_rs = (k/n) |sigma^-1(r) cap tau^-1(s)|; doubly stochastic when
    both partitions are balanced."""
    if sigma.n != tau.n or sigma.k != tau.k:
        raise DomainError("partitions must share n and k")
    k, n = sigma.k, sigma.n
    joint = np.bincount(sigma.label_array() * k + tau.label_array(), minlength=k * k)
    return joint.reshape(k, k) * (k / n)


def overlap(sigma: Partition, tau: Partition) -> float:
    """beta = (1/k) max over permutations pi of Tr(pi alpha); exact via the
    assignment problem."""
    if not (sigma.balanced and tau.balanced):
        raise DomainError("overlap requires balanced partitions")
    alpha = overlap_matrix(sigma, tau)
    rows, cols = linear_sum_assignment(-alpha)
    return float(alpha[rows, cols].sum() / sigma.k)


def frobenius_sq(alpha) -> float:
    """rho = |alpha|_F^2; ranges over [1, k] for doubly stochastic alpha."""
    a = np.asarray(alpha, dtype=float)
    return float(np.sum(a * a))


def _check_doubly_stochastic(alpha, tol=1e-9) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"alpha must be square, got shape {a.shape}")
    if np.min(a) < -tol:
        raise DomainError("alpha has negative entries")
    if np.max(np.abs(a.sum(axis=0) - 1.0)) > tol or np.max(np.abs(a.sum(axis=1) - 1.0)) > tol:
        raise DomainError("alpha is not doubly stochastic")
    return a


def within_prob(alpha, lam: float, k: int) -> float:
    """Probability that an edge conditioned on both partitions lands within a
    group: q = (1 + (rho - 1) lambda) / k at rho = |alpha|_F^2."""
    a = _check_doubly_stochastic(alpha)
    if a.shape[0] != k:
        raise DomainError(f"alpha is {a.shape[0]}x{a.shape[0]} but k={k}")
    rho = frobenius_sq(a)
    return (1.0 + (rho - 1.0) * lam) / k


def count_with_overlap(alpha, n: int, k: int) -> float:
    """log of the number of balanced partitions tau with overlap matrix alpha
    against a fixed balanced sigma: log prod_r (n/k)! / prod_s (alpha_rs n/k)!."""
    a = _check_doubly_stochastic(alpha)
    if a.shape[0] != k:
        raise DomainError(f"alpha is {a.shape[0]}x{a.shape[0]} but k={k}")
    if n % k != 0:
        raise DomainError(f"k={k} must divide n={n}")
    cells = a * (n / k)
    rounded = np.rint(cells)
    if np.max(np.abs(cells - rounded)) > 1e-9:
        raise DomainError("alpha n/k must have integer cells")
    return float(k * gammaln(n / k + 1) - gammaln(rounded + 1.0).sum())


# --- exhaustive search over balanced partitions ----------------------------


def _next_multiset_perm(a: list[int]) -> bool:
    """Advance a to its lexicographic successor permutation; False at the end."""
    i = len(a) - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(a) - 1
    while a[j] <= a[i]:
        j -= 1
    a[i], a[j] = a[j], a[i]
    a[i + 1 :] = a[: i : -1]
    return True


def _balanced_partition_count(n: int, k: int) -> int:
    return math.factorial(n) // math.factorial(n // k) ** k


def _iter_balanced_labelings(n: int, k: int, chunk: int = 65536):
    """Yield (rows, n) int8 arrays covering all balanced labelings in
    lexicographic order; small spaces are materialized once and cached."""
    if k > 127:
        raise DomainError("label enumeration supports k <= 127")
    key = (n, k)
    total = _balanced_partition_count(n, k)
    if total <= _ENUM_CACHE_ROWS:
        mat = _ENUM_CACHE.get(key)
        if mat is None:
            mat = np.empty((total, n), dtype=np.int8)
            a = [r for r in range(k) for _ in range(n // k)]
            idx = 0
            while True:
                mat[idx] = a
                idx += 1
                if not _next_multiset_perm(a):
                    break
            _ENUM_CACHE[key] = mat
        yield mat
        return
    a = [r for r in range(k) for _ in range(n // k)]
    buf = np.empty((chunk, n), dtype=np.int8)
    fill = 0
    while True:
        buf[fill] = a
        fill += 1
        if fill == chunk:
            yield buf
            fill = 0
        if not _next_multiset_perm(a):
            break
    if fill:
        yield buf[:fill]


def exhaustive_detect(g: Graph, p: ModelParams, budget: float = 1e9) -> Partition | None:
    """First balanced partition (lexicographic order) that is good for g,
    or None when none exists.

    Refuses to enumerate when k^n exceeds budget; raise the budget explicitly
    for larger instances.
    """
    n, k = g.n, p.k
    if p.n != n:
        raise DomainError(f"graph has n={n} but params have n={p.n}")
    if n % k != 0:
        raise DomainError(f"k={k} must divide n={n}")
    if float(k) ** n > float(budget):
        raise BudgetError(f"k^n = {k}^{n} exceeds enumeration budget {budget:g}")
    mbar_in, mbar_out = expected_counts(p)
    thr = float(n) ** (2.0 / 3.0)
    ea = g.edge_array()
    us, vs = ea[:, 0], ea[:, 1]
    m = g.m
    for batch in _iter_balanced_labelings(n, k):
        if m:
            m_in = (batch[:, us] == batch[:, vs]).sum(axis=1)
        else:
            m_in = np.zeros(batch.shape[0], dtype=np.int64)
        good = (np.abs(m_in - mbar_in) < thr) & (np.abs((m - m_in) - mbar_out) < thr)
        hits = np.flatnonzero(good)
        if hits.size:
            return Partition(labels=tuple(batch[hits[0]].tolist()), k=k)
    return None
