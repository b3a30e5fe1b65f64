"""Graph sampling for the block model and its Erdos-Renyi null.

All samplers are pure functions of (parameters, RandomStream): the stream is
turned into a fresh Philox generator on entry, so the same (seed, stream_id)
always reproduces the same graph regardless of what the caller did before.
Distinct draws therefore need distinct streams; use RandomStream.child.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, SamplingError
from .params import ModelParams, average_degree, connectivity_matrix

_MASK64 = (1 << 64) - 1
REJECTION_BUDGET = 10**6


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RandomStream:
    """Splittable counter-based randomness source.

    (seed, stream_id) keys a Philox generator; identical pairs yield identical
    sequences, distinct pairs are statistically independent. child(i) derives
    a new stream deterministically, so trial-level parallelism cannot change
    what any particular trial sees.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RandomStream":
        mixed = _splitmix64((self.stream_id & _MASK64) ^ _splitmix64((index + 1) & _MASK64))
        return RandomStream(seed=self.seed, stream_id=mixed)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: edges are (u, v) with u < v, sorted, no repeats."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev = (-1, -1)
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise DomainError(f"edge ({u}, {v}) invalid for n={self.n}")
            if (u, v) <= prev:
                raise DomainError(f"edges not strictly sorted at ({u}, {v})")
            prev = (u, v)

    @property
    def m(self) -> int:
        return len(self.edges)

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "Graph":
        """Normalize arbitrary (u, v) pairs: orient u < v and sort."""
        canon = sorted((min(u, v), max(u, v)) for u, v in pairs)
        return cls(n=n, edges=tuple(canon))

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int array (empty shape (0, 2))."""
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)


def _graph_from_mask(n: int, us: np.ndarray, vs: np.ndarray, keep: np.ndarray) -> Graph:
    pairs = zip(us[keep].tolist(), vs[keep].tolist())
    return Graph(n=n, edges=tuple((u, v) for u, v in pairs))


@lru_cache(maxsize=8)
def _pair_indices(n: int):
    # row-major upper triangle: (0,1), (0,2), ..., (n-2, n-1)
    return np.triu_indices(n, k=1)


def sample_sbm(p: ModelParams, sigma, rng: RandomStream) -> Graph:
    """Sample G conditioned on the group assignment sigma."""
    labels = np.asarray(sigma, dtype=np.int64)
    if labels.shape != (p.n,):
        raise DomainError(f"sigma must have length n={p.n}, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= p.k):
        raise DomainError(f"labels must lie in [0, {p.k})")
    gen = rng.generator()
    return _sample_edges(p, labels, gen)


def _sample_edges(p: ModelParams, labels: np.ndarray, gen: np.random.Generator) -> Graph:
    us, vs = _pair_indices(p.n)
    same = labels[us] == labels[vs]
    prob = np.where(same, p.c_in / p.n, p.c_out / p.n)
    keep = gen.random(us.shape[0]) < prob
    return _graph_from_mask(p.n, us, vs, keep)


def sample_planted(p: ModelParams, rng: RandomStream):
    """Draw sigma uniformly from [k]^n, then G | sigma. Returns (sigma, Graph)."""
    gen = rng.generator()
    labels = gen.integers(0, p.k, size=p.n)
    return labels.copy(), _sample_edges(p, labels, gen)


def sample_er(n: int, d: float, rng: RandomStream) -> Graph:
    """Erdos-Renyi G(n, d/n)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not (0.0 <= d <= n):
        raise DomainError(f"edge probability d/n must lie in [0, 1], got d={d}, n={n}")
    us, vs = _pair_indices(int(n))
    gen = rng.generator()
    keep = gen.random(us.shape[0]) < (d / n)
    return _graph_from_mask(int(n), us, vs, keep)


def _simple_from_endpoints(n: int, ue: np.ndarray, ve: np.ndarray):
    """Canonicalize m ordered endpoint pairs; None unless they form a simple graph."""
    if np.any(ue == ve):
        return None
    a = np.minimum(ue, ve)
    b = np.maximum(ue, ve)
    keys = a * n + b
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    if np.any(sk[1:] == sk[:-1]):
        return None
    return a[order], b[order]


def _er_fixed_m_attempt(n: int, m: int, gen: np.random.Generator):
    pairs = gen.integers(0, n, size=(m, 2))
    return _simple_from_endpoints(n, pairs[:, 0], pairs[:, 1])


def sample_er_fixed_m(n: int, m: int, rng: RandomStream) -> Graph:
    """Uniform simple graph with exactly m edges, by whole-graph rejection.

    Each attempt draws m ordered pairs uniformly from [n]^2 with replacement
    and is rejected in full on any loop or repeated pair; conditioned on
    acceptance the edge set is uniform over simple m-edge graphs.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m!r}")
    if m > n * (n - 1) // 2:
        raise DomainError(f"no simple graph on {n} vertices has {m} edges")
    gen = rng.generator()
    for _ in range(REJECTION_BUDGET):
        hit = _er_fixed_m_attempt(int(n), int(m), gen)
        if hit is not None:
            a, b = hit
            return Graph(n=int(n), edges=tuple(zip(a.tolist(), b.tolist())))
    raise SamplingError(f"no simple graph accepted in {REJECTION_BUDGET} attempts (n={n}, m={m})")


def sample_sbm_fixed_m(p: ModelParams, sigma, m: int, rng: RandomStream) -> Graph:
    """Block-model analogue of sample_er_fixed_m for balanced sigma.

    Each of the m edges picks an ordered group pair (r, s) with probability
    gamma_rs / k, then uniform endpoints within the groups (with replacement
    when r = s); the whole draw is rejected unless the result is simple.
    """
    labels = np.asarray(sigma, dtype=np.int64)
    if labels.shape != (p.n,):
        raise DomainError(f"sigma must have length n={p.n}")
    if p.n % p.k != 0:
        raise DomainError(f"balanced sigma needs k | n, got n={p.n}, k={p.k}")
    size = p.n // p.k
    counts = np.bincount(labels, minlength=p.k)
    if counts.shape[0] > p.k or np.any(counts != size):
        raise DomainError("sigma is not balanced")
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m!r}")

    gamma = connectivity_matrix(p)
    probs = (gamma / p.k).reshape(-1)
    members = np.empty((p.k, size), dtype=np.int64)
    for r in range(p.k):
        members[r] = np.flatnonzero(labels == r)

    gen = rng.generator()
    for _ in range(REJECTION_BUDGET):
        cells = gen.choice(p.k * p.k, size=m, p=probs)
        upos = gen.integers(0, size, size=m)
        vpos = gen.integers(0, size, size=m)
        ue = members[cells // p.k, upos]
        ve = members[cells % p.k, vpos]
        hit = _simple_from_endpoints(p.n, ue, ve)
        if hit is not None:
            a, b = hit
            return Graph(n=p.n, edges=tuple(zip(a.tolist(), b.tolist())))
    raise SamplingError(f"no simple graph accepted in {REJECTION_BUDGET} attempts (n={p.n}, m={m})")


# --- file formats ---------------------------------------------------------
#
# Edge list: first line "n m", then one "u v" line per edge, ascending.
# Partition sidecar: n lines, one group label per line.


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise DomainError("empty edge-list file")
    head = rows[0].split()
    if len(head) != 2:
        raise DomainError(f"bad header {rows[0]!r}, expected 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(rows) - 1 != m:
        raise DomainError(f"header says m={m} but file has {len(rows) - 1} edge lines")
    pairs = []
    for ln in rows[1:]:
        u, v = ln.split()
        pairs.append((int(u), int(v)))
    return Graph.from_pairs(n, pairs)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def format_partition(labels) -> str:
    return "\n".join(str(int(x)) for x in labels) + "\n"


def parse_partition(text: str) -> np.ndarray:
    vals = [int(ln) for ln in text.splitlines() if ln.strip()]
    return np.array(vals, dtype=np.int64)


def write_partition(labels, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_partition(labels))


def read_partition(path) -> np.ndarray:
    with open(path) as fh:
        return parse_partition(fh.read())
