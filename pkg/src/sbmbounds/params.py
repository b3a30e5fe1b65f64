"""Parametrization of the two-rate stochastic block model.

A model is (k, n, c_in, c_out): k groups on n vertices, within-group edge
probability c_in/n, between-group probability c_out/n. The equivalent
(d, lambda) coordinates are the mean degree and the second eigenvalue of the
normalized connectivity matrix gamma = c/(kd); lambda lives in
[-1/(k-1), 1], negative in the disassortative regime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ModelParams:
    """Immutable block-model parameters; invariants checked at construction."""

    k: int
    n: int
    c_in: float
    c_out: float

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 2:
            raise DomainError(f"k must be an integer >= 2, got {self.k!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c_in", float(self.c_in))
        object.__setattr__(self, "c_out", float(self.c_out))
        if not (self.c_in >= 0.0 and self.c_out >= 0.0):
            raise DomainError(f"rates must be nonnegative, got c_in={self.c_in}, c_out={self.c_out}")
        if self.c_in > self.n or self.c_out > self.n:
            raise DomainError(
                f"edge probability exceeds 1: c_in={self.c_in}, c_out={self.c_out}, n={self.n}"
            )

    @property
    def d(self) -> float:
        return average_degree(self)

    @property
    def lam(self) -> float:
        return second_eigenvalue(self)

    def to_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "c_in": self.c_in, "c_out": self.c_out}


def average_degree(p: ModelParams) -> float:
    """Mean degree d = (c_in + (k-1) c_out) / k."""
    return (p.c_in + (p.k - 1) * p.c_out) / p.k


def second_eigenvalue(p: ModelParams) -> float:
    """lambda = (c_in - c_out) / (k d); requires d > 0."""
    d = average_degree(p)
    if d == 0.0:
        raise DomainError("degenerate model: average degree is 0, lambda undefined")
    return (p.c_in - p.c_out) / (p.k * d)


def from_d_lambda(k: int, n: int, d: float, lam: float) -> ModelParams:
    """Build ModelParams from (d, lambda): c_in = d(1+(k-1)lambda), c_out = d(1-lambda)."""
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    if not d > 0.0:
        raise DomainError(f"d must be positive, got {d}")
    lo = -1.0 / (k - 1)
    if not (lo <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [{lo}, 1], got {lam}")
    c_in = d * (1.0 + (k - 1) * lam)
    c_out = d * (1.0 - lam)
    # rounding at the coloring endpoint can leave c_in at -1e-16 * d
    if c_in < 0.0:
        c_in = 0.0
    if c_out < 0.0:
        c_out = 0.0
    return ModelParams(k=int(k), n=n, c_in=c_in, c_out=c_out)


def connectivity_matrix(p: ModelParams) -> np.ndarray:
    """Normalized connectivity gamma = c / (k d), doubly stochastic with
    second eigenvalue lambda: gamma = lambda I + (1 - lambda) J/k."""
    d = average_degree(p)
    if d == 0.0:
        raise DomainError("degenerate model: average degree is 0")
    g = np.full((p.k, p.k), p.c_out / (p.k * d))
    np.fill_diagonal(g, p.c_in / (p.k * d))
    return g


def params_from_dict(obj: dict) -> ModelParams:
    """Parse {"k","n"} plus exactly one of {"c_in","c_out"} or {"d","lambda"}."""
    if "k" not in obj or "n" not in obj:
        raise DomainError("params require both 'k' and 'n'")
    has_c = obj.get("c_in") is not None or obj.get("c_out") is not None
    has_dl = obj.get("d") is not None or obj.get("lambda") is not None
    if has_c and has_dl:
        raise DomainError("give either (c_in, c_out) or (d, lambda), not both")
    if has_c:
        if obj.get("c_in") is None or obj.get("c_out") is None:
            raise DomainError("both c_in and c_out are required")
        return ModelParams(k=obj["k"], n=obj["n"], c_in=obj["c_in"], c_out=obj["c_out"])
    if has_dl:
        if obj.get("d") is None or obj.get("lambda") is None:
            raise DomainError("both d and lambda are required")
        return from_d_lambda(obj["k"], obj["n"], obj["d"], obj["lambda"])
    raise DomainError("params require (c_in, c_out) or (d, lambda)")
