"""Shared test utilities: small combinatorial oracles and random inputs."""

from __future__ import annotations

import itertools

import numpy as np

from sbmbounds.partition import Partition, overlap_matrix


def random_balanced_partition(n: int, k: int, gen: np.random.Generator) -> Partition:
    """Uniform balanced partition: a random permutation of the sorted labels."""
    labels = np.repeat(np.arange(k), n // k)
    gen.shuffle(labels)
    return Partition(labels=tuple(labels.tolist()), k=k)


def brute_force_overlap(sigma: Partition, tau: Partition) -> float:
    """beta via explicit max over all k! relabelings (oracle for the solver)."""
    alpha = overlap_matrix(sigma, tau)
    k = sigma.k
    best = -np.inf
    for perm in itertools.permutations(range(k)):
        best = max(best, sum(alpha[r, perm[r]] for r in range(k)))
    return float(best / k)


def all_balanced_partitions(n: int, k: int) -> list[Partition]:
    """Every balanced labeling of n vertices into k groups, lexicographic."""
    out = []
    target = n // k
    for labels in itertools.product(range(k), repeat=n):
        counts = [0] * k
        for x in labels:
            counts[x] += 1
        if all(c == target for c in counts):
            out.append(Partition(labels=labels, k=k))
    return out
