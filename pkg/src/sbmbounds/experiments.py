"""Experiment drivers: distinguishing runs, the lambda* table, threshold grids.

Trials are pure functions of per-trial child streams, so aggregates are
identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import DomainError
from .graphgen import RandomStream, sample_er, sample_planted
from .params import ModelParams, average_degree, second_eigenvalue
from .partition import Partition, balance, exhaustive_detect, overlap
from .thresholds import ThresholdReport, lambda_star, threshold_report

TABLE1_KS = (5, 6, 7, 8, 9, 10, 11, 20, 100, 1000, 10000)


@dataclass(frozen=True)
class DistinguishResult:
    n: int
    k: int
    d: float
    lam: float
    trials: int
    p_good_sbm: float
    p_good_er: float
    mean_overlap: float | None
    detected_sbm: int
    detected_er: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "lambda": self.lam,
            "trials": self.trials,
            "p_good_sbm": self.p_good_sbm,
            "p_good_er": self.p_good_er,
            "mean_overlap": self.mean_overlap,
            "detected_sbm": self.detected_sbm,
            "detected_er": self.detected_er,
        }


def _distinguish_trial(p: ModelParams, d: float, budget: float, stream: RandomStream):
    sigma, g_sbm = sample_planted(p, stream.child(0))
    g_er = sample_er(p.n, d, stream.child(1))
    tau_sbm = exhaustive_detect(g_sbm, p, budget=budget)
    tau_er = exhaustive_detect(g_er, p, budget=budget)
    ov = None
    if tau_sbm is not None:
        planted = balance(Partition(labels=tuple(int(x) for x in sigma), k=p.k))
        ov = overlap(planted, tau_sbm)
    return tau_sbm is not None, tau_er is not None, ov


def run_distinguish(
    p: ModelParams,
    trials: int,
    rng: RandomStream,
    budget: float = 1e9,
    workers: int = 1,
) -> DistinguishResult:
    """Per trial: one planted graph and one Erdos-Renyi graph at matching mean
    degree; report how often each admits a good partition, and the mean
    overlap of detections against the (balanced) planted assignment.

    Planted labels are uniform, hence not exactly balanced; overlap is taken
    against balance(sigma) since overlap is defined for balanced partitions.
    """
    if not isinstance(trials, int) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    if not isinstance(workers, int) or workers < 1:
        raise DomainError(f"workers must be a positive integer, got {workers!r}")
    d = average_degree(p)
    streams = [rng.child(t) for t in range(trials)]
    if workers == 1:
        rows = [_distinguish_trial(p, d, budget, s) for s in streams]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _distinguish_trial(p, d, budget, s), streams))
    found_sbm = sum(1 for r in rows if r[0])
    found_er = sum(1 for r in rows if r[1])
    overlaps = [r[2] for r in rows if r[2] is not None]
    return DistinguishResult(
        n=p.n,
        k=p.k,
        d=d,
        lam=second_eigenvalue(p),
        trials=trials,
        p_good_sbm=found_sbm / trials,
        p_good_er=found_er / trials,
        mean_overlap=(sum(overlaps) / len(overlaps)) if overlaps else None,
        detected_sbm=found_sbm,
        detected_er=found_er,
    )


def run_table1(ks=TABLE1_KS) -> list[tuple[int, float]]:
    """lambda* for each k; the crossing below which the first-moment bound
    beats Kesten-Stigum."""
    return [(int(k), lambda_star(int(k))) for k in ks]


def run_grid(ks, lams) -> list[ThresholdReport]:
    """Threshold reports over the cartesian product of ks and lambdas.

    Out-of-range lambda for a given k (lambda < -1/(k-1)) is skipped rather
    than aborting the sweep.
    """
    out = []
    for k in ks:
        lo = -1.0 / (int(k) - 1)
        for lam in lams:
            if lam < lo or lam > 1.0:
                continue
            out.append(threshold_report(int(k), float(lam)))
    return out
