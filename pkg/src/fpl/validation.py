"""Statistical validation of multi-photon sampling experiments.

Two certifiers are provided: the row-norm estimator test against the uniform
distribution over no-collision outcomes (the product of squared row norms of
the n x n transition submatrix is compared against the threshold (n/m)^n and
a counting variable accumulates the per-event votes), and a thresholded
likelihood-ratio discriminator between the indistinguishable- and
distinguishable-photon output distributions.

Verdict JSON: {test, N, counter, verdict, skipped_collisions}; success-rate
curve CSV columns: N_set, success_rate, trials.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .boson import FockState, OutputDistribution, enumerate_space, \
    output_distribution, sample, transition_submatrix
from .errors import InputError
from .numerics import RandomSource


@dataclass(frozen=True)
class ValidationTrace:
    """Outcome of a counting-variable test: the per-event increments, the
    final counter, and the verdict it implies."""

    test: str
    N: int
    counter: int
    verdict: str
    increments: tuple[int, ...]
    skipped_collisions: int = 0

    def __post_init__(self):
        if any(abs(i) > 2 for i in self.increments):
            raise InputError("per-event increments are limited to |2|")


def row_norm_estimator(U, T: FockState, S: FockState) -> float:
    """Product of squared row norms of U_{S,T}; an efficient estimator
    correlated with |permanent|^2."""
    if not S.no_collision:
        raise InputError("row-norm estimator requires a no-collision outcome")
    X = transition_submatrix(U, S, T)
    return float(np.prod(np.sum(np.abs(X) ** 2, axis=1)))


def _verdict(counter: int, positive: str, negative: str) -> str:
    if counter > 0:
        return positive
    if counter < 0:
        return negative
    return "Inconclusive"


def aa_uniform_test(samples: list[FockState], U, T: FockState) -> ValidationTrace:
    """Vote each no-collision sample by comparing the row-norm estimator
    against the threshold (n/m)^n; collision samples are skipped but
    counted."""
    U = np.asarray(U, dtype=complex)
    n, m = T.n, T.m
    threshold = (n / m) ** n
    increments = []
    skipped = 0
    for S in samples:
        if not S.no_collision:
            skipped += 1
            continue
        increments.append(1 if row_norm_estimator(U, T, S) > threshold else -1)
    counter = sum(increments)
    if not increments:
        return ValidationTrace("aa_uniform", 0, 0, "Inconclusive", (), skipped)
    return ValidationTrace("aa_uniform", len(increments), counter,
                           _verdict(counter, "BosonSampler", "UniformSampler"),
                           tuple(increments), skipped)


def uniform_no_collision(m: int, n: int) -> OutputDistribution:
    """Uniform distribution over the no-collision outcomes."""
    space = enumerate_space(m, n, no_collision=True)
    probs = np.full(len(space), 1.0 / len(space))
    return OutputDistribution(tuple(space), probs, "uniform")


def success_rate_curve(U, T: FockState, source: str, set_sizes, trials: int,
                       rng: RandomSource) -> list[dict]:
    """Fraction of trials in which the row-norm test reaches the correct
    verdict, per sample-set size. Inconclusive events (collisions) still
    count toward the drawn set size."""
    if source == "quantum":
        dist = output_distribution(np.asarray(U, dtype=complex), T, "quantum")
        correct = "BosonSampler"
    elif source == "uniform":
        dist = uniform_no_collision(T.m, T.n)
        correct = "UniformSampler"
    else:
        raise InputError(f"unknown source {source!r}")
    rows = []
    for n_set in set_sizes:
        hits = 0
        for _ in range(trials):
            trace = aa_uniform_test(sample(dist, rng, int(n_set)), U, T)
            hits += trace.verdict == correct
        rows.append({"N_set": int(n_set), "success_rate": hits / trials,
                     "trials": trials})
    return rows


def _score(p: float, q: float, k1: float, k2: float) -> tuple[int, bool]:
    """(increment, warned) for one event of the likelihood-ratio test."""
    if p <= 0.0 and q <= 0.0:
        return 0, False
    if q <= 0.0:
        warnings.warn("sample outside the distinguishable-model support; scored +2")
        return 2, True
    if p <= 0.0:
        warnings.warn("sample outside the indistinguishable-model support; scored -2")
        return -2, True
    rho = p / q
    if k1 < rho < 1.0 / k1:
        return 0, False
    if rho >= k2:
        return 2, False
    if rho >= 1.0 / k1:
        return 1, False
    if rho <= 1.0 / k2:
        return -2, False
    return -1, False


def likelihood_discriminator(samples: list[FockState], p_ind: OutputDistribution,
                             q_dis: OutputDistribution, k1: float = 0.9,
                             k2: float = 1.5) -> ValidationTrace:
    """Thresholded likelihood-ratio test between the indistinguishable
    (p_ind) and distinguishable (q_dis) models: per event, the ratio
    rho = p/q earns +-1 for a moderate lean and +-2 for a strong one; ratios
    inside (k1, 1/k1) are inconclusive but still counted in N."""
    if not 0.0 < k1 < 1.0 < k2:
        raise InputError("thresholds must satisfy 0 < k1 < 1 < k2")
    p_map = {S: float(p) for S, p in zip(p_ind.space, p_ind.probs)}
    q_map = {S: float(q) for S, q in zip(q_dis.space, q_dis.probs)}
    increments = []
    for S in samples:
        if S not in p_map and S not in q_map:
            raise InputError(f"sample {S.to_string()} outside both supports")
        increments.append(_score(p_map.get(S, 0.0), q_map.get(S, 0.0), k1, k2)[0])
    counter = sum(increments)
    if not samples:
        return ValidationTrace("likelihood", 0, 0, "Inconclusive", ())
    return ValidationTrace("likelihood", len(samples), counter,
                           _verdict(counter, "Indistinguishable", "Distinguishable"),
                           tuple(increments))


def trace_to_json(trace: ValidationTrace) -> dict:
    return {"test": trace.test, "N": trace.N, "counter": trace.counter,
            "verdict": trace.verdict,
            "skipped_collisions": trace.skipped_collisions}


def curve_to_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N_set", "success_rate", "trials"])
        for row in rows:
            w.writerow([row["N_set"], repr(float(row["success_rate"])), row["trials"]])
