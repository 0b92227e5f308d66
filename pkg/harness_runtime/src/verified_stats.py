"""Statistics runtime imported by generated experiment harnesses.

The harness pins this module's ``execute_paired_ttest`` as the only route
from model scores to a p-value, so it has to be dependable and boring:
pure stdlib, deterministic given its seed, and with an explicitly written
Student-t tail (regularized incomplete beta via Lentz's continued
fraction) instead of a third-party dependency.
"""

from __future__ import annotations

import math
import random

__all__ = ["execute_paired_ttest", "regularized_incomplete_beta", "student_t_sf"]

_CF_MAX_ITERATIONS = 300
_CF_EPSILON = 3e-16
_CF_TINY = 1e-300


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Lentz's algorithm for the continued fraction in the incomplete beta
    # expansion; converges quickly for x < (a+1)/(a+b+2).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        numerator = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + numerator * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + numerator / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + numerator * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + numerator / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPSILON:
            return h
    raise ArithmeticError("incomplete beta continued fraction failed to converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: int) -> float:
    """Upper tail P(T >= t) of Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
    return tail if t >= 0 else 1.0 - tail


def _fold_blocks(n_rows: int, folds: int, rng: random.Random) -> list[list[int]]:
    """Shuffle row indices and split them into `folds` contiguous blocks.

    Every row lands in exactly one block; block sizes differ by at most one.
    """
    order = list(range(n_rows))
    rng.shuffle(order)
    return [order[(k * n_rows) // folds : ((k + 1) * n_rows) // folds] for k in range(folds)]


def execute_paired_ttest(
    validation_data,
    artifact,
    baseline,
    evaluate_metric,
    reps: int,
    folds: int,
    seed: int,
    two_sided: bool = False,
) -> float:
    """Repeated k-fold paired comparison of artifact vs. baseline.

    For each rep the rows are reshuffled (substream of ``seed``) and split
    into ``folds`` blocks; both models are scored on identical blocks with
    ``evaluate_metric``, giving reps*folds paired differences d. The default
    alternative is one-sided (artifact beats baseline): t = mean(d) /
    (sd(d)/sqrt(n)) against Student's t with n-1 degrees of freedom.

    Degenerate spread is resolved by sign: sd = 0 yields p = 0 when the
    common difference is positive, else p = 1.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    n_rows = len(validation_data)
    if n_rows < folds:
        raise ValueError(f"validation data has {n_rows} rows, fewer than {folds} folds")

    differences: list[float] = []
    for rep in range(reps):
        rng = random.Random(f"{seed}:{rep}")
        for block in _fold_blocks(n_rows, folds, rng):
            rows = [validation_data[i] for i in block]
            candidate_score = evaluate_metric(artifact, rows)
            baseline_score = evaluate_metric(baseline, rows)
            differences.append(candidate_score - baseline_score)

    n = len(differences)
    mean = math.fsum(differences) / n
    variance = math.fsum((d - mean) ** 2 for d in differences) / (n - 1)
    sd = math.sqrt(variance)
    if sd == 0.0:
        if mean == 0.0:
            return 1.0
        if two_sided:
            return 0.0
        return 0.0 if mean > 0 else 1.0
    t = mean / (sd / math.sqrt(n))
    if two_sided:
        return 2.0 * student_t_sf(abs(t), n - 1)
    return student_t_sf(t, n - 1)
