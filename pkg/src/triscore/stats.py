"""Sentence-level Pearson correlation and paired bootstrap significance.

The bootstrap compares two metrics on the same test set: each resample draws
indices with replacement, correlates both metrics against the human ratings
on the draw, and tallies which metric wins. A metric is significantly better
when its win fraction reaches 1 - alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .regressor import aggregate_ratings
from .store import Dataset, filter_by_modality


@dataclass(frozen=True)
class SignificanceVerdict:
    wins_a: float
    wins_b: float
    ties: float
    significant: bool
    alpha: float
    resamples: int
    seed: int


@dataclass(frozen=True)
class ComboReport:
    """Per-modality-combination slice of a dataset with its correlation."""

    combo: tuple[str, str, str]
    count: int
    pearson_r: float | None


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation in double precision, clamped to [-1, 1].

    Raises:
        ValueError: length mismatch, fewer than 2 points, or constant input.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape[0] != y.shape[0]:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.shape[0] < 2:
        raise ValueError(f"need at least 2 points, got {x.shape[0]}")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for constant input")
    r = float(dx @ dy) / np.sqrt(sx * sy)
    return min(1.0, max(-1.0, float(r)))


def _resample_correlations(
    a: np.ndarray, b: np.ndarray, h: np.ndarray, seed: int, k: int
) -> tuple[float | None, float | None]:
    # Indices derive from (seed, resample index) so results are independent
    # of evaluation order and can be recomputed in isolation.
    rng = np.random.default_rng([seed, k])
    idx = rng.integers(0, a.shape[0], size=a.shape[0])
    ha = h[idx]
    try:
        ra = pearson(a[idx], ha)
    except ValueError:
        ra = None
    try:
        rb = pearson(b[idx], ha)
    except ValueError:
        rb = None
    return ra, rb


def paired_bootstrap(
    scores_a: Sequence[float],
    scores_b: Sequence[float],
    human: Sequence[float],
    resamples: int = 1000,
    alpha: float = 0.05,
    seed: int = 0,
) -> SignificanceVerdict:
    """Paired bootstrap over Pearson correlations with the human ratings.

    Resamples where either correlation is undefined (constant draw) count as
    ties, as do exact score ties. Deterministic for a fixed seed.

    Raises:
        ValueError: length mismatch or invalid resamples/alpha.
    """
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    h = np.asarray(human, dtype=np.float64)
    if not (a.shape == b.shape == h.shape) or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape}, {b.shape}, {h.shape}")
    if a.shape[0] < 2:
        raise ValueError(f"need at least 2 points, got {a.shape[0]}")
    if resamples < 1:
        raise ValueError(f"resamples must be >= 1, got {resamples}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")

    wins_a = wins_b = ties = 0
    for k in range(resamples):
        ra, rb = _resample_correlations(a, b, h, seed, k)
        if ra is None or rb is None or ra == rb:
            ties += 1
        elif ra > rb:
            wins_a += 1
        else:
            wins_b += 1

    fa, fb, ft = wins_a / resamples, wins_b / resamples, ties / resamples
    return SignificanceVerdict(
        wins_a=fa,
        wins_b=fb,
        ties=ft,
        significant=max(fa, fb) >= 1.0 - alpha,
        alpha=alpha,
        resamples=resamples,
        seed=seed,
    )


def affine_invariance_check(
    xs: Sequence[float], ys: Sequence[float], a: float, b: float
) -> bool:
    """True iff pearson(a*xs + b, ys) matches pearson(xs, ys) within 1e-9.

    Requires a > 0 (a positive-slope affine map must not change r).
    """
    if not a > 0.0:
        raise ValueError(f"slope must be positive, got {a}")
    x = np.asarray(xs, dtype=np.float64)
    return abs(pearson(a * x + b, ys) - pearson(x, ys)) < 1e-9


def modality_report(ds: Dataset, scores: Mapping[str, float]) -> list[ComboReport]:
    """Per-combination correlation between scores and median ratings.

    Combinations appear in order of first occurrence in the dataset; slices
    are disjoint and jointly exhaustive. Slices where the correlation is
    undefined report ``pearson_r=None``.
    """
    combos: list[tuple[str, str, str]] = []
    for inst in ds.instances:
        if inst.modality_combo not in combos:
            combos.append(inst.modality_combo)
    reports = []
    for combo in combos:
        sub = filter_by_modality(ds, combo)
        xs = [scores[inst.id] for inst in sub.instances]
        ys = [aggregate_ratings(inst.ratings) for inst in sub.instances]
        try:
            r: float | None = pearson(xs, ys)
        except ValueError:
            r = None
        reports.append(ComboReport(combo=combo, count=len(sub), pearson_r=r))
    return reports
