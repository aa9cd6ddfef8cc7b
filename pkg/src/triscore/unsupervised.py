"""Training-free cosine score over (source, translation, reference) triples.

The score of a triple is the mean of two cosine similarities: translation
against source and translation against reference. Both terms are kept so the
contribution of each side can be inspected separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .store import Dataset, Embedding


class ZeroNormError(ValueError):
    """A zero-norm vector reached the metric; upstream encoding is degenerate."""


@dataclass(frozen=True)
class CosineScore:
    """Triple score with its two cosine terms (each in [-1, 1])."""

    total: float
    src_term: float
    ref_term: float


def _as_vector(x: Embedding | Sequence[float] | np.ndarray) -> np.ndarray:
    values = x.values if isinstance(x, Embedding) else x
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    return arr


def cosine(a: Embedding | Sequence[float] | np.ndarray, b: Embedding | Sequence[float] | np.ndarray) -> float:
    """Cosine similarity in double precision, clamped to [-1, 1].

    Raises:
        ValueError: dimension mismatch.
        ZeroNormError: either input has zero Euclidean norm.
    """
    va, vb = _as_vector(a), _as_vector(b)
    if va.shape[0] != vb.shape[0]:
        raise ValueError(f"dimension mismatch: {va.shape[0]} vs {vb.shape[0]}")
    na = math.sqrt(float(va @ va))
    nb = math.sqrt(float(vb @ vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("zero-norm embedding")
    value = float(va @ vb) / (na * nb)
    return min(1.0, max(-1.0, value))


def score_triple(
    src: Embedding | Sequence[float] | np.ndarray,
    mt: Embedding | Sequence[float] | np.ndarray,
    ref: Embedding | Sequence[float] | np.ndarray,
) -> CosineScore:
    """Score one triple: total = (cos(src, mt) + cos(ref, mt)) / 2."""
    src_term = cosine(src, mt)
    ref_term = cosine(ref, mt)
    return CosineScore(total=(src_term + ref_term) / 2.0, src_term=src_term, ref_term=ref_term)


def score_dataset(ds: Dataset) -> tuple[list[tuple[str, CosineScore]], list[tuple[str, str]]]:
    """Score every instance, in manifest order.

    Returns ``(scores, errors)``. Instances with degenerate embeddings are
    reported in ``errors`` as (id, message) and do not stop the rest.
    """
    scores: list[tuple[str, CosineScore]] = []
    errors: list[tuple[str, str]] = []
    for inst in ds.instances:
        src, mt, ref = ds.triple(inst)
        try:
            scores.append((inst.id, score_triple(src, mt, ref)))
        except ValueError as exc:
            errors.append((inst.id, str(exc)))
    return scores, errors


def corpus_score(sentence_scores: Sequence[float]) -> float:
    """Arithmetic mean of sentence-level scores.

    Raises:
        ValueError: empty or non-finite input.
    """
    arr = np.asarray(sentence_scores, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("corpus score of an empty score list is undefined")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite sentence score")
    return float(arr.mean())
