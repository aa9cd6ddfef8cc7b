"""Input features for the supervised regressor.

A triple of d-dimensional embeddings maps to one 6d vector, concatenating the
reference, the translation, and four element-wise interactions in a fixed
block order. Model files are only portable because this layout is canonical:

    [ref, mt, src*mt, |src - mt|, ref*mt, |ref - mt|]
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .store import Embedding

BLOCKS = ("ref", "mt", "src*mt", "|src-mt|", "ref*mt", "|ref-mt|")
BLOCK_COUNT = len(BLOCKS)


def feature_dim(d: int) -> int:
    """Feature length for embedding dimension ``d`` (1024 -> 6144)."""
    return BLOCK_COUNT * d


def _as_vector(x: Embedding | Sequence[float] | np.ndarray) -> np.ndarray:
    values = x.values if isinstance(x, Embedding) else x
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    return arr


def build_features(
    src: Embedding | Sequence[float] | np.ndarray,
    mt: Embedding | Sequence[float] | np.ndarray,
    ref: Embedding | Sequence[float] | np.ndarray,
) -> np.ndarray:
    """Build the 6d feature vector for one triple (float64).

    Raises:
        ValueError: the three embeddings do not share one dimension.
    """
    vsrc, vmt, vref = _as_vector(src), _as_vector(mt), _as_vector(ref)
    d = vsrc.shape[0]
    if vmt.shape[0] != d or vref.shape[0] != d:
        raise ValueError(
            f"dimension mismatch: src={d}, mt={vmt.shape[0]}, ref={vref.shape[0]}"
        )
    return np.concatenate(
        [vref, vmt, vsrc * vmt, np.abs(vsrc - vmt), vref * vmt, np.abs(vref - vmt)]
    )
