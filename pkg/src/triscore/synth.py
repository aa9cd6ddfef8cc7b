"""Seeded synthetic datasets with planted, independently checkable structure.

Each generated dataset is a full on-disk bundle (three embedding files, a
manifest, and a ground-truth sidecar) that loads through the store like real
data. Ratings are planted as a known function of the embeddings so pipeline
claims (correlation, learnability, significance) can be verified without any
pretrained encoder:

    cosine_linked   rating = 3 + 2 * distort(triple cosine score) + noise
    feature_linear  rating = clip(w . features + c) + noise
    random          rating independent of the embeddings

Ratings are clipped to the [1, 5] scale after noise. With zero noise the
planted relation holds exactly on every instance, computed from the float32
values actually stored on disk.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .features import build_features
from .store import MODALITIES, RATING_MAX, RATING_MIN, write_embeddings, write_manifest
from .unsupervised import score_triple

PLANTS = ("cosine_linked", "feature_linear", "random")
DISTORTIONS = ("none", "cube")

_SPEECH_TRIPLE = (("speech", "speech", "speech"), 1.0)


@dataclass(frozen=True)
class OracleSpec:
    """Recipe for one synthetic dataset; fully determined by the seed."""

    n: int
    d: int
    noise_sigma: float = 0.0
    plant: str = "cosine_linked"
    seed: int = 0
    modality_mix: tuple[tuple[tuple[str, str, str], float], ...] = (_SPEECH_TRIPLE,)
    train_frac: float = 0.8
    distortion: str = "none"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.noise_sigma < 0.0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.plant not in PLANTS:
            raise ValueError(f"plant {self.plant!r} not in {PLANTS}")
        if self.distortion not in DISTORTIONS:
            raise ValueError(f"distortion {self.distortion!r} not in {DISTORTIONS}")
        if not 0.0 <= self.train_frac <= 1.0:
            raise ValueError(f"train_frac must be in [0, 1], got {self.train_frac}")
        total = 0.0
        for combo, weight in self.modality_mix:
            if len(combo) != 3 or any(m not in MODALITIES for m in combo):
                raise ValueError(f"invalid modality combo {combo!r}")
            if weight < 0.0:
                raise ValueError(f"negative modality weight {weight}")
            total += weight
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"modality weights must sum to 1, got {total}")


def _unit_rows(raw: np.ndarray) -> np.ndarray:
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def _distort(u: float, kind: str) -> float:
    if kind == "cube":
        return u**3
    return u


def generate(spec: OracleSpec, out_dir: str | Path) -> str:
    """Write a synthetic dataset under ``out_dir``; returns the manifest path.

    Outputs src.blse / mt.blse / ref.blse / manifest.jsonl plus
    ground_truth.json recording the planted parameters and the exact
    (pre-noise) rating of every instance. Byte-identical for the same spec.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    n, d = spec.n, spec.d

    # Translation interpolates toward the source and the reference toward the
    # translation, which covers the cosine range smoothly.
    src = _unit_rows(rng.standard_normal((n, d)))
    g = _unit_rows(rng.standard_normal((n, d)))
    h = _unit_rows(rng.standard_normal((n, d)))
    lam = rng.uniform(0.0, 1.0, size=(n, 1))
    mu = rng.uniform(0.0, 1.0, size=(n, 1))
    mt = _unit_rows(lam * src + (1.0 - lam) * g)
    ref = _unit_rows(mu * mt + (1.0 - mu) * h)

    # Ratings are planted on the float32 values that land on disk, so the
    # relation is exact for whoever reads the files back.
    src32 = src.astype("<f4")
    mt32 = mt.astype("<f4")
    ref32 = ref.astype("<f4")

    # The planted relation is evaluated per instance with the same scalar
    # operations a verifier would use (score_triple, a row dot product), so
    # recomputing it from the stored files reproduces ratings bit-exactly.
    params: dict[str, object] = {}
    if spec.plant == "cosine_linked":
        totals = [score_triple(src32[i], mt32[i], ref32[i]).total for i in range(n)]
        exact = np.asarray([3.0 + 2.0 * _distort(t, spec.distortion) for t in totals])
        params = {"slope": 2.0, "intercept": 3.0, "distortion": spec.distortion}
    elif spec.plant == "feature_linear":
        feats = [build_features(src32[i], mt32[i], ref32[i]) for i in range(n)]
        w = rng.standard_normal(len(feats[0])) / math.sqrt(len(feats[0]))
        raw = np.asarray([float(f @ w) for f in feats])
        scale = 2.0 / (3.0 * raw.std())
        w_final = w * scale
        c_final = 3.0 - raw.mean() * scale
        exact = np.asarray(
            [min(RATING_MAX, max(RATING_MIN, float(f @ w_final) + c_final)) for f in feats]
        )
        params = {"weights": w_final.tolist(), "intercept": float(c_final)}
    else:  # random: ratings carry no information about the embeddings
        exact = rng.uniform(RATING_MIN, RATING_MAX, size=n)
        params = {}

    rating_counts = rng.integers(1, 4, size=n)
    noise = rng.standard_normal((n, 3)) * spec.noise_sigma
    combos = [tuple(c) for c, _ in spec.modality_mix]
    weights = np.asarray([w for _, w in spec.modality_mix], dtype=np.float64)
    combo_idx = rng.choice(len(combos), size=n, p=weights / weights.sum())

    write_embeddings(src32, d, out / "src.blse")
    write_embeddings(mt32, d, out / "mt.blse")
    write_embeddings(ref32, d, out / "ref.blse")

    n_train = round(spec.train_frac * n)
    records = []
    for i in range(n):
        combo = combos[combo_idx[i]]
        ratings = np.clip(exact[i] + noise[i, : rating_counts[i]], RATING_MIN, RATING_MAX)
        records.append(
            {
                "id": f"inst-{i:05d}",
                "src": {"file": "src.blse", "row": i, "modality": combo[0], "lang": "x-src"},
                "mt": {"file": "mt.blse", "row": i, "modality": combo[1], "lang": "x-tgt"},
                "ref": {"file": "ref.blse", "row": i, "modality": combo[2], "lang": "x-tgt"},
                "ratings": [float(r) for r in ratings],
                "system_id": "synthetic",
                "split": "train" if i < n_train else "test",
            }
        )
    manifest_path = out / "manifest.jsonl"
    write_manifest(records, manifest_path)

    sidecar = {
        "spec": {
            "n": n,
            "d": d,
            "noise_sigma": spec.noise_sigma,
            "plant": spec.plant,
            "seed": spec.seed,
            "train_frac": spec.train_frac,
            "distortion": spec.distortion,
            "modality_mix": [[list(c), w] for c, w in spec.modality_mix],
        },
        "params": params,
        "rating_exact": [float(r) for r in exact],
    }
    with open(out / "ground_truth.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return str(manifest_path)
