"""Supervised triple scorer: a two-hidden-layer regressor over the features.

Human ratings are median-aggregated per instance, standardized with the
training-set mean and population standard deviation, and fitted with
mini-batch Adam under a squared-error loss. The learning rate is annealed
linearly from its initial value to zero over the total step count. Everything
is seeded and single-threaded so a (dataset, config, seed) triple reproduces
the exact same model bytes.

Arithmetic is double precision throughout; model files store parameters as
float32 (see ``save_model`` for the layout).
"""

from __future__ import annotations

import math
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from statistics import median
from typing import Sequence

import numpy as np

from .features import BLOCK_COUNT, build_features, feature_dim
from .store import Dataset

MODEL_MAGIC = b"BLSM"
MODEL_VERSION = 1
_MODEL_HEADER = struct.Struct("<4sHIIIddB")

ACTIVATION_CODES = {"tanh": 0}

DEFAULT_H1 = 3072
DEFAULT_H2 = 1536


class ModelFormatError(ValueError):
    """A model file does not follow the binary layout."""


def aggregate_ratings(ratings: Sequence[float]) -> float:
    """Median rating; even counts use the mean of the two middle values."""
    if len(ratings) == 0:
        raise ValueError("cannot aggregate an empty rating list")
    return float(median(ratings))


def fit_standardizer(ratings: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation of the training ratings.

    Raises:
        ValueError: fewer than two ratings, or zero variance.
    """
    arr = np.asarray(ratings, dtype=np.float64)
    if arr.size < 2:
        raise ValueError(f"need at least 2 ratings to standardize, got {arr.size}")
    mean = float(arr.mean())
    std = float(np.sqrt(np.mean((arr - mean) ** 2)))
    if std <= 0.0:
        raise ValueError("ratings have zero variance; standardization is degenerate")
    return mean, std


def standardize(r: float, mean: float, std: float) -> float:
    if std <= 0.0:
        raise ValueError(f"std must be positive, got {std}")
    return (r - mean) / std


def destandardize(z: float, mean: float, std: float) -> float:
    if std <= 0.0:
        raise ValueError(f"std must be positive, got {std}")
    return z * std + mean


@dataclass
class Model:
    """Two-hidden-layer scalar regressor with its rating standardizer.

    Weight shapes: w1 (h1, 6d), b1 (h1,), w2 (h2, h1), b2 (h2,),
    w_out (h2,), b_out scalar. ``seed`` records the init seed; it is not
    stored in model files.
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w_out: np.ndarray
    b_out: float
    rating_mean: float = 0.0
    rating_std: float = 1.0
    seed: int = 0
    activation: str = "tanh"

    @property
    def d_in(self) -> int:
        return int(self.w1.shape[1])

    @property
    def d(self) -> int:
        return self.d_in // BLOCK_COUNT

    @property
    def h1(self) -> int:
        return int(self.w1.shape[0])

    @property
    def h2(self) -> int:
        return int(self.w2.shape[0])

    def validate(self) -> None:
        if self.activation not in ACTIVATION_CODES:
            raise ValueError(f"unsupported activation {self.activation!r}")
        if self.rating_std <= 0.0:
            raise ValueError(f"rating_std must be positive, got {self.rating_std}")
        if self.d_in % BLOCK_COUNT != 0:
            raise ValueError(f"input width {self.d_in} is not a multiple of {BLOCK_COUNT}")
        h1, h2 = self.h1, self.h2
        shapes = {
            "w1": (self.w1.shape, (h1, self.d_in)),
            "b1": (self.b1.shape, (h1,)),
            "w2": (self.w2.shape, (h2, h1)),
            "b2": (self.b2.shape, (h2,)),
            "w_out": (self.w_out.shape, (h2,)),
        }
        for name, (got, want) in shapes.items():
            if got != want:
                raise ValueError(f"{name} has shape {got}, expected {want}")
        for name in ("w1", "b1", "w2", "b2", "w_out"):
            if not np.isfinite(getattr(self, name)).all():
                raise ValueError(f"{name} contains non-finite values")
        if not math.isfinite(self.b_out):
            raise ValueError("b_out is non-finite")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    lr0: float = 5e-5
    schedule: str = "linear_anneal_to_zero"
    batch_size: int = 32
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.lr0 > 0.0:
            raise ValueError(f"lr0 must be positive, got {self.lr0}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.schedule != "linear_anneal_to_zero":
            raise ValueError(f"unknown schedule {self.schedule!r}")


@dataclass
class TrainReport:
    epoch_mse: list[float] = field(default_factory=list)
    final_mse: float = float("nan")
    seconds: float = 0.0


@dataclass
class Gradients:
    """Exact gradients of (forward(m, f) - target)**2, parameter-shaped."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w_out: np.ndarray
    b_out: float


def schedule_lr(lr0: float, step: int, total_steps: int) -> float:
    """Linearly annealed rate for zero-based ``step`` of ``total_steps``.

    Positive for every step actually taken (0 <= step < total_steps); hits
    zero only at the step-count boundary itself.
    """
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    return lr0 * (1.0 - step / total_steps)


def init_model(d: int, h1: int = DEFAULT_H1, h2: int = DEFAULT_H2, seed: int = 0) -> Model:
    """Deterministically initialized model for embedding dimension ``d``.

    Weights are uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, drawn in
    a fixed order (w1, w2, w_out) from one seeded generator; biases start at
    zero. The same seed yields bit-identical parameters.
    """
    if d < 1 or h1 < 1 or h2 < 1:
        raise ValueError(f"layer sizes must be >= 1, got d={d}, h1={h1}, h2={h2}")
    d_in = feature_dim(d)
    rng = np.random.default_rng(seed)
    lim1 = math.sqrt(6.0 / (d_in + h1))
    lim2 = math.sqrt(6.0 / (h1 + h2))
    lim3 = math.sqrt(6.0 / (h2 + 1))
    return Model(
        w1=rng.uniform(-lim1, lim1, size=(h1, d_in)),
        b1=np.zeros(h1),
        w2=rng.uniform(-lim2, lim2, size=(h2, h1)),
        b2=np.zeros(h2),
        w_out=rng.uniform(-lim3, lim3, size=h2),
        b_out=0.0,
        seed=seed,
    )


def _forward_batch(m: Model, feats: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a1 = np.tanh(feats @ m.w1.T + m.b1)
    a2 = np.tanh(a1 @ m.w2.T + m.b2)
    y = a2 @ m.w_out + m.b_out
    return a1, a2, y


def forward(m: Model, f: Sequence[float] | np.ndarray) -> float:
    """Scalar prediction for one feature vector (standardized rating space).

    Raises:
        ValueError: feature length mismatch or non-finite result.
    """
    feats = np.asarray(f, dtype=np.float64)
    if feats.ndim != 1 or feats.shape[0] != m.d_in:
        raise ValueError(f"feature vector has shape {feats.shape}, expected ({m.d_in},)")
    _, _, y = _forward_batch(m, feats[None, :])
    value = float(y[0])
    if not math.isfinite(value):
        raise ValueError("forward pass produced a non-finite value")
    return value


def gradients(m: Model, f: Sequence[float] | np.ndarray, target: float) -> Gradients:
    """Analytic gradients of the squared error at one sample."""
    feats = np.asarray(f, dtype=np.float64)
    if feats.ndim != 1 or feats.shape[0] != m.d_in:
        raise ValueError(f"feature vector has shape {feats.shape}, expected ({m.d_in},)")
    if not math.isfinite(target):
        raise ValueError("target must be finite")
    batch = feats[None, :]
    a1, a2, y = _forward_batch(m, batch)
    g = _backward_batch(m, batch, a1, a2, 2.0 * (y - target))
    return g


def _backward_batch(
    m: Model,
    feats: np.ndarray,
    a1: np.ndarray,
    a2: np.ndarray,
    dy: np.ndarray,
    out: Gradients | None = None,
) -> Gradients:
    # dy is dL/dy per sample, already scaled by the loss convention in use.
    # ``out`` recycles the two large weight-gradient buffers across steps.
    db_out = float(dy.sum())
    dw_out = a2.T @ dy
    dz2 = np.outer(dy, m.w_out) * (1.0 - a2 * a2)
    dw2 = np.matmul(dz2.T, a1, out=None if out is None else out.w2)
    db2 = dz2.sum(axis=0)
    dz1 = (dz2 @ m.w2) * (1.0 - a1 * a1)
    dw1 = np.matmul(dz1.T, feats, out=None if out is None else out.w1)
    db1 = dz1.sum(axis=0)
    if out is None:
        return Gradients(w1=dw1, b1=db1, w2=dw2, b2=db2, w_out=dw_out, b_out=db_out)
    out.b1, out.b2, out.w_out, out.b_out = db1, db2, dw_out, db_out
    return out


class _AdamState:
    """Per-parameter Adam moments with an allocation-free update."""

    __slots__ = ("m", "v", "scratch")

    def __init__(self, shape: tuple[int, ...]):
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.scratch = np.empty(shape)

    def update(
        self,
        param: np.ndarray,
        grad: np.ndarray,
        lr: float,
        t: int,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        s = self.scratch
        self.m *= beta1
        np.multiply(grad, 1.0 - beta1, out=s)
        self.m += s
        self.v *= beta2
        np.multiply(grad, grad, out=s)
        np.multiply(s, 1.0 - beta2, out=s)
        self.v += s
        np.divide(self.v, 1.0 - beta2**t, out=s)
        np.sqrt(s, out=s)
        s += eps
        np.divide(self.m, s, out=s)
        np.multiply(s, lr / (1.0 - beta1**t), out=s)
        param -= s


def _targets_for(ds: Dataset) -> tuple[list[str], np.ndarray]:
    ids, raw = [], []
    for inst in ds.instances:
        if len(inst.ratings) == 0:
            raise ValueError(f"instance {inst.id!r} has no ratings")
        ids.append(inst.id)
        raw.append(aggregate_ratings(inst.ratings))
    return ids, np.asarray(raw, dtype=np.float64)


def _feature_matrix(ds: Dataset) -> np.ndarray:
    feats = np.empty((len(ds), feature_dim(ds.dim)), dtype=np.float64)
    for i, inst in enumerate(ds.instances):
        src, mt, ref = ds.triple(inst)
        feats[i] = build_features(src, mt, ref)
    return feats


def train(
    ds: Dataset,
    cfg: TrainConfig,
    h1: int = DEFAULT_H1,
    h2: int = DEFAULT_H2,
) -> tuple[Model, TrainReport]:
    """Fit a model on the train split of ``ds``.

    Step ``t`` of ``T`` total steps uses learning rate ``lr0 * (1 - t / T)``
    (t zero-based, so the rate stays positive and reaches zero only at the
    step-count boundary). Updates follow Adam with beta1=0.9, beta2=0.999,
    eps=1e-8. Embeddings are never mutated.

    Raises:
        ValueError: train split smaller than the batch size, missing ratings,
            or degenerate (constant) ratings.
    """
    train_ds = ds.split_view("train")
    n = len(train_ds)
    if n == 0:
        raise ValueError("dataset has an empty train split")
    if n < cfg.batch_size:
        raise ValueError(f"train split has {n} instances, fewer than batch_size={cfg.batch_size}")

    _, raw_targets = _targets_for(train_ds)
    mean, std = fit_standardizer(raw_targets)
    targets = (raw_targets - mean) / std
    feats = _feature_matrix(train_ds)

    model = init_model(train_ds.dim, h1=h1, h2=h2, seed=cfg.seed)
    params = [model.w1, model.b1, model.w2, model.b2, model.w_out, np.zeros(1)]
    adam = [_AdamState(p.shape) for p in params]
    grad_buf = Gradients(
        w1=np.empty_like(model.w1),
        b1=np.empty(0),
        w2=np.empty_like(model.w2),
        b2=np.empty(0),
        w_out=np.empty(0),
        b_out=0.0,
    )

    shuffle_rng = np.random.default_rng([cfg.seed, 1])
    n_batches = math.ceil(n / cfg.batch_size)
    total_steps = cfg.epochs * n_batches
    step = 0

    report = TrainReport()
    started = time.perf_counter()
    for _ in range(cfg.epochs):
        order = np.arange(n)
        if cfg.shuffle:
            shuffle_rng.shuffle(order)
        sq_err_sum = 0.0
        for b in range(n_batches):
            idx = order[b * cfg.batch_size : (b + 1) * cfg.batch_size]
            fb, tb = feats[idx], targets[idx]
            a1, a2, y = _forward_batch(model, fb)
            resid = y - tb
            sq_err_sum += float(resid @ resid)
            g = _backward_batch(model, fb, a1, a2, 2.0 * resid / idx.size, out=grad_buf)
            grads = [g.w1, g.b1, g.w2, g.b2, g.w_out, np.asarray([g.b_out])]

            lr = schedule_lr(cfg.lr0, step, total_steps)
            step += 1
            for p, gr, state in zip(params, grads, adam):
                state.update(p, gr, lr, step)
        report.epoch_mse.append(sq_err_sum / n)

    model.b_out = float(params[5][0])
    model.rating_mean = mean
    model.rating_std = std
    model.validate()
    report.final_mse = report.epoch_mse[-1]
    report.seconds = time.perf_counter() - started
    return model, report


def score_dataset(
    m: Model, ds: Dataset, destandardized: bool = False
) -> list[tuple[str, float]]:
    """Score every instance, manifest order; empty datasets yield [].

    Scores live in standardized rating space unless ``destandardized`` maps
    them back through the stored training mean/std.

    Raises:
        ValueError: dataset dimension does not match the model.
    """
    if len(ds) > 0 and ds.dim != m.d:
        raise ValueError(f"dataset dim {ds.dim} does not match model dim {m.d}")
    if len(ds) == 0:
        return []
    feats = _feature_matrix(ds)
    _, _, y = _forward_batch(m, feats)
    if destandardized:
        y = y * m.rating_std + m.rating_mean
    return [(inst.id, float(v)) for inst, v in zip(ds.instances, y)]


def save_model(m: Model, path: str | Path) -> None:
    """Serialize a model (header + float32 parameters, little-endian).

    Layout: magic ``BLSM``, version u16, d_in u32, h1 u32, h2 u32,
    rating_mean f64, rating_std f64, activation code u8, then w1, b1, w2, b2,
    w_out, b_out as float32 in row-major order.
    """
    m.validate()
    header = _MODEL_HEADER.pack(
        MODEL_MAGIC,
        MODEL_VERSION,
        m.d_in,
        m.h1,
        m.h2,
        m.rating_mean,
        m.rating_std,
        ACTIVATION_CODES[m.activation],
    )
    chunks = [header]
    for arr in (m.w1, m.b1, m.w2, m.b2, m.w_out, np.asarray([m.b_out])):
        chunks.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_model(path: str | Path) -> Model:
    """Read a model file written by :func:`save_model`.

    Raises:
        ModelFormatError: bad magic/version, size mismatch, or invalid header.
    """
    data = Path(path).read_bytes()
    if len(data) < _MODEL_HEADER.size:
        raise ModelFormatError(f"{path}: file too short for header ({len(data)} bytes)")
    magic, version, d_in, h1, h2, mean, std, act = _MODEL_HEADER.unpack_from(data, 0)
    if magic != MODEL_MAGIC:
        raise ModelFormatError(f"{path}: bad magic {magic!r}")
    if version != MODEL_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {version}")
    codes = {v: k for k, v in ACTIVATION_CODES.items()}
    if act not in codes:
        raise ModelFormatError(f"{path}: unknown activation code {act}")
    if d_in % BLOCK_COUNT != 0 or min(d_in, h1, h2) < 1:
        raise ModelFormatError(f"{path}: invalid sizes d_in={d_in}, h1={h1}, h2={h2}")
    if std <= 0.0:
        raise ModelFormatError(f"{path}: rating_std must be positive, got {std}")
    counts = [h1 * d_in, h1, h2 * h1, h2, h2, 1]
    expected = _MODEL_HEADER.size + 4 * sum(counts)
    if len(data) != expected:
        raise ModelFormatError(f"{path}: expected {expected} bytes, found {len(data)}")
    flat = np.frombuffer(data, dtype="<f4", offset=_MODEL_HEADER.size).astype(np.float64)
    parts = np.split(flat, np.cumsum(counts)[:-1])
    model = Model(
        w1=parts[0].reshape(h1, d_in),
        b1=parts[1],
        w2=parts[2].reshape(h2, h1),
        b2=parts[3],
        w_out=parts[4],
        b_out=float(parts[5][0]),
        rating_mean=mean,
        rating_std=std,
        activation=codes[act],
    )
    model.validate()
    return model
