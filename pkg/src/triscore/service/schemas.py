"""Request/response models for the scoring service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class TripleRequest(BaseModel):
    src: list[float]
    mt: list[float]
    ref: list[float]


class CosineScoreResponse(BaseModel):
    total: float
    src_term: float
    ref_term: float


class ManifestRequest(BaseModel):
    manifest: str


class UScoreRow(BaseModel):
    id: str
    total: float
    src_term: float
    ref_term: float


class ScoreErrorRow(BaseModel):
    id: str
    error: str


class UnsupervisedDatasetResponse(BaseModel):
    rows: list[UScoreRow]
    errors: list[ScoreErrorRow]
    corpus_total: float | None


class ScoreRow(BaseModel):
    id: str
    score: float


class SupervisedTripleRequest(TripleRequest):
    model: str = Field(description="Path to a .blsm model file on the server")
    destandardized: bool = False


class ScoreValueResponse(BaseModel):
    score: float


class SupervisedDatasetRequest(BaseModel):
    manifest: str
    model: str
    destandardized: bool = False


class SupervisedDatasetResponse(BaseModel):
    rows: list[ScoreRow]
    corpus: float | None


class TrainRequest(BaseModel):
    manifest: str
    out: str = Field(description="Where the server writes the .blsm file")
    epochs: int = 20
    lr0: float = 5e-5
    batch_size: int = 32
    seed: int = 0
    shuffle: bool = True
    h1: int = 3072
    h2: int = 1536


class TrainResponse(BaseModel):
    out: str
    epoch_mse: list[float]
    final_mse: float
    seconds: float


class SignificanceRequest(BaseModel):
    scores_a: list[float]
    scores_b: list[float]
    human: list[float]
    resamples: int = 1000
    alpha: float = 0.05
    seed: int = 0


class VerdictResponse(BaseModel):
    wins_a: float
    wins_b: float
    ties: float
    significant: bool
    alpha: float
    resamples: int
    seed: int


class SynthRequest(BaseModel):
    n: int
    d: int
    sigma: float = 0.0
    plant: str = "cosine_linked"
    seed: int = 0
    out_dir: str
    train_frac: float = 0.8
    distortion: str = "none"
    modality_mix: list[tuple[tuple[str, str, str], float]] | None = None


class SynthResponse(BaseModel):
    manifest: str


class RatingsResponse(BaseModel):
    rows: list[ScoreRow]


class EmbeddingsInfoRequest(BaseModel):
    path: str


class EmbeddingsInfoResponse(BaseModel):
    dim: int
    count: int


class ModalityReportRequest(BaseModel):
    manifest: str
    scores: list[ScoreRow]


class ComboRow(BaseModel):
    combo: tuple[str, str, str]
    count: int
    pearson_r: float | None


class ModalityReportResponse(BaseModel):
    combos: list[ComboRow]
