"""FastAPI application exposing the scoring toolkit.

The service is a local daemon: dataset manifests, embedding files, and model
files are paths on the machine running the server. Score and significance
endpoints also accept raw vectors so remote clients can use them without a
shared filesystem.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, regressor, stats, synth, unsupervised
from ..features import build_features
from ..store import load_dataset, read_embeddings
from . import schemas

_MODEL_CACHE_SIZE = 4


def _cached_model(app: FastAPI, path: str) -> regressor.Model:
    st = Path(path).stat()
    key = (str(Path(path).resolve()), st.st_mtime_ns, st.st_size)
    cache: dict = app.state.model_cache
    if key not in cache:
        if len(cache) >= _MODEL_CACHE_SIZE:
            cache.pop(next(iter(cache)))
        cache[key] = regressor.load_model(path)
    return cache[key]


def create_app() -> FastAPI:
    app = FastAPI(
        title="triscore",
        version=__version__,
        description="Embedding-based quality scoring for speech-to-speech translation.",
    )
    app.state.model_cache = {}

    @app.exception_handler(ValueError)
    async def _bad_request(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(FileNotFoundError)
    async def _not_found(request: Request, exc: FileNotFoundError) -> JSONResponse:
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(version=__version__)

    @app.post("/embeddings/info", response_model=schemas.EmbeddingsInfoResponse)
    def embeddings_info(req: schemas.EmbeddingsInfoRequest) -> schemas.EmbeddingsInfoResponse:
        dim, rows = read_embeddings(req.path)
        return schemas.EmbeddingsInfoResponse(dim=dim, count=rows.shape[0])

    @app.post("/score/unsupervised", response_model=schemas.CosineScoreResponse)
    def score_unsupervised(req: schemas.TripleRequest) -> schemas.CosineScoreResponse:
        score = unsupervised.score_triple(req.src, req.mt, req.ref)
        return schemas.CosineScoreResponse(
            total=score.total, src_term=score.src_term, ref_term=score.ref_term
        )

    @app.post("/score/unsupervised/dataset", response_model=schemas.UnsupervisedDatasetResponse)
    def score_unsupervised_dataset(req: schemas.ManifestRequest) -> schemas.UnsupervisedDatasetResponse:
        ds = load_dataset(req.manifest)
        scores, errors = unsupervised.score_dataset(ds)
        rows = [
            schemas.UScoreRow(id=i, total=s.total, src_term=s.src_term, ref_term=s.ref_term)
            for i, s in scores
        ]
        corpus = unsupervised.corpus_score([r.total for r in rows]) if rows else None
        return schemas.UnsupervisedDatasetResponse(
            rows=rows,
            errors=[schemas.ScoreErrorRow(id=i, error=msg) for i, msg in errors],
            corpus_total=corpus,
        )

    @app.post("/score/supervised", response_model=schemas.ScoreValueResponse)
    def score_supervised(req: schemas.SupervisedTripleRequest) -> schemas.ScoreValueResponse:
        model = _cached_model(app, req.model)
        value = regressor.forward(model, build_features(req.src, req.mt, req.ref))
        if req.destandardized:
            value = regressor.destandardize(value, model.rating_mean, model.rating_std)
        return schemas.ScoreValueResponse(score=value)

    @app.post("/score/supervised/dataset", response_model=schemas.SupervisedDatasetResponse)
    def score_supervised_dataset(req: schemas.SupervisedDatasetRequest) -> schemas.SupervisedDatasetResponse:
        model = _cached_model(app, req.model)
        ds = load_dataset(req.manifest)
        scored = regressor.score_dataset(model, ds, destandardized=req.destandardized)
        rows = [schemas.ScoreRow(id=i, score=v) for i, v in scored]
        corpus = unsupervised.corpus_score([r.score for r in rows]) if rows else None
        return schemas.SupervisedDatasetResponse(rows=rows, corpus=corpus)

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(req: schemas.TrainRequest) -> schemas.TrainResponse:
        ds = load_dataset(req.manifest)
        cfg = regressor.TrainConfig(
            epochs=req.epochs,
            lr0=req.lr0,
            batch_size=req.batch_size,
            seed=req.seed,
            shuffle=req.shuffle,
        )
        model, report = regressor.train(ds, cfg, h1=req.h1, h2=req.h2)
        regressor.save_model(model, req.out)
        return schemas.TrainResponse(
            out=req.out,
            epoch_mse=report.epoch_mse,
            final_mse=report.final_mse,
            seconds=report.seconds,
        )

    @app.post("/significance", response_model=schemas.VerdictResponse)
    def significance(req: schemas.SignificanceRequest) -> schemas.VerdictResponse:
        verdict = stats.paired_bootstrap(
            req.scores_a,
            req.scores_b,
            req.human,
            resamples=req.resamples,
            alpha=req.alpha,
            seed=req.seed,
        )
        return schemas.VerdictResponse(**verdict.__dict__)

    @app.post("/synth", response_model=schemas.SynthResponse)
    def synthesize(req: schemas.SynthRequest) -> schemas.SynthResponse:
        kwargs: dict = {}
        if req.modality_mix is not None:
            kwargs["modality_mix"] = tuple((tuple(c), w) for c, w in req.modality_mix)
        spec = synth.OracleSpec(
            n=req.n,
            d=req.d,
            noise_sigma=req.sigma,
            plant=req.plant,
            seed=req.seed,
            train_frac=req.train_frac,
            distortion=req.distortion,
            **kwargs,
        )
        return schemas.SynthResponse(manifest=synth.generate(spec, req.out_dir))

    @app.post("/datasets/ratings", response_model=schemas.RatingsResponse)
    def dataset_ratings(req: schemas.ManifestRequest) -> schemas.RatingsResponse:
        ds = load_dataset(req.manifest)
        rows = [
            schemas.ScoreRow(id=inst.id, score=regressor.aggregate_ratings(inst.ratings))
            for inst in ds.instances
        ]
        return schemas.RatingsResponse(rows=rows)

    @app.post("/report/modality", response_model=schemas.ModalityReportResponse)
    def report_modality(req: schemas.ModalityReportRequest) -> schemas.ModalityReportResponse:
        ds = load_dataset(req.manifest)
        scores = {row.id: row.score for row in req.scores}
        missing = [inst.id for inst in ds.instances if inst.id not in scores]
        if missing:
            raise ValueError(f"no score provided for instance {missing[0]!r}")
        combos = stats.modality_report(ds, scores)
        return schemas.ModalityReportResponse(
            combos=[
                schemas.ComboRow(combo=c.combo, count=c.count, pearson_r=c.pearson_r)
                for c in combos
            ]
        )

    return app
