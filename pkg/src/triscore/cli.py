"""Command-line client for the scoring service.

Every command talks to the HTTP API. With ``--server`` (or the
``TRISCORE_SERVER`` environment variable) requests go to a running server;
otherwise the service runs in-process behind the same HTTP interface, so the
commands work standalone. Path arguments in requests (manifests, model files,
output directories) are resolved on the machine running the service.
"""

from __future__ import annotations

import json
from pathlib import Path

import click
import httpx


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # starlette warns about its httpx-backed in-process client; the
        # warning is for starlette developers, not our users.
        warnings.filterwarnings("ignore", message=r"Using `httpx` with `starlette.testclient`")
        from starlette.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        if not isinstance(detail, str):
            detail = json.dumps(detail)
        raise click.ClickException(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


def _write_tsv(path: str, rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write("\t".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _read_scores_tsv(path: str) -> tuple[list[str], dict[str, float]]:
    """First column is the id, second the score; extra columns are ignored."""
    ids: list[str] = []
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 2:
                raise click.ClickException(f"{path}:{lineno}: expected at least 2 columns")
            try:
                value = float(parts[1])
            except ValueError:
                raise click.ClickException(f"{path}:{lineno}: {parts[1]!r} is not a number")
            ids.append(parts[0])
            values[parts[0]] = value
    return ids, values


@click.group()
@click.option(
    "--server",
    envvar="TRISCORE_SERVER",
    default=None,
    help="Base URL of a running server; default runs the service in-process.",
)
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Score speech-to-speech translations from sentence embeddings."""
    ctx.obj = server


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


@main.command()
@click.option("--plant", default="cosine_linked", show_default=True)
@click.option("--n", required=True, type=int)
@click.option("--dim", required=True, type=int)
@click.option("--sigma", default=0.0, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_dir", required=True)
@click.option("--train-frac", default=0.8, show_default=True, type=float)
@click.option("--distortion", default="none", show_default=True)
@click.pass_obj
def synth(server, plant, n, dim, sigma, seed, out_dir, train_frac, distortion) -> None:
    """Generate a synthetic dataset with a planted rating structure."""
    with _client(server) as client:
        data = _post(
            client,
            "/synth",
            {
                "n": n,
                "d": dim,
                "sigma": sigma,
                "plant": plant,
                "seed": seed,
                "out_dir": out_dir,
                "train_frac": train_frac,
                "distortion": distortion,
            },
        )
    click.echo(data["manifest"])


@main.command("score-u")
@click.option("--manifest", required=True)
@click.option("--out", required=True)
@click.pass_obj
def score_u(server, manifest, out) -> None:
    """Cosine-score a dataset: writes id, total, src_term, ref_term TSV."""
    with _client(server) as client:
        data = _post(client, "/score/unsupervised/dataset", {"manifest": manifest})
    _write_tsv(
        out,
        [(r["id"], r["total"], r["src_term"], r["ref_term"]) for r in data["rows"]],
    )
    for err in data["errors"]:
        click.echo(f"warning: {err['id']}: {err['error']}", err=True)
    corpus = data["corpus_total"]
    click.echo(f"wrote {len(data['rows'])} scores to {out}" + (f" (corpus mean {corpus:.6f})" if corpus is not None else ""))


@main.command()
@click.option("--manifest", required=True)
@click.option("--out", required=True, help="Where the service writes the model file.")
@click.option("--epochs", default=20, show_default=True, type=int)
@click.option("--lr", "lr0", default=5e-5, show_default=True, type=float)
@click.option("--batch", "batch_size", default=32, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--no-shuffle", is_flag=True, default=False)
@click.option("--h1", default=3072, show_default=True, type=int)
@click.option("--h2", default=1536, show_default=True, type=int)
@click.pass_obj
def train(server, manifest, out, epochs, lr0, batch_size, seed, no_shuffle, h1, h2) -> None:
    """Train the supervised scorer on the manifest's train split."""
    with _client(server) as client:
        data = _post(
            client,
            "/train",
            {
                "manifest": manifest,
                "out": out,
                "epochs": epochs,
                "lr0": lr0,
                "batch_size": batch_size,
                "seed": seed,
                "shuffle": not no_shuffle,
                "h1": h1,
                "h2": h2,
            },
        )
    click.echo(
        f"model written to {data['out']}: first-epoch mse {data['epoch_mse'][0]:.6f}, "
        f"final mse {data['final_mse']:.6f}, {data['seconds']:.1f}s"
    )


@main.command("score-s")
@click.option("--model", "model_path", required=True)
@click.option("--manifest", required=True)
@click.option("--out", required=True)
@click.option("--destandardize", is_flag=True, default=False, help="Map scores back to the rating scale.")
@click.pass_obj
def score_s(server, model_path, manifest, out, destandardize) -> None:
    """Score a dataset with a trained model: writes id, score TSV."""
    with _client(server) as client:
        data = _post(
            client,
            "/score/supervised/dataset",
            {"manifest": manifest, "model": model_path, "destandardized": destandardize},
        )
    _write_tsv(out, [(r["id"], r["score"]) for r in data["rows"]])
    click.echo(f"wrote {len(data['rows'])} scores to {out}")


@main.command()
@click.option("--scores-a", required=True)
@click.option("--scores-b", required=True)
@click.option("--human", required=True)
@click.option("--resamples", default=1000, show_default=True, type=int)
@click.option("--alpha", default=0.05, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.pass_obj
def significance(server, scores_a, scores_b, human, resamples, alpha, seed) -> None:
    """Paired bootstrap over two score files against human ratings."""
    ids, a = _read_scores_tsv(scores_a)
    _, b = _read_scores_tsv(scores_b)
    _, h = _read_scores_tsv(human)
    for name, d in (("scores-b", b), ("human", h)):
        if set(d) != set(a):
            raise click.ClickException(f"{name} ids do not match scores-a ids")
    with _client(server) as client:
        data = _post(
            client,
            "/significance",
            {
                "scores_a": [a[i] for i in ids],
                "scores_b": [b[i] for i in ids],
                "human": [h[i] for i in ids],
                "resamples": resamples,
                "alpha": alpha,
                "seed": seed,
            },
        )
    click.echo(json.dumps(data, sort_keys=True))


@main.command()
@click.option("--manifest", required=True)
@click.option("--out", required=True)
@click.pass_obj
def ratings(server, manifest, out) -> None:
    """Write median human ratings per instance: id, rating TSV."""
    with _client(server) as client:
        data = _post(client, "/datasets/ratings", {"manifest": manifest})
    _write_tsv(out, [(r["id"], r["score"]) for r in data["rows"]])
    click.echo(f"wrote {len(data['rows'])} ratings to {out}")


@main.command("modality-report")
@click.option("--manifest", required=True)
@click.option("--scores", required=True, help="TSV of id, score (extra columns ignored).")
@click.pass_obj
def modality_report(server, manifest, scores) -> None:
    """Per-modality-combination correlation between scores and ratings."""
    ids, values = _read_scores_tsv(scores)
    with _client(server) as client:
        data = _post(
            client,
            "/report/modality",
            {"manifest": manifest, "scores": [{"id": i, "score": values[i]} for i in ids]},
        )
    for row in data["combos"]:
        combo = ",".join(row["combo"])
        r = "undefined" if row["pearson_r"] is None else f"{row['pearson_r']:.6f}"
        click.echo(f"{combo}\tn={row['count']}\tpearson={r}")


@main.command()
@click.argument("path")
@click.pass_obj
def info(server, path) -> None:
    """Print dimension and row count of an embedding file."""
    with _client(server) as client:
        data = _post(client, "/embeddings/info", {"path": str(Path(path))})
    click.echo(f"dim={data['dim']} count={data['count']}")


if __name__ == "__main__":
    main()
