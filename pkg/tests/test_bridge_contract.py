"""Contract check for the optional encoder bridge.

Skipped when node or the built bridge is absent; the rest of the suite does
not depend on it.
"""

import shutil
import subprocess
from pathlib import Path

import pytest

from triscore.store import read_embeddings

BRIDGE_CLI = Path(__file__).resolve().parent.parent / "bridge" / "dist" / "cli.js"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not BRIDGE_CLI.is_file(),
    reason="bridge not built or node unavailable",
)


def export(manifest: Path, out: Path) -> None:
    subprocess.run(
        ["node", str(BRIDGE_CLI), "export", "--manifest", str(manifest), "--out", str(out)],
        check=True,
        capture_output=True,
        text=True,
    )


def write_manifest(path: Path, ids) -> None:
    lines = [f"{i}\ttext\tsentence for {i}\ten\ttext" for i in ids]
    path.write_text("\n".join(lines) + "\n")


def test_bridge_export_parses_via_store(tmp_path):
    manifest = tmp_path / "media.tsv"
    write_manifest(manifest, ["a", "b", "c"])
    out = tmp_path / "emb.blse"
    export(manifest, out)

    dim, rows = read_embeddings(out)
    assert dim == 1024
    assert rows.shape == (3, 1024)
    print("[acceptance] bridge-contract: PASS")


def test_bridge_rows_follow_manifest_order(tmp_path):
    forward, backward = tmp_path / "fwd.tsv", tmp_path / "rev.tsv"
    write_manifest(forward, ["a", "b", "c"])
    write_manifest(backward, ["c", "b", "a"])
    out_f, out_b = tmp_path / "f.blse", tmp_path / "b.blse"
    export(forward, out_f)
    export(backward, out_b)

    _, rows_f = read_embeddings(out_f)
    _, rows_b = read_embeddings(out_b)
    assert (rows_b[::-1] == rows_f).all()


def test_bridge_empty_manifest(tmp_path):
    manifest = tmp_path / "media.tsv"
    manifest.write_text("")
    out = tmp_path / "emb.blse"
    export(manifest, out)
    dim, rows = read_embeddings(out)
    assert (dim, rows.shape[0]) == (1024, 0)
