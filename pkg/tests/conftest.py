import json
from pathlib import Path

import numpy as np
import pytest

from triscore.store import write_embeddings


def make_ref(file: str, row: int, modality: str = "speech", lang: str = "x-a") -> dict:
    return {"file": file, "row": row, "modality": modality, "lang": lang}


def make_record(
    id: str,
    row: int,
    file: str = "emb.blse",
    ratings: tuple = (3.0,),
    split: str = "test",
    modalities: tuple = ("speech", "speech", "speech"),
) -> dict:
    return {
        "id": id,
        "src": make_ref(file, row, modalities[0], "x-a"),
        "mt": make_ref(file, row, modalities[1], "x-b"),
        "ref": make_ref(file, row, modalities[2], "x-b"),
        "ratings": list(ratings),
        "system_id": "sys",
        "split": split,
    }


@pytest.fixture
def build_dataset(tmp_path):
    """Write embedding files and a manifest; returns the manifest path.

    ``files`` maps file name to a (rows, dim) array; ``records`` are manifest
    dicts (see ``make_record``).
    """

    def _build(records, files, name="manifest.jsonl") -> Path:
        for fname, rows in files.items():
            rows = np.asarray(rows, dtype="<f4")
            write_embeddings(rows, rows.shape[1], tmp_path / fname)
        manifest = tmp_path / name
        with open(manifest, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec) + "\n")
        return manifest

    return _build
