"""On-disk embedding files and the dataset manifest.

Embedding file layout (all little-endian):

    magic   4 bytes  b"BLSE"
    version u16      1
    dim     u32      vector dimension
    count   u64      number of rows
    payload count * dim float32, row-major

The manifest is JSON-lines, one record per evaluation instance:

    {"id": ..., "src": {"file", "row", "modality", "lang"}, "mt": {...},
     "ref": {...}, "ratings": [...], "system_id": ..., "split": ...}

Embedding files carry no modality or language information; those tags live in
the manifest so one file can serve several roles.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAGIC = b"BLSE"
VERSION = 1
_HEADER = struct.Struct("<4sHIQ")

MODALITIES = ("speech", "text")
SPLITS = ("train", "test")

RATING_MIN = 1.0
RATING_MAX = 5.0


class FormatError(ValueError):
    """An embedding file does not follow the binary layout."""


class ManifestError(ValueError):
    """A manifest record or the assembled dataset violates a validation rule."""


def write_embeddings(rows: Sequence[Sequence[float]] | np.ndarray, dim: int, path: str | Path) -> None:
    """Write vectors to ``path`` in the canonical binary layout.

    Values are stored as float32; callers passing wider floats lose the extra
    precision. The output is byte-for-byte deterministic for identical input.

    Raises:
        ValueError: ragged rows, row length != dim, or non-finite values.
    """
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    try:
        with np.errstate(over="ignore"):  # overflow is caught by the finite check below
            arr = np.asarray(rows, dtype="<f4")
    except (ValueError, TypeError) as exc:
        raise ValueError("rows are ragged or non-numeric") from exc
    if arr.size == 0:
        arr = arr.reshape(0, dim)
    if arr.ndim != 2:
        raise ValueError(f"expected a sequence of vectors, got ndim={arr.ndim}")
    if arr.shape[1] != dim:
        raise ValueError(f"row length {arr.shape[1]} does not match declared dim {dim}")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite value in embeddings (after float32 conversion)")
    header = _HEADER.pack(MAGIC, VERSION, dim, arr.shape[0])
    Path(path).write_bytes(header + arr.tobytes(order="C"))


def read_embeddings(path: str | Path) -> tuple[int, np.ndarray]:
    """Read an embedding file, returning ``(dim, rows)``.

    ``rows`` is a read-only float32 array of shape (count, dim); the stored
    bytes round-trip exactly through :func:`write_embeddings`.

    Raises:
        FormatError: bad magic, unsupported version, or size mismatch.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: file too short for header ({len(data)} bytes)")
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if dim < 1:
        raise FormatError(f"{path}: dim must be positive, got {dim}")
    expected = _HEADER.size + count * dim * 4
    if len(data) < expected:
        raise FormatError(f"{path}: truncated payload, expected {expected} bytes, found {len(data)}")
    if len(data) > expected:
        raise FormatError(f"{path}: trailing bytes after payload, expected {expected}, found {len(data)}")
    rows = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(count, dim)
    return dim, rows


@dataclass(frozen=True)
class EmbeddingRef:
    """Pointer to one row of an embedding file, plus its manifest tags."""

    file: str
    row: int
    modality: str
    lang: str


@dataclass(frozen=True)
class Embedding:
    """A resolved embedding vector with its modality and language tags."""

    values: np.ndarray
    modality: str
    lang: str

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class Instance:
    """One (source, translation, reference) triple with ratings and metadata."""

    id: str
    src: EmbeddingRef
    mt: EmbeddingRef
    ref: EmbeddingRef
    ratings: tuple[float, ...]
    system_id: str
    split: str

    @property
    def lang_pair(self) -> tuple[str, str]:
        return (self.src.lang, self.mt.lang)

    @property
    def modality_combo(self) -> tuple[str, str, str]:
        return (self.src.modality, self.mt.modality, self.ref.modality)


@dataclass(frozen=True)
class Dataset:
    """A validated, immutable evaluation dataset.

    ``files`` maps manifest-relative file names to read-only float32 arrays;
    instances keep manifest order.
    """

    instances: tuple[Instance, ...]
    dim: int
    manifest_path: str
    files: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.instances)

    def vector(self, ref: EmbeddingRef) -> np.ndarray:
        return self.files[ref.file][ref.row]

    def embedding(self, ref: EmbeddingRef) -> Embedding:
        return Embedding(self.vector(ref), ref.modality, ref.lang)

    def triple(self, inst: Instance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.vector(inst.src), self.vector(inst.mt), self.vector(inst.ref))

    def split_view(self, split: str) -> "Dataset":
        """Dataset restricted to one split, order preserved."""
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
        kept = tuple(i for i in self.instances if i.split == split)
        return Dataset(kept, self.dim, self.manifest_path, self.files)


def _parse_ref(record_id: str, role: str, raw: object) -> EmbeddingRef:
    if not isinstance(raw, dict):
        raise ManifestError(f"instance {record_id!r}: {role} must be an object")
    try:
        ref = EmbeddingRef(
            file=str(raw["file"]),
            row=int(raw["row"]),
            modality=str(raw["modality"]),
            lang=str(raw["lang"]),
        )
    except KeyError as exc:
        raise ManifestError(f"instance {record_id!r}: {role} is missing field {exc.args[0]!r}") from exc
    if ref.modality not in MODALITIES:
        raise ManifestError(
            f"instance {record_id!r}: {role} modality {ref.modality!r} not in {MODALITIES}"
        )
    if ref.row < 0:
        raise ManifestError(f"instance {record_id!r}: {role} row {ref.row} is negative")
    return ref


def _parse_record(line: str, lineno: int) -> Instance:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest line {lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(raw, dict) or "id" not in raw:
        raise ManifestError(f"manifest line {lineno}: record must be an object with an 'id'")
    record_id = str(raw["id"])
    for field_name in ("src", "mt", "ref", "ratings", "system_id", "split"):
        if field_name not in raw:
            raise ManifestError(f"instance {record_id!r}: missing field {field_name!r}")
    ratings = tuple(float(r) for r in raw["ratings"])
    for r in ratings:
        if not np.isfinite(r) or not (RATING_MIN <= r <= RATING_MAX):
            raise ManifestError(
                f"instance {record_id!r}: rating {r} outside [{RATING_MIN}, {RATING_MAX}]"
            )
    split = str(raw["split"])
    if split not in SPLITS:
        raise ManifestError(f"instance {record_id!r}: split {split!r} not in {SPLITS}")
    return Instance(
        id=record_id,
        src=_parse_ref(record_id, "src", raw["src"]),
        mt=_parse_ref(record_id, "mt", raw["mt"]),
        ref=_parse_ref(record_id, "ref", raw["ref"]),
        ratings=ratings,
        system_id=str(raw["system_id"]),
        split=split,
    )


def load_dataset(manifest_path: str | Path) -> Dataset:
    """Load and fully validate a dataset from a JSON-lines manifest.

    Every validation failure names the offending instance id (or file). The
    result is deterministic: two loads of the same manifest are identical.

    Raises:
        ManifestError: any invariant violation (dangling reference, dim
            mismatch, duplicate id, rating out of range, bad enum value).
        FormatError: a referenced embedding file is malformed.
    """
    manifest_path = Path(manifest_path)
    base = manifest_path.parent

    instances: list[Instance] = []
    seen: dict[str, str] = {}
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            inst = _parse_record(line, lineno)
            if inst.id in seen:
                prev = seen[inst.id]
                if prev != inst.split:
                    raise ManifestError(
                        f"instance {inst.id!r} appears in both {prev!r} and {inst.split!r} splits"
                    )
                raise ManifestError(f"duplicate instance id {inst.id!r}")
            seen[inst.id] = inst.split
            instances.append(inst)

    files: dict[str, np.ndarray] = {}
    dim: int | None = None
    dim_file: str | None = None
    for inst in instances:
        for role, ref in (("src", inst.src), ("mt", inst.mt), ("ref", inst.ref)):
            if ref.file not in files:
                full = base / ref.file
                if not full.is_file():
                    raise ManifestError(
                        f"instance {inst.id!r}: {role} references missing file {ref.file!r}"
                    )
                file_dim, rows = read_embeddings(full)
                if dim is None:
                    dim, dim_file = file_dim, ref.file
                elif file_dim != dim:
                    raise ManifestError(
                        f"dim mismatch across files: {dim_file!r} has dim {dim}, "
                        f"{ref.file!r} has dim {file_dim}"
                    )
                files[ref.file] = rows
            rows = files[ref.file]
            if ref.row >= rows.shape[0]:
                raise ManifestError(
                    f"instance {inst.id!r}: {role} row {ref.row} out of range "
                    f"for {ref.file!r} with {rows.shape[0]} rows"
                )
            if not np.isfinite(rows[ref.row]).all():
                raise ManifestError(
                    f"instance {inst.id!r}: {role} embedding ({ref.file!r} row {ref.row}) "
                    "has non-finite values"
                )

    if dim is None:
        dim = 0
    return Dataset(tuple(instances), dim, str(manifest_path), files)


def filter_by_modality(ds: Dataset, combo: tuple[str, str, str]) -> Dataset:
    """Instances whose (src, mt, ref) modalities equal ``combo``, order kept."""
    combo = tuple(combo)  # type: ignore[assignment]
    if len(combo) != 3 or any(m not in MODALITIES for m in combo):
        raise ValueError(f"combo must be three of {MODALITIES}, got {combo!r}")
    kept = tuple(i for i in ds.instances if i.modality_combo == combo)
    return Dataset(kept, ds.dim, ds.manifest_path, ds.files)


def write_manifest(records: Iterable[dict], path: str | Path) -> None:
    """Write manifest records as JSON lines with deterministic formatting."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
