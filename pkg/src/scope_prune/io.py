"""On-disk formats: token bundles, selection files and CSV fixtures.

Bundle layout (``format_version`` 1)::

    <dir>/manifest.json     {"format_version": 1, "n": .., "d": .., "dtype": "f32le",
                             "embeddings_file": "embeddings.f32",
                             "saliency_file": "saliency.f32",
                             "metadata": {"embeddings_sha256": .., "saliency_sha256": ..}}
    <dir>/embeddings.f32    n*d little-endian float32, row-major
    <dir>/saliency.f32      n little-endian float32

Values are widened to float64 on load.  Checksums in ``metadata`` are
verified when present.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .errors import (
    ChecksumMismatch,
    FileMissing,
    IoError,
    ManifestParseError,
    NonFinite,
    ParseError,
    ScopeError,
    SizeMismatch,
)
from .types import SaliencyVector, SelectionResult, TokenMatrix, validate_bundle

FORMAT_VERSION = 1
STORAGE_DTYPE = "f32le"
MANIFEST_NAME = "manifest.json"
SELECTION_FORMAT = "scope-selection"

_F32LE = np.dtype("<f4")


def _to_f32(values: np.ndarray, what: str) -> np.ndarray:
    with np.errstate(over="ignore"):
        out = np.asarray(values, dtype=np.float64).astype(_F32LE)
    if not np.all(np.isfinite(out)):
        raise NonFinite(f"{what} overflows 32-bit storage")
    return out


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def save_bundle(
    tokens: TokenMatrix,
    saliency: SaliencyVector,
    directory,
    metadata: Optional[Mapping[str, str]] = None,
) -> Path:
    """Write ``tokens`` and ``saliency`` into ``directory``; return the manifest path."""
    tokens, saliency = validate_bundle(tokens, saliency)
    directory = Path(directory)
    emb = _to_f32(tokens.data, "embeddings").tobytes(order="C")
    sal = _to_f32(saliency.scores, "saliency").tobytes()
    meta = {str(k): str(v) for k, v in (metadata or {}).items()}
    meta["embeddings_sha256"] = _sha256(emb)
    meta["saliency_sha256"] = _sha256(sal)
    manifest = {
        "format_version": FORMAT_VERSION,
        "n": tokens.n,
        "d": tokens.d,
        "dtype": STORAGE_DTYPE,
        "embeddings_file": "embeddings.f32",
        "saliency_file": "saliency.f32",
        "metadata": dict(sorted(meta.items())),
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        (directory / manifest["embeddings_file"]).write_bytes(emb)
        (directory / manifest["saliency_file"]).write_bytes(sal)
        path = directory / MANIFEST_NAME
        path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write bundle to {directory}: {exc}") from exc
    return path


def read_manifest(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileMissing(f"manifest not found: {path}") from None
    except OSError as exc:
        raise IoError(f"cannot read manifest {path}: {exc}") from exc
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(manifest, dict):
        raise ManifestParseError(f"{path}: manifest must be a JSON object")

    version = manifest.get("format_version")
    if version != FORMAT_VERSION or isinstance(version, bool):
        raise ManifestParseError(f"{path}: unsupported format_version {version!r}")
    if manifest.get("dtype") != STORAGE_DTYPE:
        raise ManifestParseError(f"{path}: unsupported dtype {manifest.get('dtype')!r} (expected {STORAGE_DTYPE!r})")
    for key in ("n", "d"):
        value = manifest.get(key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ManifestParseError(f"{path}: {key} must be a positive integer, got {value!r}")
    for key in ("embeddings_file", "saliency_file"):
        if not isinstance(manifest.get(key), str) or not manifest[key]:
            raise ManifestParseError(f"{path}: missing {key}")
    meta = manifest.get("metadata", {})
    if not isinstance(meta, dict) or not all(isinstance(v, str) for v in meta.values()):
        raise ManifestParseError(f"{path}: metadata must map strings to strings")
    manifest["_path"] = path
    return manifest


def _read_blob(base: Path, name: str, count: int, checksum: Optional[str]) -> np.ndarray:
    path = base / name
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise FileMissing(f"bundle file not found: {path}") from None
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if len(raw) != 4 * count:
        raise SizeMismatch(f"{path}: expected {4 * count} bytes, found {len(raw)}")
    if checksum is not None and _sha256(raw) != checksum:
        raise ChecksumMismatch(f"{path}: sha256 does not match the manifest")
    return np.frombuffer(raw, dtype=_F32LE).astype(np.float64)


def load_bundle(path) -> tuple[TokenMatrix, SaliencyVector]:
    """Load a bundle from its manifest path (or the directory holding it)."""
    manifest = read_manifest(path)
    base = manifest["_path"].parent
    meta = manifest.get("metadata", {})
    n, d = manifest["n"], manifest["d"]
    emb = _read_blob(base, manifest["embeddings_file"], n * d, meta.get("embeddings_sha256"))
    sal = _read_blob(base, manifest["saliency_file"], n, meta.get("saliency_sha256"))
    return validate_bundle(TokenMatrix(emb.reshape(n, d)), SaliencyVector(sal))


def selection_to_dict(result: SelectionResult, **extra) -> dict:
    doc = {
        "format": SELECTION_FORMAT,
        "version": 1,
        "n": result.n,
        "k": result.k,
        "selected": result.selected.tolist(),
        "step_gains": result.step_gains.tolist(),
        "final_coverage": result.final_coverage.tolist(),
    }
    doc.update(extra)
    return doc


def save_selection(result: SelectionResult, path, **extra) -> Path:
    """Write ``result`` as indented JSON; ``extra`` keys are stored alongside."""
    path = Path(path)
    try:
        path.write_text(json.dumps(selection_to_dict(result, **extra), indent=1) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write selection {path}: {exc}") from exc
    return path


def selection_from_dict(doc) -> SelectionResult:
    if not isinstance(doc, dict) or doc.get("format") != SELECTION_FORMAT:
        raise ParseError("not a selection document")
    if doc.get("version") != 1:
        raise ParseError(f"unsupported selection version {doc.get('version')!r}")
    try:
        k, n = doc["k"], doc["n"]
        selected, gains, cov = doc["selected"], doc["step_gains"], doc["final_coverage"]
    except KeyError as exc:
        raise ParseError(f"selection document lacks {exc}") from None
    if not isinstance(selected, list) or not isinstance(gains, list) or not isinstance(cov, list):
        raise ParseError("selected, step_gains and final_coverage must be lists")
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ParseError(f"k must be a positive integer, got {k!r}")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in selected):
        raise ParseError("selected indices must be integers")
    if len(selected) != k:
        raise ParseError(f"k={k} but {len(selected)} indices listed")
    if len(set(selected)) != len(selected):
        raise ParseError("duplicate indices in selection")
    if not isinstance(n, int) or len(cov) != n:
        raise ParseError(f"n={n!r} but final_coverage has {len(cov)} entries")
    try:
        return SelectionResult(np.array(selected, dtype=np.int64), np.array(gains, dtype=np.float64),
                               np.array(cov, dtype=np.float64))
    except (ScopeError, ValueError, TypeError) as exc:
        raise ParseError(f"invalid selection: {exc}") from None


def load_selection(path) -> SelectionResult:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileMissing(f"selection file not found: {path}") from None
    except OSError as exc:
        raise IoError(f"cannot read selection {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return selection_from_dict(doc)


def load_csv_fixture(path) -> tuple[TokenMatrix, SaliencyVector]:
    """Read a hand-written fixture: columns ``d0, d1, ...`` plus ``saliency``."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise FileMissing(f"fixture not found: {path}") from None
    if not rows:
        raise ParseError(f"{path}: empty fixture")
    header = [h.strip() for h in rows[0]]
    dims = [h for h in header if h != "saliency"]
    if "saliency" not in header or dims != [f"d{i}" for i in range(len(dims))] or not dims:
        raise ParseError(f"{path}: header must be d0,d1,...,saliency")
    col = {name: i for i, name in enumerate(header)}
    body = [r for r in rows[1:] if any(cell.strip() for cell in r)]
    try:
        emb = [[float(r[col[name]]) for name in dims] for r in body]
        sal = [float(r[col["saliency"]]) for r in body]
    except (ValueError, IndexError) as exc:
        raise ParseError(f"{path}: malformed row ({exc})") from None
    if not body:
        raise ParseError(f"{path}: fixture has no tokens")
    return validate_bundle(TokenMatrix(np.array(emb)), SaliencyVector(np.array(sal)))


def save_csv_fixture(tokens: TokenMatrix, saliency: SaliencyVector, path) -> Path:
    tokens, saliency = validate_bundle(tokens, saliency)
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"d{i}" for i in range(tokens.d)] + ["saliency"])
        for row, s in zip(tokens.data, saliency.scores):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(s))])
    return path

