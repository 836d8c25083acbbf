"""File formats used by the command line: CSV, manifest JSON, PGM.

Every writer is atomic (temp file in the target directory, then
``os.replace``) and byte-deterministic: floats are serialised with
``repr``, which is the shortest round-tripping decimal form, and JSON
keys are sorted. Two runs with identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .clustering import Dendrogram, Partition
from .copula import RNG_ALGORITHM
from .distances import DistanceMatrix
from .errors import InvalidInput
from .experiments import BenchmarkDataset, SweepGrid

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


def _atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode("utf-8"))


def write_series_csv(path, series) -> None:
    """Write a (T, d) series as CSV with header ``x1,...,xd``."""
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise InvalidInput(f"series must be a non-empty 2-D array, got {arr.shape}")
    header = ",".join(f"x{j + 1}" for j in range(arr.shape[1]))
    lines = [header]
    for row in arr:
        lines.append(",".join(repr(float(v)) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_series_csv(path) -> np.ndarray:
    """Read a series CSV written by :func:`write_series_csv`.

    Raises :class:`InvalidInput` on malformed content; I/O errors
    propagate as ``OSError``.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise InvalidInput(f"{path}: expected a header and at least one row")
    header = lines[0].split(",")
    d = len(header)
    if header != [f"x{j + 1}" for j in range(d)]:
        raise InvalidInput(f"{path}: unexpected header {lines[0]!r}")
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != d:
            raise InvalidInput(f"{path}: line {ln} has {len(parts)} fields, expected {d}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise InvalidInput(f"{path}: line {ln} is not numeric") from exc
    return np.asarray(rows, dtype=float)


def write_dataset(directory, dataset: BenchmarkDataset) -> Path:
    """Write one CSV per object plus a manifest; returns the manifest path.

    Paths inside the manifest are relative to the directory, so the tree
    can be moved or compared byte for byte.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for obj in dataset.objects:
        filename = f"{obj.label}.csv"
        write_series_csv(directory / filename, obj.series)
        entries.append({"label": obj.label, "path": filename})
    manifest = {
        "version": MANIFEST_VERSION,
        "objects": entries,
        "generator": {
            "algorithm": RNG_ALGORITHM,
            "seed": dataset.seed,
            "n_samples": dataset.n_samples,
            "per_cluster": dataset.per_cluster,
            "rhos": list(dataset.rhos),
        },
    }
    path = directory / MANIFEST_NAME
    _atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> dict:
    """Parse and validate a dataset manifest."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        manifest = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: not valid JSON") from exc
    if not isinstance(manifest, dict) or manifest.get("version") != MANIFEST_VERSION:
        raise InvalidInput(
            f"{path}: expected manifest version {MANIFEST_VERSION}"
        )
    objects = manifest.get("objects")
    if not isinstance(objects, list) or not objects:
        raise InvalidInput(f"{path}: manifest lists no objects")
    labels = []
    for entry in objects:
        if not isinstance(entry, dict) or "label" not in entry or "path" not in entry:
            raise InvalidInput(f"{path}: malformed object entry {entry!r}")
        labels.append(entry["label"])
    if len(set(labels)) != len(labels):
        raise InvalidInput(f"{path}: object labels must be unique")
    return manifest


def resolve_manifest_paths(manifest_path, manifest: dict) -> list[tuple[str, Path]]:
    """Resolve the relative object paths against the manifest location."""
    base = Path(manifest_path).parent
    return [(entry["label"], base / entry["path"]) for entry in manifest["objects"]]


def write_distance_matrix_csv(path, dm: DistanceMatrix) -> None:
    """Labelled square CSV: first column and header row carry the labels."""
    lines = ["label," + ",".join(dm.labels)]
    for label, row in zip(dm.labels, dm.values):
        lines.append(label + "," + ",".join(repr(float(v)) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_sweep_csv(path, grid: SweepGrid) -> None:
    """Square sweep CSV; rho headers are printed with 6 decimals."""
    fmt = [f"{r:.6f}" for r in grid.rhos]
    lines = ["rho," + ",".join(fmt)]
    for name, row in zip(fmt, grid.values):
        lines.append(name + "," + ",".join(repr(float(v)) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_pgm(path, values) -> None:
    """8-bit binary PGM (P5) with linear min-max scaling.

    A constant grid maps to all-black, so the file is always valid.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInput(f"PGM export needs a non-empty 2-D array, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("PGM export needs finite values")
    vmin, vmax = float(arr.min()), float(arr.max())
    if vmax > vmin:
        scaled = np.rint((arr - vmin) / (vmax - vmin) * 255.0)
    else:
        scaled = np.zeros_like(arr)
    pixels = scaled.astype(np.uint8)
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    _atomic_write_bytes(path, header + pixels.tobytes())


def write_cluster_json(
    path,
    labels,
    tree: Dendrogram,
    partition: Partition,
    distance_matrix_path: str,
) -> None:
    """Clustering result as deterministic JSON."""
    payload = {
        "labels": list(labels),
        "k": partition.k,
        "assignment": list(partition.assignment),
        "merges": [
            {
                "left": m.left,
                "right": m.right,
                "height": m.height,
                "size": m.size,
            }
            for m in tree.merges
        ],
        "monotone": tree.monotone,
        "distance_matrix_path": distance_matrix_path,
    }
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
