"""On-disk session directories for the CLI.

Layout:
    manifest.json       resolved config, seed, and artifact hashes
    generator.json      {s, r, rho, seed, rows}
    projection.bin      npz with the frozen feature map (when used)
    shards/shard_<j>.csv   coded shard j (features..., response)
    base.csv            encoded-input rows of the retained training set
    model.csv           weak-learner weight columns plus the aggregate
    store.json          sample-id map, dropped ids, unlearned ids
    unlearn_log.jsonl   append-only audit of unlearn requests

Floats are written with repr so every array round-trips bit-exactly; a
verify run on a freshly loaded session therefore reports discrepancy zero
when nothing was unlearned.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .coding import CodedStore, GeneratorMatrix
from .ensemble import EnsembleModel
from .errors import SessionError
from .projections import load_projection, save_projection

HASHED_FILES = ("generator.json", "model.csv", "base.csv", "store.json")


@contextmanager
def session_lock(directory: Path):
    lock = directory / "lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise SessionError(f"session {directory} is locked by another "
                           "invocation (remove 'lock' if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def _write_matrix_csv(path: Path, header: list[str], matrix: np.ndarray) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in np.atleast_2d(matrix):
            writer.writerow([repr(float(v)) for v in row])


def _read_matrix_csv(path: Path) -> np.ndarray:
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return np.array([[float(c) for c in row] for row in reader])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def save_session(directory, model: EnsembleModel, store: CodedStore,
                 config: dict) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "shards").mkdir(exist_ok=True)

    G = model.generator
    (directory / "generator.json").write_text(json.dumps({
        "s": G.uncoded_shards,
        "r": G.coded_shards,
        "rho": G.density,
        "seed": G.seed if isinstance(G.seed, int) else None,
        "rows": G.entries.tolist(),
    }, indent=2) + "\n")

    if model.projection is not None:
        save_projection(model.projection, directory / "projection.bin")

    width = store.base_features.shape[1]
    feat_cols = [f"f{j}" for j in range(width)]
    for j in range(G.coded_shards):
        _write_matrix_csv(
            directory / "shards" / f"shard_{j}.csv",
            feat_cols + ["y"],
            np.column_stack([store.coded_features[j], store.coded_response[j]]),
        )
    _write_matrix_csv(
        directory / "base.csv",
        ["id"] + feat_cols + ["y"],
        np.column_stack([store.ids.astype(float), store.base_features,
                         store.base_response]),
    )
    _write_matrix_csv(
        directory / "model.csv",
        [f"w{j}" for j in range(G.coded_shards)] + ["agg"],
        np.column_stack([model.weights, model.agg]),
    )
    (directory / "store.json").write_text(json.dumps({
        "shard_size": store.shard_size,
        "dropped_ids": store.dropped_ids,
        "unlearned_ids": sorted(store.unlearned_ids),
        "lambda": model.lam,
    }, indent=2) + "\n")

    manifest = {
        "config": config,
        "saved_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "hashes": {name: _sha256(directory / name) for name in HASHED_FILES},
    }
    manifest["hashes"].update({
        f"shards/shard_{j}.csv": _sha256(directory / "shards" / f"shard_{j}.csv")
        for j in range(G.coded_shards)
    })
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_session(directory) -> tuple[EnsembleModel, CodedStore, dict]:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise SessionError(f"no session at {directory}")
    manifest = json.loads(manifest_path.read_text())
    for name, digest in manifest["hashes"].items():
        target = directory / name
        if not target.exists() or _sha256(target) != digest:
            raise SessionError(f"stale session: {name} does not match manifest")

    gen = json.loads((directory / "generator.json").read_text())
    G = GeneratorMatrix(gen["s"], gen["r"], np.array(gen["rows"]),
                        gen["rho"], gen["seed"])
    meta = json.loads((directory / "store.json").read_text())

    base = _read_matrix_csv(directory / "base.csv")
    ids = base[:, 0].astype(int)
    base_features = base[:, 1:-1]
    base_response = base[:, -1]
    nbar = int(meta["shard_size"])
    slot_of = {int(ids[i * nbar + k]): (i, k)
               for i in range(G.uncoded_shards) for k in range(nbar)}

    coded_features, coded_response = [], []
    for j in range(G.coded_shards):
        data = _read_matrix_csv(directory / "shards" / f"shard_{j}.csv")
        coded_features.append(data[:, :-1])
        coded_response.append(data[:, -1])

    store = CodedStore(
        coded_features=coded_features,
        coded_response=coded_response,
        shard_size=nbar,
        generator=G,
        base_features=base_features,
        base_response=base_response,
        ids=ids,
        slot_of=slot_of,
        dropped_ids=list(meta["dropped_ids"]),
        unlearned_ids=set(meta["unlearned_ids"]),
    )

    wm = _read_matrix_csv(directory / "model.csv")
    pmap = None
    if (directory / "projection.bin").exists():
        pmap = load_projection(directory / "projection.bin")
    model = EnsembleModel(
        weights=wm[:, :-1],
        agg=wm[:, -1],
        lam=float(meta["lambda"]),
        generator=G,
        projection=pmap,
    )
    return model, store, manifest["config"]


def append_unlearn_log(directory, entry: dict) -> None:
    with (Path(directory) / "unlearn_log.jsonl").open("a") as fh:
        fh.write(json.dumps(entry) + "\n")
