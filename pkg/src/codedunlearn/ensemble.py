"""Master-node protocol: coded learning, prediction, unlearning, and the
retrain-from-scratch equivalence check.

Weak learners are closed-form ridge solutions on coded shards; the aggregate
model is the arithmetic mean of their weight vectors.  Unlearning removes a
sample's contribution from every coded row it touches and retrains exactly
the affected learners from scratch, which reproduces the model that would
have been trained without the sample (the ridge solution is unique, so no
initialization state matters).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import coding
from .coding import MINIMAL, CodedStore, GeneratorMatrix, encode
from .dataset import Dataset
from .errors import AlreadyUnlearned, DimensionMismatch, UnknownSample
from .numerics import ridge_solve
from .projections import ProjectionMap, project

DEFAULT_TOLERANCE = 1e-8


@dataclass
class EnsembleModel:
    """Per-learner weight columns plus their mean, with the artifacts
    (generator matrix, optional projection map) needed to reproduce them."""

    weights: np.ndarray                 # (D', r)
    agg: np.ndarray                     # (D',)
    lam: float
    generator: GeneratorMatrix
    projection: ProjectionMap | None = None

    @property
    def num_learners(self) -> int:
        return self.weights.shape[1]

    def encode_input(self, X_raw) -> np.ndarray:
        X_raw = np.asarray(X_raw, dtype=float)
        if self.projection is not None:
            return project(self.projection, X_raw)
        return X_raw


@dataclass
class AffectedReport:
    """Which learners an unlearn request touched and what the retrain cost."""

    unlearned_ids: list[int]
    affected_learners: list[int]
    retrain_seconds: dict[int, float]
    total_seconds: float

    @property
    def num_affected(self) -> int:
        return len(self.affected_learners)


@dataclass
class VerificationReport:
    """Relative weight discrepancies between the live model and a full
    retrain on the surviving samples with the same code and feature map."""

    per_learner: np.ndarray
    agg_discrepancy: float
    tolerance: float
    passed: bool

    @property
    def max_discrepancy(self) -> float:
        worst = float(self.per_learner.max()) if self.per_learner.size else 0.0
        return max(worst, self.agg_discrepancy)


def _make_generator(s: int, r: int, rho, seed) -> GeneratorMatrix:
    if s == 1:
        if r != 1:
            raise ValueError("s == 1 requires r == 1")
        return GeneratorMatrix(1, 1, np.array([[1]]), 1.0, seed)
    if rho == MINIMAL:
        return coding.rand_matrix_minimal(s, r, seed)
    return coding.rand_matrix(s, r, float(rho), seed)


def learn(train: Dataset, s: int, r: int, rho, lam: float,
          projection: ProjectionMap | None = None, seed=None,
          generator: GeneratorMatrix | None = None,
          ) -> tuple[EnsembleModel, CodedStore, GeneratorMatrix]:
    """Train the coded ensemble.

    rho is a Bernoulli density in [1/r, 1] or the string "minimal" for
    one-hot rows.  With s == 1 the code degenerates to G = [[1]] and the
    model equals a single learner on the full training set.  A pre-built
    generator may be supplied to reuse an existing code.
    """
    feats = project(projection, train.features) if projection is not None \
        else train.features
    if generator is None:
        generator = _make_generator(s, r, rho, seed)
    store = encode(feats, train.response, train.ids, generator)
    weights = np.column_stack([
        ridge_solve(store.coded_features[j], store.coded_response[j], lam)
        for j in range(generator.coded_shards)
    ])
    model = EnsembleModel(
        weights=weights,
        agg=weights.mean(axis=1),
        lam=lam,
        generator=generator,
        projection=projection,
    )
    return model, store, generator


def predict(model: EnsembleModel, X_raw) -> np.ndarray:
    """Predict through the aggregate weights, bypassing per-learner outputs."""
    feats = model.encode_input(X_raw)
    if feats.shape[1] != model.agg.shape[0]:
        raise DimensionMismatch(
            f"predict: {feats.shape[1]} features vs {model.agg.shape[0]} weights"
        )
    return feats @ model.agg


def unlearn(model: EnsembleModel, store: CodedStore, ids,
            ) -> tuple[EnsembleModel, CodedStore, AffectedReport]:
    """Remove the listed samples and retrain only the affected learners.

    For every sample: locate its (uncoded shard, row), find the nonzero
    generator-row columns, and remove its contribution from the matching
    coded row of each of those shards.  The touched rows are recomputed from
    their surviving contributors in the same ascending order used at encode
    time, so the reconstruction invariant stays bitwise exact.  One retrain
    per unique affected learner, regardless of batch size.
    """
    ids = [int(u) for u in ids]
    for u in ids:
        if u in store.unlearned_ids:
            raise AlreadyUnlearned(f"sample {u} was already unlearned")
        if u not in store.slot_of:
            raise UnknownSample(f"sample {u} is not in the learned training set")
    if len(set(ids)) != len(ids):
        raise AlreadyUnlearned("duplicate ids in one unlearn request")

    G = store.generator
    touched: set[tuple[int, int]] = set()   # (coded shard, row)
    for u in ids:
        store.unlearned_ids.add(u)
        shard, row = store.slot_of[u]
        for j in G.nonzero_columns(shard):
            touched.add((int(j), row))
    for j, row in sorted(touched):
        x, yv = store.rebuild_coded_row(j, row)
        store.coded_features[j][row] = x
        store.coded_response[j][row] = yv

    affected = sorted({j for j, _ in touched})
    retrain_seconds: dict[int, float] = {}
    total = 0.0
    for j in affected:
        t0 = time.perf_counter()
        model.weights[:, j] = ridge_solve(
            store.coded_features[j], store.coded_response[j], model.lam
        )
        dt = time.perf_counter() - t0
        retrain_seconds[j] = dt
        total += dt
    model.agg = model.weights.mean(axis=1)
    report = AffectedReport(
        unlearned_ids=ids,
        affected_learners=affected,
        retrain_seconds=retrain_seconds,
        total_seconds=total,
    )
    return model, store, report


def _rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    denom = np.linalg.norm(b)
    diff = float(np.linalg.norm(a - b))
    if diff == 0.0:
        return 0.0
    return diff / max(denom, np.finfo(float).tiny)


def verify_perfect_unlearning(model: EnsembleModel, store: CodedStore,
                              tolerance: float = DEFAULT_TOLERANCE,
                              ) -> VerificationReport:
    """Rebuild every coded shard from the surviving samples, retrain all
    learners, and compare weights against the live model.

    Report-only: passes iff the worst relative discrepancy (per learner and
    for the aggregate) is within tolerance.  With no unlearned samples the
    rebuild reproduces the encode-time sums bitwise and the discrepancy is
    exactly zero.
    """
    r = store.generator.coded_shards
    fresh = np.empty_like(model.weights)
    for j in range(r):
        X, y = store.rebuild_coded_shard(j)
        fresh[:, j] = ridge_solve(X, y, model.lam)
    per_learner = np.array([
        _rel_diff(model.weights[:, j], fresh[:, j]) for j in range(r)
    ])
    agg_disc = _rel_diff(model.agg, fresh.mean(axis=1))
    worst = max(per_learner.max(initial=0.0), agg_disc)
    return VerificationReport(
        per_learner=per_learner,
        agg_discrepancy=agg_disc,
        tolerance=tolerance,
        passed=bool(worst <= tolerance),
    )
