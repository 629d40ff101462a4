"""Random binary generator matrices and linear encoding of training shards.

A generator matrix maps s uncoded shards onto r coded shards (r <= s).  Every
accepted matrix has binary entries, no all-zero row, and exact integer rank r.
Coded shard j is the entrywise sum over uncoded shards i (ascending) of
g[i, j] * shard_i; the ascending order is fixed so the reconstruction
invariant is bitwise checkable despite floating-point non-associativity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DensityOutOfRange,
    DimensionMismatch,
    NonTermination,
    TooFewSamples,
)
from .numerics import binary_rank

RESAMPLE_GUARD = 10**6

MINIMAL = "minimal"


@dataclass(frozen=True)
class GeneratorMatrix:
    """s x r binary code matrix with structural invariants enforced."""

    uncoded_shards: int          # s
    coded_shards: int            # r
    entries: np.ndarray          # (s, r) of 0/1
    density: float               # target density rho
    seed: int | None = None

    def __post_init__(self):
        s, r = self.uncoded_shards, self.coded_shards
        if not 1 <= r <= s:
            raise ValueError(f"need 1 <= r <= s, got s={s}, r={r}")
        G = np.asarray(self.entries, dtype=np.int64)
        object.__setattr__(self, "entries", G)
        if G.shape != (s, r):
            raise DimensionMismatch(f"entries shape {G.shape}, expected {(s, r)}")
        if not np.isin(G, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        if (G.sum(axis=1) == 0).any():
            raise ValueError("generator matrix has an all-zero row")
        if binary_rank(G) != r:
            raise ValueError("generator matrix is not full column rank")

    def row_weight(self, i: int) -> int:
        return int(self.entries[i].sum())

    def nonzero_columns(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.entries[i])


def rate(G: GeneratorMatrix) -> Fraction:
    """Code rate s/r: uncoded-to-coded shard (and sample) compression factor."""
    return Fraction(G.uncoded_shards, G.coded_shards)


def rand_matrix(s: int, r: int, rho: float, seed=None,
                guard: int = RESAMPLE_GUARD) -> GeneratorMatrix:
    """i.i.d. Bernoulli(rho) draws, whole-matrix resampled until no row is
    all-zero, then resampled again until the rank is exactly r.

    The two rejection loops are nested: the zero-row condition is restored
    first on every rank failure.  Densities below 1/r are refused since the
    no-zero-row condition then fails in expectation.
    """
    if not 1 <= r <= s:
        raise ValueError(f"need 1 <= r <= s, got s={s}, r={r}")
    if not 1.0 / r <= rho <= 1.0:
        raise DensityOutOfRange(f"rho={rho} outside [1/{r}, 1]")
    rng = np.random.default_rng(seed)
    draws = 0
    while True:  # outer: full column rank
        while True:  # inner: no all-zero rows
            draws += 1
            if draws > guard:
                raise NonTermination(
                    f"no valid {s}x{r} matrix with rho={rho} after {guard} draws"
                )
            G = (rng.random((s, r)) < rho).astype(np.int64)
            if not (G.sum(axis=1) == 0).any():
                break
        if binary_rank(G) == r:
            return GeneratorMatrix(s, r, G, rho, seed)


def rand_matrix_minimal(s: int, r: int, seed=None) -> GeneratorMatrix:
    """Minimal-density generator: exactly one 1 per row with every column
    used (which for one-hot rows is equivalent to full column rank).

    Coverage is built in rather than rejection-sampled -- tight shapes such
    as 62x57 make whole-matrix rejection a coupon-collector dead end -- by
    planting a random permutation of the columns on r random rows and
    assigning the rest uniformly.  Density 1/r in expectation; each sample
    lands in exactly one coded shard, giving the cheapest unlearning at the
    chosen rate."""
    if not 1 <= r <= s:
        raise ValueError(f"need 1 <= r <= s, got s={s}, r={r}")
    rng = np.random.default_rng(seed)
    cols = rng.integers(0, r, s)
    planted = rng.choice(s, size=r, replace=False)
    cols[planted] = rng.permutation(r)
    G = np.zeros((s, r), dtype=np.int64)
    G[np.arange(s), cols] = 1
    return GeneratorMatrix(s, r, G, 1.0 / r, seed)


def _combine(shards: list[np.ndarray], coeffs: np.ndarray) -> np.ndarray:
    """Sum coeffs[i] * shards[i] over ascending i; fixed order on purpose."""
    acc = np.zeros_like(shards[0])
    for i in range(len(shards)):
        if coeffs[i]:
            acc = acc + coeffs[i] * shards[i]
    return acc


@dataclass
class CodedStore:
    """The r coded shards plus the bookkeeping needed to unlearn by id.

    base_features/base_response hold the encoded-input rows (projected
    features when a projection is in use) of every non-dropped training
    sample, in shard order; slot_of maps a sample id to its (uncoded shard,
    within-shard row).  Coded shard j always equals the ascending-order sum
    of g[i, j] times the surviving rows of uncoded shard i.

    Concurrent reads are safe; unlearning mutation requires exclusive access.
    """

    coded_features: list[np.ndarray]
    coded_response: list[np.ndarray]
    shard_size: int
    generator: GeneratorMatrix
    base_features: np.ndarray
    base_response: np.ndarray
    ids: np.ndarray
    slot_of: dict[int, tuple[int, int]]
    dropped_ids: list[int]
    unlearned_ids: set[int] = field(default_factory=set)

    def _base_row(self, shard: int, row: int) -> int:
        return shard * self.shard_size + row

    def surviving_shard(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Uncoded shard i with unlearned rows zeroed out."""
        lo = i * self.shard_size
        hi = lo + self.shard_size
        X = self.base_features[lo:hi].copy()
        y = self.base_response[lo:hi].copy()
        for row in range(self.shard_size):
            if int(self.ids[lo + row]) in self.unlearned_ids:
                X[row] = 0.0
                y[row] = 0.0
        return X, y

    def rebuild_coded_shard(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Recompute coded shard j from surviving samples, ascending order."""
        G = self.generator.entries
        xs, ys = zip(*(self.surviving_shard(i)
                       for i in range(self.generator.uncoded_shards)))
        return _combine(list(xs), G[:, j]), _combine(list(ys), G[:, j])

    def rebuild_coded_row(self, j: int, row: int) -> tuple[np.ndarray, float]:
        """Recompute one coded row from surviving contributors."""
        G = self.generator.entries
        x = np.zeros(self.base_features.shape[1])
        y = np.zeros(())
        for i in range(self.generator.uncoded_shards):
            g = G[i, j]
            if not g:
                continue
            base = self._base_row(i, row)
            if int(self.ids[base]) in self.unlearned_ids:
                continue
            x = x + g * self.base_features[base]
            y = y + g * self.base_response[base]
        return x, float(y)


def encode(features, response, ids, G: GeneratorMatrix) -> CodedStore:
    """Partition the first floor(n/s)*s rows into s contiguous equal shards
    and linearly combine them into r coded shards per the generator matrix.

    Trailing rows that do not fill a shard are dropped (recorded in
    dropped_ids) rather than padded.
    """
    features = np.asarray(features, dtype=float)
    response = np.asarray(response, dtype=float)
    ids = np.asarray(ids, dtype=int)
    if features.ndim != 2 or features.shape[0] != response.shape[0] \
            or ids.shape[0] != features.shape[0]:
        raise DimensionMismatch("features, response, and ids must align")
    s, r = G.uncoded_shards, G.coded_shards
    n = features.shape[0]
    if n < s:
        raise TooFewSamples(f"{n} samples cannot fill {s} shards")
    nbar = n // s
    used = nbar * s
    dropped = [int(v) for v in ids[used:]]
    shards_X = [features[i * nbar:(i + 1) * nbar] for i in range(s)]
    shards_y = [response[i * nbar:(i + 1) * nbar] for i in range(s)]
    coded_X = [_combine(shards_X, G.entries[:, j]) for j in range(r)]
    coded_y = [_combine(shards_y, G.entries[:, j]) for j in range(r)]
    slot_of = {
        int(ids[i * nbar + k]): (i, k)
        for i in range(s)
        for k in range(nbar)
    }
    return CodedStore(
        coded_features=coded_X,
        coded_response=coded_y,
        shard_size=nbar,
        generator=G,
        base_features=features[:used].copy(),
        base_response=response[:used].copy(),
        ids=ids[:used].copy(),
        slot_of=slot_of,
        dropped_ids=dropped,
    )
