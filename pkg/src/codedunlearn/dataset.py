"""Dataset loading, normalization, splitting, synthesis, and percentile filters."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from .errors import (
    BadSplitSize,
    EmptyResult,
    InvalidSpec,
    MissingColumn,
    ParseError,
)

SYNTHETIC_KINDS = ("lognormal-poly", "chisquare-poly", "mlp", "gaussian-linear")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus response vector with stable per-sample ids."""

    features: np.ndarray
    response: np.ndarray
    ids: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=float))
        object.__setattr__(self, "response", np.asarray(self.response, dtype=float))
        object.__setattr__(self, "ids", np.asarray(self.ids, dtype=int))
        if self.features.ndim != 2 or self.response.ndim != 1:
            raise ValueError("features must be 2-d and response 1-d")
        n = self.features.shape[0]
        if self.response.shape[0] != n or self.ids.shape[0] != n:
            raise ValueError("features, response, and ids must have equal length")
        if len(set(self.ids.tolist())) != n:
            raise ValueError("ids must be unique")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> "Dataset":
        """Row subset (boolean mask or integer index array), ids preserved."""
        return Dataset(self.features[index], self.response[index], self.ids[index])


@dataclass(frozen=True)
class NormalizationRecord:
    """Per-column train-split min/max used for the [0, 1] affine maps."""

    feature_min: np.ndarray
    feature_max: np.ndarray
    response_min: float
    response_max: float

    def apply(self, ds: Dataset) -> Dataset:
        span = self.feature_max - self.feature_min
        safe = np.where(span > 0, span, 1.0)
        feats = np.where(span > 0, (ds.features - self.feature_min) / safe, 0.0)
        yspan = self.response_max - self.response_min
        if yspan > 0:
            resp = (ds.response - self.response_min) / yspan
        else:
            resp = np.zeros_like(ds.response)
        return Dataset(feats, resp, ds.ids)

    def denormalize_features(self, feats: np.ndarray) -> np.ndarray:
        return feats * (self.feature_max - self.feature_min) + self.feature_min

    def denormalize_response(self, resp: np.ndarray) -> np.ndarray:
        return resp * (self.response_max - self.response_min) + self.response_min


def load_csv(path, response_column) -> Dataset:
    """Read an all-numeric CSV with one header row.

    response_column selects the response by header name or zero-based index;
    remaining columns become features in file order.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if isinstance(response_column, int):
            if not 0 <= response_column < len(header):
                raise MissingColumn(
                    f"{path}: column index {response_column} out of range"
                )
            resp_idx = response_column
        else:
            try:
                resp_idx = header.index(str(response_column))
            except ValueError:
                raise MissingColumn(
                    f"{path}: no column named {response_column!r}"
                ) from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}"
                )
            parsed = []
            for col, cell in zip(header, row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path}: row {lineno}, column {col!r}: "
                        f"non-numeric cell {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    response = data[:, resp_idx]
    features = np.delete(data, resp_idx, axis=1)
    return Dataset(features, response, np.arange(len(rows)))


def write_csv(ds: Dataset, path, response_name: str = "y",
              feature_names=None) -> None:
    """Write a Dataset as CSV; floats are formatted with repr so that
    load_csv round-trips bit-exactly."""
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(ds.num_features)]
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + [response_name])
        for i in range(ds.n):
            writer.writerow(
                [repr(float(v)) for v in ds.features[i]]
                + [repr(float(ds.response[i]))]
            )


def normalize(train: Dataset, test: Dataset):
    """Min-max map each train column (features and response) onto [0, 1] and
    apply the same affine maps to the test split.

    Test values may fall outside [0, 1]; constant train columns map to 0.
    """
    record = NormalizationRecord(
        feature_min=train.features.min(axis=0),
        feature_max=train.features.max(axis=0),
        response_min=float(train.response.min()),
        response_max=float(train.response.max()),
    )
    return record.apply(train), record.apply(test), record


def split(ds: Dataset, n_train: int, seed) -> tuple[Dataset, Dataset]:
    """Deterministic shuffle under seed; first n_train rows become train."""
    if not 0 < n_train < ds.n:
        raise BadSplitSize(f"n_train={n_train} must be in (0, {ds.n})")
    perm = np.random.default_rng(seed).permutation(ds.n)
    return ds.subset(perm[:n_train]), ds.subset(perm[n_train:])


def poly_expand(X: np.ndarray, degree: int) -> np.ndarray:
    """[X, X^2, ..., X^degree] with element-wise powers, no interaction terms."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    return np.hstack([X**c for c in range(1, degree + 1)])


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic regression dataset.

    kinds:
      lognormal-poly : lognormal(mu, sigma2) features, response from a
                       degree-`degree` element-wise polynomial with standard
                       normal coefficients and noise
      chisquare-poly : chi-square(dof) features, same polynomial response
      mlp            : lognormal features passed through a random
                       sigmoid MLP (layer_widths) with a linear output node
      gaussian-linear: standard normal features, linear response
    """

    kind: str
    n: int
    d: int
    mu: float = 1.0
    sigma2: float = 4.0
    dof: int = 1
    degree: int | None = None
    layer_widths: tuple[int, ...] = (50, 25, 50)
    seed: int = 0
    expose_expanded: bool = False

    def resolved_degree(self) -> int:
        if self.degree is not None:
            return self.degree
        return {"lognormal-poly": 3, "chisquare-poly": 4}.get(self.kind, 1)


def gen_synthetic(spec: SyntheticSpec) -> Dataset:
    """Deterministic synthesis: identical specs (seed included) yield
    identical datasets.

    The returned features are the original draws X; the polynomial expansion
    or MLP is used only to produce the response, unless expose_expanded is
    set, in which case the expanded polynomial features are returned.
    """
    if spec.kind not in SYNTHETIC_KINDS:
        raise InvalidSpec(f"unknown kind {spec.kind!r}")
    if spec.n < 1 or spec.d < 1:
        raise InvalidSpec("n and d must be positive")
    if spec.sigma2 < 0:
        raise InvalidSpec("sigma2 must be nonnegative")
    rng = np.random.default_rng(spec.seed)

    if spec.kind in ("lognormal-poly", "chisquare-poly"):
        degree = spec.resolved_degree()
        if degree < 1:
            raise InvalidSpec("degree must be >= 1")
        if spec.kind == "lognormal-poly":
            X = rng.lognormal(spec.mu, np.sqrt(spec.sigma2), (spec.n, spec.d))
        else:
            if spec.dof < 1:
                raise InvalidSpec("dof must be >= 1")
            X = rng.chisquare(spec.dof, (spec.n, spec.d))
        Xp = poly_expand(X, degree)
        w = rng.standard_normal(Xp.shape[1])
        eps = rng.standard_normal(spec.n)
        y = Xp @ w + eps
        feats = Xp if spec.expose_expanded else X
        return Dataset(feats, y, np.arange(spec.n))

    if spec.kind == "mlp":
        if not spec.layer_widths:
            raise InvalidSpec("mlp kind requires nonempty layer_widths")
        X = rng.lognormal(spec.mu, np.sqrt(spec.sigma2), (spec.n, spec.d))
        h = X
        for width in spec.layer_widths:
            W = rng.standard_normal((h.shape[1], width))
            b = rng.standard_normal(width)
            h = expit(h @ W + b)
        w_out = rng.standard_normal(h.shape[1])
        b_out = rng.standard_normal()
        y = h @ w_out + b_out + rng.standard_normal(spec.n)
        return Dataset(X, y, np.arange(spec.n))

    # gaussian-linear
    X = rng.standard_normal((spec.n, spec.d))
    w = rng.standard_normal(spec.d)
    y = X @ w + rng.standard_normal(spec.n)
    return Dataset(X, y, np.arange(spec.n))


def remove_by_percentile(ds: Dataset, p: float, mode: str,
                         columns=None) -> Dataset:
    """Drop samples relative to the per-column [p, 100-p] percentile band.

    outliers mode drops any sample with ANY banded feature outside the band;
    inliers mode drops any sample with ALL banded features inside it, so the
    two removal sets partition the dataset at matched p.  Percentiles use
    linear interpolation and are computed on ds itself.  `columns` restricts
    the band to a subset of feature columns (e.g. the original features of an
    expanded dataset).
    """
    if not 0 <= p < 50:
        raise ValueError("p must be in [0, 50)")
    if mode not in ("outliers", "inliers"):
        raise ValueError(f"mode must be 'outliers' or 'inliers', got {mode!r}")
    cols = ds.features if columns is None else ds.features[:, columns]
    lo = np.percentile(cols, p, axis=0)
    hi = np.percentile(cols, 100 - p, axis=0)
    inside = ((cols >= lo) & (cols <= hi)).all(axis=1)
    keep = inside if mode == "outliers" else ~inside
    if not keep.any():
        raise EmptyResult(f"remove_by_percentile(p={p}, mode={mode}) "
                          "removed every sample")
    return ds.subset(keep)
