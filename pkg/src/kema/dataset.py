"""Domain datasets: a feature matrix with columns as samples plus per-sample
class labels (0 = unlabeled), and the CSV interchange format
``label,f0,f1,...,f{d-1}`` used by the command-line tools."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError
from .linalg import check_finite


@dataclass
class DomainDataset:
    """One domain: features (d x n, columns are samples) and integer labels.

    Label 0 marks an unlabeled sample; classes are 1..C.
    """

    features: np.ndarray
    labels: np.ndarray
    domain_id: str = "domain"

    def __post_init__(self):
        self.features = check_finite(self.features, f"{self.domain_id} features")
        if self.features.ndim != 2:
            raise DataError(f"{self.domain_id}: features must be 2-D (d x n)")
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.ndim != 1 or self.labels.shape[0] != self.features.shape[1]:
            raise DataError(
                f"{self.domain_id}: need one label per sample "
                f"({self.features.shape[1]} samples, {self.labels.shape} labels)"
            )
        if self.features.shape[0] < 1 or self.features.shape[1] < 1:
            raise DataError(f"{self.domain_id}: empty dataset")
        if (self.labels < 0).any():
            raise DataError(f"{self.domain_id}: labels must be >= 0 (0 = unlabeled)")

    @property
    def dim(self):
        return self.features.shape[0]

    @property
    def n_samples(self):
        return self.features.shape[1]

    @property
    def labeled_mask(self):
        return self.labels > 0

    @property
    def n_labeled(self):
        return int(np.count_nonzero(self.labels))

    def labeled_features(self):
        return self.features[:, self.labeled_mask]


def save_csv(path, dataset):
    """Write a dataset as ``label,f0,...`` rows; deterministic formatting."""
    d = dataset.dim
    header = "label," + ",".join(f"f{i}" for i in range(d))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for j in range(dataset.n_samples):
            vals = ",".join(repr(float(v)) for v in dataset.features[:, j])
            fh.write(f"{int(dataset.labels[j])},{vals}\n")


def load_csv(path, domain_id=None):
    """Read a dataset written by :func:`save_csv`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if not cols or cols[0] != "label":
            raise DataError(f"{path}: expected header starting with 'label'")
        rows = []
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise DataError(f"{path}:{line_no}: expected {len(cols)} fields")
            rows.append(parts)
    if not rows:
        raise DataError(f"{path}: no samples")
    labels = np.array([int(r[0]) for r in rows])
    feats = np.array([[float(v) for v in r[1:]] for r in rows]).T
    return DomainDataset(
        features=feats,
        labels=labels,
        domain_id=domain_id or str(path),
    )
