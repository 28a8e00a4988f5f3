"""Controlled-distortion toy experiments: three-class Archimedean spirals with
scaling, rotation, class-order inversion, line-shape replacement and
dimensionality lifts.

The exact spiral parameterization is pinned by the constants below; the two
domains of each experiment are generated from the same parameter draws, so
sample j of domain 1 corresponds to sample j of domain 2 (inversion errors are
measured against this pairing).
"""

from dataclasses import dataclass

import numpy as np

from .dataset import DomainDataset
from .exceptions import DataError, NotPlanar, UnknownExperiment

# Archimedean spiral r = PITCH * theta over [THETA_MIN, THETA_MAX]; classes are
# contiguous equal angular segments, innermost first.
PITCH = 0.3
THETA_MIN = 0.5 * np.pi
THETA_MAX = 3.0 * np.pi
DEFAULT_NOISE = 0.05
# third coordinate appended as LIFT_COEF * r^2 (smooth in the planar radius)
LIFT_COEF = 0.3
DEFAULT_SCALE = 1.8
DEFAULT_ROTATION = np.pi / 3


@dataclass(frozen=True)
class DistortionSpec:
    """Deformation pipeline applied, in order: as_line, reverse_class_order,
    scale, rotation, add_third_dim, extra noise."""

    scale: float = None
    rotation: float = None
    reverse_class_order: bool = False
    as_line: bool = False
    add_third_dim: bool = False
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.scale is not None and not self.scale > 0:
            raise DataError(f"scale must be positive, got {self.scale}")
        if self.noise_std < 0:
            raise DataError("noise_std must be nonnegative")

    @property
    def output_dim(self):
        return 3 if self.add_third_dim else 2


@dataclass(frozen=True)
class ToyExperiment:
    id: int
    domain1_spec: DistortionSpec
    domain2_spec: DistortionSpec
    n_labeled_per_class: int = 20
    n_unlabeled: int = 1000
    n_test: int = 1000


def _mean_radius():
    """E[r] for r = PITCH * theta, theta uniform on [THETA_MIN, THETA_MAX]."""
    return PITCH * 0.5 * (THETA_MIN + THETA_MAX)


def _mean_sq_radius():
    """E[r^2] under the same uniform theta distribution."""
    return PITCH**2 * (THETA_MIN**2 + THETA_MIN * THETA_MAX + THETA_MAX**2) / 3.0


def _class_theta_bounds(classes):
    edges = np.linspace(THETA_MIN, THETA_MAX, classes + 1)
    return list(zip(edges[:-1], edges[1:]))


def _spiral_xy(theta):
    r = PITCH * theta
    return np.vstack([r * np.cos(theta), r * np.sin(theta)])


def gen_spiral(n_per_class, classes=3, noise_std=DEFAULT_NOISE, seed=0):
    """A 2-D three-class spiral dataset; labels 1..classes, deterministic in seed."""
    if n_per_class < 1 or classes < 2:
        raise DataError("need n_per_class >= 1 and classes >= 2")
    rng = np.random.default_rng(seed)
    thetas, labels = [], []
    for c, (lo, hi) in enumerate(_class_theta_bounds(classes), start=1):
        t = rng.uniform(lo, hi, size=n_per_class)
        thetas.append(t)
        labels.append(np.full(n_per_class, c))
    theta = np.concatenate(thetas)
    X = _spiral_xy(theta)
    if noise_std > 0:
        X = X + rng.normal(0.0, noise_std, size=X.shape)
    return DomainDataset(X, np.concatenate(labels), domain_id="spiral")


def apply_distortion(ds, spec):
    """Apply a distortion pipeline to a planar dataset."""
    if ds.dim != 2:
        raise NotPlanar(f"{ds.domain_id}: distortions require 2-D input, got d={ds.dim}")
    X = ds.features.copy()
    y = ds.labels.copy()
    if spec.as_line:
        radius = np.linalg.norm(X, axis=0)
        # subtract the analytic mean radius so the line stays centered
        X = np.vstack([radius - _mean_radius(), np.zeros_like(radius)])
    if spec.reverse_class_order:
        C = int(y.max())
        lab = y > 0
        y[lab] = C + 1 - y[lab]
    if spec.scale is not None:
        X = spec.scale * X
    if spec.rotation is not None:
        c, s = np.cos(spec.rotation), np.sin(spec.rotation)
        X = np.array([[c, -s], [s, c]]) @ X
    if spec.add_third_dim:
        r = np.linalg.norm(X, axis=0)
        s = spec.scale if spec.scale is not None else 1.0
        # center the lift with the analytic E[r^2]; an all-positive coordinate
        # unbalances the sign structure of linear-kernel alignment blocks
        if spec.as_line:
            er2 = PITCH**2 * (THETA_MAX - THETA_MIN) ** 2 / 12.0
        else:
            er2 = _mean_sq_radius()
        X = np.vstack([X, LIFT_COEF * (r * r - s * s * er2)])
    if spec.noise_std > 0:
        rng = np.random.default_rng(spec.seed)
        X = X + rng.normal(0.0, spec.noise_std, size=X.shape)
    return DomainDataset(X, y, domain_id=ds.domain_id)


_PRESETS = {
    1: (DistortionSpec(), DistortionSpec(scale=DEFAULT_SCALE)),
    2: (
        DistortionSpec(add_third_dim=True),
        DistortionSpec(scale=DEFAULT_SCALE),
    ),
    3: (
        DistortionSpec(as_line=True, add_third_dim=True),
        DistortionSpec(add_third_dim=True),
    ),
    4: (
        DistortionSpec(add_third_dim=True),
        DistortionSpec(
            scale=DEFAULT_SCALE,
            rotation=DEFAULT_ROTATION,
            reverse_class_order=True,
            add_third_dim=True,
        ),
    ),
}


def experiment_preset(exp_id, fig2_counts=False):
    """Fixed two-domain configurations 1..4.

    Default sample counts: 20 labeled per class, 1000 unlabeled and 1000
    held-out test samples per domain. With ``fig2_counts``: 100 labeled and 50
    unlabeled per class.
    """
    if exp_id not in _PRESETS:
        raise UnknownExperiment(f"experiment id must be 1..4, got {exp_id}")
    d1, d2 = _PRESETS[exp_id]
    if fig2_counts:
        return ToyExperiment(exp_id, d1, d2, n_labeled_per_class=100, n_unlabeled=150)
    return ToyExperiment(exp_id, d1, d2)


def _split_counts(total, classes):
    base = total // classes
    counts = [base] * classes
    for i in range(total - base * classes):
        counts[i] += 1
    return counts


def make_experiment_data(exp, seed=0, classes=3):
    """Generate paired train/test datasets for a toy experiment.

    Returns (train, test): two lists of DomainDataset, one entry per domain.
    Train labels keep only n_labeled_per_class labels per class (rest 0);
    test samples are fully labeled. Sample j is paired across domains.
    """
    rng = np.random.default_rng(seed)
    unl = _split_counts(exp.n_unlabeled, classes)
    tst = _split_counts(exp.n_test, classes)

    theta_tr, lab_tr, mask_tr = [], [], []
    theta_te, lab_te = [], []
    for c, (lo, hi) in enumerate(_class_theta_bounds(classes), start=1):
        n_tr = exp.n_labeled_per_class + unl[c - 1]
        theta_tr.append(rng.uniform(lo, hi, size=n_tr))
        lab_tr.append(np.full(n_tr, c))
        mask = np.zeros(n_tr, dtype=bool)
        mask[: exp.n_labeled_per_class] = True
        mask_tr.append(mask)
        theta_te.append(rng.uniform(lo, hi, size=tst[c - 1]))
        lab_te.append(np.full(tst[c - 1], c))
    theta_tr = np.concatenate(theta_tr)
    lab_tr = np.concatenate(lab_tr)
    mask_tr = np.concatenate(mask_tr)
    theta_te = np.concatenate(theta_te)
    lab_te = np.concatenate(lab_te)

    train, test = [], []
    for d, spec in enumerate((exp.domain1_spec, exp.domain2_spec), start=1):
        out = []
        for theta, labels, mask in (
            (theta_tr, lab_tr, mask_tr),
            (theta_te, lab_te, None),
        ):
            X = _spiral_xy(theta)
            X = X + rng.normal(0.0, DEFAULT_NOISE, size=X.shape)
            base = DomainDataset(X, labels, domain_id=f"domain{d}")
            ds = apply_distortion(base, spec)
            if mask is not None:
                shown = np.where(mask, ds.labels, 0)
                ds = DomainDataset(ds.features, shown, domain_id=ds.domain_id)
            out.append(ds)
        train.append(out[0])
        test.append(out[1])
    return train, test
