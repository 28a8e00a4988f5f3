import numpy as np
import pytest

from kema.dataset import DomainDataset
from kema.exceptions import DataError, NotPlanar, UnknownExperiment
from kema.toydata import (
    PITCH,
    DistortionSpec,
    apply_distortion,
    experiment_preset,
    gen_spiral,
    make_experiment_data,
)


class TestGenSpiral:
    def test_minimal_structure(self):
        ds = gen_spiral(1, noise_std=0.0)
        assert ds.n_samples == 3
        assert np.array_equal(np.sort(ds.labels), [1, 2, 3])
        radii = np.linalg.norm(ds.features, axis=0)
        assert len(np.unique(np.round(radii, 9))) == 3

    def test_deterministic(self):
        a = gen_spiral(10, seed=4)
        b = gen_spiral(10, seed=4)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_noiseless_points_on_spiral(self):
        ds = gen_spiral(50, noise_std=0.0, seed=1)
        r = np.linalg.norm(ds.features, axis=0)
        theta = np.arctan2(ds.features[1], ds.features[0])
        # recover the winding number from the radius, then check r = a*theta
        k = np.round((r / PITCH - theta) / (2.0 * np.pi))
        assert np.allclose(r, PITCH * (theta + 2.0 * np.pi * k), atol=1e-9)

    def test_classes_are_contiguous_radial_segments(self):
        ds = gen_spiral(40, noise_std=0.0, seed=2)
        r = np.linalg.norm(ds.features, axis=0)
        r1, r2, r3 = (r[ds.labels == c] for c in (1, 2, 3))
        assert r1.max() < r2.min() and r2.max() < r3.min()

    def test_bad_arguments(self):
        with pytest.raises(DataError):
            gen_spiral(0)
        with pytest.raises(DataError):
            gen_spiral(5, classes=1)


class TestApplyDistortion:
    def _planar(self, n=30, seed=0):
        return gen_spiral(n, seed=seed)

    def test_identity(self):
        ds = self._planar()
        out = apply_distortion(ds, DistortionSpec())
        assert np.array_equal(out.features, ds.features)
        assert np.array_equal(out.labels, ds.labels)

    def test_scale_doubles_distances(self):
        ds = self._planar()
        out = apply_distortion(ds, DistortionSpec(scale=2.0))
        i, j = 3, 17
        d_in = np.linalg.norm(ds.features[:, i] - ds.features[:, j])
        d_out = np.linalg.norm(out.features[:, i] - out.features[:, j])
        assert np.isclose(d_out, 2.0 * d_in)

    def test_rotation_preserves_norms(self):
        ds = self._planar()
        out = apply_distortion(ds, DistortionSpec(rotation=0.7))
        assert np.allclose(
            np.linalg.norm(out.features, axis=0), np.linalg.norm(ds.features, axis=0)
        )

    def test_reverse_class_order(self):
        ds = self._planar()
        out = apply_distortion(ds, DistortionSpec(reverse_class_order=True))
        assert np.array_equal(out.labels, 4 - ds.labels)
        assert np.array_equal(out.features, ds.features)

    def test_reverse_keeps_unlabeled(self):
        ds = self._planar()
        labels = ds.labels.copy()
        labels[:5] = 0
        ds = DomainDataset(ds.features, labels, domain_id="x")
        out = apply_distortion(ds, DistortionSpec(reverse_class_order=True))
        assert np.all(out.labels[:5] == 0)

    def test_lift_adds_centered_third_dim(self):
        ds = self._planar(n=500, seed=3)
        out = apply_distortion(ds, DistortionSpec(add_third_dim=True))
        assert out.dim == 3
        # lift is a function of the planar radius, centered by construction
        assert abs(out.features[2].mean()) < 0.05 * out.features[2].std()

    def test_line_flattens_to_radius(self):
        ds = self._planar()
        out = apply_distortion(ds, DistortionSpec(as_line=True))
        assert np.allclose(out.features[1], 0.0)

    def test_non_planar_rejected(self):
        ds = self._planar()
        lifted = apply_distortion(ds, DistortionSpec(add_third_dim=True))
        with pytest.raises(NotPlanar):
            apply_distortion(lifted, DistortionSpec())

    def test_bad_spec(self):
        with pytest.raises(DataError):
            DistortionSpec(scale=0.0)
        with pytest.raises(DataError):
            DistortionSpec(noise_std=-1.0)


class TestPresets:
    def test_dims_per_experiment(self):
        expect = {1: (2, 2), 2: (3, 2), 3: (3, 3), 4: (3, 3)}
        for exp_id, (d1, d2) in expect.items():
            preset = experiment_preset(exp_id)
            assert preset.domain1_spec.output_dim == d1
            assert preset.domain2_spec.output_dim == d2

    def test_experiment4_reverses_classes(self):
        preset = experiment_preset(4)
        assert preset.domain2_spec.reverse_class_order
        assert not preset.domain1_spec.reverse_class_order

    def test_default_counts(self):
        preset = experiment_preset(1)
        assert preset.n_labeled_per_class == 20
        assert preset.n_unlabeled == 1000
        assert preset.n_test == 1000

    def test_fig2_counts(self):
        preset = experiment_preset(1, fig2_counts=True)
        assert preset.n_labeled_per_class == 100
        assert preset.n_unlabeled == 150

    def test_unknown_experiment(self):
        with pytest.raises(UnknownExperiment):
            experiment_preset(5)


class TestMakeExperimentData:
    def test_shapes_and_counts(self):
        train, test = make_experiment_data(experiment_preset(2), seed=0)
        assert len(train) == len(test) == 2
        assert train[0].dim == 3 and train[1].dim == 2
        assert train[0].n_samples == 3 * 20 + 1000
        assert test[0].n_samples == 1000
        for c in (1, 2, 3):
            assert np.sum(train[0].labels == c) == 20
        assert np.all(test[0].labels > 0)

    def test_labels_match_across_domains(self):
        train, test = make_experiment_data(experiment_preset(1), seed=1)
        assert np.array_equal(train[0].labels, train[1].labels)
        assert np.array_equal(test[0].labels, test[1].labels)

    def test_pairing_shares_latent_parameter(self):
        # paired samples sit at the same spiral angle: domain-2 radius is the
        # scaled domain-1 radius up to noise
        train, _ = make_experiment_data(experiment_preset(1), seed=2)
        r1 = np.linalg.norm(train[0].features, axis=0)
        r2 = np.linalg.norm(train[1].features, axis=0)
        assert np.corrcoef(r1, r2)[0, 1] > 0.99

    def test_deterministic(self):
        a, _ = make_experiment_data(experiment_preset(3), seed=5)
        b, _ = make_experiment_data(experiment_preset(3), seed=5)
        assert np.array_equal(a[0].features, b[0].features)

    def test_class_reversal_in_experiment4(self):
        train, _ = make_experiment_data(experiment_preset(4), seed=0)
        lab1, lab2 = train[0].labels, train[1].labels
        shown = (lab1 > 0) & (lab2 > 0)
        assert np.array_equal(lab2[shown], 4 - lab1[shown])
