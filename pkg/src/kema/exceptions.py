"""Exception hierarchy. Every library-raised error derives from KemaError so the
CLI can map failure classes to distinct exit codes."""


class KemaError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(KemaError):
    """Invalid user configuration (bad flag combinations, bad config file)."""


class DataError(KemaError):
    """Invalid input data (files, shapes, labels)."""


class NumericError(KemaError):
    """Numerical failure during computation."""


class NotFinite(DataError):
    """Input contains NaN or Inf."""


class NonSymmetric(DataError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


class DimensionMismatch(DataError):
    """Operands have incompatible shapes."""


class NegativeWeight(DataError):
    """Graph adjacency contains negative entries."""


class NegativeFeature(DataError):
    """Histogram-type kernel applied to data with negative entries."""


class SingularAfterRegularization(NumericError):
    """Right-hand pencil matrix is numerically singular even after Tikhonov
    regularization; the caller must raise the regularization parameter."""


class KTooLarge(ConfigError):
    """Requested neighbor count >= number of samples in some domain."""


class DegenerateDomain(DataError):
    """All points in a domain coincide; no neighborhood structure exists."""


class NoLabeledPairs(DataError):
    """Lengthscale heuristic needs at least one comparable pair of labeled samples."""


class ZeroSpread(DataError):
    """All labeled points coincide; lengthscale would be zero."""


class TooFewNonzeroEigenvalues(NumericError):
    """Fewer eigenpairs survive the zero-threshold than latent features requested."""


class EmptyRepresentativeSet(ConfigError):
    """Reduced-rank fit received an empty representative index list for a domain."""


class UnknownDomain(ConfigError):
    """Domain identifier not present in the fitted model."""


class TargetKernelNotLinear(ConfigError):
    """Closed-form inversion requires the target domain to use a linear kernel."""


class InvalidConfidence(ConfigError):
    """Confidence parameter delta outside (0, 1)."""


class InvalidSubspaceDim(ConfigError):
    """Subspace dimension m outside [1, n]."""


class UnknownExperiment(ConfigError):
    """Toy experiment id outside 1..4."""


class NotPlanar(DataError):
    """Distortion pipeline requires 2-D input."""


class NoLabeledTraining(DataError):
    """Classifier received no labeled training samples."""


class RankDeficientTargetWarning(UserWarning):
    """Target-domain latent basis is rank deficient; inversion is lossy."""
