"""Exception types raised across the toolkit."""


class KvStringError(Exception):
    """Base class for all toolkit errors."""


class NonPositiveCoefficient(KvStringError):
    """A physical coefficient (stiffness, damping, tolerance) is not positive."""


class AssumptionViolated(KvStringError):
    """Coefficients sit too close to a resonant pair: 2*sqrt(alpha)/(pi*beta) - 1/2
    is within the rejection tolerance of a nonnegative integer, so the quadratic
    mode polynomials are nearly defective and the dual pairings ill-conditioned."""


class RieszConstantDegenerate(KvStringError):
    """Computed basis constant C came out >= 1; the rejection tolerance is too loose."""


class GridMismatch(KvStringError):
    """Two states do not share the same sample grid."""


class GridTooCoarse(KvStringError):
    """Grid is too coarse for the requested finite-difference evaluation."""


class CompatibilityViolated(KvStringError):
    """Initial state's boundary trace does not match the boundary signal at t=0."""


class TruncationInsufficient(KvStringError):
    """Estimated contribution of the discarded high modes exceeds the accuracy guard."""


class StepUnstableOrSingular(KvStringError):
    """Implicit time step produced a singular solve or non-finite values."""


class HorizonTooShort(KvStringError):
    """Trajectory horizon is too short for the requested asymptotic assessment."""


class ConfigError(KvStringError):
    """Experiment configuration file is missing, malformed, or has unknown keys."""
