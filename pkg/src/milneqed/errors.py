"""Exception types shared across the package."""


class MilneQEDError(Exception):
    """Base class for all library errors."""


class NotNull(MilneQEDError):
    """A wave vector was expected to be null (k.k = 0)."""


class NotFuturePointing(MilneQEDError):
    """A vector was expected to have positive time component."""


class NonTimelikeR(MilneQEDError):
    """The frame label R must be timelike and future-pointing."""


class DegenerateNu(MilneQEDError):
    """The seed spinor nu is degenerate for the given wave vector."""


class ZeroAxis(MilneQEDError):
    """Rotation/boost axis has zero length."""


class FrameUndefined(MilneQEDError):
    """A spin-frame field could not be evaluated at the requested momentum."""


class NegativeTau(MilneQEDError):
    """Proper time must be nonnegative."""


class NonPositiveR(MilneQEDError):
    """Radial coordinate must be positive."""


class EmptySupport(MilneQEDError):
    """Cutoff profile has empty support (k2 <= k1)."""


class NonFinite(MilneQEDError):
    """An integrand returned a non-finite value."""


class ToleranceNotMet(MilneQEDError):
    """Quadrature failed to reach the requested tolerance."""


class DivergentIntegral(MilneQEDError):
    """Integral is infrared divergent for the given cutoff profile."""


class MomentOverflow(MilneQEDError):
    """Requested moment order exceeds the numerically stable range."""


class ConfigError(MilneQEDError):
    """Invalid run configuration (CLI exit code 2)."""
