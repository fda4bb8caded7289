"""Exception types shared across the package."""


class ExpanderLabError(Exception):
    pass


class SingularMetric(ExpanderLabError):
    pass


class NonFinite(ExpanderLabError):
    pass


class InvalidDimension(ExpanderLabError, ValueError):
    pass


class NonPositiveRadius(ExpanderLabError, ValueError):
    pass


class NotAnExpander(ExpanderLabError):
    """Raised when identities are requested on a surface that fails the expander equation."""


class AxisSingularity(ExpanderLabError):
    pass


class DegeneratePath(ExpanderLabError):
    pass


class NotClosed(ExpanderLabError):
    pass


class LambdaBelowGap(ExpanderLabError):
    pass


class LambdaZero(ExpanderLabError):
    pass


class NotCMC(ExpanderLabError):
    pass


class AlphaTooSmall(ExpanderLabError):
    pass


class CurvatureGrowthTooLarge(ExpanderLabError):
    pass
