"""Exception hierarchy shared by all hydrospec modules."""


class HydrospecError(Exception):
    """Base class for every error raised by hydrospec."""


class ProfileError(HydrospecError, ValueError):
    pass


class ContourError(HydrospecError, ValueError):
    pass


class SingularOperatorError(HydrospecError):
    """A discretized operator that should be invertible is numerically singular.

    Usually signals under-resolution (N too small) or a contour that is not
    valid for the requested parameters.
    """

    def __init__(self, message, cond=float("inf")):
        super().__init__(f"{message} (condition estimate {cond:.3e})")
        self.cond = cond


class EigenSolveError(HydrospecError):
    pass


class EllipticityError(HydrospecError):
    """U(gamma(x)) - c comes too close to zero along the contour."""


class ConvergenceError(HydrospecError):
    pass


class MultiplicityError(HydrospecError):
    pass


class BranchAmbiguityError(HydrospecError):
    pass


class BranchCollisionError(HydrospecError):
    pass


class ConfigError(HydrospecError, ValueError):
    pass
