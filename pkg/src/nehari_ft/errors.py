"""Exception hierarchy shared by every module."""


class NehariFTError(Exception):
    """Base class; carries a machine-readable payload for the CLI."""

    def payload(self):
        return {"error": type(self).__name__, "message": str(self)}


class InvalidParameterError(NehariFTError, ValueError):
    pass


class InvalidGridError(NehariFTError, ValueError):
    pass


class TruncationError(NehariFTError, ValueError):
    pass


class NoSolutionError(NehariFTError):
    """Raised when the requested stationary branch does not exist at omega."""

    def __init__(self, message, omega, omega_star, omega_dstar):
        super().__init__(
            f"{message} (omega={omega!r}; tilde branch needs omega > {omega_star!r}, "
            f"hat branch needs omega > {omega_dstar!r})"
        )
        self.omega = omega
        self.omega_star = omega_star
        self.omega_dstar = omega_dstar

    def payload(self):
        out = super().payload()
        out.update(omega=self.omega, omega_star=self.omega_star, omega_dstar=self.omega_dstar)
        return out


class UndefinedScaleError(NehariFTError, ValueError):
    pass


class CoercivityError(NehariFTError):
    pass


class DiscretizationError(NehariFTError):
    pass


class EigenSolverError(NehariFTError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations

    def payload(self):
        out = super().payload()
        out["iterations"] = self.iterations
        return out


class ThresholdProximityError(NehariFTError):
    pass


class ConfigurationError(NehariFTError, ValueError):
    pass
