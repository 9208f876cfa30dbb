"""Exception hierarchy shared by the workbench modules."""


class WorkbenchError(Exception):
    """Base class for every error raised by :mod:`surgerybench`."""

    #: short machine-readable tag used in CLI error payloads
    kind = "workbench-error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class DomainError(WorkbenchError, ValueError):
    """A warping function is not strictly positive where it was queried."""

    kind = "domain-error"


class BreakpointSmoothnessError(WorkbenchError, ValueError):
    """A query needs more derivatives than the breakpoint provides."""

    kind = "breakpoint-smoothness"


class NumericError(WorkbenchError, ArithmeticError):
    """The ODE integrator failed (step underflow, non-finite state, ...)."""

    kind = "numeric-error"


class ParametersTooLargeError(WorkbenchError, ValueError):
    """Ric(W, W) is not positive at t = 0 for the requested scaling."""

    kind = "parameters-too-large"


class SearchFailureError(WorkbenchError, RuntimeError):
    """The halving search ran out of budget.

    ``details`` carries the margins of the last candidate examined.
    """

    kind = "search-failure"

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = dict(details or {})

    def to_dict(self):
        out = super().to_dict()
        out["details"] = self.details
        return out


class InfeasibleTargetError(WorkbenchError, ValueError):
    """The requested f(t0) cannot be reached; equivalent to rho/N >= kappa."""

    kind = "infeasible-target"


class KappaViolationError(WorkbenchError, ValueError):
    """rho/N is not below the surgery constant of the neck."""

    kind = "kappa-violation"


class PreconditionError(WorkbenchError, ValueError):
    """Left slope smaller than right slope at a corner to be smoothed."""

    kind = "precondition"


class SmoothingFailureError(WorkbenchError, RuntimeError):
    kind = "smoothing-failure"


class CertificationError(WorkbenchError, RuntimeError):
    """The final sweep found a non-positive Ricci component."""

    kind = "certification-failure"


class NotALinearBundleError(WorkbenchError, ValueError):
    """(W, p1) violates the Dold-Whitney congruence W^2 = p1 mod 4."""

    kind = "not-a-linear-bundle"


class NoSuchBundleError(WorkbenchError, ValueError):
    kind = "no-such-bundle"


class ScheduleError(WorkbenchError, RuntimeError):
    """A neck solve failed while scheduling a plumbing graph.

    ``node`` names the failing node and ``cause`` is the payload of the
    underlying error.
    """

    kind = "schedule-failure"

    def __init__(self, message, node, cause=None):
        super().__init__(message)
        self.node = node
        self.cause = cause

    def to_dict(self):
        out = super().to_dict()
        out["node"] = self.node
        if self.cause is not None:
            out["cause"] = self.cause
        return out
