"""Exception hierarchy shared by all horosolve modules."""


class HorosolveError(Exception):
    """Base class for all domain errors raised by this package."""


class EllipticityLossError(HorosolveError):
    """A matrix left the Garding cone required by the curvature functional.

    Carries the worst cone margin and, when evaluated on a grid, the node
    where it occurred.
    """

    def __init__(self, margin, node=None, cone=None):
        self.margin = margin
        self.node = node
        self.cone = cone
        loc = "" if node is None else f" at node {node}"
        super().__init__(
            f"ellipticity lost{loc}: cone margin {margin:.3e}"
            + (f" (Gamma_{cone})" if cone is not None else "")
        )


class NotStrictlyHConvexError(HorosolveError):
    """The h-convexity tensor is singular or indefinite at some node."""

    def __init__(self, node, value):
        self.node = node
        self.value = value
        super().__init__(
            f"not strictly h-convex at node {node}: least eigenvalue {value:.3e}"
        )


class InvalidBodyError(HorosolveError):
    """Support data does not define a valid h-convex body."""


class BarrierViolationError(HorosolveError):
    """Prescribed data exceeds the admissibility barrier."""

    def __init__(self, value, threshold, node=None):
        self.value = value
        self.threshold = threshold
        self.node = node
        loc = "" if node is None else f" at node {node}"
        super().__init__(
            f"barrier violated{loc}: value {value:.12g} >= threshold {threshold:.12g}"
        )


class NoAdmissibleRootError(HorosolveError):
    """No constant solution exists for the requested data."""


class NewtonFailureError(HorosolveError):
    """Newton iteration failed to make progress."""

    def __init__(self, message, node=None, value=None):
        self.node = node
        self.value = value
        super().__init__(message)


class SingularLinearizationError(HorosolveError):
    """The linearized operator is numerically singular."""

    def __init__(self, cond):
        self.cond = cond
        super().__init__(f"linearized operator near-singular: cond ~ {cond:.3e}")


class ContinuationStallError(HorosolveError):
    """Homotopy step size underflowed before reaching t = 1."""

    def __init__(self, t, dt, cause=None):
        self.t = t
        self.dt = dt
        self.cause = cause
        msg = f"continuation stalled at t = {t:.6g} with step {dt:.3e}"
        if cause is not None:
            msg += f" ({cause})"
        super().__init__(msg)


class ConfigError(HorosolveError):
    """Run configuration is malformed or violates parameter ranges."""
