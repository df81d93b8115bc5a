"""Failure types shared across the solver modules."""


class HeleShawError(Exception):
    """Base class for solver failures."""


class ConfigError(HeleShawError):
    """Invalid run configuration."""


class ClosureError(HeleShawError):
    """The curve-closure constraint solve did not converge."""


class SolverError(HeleShawError):
    """An iterative solve (vortex sheet, steady state) did not converge."""


class GeometryError(HeleShawError):
    """The interface geometry left the valid regime (self-intersection
    guard, nonpositive area integral, or sidewall kernel guard)."""
