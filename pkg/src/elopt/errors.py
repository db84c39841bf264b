"""Semantic exception hierarchy shared by the whole package."""


class EloptError(Exception):
    """Base class for every error raised by elopt."""


class DomainError(EloptError, ValueError):
    """Evaluation point outside the non-negative orthant, or dimension mismatch."""


class ShapeError(EloptError, ValueError):
    """Curve shape flag incompatible with the requested construction."""


class ConstructionError(EloptError, RuntimeError):
    """A builder could not produce a verified feasible function."""


class UnboundedRangeError(EloptError, ValueError):
    """Total cost requested for a function with unbounded range."""


class SolverError(EloptError, RuntimeError):
    """LP solve failed (iteration budget or numerical breakdown)."""


class ConfigError(EloptError, ValueError):
    """Malformed CLI configuration document or flag combination."""
