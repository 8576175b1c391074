"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class AreaMomentsError(Exception):
    """Base class for all library errors."""


class MalformedSpec(AreaMomentsError):
    """Step-set text/JSON could not be parsed into a valid weighted alphabet."""


class NoNegativeStep(MalformedSpec):
    """Step alphabet has no step below zero (c >= 1 required)."""


class NoPositiveStep(MalformedSpec):
    """Step alphabet has no step above zero (d >= 1 required)."""


class ZeroWeight(MalformedSpec):
    """A step was given weight zero; zero-weight entries must be omitted."""


class NonpositiveArgument(AreaMomentsError):
    """Laurent-polynomial evaluation requires a strictly positive argument."""


class OutOfMemoryBudget(AreaMomentsError):
    """A table would exceed the configured byte budget (deterministic check)."""


class OrderOutOfRange(AreaMomentsError):
    """Requested moment order is negative or outside the computed tables."""


class BracketFailure(AreaMomentsError):
    """Root bracketing failed; should not happen for a valid step set."""


class RootFindFailure(AreaMomentsError):
    """A numeric root search did not reach its residual tolerance."""


class ClassificationAmbiguity(AreaMomentsError):
    """Small/large branch split is ambiguous (modulus gap below tolerance)."""


class IllConditioned(AreaMomentsError):
    """Catalytic linear system condition estimate exceeds the accept threshold."""


class InternalInconsistency(AreaMomentsError):
    """Two independent code paths for the same quantity disagree (a bug)."""


class RadicalMismatch(AreaMomentsError):
    """Addition of exact radical scalars with different radical parts."""
