"""Exception types shared across the library."""
from __future__ import annotations


class ArtifactError(Exception):
    """Base class for all library-specific errors."""


class ConfigurationError(ArtifactError, ValueError):
    """A region / margin / level combination that cannot be realised."""


class ShapeError(ArtifactError, ValueError):
    """Dimension mismatch between a point and the object evaluating it."""


class SingularPointError(ArtifactError, ValueError):
    """Evaluation of a spherical wave at its singular point (the origin)."""


class ZeroInLatticeError(ArtifactError, ValueError):
    """Spherical triples requested for a lattice that contains the origin.

    The companion points of the origin coincide with it, and the wave itself
    is undefined there, so the triple construction must refuse.
    """


class MixedLevelError(ArtifactError, ValueError):
    """A record batch mixes refinement levels that must agree."""


class DegeneratePointError(ArtifactError, RuntimeError):
    """The 2x2 recovery system at one lattice point is (near-)singular."""

    def __init__(self, point, determinant):
        self.point = tuple(point)
        self.determinant = float(determinant)
        super().__init__(
            f"recovery system degenerate at k={self.point} "
            f"(determinant {self.determinant:.3e})"
        )


class InadmissibleLevelError(ArtifactError, RuntimeError):
    """A wave sequence fails the admissibility ratio at some level."""

    def __init__(self, level, triple):
        self.level = int(level)
        self.triple = triple
        super().__init__(
            f"reference wave inadmissible at level {self.level} "
            f"(vanishing determinant near triple {triple})"
        )


class CertificateError(ArtifactError, RuntimeError):
    """A closed-form conditioning certificate does not apply.

    ``reason`` is a stable machine-readable token, e.g. ``degenerate-phase``,
    ``origin-not-excluded``, ``phase-bound-exceeded``, ``alpha-invalid`` or
    ``beta-too-small``.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        msg = reason if not detail else f"{reason}: {detail}"
        super().__init__(msg)
