"""Dyadic sampling lattices over a box-shaped region of interest.

At refinement level ``N`` the synthesis formula needs coefficients at the
integer points ``k`` whose translated spline support overlaps the region, so
the index set along axis ``l`` runs from ``2**N * L_min - margin`` to
``2**N * L_max``, where ``[L_min, L_max]`` is the integer hull of the region
edge.  The measurement side additionally needs shifted companion points for
every ``k``; those come in two flavours (axis steps for plane waves, radial
scalings for spherical waves) and are grouped into triples here.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigurationError, ZeroInLatticeError

__all__ = [
    "LatticeSet",
    "Roi",
    "TripleSet",
    "ZeroExclusion",
    "build_lattice",
    "build_triples",
    "zero_excluded",
]


def _as_tuple(values: Sequence[float] | float) -> tuple[float, ...]:
    if isinstance(values, (int, float, np.integer, np.floating)):
        return (float(values),)
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class Roi:
    """Axis-aligned box ``[lower_1, upper_1] x ... x [lower_d, upper_d]``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = _as_tuple(self.lower)
        hi = _as_tuple(self.upper)
        if len(lo) != len(hi):
            raise ConfigurationError(
                f"lower/upper need the same length, got {len(lo)} and {len(hi)}"
            )
        if not lo:
            raise ConfigurationError("region needs at least one axis")
        for axis, (a, b) in enumerate(zip(lo, hi)):
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ConfigurationError(f"axis {axis}: bounds must be finite")
            if a >= b:
                raise ConfigurationError(
                    f"axis {axis}: lower bound {a} must be below upper bound {b}"
                )
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def integer_bounds(self) -> tuple[tuple[int, int], ...]:
        """Per-axis integer hull ``(ceil(lower), floor(upper))``.

        Raises ConfigurationError when some axis interval contains no integer.
        """
        bounds = []
        for axis, (a, b) in enumerate(zip(self.lower, self.upper)):
            lo = math.ceil(a)
            hi = math.floor(b)
            if lo > hi:
                raise ConfigurationError(
                    f"axis {axis}: interval [{a}, {b}] contains no integer point"
                )
            bounds.append((lo, hi))
        return tuple(bounds)

    @property
    def sup_norm(self) -> float:
        """Largest Euclidean norm over the box: sqrt(sum of max(lo^2, hi^2))."""
        total = 0.0
        for a, b in zip(self.lower, self.upper):
            total += max(a * a, b * b)
        return math.sqrt(total)


@dataclass(frozen=True)
class LatticeSet:
    """Integer index box at one refinement level.

    ``ranges[l] = (first, last)`` are inclusive index bounds along axis ``l``;
    the physical sample positions are ``k * 2**-level``.
    """

    level: int
    ranges: tuple[tuple[int, int], ...]
    margins: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ConfigurationError(f"level must be nonnegative, got {self.level}")
        for axis, (first, last) in enumerate(self.ranges):
            if first > last:
                raise ConfigurationError(f"axis {axis}: empty index range")

    @property
    def dimension(self) -> int:
        return len(self.ranges)

    @property
    def size(self) -> int:
        n = 1
        for first, last in self.ranges:
            n *= last - first + 1
        return n

    def __len__(self) -> int:
        return self.size

    def __contains__(self, index) -> bool:
        idx = tuple(index)
        if len(idx) != self.dimension:
            return False
        return all(
            first <= int(i) <= last and float(i) == int(i)
            for i, (first, last) in zip(idx, self.ranges)
        )

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        axes = [range(first, last + 1) for first, last in self.ranges]
        return iter(itertools.product(*axes))

    def points(self) -> np.ndarray:
        """All indices as an integer array of shape (size, dimension)."""
        axes = [np.arange(first, last + 1) for first, last in self.ranges]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def scaled_points(self) -> np.ndarray:
        """Physical positions ``k * 2**-level`` of every index, shape (size, d)."""
        return self.points() * 2.0 ** (-self.level)


def build_lattice(roi: Roi, margins: Sequence[int] | int, level: int) -> LatticeSet:
    """Index set whose shifted spline supports cover the region at one level.

    Args:
        roi: the box the synthesis must cover.
        margins: per-axis support width of the scaling function (a single
            int is broadcast to every axis).
        level: dyadic refinement level ``N >= 0``.
    """
    if isinstance(margins, (int, np.integer)):
        margins = (int(margins),) * roi.dimension
    margins = tuple(int(m) for m in margins)
    if len(margins) != roi.dimension:
        raise ConfigurationError(
            f"need one margin per axis, got {len(margins)} for "
            f"dimension {roi.dimension}"
        )
    if any(m < 1 for m in margins):
        raise ConfigurationError(f"margins must be positive integers, got {margins}")
    if level < 0:
        raise ConfigurationError(f"level must be nonnegative, got {level}")
    scale = 2**level
    ranges = []
    for (lo, hi), margin in zip(roi.integer_bounds(), margins):
        ranges.append((scale * lo - margin, scale * hi))
    return LatticeSet(level=int(level), ranges=tuple(ranges), margins=margins)


@dataclass(frozen=True)
class ZeroExclusion:
    """Witness that every lattice in a family stays away from the origin.

    When ``excluded`` is true, ``axis`` names one coordinate whose index
    range misses zero at every level ``N >= 1`` and ``distance_bound`` is a
    positive lower bound on the Euclidean norm of the scaled lattice points
    ``2**-N k``, uniform over those levels.
    """

    excluded: bool
    axis: int | None = None
    distance_bound: float | None = None


def zero_excluded(roi: Roi, margins: Sequence[int] | int) -> ZeroExclusion:
    """Check whether the origin avoids every level's lattice along some axis.

    Sufficient per-axis criterion: with integer hull ``[L_min, L_max]`` and
    margin ``M``, either ``2 L_min - M > 0`` (box strictly right of zero for
    every level) or ``L_max < 0`` (strictly left).  Among qualifying axes the
    witness with the largest distance bound ``min(|L_min - M/2|, |L_max|)``
    is reported.
    """
    if isinstance(margins, (int, np.integer)):
        margins = (int(margins),) * roi.dimension
    margins = tuple(int(m) for m in margins)
    if len(margins) != roi.dimension:
        raise ConfigurationError(
            f"need one margin per axis, got {len(margins)} for "
            f"dimension {roi.dimension}"
        )
    best: tuple[float, int] | None = None
    for axis, ((lmin, lmax), margin) in enumerate(zip(roi.integer_bounds(), margins)):
        if 2 * lmin - margin > 0 or lmax < 0:
            q = min(abs(lmin - margin / 2.0), abs(lmax))
            if best is None or q > best[0]:
                best = (q, axis)
    if best is None:
        return ZeroExclusion(excluded=False)
    return ZeroExclusion(excluded=True, axis=best[1], distance_bound=best[0])


@dataclass(frozen=True)
class TripleSet:
    """Measurement triples ``(k, k_plus, k_minus)`` over one lattice.

    Plane variant: companions step the base index by one along ``axis``.
    Spherical variant: companions are the radial scalings
    ``k * (1 +/- 2**-level)``, stored in index coordinates (floats, but exact
    dyadic rationals).
    """

    variant: str
    level: int
    lattice: LatticeSet
    axis: int | None = None

    def __len__(self) -> int:
        return self.lattice.size

    @property
    def dimension(self) -> int:
        return self.lattice.dimension

    def base_points(self) -> np.ndarray:
        return self.lattice.points()

    def companion_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Index coordinates of the two companions, shape (size, d) each."""
        base = self.lattice.points()
        if self.variant == "plane":
            step = np.zeros(self.dimension, dtype=np.int64)
            step[self.axis] = 1
            return base + step, base - step
        scale = 2**self.level
        plus = base * (scale + 1) / scale
        minus = base * (scale - 1) / scale
        return plus, minus

    def positions(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Physical positions of base and companion points at this level.

        Returns three float arrays of shape (size, d): the base points
        ``2**-N k`` and the two companions.  Spherical companions are computed
        as integer multiples of ``2**-2N`` so the stored doubles are exact.
        """
        base = self.lattice.points()
        spacing = 2.0**-self.level
        x = base * spacing
        if self.variant == "plane":
            plus_idx, minus_idx = self.companion_indices()
            return x, plus_idx * spacing, minus_idx * spacing
        scale = 2**self.level
        fine = spacing * spacing
        return x, base * (scale + 1) * fine, base * (scale - 1) * fine

    def __iter__(self) -> Iterator[tuple[tuple, tuple, tuple]]:
        base = self.base_points()
        plus, minus = self.companion_indices()
        for k, kp, km in zip(base, plus, minus):
            yield tuple(k.tolist()), tuple(kp.tolist()), tuple(km.tolist())


def build_triples(
    lattice: LatticeSet, variant: str, axis: int = 0
) -> TripleSet:
    """Attach measurement companions to every lattice point.

    Args:
        lattice: the base index set.
        variant: "plane" (axis-step companions) or "spherical" (radial
            scalings).
        axis: 0-based stepped axis, used by the plane variant only.

    Raises:
        ZeroInLatticeError: spherical variant on a lattice containing the
            origin, where the scalings collapse onto the singular point.
    """
    if variant not in ("plane", "spherical"):
        raise ConfigurationError(f"unknown triple variant {variant!r}")
    if variant == "plane":
        if not (0 <= axis < lattice.dimension):
            raise ConfigurationError(
                f"stepped axis {axis} out of range for dimension "
                f"{lattice.dimension}"
            )
        return TripleSet(variant="plane", level=lattice.level, lattice=lattice, axis=axis)
    origin = (0,) * lattice.dimension
    if origin in lattice:
        raise ZeroInLatticeError(
            f"lattice at level {lattice.level} contains the origin; radial "
            "companions are undefined there"
        )
    return TripleSet(variant="spherical", level=lattice.level, lattice=lattice, axis=None)
