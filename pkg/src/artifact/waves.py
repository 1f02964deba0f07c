"""Reference waves, admissibility diagnostics, and conditioning certificates.

Two analytic reference families are provided: plane waves
``a * exp(i K . x)`` and point-source (spherical) waves
``(a / |x|) * exp(i nu |x|)``.  A wave is usable at a level when, for every
measurement triple, its values at the three points are pairwise distinct in
the right sense; the quantitative version is the admissibility ratio, the
worst-case quotient of first differences over the solve determinant.  For
the two scaled designs used in convergence studies the ratio admits closed
upper bounds ("certificates") that stay bounded in the level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CertificateError, ConfigurationError, ShapeError, SingularPointError
from .lattice import Roi, TripleSet, zero_excluded

__all__ = [
    "AdmissibilityReport",
    "PlaneWave",
    "SphericalCertificate",
    "SphericalWave",
    "WaveSequence",
    "admissibility_ratio",
    "eval_wave",
    "mu",
    "plane_certificate",
    "plane_design",
    "spherical_certificate",
    "spherical_design",
    "try_certificate",
]


def _as_batch(points, dimension: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(points, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dimension:
        raise ShapeError(
            f"expected points with {dimension} coordinates, got shape "
            f"{np.asarray(points).shape}"
        )
    return arr, single


@dataclass(frozen=True)
class PlaneWave:
    """``a * exp(i K . x)`` with real amplitude ``a`` and wavevector ``K``."""

    wavevector: tuple[float, ...]
    amplitude: float = 1.0

    def __post_init__(self):
        vec = tuple(float(v) for v in self.wavevector)
        if not vec:
            raise ConfigurationError("wavevector needs at least one component")
        if not self.amplitude > 0:
            raise ConfigurationError(f"amplitude must be positive, got {self.amplitude}")
        object.__setattr__(self, "wavevector", vec)
        object.__setattr__(self, "amplitude", float(self.amplitude))

    @property
    def dimension(self) -> int:
        return len(self.wavevector)

    def evaluate(self, points) -> np.ndarray | complex:
        arr, single = _as_batch(points, self.dimension)
        phase = arr @ np.asarray(self.wavevector)
        val = self.amplitude * np.exp(1j * phase)
        return complex(val[0]) if single else val

    def magnitude(self, points) -> np.ndarray | float:
        arr, single = _as_batch(points, self.dimension)
        out = np.full(arr.shape[0], self.amplitude)
        return float(out[0]) if single else out


@dataclass(frozen=True)
class SphericalWave:
    """Point-source wave ``(a / |x|) * exp(i nu |x|)``, singular at the origin."""

    wavenumber: float
    amplitude: float = 1.0
    dimension: int = 1

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ConfigurationError(f"amplitude must be positive, got {self.amplitude}")
        if self.dimension < 1:
            raise ConfigurationError(f"dimension must be positive, got {self.dimension}")
        if self.wavenumber == 0:
            raise ConfigurationError("spherical wavenumber must be nonzero")
        object.__setattr__(self, "wavenumber", float(self.wavenumber))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "dimension", int(self.dimension))

    def evaluate(self, points) -> np.ndarray | complex:
        arr, single = _as_batch(points, self.dimension)
        radius = np.linalg.norm(arr, axis=1)
        if np.any(radius == 0.0):
            raise SingularPointError("spherical wave is undefined at the origin")
        val = (self.amplitude / radius) * np.exp(1j * self.wavenumber * radius)
        return complex(val[0]) if single else val

    def magnitude(self, points) -> np.ndarray | float:
        arr, single = _as_batch(points, self.dimension)
        radius = np.linalg.norm(arr, axis=1)
        if np.any(radius == 0.0):
            raise SingularPointError("spherical wave is undefined at the origin")
        out = self.amplitude / radius
        return float(out[0]) if single else out


Wave = PlaneWave | SphericalWave


def eval_wave(wave: Wave, x) -> np.ndarray | complex:
    """Evaluate a reference wave at a point or an (n, d) batch."""
    return wave.evaluate(x)


def mu(wave: Wave, level: int, triple: tuple) -> float:
    """Solve determinant of one measurement triple.

    For wave values ``g, g_plus, g_minus`` at the scaled positions of the
    triple ``(k, k_plus, k_minus)`` this is
    ``-Im[(g - g_plus) * conj(g - g_minus)]``; the point is recoverable from
    its three intensities exactly when this does not vanish.
    """
    k, kp, km = (np.asarray(t, dtype=float) for t in triple)
    spacing = 2.0 ** (-int(level))
    g = wave.evaluate(k * spacing)
    gp = wave.evaluate(kp * spacing)
    gm = wave.evaluate(km * spacing)
    return float(-np.imag((g - gp) * np.conj(g - gm)))


@dataclass(frozen=True)
class AdmissibilityReport:
    """Worst-case diagnostics of one wave over one triple family.

    ``ratio`` is the max over triples of
    ``max(|g - g_plus|, |g - g_minus|) / |mu|`` (infinite when some
    determinant vanishes); ``distinct`` records whether both first
    differences are nonzero everywhere; ``sup_magnitude`` is the largest
    wave magnitude seen over all triple points.
    """

    level: int
    ratio: float
    distinct: bool
    sup_magnitude: float
    per_triple: np.ndarray = field(repr=False, compare=False, default=None)


def admissibility_ratio(wave: Wave, triples: TripleSet) -> AdmissibilityReport:
    """Evaluate the admissibility diagnostics of ``wave`` on ``triples``."""
    x, xp, xm = triples.positions()
    g = wave.evaluate(x)
    gp = wave.evaluate(xp)
    gm = wave.evaluate(xm)
    d_plus = g - gp
    d_minus = g - gm
    det = -np.imag(d_plus * np.conj(d_minus))
    numer = np.maximum(np.abs(d_plus), np.abs(d_minus))
    with np.errstate(divide="ignore", invalid="ignore"):
        per = np.where(det != 0.0, numer / np.abs(det), np.inf)
    sup = float(max(np.abs(g).max(), np.abs(gp).max(), np.abs(gm).max()))
    distinct = bool(np.all(np.abs(d_plus) > 0.0) and np.all(np.abs(d_minus) > 0.0))
    return AdmissibilityReport(
        level=triples.level,
        ratio=float(per.max()),
        distinct=distinct,
        sup_magnitude=sup,
        per_triple=per,
    )


@dataclass(frozen=True)
class WaveSequence:
    """Level-indexed family of reference waves of one analytic type.

    ``family`` is "plane" or "spherical"; the concrete wave at level ``N``
    comes from ``wave_at(N)``.
    """

    family: str
    dimension: int
    amplitude: float = 1.0
    phase_scale: float | None = None       # plane: K_N = 2**(N-2) * phase_scale * pi * (1,..,1)
    base_wavenumber: float | None = None   # spherical: nu_N = 2**N * base_wavenumber

    def wave_at(self, level: int) -> Wave:
        n = int(level)
        if self.family == "plane":
            component = 2.0 ** (n - 2) * self.phase_scale * math.pi
            return PlaneWave(
                wavevector=(component,) * self.dimension,
                amplitude=self.amplitude,
            )
        if self.family == "spherical":
            return SphericalWave(
                wavenumber=2.0**n * self.base_wavenumber,
                amplitude=self.amplitude,
                dimension=self.dimension,
            )
        raise ConfigurationError(f"unknown wave family {self.family!r}")


def plane_design(
    dimension: int = 1, phase_scale: float = 0.999, amplitude: float = 1.0
) -> WaveSequence:
    """Scaled plane-wave design with level-independent phase steps.

    The wavevector ``2**(N-2) * phase_scale * pi * (1, ..., 1)`` makes the
    per-level phase increment along each axis equal to
    ``phase_scale * pi / 4`` at every level, so the admissibility ratio is
    constant in the level.  ``phase_scale`` defaults to slightly below 1 to
    stay clear of degenerate multiples of pi in other parameter ranges.
    """
    if not 0 < phase_scale:
        raise ConfigurationError(f"phase scale must be positive, got {phase_scale}")
    if not amplitude > 0:
        raise ConfigurationError(f"amplitude must be positive, got {amplitude}")
    return WaveSequence(
        family="plane",
        dimension=int(dimension),
        amplitude=float(amplitude),
        phase_scale=float(phase_scale),
    )


def spherical_design(
    dimension: int = 1, base_wavenumber: float = 0.3, amplitude: float = 1.0
) -> WaveSequence:
    """Scaled point-source design ``nu_N = 2**N * base_wavenumber``."""
    if base_wavenumber == 0:
        raise ConfigurationError("base wavenumber must be nonzero")
    if not amplitude > 0:
        raise ConfigurationError(f"amplitude must be positive, got {amplitude}")
    return WaveSequence(
        family="spherical",
        dimension=int(dimension),
        amplitude=float(amplitude),
        base_wavenumber=float(base_wavenumber),
    )


def plane_certificate(sequence: WaveSequence, level: int, axis: int = 0) -> float:
    """Closed-form admissibility bound for the plane design at one level.

    With phase step ``theta = 2**-N K_N,j`` along the stepped axis ``j`` the
    exact worst-case ratio is ``1 / (2 a |sin(theta)| |sin(theta/2)|)`` and
    ``1 / (2 a |sin(theta)| sin(theta/2)**2)`` is the certified upper bound
    returned here.  For the scaled design ``theta`` does not depend on the
    level, hence neither does the bound.

    Raises:
        CertificateError("degenerate-phase"): the phase step is a multiple
            of pi and the determinant vanishes identically.
    """
    if sequence.family != "plane":
        raise ConfigurationError("plane certificate needs a plane-wave sequence")
    wave = sequence.wave_at(level)
    if not (0 <= axis < sequence.dimension):
        raise ConfigurationError(
            f"stepped axis {axis} out of range for dimension {sequence.dimension}"
        )
    theta = 2.0 ** (-int(level)) * wave.wavevector[axis]
    s = math.sin(theta) * math.sin(theta / 2.0) ** 2
    if abs(s) < 1e-15:
        raise CertificateError(
            "degenerate-phase",
            f"phase step {theta!r} at level {level} makes every determinant vanish",
        )
    return 1.0 / (2.0 * wave.amplitude * abs(s))


@dataclass(frozen=True)
class SphericalCertificate:
    """Certified admissibility bound for the point-source design.

    ``phase_gap`` is a lower bound on the radial phase increments over the
    region, ``difference_scale`` an upper bound on the normalised first
    differences; the certified ratio bound is
    ``difference_scale / (sin(phase_gap) * sin(phase_gap / 2)**2)``.
    """

    level: int
    phase_gap: float
    difference_scale: float
    bound: float


def spherical_certificate(
    sequence: WaveSequence,
    roi: Roi,
    margins: Sequence[int] | int,
    level: int,
    phase_gap: float | None = None,
    difference_scale: float | None = None,
) -> SphericalCertificate:
    """Closed-form admissibility bound for the point-source design.

    The certificate applies when the origin is excluded from every lattice
    (so radii are bounded below) and the largest radial phase increment over
    the padded region stays at or below ``pi / 2``.  The default
    ``phase_gap`` is ``2**-N |nu_N| q`` with ``q`` the distance bound of the
    exclusion witness; the default ``difference_scale`` is
    ``9 sqrt(d) (2**N R + M) / (2**(N+3) a)`` with ``R`` the sup norm of the
    region and ``M`` the largest margin.  Both may be overridden with any
    other valid values (a smaller positive gap, a larger scale).

    Raises:
        CertificateError: reasons "origin-not-excluded",
            "phase-bound-exceeded", "alpha-invalid", "beta-too-small".
    """
    if sequence.family != "spherical":
        raise ConfigurationError("spherical certificate needs a point-source sequence")
    n = int(level)
    wave = sequence.wave_at(n)
    witness = zero_excluded(roi, margins)
    if not witness.excluded:
        raise CertificateError(
            "origin-not-excluded",
            "no axis keeps every level's lattice away from the origin",
        )
    if isinstance(margins, (int, np.integer)):
        margin_max = int(margins)
    else:
        margin_max = max(int(m) for m in margins)
    dim = roi.dimension
    reach = math.sqrt(dim) * (2.0**n * roi.sup_norm + margin_max)
    top_phase = 2.0 ** (-2 * n) * abs(wave.wavenumber) * reach
    if top_phase > math.pi / 2.0 + 1e-12:
        raise CertificateError(
            "phase-bound-exceeded",
            f"largest radial phase increment {top_phase!r} exceeds pi/2 at "
            f"level {n}; lower the base wavenumber or start at a higher level",
        )
    default_gap = 2.0 ** (-n) * abs(wave.wavenumber) * witness.distance_bound
    if phase_gap is None:
        phase_gap = default_gap
    if not (0.0 < phase_gap <= default_gap + 1e-12):
        raise CertificateError(
            "alpha-invalid",
            f"phase gap must lie in (0, {default_gap!r}], got {phase_gap!r}",
        )
    default_scale = 9.0 * reach / (2.0 ** (n + 3) * wave.amplitude)
    if difference_scale is None:
        difference_scale = default_scale
    if difference_scale < default_scale - 1e-12:
        raise CertificateError(
            "beta-too-small",
            f"difference scale must be at least {default_scale!r}, "
            f"got {difference_scale!r}",
        )
    gap = float(phase_gap)
    bound = float(difference_scale) / (math.sin(gap) * math.sin(gap / 2.0) ** 2)
    return SphericalCertificate(
        level=n,
        phase_gap=gap,
        difference_scale=float(difference_scale),
        bound=bound,
    )


def try_certificate(
    sequence: WaveSequence,
    roi: Roi,
    margins: Sequence[int] | int,
    level: int,
    axis: int = 0,
) -> float | None:
    """Certified ratio bound at one level, or None when no certificate applies."""
    try:
        if sequence.family == "plane":
            return plane_certificate(sequence, level, axis)
        if sequence.family == "spherical":
            return spherical_certificate(sequence, roi, margins, level).bound
    except CertificateError:
        return None
    return None
