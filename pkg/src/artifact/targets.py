"""Built-in complex-valued target functions for simulated measurements.

Each target carries its dimension, a Sobolev smoothness exponent (used to
pick admissible synthesis parameters), and a square-integrability flag.  The
catalogue covers the regimes a convergence study needs: an entire envelope
with adjustable oscillation, a compactly supported kink of limited
smoothness, and a constant that is not square integrable at all.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, ShapeError
from .refinable import eval_bspline

__all__ = ["TargetFunction", "builtin_target"]


@dataclass(frozen=True)
class TargetFunction:
    """A complex-valued function on R^d with declared regularity.

    ``sobolev_smoothness`` may be ``math.inf`` for entire targets;
    ``square_integrable`` is False for targets like nonzero constants whose
    study must skip L2 summaries over unbounded regions.
    """

    label: str
    dimension: int
    sobolev_smoothness: float
    square_integrable: bool
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def evaluate(self, points) -> np.ndarray | complex:
        """Values at a length-d point or an (n, d) batch."""
        arr = np.asarray(points, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.dimension:
            raise ShapeError(
                f"expected points with {self.dimension} coordinates, got shape "
                f"{np.asarray(points).shape}"
            )
        val = np.asarray(self.fn(arr), dtype=complex)
        return complex(val[0]) if single else val


def _vector(value, dimension: int, name: str) -> np.ndarray:
    if isinstance(value, (int, float, np.integer, np.floating)):
        vec = np.full(dimension, float(value))
    else:
        vec = np.asarray(value, dtype=float)
    if vec.shape != (dimension,):
        raise ConfigurationError(
            f"{name} must be a scalar or a length-{dimension} vector"
        )
    return vec


def builtin_target(name: str, dimension: int = 1, **params) -> TargetFunction:
    """Construct a catalogue target by name.

    Supported names and their parameters:

    * ``gaussian_chirp``: ``sigma`` (width, default 1), ``center`` (default 0),
      ``frequency`` (linear phase vector, default 0).  The value is
      ``exp(-|x - c|^2 / sigma^2) * exp(i w . x)``: an entire, rapidly
      decaying envelope with complex oscillation.
    * ``modulated_gaussian``: ``sigma``, ``center``, ``frequency``, ``phase``.
      Same envelope with a real cosine modulation and a constant phase
      factor: ``exp(-|x - c|^2 / sigma^2) * cos(w . x) * exp(i phase)``.
    * ``bspline_bump``: ``order`` (default 2), ``center``, ``phase``.  A
      compactly supported tensor B-spline bump ``prod B_m(x_l - c_l)`` times
      ``exp(i phase)``; finite smoothness order - 1/2 per axis.
    * ``complex_constant``: ``value`` (complex, default 1+0j).  Not square
      integrable; useful for exactness checks.
    """
    dim = int(dimension)
    if dim < 1:
        raise ConfigurationError(f"dimension must be positive, got {dimension}")

    def reject_unknown(allowed: set[str]) -> None:
        unknown = set(params) - allowed
        if unknown:
            raise ConfigurationError(
                f"unknown parameters for {name!r}: {sorted(unknown)}"
            )

    if name == "gaussian_chirp":
        reject_unknown({"sigma", "center", "frequency"})
        sigma = float(params.get("sigma", 1.0))
        if sigma <= 0:
            raise ConfigurationError(f"sigma must be positive, got {sigma}")
        center = _vector(params.get("center", 0.0), dim, "center")
        frequency = _vector(params.get("frequency", 0.0), dim, "frequency")

        def chirp(arr: np.ndarray) -> np.ndarray:
            shifted = arr - center
            envelope = np.exp(-np.sum(shifted * shifted, axis=1) / sigma**2)
            return envelope * np.exp(1j * (arr @ frequency))

        return TargetFunction(
            label=f"gaussian_chirp(sigma={sigma})",
            dimension=dim,
            sobolev_smoothness=math.inf,
            square_integrable=True,
            fn=chirp,
        )

    if name == "modulated_gaussian":
        reject_unknown({"sigma", "center", "frequency", "phase"})
        sigma = float(params.get("sigma", 1.0))
        if sigma <= 0:
            raise ConfigurationError(f"sigma must be positive, got {sigma}")
        center = _vector(params.get("center", 0.0), dim, "center")
        frequency = _vector(params.get("frequency", 0.0), dim, "frequency")
        phase = float(params.get("phase", 0.0))
        factor = complex(math.cos(phase), math.sin(phase))

        def modulated(arr: np.ndarray) -> np.ndarray:
            shifted = arr - center
            envelope = np.exp(-np.sum(shifted * shifted, axis=1) / sigma**2)
            return envelope * np.cos(arr @ frequency) * factor

        return TargetFunction(
            label=f"modulated_gaussian(sigma={sigma})",
            dimension=dim,
            sobolev_smoothness=math.inf,
            square_integrable=True,
            fn=modulated,
        )

    if name == "bspline_bump":
        reject_unknown({"order", "center", "phase"})
        order = int(params.get("order", 2))
        if order < 1:
            raise ConfigurationError(f"order must be a positive integer, got {order}")
        center = _vector(params.get("center", 0.0), dim, "center")
        phase = float(params.get("phase", 0.0))
        factor = complex(math.cos(phase), math.sin(phase))

        def bump(arr: np.ndarray) -> np.ndarray:
            out = np.ones(arr.shape[0])
            for axis in range(arr.shape[1]):
                out = out * eval_bspline(order, arr[:, axis] - center[axis])
            return out * factor

        return TargetFunction(
            label=f"bspline_bump(order={order})",
            dimension=dim,
            sobolev_smoothness=order - 0.5,
            square_integrable=True,
            fn=bump,
        )

    if name == "complex_constant":
        reject_unknown({"value"})
        value = complex(params.get("value", 1.0 + 0.0j))

        def constant(arr: np.ndarray) -> np.ndarray:
            return np.full(arr.shape[0], value, dtype=complex)

        return TargetFunction(
            label=f"complex_constant({value})",
            dimension=dim,
            sobolev_smoothness=math.inf,
            square_integrable=False,
            fn=constant,
        )

    raise ConfigurationError(f"unknown target {name!r}")
