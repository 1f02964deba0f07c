"""Cardinal B-splines, subdivision masks, and tensor-product refinable functions.

The scaling functions used for synthesis are tensor products of cardinal
B-splines.  The univariate spline of order ``m`` is the m-fold convolution of
the indicator of the half-open unit interval with itself; its support is
``[0, m]`` and it satisfies a two-scale relation whose mask has binomial
coefficients.  Everything here is plain numpy: evaluation uses the stable
triangular recursion, mask diagnostics work on the trigonometric symbol.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError

__all__ = [
    "Mask1D",
    "RefinableFunction",
    "bspline_fourier_transform",
    "bspline_mask",
    "check_nonnegativity_condition",
    "convolve_masks",
    "eval_bspline",
    "eval_refinable",
    "mask_symbol",
    "mask_symbol_derivative",
    "sum_rule_order",
    "tensor_bspline",
    "unit_partition_residual",
]


def eval_bspline(order: int, x) -> np.ndarray | float:
    """Evaluate the cardinal B-spline of the given order.

    The order-1 spline is the indicator of the half-open interval ``(0, 1]``;
    higher orders follow the triangular recursion

        ``B_m(x) = (x B_{m-1}(x) + (m - x) B_{m-1}(x - 1)) / (m - 1)``.

    Args:
        order: spline order, a positive integer (1 = piecewise constant,
            2 = hat function, 3 = quadratic, ...).
        x: scalar or array of evaluation points.

    Returns:
        Array of values with the shape of ``x`` (a plain float for scalar
        input).  Values vanish outside ``(0, order]``.
    """
    m = int(order)
    if m < 1:
        raise ValueError(f"spline order must be a positive integer, got {order}")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    pts = np.atleast_1d(arr)

    # cols[s] holds B_w(pts - s) for the current width w, starting at w = 1.
    cols = [
        np.where((pts - s > 0.0) & (pts - s <= 1.0), 1.0, 0.0)
        for s in range(m)
    ]
    for w in range(2, m + 1):
        nxt = []
        for s in range(m - w + 1):
            t = pts - s
            nxt.append((t * cols[s] + (w - t) * cols[s + 1]) / (w - 1))
        cols = nxt
    out = cols[0]
    return float(out[0]) if scalar else out


def bspline_fourier_transform(order: int, xi) -> np.ndarray | complex:
    """Fourier transform of the order-``m`` cardinal B-spline.

    Closed form ``exp(-i m xi / 2) * (sin(xi/2) / (xi/2))**m`` with the
    removable singularity at ``xi = 0`` filled in (value 1).
    """
    m = int(order)
    if m < 1:
        raise ValueError(f"spline order must be a positive integer, got {order}")
    z = np.asarray(xi, dtype=float)
    # numpy's sinc is sin(pi t) / (pi t), so sinc(xi / (2 pi)) = sin(xi/2)/(xi/2)
    val = np.exp(-0.5j * m * z) * np.sinc(z / (2.0 * np.pi)) ** m
    return complex(val) if np.isscalar(xi) or np.asarray(xi).ndim == 0 else val


@dataclass(frozen=True)
class Mask1D:
    """Finitely supported subdivision mask with unit coefficient sum.

    Coefficients are indexed 0..n; the symbol is the trigonometric polynomial
    ``sum_k a_k exp(-i k xi)``.
    """

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("mask needs at least one coefficient")
        total = math.fsum(coeffs)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(
                f"mask coefficients must sum to 1, got {total!r}"
            )
        object.__setattr__(self, "coefficients", coeffs)

    def __len__(self) -> int:
        return len(self.coefficients)

    @property
    def degree(self) -> int:
        """Index of the last coefficient (support is [0, degree])."""
        return len(self.coefficients) - 1


def bspline_mask(order: int) -> Mask1D:
    """Two-scale mask of the order-``m`` B-spline: binomial(m, k) / 2**m."""
    m = int(order)
    if m < 1:
        raise ValueError(f"spline order must be a positive integer, got {order}")
    return Mask1D(tuple(math.comb(m, k) / 2**m for k in range(m + 1)))


def mask_symbol(mask: Mask1D, xi) -> np.ndarray | complex:
    """Evaluate the mask symbol ``sum_k a_k exp(-i k xi)``."""
    z = np.asarray(xi, dtype=float)
    k = np.arange(len(mask.coefficients))
    val = np.exp(-1j * np.multiply.outer(z, k)) @ np.asarray(mask.coefficients)
    return complex(val) if z.ndim == 0 else val


def mask_symbol_derivative(mask: Mask1D, j: int, xi) -> np.ndarray | complex:
    """j-th derivative of the mask symbol, computed analytically.

    Differentiating term by term gives ``sum_k a_k (-i k)^j exp(-i k xi)``,
    which avoids any finite-difference step-size tuning.
    """
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    z = np.asarray(xi, dtype=float)
    k = np.arange(len(mask.coefficients))
    weights = np.asarray(mask.coefficients) * (-1j * k) ** j
    val = np.exp(-1j * np.multiply.outer(z, k)) @ weights
    return complex(val) if z.ndim == 0 else val


def sum_rule_order(mask: Mask1D, tol: float = 1e-9) -> int:
    """Number of sum rules the mask satisfies.

    Counts how many successive derivatives of the symbol vanish at ``pi``,
    i.e. the largest ``kappa`` with ``symbol^(j)(pi) = 0`` for all
    ``j < kappa``.  A zero-order mask (symbol nonzero at ``pi``) returns 0.
    The search is capped at the coefficient count: a nonzero trigonometric
    polynomial of degree n cannot vanish to higher order without being
    detected by then.
    """
    for j in range(len(mask.coefficients) + 1):
        if abs(mask_symbol_derivative(mask, j, math.pi)) > tol:
            return j
    return len(mask.coefficients) + 1


def check_nonnegativity_condition(mask: Mask1D, tol: float = 1e-12) -> bool:
    """Sufficient condition for nonnegativity of the refinable limit.

    Requires at least two strictly positive coefficients whose even-indexed
    and odd-indexed partial sums are each exactly one half (within ``tol``).
    """
    coeffs = mask.coefficients
    if len(coeffs) < 2:
        return False
    if any(c <= 0.0 for c in coeffs):
        return False
    even = math.fsum(coeffs[0::2])
    odd = math.fsum(coeffs[1::2])
    return abs(even - 0.5) <= tol and abs(odd - 0.5) <= tol


def convolve_masks(first: Mask1D, second: Mask1D) -> Mask1D:
    """Mask of the convolution of two refinable functions.

    The symbol of the convolution is the product of the symbols, so the
    coefficient sequence is the discrete convolution of the two sequences
    (coefficient sums multiply, keeping the total at one).
    """
    merged = np.convolve(first.coefficients, second.coefficients)
    return Mask1D(tuple(merged))


@dataclass(frozen=True)
class RefinableFunction:
    """Tensor product of cardinal B-splines, one order per axis.

    The support along axis ``l`` is ``[0, orders[l]]``; the per-axis order
    doubles as the integer margin needed by the sampling lattices.
    """

    orders: tuple[int, ...]
    masks: tuple[Mask1D, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        orders = tuple(int(m) for m in self.orders)
        if not orders:
            raise ValueError("need at least one axis")
        if any(m < 1 for m in orders):
            raise ValueError(f"spline orders must be positive, got {orders}")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "masks", tuple(bspline_mask(m) for m in orders))

    @property
    def dimension(self) -> int:
        return len(self.orders)

    @property
    def margins(self) -> tuple[int, ...]:
        """Per-axis support widths (used as lattice margins)."""
        return self.orders

    @property
    def sum_rule_order(self) -> int:
        """Sum-rule order of the tensor mask: the minimum across axes."""
        return min(sum_rule_order(mask) for mask in self.masks)

    @property
    def sobolev_smoothness(self) -> float:
        """L2 Sobolev smoothness exponent: min over axes of order - 1/2."""
        return min(self.orders) - 0.5

    def evaluate(self, points) -> np.ndarray | float:
        """Product of per-axis spline values at one point or a batch.

        Accepts a length-d vector or an (n, d) array; returns a float or a
        length-n array accordingly.
        """
        arr = np.asarray(points, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.dimension:
            raise ShapeError(
                f"expected points with {self.dimension} coordinates, "
                f"got array of shape {np.asarray(points).shape}"
            )
        out = np.ones(arr.shape[0])
        for axis, order in enumerate(self.orders):
            out *= eval_bspline(order, arr[:, axis])
        return float(out[0]) if single else out


def tensor_bspline(orders: Sequence[int] | int) -> RefinableFunction:
    """Build a tensor-product B-spline from one order per axis."""
    if isinstance(orders, (int, np.integer)):
        orders = (int(orders),)
    return RefinableFunction(tuple(int(m) for m in orders))


def eval_refinable(phi: RefinableFunction, x) -> np.ndarray | float:
    """Evaluate ``phi`` at a point or batch of points (see ``RefinableFunction.evaluate``)."""
    return phi.evaluate(x)


def unit_partition_residual(phi: RefinableFunction, x) -> float:
    """Deviation of the integer-shift sum from one at a single point.

    Sums ``phi(x - k)`` over the finitely many integer shifts ``k`` whose
    translated support contains ``x`` and returns ``|sum - 1|``.
    """
    point = np.asarray(x, dtype=float)
    if point.ndim == 0:
        point = point[None]
    if point.ndim != 1 or point.size != phi.dimension:
        raise ShapeError(
            f"expected a point with {phi.dimension} coordinates, "
            f"got shape {np.asarray(x).shape}"
        )
    axis_shifts: list[range] = []
    for coord, order in zip(point, phi.orders):
        hi = math.ceil(coord)
        axis_shifts.append(range(hi - order, hi))
    total = 0.0
    for shift in itertools.product(*axis_shifts):
        total += phi.evaluate(point - np.asarray(shift, dtype=float))
    return abs(total - 1.0)
