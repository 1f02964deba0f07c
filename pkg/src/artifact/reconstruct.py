"""Synthesis from recovered samples and level-wise convergence studies.

The approximation at level ``N`` is ``sum_k f_k phi(2**N x - k)`` with the
recovered samples as coefficients.  The study loop runs the full pipeline
(lattice, triples, intensities, pointwise recovery, synthesis) over a range
of levels, measures L2 errors against the ground truth on a midpoint grid,
and fits the dyadic decay exponent.  A baseline run with exact samples in
place of recovered ones separates the approximation error of the spline
space from the error introduced by measurement and recovery.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._format import float_repr
from .errors import ConfigurationError, InadmissibleLevelError
from .lattice import LatticeSet, Roi, build_lattice, build_triples
from .measure import (
    IntensityRecord,
    perturb_intensities,
    sample_intensities,
)
from .recover import RecoveredSamples, recover_level
from .refinable import RefinableFunction, eval_bspline
from .targets import TargetFunction
from .waves import WaveSequence, admissibility_ratio, try_certificate

__all__ = [
    "LevelArtifacts",
    "LevelSummary",
    "StudyReport",
    "convergence_study",
    "exact_samples",
    "fit_decay",
    "l2_error",
    "summary_json",
    "synthesize",
    "synthesize_grid",
    "write_report_csv",
    "write_summary_json",
]


def exact_samples(target: TargetFunction, lattice: LatticeSet) -> RecoveredSamples:
    """Ground-truth samples ``f(2**-N k)`` over a lattice (study baseline)."""
    pts = lattice.points()
    vals = np.atleast_1d(target.evaluate(lattice.scaled_points()))
    values = {
        tuple(int(v) for v in pts[j]): complex(vals[j]) for j in range(len(pts))
    }
    return RecoveredSamples(level=lattice.level, values=values)


def synthesize(samples: RecoveredSamples, phi: RefinableFunction, x) -> complex:
    """Evaluate the spline expansion at a single point.

    Only the finitely many shifts whose support contains the point
    contribute; missing coefficients (e.g. skipped degenerate points) count
    as zero.
    """
    point = np.asarray(x, dtype=float)
    if point.ndim == 0:
        point = point[None]
    if point.shape != (phi.dimension,):
        raise ConfigurationError(
            f"expected a point with {phi.dimension} coordinates, got shape "
            f"{np.asarray(x).shape}"
        )
    y = 2.0**samples.level * point
    per_axis: list[list[tuple[int, float]]] = []
    for coord, order in zip(y, phi.orders):
        hi = math.ceil(coord)
        pairs = []
        for k in range(hi - order, hi):
            pairs.append((k, eval_bspline(order, coord - k)))
        per_axis.append(pairs)
    total = 0.0 + 0.0j
    for combo in itertools.product(*per_axis):
        key = tuple(k for k, _ in combo)
        coeff = samples.values.get(key)
        if coeff is None:
            continue
        weight = 1.0
        for _, w in combo:
            weight *= w
        total += coeff * weight
    return total


def synthesize_grid(
    samples: RecoveredSamples, phi: RefinableFunction, axes: Sequence[np.ndarray]
) -> np.ndarray:
    """Evaluate the spline expansion on a tensor grid.

    ``axes`` holds one 1-D coordinate array per axis; the result has shape
    ``(len(axes[0]), ..., len(axes[d-1]))``.  The separable structure reduces
    the work to one small basis matrix per axis and a tensor contraction.
    """
    if len(axes) != phi.dimension:
        raise ConfigurationError(
            f"need {phi.dimension} coordinate arrays, got {len(axes)}"
        )
    keys = np.asarray(list(samples.values.keys()), dtype=np.int64)
    if keys.size == 0:
        raise ValueError("no coefficients to synthesise from")
    mins = keys.min(axis=0)
    maxs = keys.max(axis=0)
    shape = tuple(int(b - a + 1) for a, b in zip(mins, maxs))
    coeff = np.zeros(shape, dtype=complex)
    for key, val in samples.values.items():
        coeff[tuple(int(v - a) for v, a in zip(key, mins))] = val
    scale = 2.0**samples.level
    out = coeff
    for axis in range(phi.dimension):
        shifts = np.arange(mins[axis], maxs[axis] + 1)
        basis = eval_bspline(
            phi.orders[axis],
            np.subtract.outer(scale * np.asarray(axes[axis], dtype=float), shifts),
        )
        out = np.tensordot(out, basis, axes=([0], [1]))
    return out


def _midpoint_axes(
    roi: Roi, cells: Sequence[int]
) -> tuple[list[np.ndarray], float]:
    axes = []
    volume_element = 1.0
    for (lo, hi), n in zip(zip(roi.lower, roi.upper), cells):
        n = int(n)
        if n < 1:
            raise ConfigurationError(f"cell count must be positive, got {n}")
        h = (hi - lo) / n
        axes.append(lo + (np.arange(n) + 0.5) * h)
        volume_element *= h
    return axes, volume_element


def _grid_values(target: TargetFunction, axes: Sequence[np.ndarray]) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=-1)
    return np.asarray(target.evaluate(flat)).reshape(mesh[0].shape)


def l2_error(
    target: TargetFunction,
    samples: RecoveredSamples,
    phi: RefinableFunction,
    roi: Roi,
    cells: Sequence[int] | int,
) -> float:
    """L2 distance over the region between target and spline expansion.

    Uses the composite midpoint rule with the given number of cells per axis
    (midpoints never hit spline knots, so the integrand is smooth inside
    every cell).
    """
    if isinstance(cells, (int, np.integer)):
        cells = (int(cells),) * roi.dimension
    axes, volume_element = _midpoint_axes(roi, cells)
    approx = synthesize_grid(samples, phi, axes)
    exact = _grid_values(target, axes)
    return float(np.sqrt(np.sum(np.abs(exact - approx) ** 2) * volume_element))


def fit_decay(
    levels: Sequence[int], errors: Sequence[float]
) -> tuple[float, float, float]:
    """Least-squares fit of ``log2(error)`` against the level.

    Returns ``(rate, intercept, residual)`` where ``rate`` is the negated
    slope (so positive rates mean decay) and ``residual`` the root-mean-square
    misfit of the regression line.
    """
    lev = np.asarray(levels, dtype=float)
    err = np.asarray(errors, dtype=float)
    if lev.size < 2:
        raise ValueError("need at least two levels to fit a decay rate")
    if np.any(err <= 0):
        raise ValueError("errors must be positive for a log fit")
    logs = np.log2(err)
    slope, intercept = np.polyfit(lev, logs, 1)
    pred = slope * lev + intercept
    residual = float(np.sqrt(np.mean((pred - logs) ** 2)))
    return float(-slope), float(intercept), residual


@dataclass(frozen=True)
class LevelSummary:
    """Per-level measurements of one study run."""

    level: int
    lattice_size: int
    ratio: float
    certificate: float | None
    sup_magnitude: float
    degenerate_count: int
    max_point_error: float
    bound_margin: float | None
    l2_error: float
    baseline_l2_error: float


@dataclass
class LevelArtifacts:
    """Raw per-level data kept when a study is asked to retain it."""

    level: int
    records: list[IntensityRecord]
    samples: RecoveredSamples


@dataclass
class StudyReport:
    """Outcome of a level-wise convergence study."""

    target_label: str
    wave_family: str
    levels: tuple[int, ...]
    rows: tuple[LevelSummary, ...]
    decay_rate: float | None
    decay_intercept: float | None
    decay_residual: float | None
    baseline_rate: float | None
    baseline_intercept: float | None
    baseline_residual: float | None
    fit_levels: tuple[int, ...]
    cells: tuple[int, ...]
    timings: dict[str, float] = field(default_factory=dict)
    artifacts: tuple[LevelArtifacts, ...] | None = None


def convergence_study(
    target: TargetFunction,
    waves: WaveSequence,
    phi: RefinableFunction,
    roi: Roi,
    levels: Sequence[int],
    margins: Sequence[int] | int | None = None,
    axis: int = 0,
    cells_per_unit: int | None = None,
    noise_scale: float = 0.0,
    seed: int = 0,
    keep_artifacts: bool = False,
) -> StudyReport:
    """Run the full pipeline over a range of levels and fit the error decay.

    Per level: build the lattice and its measurement triples, check the
    reference wave's admissibility (aborting with InadmissibleLevelError on a
    vanishing determinant), simulate the three intensities per point
    (optionally perturbed by bounded relative noise), recover the samples
    pointwise, and measure the L2 error of the spline expansion over the
    region alongside a baseline expansion built from exact samples.  In the
    noiseless case the per-point error bound
    ``ratio * ||quasi-intensity perturbation||`` is evaluated and the worst
    signed margin recorded (negative means the bound holds).

    ``cells_per_unit`` controls the midpoint quadrature resolution (default:
    ``2**(max level + 4)`` cells per unit length).  ``seed`` offsets the
    per-level noise draws so runs are reproducible.
    """
    levels = tuple(int(n) for n in levels)
    if not levels:
        raise ConfigurationError("need at least one level")
    if target.dimension != roi.dimension or waves.dimension != roi.dimension:
        raise ConfigurationError(
            "target, wave and region dimensions must agree: "
            f"{target.dimension}, {waves.dimension}, {roi.dimension}"
        )
    if phi.dimension != roi.dimension:
        raise ConfigurationError(
            f"scaling function dimension {phi.dimension} does not match "
            f"region dimension {roi.dimension}"
        )
    if margins is None:
        margins = phi.margins
    if cells_per_unit is None:
        cells_per_unit = 2 ** (max(levels) + 4)
    cells = tuple(
        max(1, int(math.ceil(cells_per_unit * (hi - lo))))
        for lo, hi in zip(roi.lower, roi.upper)
    )
    variant = waves.family
    timings = {"measure": 0.0, "recover": 0.0, "synthesize": 0.0}
    rows: list[LevelSummary] = []
    artifacts: list[LevelArtifacts] = []
    quad_axes, _ = _midpoint_axes(roi, cells)
    sup_target = float(np.max(np.abs(_grid_values(target, quad_axes))))

    for n in levels:
        lattice = build_lattice(roi, margins, n)
        triples = build_triples(lattice, variant, axis=axis)
        wave = waves.wave_at(n)

        report = admissibility_ratio(wave, triples)
        if not (report.distinct and math.isfinite(report.ratio)):
            worst = int(np.argmax(report.per_triple))
            base = triples.base_points()[worst]
            plus, minus = (arr[worst] for arr in triples.companion_indices())
            raise InadmissibleLevelError(
                n,
                (
                    tuple(base.tolist()),
                    tuple(plus.tolist()),
                    tuple(minus.tolist()),
                ),
            )
        certificate = try_certificate(waves, roi, margins, n, axis=axis)

        t0 = time.perf_counter()
        records = sample_intensities(target, wave, triples)
        if noise_scale > 0:
            records = perturb_intensities(records, noise_scale, seed + n)
        timings["measure"] += time.perf_counter() - t0

        t0 = time.perf_counter()
        samples = recover_level(records, wave, n, skip_degenerate=True)
        timings["recover"] += time.perf_counter() - t0

        x, xp, xm = triples.positions()
        truth = np.atleast_1d(target.evaluate(x))
        point_errors = np.asarray(
            [
                abs(samples.values[rec.k] - truth[j])
                for j, rec in enumerate(records)
                if rec.k in samples.values
            ]
        )
        max_point_error = float(point_errors.max()) if point_errors.size else math.nan

        bound_margin = None
        if noise_scale == 0:
            # Quasi-intensities freeze the target at the base point; their
            # gap to the measured companions drives the recovery error bound.
            g_plus = np.atleast_1d(wave.evaluate(xp))
            g_minus = np.atleast_1d(wave.evaluate(xm))
            quasi_plus = np.abs(truth + g_plus) ** 2
            quasi_minus = np.abs(truth + g_minus) ** 2
            i_plus = np.asarray([rec.plus for rec in records])
            i_minus = np.asarray([rec.minus for rec in records])
            delta = np.hypot(i_plus - quasi_plus, i_minus - quasi_minus)
            margins_arr = []
            for j, rec in enumerate(records):
                if rec.k not in samples.values:
                    continue
                err = abs(samples.values[rec.k] - truth[j])
                margins_arr.append(err - report.per_triple[j] * delta[j])
            if margins_arr:
                bound_margin = float(max(margins_arr))

        t0 = time.perf_counter()
        err = l2_error(target, samples, phi, roi, cells)
        baseline = l2_error(target, exact_samples(target, lattice), phi, roi, cells)
        timings["synthesize"] += time.perf_counter() - t0

        rows.append(
            LevelSummary(
                level=n,
                lattice_size=lattice.size,
                ratio=report.ratio,
                certificate=certificate,
                sup_magnitude=report.sup_magnitude,
                degenerate_count=len(samples.skipped),
                max_point_error=max_point_error,
                bound_margin=bound_margin,
                l2_error=err,
                baseline_l2_error=baseline,
            )
        )
        if keep_artifacts:
            artifacts.append(LevelArtifacts(level=n, records=records, samples=samples))

    # Exclude levels already at numerical floor from the decay fit.
    floor = 1e-12 * max(1.0, sup_target)
    fit_rows = [r for r in rows if r.l2_error > floor and r.baseline_l2_error > floor]
    fit_levels = tuple(r.level for r in fit_rows)
    if len(fit_rows) >= 2:
        rate, intercept, residual = fit_decay(
            fit_levels, [r.l2_error for r in fit_rows]
        )
        base_rate, base_intercept, base_residual = fit_decay(
            fit_levels, [r.baseline_l2_error for r in fit_rows]
        )
    else:
        rate = intercept = residual = None
        base_rate = base_intercept = base_residual = None

    return StudyReport(
        target_label=target.label,
        wave_family=waves.family,
        levels=levels,
        rows=tuple(rows),
        decay_rate=rate,
        decay_intercept=intercept,
        decay_residual=residual,
        baseline_rate=base_rate,
        baseline_intercept=base_intercept,
        baseline_residual=base_residual,
        fit_levels=fit_levels,
        cells=cells,
        timings=timings,
        artifacts=tuple(artifacts) if keep_artifacts else None,
    )


_REPORT_COLUMNS = [
    "level",
    "lattice_size",
    "ratio",
    "certificate",
    "sup_magnitude",
    "degenerate_count",
    "max_point_error",
    "bound_margin",
    "l2_error",
    "baseline_l2_error",
]


def write_report_csv(report: StudyReport, path) -> None:
    """Write the per-level table of a study to CSV (deterministic bytes)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_REPORT_COLUMNS)
        for row in report.rows:
            writer.writerow(
                [
                    str(row.level),
                    str(row.lattice_size),
                    float_repr(row.ratio),
                    "" if row.certificate is None else float_repr(row.certificate),
                    float_repr(row.sup_magnitude),
                    str(row.degenerate_count),
                    float_repr(row.max_point_error),
                    "" if row.bound_margin is None else float_repr(row.bound_margin),
                    float_repr(row.l2_error),
                    float_repr(row.baseline_l2_error),
                ]
            )


def summary_json(report: StudyReport, config: dict | None = None) -> dict:
    """JSON-ready summary of a study: schema, per-level rows, fits, timings."""
    rows = []
    for row in report.rows:
        rows.append(
            {
                "level": row.level,
                "lattice_size": row.lattice_size,
                "ratio": row.ratio,
                "certificate": row.certificate,
                "sup_magnitude": row.sup_magnitude,
                "degenerate_count": row.degenerate_count,
                "max_point_error": row.max_point_error,
                "bound_margin": row.bound_margin,
                "l2_error": row.l2_error,
                "baseline_l2_error": row.baseline_l2_error,
            }
        )
    out = {
        "schema": 1,
        "target": report.target_label,
        "wave_family": report.wave_family,
        "levels": list(report.levels),
        "cells": list(report.cells),
        "rows": rows,
        "decay": {
            "rate": report.decay_rate,
            "intercept": report.decay_intercept,
            "residual": report.decay_residual,
            "fit_levels": list(report.fit_levels),
        },
        "baseline_decay": {
            "rate": report.baseline_rate,
            "intercept": report.baseline_intercept,
            "residual": report.baseline_residual,
        },
        "timings_seconds": {k: report.timings[k] for k in sorted(report.timings)},
    }
    if config is not None:
        out["config"] = config
    return out


def write_summary_json(report: StudyReport, path, config: dict | None = None) -> None:
    """Write the study summary as indented JSON with a trailing newline."""
    with open(path, "w") as handle:
        json.dump(summary_json(report, config), handle, indent=2, sort_keys=True)
        handle.write("\n")
