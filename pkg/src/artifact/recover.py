"""Pointwise recovery of the target from intensity differences.

Subtracting the companion intensities from the base intensity cancels the
unknown ``|f|**2`` term and leaves a 2x2 real linear system for the real and
imaginary parts of ``f`` at the lattice point.  The system's coefficients
involve only the known reference wave; its determinant is the same ``mu``
that the admissibility diagnostics bound from below.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._format import float_repr
from .errors import DegeneratePointError, MixedLevelError
from .measure import IntensityRecord
from .waves import Wave

__all__ = [
    "RecoveredSamples",
    "SolveCoefficients",
    "read_samples_csv",
    "recover_level",
    "solve_point",
    "write_samples_csv",
]


@dataclass(frozen=True)
class SolveCoefficients:
    """Real 2x2 system data for one triple.

    With first differences ``g - g_plus = c + i d`` and
    ``g - g_minus = h + i e``, the system for ``(Re f, Im f)`` is
    ``[[c, d], [h, e]] . (Re f, Im f) = (b1, b2) / 2`` and its determinant
    is ``mu = c e - d h``.
    """

    c: float
    d: float
    h: float
    e: float
    mu: float

    @classmethod
    def from_wave(cls, g: Wave, level: int, triple: tuple) -> "SolveCoefficients":
        k, kp, km = (np.asarray(t, dtype=float) for t in triple)
        spacing = 2.0 ** (-int(level))
        gk = g.evaluate(k * spacing)
        gp = g.evaluate(kp * spacing)
        gm = g.evaluate(km * spacing)
        d_plus = gk - gp
        d_minus = gk - gm
        c, d = float(d_plus.real), float(d_plus.imag)
        h, e = float(d_minus.real), float(d_minus.imag)
        return cls(c=c, d=d, h=h, e=e, mu=c * e - d * h)


def solve_point(
    g: Wave,
    level: int,
    triple: tuple,
    base: float,
    plus: float,
    minus: float,
    mu_floor: float | None = None,
) -> complex:
    """Solve one lattice point's 2x2 system from its three intensities.

    The right-hand sides are the intensity differences corrected by the known
    wave magnitudes:
    ``b1 = base - plus + |g_plus|**2 - |g|**2`` and the analogue for the
    minus companion.  Cramer's rule with the adjugate gives

        ``Re f = (e b1 - d b2) / (2 mu)``,
        ``Im f = (-h b1 + c b2) / (2 mu)``.

    Raises:
        DegeneratePointError: ``|mu|`` at or below the floor (default
            ``1e-12 * max(1, |g|**2)``), where the solve is meaningless.
    """
    k, kp, km = (np.asarray(t, dtype=float) for t in triple)
    spacing = 2.0 ** (-int(level))
    gk = g.evaluate(k * spacing)
    gp = g.evaluate(kp * spacing)
    gm = g.evaluate(km * spacing)
    coeff = SolveCoefficients.from_wave(g, level, triple)
    floor = mu_floor if mu_floor is not None else 1e-12 * max(1.0, abs(gk) ** 2)
    if abs(coeff.mu) <= floor:
        raise DegeneratePointError(tuple(np.asarray(triple[0]).tolist()), coeff.mu)
    b1 = base - plus + abs(gp) ** 2 - abs(gk) ** 2
    b2 = base - minus + abs(gm) ** 2 - abs(gk) ** 2
    re = (coeff.e * b1 - coeff.d * b2) / (2.0 * coeff.mu)
    im = (-coeff.h * b1 + coeff.c * b2) / (2.0 * coeff.mu)
    return complex(re, im)


@dataclass
class RecoveredSamples:
    """Recovered coefficients of one level, keyed by integer lattice index.

    ``values`` maps ``k`` to the recovered complex sample; ``determinants``
    keeps the solve determinant per point; ``skipped`` lists points dropped
    as degenerate together with their determinants (their synthesis
    coefficient is treated as zero).
    """

    level: int
    values: dict[tuple[int, ...], complex]
    determinants: dict[tuple[int, ...], float] = field(default_factory=dict)
    skipped: tuple[tuple[tuple[int, ...], float], ...] = ()

    @property
    def dimension(self) -> int:
        first = next(iter(self.values), None)
        if first is None:
            raise ValueError("no recovered values")
        return len(first)


def recover_level(
    records: Sequence[IntensityRecord],
    g: Wave,
    level: int,
    mu_floor: float | None = None,
    skip_degenerate: bool = False,
) -> RecoveredSamples:
    """Recover every lattice point of one level from its intensity records.

    All records must carry the given level.  With ``skip_degenerate`` the
    (near-)singular points are collected in ``skipped`` instead of raising.
    The whole level is solved vectorised.
    """
    records = list(records)
    if not records:
        return RecoveredSamples(level=int(level), values={})
    for rec in records:
        if rec.level != level:
            raise MixedLevelError(
                f"record at level {rec.level} mixed into recovery at level {level}"
            )
    spacing = 2.0 ** (-int(level))
    base_idx = np.asarray([rec.k for rec in records], dtype=float)
    plus_idx = np.asarray([rec.k_plus for rec in records], dtype=float)
    minus_idx = np.asarray([rec.k_minus for rec in records], dtype=float)
    gk = g.evaluate(base_idx * spacing)
    gp = g.evaluate(plus_idx * spacing)
    gm = g.evaluate(minus_idx * spacing)
    d_plus = gk - gp
    d_minus = gk - gm
    c, d = d_plus.real, d_plus.imag
    h, e = d_minus.real, d_minus.imag
    det = c * e - d * h
    i_base = np.asarray([rec.base for rec in records])
    i_plus = np.asarray([rec.plus for rec in records])
    i_minus = np.asarray([rec.minus for rec in records])
    b1 = i_base - i_plus + np.abs(gp) ** 2 - np.abs(gk) ** 2
    b2 = i_base - i_minus + np.abs(gm) ** 2 - np.abs(gk) ** 2
    floor = (
        np.full(len(records), mu_floor)
        if mu_floor is not None
        else 1e-12 * np.maximum(1.0, np.abs(gk) ** 2)
    )
    bad = np.abs(det) <= floor
    if bad.any() and not skip_degenerate:
        first = int(np.flatnonzero(bad)[0])
        raise DegeneratePointError(records[first].k, det[first])
    with np.errstate(divide="ignore", invalid="ignore"):
        re = (e * b1 - d * b2) / (2.0 * det)
        im = (-h * b1 + c * b2) / (2.0 * det)
    values: dict[tuple[int, ...], complex] = {}
    determinants: dict[tuple[int, ...], float] = {}
    skipped = []
    for j, rec in enumerate(records):
        determinants[rec.k] = float(det[j])
        if bad[j]:
            skipped.append((rec.k, float(det[j])))
        else:
            values[rec.k] = complex(re[j], im[j])
    return RecoveredSamples(
        level=int(level),
        values=values,
        determinants=determinants,
        skipped=tuple(skipped),
    )


def write_samples_csv(samples: RecoveredSamples, path) -> None:
    """Write recovered samples to CSV, sorted by index for determinism."""
    keys = sorted(samples.values)
    if not keys:
        raise ValueError("no recovered values to write")
    dim = len(keys[0])
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        header = ["level"] + [f"k{a + 1}" for a in range(dim)]
        header += ["real", "imag", "determinant"]
        writer.writerow(header)
        for k in keys:
            val = samples.values[k]
            row = [str(samples.level)] + [str(v) for v in k]
            row += [
                float_repr(val.real),
                float_repr(val.imag),
                float_repr(samples.determinants.get(k, float("nan"))),
            ]
            writer.writerow(row)


def read_samples_csv(path) -> RecoveredSamples:
    """Read a table written by ``write_samples_csv`` (bit-exact floats)."""
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[0] != "level" or header[-1] != "determinant":
            raise ValueError(f"{path}: not a recovered-sample table")
        dim = len(header) - 4
        if dim < 1:
            raise ValueError(f"{path}: malformed header {header}")
        level = None
        values: dict[tuple[int, ...], complex] = {}
        determinants: dict[tuple[int, ...], float] = {}
        for row in reader:
            if not row:
                continue
            level = int(row[0])
            k = tuple(int(v) for v in row[1 : 1 + dim])
            values[k] = complex(float(row[1 + dim]), float(row[2 + dim]))
            determinants[k] = float(row[3 + dim])
    if level is None:
        raise ValueError(f"{path}: empty table")
    return RecoveredSamples(level=level, values=values, determinants=determinants)
