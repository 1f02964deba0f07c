"""Simulated single-shot intensity measurements and their CSV serialisation.

A detector sees only ``|f(x) + g(x)|**2``.  For every lattice point the
simulator records that intensity at the point itself and at its two
companion points, which is exactly the data the pointwise recovery step
consumes.  Records can be perturbed with bounded relative noise and round-trip
losslessly through CSV (floats are written in shortest round-trip form).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._format import float_repr
from .lattice import TripleSet
from .targets import TargetFunction
from .waves import Wave

__all__ = [
    "IntensityRecord",
    "intensity",
    "perturb_intensities",
    "quasi_intensities",
    "read_intensity_csv",
    "sample_intensities",
    "write_intensity_csv",
]


def intensity(f: TargetFunction, g: Wave, x) -> np.ndarray | float:
    """Measured intensity ``|f(x) + g(x)|**2`` at a point or batch."""
    total = np.asarray(f.evaluate(x)) + np.asarray(g.evaluate(x))
    out = np.abs(total) ** 2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IntensityRecord:
    """One lattice point's three intensities at one level.

    ``k`` is the integer base index; ``k_plus`` and ``k_minus`` are the
    companion indices (floats: radial companions are non-integer).  The
    intensities ``base``, ``plus``, ``minus`` correspond to the three points
    in the same order.
    """

    level: int
    k: tuple[int, ...]
    k_plus: tuple[float, ...]
    k_minus: tuple[float, ...]
    base: float
    plus: float
    minus: float


def sample_intensities(
    f: TargetFunction, g: Wave, triples: TripleSet
) -> list[IntensityRecord]:
    """Simulate the full intensity data set over one triple family."""
    x, xp, xm = triples.positions()
    i_base = intensity(f, g, x)
    i_plus = intensity(f, g, xp)
    i_minus = intensity(f, g, xm)
    base_idx = triples.base_points()
    plus_idx, minus_idx = triples.companion_indices()
    records = []
    for j in range(len(triples)):
        records.append(
            IntensityRecord(
                level=triples.level,
                k=tuple(int(v) for v in base_idx[j]),
                k_plus=tuple(float(v) for v in plus_idx[j]),
                k_minus=tuple(float(v) for v in minus_idx[j]),
                base=float(i_base[j]),
                plus=float(i_plus[j]),
                minus=float(i_minus[j]),
            )
        )
    return records


def quasi_intensities(
    f: TargetFunction, g: Wave, level: int, triple: tuple
) -> tuple[float, float]:
    """Idealised companion intensities with the target frozen at the base point.

    Returns ``(|f(x_k) + g(x_plus)|**2, |f(x_k) + g(x_minus)|**2)``.  On this
    input the pointwise solve is exact in exact arithmetic, which separates
    the algebraic error of the solver from the sampling error of the data.
    """
    k, kp, km = (np.asarray(t, dtype=float) for t in triple)
    spacing = 2.0 ** (-int(level))
    fk = f.evaluate(k * spacing)
    gp = g.evaluate(kp * spacing)
    gm = g.evaluate(km * spacing)
    return (abs(fk + gp) ** 2, abs(fk + gm) ** 2)


def perturb_intensities(
    records: Sequence[IntensityRecord], noise_scale: float, seed: int
) -> list[IntensityRecord]:
    """Apply bounded relative noise ``I -> I * (1 + eta)``, clipped at zero.

    ``eta`` is drawn i.i.d. uniform on ``[-noise_scale, noise_scale]`` for
    each of the three intensities of each record, from a generator seeded
    with ``seed`` (identical inputs give identical outputs).
    """
    if noise_scale < 0:
        raise ValueError(f"noise scale must be nonnegative, got {noise_scale}")
    if noise_scale == 0:
        return list(records)
    rng = np.random.default_rng(int(seed))
    eta = rng.uniform(-noise_scale, noise_scale, size=(len(records), 3))
    out = []
    for rec, (e0, e1, e2) in zip(records, eta):
        out.append(
            replace(
                rec,
                base=max(rec.base * (1.0 + e0), 0.0),
                plus=max(rec.plus * (1.0 + e1), 0.0),
                minus=max(rec.minus * (1.0 + e2), 0.0),
            )
        )
    return out


def _intensity_header(dimension: int) -> list[str]:
    cols = ["level"]
    cols += [f"k{a + 1}" for a in range(dimension)]
    cols += [f"kp{a + 1}" for a in range(dimension)]
    cols += [f"km{a + 1}" for a in range(dimension)]
    cols += ["intensity_base", "intensity_plus", "intensity_minus"]
    return cols


def write_intensity_csv(records: Iterable[IntensityRecord], path) -> None:
    """Write records to CSV with lossless float formatting.

    The writer is deterministic: same records, same bytes (rows keep the
    given order, the line terminator is a bare newline).
    """
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    dim = len(records[0].k)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_intensity_header(dim))
        for rec in records:
            row = [str(rec.level)]
            row += [str(v) for v in rec.k]
            row += [float_repr(v) for v in rec.k_plus]
            row += [float_repr(v) for v in rec.k_minus]
            row += [float_repr(rec.base), float_repr(rec.plus), float_repr(rec.minus)]
            writer.writerow(row)


def read_intensity_csv(path) -> list[IntensityRecord]:
    """Read records written by ``write_intensity_csv`` (bit-exact floats)."""
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[0] != "level":
            raise ValueError(f"{path}: not an intensity table")
        dim, rem = divmod(len(header) - 4, 3)
        if rem or dim < 1:
            raise ValueError(f"{path}: malformed intensity header {header}")
        records = []
        for row in reader:
            if not row:
                continue
            level = int(row[0])
            k = tuple(int(v) for v in row[1 : 1 + dim])
            kp = tuple(float(v) for v in row[1 + dim : 1 + 2 * dim])
            km = tuple(float(v) for v in row[1 + 2 * dim : 1 + 3 * dim])
            base, plus, minus = (float(v) for v in row[1 + 3 * dim : 4 + 3 * dim])
            records.append(
                IntensityRecord(
                    level=level, k=k, k_plus=kp, k_minus=km,
                    base=base, plus=plus, minus=minus,
                )
            )
    return records
