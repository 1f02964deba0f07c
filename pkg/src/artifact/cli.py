"""Command-line front end: configured runs, validation, and replays.

Subcommands:

* ``run``      -- execute a configured convergence study, writing intensity,
                  recovery, and report tables plus a JSON summary.
* ``validate`` -- check a config without running it (exit 2 on violations).
* ``replay``   -- re-run recovery from a previously written intensity table;
                  byte-identical outputs for identical inputs.
* ``admissibility`` -- print per-level ratio diagnostics for the configured
                  reference wave.

Configs are TOML.  Errors are reported as a single JSON line on stderr with
a stable ``error`` token; exit codes are 0 (ok), 2 (invalid config or
arguments), 3 (runtime failure).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import (
    ArtifactError,
    CertificateError,
    ConfigurationError,
    DegeneratePointError,
    InadmissibleLevelError,
    MixedLevelError,
    SingularPointError,
    ZeroInLatticeError,
)
from .lattice import Roi, build_lattice, build_triples, zero_excluded
from .measure import read_intensity_csv, write_intensity_csv
from .recover import recover_level, write_samples_csv
from .reconstruct import convergence_study, write_report_csv, write_summary_json
from .refinable import RefinableFunction, tensor_bspline
from .targets import TargetFunction, builtin_target
from .waves import (
    WaveSequence,
    admissibility_ratio,
    plane_certificate,
    plane_design,
    spherical_certificate,
    spherical_design,
    try_certificate,
)

__all__ = ["ExperimentConfig", "load_config", "main", "validate_config"]


@dataclass
class ExperimentConfig:
    """Parsed and defaulted experiment description."""

    target_name: str
    dimension: int
    target_params: dict
    wave_family: str
    amplitude: float
    phase_scale: float | None
    base_wavenumber: float | None
    axis: int                      # 1-based, as written in the config
    spline_orders: tuple[int, ...]
    roi_lower: tuple[float, ...]
    roi_upper: tuple[float, ...]
    level_min: int
    level_max: int
    cells_per_unit: int | None
    noise_scale: float
    noise_seed: int
    smoothness: float | None
    approximation_order: float | None
    save_intensities: bool
    raw: dict = field(repr=False)

    @property
    def levels(self) -> range:
        return range(self.level_min, self.level_max + 1)

    def roi(self) -> Roi:
        return Roi(lower=self.roi_lower, upper=self.roi_upper)

    def target(self) -> TargetFunction:
        return builtin_target(
            self.target_name, dimension=self.dimension, **self.target_params
        )

    def spline(self) -> RefinableFunction:
        return tensor_bspline(self.spline_orders)

    def wave_sequence(self) -> WaveSequence:
        if self.wave_family == "plane":
            return plane_design(
                dimension=self.dimension,
                phase_scale=self.phase_scale if self.phase_scale is not None else 0.999,
                amplitude=self.amplitude,
            )
        if self.wave_family == "spherical":
            return spherical_design(
                dimension=self.dimension,
                base_wavenumber=(
                    self.base_wavenumber if self.base_wavenumber is not None else 0.3
                ),
                amplitude=self.amplitude,
            )
        raise ConfigurationError(f"unknown wave family {self.wave_family!r}")


def load_config(path) -> ExperimentConfig:
    """Read a TOML experiment config, applying defaults."""
    path = Path(path)
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config parse error in {path}: {exc}")

    def section(name: str, required: bool = False) -> dict:
        value = raw.get(name, {})
        if required and not value:
            raise ConfigurationError(f"config section [{name}] is required")
        if not isinstance(value, dict):
            raise ConfigurationError(f"config section [{name}] must be a table")
        return dict(value)

    target_sec = section("target", required=True)
    roi_sec = section("roi", required=True)
    wave_sec = section("wave", required=True)
    levels_sec = section("levels", required=True)
    spline_sec = section("spline")
    quad_sec = section("quadrature")
    noise_sec = section("noise")
    analysis_sec = section("analysis")
    output_sec = section("output")

    try:
        name = target_sec.pop("name")
    except KeyError:
        raise ConfigurationError("config key target.name is required")
    if "lower" not in roi_sec or "upper" not in roi_sec:
        raise ConfigurationError("config keys roi.lower and roi.upper are required")
    lower = roi_sec["lower"]
    upper = roi_sec["upper"]
    if isinstance(lower, (int, float)):
        lower = [lower]
    if isinstance(upper, (int, float)):
        upper = [upper]
    dimension = int(target_sec.pop("dimension", len(lower)))
    family = wave_sec.get("family")
    if family is None:
        raise ConfigurationError("config key wave.family is required")
    if "min" not in levels_sec or "max" not in levels_sec:
        raise ConfigurationError("config keys levels.min and levels.max are required")

    orders = spline_sec.get("orders", [2] * dimension)
    if isinstance(orders, int):
        orders = [orders] * dimension

    return ExperimentConfig(
        target_name=str(name),
        dimension=dimension,
        target_params=dict(target_sec),
        wave_family=str(family),
        amplitude=float(wave_sec.get("amplitude", 1.0)),
        phase_scale=(
            float(wave_sec["phase_scale"]) if "phase_scale" in wave_sec else None
        ),
        base_wavenumber=(
            float(wave_sec["base_wavenumber"])
            if "base_wavenumber" in wave_sec
            else None
        ),
        axis=int(wave_sec.get("axis", 1)),
        spline_orders=tuple(int(m) for m in orders),
        roi_lower=tuple(float(v) for v in lower),
        roi_upper=tuple(float(v) for v in upper),
        level_min=int(levels_sec["min"]),
        level_max=int(levels_sec["max"]),
        cells_per_unit=(
            int(quad_sec["cells_per_unit"]) if "cells_per_unit" in quad_sec else None
        ),
        noise_scale=float(noise_sec.get("scale", 0.0)),
        noise_seed=int(noise_sec.get("seed", 0)),
        smoothness=(
            float(analysis_sec["smoothness"]) if "smoothness" in analysis_sec else None
        ),
        approximation_order=(
            float(analysis_sec["approximation_order"])
            if "approximation_order" in analysis_sec
            else None
        ),
        save_intensities=bool(output_sec.get("save_intensities", True)),
        raw=raw,
    )


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Collect violations that would make a run unsound.

    Returns an empty list when the config is runnable.  Violation strings
    start with a stable token (e.g. ``zero-in-lattice``, ``degenerate-phase``)
    followed by a human-readable explanation.
    """
    violations: list[str] = []

    if cfg.dimension < 1:
        violations.append(f"bad-dimension: dimension must be positive, got {cfg.dimension}")
        return violations
    if len(cfg.roi_lower) != cfg.dimension or len(cfg.roi_upper) != cfg.dimension:
        violations.append(
            "bad-dimension: roi bounds must match the target dimension "
            f"{cfg.dimension}"
        )
        return violations

    roi = None
    try:
        roi = cfg.roi()
        roi.integer_bounds()
    except ConfigurationError as exc:
        violations.append(f"bad-region: {exc}")

    try:
        cfg.target()
    except ConfigurationError as exc:
        violations.append(f"bad-target: {exc}")

    phi = None
    if len(cfg.spline_orders) != cfg.dimension:
        violations.append(
            f"bad-spline: need one order per axis, got {cfg.spline_orders} "
            f"for dimension {cfg.dimension}"
        )
    else:
        try:
            phi = cfg.spline()
        except (ConfigurationError, ValueError) as exc:
            violations.append(f"bad-spline: {exc}")

    if cfg.level_min < 0 or cfg.level_min > cfg.level_max:
        violations.append(
            f"bad-levels: need 0 <= min <= max, got {cfg.level_min}..{cfg.level_max}"
        )
    if cfg.noise_scale < 0:
        violations.append(f"bad-noise: scale must be nonnegative, got {cfg.noise_scale}")
    if not (0 <= cfg.noise_seed < 2**64):
        violations.append(f"bad-noise: seed must fit in 64 bits, got {cfg.noise_seed}")

    waves = None
    if cfg.wave_family not in ("plane", "spherical"):
        violations.append(f"bad-wave: unknown family {cfg.wave_family!r}")
    else:
        try:
            waves = cfg.wave_sequence()
        except ConfigurationError as exc:
            violations.append(f"bad-wave: {exc}")

    axis_ok = not (
        cfg.wave_family == "plane" and not (1 <= cfg.axis <= cfg.dimension)
    )
    if not axis_ok:
        violations.append(
            f"bad-wave: stepped axis {cfg.axis} out of range 1..{cfg.dimension}"
        )

    # Smoothness chain: the synthesis guarantee needs the target index above
    # d/2, a strictly larger approximation order, and a scaling function
    # good enough to realise it.
    if (cfg.smoothness is None) != (cfg.approximation_order is None):
        violations.append(
            "bad-analysis: smoothness and approximation_order must be given together"
        )
    elif cfg.smoothness is not None and phi is not None:
        s, order = cfg.smoothness, cfg.approximation_order
        if not s > cfg.dimension / 2.0:
            violations.append(
                f"bad-analysis: smoothness {s} must exceed half the dimension "
                f"({cfg.dimension / 2.0})"
            )
        if not order > s:
            violations.append(
                f"bad-analysis: approximation_order {order} must exceed "
                f"smoothness {s}"
            )
        capability = min(phi.sobolev_smoothness, phi.sum_rule_order)
        if not order <= capability:
            violations.append(
                f"bad-analysis: approximation_order {order} exceeds the spline "
                f"capability {capability} (min of regularity and sum rules)"
            )

    ok_so_far = (
        roi is not None and phi is not None and waves is not None and axis_ok
    )
    if ok_so_far and cfg.level_min >= 0 and cfg.level_min <= cfg.level_max:
        margins = phi.margins
        if cfg.wave_family == "spherical":
            witness = zero_excluded(roi, margins)
            if not witness.excluded:
                violations.append(
                    "zero-in-lattice: no axis keeps every level's lattice away "
                    "from the origin; radial companions would collapse onto the "
                    "singular point"
                )
            else:
                for n in cfg.levels:
                    try:
                        spherical_certificate(waves, roi, margins, n)
                    except CertificateError as exc:
                        violations.append(f"{exc.reason}: level {n}: {exc.detail}")
                        break
        if cfg.wave_family == "plane":
            for n in cfg.levels:
                try:
                    plane_certificate(waves, n, axis=cfg.axis - 1)
                except CertificateError as exc:
                    violations.append(f"{exc.reason}: level {n}: {exc.detail}")
                    break
    return violations


def _parse_level_span(text: str) -> tuple[int, int]:
    parts = text.split("..")
    if len(parts) == 1:
        value = int(parts[0])
        return value, value
    if len(parts) == 2:
        return int(parts[0]), int(parts[1])
    raise argparse.ArgumentTypeError(f"bad level span {text!r}; expected A..B")


_ERROR_CODES = {
    ZeroInLatticeError: "zero-in-lattice",
    InadmissibleLevelError: "inadmissible-level",
    DegeneratePointError: "degenerate-point",
    SingularPointError: "singular-point",
    MixedLevelError: "mixed-levels",
    ConfigurationError: "config-invalid",
}


def _fail(exc: Exception) -> int:
    """Print the one-line JSON error report and choose the exit code."""
    if isinstance(exc, CertificateError):
        code = exc.reason
    else:
        code = "error"
        for klass, token in _ERROR_CODES.items():
            if isinstance(exc, klass):
                code = token
                break
    print(json.dumps({"error": code, "detail": str(exc)}), file=sys.stderr)
    return 2 if isinstance(exc, ConfigurationError) else 3


def _fail_validation(violations: list[str]) -> int:
    for line in violations:
        print(f"violation: {line}", file=sys.stderr)
    print(
        json.dumps({"error": "config-invalid", "violations": violations}),
        file=sys.stderr,
    )
    return 2


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    violations = validate_config(cfg)
    if violations:
        return _fail_validation(violations)
    print("config ok")
    return 0


def _apply_overrides(cfg: ExperimentConfig, args) -> None:
    if getattr(args, "levels", None) is not None:
        cfg.level_min, cfg.level_max = args.levels
    if getattr(args, "seed", None) is not None:
        if not (0 <= args.seed < 2**64):
            raise ConfigurationError(f"seed must fit in 64 bits, got {args.seed}")
        cfg.noise_seed = args.seed


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    _apply_overrides(cfg, args)
    violations = validate_config(cfg)
    if violations:
        return _fail_validation(violations)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = convergence_study(
        target=cfg.target(),
        waves=cfg.wave_sequence(),
        phi=cfg.spline(),
        roi=cfg.roi(),
        levels=cfg.levels,
        axis=cfg.axis - 1,
        cells_per_unit=cfg.cells_per_unit,
        noise_scale=cfg.noise_scale,
        seed=cfg.noise_seed,
        keep_artifacts=True,
    )

    all_records = []
    for artifact in report.artifacts:
        all_records.extend(artifact.records)
        write_samples_csv(
            artifact.samples, out_dir / f"recovered_N{artifact.level}.csv"
        )
    if cfg.save_intensities:
        write_intensity_csv(all_records, out_dir / "intensities.csv")
    write_report_csv(report, out_dir / "report.csv")
    write_summary_json(report, out_dir / "summary.json", config=cfg.raw)

    for row in report.rows:
        cert = "-" if row.certificate is None else f"{row.certificate:.6g}"
        print(
            f"level {row.level}: lattice={row.lattice_size} "
            f"ratio={row.ratio:.6g} certificate={cert} "
            f"l2={row.l2_error:.6g} baseline={row.baseline_l2_error:.6g}"
        )
    if report.decay_rate is not None:
        print(
            f"decay rate {report.decay_rate:.4f} "
            f"(baseline {report.baseline_rate:.4f}) "
            f"over levels {report.fit_levels[0]}..{report.fit_levels[-1]}"
        )
    print(f"wrote {out_dir}")
    return 0


def _cmd_replay(args) -> int:
    cfg = load_config(args.config)
    violations = validate_config(cfg)
    if violations:
        return _fail_validation(violations)
    records = read_intensity_csv(args.intensities)
    if not records:
        raise ConfigurationError(f"no records in {args.intensities}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    waves = cfg.wave_sequence()
    by_level: dict[int, list] = {}
    for rec in records:
        by_level.setdefault(rec.level, []).append(rec)
    for level in sorted(by_level):
        samples = recover_level(
            by_level[level], waves.wave_at(level), level, skip_degenerate=True
        )
        write_samples_csv(samples, out_dir / f"recovered_N{level}.csv")
        print(
            f"level {level}: recovered {len(samples.values)} points "
            f"({len(samples.skipped)} degenerate)"
        )
    print(f"wrote {out_dir}")
    return 0


def _cmd_admissibility(args) -> int:
    cfg = load_config(args.config)
    _apply_overrides(cfg, args)
    roi = cfg.roi()
    phi = cfg.spline()
    waves = cfg.wave_sequence()
    print("level  lattice  ratio         certificate   sup|g|       distinct")
    for n in cfg.levels:
        lattice = build_lattice(roi, phi.margins, n)
        triples = build_triples(lattice, cfg.wave_family, axis=cfg.axis - 1)
        report = admissibility_ratio(waves.wave_at(n), triples)
        cert = try_certificate(waves, roi, phi.margins, n, axis=cfg.axis - 1)
        cert_text = "-" if cert is None else f"{cert:<12.6g}"
        print(
            f"{n:<6d} {lattice.size:<8d} {report.ratio:<13.6g} "
            f"{cert_text:<13} {report.sup_magnitude:<12.6g} "
            f"{'yes' if report.distinct else 'no'}"
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artifact",
        description=(
            "Simulate single-shot interference measurements of a complex "
            "target and reconstruct it level by level."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, out_default=None):
        p.add_argument("--config", required=True, help="TOML experiment config")
        if out_default is not None:
            p.add_argument(
                "--out", default=out_default, help="output directory (created)"
            )

    p_run = sub.add_parser("run", help="run a configured convergence study")
    add_common(p_run, out_default="out")
    p_run.add_argument(
        "--levels", type=_parse_level_span, default=None, metavar="A..B",
        help="override the level range",
    )
    p_run.add_argument(
        "--seed", type=int, default=None, help="override the noise seed"
    )
    p_run.set_defaults(fn=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config without running")
    add_common(p_val)
    p_val.set_defaults(fn=_cmd_validate)

    p_rep = sub.add_parser(
        "replay", help="re-run recovery from a stored intensity table"
    )
    add_common(p_rep, out_default="out")
    p_rep.add_argument(
        "--intensities", required=True, help="intensity CSV from a previous run"
    )
    p_rep.set_defaults(fn=_cmd_replay)

    p_adm = sub.add_parser(
        "admissibility", help="per-level wave diagnostics for a config"
    )
    add_common(p_adm)
    p_adm.add_argument(
        "--levels", type=_parse_level_span, default=None, metavar="A..B",
        help="override the level range",
    )
    p_adm.set_defaults(fn=_cmd_admissibility)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ArtifactError as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
