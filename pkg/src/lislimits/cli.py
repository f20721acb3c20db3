"""Command-line front end.

    lislimits gain     -c link.yaml
    lislimits dof      -c link.yaml --set sweep.f_db=[-30,40,71]
    lislimits modes    -c desk.yaml -o out/desk
    lislimits validate
    lislimits run      -c any.yaml          # task taken from the file

Exit codes: 0 success, 1 validation failure, 2 config error, 3 resource
budget exceeded. ``LISLIMITS_WORKERS`` caps the number of sweep worker
processes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, dof, eigenmodes, linkbudget
from .config import ConfigError, RunConfig, load_config, parse_aspect_ratio
from .geometry import GeometryError, LinkGeometry, Medium, make_parallel_link, make_perpendicular_link
from .validation import run_checks

log = logging.getLogger("lislimits")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
WORKERS_ENV = "LISLIMITS_WORKERS"

GAIN_COLUMNS = [
    ("aspect_ratio", "S_x:S_y"),
    ("F_db", "dB"),
    ("g_closed", "1"),
    ("g_numeric", "1"),
    ("g_friis", "1"),
    ("g_large_lis", "1"),
    ("normalized_gain", "1"),
]
DOF_COLUMNS = [
    ("aspect_ratio", "S_x:S_y"),
    ("F_db", "dB"),
    ("d_closed", "modes"),
    ("d_numeric", "modes"),
    ("d_farfield_miller", "modes"),
    ("d_asymptotic", "modes"),
    ("d_rounded", "modes"),
]
SPECTRUM_COLUMNS = [("n", "index"), ("xi", "ohm*m"), ("xi2_db", "dB rel. xi_1^2")]
FIELD_COLUMNS = [
    ("u_index", "index"),
    ("v_index", "index"),
    ("x_m", "m"),
    ("y_m", "m"),
    ("z_m", "m"),
    ("re_Ex", "V/m"),
    ("im_Ex", "V/m"),
    ("re_Ey", "V/m"),
    ("im_Ey", "V/m"),
    ("re_Ez", "V/m"),
    ("im_Ez", "V/m"),
    ("amp_Ex", "V/m"),
    ("phase_Ex", "rad"),
]
SUMMARY_COLUMNS = [("key", "-"), ("value", "-")]
VALIDATE_COLUMNS = [("check", "-"), ("measured", "-"), ("tolerance", "-"), ("status", "-")]


class TaskError(RuntimeError):
    """A well-formed config asks for something impossible (exit code 2)."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path: Path, columns, rows, config: RunConfig, formats=("csv",)) -> list[Path]:
    """Write rows with a commented header block (tool, version, config hash, units)."""
    names = [c for c, _ in columns]
    written = []
    if "csv" in formats:
        buf = io.StringIO()
        buf.write(f"# tool: lislimits {__version__}\n")
        buf.write(f"# config_sha256: {config.digest()}\n")
        buf.write(f"# task: {config.task}\n")
        buf.write("# units: " + ", ".join(f"{c}[{u}]" for c, u in columns) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
        path.write_text(buf.getvalue())
        written.append(path)
    if "json" in formats:
        jpath = path.with_suffix(".json")
        doc = {
            "tool": f"lislimits {__version__}",
            "config_sha256": config.digest(),
            "task": config.task,
            "units": dict(columns),
            "rows": [dict(zip(names, (_jsonable(x) for x in row))) for row in rows],
        }
        jpath.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        written.append(jpath)
    return written


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# --- geometry from config -------------------------------------------------------


def build_link(config: RunConfig, F_db: float | None = None, aspect_ratio: str | None = None) -> LinkGeometry:
    """Link from the geometry block, optionally re-shaped to a sweep point.

    A sweep point keeps the rx area (``sweep.rx_area`` or the configured rx
    size) and places the tx at ``d = sqrt(F * A_R)``; the aspect ratio sets
    ``S_x / S_y``.
    """
    g = config.geometry
    medium = Medium(g.wavelength)
    rx_size, d = g.rx_size, g.d
    if F_db is not None:
        area = config.sweep.rx_area or rx_size[0] * rx_size[1]
        ar = parse_aspect_ratio(aspect_ratio or "1:1")
        rx_size = (float(np.sqrt(area * ar)), float(np.sqrt(area / ar)))
        d = float(np.sqrt(10 ** (F_db / 10) * area))
    make = make_parallel_link if g.type == "parallel" else make_perpendicular_link
    return make(d, g.tx_size, rx_size, g.tx_offset, medium=medium,
                min_distance_wavelengths=g.min_distance_wavelengths)


def _sweep_points(config: RunConfig):
    s = config.sweep
    if s.f_db is None:
        return [(None, None)]
    start, stop, n = s.f_db
    grid = np.linspace(start, stop, n)
    return [(ar, float(f)) for ar in s.aspect_ratios for f in grid]


def _workers() -> int:
    cap = os.environ.get(WORKERS_ENV)
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", WORKERS_ENV, cap)
    return n


def _map(fn, items):
    """Ordered map; parallel across processes when more than one worker is allowed."""
    items = list(items)
    workers = min(_workers(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _gain_row(job):
    config, (ar, F_db) = job
    link = build_link(config, F_db, ar)
    if link.kind != "parallel":
        raise TaskError("gain formulas are defined for parallel links only")
    q = config.numeric.quadrature
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linkbudget.SmallTransmitterWarning)
        g_num = linkbudget.gain_numeric(link, q) if config.sweep.numeric else float("nan")
    g_cl = linkbudget.gain_closed(link) if link.is_centered else float("nan")
    lam = link.medium.wavelength
    best = g_cl if np.isfinite(g_cl) else g_num
    return (
        ar or _ar_label(link),
        10 * np.log10(link.F),
        g_cl,
        g_num,
        linkbudget.gain_friis(link),
        linkbudget.gain_large_lis(link.tx.area, lam),
        best / linkbudget.transmit_aperture_gain(link.tx.area, lam),
    )


def _dof_row(job):
    config, (ar, F_db) = job
    link = build_link(config, F_db, ar)
    if not link.is_centered:
        raise TaskError("closed-form DoF needs a centered transmitter (tx_offset = [0, 0])")
    rep = dof.dof_report(link, config.numeric.quadrature, numeric=config.sweep.numeric)
    return (
        ar or _ar_label(link),
        10 * np.log10(link.F),
        rep.d_closed,
        rep.d_numeric,
        rep.d_farfield,
        rep.d_asymptotic,
        rep.d_rounded,
    )


def _ar_label(link: LinkGeometry) -> str:
    return f"{link.rx.len_u:g}:{link.rx.len_v:g}"


def _outdir(config: RunConfig) -> Path:
    out = Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gain(config: RunConfig) -> list[Path]:
    rows = _map(_gain_row, [(config, p) for p in _sweep_points(config)])
    return write_table(_outdir(config) / "gain.csv", GAIN_COLUMNS, rows, config, config.output.formats)


def cmd_dof(config: RunConfig) -> list[Path]:
    rows = _map(_dof_row, [(config, p) for p in _sweep_points(config)])
    return write_table(_outdir(config) / "dof.csv", DOF_COLUMNS, rows, config, config.output.formats)


def cmd_sweep(config: RunConfig) -> list[Path]:
    paths = []
    if config.geometry.type == "parallel":
        paths += cmd_gain(config)
    paths += cmd_dof(config)
    return paths


def field_rows(field: eigenmodes.FieldMap):
    iu, iv = field.grid.indices
    pts = field.grid.points
    vals = field.values
    amp, phase = field.amplitude[:, 0], field.phase[:, 0]
    for k in range(field.grid.size):
        yield (
            iu[k], iv[k], pts[k, 0], pts[k, 1], pts[k, 2],
            vals[k, 0].real, vals[k, 0].imag, vals[k, 1].real, vals[k, 1].imag,
            vals[k, 2].real, vals[k, 2].imag, amp[k], phase[k],
        )


def cmd_modes(config: RunConfig) -> list[Path]:
    link = build_link(config)
    num = config.numeric
    delta = num.delta or config.geometry.wavelength / 8
    kernel = eigenmodes.assemble_kernel(link, delta, num.kernel_mode, num.memory_budget)
    spectrum = eigenmodes.solve_modes(kernel, num.threshold_db)
    for n in num.modes:
        if n > len(spectrum):
            raise TaskError(f"numeric.modes: mode {n} requested but the spectrum has {len(spectrum)} modes")
    s = spectrum.singular_values
    with np.errstate(divide="ignore"):
        db = 10 * np.log10(s**2 / s[0] ** 2)
    out = _outdir(config)
    fmts = config.output.formats
    paths = write_table(out / "spectrum.csv", SPECTRUM_COLUMNS,
                        [(i + 1, s[i], db[i]) for i in range(s.size)], config, fmts)

    count = eigenmodes.count_dof(spectrum, num.threshold_db)
    sum_rule = eigenmodes.sum_rule_check(kernel, link, num.quadrature, spectrum)
    summary = [
        ("kernel_mode", num.kernel_mode),
        ("delta_m", delta),
        ("matrix_rows", kernel.matrix.shape[0]),
        ("matrix_cols", kernel.matrix.shape[1]),
        ("threshold_db", num.threshold_db),
        ("dof_count", count),
        ("sum_rule_rel_error", sum_rule),
        ("condition", spectrum.condition),
    ]
    if link.is_centered:
        closed = dof.dof_closed_parallel(link) if link.kind == "parallel" else dof.dof_closed_perpendicular(link)
        summary.append(("d_closed", closed))
    paths += write_table(out / "summary.csv", SUMMARY_COLUMNS, summary, config, fmts)
    for n in num.modes:
        for side in ("rx", "tx"):
            fm = eigenmodes.eigenfunction_field(spectrum, n, side)
            paths += write_table(out / f"field_{side}_mode{n}.csv", FIELD_COLUMNS, field_rows(fm), config, fmts)
    print(f"dof_count={count} sum_rule_rel_error={sum_rule:.3e}")
    return paths


def cmd_validate(config: RunConfig) -> tuple[list[Path], bool]:
    try:
        results = run_checks(config.validate.tolerances, config.numeric.quadrature)
    except KeyError as exc:
        raise ConfigError(f"validate.tolerances: {exc.args[0]}") from exc
    rows = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: measured {r.measured:.3e} tolerance {r.tolerance:.3e}")
        rows.append((r.name, r.measured, r.tolerance, status))
    paths = write_table(_outdir(config) / "validate.csv", VALIDATE_COLUMNS, rows, config, config.output.formats)
    return paths, all(r.passed for r in results)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lislimits", description=__doc__.split("\n")[0] or None)
    p.add_argument("--version", action="version", version=f"lislimits {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("gain", "dof", "modes", "sweep", "validate", "run"):
        sp = sub.add_parser(name)
        sp.add_argument("-c", "--config", help="YAML config file")
        sp.add_argument("-o", "--output", help="output directory (overrides output.directory)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, e.g. geometry.d=10m (repeatable)")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides = list(args.set)
    if args.output:
        overrides.append(f"output.directory={args.output}")
    if args.command != "run":
        overrides.append(f"task={args.command}")
    try:
        config = load_config(args.config, overrides)
        task = config.task
        if task == "validate":
            paths, ok = cmd_validate(config)
        else:
            paths = {"gain": cmd_gain, "dof": cmd_dof, "modes": cmd_modes, "sweep": cmd_sweep}[task](config)
            ok = True
    except (ConfigError, GeometryError, TaskError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except eigenmodes.KernelBudgetError as exc:
        print(f"resource budget exceeded: {exc}; raise numeric.memory_budget to at least {exc.required}",
              file=sys.stderr)
        return EXIT_BUDGET
    for path in paths:
        log.info("wrote %s", path)
    return EXIT_OK if ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
