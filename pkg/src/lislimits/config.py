"""Run configuration: YAML loading, unit parsing and dotted-key overrides.

Lengths accept plain numbers (meters), unit suffixes (``"5 cm"``, ``"3mm"``,
``"2 m"``) or wavelength multiples (``"2 lambda"``, ``"lambda/8"``).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import yaml

from .eigenmodes import DEFAULT_BUDGET, KERNEL_MODES
from .quadrature import QuadratureSpec

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "TASKS"]

TASKS = ("gain", "dof", "modes", "sweep", "validate")

_LENGTH_UNITS = {"m": 1.0, "cm": 1e-2, "mm": 1e-3}
_AREA_UNITS = {"m2": 1.0, "cm2": 1e-4, "mm2": 1e-6}
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_UNIT_RE = re.compile(rf"^\s*({_NUM})\s*([a-zA-Z0-9^²]*)\s*$")
_LAMBDA_RE = re.compile(rf"^\s*(?:({_NUM})\s*\*?\s*)?(?:lambda|λ)\s*(?:/\s*({_NUM}))?\s*$")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source or line:
            where = f"{source or '<config>'}:{line}: " if line else f"{source}: "
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class GeometryConfig:
    type: str = "parallel"
    wavelength: float = 0.01
    d: float = 5.0
    tx_size: tuple[float, float] = (0.05, 0.05)
    rx_size: tuple[float, float] = (5.0, 5.0)
    tx_offset: tuple[float, float] = (0.0, 0.0)
    min_distance_wavelengths: float = 1.0


@dataclass(frozen=True)
class NumericConfig:
    quadrature: QuadratureSpec = QuadratureSpec()
    delta: float | None = None  # patch side; wavelength/8 when unset
    threshold_db: float = 3.0
    kernel_mode: str = "x_to_vector"
    memory_budget: int = DEFAULT_BUDGET
    modes: tuple[int, ...] = (1, 2, 3, 4)
    snr_db: float = 20.0


@dataclass(frozen=True)
class SweepConfig:
    f_db: tuple[float, float, int] | None = None
    aspect_ratios: tuple[str, ...] = ("1:1",)
    rx_area: float | None = None
    numeric: bool = True


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv",)


@dataclass(frozen=True)
class ValidateConfig:
    tolerances: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunConfig:
    task: str = "gain"
    geometry: GeometryConfig = GeometryConfig()
    numeric: NumericConfig = NumericConfig()
    sweep: SweepConfig = SweepConfig()
    output: OutputConfig = OutputConfig()
    validate: ValidateConfig = ValidateConfig()

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_task(self, task: str) -> "RunConfig":
        return replace(self, task=task)


# --- YAML with line numbers ---------------------------------------------------


def _plain(node, lines, path=""):
    """Convert a composed YAML node into Python data, recording 1-based lines per dotted path."""
    lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = str(k.value)
            sub = f"{path}.{key}" if path else key
            if key in out:
                raise ConfigError(f"duplicate key {sub!r}", k.start_mark.line + 1)
            out[key] = _plain(v, lines, sub)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_plain(v, lines, f"{path}[{i}]") for i, v in enumerate(node.value)]
    return yaml.safe_load(yaml.serialize(node))


def parse_length(value, wavelength: float | None = None) -> float:
    if isinstance(value, bool):
        raise ValueError(f"not a length: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value)
    m = _LAMBDA_RE.match(text)
    if m:
        if wavelength is None:
            raise ValueError("wavelength-relative length needs a wavelength")
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * wavelength / den
    m = _UNIT_RE.match(text)
    if m and (m.group(2) or "m") in _LENGTH_UNITS:
        return float(m.group(1)) * _LENGTH_UNITS[m.group(2) or "m"]
    raise ValueError(f"cannot parse length {value!r} (use m, cm, mm or lambda)")


def parse_area(value) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    m = _UNIT_RE.match(str(value))
    if m:
        unit = (m.group(2) or "m2").replace("^", "").replace("²", "2")
        if unit in _AREA_UNITS:
            return float(m.group(1)) * _AREA_UNITS[unit]
    raise ValueError(f"cannot parse area {value!r} (use m2, cm2 or mm2)")


def parse_aspect_ratio(text) -> float:
    parts = str(text).split(":")
    if len(parts) == 2:
        a, b = float(parts[0]), float(parts[1])
    elif len(parts) == 1:
        a, b = float(parts[0]), 1.0
    else:
        raise ValueError(f"bad aspect ratio {text!r}")
    if not (a > 0 and b > 0):
        raise ValueError(f"aspect ratio must be positive, got {text!r}")
    return a / b


def _set_dotted(data: dict, key: str, value):
    parts = key.split(".")
    node = data
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {key!r}: {p!r} is not a section")
    node[parts[-1]] = value


_SECTIONS = {
    "geometry": GeometryConfig,
    "numeric": NumericConfig,
    "sweep": SweepConfig,
    "output": OutputConfig,
    "validate": ValidateConfig,
}


def parse_config(data: dict | None, lines: dict | None = None, source: str | None = None) -> RunConfig:
    """Build a validated RunConfig from plain data (as loaded from YAML)."""
    data = data or {}
    lines = lines or {}

    def fail(path, msg):
        raise ConfigError(f"{path}: {msg}", lines.get(path) or lines.get(path.split(".")[0]), source)

    if not isinstance(data, dict):
        fail("", "top level must be a mapping")
    for key in data:
        if key != "task" and key not in _SECTIONS:
            fail(key, f"unknown section (expected task, {', '.join(_SECTIONS)})")
    for name, cls in _SECTIONS.items():
        section = data.get(name, {})
        if not isinstance(section, dict):
            fail(name, "must be a mapping")
        allowed = set(cls.__dataclass_fields__)
        for key in section:
            if key not in allowed:
                fail(f"{name}.{key}", f"unknown key (allowed: {', '.join(sorted(allowed))})")

    task = data.get("task", "gain")
    if task not in TASKS:
        fail("task", f"unknown task {task!r}; expected one of {TASKS}")

    g = data.get("geometry", {})
    defaults = GeometryConfig()
    try:
        lam = parse_length(g.get("wavelength", defaults.wavelength))
    except ValueError as exc:
        fail("geometry.wavelength", str(exc))
    if not lam > 0:
        fail("geometry.wavelength", "must be positive")

    def length(path, value):
        try:
            v = parse_length(value, lam)
        except ValueError as exc:
            fail(path, str(exc))
        if not v > 0:
            fail(path, f"must be positive, got {value!r}")
        return v

    def pair(path, value, positive=True):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            fail(path, "expected a list of two lengths")
        if positive:
            return tuple(length(f"{path}[{i}]", v) for i, v in enumerate(value))
        try:
            return tuple(parse_length(v, lam) for v in value)
        except ValueError as exc:
            fail(path, str(exc))

    gtype = g.get("type", defaults.type)
    if gtype not in ("parallel", "perpendicular"):
        fail("geometry.type", f"expected parallel or perpendicular, got {gtype!r}")
    geometry = GeometryConfig(
        type=gtype,
        wavelength=lam,
        d=length("geometry.d", g.get("d", defaults.d)),
        tx_size=pair("geometry.tx_size", g.get("tx_size", list(defaults.tx_size))),
        rx_size=pair("geometry.rx_size", g.get("rx_size", list(defaults.rx_size))),
        tx_offset=pair("geometry.tx_offset", g.get("tx_offset", list(defaults.tx_offset)), positive=False),
        min_distance_wavelengths=float(g.get("min_distance_wavelengths", defaults.min_distance_wavelengths)),
    )

    n = data.get("numeric", {})
    q = n.get("quadrature", {}) or {}
    if not isinstance(q, dict):
        fail("numeric.quadrature", "must be a mapping")
    try:
        quad = QuadratureSpec(**{k: v for k, v in q.items()})
    except (TypeError, ValueError) as exc:
        fail("numeric.quadrature", str(exc))
    mode = n.get("kernel_mode", "x_to_vector")
    if mode not in KERNEL_MODES:
        fail("numeric.kernel_mode", f"expected one of {KERNEL_MODES}, got {mode!r}")
    modes = n.get("modes", [1, 2, 3, 4])
    if not isinstance(modes, list) or not all(isinstance(m, int) and m >= 1 for m in modes):
        fail("numeric.modes", "expected a list of positive integers")
    try:
        numeric = NumericConfig(
            quadrature=quad,
            delta=length("numeric.delta", n["delta"]) if "delta" in n else None,
            threshold_db=float(n.get("threshold_db", 3.0)),
            kernel_mode=mode,
            memory_budget=int(float(n.get("memory_budget", DEFAULT_BUDGET))),
            modes=tuple(modes),
            snr_db=float(n.get("snr_db", 20.0)),
        )
    except (TypeError, ValueError) as exc:
        fail("numeric", str(exc))

    s = data.get("sweep", {})
    f_db = s.get("f_db")
    if f_db is not None:
        if not isinstance(f_db, list) or len(f_db) != 3:
            fail("sweep.f_db", "expected [start_db, stop_db, points]")
        try:
            f_db = (float(f_db[0]), float(f_db[1]), int(f_db[2]))
        except (TypeError, ValueError):
            fail("sweep.f_db", "expected [start_db, stop_db, points]")
        if f_db[2] < 1:
            fail("sweep.f_db", "points must be >= 1")
    ars = s.get("aspect_ratios", ["1:1"])
    if not isinstance(ars, list) or not ars:
        fail("sweep.aspect_ratios", "expected a non-empty list like ['1:1', '2:1']")
    for i, ar in enumerate(ars):
        try:
            parse_aspect_ratio(ar)
        except ValueError as exc:
            fail(f"sweep.aspect_ratios[{i}]", str(exc))
    try:
        rx_area = parse_area(s["rx_area"]) if "rx_area" in s else None
    except ValueError as exc:
        fail("sweep.rx_area", str(exc))
    sweep = SweepConfig(f_db=f_db, aspect_ratios=tuple(str(a) for a in ars), rx_area=rx_area,
                        numeric=bool(s.get("numeric", True)))

    o = data.get("output", {})
    formats = tuple(o.get("formats", ["csv"]))
    for f in formats:
        if f not in ("csv", "json"):
            fail("output.formats", f"unknown format {f!r}; expected csv or json")
    output = OutputConfig(directory=str(o.get("directory", "out")), formats=formats)

    v = data.get("validate", {})
    tol = v.get("tolerances", {}) or {}
    if not isinstance(tol, dict):
        fail("validate.tolerances", "must be a mapping of check name to tolerance")
    try:
        tolerances = {str(k): float(x) for k, x in tol.items()}
    except (TypeError, ValueError):
        fail("validate.tolerances", "tolerances must be numbers")

    return RunConfig(task, geometry, numeric, sweep, output, ValidateConfig(tolerances))


def _coerce(text: str):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def load_config(path: str | Path | None = None, overrides: list[str] | None = None) -> RunConfig:
    """Read a YAML config (or defaults when ``path`` is None) and apply KEY=VALUE overrides."""
    data, lines, source = {}, {}, None
    if path is not None:
        source = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", source=source) from exc
        try:
            node = yaml.compose(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError(f"YAML syntax error: {exc}", mark.line + 1 if mark else None, source) from exc
        if node is not None:
            data = _plain(node, lines)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key=value")
        key, value = item.split("=", 1)
        _set_dotted(data, key.strip(), _coerce(value))
    return parse_config(data, lines, source)
