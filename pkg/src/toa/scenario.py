"""Line-oriented scenario documents: ``[section]`` headers followed by ``key = value`` lines.

Blank lines and text after ``#`` are ignored.  Lists are comma separated.
Every problem in a document is collected (with its line number) before
:class:`ScenarioError` is raised, so one run reports them all.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from importlib import resources

from .engine import TimeGrid
from .kinematics import GaussianPacket
from .scattering import (DomainError, Free, LinearRamp, PotentialSpec, SampledSmooth, SquareBarrier,
                         Step)

__all__ = ["ScenarioConfig", "PotentialConfig", "SweepConfig", "ScenarioError", "Issue",
           "parse_scenario", "render_scenario", "load_scenario", "bundled_scenarios", "bundled_text"]

REQUIRED = ("packet", "potential", "detector")
KEYS = {
    "packet": {"q0", "p0", "delta", "mass"},
    "potential": {"kind", "V", "p_V", "a", "f", "q", "values"},
    "detector": {"x"},
    "grid": {"t_min", "t_max", "n_points"},
    "sweep": {"parameter", "start", "stop", "count"},
    "quadrature": {"tol"},
    "output": {"directory", "prefix", "svg"},
    "options": {"override_quality", "model"},
}
KINDS = ("free", "step", "barrier", "ramp", "sampled")
MODELS = ("exact", "wkb")


@dataclass(frozen=True)
class Issue:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


class ScenarioError(ValueError):
    def __init__(self, issues: list[Issue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class PotentialConfig:
    kind: str
    V: float | None = None
    a: float | None = None
    f: float | None = None
    q: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None

    def spec(self, mass: float = 1.0, p_v: float | None = None, a: float | None = None) -> PotentialSpec:
        V = self.V if p_v is None else p_v * p_v / (2 * mass)
        a = self.a if a is None else a
        if self.kind == "free":
            return Free()
        if self.kind == "step":
            return Step(V)
        if self.kind == "barrier":
            return SquareBarrier(V, a)
        if self.kind == "ramp":
            return LinearRamp(self.f)
        return SampledSmooth(self.q, self.values)


@dataclass(frozen=True)
class SweepConfig:
    parameter: str
    start: float
    stop: float
    count: int


@dataclass(frozen=True)
class ScenarioConfig:
    packet: GaussianPacket
    potential: PotentialConfig
    detectors: tuple[float, ...]
    grid: TimeGrid | None = None
    sweep: SweepConfig | None = None
    tol: float = 1e-8
    directory: str = "."
    prefix: str = "toa"
    svg: bool = False
    override_quality: bool = False
    model: str = "exact"

    @property
    def spec(self) -> PotentialSpec:
        return self.potential.spec(self.packet.mass)


# ---- parsing ------------------------------------------------------------------------


@dataclass
class _Doc:
    sections: dict = field(default_factory=dict)
    issues: list = field(default_factory=list)

    def entry(self, section: str, key: str):
        return self.sections.get(section, {}).get(key)


def _tokenize(text: str) -> _Doc:
    doc = _Doc()
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in KEYS:
                doc.issues.append(Issue(n, f"unknown section [{name}]"))
                current = None
                continue
            if name in doc.sections:
                doc.issues.append(Issue(n, f"duplicate section [{name}]"))
            doc.sections.setdefault(name, {})
            doc.sections[name]["__line__"] = n
            current = name
            continue
        if "=" not in line:
            doc.issues.append(Issue(n, f"expected 'key = value', got {line!r}"))
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if current is None:
            doc.issues.append(Issue(n, f"key {key!r} outside any known section"))
            continue
        if key not in KEYS[current]:
            doc.issues.append(Issue(n, f"unknown key {key!r} in [{current}]"))
            continue
        if key in doc.sections[current]:
            doc.issues.append(Issue(n, f"duplicate key {key!r} in [{current}]"))
            continue
        doc.sections[current][key] = (n, value)
    return doc


class _Reader:
    def __init__(self, doc: _Doc):
        self.doc = doc

    @property
    def issues(self):
        return self.doc.issues

    def _line(self, section):
        return self.doc.sections.get(section, {}).get("__line__", 0)

    def has(self, section, key=None):
        if section not in self.doc.sections:
            return False
        return key is None or key in self.doc.sections[section]

    def raw(self, section, key, required=False):
        e = self.doc.entry(section, key)
        if e is None:
            if required:
                self.issues.append(Issue(self._line(section), f"missing required key {key!r} in [{section}]"))
            return None
        return e

    def number(self, section, key, required=False, default=None, integer=False):
        e = self.raw(section, key, required)
        if e is None:
            return default
        n, value = e
        try:
            v = int(value) if integer else float(value)
        except ValueError:
            kind = "an integer" if integer else "a number"
            self.issues.append(Issue(n, f"{section}.{key} must be {kind}, got {value!r}"))
            return default
        if not integer and not math.isfinite(v):
            self.issues.append(Issue(n, f"{section}.{key} must be finite"))
            return default
        return v

    def numbers(self, section, key, required=False):
        e = self.raw(section, key, required)
        if e is None:
            return None
        n, value = e
        try:
            out = tuple(float(s) for s in value.split(",") if s.strip())
        except ValueError:
            self.issues.append(Issue(n, f"{section}.{key} must be a comma separated list of numbers"))
            return None
        if not out or not all(math.isfinite(v) for v in out):
            self.issues.append(Issue(n, f"{section}.{key} must hold finite numbers"))
            return None
        return out

    def flag(self, section, key, default=False):
        e = self.raw(section, key)
        if e is None:
            return default
        n, value = e
        low = value.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        self.issues.append(Issue(n, f"{section}.{key} must be true or false, got {value!r}"))
        return default

    def choice(self, section, key, options, required=False, default=None):
        e = self.raw(section, key, required)
        if e is None:
            return default
        n, value = e
        if value not in options:
            self.issues.append(Issue(n, f"{section}.{key} must be one of {', '.join(options)}; got {value!r}"))
            return default
        return value

    def text(self, section, key, default):
        e = self.raw(section, key)
        return default if e is None else e[1]

    def line(self, section, key=None):
        if key is not None and self.has(section, key):
            return self.doc.sections[section][key][0]
        return self._line(section)


def _packet(r: _Reader):
    vals = {k: r.number("packet", k, required=True) for k in ("q0", "p0", "delta")}
    mass = r.number("packet", "mass", default=1.0)
    if any(v is None for v in vals.values()):
        return None
    try:
        return GaussianPacket(vals["q0"], vals["p0"], vals["delta"], mass)
    except ValueError as exc:
        r.issues.append(Issue(r.line("packet"), str(exc)))
        return None


def _potential(r: _Reader, mass: float, sweep_param: str | None):
    kind = r.choice("potential", "kind", KINDS, required=True)
    if kind is None:
        return None
    V = r.number("potential", "V")
    p_v = r.number("potential", "p_V")
    if V is not None and p_v is not None:
        r.issues.append(Issue(r.line("potential", "p_V"), "give either V or p_V, not both"))
    if p_v is not None:
        if p_v < 0:
            r.issues.append(Issue(r.line("potential", "p_V"), "potential.p_V must be >= 0"))
        V = p_v * p_v / (2 * mass)
    a = r.number("potential", "a")
    f = r.number("potential", "f")
    q = r.numbers("potential", "q")
    values = r.numbers("potential", "values")
    need = {"step": ("V",), "barrier": ("V", "a"), "ramp": ("f",), "sampled": ("q", "values")}.get(kind, ())
    given = {"V": V, "a": a, "f": f, "q": q, "values": values}
    for key in need:
        swept = sweep_param == ("p_V" if key == "V" else key)
        if given[key] is None and not swept:
            name = "V or p_V" if key == "V" else key
            r.issues.append(Issue(r.line("potential"), f"potential kind {kind!r} needs {name}"))
    for key, v in given.items():
        if v is not None and key not in need:
            r.issues.append(Issue(r.line("potential", "p_V" if key == "V" and p_v is not None else key),
                                  f"key {key!r} does not apply to potential kind {kind!r}"))
    cfg = PotentialConfig(kind, V if "V" in need else None, a if "a" in need else None,
                          f if "f" in need else None, q if kind == "sampled" else None,
                          values if kind == "sampled" else None)
    try:
        cfg.spec(mass, p_v=1.0 if cfg.V is None and kind in ("step", "barrier") else None,
                 a=1.0 if cfg.a is None and kind == "barrier" else None)
    except (DomainError, TypeError, ValueError) as exc:
        r.issues.append(Issue(r.line("potential"), str(exc)))
        return None
    return cfg


def _sweep(r: _Reader):
    if not r.has("sweep"):
        return None
    param = r.choice("sweep", "parameter", ("p_V", "a"), required=True)
    start = r.number("sweep", "start", required=True)
    stop = r.number("sweep", "stop", required=True)
    count = r.number("sweep", "count", required=True, integer=True)
    if None in (param, start, stop, count):
        return None
    ok = True
    if count < 2:
        r.issues.append(Issue(r.line("sweep", "count"), "sweep.count must be >= 2"))
        ok = False
    if not stop > start:
        r.issues.append(Issue(r.line("sweep", "stop"), "sweep.stop must exceed sweep.start"))
        ok = False
    if start < 0:
        r.issues.append(Issue(r.line("sweep", "start"), "sweep.start must be >= 0"))
        ok = False
    return SweepConfig(param, start, stop, count) if ok else None


def _grid(r: _Reader):
    if not r.has("grid"):
        return None
    t_min = r.number("grid", "t_min", required=True)
    t_max = r.number("grid", "t_max", required=True)
    n = r.number("grid", "n_points", required=True, integer=True)
    if None in (t_min, t_max, n):
        return None
    try:
        return TimeGrid(t_min, t_max, n)
    except ValueError as exc:
        r.issues.append(Issue(r.line("grid"), str(exc)))
        return None


def parse_scenario(text: str) -> ScenarioConfig:
    """Validated configuration, or :class:`ScenarioError` listing every problem found."""
    r = _Reader(_tokenize(text))
    for name in REQUIRED:
        if not r.has(name):
            r.issues.append(Issue(0, f"missing required section [{name}]"))
    packet = _packet(r) if r.has("packet") else None
    sweep = _sweep(r)
    mass = packet.mass if packet is not None else 1.0
    potential = _potential(r, mass, sweep.parameter if sweep else None) if r.has("potential") else None
    detectors = r.numbers("detector", "x", required=True) if r.has("detector") else None
    grid = _grid(r)
    tol = r.number("quadrature", "tol", default=1e-8)
    if tol is not None and not 0 < tol < 1:
        r.issues.append(Issue(r.line("quadrature", "tol"), "quadrature.tol must lie in (0, 1)"))
    directory = r.text("output", "directory", ".")
    prefix = r.text("output", "prefix", "toa")
    svg = r.flag("output", "svg")
    override = r.flag("options", "override_quality")
    model = r.choice("options", "model", MODELS, default="exact")

    if packet is not None and not packet.quality and not override:
        r.issues.append(Issue(r.line("packet"), "packet fails the quality test (p0*delta >= 5 and "
                                                "|q0| >= 3*delta); set options.override_quality = true"))
    if sweep is not None and potential is not None and potential.kind != "barrier":
        r.issues.append(Issue(r.line("sweep"), "sweeps need a barrier potential"))
    if sweep is not None and detectors is not None and potential is not None and potential.kind == "barrier":
        widest = sweep.stop if sweep.parameter == "a" else (potential.a or 0.0)
        if any(x <= widest for x in detectors):
            r.issues.append(Issue(r.line("detector", "x"), "sweep detectors must lie beyond the barrier"))
    if potential is not None and potential.kind == "sampled" and detectors is not None:
        if any(x > potential.q[-1] for x in detectors):
            r.issues.append(Issue(r.line("detector", "x"), "detector beyond the sampled potential table"))
    if r.issues:
        raise ScenarioError(sorted(r.issues, key=lambda i: i.line))
    return ScenarioConfig(packet, potential, detectors, grid, sweep, tol, directory, prefix, svg,
                          override, model)


# ---- rendering ----------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def render_scenario(config: ScenarioConfig) -> str:
    """Document text that parses back to ``config``."""
    pk = config.packet
    lines = ["[packet]", f"q0 = {_fmt(pk.q0)}", f"p0 = {_fmt(pk.p0)}", f"delta = {_fmt(pk.delta)}",
             f"mass = {_fmt(pk.mass)}", "", "[potential]", f"kind = {config.potential.kind}"]
    pot = config.potential
    for key in ("V", "a", "f", "q", "values"):
        v = getattr(pot, key)
        if v is not None:
            lines.append(f"{key} = {_fmt(v)}")
    lines += ["", "[detector]", f"x = {_fmt(config.detectors)}"]
    if config.grid is not None:
        g = config.grid
        lines += ["", "[grid]", f"t_min = {_fmt(g.t_min)}", f"t_max = {_fmt(g.t_max)}",
                  f"n_points = {int(g.n_points)}"]
    if config.sweep is not None:
        s = config.sweep
        lines += ["", "[sweep]", f"parameter = {s.parameter}", f"start = {_fmt(s.start)}",
                  f"stop = {_fmt(s.stop)}", f"count = {s.count}"]
    lines += ["", "[quadrature]", f"tol = {_fmt(config.tol)}",
              "", "[output]", f"directory = {config.directory}", f"prefix = {config.prefix}",
              f"svg = {_fmt(config.svg)}",
              "", "[options]", f"override_quality = {_fmt(config.override_quality)}",
              f"model = {config.model}", ""]
    return "\n".join(lines)


def bundled_scenarios() -> list[str]:
    root = resources.files("toa") / "scenarios"
    return sorted(p.name[: -len(".scenario")] for p in root.iterdir() if p.name.endswith(".scenario"))


def bundled_text(name: str) -> str:
    return (resources.files("toa") / "scenarios" / f"{name}.scenario").read_text(encoding="utf-8")


def load_scenario(path_or_name: str) -> ScenarioConfig:
    """Parse a scenario file, or a bundled scenario given by bare name."""
    if os.path.exists(path_or_name):
        with open(path_or_name, encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    if path_or_name in bundled_scenarios():
        return parse_scenario(bundled_text(path_or_name))
    raise FileNotFoundError(path_or_name)
