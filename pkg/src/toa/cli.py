"""Command-line driver: ``toa <distribution|sweep|classical|validate> --scenario <path>``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import analysis, classical, engine, scattering, specfun
from .scenario import ScenarioConfig, ScenarioError, bundled_scenarios, load_scenario

__all__ = ["main", "run", "format_float", "write_atomic", "build_parser"]

COMMANDS = ("distribution", "sweep", "classical", "validate")


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list[str], columns: list) -> str:
    cols = [np.asarray(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(v if isinstance(v, str) else format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def _json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _plot_svg(path: str, x, series: list[tuple[str, np.ndarray]], xlabel: str, ylabel: str,
              hlines: list[tuple[str, float]] = ()) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed ids and no timestamp keep the SVG byte-stable
    matplotlib.rcParams["svg.hashsalt"] = "toa"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, y in series:
        ax.plot(x, y, label=label, lw=1.2)
    for label, y in hlines:
        ax.axhline(y, ls="--", lw=0.8, color="gray")
        ax.annotate(label, (x[0], y), fontsize=8, color="gray", va="bottom")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".svg")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg", metadata={"Date": None})
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.unlink(tmp)


def _out(config: ScenarioConfig, name: str) -> str:
    return os.path.join(config.directory, f"{config.prefix}_{name}")


def cmd_distribution(config: ScenarioConfig, log) -> list[str]:
    written = []
    spec = config.spec
    for i, x in enumerate(config.detectors):
        dist = engine.arrival_distribution(x, config.packet, spec, config.grid, model=config.model,
                                           tol=config.tol, override_quality=config.override_quality)
        t = dist.times
        if dist.components is not None:
            c = dist.components
            parts = [c.transmitted / dist.total_probability, c.reflected / dist.total_probability,
                     c.interference / dist.total_probability]
        else:
            parts = [np.full(t.shape, math.nan)] * 3
        base = _out(config, f"x{i}")
        write_atomic(base + ".csv", csv_text(["t", "density", "density_tr", "density_ref", "density_int"],
                                             [t, dist.density, *parts]))
        report = analysis.find_peaks(dist) if dist.defined else analysis.PeakReport()
        summary = {
            "x": x, "defined": dist.defined, "total_probability": dist.total_probability,
            "mean": dist.mean if dist.defined else None, "captured": dist.captured,
            "grid": dataclasses.asdict(dist.grid),
            "peaks": [dataclasses.asdict(p) for p in report.peaks],
        }
        write_atomic(base + "_summary.json", _json(summary))
        written += [base + ".csv", base + "_summary.json"]
        if config.svg:
            series = [("density", dist.density)]
            if dist.components is not None:
                series += [("transmitted", parts[0]), ("reflected", parts[1]), ("interference", parts[2])]
            _plot_svg(base + ".svg", t, series, "t", "P(t, x)")
            written.append(base + ".svg")
        log(f"x = {x}: P(x) = {dist.total_probability:.10g}, mean = {dist.mean:.10g}, "
            f"peaks at {', '.join(f'{p.t:.4g}' for p in report.peaks) or 'none'}")
    return written


def cmd_sweep(config: ScenarioConfig, log) -> list[str]:
    sw = config.sweep
    if sw is None:
        raise ValueError("scenario has no [sweep] section")
    pot = config.potential
    written = []
    for i, x in enumerate(config.detectors):
        if sw.parameter == "p_V":
            res = analysis.sweep_barrier_height(config.packet, pot.a, x, (sw.start, sw.stop), sw.count,
                                                tol=config.tol)
        else:
            p_v = math.sqrt(2 * config.packet.mass * pot.V)
            res = analysis.sweep_barrier_width(config.packet, p_v, x, (sw.start, sw.stop), sw.count,
                                               tol=config.tol)
        base = _out(config, f"sweep_x{i}")
        rows = res.rows
        write_atomic(base + ".csv", csv_text(
            [sw.parameter, "mean_toa", "phase_time", "hartman_time", "probability", "error"],
            [res.values, res.mean_toa, res.phase_time, res.hartman, res.probability,
             np.array([r.error for r in rows], dtype=object)]))
        jump = analysis.find_jump(res)
        summary = {"parameter": sw.parameter, "x": x, "t0": res.t0,
                   "jump": dataclasses.asdict(jump) if jump else None,
                   "failed_rows": sum(1 for r in rows if r.error)}
        write_atomic(base + "_summary.json", _json(summary))
        written += [base + ".csv", base + "_summary.json"]
        if config.svg:
            hl = [("t0", res.t0)] + ([("t_H", res.hartman[0])] if sw.parameter == "p_V" else [])
            series = [("mean", res.mean_toa), ("phase time at p0", res.phase_time)]
            if sw.parameter == "a":
                series.append(("Hartman", res.hartman))
            _plot_svg(base + ".svg", res.values, series, sw.parameter, "arrival time", hl)
            written.append(base + ".svg")
        if jump:
            log(f"x = {x}: largest step at {sw.parameter} = {jump.location:.4g} "
                f"({jump.before:.4g} -> {jump.after:.4g}), maximum before it {jump.pre_maximum:.4g}")
    return written


def cmd_classical(config: ScenarioConfig, log) -> list[str]:
    pk = config.packet
    spec = config.spec
    lo, hi = pk.momentum_window(8.0)
    p = np.linspace(lo, hi, 201)
    weight = np.abs(pk.momentum_amplitude(p)) ** 2
    written = []
    for i, x in enumerate(config.detectors):
        direct, lie = [], []
        for pi in p:
            st = classical.ClassicalState(pk.q0, float(pi), pk.mass)
            a = classical.classical_toa(st, x, spec)
            b = classical.lie_arrival_time(st, x, spec)
            direct.append(math.nan if a is None else a)
            lie.append(math.nan if b is None else b)
        base = _out(config, f"classical_x{i}")
        write_atomic(base + ".csv", csv_text(["p", "weight", "t_classical", "t_lie"], [p, weight, direct, lie]))
        try:
            mean = classical.classical_ensemble_mean(pk, x, spec)
        except classical.CoverageError as exc:
            mean = None
            log(f"x = {x}: {exc}")
        write_atomic(base + "_summary.json", _json({"x": x, "ensemble_mean": mean}))
        written += [base + ".csv", base + "_summary.json"]
        if config.svg:
            _plot_svg(base + ".svg", p, [("equation of time", np.array(direct)),
                                         ("Jacobi-Lie", np.array(lie))], "p", "arrival time")
            written.append(base + ".svg")
        if mean is not None:
            log(f"x = {x}: classical ensemble mean = {mean:.10g}")
    return written


# ---- validate -----------------------------------------------------------------------


def _checks(config: ScenarioConfig):
    """``(name, passed, detail)`` for each invariant that applies to ``config``."""
    pk, spec = config.packet, config.spec
    kw = dict(model=config.model, tol=config.tol, override_quality=config.override_quality)
    for x in config.detectors:
        dist = engine.arrival_distribution(x, pk, spec, config.grid, **kw)
        if not dist.defined:
            yield f"x={x} undefined density flagged", dist.total_probability <= engine.UNDEFINED_PROBABILITY, ""
            continue
        norm = abs(np.trapezoid(dist.density, dist.times) - 1)
        yield f"x={x} normalisation", norm <= 1e-8, f"|int - 1| = {norm:.2e}"
        yield f"x={x} non-negative density", bool(np.all(dist.density >= 0)), ""
        if dist.components is not None:
            c = dist.components
            err = np.max(np.abs(c.transmitted + c.reflected + c.interference - dist.unnormalized))
            err /= max(np.max(dist.unnormalized), 1e-300)
            yield f"x={x} component closure", err <= 1e-10, f"{err:.2e}"
        phase = engine.mean_toa_phase(x, pk, spec, **kw)
        if dist.tail_mass <= engine.TAIL_TOL:
            rel = abs(engine.mean_toa_moment(dist) - phase) / abs(phase)
            yield f"x={x} moment vs phase mean", rel <= 5e-3, f"{rel:.2e}"
        if config.model == "exact" and len(config.detectors) and scattering.supports_split(spec, x) \
                and not isinstance(spec, scattering.SampledSmooth) and (pk.quality or isinstance(spec, scattering.LinearRamp)):
            ptr, pref, inter = engine.decompose_reflection(x, pk, spec, tol=config.tol,
                                                           override_quality=config.override_quality)
            err = abs(ptr + pref + inter - dist.total_probability) / dist.total_probability
            yield f"x={x} reflection decomposition closure", err <= 1e-9, f"{err:.2e}"
        if isinstance(spec, scattering.SquareBarrier) and x > spec.a:
            p2 = engine.arrival_probability(x + 30, pk, spec, **kw)
            err = abs(p2 - dist.total_probability) / dist.total_probability
            yield f"x={x} probability independent of x", err <= 1e-9, f"{err:.2e}"
        if isinstance(spec, scattering.LinearRamp):
            p = pk.p0 + np.linspace(-3, 3, 13) * pk.sigma_p
            s0 = np.sum(engine.incident_reflected_times(pk.q0, p * p / (2 * pk.mass), pk, spec), axis=0)
            s1 = np.sum(engine.incident_reflected_times(x, p * p / (2 * pk.mass), pk, spec), axis=0)
            err = float(np.max(np.abs(s1 / s0 - 1)))
            yield f"x={x} t_i + t_r independent of x", err <= 1e-6, f"{err:.2e}"


def _generic_checks():
    rng = np.random.default_rng(20240611)
    V = rng.uniform(0.01, 10, 1000)
    a = rng.uniform(0.01, 20, 1000)
    p = rng.uniform(0.05, 5, 1000)
    worst = 0.0
    for vi, ai, pi in zip(V, a, p):
        T, R, _, _ = scattering.transfer_matrix(pi, scattering.SquareBarrier(vi, ai), 1.0)
        worst = max(worst, abs(abs(T) ** 2 + abs(R) ** 2 - 1))
    yield "barrier unitarity on 1000 random barriers", worst <= 1e-12, f"{worst:.2e}"
    z = rng.uniform(-50, 8, 1000)
    resid = float(np.max(specfun.ode_residual(z)))
    yield "Airy ODE residual on 1000 points", resid <= 1e-6, f"{resid:.2e}"


def cmd_validate(configs: list[tuple[str, ScenarioConfig]], log) -> bool:
    ok = True
    checks = [("generic", c) for c in _generic_checks()]
    for name, config in configs:
        try:
            checks += [(name, c) for c in _checks(config)]
        except Exception as exc:  # noqa: BLE001  (reported as a failed check)
            checks.append((name, ("evaluation", False, f"{type(exc).__name__}: {exc}")))
    for name, (label, passed, detail) in checks:
        ok &= bool(passed)
        log(f"{'PASS' if passed else 'FAIL'}  {name}: {label}" + (f"  ({detail})" if detail else ""))
    return ok


# ---- entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toa", description="Quantum arrival-time distributions.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--scenario", help="scenario file or bundled name (validate: all bundled if omitted)")
    ap.add_argument("--out", help="output directory (overrides [output] directory)")
    ap.add_argument("--svg", action="store_true", help="also render each CSV as an SVG line plot")
    ap.add_argument("--tol", type=float, help="quadrature tolerance (overrides [quadrature] tol)")
    ap.add_argument("--grid", help="explicit time grid t_min,t_max,n")
    return ap


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if args.out:
        changes["directory"] = args.out
    if args.svg:
        changes["svg"] = True
    if args.tol is not None:
        if not 0 < args.tol < 1:
            raise ValueError("--tol must lie in (0, 1)")
        changes["tol"] = args.tol
    if args.grid:
        parts = args.grid.split(",")
        if len(parts) != 3:
            raise ValueError("--grid expects t_min,t_max,n")
        changes["grid"] = engine.TimeGrid(float(parts[0]), float(parts[1]), int(parts[2]))
    return dataclasses.replace(config, **changes) if changes else config


def run(config: ScenarioConfig | None, command: str, log=print, configs=None) -> int:
    """Execute ``command``; returns the process exit status."""
    try:
        if command == "validate":
            return 0 if cmd_validate(configs or [("scenario", config)], log) else 1
        handler = {"distribution": cmd_distribution, "sweep": cmd_sweep, "classical": cmd_classical}[command]
        for path in handler(config, log):
            log(f"wrote {path}")
        return 0
    except Exception as exc:  # noqa: BLE001  (any module error maps to a nonzero exit)
        log(f"error: {type(exc).__name__}: {exc}")
        return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scenario is None:
            if args.command != "validate":
                print("error: --scenario is required", file=sys.stderr)
                return 2
            configs = [(n, _apply_overrides(load_scenario(n), args)) for n in bundled_scenarios()]
            return run(None, "validate", configs=configs)
        config = _apply_overrides(load_scenario(args.scenario), args)
    except ScenarioError as exc:
        for issue in exc.issues:
            print(f"scenario error: {issue}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config, args.command, configs=[(args.scenario, config)])


if __name__ == "__main__":
    sys.exit(main())
