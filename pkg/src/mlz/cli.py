"""Command-line front end.

Subcommands: ``spectrum`` (adiabatic energies on a time grid),
``transition`` (window-converged probabilities from one initial state),
``sweep`` (parameter sweeps in CSV), ``compare`` (numeric vs
semiclassical vs closed-form matrices), ``paths`` (semiclassical path
listing).  Data goes to stdout or ``--out``; warnings go to stderr.
Exit code 0 iff no component failed.

All emitted floats use 17-significant-digit formatting so output is
deterministic and round-trip exact.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .analytic import PresetParams, exact_matrix, interference_model, minigap_model
from .errors import MlzError
from .model import MlzModel, adiabatic_spectrum, load_model, validate_model
from .propagator import (
    IntegratorConfig,
    StateVector,
    converged_probabilities,
    propagate,
    scattering_matrix,
)
from .semiclassical import enumerate_paths, path_amplitude, semiclassical_matrix

DEFAULT_EPS_VALUES = tuple(float(v) for v in np.geomspace(0.5, 6.0, 12))
DEFAULT_G_VALUES = tuple(float(v) for v in np.linspace(0.0, 1.0, 21))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json_dump(obj, out: io.TextIOBase, indent: int = 0) -> None:
    """Minimal JSON writer with fixed key order and .17g floats."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.write(f'{pad}  "{key}": ')
            _json_dump(value, out, indent + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.write("[]")
            return
        out.write("[\n")
        for i, value in enumerate(obj):
            out.write(pad + "  ")
            _json_dump(value, out, indent + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.write("true" if obj is True else "false" if obj is False else "null")
    elif isinstance(obj, str):
        out.write('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    else:
        out.write(_fmt(obj))


def _complex_obj(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _matrix_rows(m: np.ndarray) -> list:
    return [[float(x) for x in row] for row in m]


class _ModelSpec:
    """Resolved model source: a file, or a preset plus its parameters."""

    def __init__(self, args):
        self.path = args.model
        self.preset = args.preset
        self.params = PresetParams(
            eps1=args.eps1, eps2=args.eps2,
            g1=args.g1, g2=args.g2, g3=args.g3, beta=args.beta,
        )

    @property
    def is_interference_preset(self) -> bool:
        return self.path is None and self.preset == "interference"

    def build(self) -> MlzModel:
        if self.path is not None:
            return load_model(self.path)
        factory = interference_model if self.preset == "interference" else minigap_model
        return factory(self.params)


def _integrator_config(args) -> IntegratorConfig:
    return IntegratorConfig(
        abs_tol=args.abs_tol,
        rel_tol=args.rel_tol,
        frame=args.frame,
        t_start=-args.t_window,
        t_end=args.t_window,
    )


def _open_out(args):
    if args.out:
        return open(args.out, "w", encoding="utf-8", newline="")
    return None


def _emit(args, write) -> None:
    """Call ``write(stream)`` on --out or stdout."""
    fh = _open_out(args)
    if fh is None:
        write(sys.stdout)
    else:
        with fh:
            write(fh)


# --- subcommands ------------------------------------------------------------


def cmd_spectrum(args) -> int:
    model = _ModelSpec(args).build()
    samples = adiabatic_spectrum(model, args.t_min, args.t_max, args.samples)
    columns = ["t"] + [f"e{k + 1}" for k in range(model.n_states)] + ["min_gap"]

    def write(out):
        if args.format == "json":
            rows = [[s.time, *map(float, s.eigenvalues), s.min_gap] for s in samples]
            _json_dump({"columns": columns, "rows": rows}, out)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(columns)
            for s in samples:
                writer.writerow(
                    [_fmt(s.time), *(_fmt(e) for e in s.eigenvalues), _fmt(s.min_gap)]
                )

    _emit(args, write)
    return 0


def cmd_transition(args) -> int:
    spec = _ModelSpec(args)
    model = spec.build()
    initial = _check_initial(args.initial, model)
    config = _integrator_config(args)
    converged = converged_probabilities(model, args.t_window, config, jobs=args.jobs)
    numeric_row = [float(x) for x in converged.p_matrix[initial]]
    report = {
        "initial": initial + 1,
        "windows": list(converged.windows),
        "truncation_estimate": converged.truncation_estimate,
        "numeric_probabilities": numeric_row,
    }
    if spec.is_interference_preset:
        analytic_row = [float(x) for x in exact_matrix(spec.params)[initial]]
        report["analytic_probabilities"] = analytic_row
        report["deviations"] = [abs(a - b) for a, b in zip(numeric_row, analytic_row)]
        report["max_abs_deviation"] = max(report["deviations"])

    def write(out):
        _json_dump(report, out)
        out.write("\n")

    _emit(args, write)
    return 0


def _scaled_model(spec: _ModelSpec, base: MlzModel, param: str, value: float) -> MlzModel:
    """Scale offsets (eps_scale) or couplings (g_scale) by ``value``."""
    if param == "eps_scale":
        scaled = MlzModel(
            n_states=base.n_states,
            slopes=base.slopes,
            offsets=base.offsets * value,
            couplings=base.couplings,
            labels=base.labels,
        )
    else:
        scaled = MlzModel(
            n_states=base.n_states,
            slopes=base.slopes,
            offsets=base.offsets,
            couplings=base.couplings * value,
            labels=base.labels,
        )
    return validate_model(scaled)


def _sweep_point(model: MlzModel, initial: int, config: IntegratorConfig) -> np.ndarray:
    amps = np.zeros(model.n_states, dtype=np.complex128)
    amps[initial] = 1.0
    final = propagate(model, StateVector(amplitudes=amps, time=config.t_start), config)
    return np.abs(final.amplitudes) ** 2


def cmd_sweep(args) -> int:
    spec = _ModelSpec(args)
    base = spec.build()
    initial = _check_initial(args.initial, base)
    config = _integrator_config(args)
    if args.values:
        values = [float(v) for v in args.values.split(",")]
    else:
        values = list(DEFAULT_EPS_VALUES if args.param == "eps_scale"
                      else DEFAULT_G_VALUES)
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise MlzError("sweep values must be nonempty and strictly increasing")

    with_analytic = spec.is_interference_preset

    def run_point(value):
        model = _scaled_model(spec, base, args.param, value)
        return _sweep_point(model, initial, config)

    records = []
    failures = 0
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [(v, pool.submit(run_point, v)) for v in values]
            outcomes = []
            for v, fut in futures:
                try:
                    outcomes.append((v, fut.result()))
                except MlzError as exc:
                    outcomes.append((v, exc))
    else:
        outcomes = []
        for v in values:
            try:
                outcomes.append((v, run_point(v)))
            except MlzError as exc:
                outcomes.append((v, exc))
    for value, outcome in outcomes:
        if isinstance(outcome, Exception):
            failures += 1
            print(f"warning: sweep point {value} failed: {outcome}", file=sys.stderr)
            continue
        numeric = outcome
        analytic = None
        if with_analytic:
            params = spec.params
            if args.param == "g_scale":
                params = params.scaled(g_scale=value)
            analytic = exact_matrix(params)[initial]
        records.append((value, numeric, analytic))
    if failures > 0.1 * len(values):
        raise MlzError(f"{failures} of {len(values)} sweep points failed")

    n = base.n_states
    columns = ["value"] + [f"P{k + 1}" for k in range(n)]
    if with_analytic:
        columns += [f"analytic_P{k + 1}" for k in range(n)] + ["max_abs_deviation"]
    spread = None
    if records and args.param == "eps_scale" and with_analytic:
        block = np.array([rec[1] for rec in records])
        spread = block.max(axis=0) - block.min(axis=0)

    def write(out):
        if args.format == "json":
            rows = []
            for value, numeric, analytic in records:
                row = {"value": value,
                       "numeric_probabilities": [float(x) for x in numeric]}
                if analytic is not None:
                    row["analytic_probabilities"] = [float(x) for x in analytic]
                    row["max_abs_deviation"] = float(np.abs(numeric - analytic).max())
                rows.append(row)
            doc = {"swept_param": args.param, "initial": initial + 1, "records": rows}
            if spread is not None:
                doc["eps_independence_spread"] = [float(x) for x in spread]
            _json_dump(doc, out)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(columns)
            for value, numeric, analytic in records:
                row = [_fmt(value)] + [_fmt(x) for x in numeric]
                if analytic is not None:
                    row += [_fmt(x) for x in analytic]
                    row.append(_fmt(np.abs(numeric - analytic).max()))
                writer.writerow(row)
            if spread is not None:
                out.write("# eps_independence_spread,"
                          + ",".join(_fmt(x) for x in spread) + "\n")

    _emit(args, write)
    return 0


def cmd_compare(args) -> int:
    spec = _ModelSpec(args)
    model = spec.build()
    config = _integrator_config(args)
    numeric = scattering_matrix(model, config, jobs=args.jobs)
    semi = semiclassical_matrix(model)
    report = {
        "window": [config.t_start, config.t_end],
        "numeric_p": _matrix_rows(numeric.p_matrix),
        "semiclassical_p": _matrix_rows(semi.p_matrix),
    }
    deviations = {
        "numeric_vs_semiclassical": float(
            np.abs(numeric.p_matrix - semi.p_matrix).max()
        ),
    }
    if spec.is_interference_preset:
        analytic = exact_matrix(spec.params)
        report["analytic_p"] = _matrix_rows(analytic)
        deviations["numeric_vs_analytic"] = float(
            np.abs(numeric.p_matrix - analytic).max()
        )
        deviations["semiclassical_vs_analytic"] = float(
            np.abs(semi.p_matrix - analytic).max()
        )
    report["deviations"] = deviations
    report["unitarity_deviation"] = numeric.unitarity_deviation()

    def write(out):
        _json_dump(report, out)
        out.write("\n")

    _emit(args, write)
    return 0


def cmd_paths(args) -> int:
    spec = _ModelSpec(args)
    model = spec.build()
    initial = _check_initial(args.initial, model)
    paths = enumerate_paths(model, initial)
    by_final: dict[int, list] = {}
    path_objs = []
    for path in paths:
        amp = path_amplitude(path, model)
        by_final.setdefault(path.final_level, []).append(amp)
        path_objs.append(
            {
                "final": path.final_level + 1,
                "decisions": [
                    {
                        "time": ev.time,
                        "levels": [ev.level_a + 1, ev.level_b + 1],
                        "action": action,
                    }
                    for ev, action in path.decisions
                ],
                "magnitude": path.magnitude,
                "lz_phase": _complex_obj(path.lz_phase),
                "dynamic_phase": path.dynamic_phase,
            }
        )
    finals = []
    for final in sorted(by_final):
        total = sum(by_final[final])
        finals.append(
            {
                "final": final + 1,
                "amplitude_sum": _complex_obj(total),
                "probability": abs(total) ** 2,
            }
        )
    report = {"initial": initial + 1, "paths": path_objs, "finals": finals}

    def write(out):
        _json_dump(report, out)
        out.write("\n")

    _emit(args, write)
    return 0


def _check_initial(initial_1based: int, model: MlzModel) -> int:
    if not 1 <= initial_1based <= model.n_states:
        raise MlzError(
            f"--initial must be in 1..{model.n_states}, got {initial_1based}"
        )
    return initial_1based - 1


# --- argument parsing -------------------------------------------------------


def _add_model_args(parser):
    group = parser.add_argument_group("model")
    group.add_argument("--preset", choices=("interference", "minigap"),
                       default="interference")
    group.add_argument("--model", metavar="FILE",
                       help="JSON model file (overrides --preset)")
    group.add_argument("--eps1", type=float, default=0.25)
    group.add_argument("--eps2", type=float, default=0.35)
    group.add_argument("--g1", type=float, default=0.3)
    group.add_argument("--g2", type=float, default=0.3)
    group.add_argument("--g3", type=float, default=0.3)
    group.add_argument("--beta", type=float, default=1.0)


def _add_integrator_args(parser):
    group = parser.add_argument_group("integrator")
    group.add_argument("--t-window", type=float, default=1000.0,
                       help="integrate over [-T, T] (default 1000)")
    group.add_argument("--abs-tol", type=float, default=1e-10)
    group.add_argument("--rel-tol", type=float, default=1e-10)
    group.add_argument("--frame", choices=("diabatic", "interaction"),
                       default="interaction")
    group.add_argument("--jobs", type=int, default=1,
                       help="worker threads for independent propagations")


def _add_output_args(parser, formats=("json",), default="json"):
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write to PATH instead of stdout")
    parser.add_argument("--format", choices=formats, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlz",
        description="Multistate Landau-Zener workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="adiabatic energies over a time grid")
    _add_model_args(p)
    p.add_argument("--t-min", type=float, default=-3.0)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--samples", type=int, default=601)
    _add_output_args(p, formats=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("transition",
                       help="window-converged probabilities from one state")
    _add_model_args(p)
    _add_integrator_args(p)
    p.add_argument("--initial", type=int, default=1, help="initial level (1-based)")
    _add_output_args(p)
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("sweep", help="parameter sweep, one row per value")
    _add_model_args(p)
    _add_integrator_args(p)
    p.add_argument("--param", choices=("eps_scale", "g_scale"), default="eps_scale")
    p.add_argument("--values", help="comma-separated, strictly increasing")
    p.add_argument("--initial", type=int, default=1)
    _add_output_args(p, formats=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare",
                       help="numeric vs semiclassical vs closed-form matrices")
    _add_model_args(p)
    _add_integrator_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("paths", help="semiclassical path listing")
    _add_model_args(p)
    p.add_argument("--initial", type=int, default=1)
    _add_output_args(p)
    p.set_defaults(func=cmd_paths)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MlzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
