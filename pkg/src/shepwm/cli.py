"""Command-line front end: ``shepwm solve|sweep|spectrum|waveform|gates|rerun``.

Exit codes: 0 success, 1 bad arguments or I/O failure, 2 the solver did not
produce a converged, correctly ordered solution.

Every run that writes files also writes ``<output>.manifest.json`` holding
all resolved parameters; ``shepwm rerun`` replays it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .gates import DEFAULT_DEAD_TIME, DEFAULT_TICK_FREQUENCY, DeadTimeError, build_schedule, export_csv, export_timer_table
from .harmonics import (
    DEFAULT_N_MAX,
    SheProblem,
    SwitchingAngleSet,
    alternating_cos_sum,
    analytic_spectrum,
    default_eliminated,
    thd,
)
from .solver import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    SingularJacobianError,
    SolverConfig,
    newton_solve,
    sweep,
)
from .waveform import DEFAULT_FREQUENCY, DEFAULT_SAMPLES, ORACLE_SAMPLES, WaveformSpec, numeric_spectrum, synthesize

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2

TOLERANCE_ENV = "SHEPWM_TOL"


class UsageError(Exception):
    pass


class SolverFailure(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    version: str = __version__
    tool: str = "shepwm"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        data = json.loads(text)
        return cls(data["subcommand"], data["params"], data["version"], data["tool"])


# -- formatting helpers -------------------------------------------------------

def fmt(x: float) -> str:
    """Shortest round-trip float representation."""
    return repr(float(x))


def _write(path, data: bytes | str):
    data = data.encode("utf-8") if isinstance(data, str) else data
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _emit(params, data: bytes | str):
    if params.get("output"):
        _write(params["output"], data)
    else:
        sys.stdout.write(data.decode("utf-8") if isinstance(data, bytes) else data)


def _bn(theta, V, n):
    return 4.0 * V / (n * math.pi) * alternating_cos_sum(theta, n)


# -- parameter resolution ---------------------------------------------------

def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _default_tolerance():
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return DEFAULT_TOLERANCE
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOLERANCE_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"{TOLERANCE_ENV} must be > 0")
    return tol


def _solver_params(args):
    p = args.p
    eliminated = args.eliminate if args.eliminate is not None else list(default_eliminated(p))
    return {
        "p": p,
        "M": args.m,
        "eliminated": eliminated,
        "guess_deg": args.guess,
        "tolerance": args.tol if args.tol is not None else _default_tolerance(),
        "max_iterations": args.max_iter,
        "V": args.V,
    }


def _problem_and_config(params):
    try:
        problem = SheProblem(params["p"], params["M"], tuple(params["eliminated"]), params["V"])
        guess = params.get("guess_deg")
        if guess is not None and len(guess) != problem.p:
            raise ValueError(f"--guess needs {problem.p} angles, got {len(guess)}")
        config = SolverConfig(params["tolerance"], params["max_iterations"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    guess_rad = None if guess is None else [math.radians(g) for g in guess]
    return problem, config, guess_rad


def _run_solver(params):
    problem, config, guess = _problem_and_config(params)
    try:
        result = newton_solve(problem, config, guess=guess)
    except SingularJacobianError as exc:
        raise SolverFailure(f"singular Jacobian: {exc}") from None
    return problem, result


def _angles_from(params):
    """Angles from ``angles_deg`` directly, or by solving ``p``/``M``."""
    if params.get("angles_deg") is not None:
        try:
            return SwitchingAngleSet.from_degrees(params["angles_deg"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if params.get("p") is None or params.get("M") is None:
        raise UsageError("give --angles, or both -p and -m")
    _, result = _run_solver(params)
    if not result.ok:
        raise SolverFailure(
            f"solver did not return a valid solution (converged={result.converged}, "
            f"ordering_valid={result.ordering_valid})"
        )
    return result.angles


# -- subcommands --------------------------------------------------------------

def run_solve(params):
    problem, result = _run_solver(params)
    V = problem.V
    harmonics = {n: _bn(result.theta, V, n) for n in problem.ranks}
    if params.get("json"):
        report = {
            "p": problem.p,
            "M": problem.M,
            "eliminated": list(problem.eliminated),
            "converged": result.converged,
            "ordering_valid": result.ordering_valid,
            "iterations": result.iterations,
            "angles_deg": list(result.degrees),
            "angles_rad": list(result.theta),
            "final_step_norm": result.final_step_norm,
            "residual_norm": result.residual_norm,
            "harmonics": {str(n): b for n, b in harmonics.items()},
        }
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        out = [
            f"p={problem.p} M={problem.M:g} eliminated={','.join(map(str, problem.eliminated)) or '-'}",
            f"converged: {'yes' if result.converged else 'no'}  iterations: {result.iterations}  "
            f"ordering valid: {'yes' if result.ordering_valid else 'no'}",
            "angles (deg): " + " ".join(f"{d:.2f}" for d in result.degrees),
            "angles (rad): " + " ".join(f"{t:.12g}" for t in result.theta),
            f"final step: {result.final_step_norm:.3e} rad  residual norm: {result.residual_norm:.3e}",
            f"{'n':>4}  {'b_n':>15}  {'target':>10}",
        ]
        for n, b in harmonics.items():
            target = problem.M * V if n == 1 else 0.0
            out.append(f"{n:>4}  {b:>15.9g}  {target:>10.6g}")
        sys.stdout.write("\n".join(out) + "\n")
    if not result.ok:
        print(
            "error: no valid solution "
            f"(converged={result.converged}, ordering_valid={result.ordering_valid})",
            file=sys.stderr,
        )
        return EXIT_SOLVER
    return EXIT_OK


def run_sweep(params):
    try:
        config = SolverConfig(params["tolerance"], params["max_iterations"])
        guess = params.get("guess_deg")
        if guess is not None:
            config = SolverConfig(
                config.tolerance, config.max_iterations, SwitchingAngleSet.from_degrees(guess)
            )
        res = sweep(
            params["p"], params["m_max"], params["step"], tuple(params["eliminated"]),
            config, params["strategy"], params["V"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    p = params["p"]
    header = "M," + ",".join(f"theta{j}_deg" for j in range(1, p + 1)) + ",converged"
    rows = [header]
    columns = [[] for _ in range(p)]
    for m, r in res.grid:
        if r is not None and r.ok:
            degs = r.degrees
            rows.append(fmt(m) + "," + ",".join(fmt(d) for d in degs) + ",1")
            for j in range(p):
                columns[j].append(degs[j])
        else:
            rows.append(fmt(m) + "," * p + ",0")
            for j in range(p):
                columns[j].append(None)
    _emit(params, "\n".join(rows) + "\n")
    _figures(params, "sweep", res.m_values, columns)
    print(
        f"{len(res.grid)} grid points, {100 * res.converged_fraction():.1f}% converged",
        file=sys.stderr,
    )
    return EXIT_OK


def run_spectrum(params):
    angles = _angles_from(params)
    n_max, V = params["n_max"], params["V"]
    try:
        if params["method"] == "numeric":
            wave = synthesize(WaveformSpec(angles, V, DEFAULT_FREQUENCY, params["samples"]))
            spec = numeric_spectrum(wave, n_max)
        else:
            spec = analytic_spectrum(angles, V, n_max)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    b1 = spec.fundamental
    ranks = spec.ranks
    pct = [100.0 * abs(spec[n]) / abs(b1) for n in ranks]
    rows = ["n,amplitude,amplitude_pct_of_fundamental"]
    rows += [f"{n},{fmt(spec[n])},{fmt(q)}" for n, q in zip(ranks, pct)]
    _emit(params, "\n".join(rows) + "\n")
    value = thd(spec, max(2, n_max))
    stream = sys.stderr if not params.get("output") else sys.stdout
    print(f"THD: {fmt(value)} ({100 * value:.4f}%) up to n={n_max}", file=stream)
    _figures(params, "spectrum", ranks, pct)
    return EXIT_OK


def run_waveform(params):
    angles = _angles_from(params)
    try:
        wave = synthesize(WaveformSpec(angles, params["V"], params["frequency"], params["samples"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = ["time_s,voltage_V"]
    rows += [f"{fmt(t)},{fmt(v)}" for t, v in zip(wave.time.tolist(), wave.voltage.tolist())]
    _emit(params, "\n".join(rows) + "\n")
    _figures(params, "waveform", wave.time, wave.voltage)
    return EXIT_OK


def run_gates(params):
    angles = _angles_from(params)
    try:
        schedule = build_schedule(angles, params["frequency"], params["dead_time"])
        if params["format"] == "c":
            data = export_timer_table(schedule, params["tick"])
        else:
            data = export_csv(schedule)
    except (DeadTimeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    _emit(params, data)
    return EXIT_OK


def _figures(params, kind, *data):
    from . import plotting

    if params.get("svg"):
        render = {"sweep": plotting.sweep_svg, "spectrum": plotting.spectrum_svg, "waveform": plotting.waveform_svg}
        _write(params["svg"], render[kind](*data))
    if params.get("png"):
        render = {"sweep": plotting.sweep_png, "spectrum": plotting.spectrum_png, "waveform": plotting.waveform_png}
        try:
            render[kind](params["png"], *data)
        except OSError as exc:
            raise UsageError(f"cannot write {params['png']}: {exc}") from None


RUNNERS = {
    "solve": run_solve,
    "sweep": run_sweep,
    "spectrum": run_spectrum,
    "waveform": run_waveform,
    "gates": run_gates,
}

OUTPUT_KEYS = ("output", "svg", "png", "manifest")


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_solver_args(sp, required):
    sp.add_argument("-p", type=int, required=required, help="number of switching angles per quarter wave")
    sp.add_argument("-m", type=float, required=required, help="modulation index M = h1/V")
    sp.add_argument("--eliminate", type=_int_list, help="odd ranks to null, e.g. 3,5 (default 3,5,...,2p-1)")
    sp.add_argument("--guess", type=_float_list, help="initial angles in degrees, e.g. 35,55,80")
    sp.add_argument("--tol", type=float, help=f"step tolerance in rad (default {DEFAULT_TOLERANCE:g}, env {TOLERANCE_ENV})")
    sp.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITERATIONS)


def _add_common(sp):
    sp.add_argument("-V", type=float, default=1.0, help="DC amplitude in volts (default 1, per unit)")
    sp.add_argument("--manifest", help="run manifest path (default <output>.manifest.json)")


def build_parser():
    parser = _Parser(prog="shepwm", description="Selective harmonic elimination PWM toolkit.")
    parser.add_argument("--version", action="version", version=f"shepwm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", help="solve for the switching angles")
    _add_solver_args(sp, required=True)
    _add_common(sp)
    sp.add_argument("--json", action="store_true", help="print a JSON report")

    sp = sub.add_parser("sweep", help="solve over a modulation index grid")
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("--m-max", type=float, required=True)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--strategy", choices=("paper", "warm"), default="paper")
    sp.add_argument("--eliminate", type=_int_list)
    sp.add_argument("--guess", type=_float_list)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITERATIONS)
    sp.add_argument("-o", "--output", help="CSV path (default stdout)")
    sp.add_argument("--svg", help="write the angle trajectories as SVG")
    sp.add_argument("--png", help="write the angle trajectories as PNG (matplotlib)")
    _add_common(sp)

    for name, help_text in (
        ("spectrum", "harmonic spectrum and THD"),
        ("waveform", "sampled output voltage over one period"),
        ("gates", "H-bridge gate schedule"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--angles", type=_float_list, help="switching angles in degrees")
        _add_solver_args(sp, required=False)
        _add_common(sp)
        sp.add_argument("-o", "--output", help="output path (default stdout)")
        if name == "spectrum":
            sp.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
            sp.add_argument("--method", choices=("analytic", "numeric"), default="analytic")
            sp.add_argument("--samples", type=int, default=ORACLE_SAMPLES)
        if name == "waveform":
            sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        if name in ("waveform", "gates"):
            sp.add_argument("--frequency", type=float, default=DEFAULT_FREQUENCY)
        if name == "gates":
            sp.add_argument("--dead-time", type=float, default=DEFAULT_DEAD_TIME, help="seconds (default 1e-6)")
            sp.add_argument("--format", choices=("csv", "c"), default="csv")
            sp.add_argument("--tick", type=float, default=DEFAULT_TICK_FREQUENCY, help="timer tick in Hz for --format c")
        if name != "gates":
            sp.add_argument("--svg")
            sp.add_argument("--png")

    sp = sub.add_parser("rerun", help="re-execute a run manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out-dir", help="write outputs into this directory instead")
    return parser


def resolve_params(args) -> dict:
    """Flatten parsed arguments into the JSON-native parameter dict of a manifest."""
    cmd = args.command
    if cmd == "sweep":
        p = args.p
        params = {
            "p": p,
            "m_max": args.m_max,
            "step": args.step,
            "strategy": args.strategy,
            "eliminated": args.eliminate if args.eliminate is not None else list(default_eliminated(max(p, 1))),
            "guess_deg": args.guess,
            "tolerance": args.tol if args.tol is not None else _default_tolerance(),
            "max_iterations": args.max_iter,
            "V": args.V,
        }
    elif cmd == "solve":
        params = _solver_params(args)
        params["json"] = args.json
    else:
        params = {"angles_deg": args.angles, "V": args.V}
        if args.angles is None and args.p is not None:
            params.update(_solver_params(args))
        elif args.angles is None:
            params.update(p=args.p, M=args.m)
        for key in ("n_max", "method", "samples", "frequency", "dead_time", "format", "tick"):
            if hasattr(args, key):
                params[key] = getattr(args, key)
    for key in OUTPUT_KEYS:
        if hasattr(args, key):
            params[key] = getattr(args, key)
    return params


def execute(command: str, params: dict) -> int:
    code = RUNNERS[command](params)
    manifest_path = params.get("manifest")
    if manifest_path is None and params.get("output"):
        manifest_path = str(params["output"]) + ".manifest.json"
    if manifest_path:
        _write(manifest_path, RunManifest(command, params).to_json())
    return code


def _rerun(args):
    try:
        manifest = RunManifest.from_json(Path(args.manifest).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    if manifest.subcommand not in RUNNERS:
        raise UsageError(f"unknown subcommand {manifest.subcommand!r} in manifest")
    params = dict(manifest.params)
    if args.out_dir:
        for key in OUTPUT_KEYS:
            if params.get(key):
                params[key] = str(Path(args.out_dir) / Path(params[key]).name)
    return execute(manifest.subcommand, params)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rerun":
            return _rerun(args)
        return execute(args.command, resolve_params(args))
    except UsageError as exc:
        print(f"shepwm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverFailure as exc:
        print(f"shepwm: error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
