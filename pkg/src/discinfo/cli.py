"""Command-line front end.

Each subcommand prints (or writes) one table. Output goes to ``--out`` when
given, else to ``$DISCINFO_OUTPUT_DIR/<command>.<format>`` when that variable
is set, else to stdout. Exit status is 2 for malformed arguments or configs
and 1 when a command's preconditions fail.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import l1_case_study as l1
from .information import InformationMap, radius_nonadaptive
from .model_space import ModelSpace, SymbolicFunctional, transform_information, truncated_radius_ladder
from .randomized import (
    SphereSampler,
    avg_case_error_closed_form,
    avg_case_error_mc,
    bakhvalov_lower_bound,
    child_rng,
    sandwich_report,
)
from .report import to_csv, to_json
from .spectral_core import LinearProblem, SingularSpectrum, load_definition, make_spectrum, worst_case_error
from .std_info import GridModel, std_vs_all

OUTPUT_ENV = "DISCINFO_OUTPUT_DIR"


class ConfigError(Exception):
    """Malformed configuration (exit 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must be nonempty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError(f"list must be increasing: {text}")
    return values


def _load_json_arg(text: str):
    path = Path(text)
    try:
        if path.exists():
            return json.loads(path.read_text())
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {text!r}: {exc}")


def parse_spectrum(text: str):
    """``power-law:p=1:m=64``, ``explicit:values=1,0.5,0.25``, a JSON document or a path to one."""
    if text.lstrip().startswith("{") or Path(text).exists():
        try:
            return load_definition(_load_json_arg(text))
        except KeyError as exc:
            raise ConfigError(f"definition is missing {exc}")
    kind, *parts = text.split(":")
    params = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep:
            raise ConfigError(f"bad spectrum parameter {part!r}")
        params[key] = value
    try:
        if kind == "power-law":
            return make_spectrum("power-law", {"p": float(params["p"])}, int(params["m"]))
        if kind == "explicit":
            return make_spectrum("explicit", [float(v) for v in params["values"].split(",")])
    except KeyError as exc:
        raise ConfigError(f"spectrum {kind!r} is missing {exc}")
    except ValueError as exc:
        raise ConfigError(str(exc))
    raise ConfigError(f"unknown spectrum kind {kind!r}")


def _spectrum_of(obj) -> SingularSpectrum:
    return obj.spectrum if isinstance(obj, LinearProblem) else obj


def _problem_of(obj, rng=None) -> LinearProblem:
    return obj if isinstance(obj, LinearProblem) else LinearProblem.from_spectrum(obj, rng)


def _seed_n(seed: int, n: int) -> list[int]:
    return [seed, n]


# -- commands: each returns (columns, rows, extra-json) ----------------------------


def cmd_spectrum(args):
    spec = _spectrum_of(parse_spectrum(args.spectrum))
    grid = args.n or list(range(len(spec)))
    rows = [{"n": n, "worst_case_error": worst_case_error(spec, n)} for n in grid]
    return ["n", "worst_case_error"], rows, {"sigma": spec.values}


def cmd_radius(args):
    problem = _problem_of(parse_spectrum(args.problem))
    N = InformationMap.from_json(_load_json_arg(args.info), problem.dim)
    rep = radius_nonadaptive(problem, N)
    row = {
        "n": len(N),
        "radius": rep.radius,
        "kernel_dim": rep.kernel_dim,
        "worst_case_error": worst_case_error(problem.spectrum, len(N)),
    }
    return ["n", "radius", "kernel_dim", "worst_case_error"], [row], {"witness": rep.witness}


def cmd_sandwich(args):
    spec = _spectrum_of(parse_spectrum(args.spectrum))
    rows = []
    for n in args.n:
        s = sandwich_report(spec, n)
        rows.append({"n": n, "lower": s.lower, "upper": s.upper})
    return ["n", "lower", "upper"], rows, None


def cmd_avgcase(args):
    obj = parse_spectrum(args.spectrum)
    spec = _spectrum_of(obj)
    problem = _problem_of(obj, child_rng(args.seed, 0))
    m = args.m or len(spec)
    rows = []
    for n in args.n:
        est = avg_case_error_mc(problem, n, SphereSampler(m, _seed_n(args.seed, n + 1)), args.samples)
        lower = bakhvalov_lower_bound(spec, n) if 1 <= n and 4 * n <= len(spec) else None
        rows.append({
            "n": n,
            "lower": lower,
            "closed_form_avg": avg_case_error_closed_form(spec, n, m),
            "mc_avg": est.value,
            "mc_se": est.standard_error,
            "upper": worst_case_error(spec, n),
        })
    return ["n", "lower", "closed_form_avg", "mc_avg", "mc_se", "upper"], rows, None


def cmd_transform(args):
    space = ModelSpace(args.q)
    doc = _load_json_arg(args.info)
    N = [SymbolicFunctional.from_json(L) for L in doc]
    trace = transform_information(N, space)
    ladder = truncated_radius_ladder(N, space, args.dims, trace)
    rows = [{"d": r.d, "r_N": r.radius, "r_Nstar": r.radius_star, "gap": r.gap} for r in ladder]
    return ["d", "r_N", "r_Nstar", "gap"], rows, {"trace": trace.to_json()}


def mcnorm_vector(m: int, l1_norm: float) -> np.ndarray:
    """Flat vector with alternating signs and the requested l1 norm."""
    return l1_norm / m * np.where(np.arange(m) % 2 == 0, 1.0, -1.0)


def cmd_mcnorm(args):
    x = np.asarray(_load_json_arg(args.x), dtype=float) if args.x else mcnorm_vector(args.m, args.l1)
    if np.sum(np.abs(x)) >= 1:
        raise ValueError("x must lie in the open l1 unit ball")
    rows = [vars(r) for r in l1.rmse_sweep(x, args.n, args.reps, args.seed)]
    return ["n", "rmse", "envelope", "reps", "seed"], rows, {"x": x}


def cmd_width(args):
    if args.m > l1.MAX_EXACT_DIM:
        raise l1.WidthLimitError(f"exact width limited to m <= {l1.MAX_EXACT_DIM}")
    table = l1.gelfand_width_table(args.m, args.restarts, args.seed)
    rows, extra = [], {}
    for n in args.n:
        w = table[n] if n <= args.m else l1.gelfand_width_bounds(args.m, n)
        rows.append({"m": args.m, "n": n, "lower": w.lower_bound, "upper": w.upper_bound,
                     "restarts": args.restarts, "seed": args.seed})
        extra[str(n)] = {"best_N": w.best_N, "witness": w.witness}
    return ["m", "n", "lower", "upper", "restarts", "seed"], rows, {"candidates": extra}


def cmd_separation(args):
    rows = [vars(r) for r in l1.separation_report(args.m, args.n, args.reps, args.seed, args.restarts)]
    return ["n", "wc_floor", "ran_rmse"], rows, None


def cmd_stdinfo(args):
    if args.model:
        try:
            model = GridModel.from_json(_load_json_arg(args.model))
        except KeyError as exc:
            raise ConfigError(f"grid model is missing {exc}")
    else:
        if args.seed is None:
            raise ConfigError("--seed is required with --random-m")
        model = GridModel.random(args.random_m, child_rng(args.seed, 0))
    grid = args.n or list(range(model.m + 1))
    rows = []
    for n in grid:
        r = std_vs_all(model, n)
        rows.append({"n": n, "e_std": r.e_std, "e_all": r.e_all})
    return ["n", "e_std", "e_all"], rows, None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "radius": cmd_radius,
    "avgcase": cmd_avgcase,
    "sandwich": cmd_sandwich,
    "transform": cmd_transform,
    "mcnorm": cmd_mcnorm,
    "width": cmd_width,
    "separation": cmd_separation,
    "stdinfo": cmd_stdinfo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discinfo", description="Minimal errors with continuous and discontinuous information.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", help="output file")
        return p

    p = add("spectrum", "worst-case minimal errors sigma_{n+1}")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--n", type=_int_list)

    p = add("radius", "radius of nonadaptive linear information")
    p.add_argument("--problem", required=True, help="spectrum or matrix definition")
    p.add_argument("--info", required=True, help="JSON array of coefficient arrays (or a path)")

    p = add("avgcase", "average-case error on the sphere, closed form and Monte Carlo")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)

    p = add("sandwich", "randomized lower/upper bounds")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--n", type=_int_list, required=True)

    p = add("transform", "continuous replacement of information in the weighted model")
    p.add_argument("--info", required=True, help="JSON list of functionals (or a path)")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--dims", type=_int_list, default=[16, 64, 256])

    p = add("mcnorm", "RMSE of the random-sign variance estimator")
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--l1", type=float, default=0.9)
    p.add_argument("--x", help="explicit vector as JSON (overrides --m/--l1)")
    p.add_argument("--n", type=_int_list, default=[4, 16, 64, 256])
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)

    p = add("width", "certified bounds on Gelfand widths of the l1 ball")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)

    p = add("separation", "worst-case floor against randomized RMSE")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--n", type=_int_list, default=[1, 4, 16, 64, 256])
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, required=True)

    p = add("stdinfo", "point evaluations against arbitrary functionals on a grid model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", help="grid model JSON (or a path)")
    group.add_argument("--random-m", type=int)
    p.add_argument("--n", type=_int_list)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("batch", help="run several experiments from a JSON config")
    p.add_argument("config")
    return parser


def _destination(args) -> Path | None:
    if args.out:
        return Path(args.out)
    base = os.environ.get(OUTPUT_ENV)
    if base:
        return Path(base) / f"{args.command}.{args.format}"
    return None


def _execute(args, stdout) -> None:
    columns, rows, extra = COMMANDS[args.command](args)
    text = to_csv(columns, rows) if args.format == "csv" else to_json(columns, rows, extra)
    dest = _destination(args)
    if dest is None:
        stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)


def experiment_argv(exp: dict) -> list[str]:
    """Translate one batch entry ``{"command": ..., "<flag>": value}`` into argv."""
    exp = dict(exp)
    try:
        argv = [exp.pop("command")]
    except KeyError:
        raise ConfigError("experiment without a command")
    for key, value in exp.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
            continue
        if isinstance(value, list) and all(isinstance(v, int) for v in value):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, (list, dict)):
            value = json.dumps(value)
        argv += [flag, str(value)]
    return argv


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "batch":
            doc = _load_json_arg(args.config)
            experiments = doc.get("experiments") if isinstance(doc, dict) else None
            if not isinstance(experiments, list):
                raise ConfigError('batch config needs an "experiments" list')
            parsed = [parser.parse_args(experiment_argv(e)) for e in experiments]
            if any(a.command == "batch" for a in parsed):
                raise ConfigError("batch configs cannot nest")
            for a in parsed:
                _execute(a, stdout)
        else:
            _execute(args, stdout)
    except ConfigError as exc:
        stderr.write(f"discinfo: error: {exc}\n")
        return 2
    except (ValueError, np.linalg.LinAlgError) as exc:
        stderr.write(f"discinfo: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
