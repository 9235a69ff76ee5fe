"""Command-line front end.

Subcommands: ``evolve``, ``timeavg``, ``mixing-scan``, ``circuit verify``,
``circuit count`` and ``dj``. Exit status is 0 on success, 1 on invalid
input and 2 when a command's own check fails (tolerance exceeded, slope out
of band, non-deterministic XOR answer).

Every flag can also come from ``--config FILE`` (JSON object keyed by flag
name without the dashes, e.g. ``{"lattice-size": 17}``); explicit flags win.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from qlga import kernels, lgastate, mixing, qcircuit

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 1, 2

_ANGLE_TOKENS = {"pi": math.pi, "pi/2": math.pi / 2, "pi/4": math.pi / 4, "pi/8": math.pi / 8}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_angle(text):
    text = str(text).strip().lower()
    if text in _ANGLE_TOKENS:
        return _ANGLE_TOKENS[text]
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
    return value


def _int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from None


def _angle_list(text):
    return [parse_angle(v) for v in str(text).split(",") if v.strip()]


def fmt(x):
    """12 significant digits in scientific notation."""
    return f"{x:.11e}"


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file and rename; ``None`` means stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _check_output(path):
    if path is None:
        return
    parent = Path(path).parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise UsageError(f"output directory {str(parent)!r} is not writable")


def _build_state(args):
    kw = {}
    if args.init == "delta":
        kw = {"x0": args.x0, "velocity": args.velocity}
    elif args.init == "symmetric":
        kw = {"x0": args.x0}
    elif args.init == "gaussian":
        kw = {"x0": args.x0, "width": args.width, "momentum": args.momentum}
    try:
        return lgastate.make_initial(args.lattice_size, args.init, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _require(cond, message):
    if not cond:
        raise UsageError(message)


# -- commands ---------------------------------------------------------------


def cmd_evolve(args):
    _require(args.steps >= 0, "--steps must be nonnegative")
    _check_output(args.output)
    state = _build_state(args)
    s = args.scatter_angle
    rows = []
    for t in range(args.steps + 1):
        p = lgastate.position_distribution(state)
        rows.append(p)
        state = lgastate.step(state, s)
    meta = {"N": args.lattice_size, "s": s, "init": args.init, "steps": args.steps}
    if args.format == "json":
        text = _dump_json({**meta, "rows": [[fmt(v) for v in p] for p in rows]})
    else:
        buf = io.StringIO()
        for k, v in meta.items():
            buf.write(f"# {k}={fmt(v) if isinstance(v, float) else v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "p"])
        for t, p in enumerate(rows):
            for x, v in enumerate(p):
                w.writerow([t, x, fmt(v)])
        text = buf.getvalue()
    write_atomic(args.output, text)
    return EXIT_OK


def timeavg_grid(T, ratio):
    grid = [1]
    while grid[-1] < T:
        grid.append(min(T, max(grid[-1] + 1, math.ceil(grid[-1] * ratio))))
    return grid


def timeavg_points(state, s, T, ratio):
    """TV(avg_T, uniform) at each grid horizon, in a single forward pass."""
    N = state.N
    target = np.full(N, 1.0 / N)
    acc = np.zeros(N)
    amps = state.amplitudes
    c, sn = np.cos(s), np.sin(s)
    done = 0
    points = []
    for T_k in timeavg_grid(T, ratio):
        amps = kernels.qlga_accumulate(amps, acc, c, sn, T_k - done)
        done = T_k
        points.append({"T": T_k, "tv": mixing.tv_distance(acc / T_k, target)})
    return points


def cmd_timeavg(args):
    _require(args.steps >= 1, "--steps must be >= 1")
    _require(args.grid_ratio > 1, "--grid-ratio must exceed 1")
    _check_output(args.output)
    state = _build_state(args)
    points = timeavg_points(state, args.scatter_angle, args.steps, args.grid_ratio)
    report = {
        "N": args.lattice_size,
        "s": args.scatter_angle,
        "init": args.init,
        "points": points,
    }
    write_atomic(args.output, _dump_json(report))
    if args.epsilon is not None and points[-1]["tv"] > args.epsilon:
        return EXIT_CHECK
    return EXIT_OK


SLOPE_BANDS = {"quantum": (1.0, 0.3), "classical": (2.0, 0.3)}
DEFAULT_SIZES = {"quantum": [9, 17, 33, 65, 129, 257], "classical": [9, 17, 33, 65, 129]}


def cmd_mixing_scan(args):
    systems = [v.strip() for v in args.systems.split(",") if v.strip()]
    _require(systems and set(systems) <= {"quantum", "classical"}, "--systems takes quantum,classical")
    _require(0 < args.epsilon <= 1, "--epsilon must lie in (0, 1]")
    _check_output(args.output)
    sizes = {
        "quantum": args.lattice_sizes or args.quantum_sizes,
        "classical": args.lattice_sizes or args.classical_sizes,
    }
    for sys_name in systems:
        _require(all(N >= 2 for N in sizes[sys_name]), "lattice sizes must be >= 2")
        _require(len(sizes[sys_name]) >= 3, "a scaling fit needs at least 3 lattice sizes")
    out = {"epsilon": args.epsilon, "s": args.scatter_angle, "systems": {}}
    ok = True
    csv_rows = []
    for sys_name in systems:
        kwargs = {"epsilon": args.epsilon}
        if args.t_max is not None:
            kwargs["t_max"] = args.t_max
        if sys_name == "quantum":
            kwargs["s"] = args.scatter_angle
        reports = mixing.mixing_sweep(sizes[sys_name], sys_name, jobs=args.jobs, **kwargs)
        found = [r for r in reports if r.t_mix is not None]
        fit = mixing.fit_reports(reports) if len(found) >= 3 else None
        centre, width = SLOPE_BANDS[sys_name]
        in_band = fit is not None and abs(fit.slope - centre) <= width
        ok = ok and in_band and len(found) == len(reports)
        out["systems"][sys_name] = {
            "reports": [r.to_dict() for r in reports],
            "fit": fit.to_dict() if fit else None,
            "expected_slope": centre,
            "slope_tolerance": width,
            "in_band": in_band,
        }
        for r in reports:
            csv_rows.append([sys_name, r.N, "" if r.t_mix is None else r.t_mix, r.t_max, fmt(r.tv)])
    write_atomic(args.output, _dump_json(out))
    if args.output is not None:
        buf = io.StringIO()
        buf.write(f"# epsilon={fmt(args.epsilon)}\n# s={fmt(args.scatter_angle)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["system", "N", "t_mix", "t_max", "tv"])
        w.writerows(csv_rows)
        write_atomic(Path(args.output).with_suffix(".csv"), buf.getvalue())
    if args.check and not ok:
        return EXIT_CHECK
    return EXIT_OK


def cmd_circuit_verify(args):
    _require(1 <= args.n_min <= args.n_max <= 6, "verify needs 1 <= --n-min <= --n-max <= 6")
    _check_output(args.output)
    results = []
    for n in range(args.n_min, args.n_max + 1):
        for s in args.scatter_angles:
            err = qcircuit.verify_against_dense(n, s, args.merge_qft, args.explicit_swaps)
            results.append({"n": n, "s": s, "max_error": err})
    max_err = max(r["max_error"] for r in results)
    report = {
        "mode": "verify",
        "merge_qft": args.merge_qft,
        "explicit_swaps": args.explicit_swaps,
        "tolerance": args.tolerance,
        "results": results,
        "max_error": max_err,
        "passed": max_err <= args.tolerance,
    }
    write_atomic(args.output, _dump_json(report))
    return EXIT_OK if report["passed"] else EXIT_CHECK


def cmd_circuit_count(args):
    _require(1 <= args.n_min <= args.n_max, "count needs 1 <= --n-min <= --n-max")
    _require(args.n_max - args.n_min >= 2, "count needs at least three n values")
    _check_output(args.output)
    ns = list(range(args.n_min, args.n_max + 1))
    kw = {"merge_qft": args.merge_qft, "explicit_swaps": args.explicit_swaps}
    coeffs, _, residuals = qcircuit.quadratic_count_fit(ns, args.scatter_angle, **kw)
    rows = []
    for n in ns:
        rep = qcircuit.gate_count(qcircuit.qlga_step_circuit(n, args.scatter_angle, **kw))
        rows.append({**rep.to_dict(), "n": n, "residual": float(residuals[n])})
    report = {
        "mode": "count",
        **kw,
        "fit_n": ns[:3],
        "coefficients": {k: float(v) for k, v in zip("abc", coeffs)},
        "rows": rows,
        "exact_quadratic": all(r == 0 for r in residuals.values()),
    }
    write_atomic(args.output, _dump_json(report))
    return EXIT_OK if report["exact_quadratic"] else EXIT_CHECK


def cmd_dj(args):
    lines = []
    ok = True
    for f in ((0, 0), (0, 1), (1, 0), (1, 1)):
        probs = qcircuit.dj_query_distribution(f)
        out = int(probs[1] > probs[0])
        expect = f[0] ^ f[1]
        n_fcnot = sum(g.kind == "FCNOT" for g in qcircuit.dj_circuit(f))
        correct = out == expect and abs(probs[out] - 1) <= 1e-12 and n_fcnot == 1
        ok = ok and correct
        line = f"f=({f[0]},{f[1]}): output {out}, probability {probs[out]:.6f}"
        if args.shots:
            v = qcircuit.apply_circuit(qcircuit.basis_state(2, 0), qcircuit.dj_circuit(f))
            counts = qcircuit.sample_measurements(v, qcircuit.QUERY, args.shots, args.seed)
            line += f", sampled {counts[0]}x0 {counts[1]}x1"
        lines.append(line)
    bound = qcircuit.classical_one_query_bound()
    lines.append(f"max classical 1-query success = {bound:g}")
    write_atomic(args.output, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


# -- parser -----------------------------------------------------------------


def _add_state_flags(p, default_init="symmetric", default_steps=128):
    p.add_argument("--lattice-size", type=int, default=64)
    p.add_argument("--scatter-angle", type=parse_angle, default=math.pi / 4)
    p.add_argument("--steps", type=int, default=default_steps)
    p.add_argument("--init", choices=("delta", "symmetric", "gaussian", "uniform"), default=default_init)
    p.add_argument("--x0", type=int, default=0)
    p.add_argument("--velocity", type=int, choices=(-1, 1), default=1)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("--momentum", type=float, default=0.0)


def build_parser():
    parser = _Parser(prog="qlga", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of flag values")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("evolve", help="dump P_t(x) for t = 0..steps")
    _add_state_flags(p)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("timeavg", help="TV of the running average to uniform")
    _add_state_flags(p, default_steps=10_000)
    p.add_argument("--grid-ratio", type=float, default=1.5)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--output")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_timeavg)

    p = sub.add_parser("mixing-scan", help="quantum/classical mixing-time sweeps")
    p.add_argument("--systems", default="quantum,classical")
    p.add_argument("--lattice-sizes", type=_int_list, default=None)
    p.add_argument("--quantum-sizes", type=_int_list, default=DEFAULT_SIZES["quantum"])
    p.add_argument("--classical-sizes", type=_int_list, default=DEFAULT_SIZES["classical"])
    p.add_argument("--scatter-angle", type=parse_angle, default=math.pi / 4)
    p.add_argument("--epsilon", type=float, default=mixing.DEFAULT_EPSILON)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--check", action="store_true", help="exit 2 if a slope leaves its band")
    p.add_argument("--output")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_mixing_scan)

    p = sub.add_parser("circuit", help="compiled step circuit checks")
    csub = p.add_subparsers(dest="circuit_command", parser_class=_Parser)
    csub.required = True
    v = csub.add_parser("verify")
    v.add_argument("--n-min", type=int, default=1)
    v.add_argument("--n-max", type=int, default=5)
    v.add_argument("--scatter-angles", type=_angle_list, default=[0.0, math.pi / 8, math.pi / 4, 1.0])
    v.add_argument("--tolerance", type=float, default=1e-10)
    c = csub.add_parser("count")
    c.add_argument("--n-min", type=int, default=2)
    c.add_argument("--n-max", type=int, default=12)
    c.add_argument("--scatter-angle", type=parse_angle, default=math.pi / 4)
    for q in (v, c):
        q.add_argument("--merge-qft", action="store_true")
        q.add_argument("--explicit-swaps", action="store_true")
        q.add_argument("--output")
        q.add_argument("--format", choices=("json",), default="json")
    v.set_defaults(func=cmd_circuit_verify)
    c.set_defaults(func=cmd_circuit_count)

    p = sub.add_parser("dj", help="two-bit XOR with one oracle call")
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_dj)
    return parser


def _apply_config(parser, argv):
    """Re-parse with config-file values as defaults for the chosen subcommand."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
    if not isinstance(config, dict):
        raise UsageError("config file must hold a JSON object")
    flags = []
    for key, value in config.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                flags.append(flag)
            continue
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        flags += [flag, str(value)]
    # config flags go right after the subcommand path so explicit flags override
    depth = 2 if args.command == "circuit" else 1
    i = next(k for k, tok in enumerate(argv) if tok == args.command)
    head = argv[: i + depth]
    return parser.parse_args(head + flags + argv[i + depth :])


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"qlga: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"qlga: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
