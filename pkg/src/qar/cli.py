"""Command-line front end: qar steady | sweep | bench | demo.

Exit codes: 0 success, 1 usage error, 2 solver degeneracy or dimension cap,
3 accuracy warning escalated by --strict.  Data outputs carry no
timestamps; run metadata lives in a separate header object so files
round-trip byte-identically.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bench as bench_mod
from . import transform
from .holo import cat_closed_form, cat_state, evaluate
from .lindblad import (DegenerateSteadyStateError, DimensionCapError,
                       RefrigeratorParams, TruncationWarning, analytic_report,
                       numeric_report)
from .operators import (DegeneracyError, RefrigeratorHamiltonianParams,
                        ResonanceWarning, build_jc, coupled_indices,
                        first_order_state, matrix_of, perturbation_matrix_element)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2
EXIT_STRICT = 3

SWEEPABLE = ("omega_c", "omega_h", "temp_c", "temp_h", "gamma_c", "gamma_h", "eta")


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; this CLI reserves 2 for
    solver degeneracy, so remap them to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x):
    return f"{x:.10g}"


def _json_clean(obj):
    """Replace non-finite floats by null so the output stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _emit_json(payload):
    print(json.dumps(_json_clean(payload), indent=2))


@dataclass
class SweepSpec:
    """One swept refrigerator parameter over a fixed base configuration."""

    param: str
    start: float
    stop: float
    steps: int
    base: dict
    solver: str = "formula"
    explicit_cutoff: int | None = None

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.param!r}; choose from {SWEEPABLE}")
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")
        if min(self.start, self.stop) <= 0:
            raise ValueError(f"{self.param} must stay positive across the range")

    def values(self):
        return np.linspace(self.start, self.stop, self.steps)


def _build_params(kwargs, cutoff):
    """RefrigeratorParams with explicit or tail-derived cutoff; returns
    (params, tail_warning_fired)."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        if cutoff is None:
            params = RefrigeratorParams.with_auto_cutoff(**kwargs)
        else:
            params = RefrigeratorParams(cutoff=cutoff, **kwargs)
    warned = any(issubclass(w.category, TruncationWarning) for w in caught)
    return params, warned


def _refrigerator_kwargs(args):
    return dict(omega_h=args.omega_h, omega_c=args.omega_c,
                gamma_h=args.gamma_h, gamma_c=args.gamma_c,
                temp_h=args.temp_h, temp_c=args.temp_c, eta=args.eta)


def _steady_payload(params, solver):
    formula = analytic_report(params)
    numeric = None
    if solver in ("liouvillian", "both"):
        numeric = numeric_report(params)
    active = numeric if numeric is not None else formula
    diagnostics = {
        "tail_weight": params.tail_weight(),
        "liouvillian_residual": None if numeric is None else numeric.liouvillian_residual,
    }
    if numeric is not None and formula.jc != 0.0:
        diagnostics["jc_relative_difference"] = numeric.jc / formula.jc - 1.0
    return {
        "params": {
            "omega_h": params.omega_h, "omega_c": params.omega_c,
            "gamma_h": params.gamma_h, "gamma_c": params.gamma_c,
            "temp_h": params.temp_h, "temp_c": params.temp_c,
            "eta": params.eta, "cutoff": list(params.cutoff), "solver": solver,
        },
        "nbar": {"h": params.nbar_h, "c": params.nbar_c},
        "occupations": {"h": active.occ_h, "c": active.occ_c},
        "X3": active.x3,
        "currents": {
            "Jc_formula": formula.jc,
            "Jc_numeric": None if numeric is None else numeric.jc,
            "Jh": active.jh,
            "P": active.power,
        },
        "cop": {"formula": formula.cop_formula, "measured": active.cop_measured},
        "laws": {"first_residual": active.first_law_residual,
                 "second_value": active.second_law_value},
        "entropy_production": active.entropy_production,
        "diagnostics": diagnostics,
    }


def cmd_steady(args):
    params, warned = _build_params(_refrigerator_kwargs(args), args.cutoff)
    if args.strict and warned:
        print(f"cutoff {params.cutoff} leaves tail weight "
              f"{params.tail_weight():.2e} >= 1e-06 (--strict)", file=sys.stderr)
        return EXIT_STRICT
    try:
        payload = _steady_payload(params, args.solver)
    except (DegenerateSteadyStateError, DimensionCapError) as exc:
        print(f"steady-state solve failed: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    if args.json:
        _emit_json(payload)
        return EXIT_OK
    cur = payload["currents"]
    print(f"nbar_h = {_fmt(payload['nbar']['h'])}   nbar_c = {_fmt(payload['nbar']['c'])}")
    print(f"<n_h>  = {_fmt(payload['occupations']['h'])}   "
          f"<n_c>  = {_fmt(payload['occupations']['c'])}   X3 = {_fmt(payload['X3'])}")
    print(f"J_c (formula) = {_fmt(cur['Jc_formula'])}")
    if cur["Jc_numeric"] is not None:
        print(f"J_c (liouvillian) = {_fmt(cur['Jc_numeric'])}   "
              f"rel. diff = {_fmt(payload['diagnostics']['jc_relative_difference'])}")
    print(f"J_h = {_fmt(cur['Jh'])}   P = {_fmt(cur['P'])}")
    cop = payload["cop"]["formula"]
    print("COP = " + ("undefined (omega_h = omega_c)" if not math.isfinite(cop) else _fmt(cop)))
    print(f"first law |Jh+Jc+P| = {_fmt(payload['laws']['first_residual'])}   "
          f"second law value = {_fmt(payload['laws']['second_value'])}")
    return EXIT_OK


def _sweep_point(task):
    name, value, base, solver, explicit_cutoff = task
    kwargs = dict(base)
    kwargs[name] = float(value)
    params, warned = _build_params(kwargs, explicit_cutoff)
    formula = analytic_report(params)
    row = {
        "param": float(value),
        "nbar_c": params.nbar_c,
        "nbar_h": params.nbar_h,
        "X3": formula.x3,
        "Jc_formula": formula.jc,
        "Jc_numeric": None,
        "COP": formula.cop_formula,
        "second_law": formula.second_law_value,
        "_warned": warned,
    }
    if solver in ("liouvillian", "both"):
        numeric = numeric_report(params)
        row["Jc_numeric"] = numeric.jc
        if solver == "liouvillian":
            row.update(X3=numeric.x3, second_law=numeric.second_law_value)
    return row


CSV_HEADER = ["param", "nbar_c", "nbar_h", "X3", "Jc_formula", "Jc_numeric",
              "COP", "second_law"]


def run_sweep(spec, parallel=False):
    """Rows for every swept value, in sweep order regardless of scheduling."""
    tasks = [(spec.param, v, spec.base, spec.solver, spec.explicit_cutoff)
             for v in spec.values()]
    if parallel:
        with ProcessPoolExecutor() as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(["" if row[k] is None else _fmt(row[k]) for k in CSV_HEADER])


def cmd_sweep(args):
    spec = SweepSpec(param=args.param, start=args.start, stop=args.stop,
                     steps=args.steps, base=_refrigerator_kwargs(args),
                     solver=args.solver, explicit_cutoff=args.cutoff)
    try:
        rows = run_sweep(spec, parallel=args.parallel)
    except (DegenerateSteadyStateError, DimensionCapError) as exc:
        print(f"sweep failed: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    if args.csv is None:
        print(",".join(CSV_HEADER))
        for row in rows:
            print(",".join("" if row[k] is None else _fmt(row[k]) for k in CSV_HEADER))
    else:
        write_sweep_csv(rows, args.csv)
        print(f"wrote {len(rows)} rows to {args.csv}")
    if args.strict and any(row["_warned"] for row in rows):
        print("tail weight exceeded 1e-06 at one or more sweep points (--strict)",
              file=sys.stderr)
        return EXIT_STRICT
    return EXIT_OK


def cmd_bench(args):
    report = bench_mod.run_bench(n_max=args.n_max, reps=args.reps)
    _emit_json(report.to_dict())
    return EXIT_OK


def _demo_jc(args):
    g = args.coupling
    h = build_jc(args.omega_c, args.omega_eg, g)
    cutoff = args.n_max + 1
    rep = matrix_of(h, (cutoff,))
    rows = []
    worst = 0.0
    for n in range(1, args.n_max + 1):
        bra = rep.index_of(0, (n,))       # |g, n>
        ket = rep.index_of(1, (n - 1,))   # |e, n-1>
        element = rep.matrix[bra, ket]
        analytic = g * math.sqrt(n)
        worst = max(worst, abs(element - analytic))
        rows.append({"n": n, "analytic": analytic,
                     "matrix_re": element.real, "matrix_im": element.imag})
    return {"demo": "jc", "coupling": g, "elements": rows, "max_abs_error": worst}


def _demo_cat(args):
    alpha = complex(args.alpha, args.alpha_im)
    axis = np.linspace(-2.0, 2.0, args.grid)
    out = {"demo": "cat", "alpha": {"re": alpha.real, "im": alpha.imag}}
    for parity in ("even", "odd"):
        state = cat_state(alpha, parity, (args.cat_cutoff,))
        worst = 0.0
        for re in axis:
            for im in axis:
                z = complex(re, im)
                worst = max(worst, abs(evaluate(state, z)
                                       - cat_closed_form(alpha, z, parity)))
        out[f"{parity}_max_residual"] = worst
    return out


def _demo_transform(args):
    states = [transform.to_holo_state(transform.hermite_wavefunction(n), args.n_max)
              for n in range(args.n_max + 1)]
    dim = len(states)
    gram = np.empty((dim, dim), dtype=complex)
    for i, si in enumerate(states):
        for j, sj in enumerate(states):
            gram[i, j] = sum(amp.conjugate() * sj.coeffs.get(idx, 0.0)
                             for idx, amp in si.coeffs.items())
    dev = float(np.max(np.abs(gram - np.eye(dim))))
    kappa = transform.transform_calibration()
    psi0 = transform.hermite_wavefunction(0)
    vals = [transform.segal_bargmann(psi0, complex(re, im))
            for re in np.linspace(-2, 2, 5) for im in np.linspace(-2, 2, 5)]
    rel_var = float(max(abs(v - kappa) for v in vals) / abs(kappa))
    return {"demo": "transform", "n_max": args.n_max,
            "gram_max_deviation": dev,
            "ground_state_image_rel_variation": rel_var,
            "calibration": {"re": kappa.real, "im": kappa.imag}}


def _demo_perturb(args):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonanceWarning)
        params = RefrigeratorHamiltonianParams(args.omega_h, args.omega_c2,
                                               args.omega_w, args.omega_int)
    n = tuple(args.index)
    cutoff = tuple(c + 2 for c in n)
    pme = {str(m): abs(perturbation_matrix_element(m, n, params.omega_int))
           for m in coupled_indices(n)}
    out = {"demo": "perturb", "index": list(n),
           "frequencies": list(params.frequencies), "omega_int": params.omega_int,
           "couplings": pme}
    try:
        state = first_order_state(n, params, cutoff, denominator="h0")
        out["h0_denominator"] = {str(k): {"re": v.real, "im": v.imag}
                                 for k, v in state.coeffs.items()}
        out["degenerate"] = False
    except DegeneracyError as exc:
        out["degenerate"] = True
        out["degenerate_pair"] = [list(p) for p in exc.pair]
    state = first_order_state(n, params, cutoff, denominator="total")
    out["total_denominator"] = {str(k): {"re": v.real, "im": v.imag}
                                for k, v in state.coeffs.items()}
    return out


def cmd_demo(args):
    handler = {"jc": _demo_jc, "cat": _demo_cat,
               "transform": _demo_transform, "perturb": _demo_perturb}[args.which]
    _emit_json(handler(args))
    return EXIT_OK


def _add_refrigerator_flags(p):
    p.add_argument("--omega-h", type=float, default=2.0, dest="omega_h",
                   help="hot mode frequency (default 2.0)")
    p.add_argument("--omega-c", type=float, default=1.0, dest="omega_c",
                   help="cold mode frequency (default 1.0)")
    p.add_argument("--gamma-h", type=float, default=0.1, dest="gamma_h")
    p.add_argument("--gamma-c", type=float, default=0.1, dest="gamma_c")
    p.add_argument("--temp-h", type=float, default=1.5, dest="temp_h")
    p.add_argument("--temp-c", type=float, default=1.0, dest="temp_c")
    p.add_argument("--eta", type=float, default=0.05, help="noise strength")
    p.add_argument("--cutoff", type=int, default=None,
                   help="per-mode Fock cutoff (default: from thermal tail < 1e-6)")
    p.add_argument("--solver", choices=("formula", "liouvillian", "both"),
                   default="formula")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when the cutoff leaves tail weight >= 1e-6")


def build_parser():
    parser = _Parser(prog="qar",
                     description="Noise-driven absorption refrigerator in the "
                                 "holomorphic representation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steady",
                       help="steady-state report at one operating point")
    _add_refrigerator_flags(p)
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep",
                       help="sweep one parameter, emit CSV")
    _add_refrigerator_flags(p)
    p.add_argument("--param", required=True, choices=SWEEPABLE)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--csv", metavar="PATH", default=None,
                   help="output file (default: stdout)")
    p.add_argument("--parallel", action="store_true",
                   help="compute sweep rows concurrently")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench",
                       help="time monomial vs Hermite-recurrence evaluation")
    p.add_argument("--n-max", type=int, default=512, dest="n_max")
    p.add_argument("--reps", type=int, default=2000)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("demo",
                       help="worked examples with their oracles")
    p.add_argument("which", choices=("jc", "cat", "transform", "perturb"))
    p.add_argument("--n-max", type=int, default=10, dest="n_max")
    p.add_argument("--coupling", type=float, default=0.3, help="JC coupling g_c")
    p.add_argument("--omega-c", type=float, default=1.0, dest="omega_c",
                   help="JC cavity frequency")
    p.add_argument("--omega-eg", type=float, default=1.0, dest="omega_eg")
    p.add_argument("--alpha", type=float, default=1.0, help="cat amplitude (real part)")
    p.add_argument("--alpha-im", type=float, default=0.0, dest="alpha_im")
    p.add_argument("--grid", type=int, default=9, help="cat residual grid points per axis")
    p.add_argument("--cat-cutoff", type=int, default=40, dest="cat_cutoff")
    p.add_argument("--omega-h", type=float, default=3.0, dest="omega_h",
                   help="perturbation demo hot frequency")
    p.add_argument("--omega-c2", type=float, default=1.0, dest="omega_c2",
                   help="perturbation demo cold frequency")
    p.add_argument("--omega-w", type=float, default=2.0, dest="omega_w")
    p.add_argument("--omega-int", type=float, default=0.1, dest="omega_int")
    p.add_argument("--index", type=int, nargs=3, default=(1, 1, 1),
                   help="unperturbed occupation (n_h n_c n_w)")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegeneracyError as exc:
        print(f"degenerate configuration: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
