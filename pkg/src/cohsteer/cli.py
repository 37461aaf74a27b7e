"""
Command line interface.

Every subcommand prints a table to stdout. ``--out PATH`` additionally writes
the result as CSV or JSON (``--format``). Numbers are rendered with 12
significant digits, so reruns of the same command produce identical files.
The exit code is 0 whenever the computation completes; violations are
reported as data.

CSV columns
  coherence          measure, axis, value, sum, bound
  steer              measure, functional_value, bound, violated
  werner-threshold   measure, threshold, tol
  filter-sweep       theta, critical_p (empty when no p <= 1 violates)
  mub-scan           theta, phi, functional_value, bound, violated
  separable-check    measure, max_value, bound, violations, num_pairs
  qsl                m, functional_value, bound, violated
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bipartite
from .coherence import AXES, Measure, coherence, complementarity_sum
from .errors import CohsteerError
from .qsl import EXAMPLE_TRIPLE, ObservableTriple, nonlocal_qsl_functional
from .qubit_core import MAX_COHERENT, QubitState
from .steering import (
    filter_sweep,
    mub_scan,
    separable_harness,
    steering_functional,
    werner_threshold,
)

NAMED_STATES = ("werner", "psi-alpha", "singlet", "max-coherent-product", "maximally-mixed")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else format(float(x), ".12g")
    return str(x)


def _measures(value) -> list:
    if value == "all":
        return list(Measure)
    return [Measure.parse(value)]


def _table(columns, rows) -> str:
    cells = [list(columns)] + [[fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _emit(args, columns, rows, payload, quiet_rows=False):
    if not quiet_rows:
        print(_table(columns, rows))
    if args.out:
        if args.format == "json":
            text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
        else:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows([[fmt(v) for v in row] for row in rows])
            text = buf.getvalue()
        with open(args.out, "w") as fh:
            fh.write(text)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if hasattr(obj, "name"):
        return obj.name
    raise TypeError(f"not serialisable: {obj!r}")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def two_qubit_from_args(args) -> bipartite.TwoQubitState:
    if getattr(args, "state_file", None):
        return bipartite.TwoQubitState.from_json(_load_json(args.state_file))
    name = args.state
    if name == "werner":
        return bipartite.werner_state(1.0 if args.param is None else args.param)
    if name == "psi-alpha":
        return bipartite.psi_alpha_state(0.5 if args.param is None else args.param)
    if name == "singlet":
        return bipartite.singlet()
    if name == "max-coherent-product":
        return bipartite.max_coherent_product()
    return bipartite.maximally_mixed()


def qubit_from_args(args) -> QubitState:
    if args.state_file:
        data = _load_json(args.state_file)
        if "bloch" in data:
            return QubitState(data["bloch"])
        rows = data["matrix"]
        rho = np.array([[complex(e["re"], e.get("im", 0.0)) for e in row] for row in rows])
        return QubitState.from_density(rho)
    if args.bloch is not None:
        return QubitState(args.bloch)
    if args.named == "max-coherent":
        return MAX_COHERENT
    return QubitState(np.zeros(3))


def cmd_coherence(args):
    state = qubit_from_args(args)
    rows, payload = [], {"bloch": state.bloch.tolist(), "measures": {}}
    for m in _measures(args.measure):
        values = [float(coherence(state, ax, m)) for ax in AXES]
        total = float(complementarity_sum(state, m))
        for ax, v in zip(AXES, values):
            rows.append([m.value, ax.name, v, total, m.bound])
        payload["measures"][m.value] = {
            "per_axis": dict(zip("XYZ", values)), "sum": total, "bound": m.bound,
        }
    _emit(args, ["measure", "axis", "value", "sum", "bound"], rows, payload)


def cmd_steer(args):
    state = two_qubit_from_args(args)
    triad = bipartite.MeasurementTriad(args.theta, args.phi)
    rows, payload = [], {"state": state.to_json(), "theta": args.theta, "phi": args.phi,
                         "reports": []}
    for m in _measures(args.measure):
        rep = steering_functional(state, triad, m, args.bob_frame)
        rows.append([m.value, rep.functional_value, rep.bound, rep.violated])
        payload["reports"].append(rep.to_json())
    _emit(args, ["measure", "functional_value", "bound", "violated"], rows, payload)


def cmd_werner_threshold(args):
    rows, payload = [], {}
    for m in _measures(args.measure):
        p = werner_threshold(m, args.tol)
        rows.append([m.value, p, args.tol])
        payload[m.value] = p
    _emit(args, ["measure", "threshold", "tol"], rows, payload)


def _theta_grid(args):
    if args.theta_values:
        return [float(x) for x in args.theta_values]
    return np.linspace(args.theta_min, args.theta_max, args.num).tolist()


def cmd_filter_sweep(args):
    m = Measure.parse(args.measure)
    points = filter_sweep(m, args.side, _theta_grid(args), args.tol)
    rows = [[pt.theta, pt.critical_p] for pt in sorted(points)]
    payload = {"measure": m.value, "side": args.side,
               "points": [{"theta": t, "critical_p": None if math.isnan(p) else p}
                          for t, p in rows]}
    _emit(args, ["theta", "critical_p"], rows, payload)


def cmd_mub_scan(args):
    state = two_qubit_from_args(args)
    m = Measure.parse(args.measure)
    scan = mub_scan(state, m, np.linspace(0, np.pi, args.n_theta),
                    np.linspace(0, 2 * np.pi, args.n_phi), args.bob_frame)
    th, ph = scan.argmax
    summary = [[m.value, scan.max_value, th, ph, scan.bound, scan.any_violation,
                scan.violation_fraction]]
    print(_table(["measure", "max_value", "argmax_theta", "argmax_phi", "bound",
                  "any_violation", "violation_fraction"], summary))
    rows = [[t, p, v, scan.bound, viol] for t, p, v, viol in scan.rows()]
    payload = {"measure": m.value, "state": state.to_json(), "max_value": scan.max_value,
               "argmax": [th, ph], "bound": scan.bound, "any_violation": scan.any_violation,
               "theta": scan.theta, "phi": scan.phi, "values": scan.values}
    _emit(args, ["theta", "phi", "functional_value", "bound", "violated"], rows, payload,
          quiet_rows=True)


def cmd_separable_check(args):
    summary = separable_harness(args.num_states, args.num_triads, args.seed)
    rows = [[m.value, summary.max_value[m], m.bound, summary.violations[m], summary.num_pairs]
            for m in Measure]
    _emit(args, ["measure", "max_value", "bound", "violations", "num_pairs"], rows,
          summary.to_json())
    print(f"passed: {fmt(summary.passed)}")


def cmd_qsl(args):
    state = two_qubit_from_args(args)
    if args.observables_file:
        triple = ObservableTriple.from_json(_load_json(args.observables_file))
    elif args.triple == "pauli":
        triple = ObservableTriple.pauli()
    else:
        triple = EXAMPLE_TRIPLE
    rep = nonlocal_qsl_functional(state, triple, args.time)
    payload = rep.to_json()
    payload["observables"] = triple.to_json()["observables"]
    _emit(args, ["m", "functional_value", "bound", "violated"],
          [[rep.m, rep.functional_value, rep.bound, rep.violated]], payload)


def _add_output(p, default_format="csv"):
    p.add_argument("--out", help="write results to this file")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def _add_state(p, default="werner"):
    p.add_argument("--state", choices=NAMED_STATES, default=default)
    p.add_argument("--param", type=float, help="p for werner, alpha for psi-alpha")
    p.add_argument("--state-file", help='JSON with {"r","s","T"} or a 4x4 {"re","im"} matrix')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohsteer", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coherence", help="per-basis coherence and complementarity sums")
    p.add_argument("--bloch", type=float, nargs=3, metavar=("NX", "NY", "NZ"))
    p.add_argument("--named", choices=("max-coherent", "maximally-mixed"), default="max-coherent")
    p.add_argument("--state-file", help='JSON with {"bloch": [...]} or a 2x2 "matrix"')
    p.add_argument("--measure", default="all", choices=("l1", "entropy", "skew", "all"))
    _add_output(p, "json")
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("steer", help="steering functional for one state and triad")
    _add_state(p)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--measure", default="all", choices=("l1", "entropy", "skew", "all"))
    p.add_argument("--bob-frame", choices=("pauli", "triad"), default="pauli")
    _add_output(p, "json")
    p.set_defaults(func=cmd_steer)

    p = sub.add_parser("werner-threshold", help="critical Werner weight by bisection")
    p.add_argument("--measure", default="all", choices=("l1", "entropy", "skew", "all"))
    p.add_argument("--tol", type=float, default=1e-6)
    _add_output(p)
    p.set_defaults(func=cmd_werner_threshold)

    p = sub.add_parser("filter-sweep", help="critical Werner weight after local filtering")
    p.add_argument("--measure", default="l1", choices=("l1", "entropy", "skew"))
    p.add_argument("--side", choices=("alice", "bob"), default="bob")
    p.add_argument("--theta-min", type=float, default=0.05)
    p.add_argument("--theta-max", type=float, default=np.pi / 2 - 0.05)
    p.add_argument("--num", type=int, default=61)
    p.add_argument("--theta-values", type=float, nargs="+")
    p.add_argument("--tol", type=float, default=1e-6)
    _add_output(p)
    p.set_defaults(func=cmd_filter_sweep)

    p = sub.add_parser("mub-scan", help="steering functional over rotated triads")
    _add_state(p, default="psi-alpha")
    p.add_argument("--measure", default="l1", choices=("l1", "entropy", "skew"))
    p.add_argument("--n-theta", type=int, default=181)
    p.add_argument("--n-phi", type=int, default=361)
    p.add_argument("--bob-frame", choices=("pauli", "triad"), default="pauli")
    _add_output(p)
    p.set_defaults(func=cmd_mub_scan)

    p = sub.add_parser("separable-check", help="random separable states never violate")
    p.add_argument("--num-states", type=int, default=10_000)
    p.add_argument("--num-triads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_separable_check)

    p = sub.add_parser("qsl", help="non-local quantum speed limit inequality")
    _add_state(p)
    p.add_argument("--triple", choices=("example", "pauli"), default="example",
                   help="example: I/2+2sx, sx+2sy, I+sy")
    p.add_argument("--observables-file", help='JSON list of three {"c": .., "r": [..]}')
    p.add_argument("--time", type=float, default=1.0, help="evolution time used for T_b")
    _add_output(p, "json")
    p.set_defaults(func=cmd_qsl)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CohsteerError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
