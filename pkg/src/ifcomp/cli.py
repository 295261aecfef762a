"""Command line front end.

Subcommands read a problem file (JSON with a {"version", "kind", "problem"}
envelope), run the matching computation, and emit a report either as
canonical JSON (sorted keys, floats rounded to 12 significant digits, no
volatile fields, so identical runs give identical bytes) or as plain text
(which appends the wall time).  Exit codes: 0 on success, 1 when a
computation fails or hits a capacity limit, 2 for anything wrong with the
input itself.
"""

import argparse
import json
import math
import sys
import time
from importlib import metadata

import numpy as np

from .info_core import (
    CapacityError,
    DomainError,
    FunctionTable,
    JointPmf,
    MAX_CELLS,
    bernoulli_product,
    binary_entropy,
    dsbs,
)
from . import structure_analysis as sa
from . import sum_rate as sr
from . import rate_allocation as ra
from . import multiterminal as mt

SUBCOMMANDS = ("info", "analyze", "sumrate", "allocate", "network",
               "paper-examples")


# ---------------------------------------------------------------------------
# input handling


def _fail(message):
    raise DomainError(message)


def _load_problem(path, kind):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        _fail("cannot read input file: %s" % exc)
    except json.JSONDecodeError as exc:
        _fail("input is not valid JSON: %s" % exc)
    if not isinstance(obj, dict):
        _fail("the problem file must be a JSON object")
    if obj.get("version") != "1":
        _fail("problem file field 'version' must be the string \"1\"")
    if obj.get("kind") != kind:
        _fail("problem file field 'kind' is %r, expected %r"
              % (obj.get("kind"), kind))
    if "problem" not in obj or not isinstance(obj["problem"], dict):
        _fail("problem file field 'problem' must be an object")
    return obj["problem"]


def _get(payload, field, required=True, default=None):
    if field not in payload:
        if required:
            _fail("problem field '%s' is missing" % field)
        return default
    return payload[field]


def _parse_pmf(obj, field):
    if not isinstance(obj, dict):
        _fail("problem field '%s' must be an object" % field)
    if "generator" in obj:
        name = obj["generator"]
        if name == "dsbs":
            if "p" not in obj:
                _fail("generator dsbs in '%s' needs field 'p'" % field)
            return dsbs(float(obj["p"]))
        if name == "bernoulli_product":
            if "params" not in obj:
                _fail("generator bernoulli_product in '%s' needs field "
                      "'params'" % field)
            return bernoulli_product([float(v) for v in obj["params"]])
        _fail("problem field '%s' names unknown generator %r" % (field, name))
    try:
        return JointPmf.from_json(obj)
    except KeyError as exc:
        _fail("problem field '%s' is missing key %s" % (field, exc))


def _parse_function(obj, field):
    if not isinstance(obj, dict):
        _fail("problem field '%s' must be an object" % field)
    try:
        return FunctionTable.from_json(obj)
    except KeyError as exc:
        _fail("problem field '%s' is missing key %s" % (field, exc))


# ---------------------------------------------------------------------------
# output handling


def _rounded(obj):
    """Copy with every float rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return None
        return float("%.12g" % x)
    return obj


def _render_text(obj, indent=0):
    lines = []
    pad = "  " * indent
    if isinstance(obj, dict):
        for key in sorted(obj):
            val = obj[key]
            if isinstance(val, (dict, list)):
                lines.append("%s%s:" % (pad, key))
                lines.extend(_render_text(val, indent + 1))
            else:
                lines.append("%s%s: %s" % (pad, key, _scalar_text(val)))
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            lines.append("%s%s" % (pad, ", ".join(_scalar_text(v) for v in obj)))
        else:
            for v in obj:
                lines.extend(_render_text(v, indent))
    else:
        lines.append("%s%s" % (pad, _scalar_text(obj)))
    return lines


def _scalar_text(v):
    if isinstance(v, float):
        return "%.12g" % v
    if v is None:
        return "-"
    return str(v)


def _emit(report, args, wall_seconds):
    report = _rounded(report)
    if args.format == "json":
        text = json.dumps(report, sort_keys=True, indent=2,
                          allow_nan=False) + "\n"
    else:
        lines = _render_text(report)
        lines.append("wall time: %.3f s" % wall_seconds)
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_info(args):
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {
        "name": "ifcomp",
        "version": version,
        "subcommands": list(SUBCOMMANDS),
        "formats": ["json", "text"],
        "limits": {
            "max_pmf_cells": MAX_CELLS,
            "bruteforce_max_messages": 2,
            "bruteforce_max_candidates": sr.MAX_BRUTEFORCE_CANDIDATES,
            "all_cut_max_nodes": mt.MAX_ALL_CUT_NODES,
            "default_message_size_cap": sr.DEFAULT_CAP,
        },
    }


def _cmd_analyze(args):
    payload = _load_problem(args.input, "analyze")
    pmf = _parse_pmf(_get(payload, "pmf"), "pmf")
    if len(pmf.axes) != 2:
        _fail("problem field 'pmf' must have exactly two axes")
    f_a = _parse_function(_get(payload, "f_A"), "f_A")
    f_b = _parse_function(_get(payload, "f_B"), "f_B")
    for name, f in (("f_A", f_a), ("f_B", f_b)):
        if tuple(f.domain_axes) != tuple(pmf.axes):
            _fail("problem field '%s' domain does not match the pmf axes"
                  % name)
    report = sa.slice_structure_report(pmf, f_a, f_b)
    classes = {}
    for key, cls in report["classes"].items():
        classes[",".join(str(i) for i in key) if key else "-"] = cls.tag
    lb, tag, bounds = sr.best_lower_bound(pmf, f_a, f_b, 1)
    results = {
        "support_is_rectangle": sa.is_rectangle(sa.support(pmf)),
        "zero_message_structure": {
            "status": report["status"],
            "violations": report["violations"],
            "classes": classes,
        },
        "one_message_condition": sa.han_kobayashi_condition(f_b),
        "one_message_lower_bound": sa.one_message_lower_bound(pmf, f_b),
        "no_nontrivial_column_rectangles":
            sa.no_nontrivial_column_rectangles(f_b),
        "cutset_lower_bound": sr.cutset_lower_bound(pmf, f_a, f_b),
        "one_sided_exact_rate": sr.independent_noise_exact_rate(pmf, f_b),
        "lower_bounds": bounds,
    }
    return {"inputs": payload, "results": results,
            "notes": {"method": "structure"}}


def _cmd_sumrate(args):
    payload = _load_problem(args.input, "sumrate")
    pmf = _parse_pmf(_get(payload, "pmf"), "pmf")
    if len(pmf.axes) != 2:
        _fail("problem field 'pmf' must have exactly two axes")
    f_a = _parse_function(_get(payload, "f_A"), "f_A")
    f_b = _parse_function(_get(payload, "f_B"), "f_B")
    for name, f in (("f_A", f_a), ("f_B", f_b)):
        if tuple(f.domain_axes) != tuple(pmf.axes):
            _fail("problem field '%s' domain does not match the pmf axes"
                  % name)
    t = _get(payload, "t")
    if not isinstance(t, int) or t < 1:
        _fail("problem field 't' must be a positive integer")
    loc = _get(payload, "initial_location", required=False, default="A")
    if loc not in ("A", "B"):
        _fail("problem field 'initial_location' must be \"A\" or \"B\"")
    caps = _get(payload, "caps", required=False)
    if caps is not None:
        if (not isinstance(caps, list) or len(caps) != t
                or any(not isinstance(c, int) or c < 1 for c in caps)):
            _fail("problem field 'caps' must list one positive integer "
                  "per message")
    seed = _get(payload, "seed", required=False, default=0)
    if args.seed is not None:
        seed = args.seed
    if t <= 2:
        method = "bruteforce"
        result = sr.min_sum_rate_bruteforce(pmf, f_a, f_b, t, loc, caps)
    else:
        method = "penalty"
        result = sr.min_sum_rate_penalty(pmf, f_a, f_b, t, loc, caps,
                                         seed=int(seed))
    certified = result.certified
    if args.tolerance is not None and result.feasible:
        certified = bool(result.achieved <= result.lower_bound
                         + args.tolerance)
    results = {
        "achieved": result.achieved if result.feasible else None,
        "feasible": result.feasible,
        "rates": list(result.rates) if result.rates else None,
        "residuals": list(result.residuals) if result.residuals else None,
        "lower_bounds": dict(result.lower_bounds),
        "lower_bound": result.lower_bound,
        "certified": certified,
        "chain": result.chain.to_json() if result.chain else None,
    }
    return {"inputs": payload, "results": results,
            "notes": {"method": method, "seed": int(seed)}}


def _parse_curve(obj, p, q):
    if obj is None or obj == "optimal":
        return ra.optimal_curve(p, q)
    if obj == "diagonal":
        return ra.diagonal_curve(p, q)
    if isinstance(obj, list):
        return ra.AllocationCurve(p, q, [(float(a), float(b))
                                         for a, b in obj])
    _fail("problem field 'curve' must be \"optimal\", \"diagonal\", or a "
          "vertex list")


def _parse_partition(obj):
    if obj is None:
        return ra.uniform_partition(1)
    if isinstance(obj, str):
        if not obj.startswith("uniform:"):
            _fail("problem field 'partition' strings look like \"uniform:t\"")
        try:
            t = int(obj.split(":", 1)[1])
        except ValueError:
            _fail("problem field 'partition' has a non-integer message count")
        if t < 2 or t % 2:
            _fail("problem field 'partition' needs an even message count "
                  "of at least 2")
        return ra.uniform_partition(t // 2)
    if isinstance(obj, list):
        return [float(v) for v in obj]
    _fail("problem field 'partition' must be a list or \"uniform:t\"")


def _cmd_allocate(args):
    payload = _load_problem(args.input, "allocate")
    p = float(_get(payload, "p"))
    q = float(_get(payload, "q"))
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        _fail("problem fields 'p' and 'q' must sit strictly inside (0, 1)")
    curve = _parse_curve(_get(payload, "curve", required=False), p, q)
    partition = _parse_partition(_get(payload, "partition", required=False))
    rates = ra.staircase_rates(curve, partition)
    results = {
        "curve": [list(v) for v in curve.vertices],
        "partition": [float(v) for v in partition],
        "rates": rates,
        "sum": float(sum(rates)),
        "integral": ra.integral_sum_rate(curve),
        "closed_form": ra.closed_form_infinite_rate(p, q),
        "bound": sr.infinite_message_lower_bound(p, q),
        "region_split": list(ra.region_split(curve)),
    }
    return {"inputs": payload, "results": results,
            "notes": {"method": "staircase"}}


def _edge_name(j, k):
    return "%d->%d" % (j + 1, k + 1)


def _parse_network(payload):
    nodes = _get(payload, "nodes")
    if not isinstance(nodes, int) or nodes < 2:
        _fail("problem field 'nodes' must be an integer of at least 2")
    if "joint" in payload:
        joint = _parse_pmf(payload["joint"], "joint")
    elif "generator" in payload:
        gen = payload["generator"]
        if isinstance(gen, dict) and "name" in gen:
            gen = dict(gen)
            gen["generator"] = gen.pop("name")
        joint = _parse_pmf(gen, "generator")
    else:
        _fail("problem needs field 'joint' or 'generator'")
    if len(joint.axes) != nodes:
        _fail("problem field 'joint' must have one axis per node")
    edges_raw = _get(payload, "edges")
    if not isinstance(edges_raw, list) or not edges_raw:
        _fail("problem field 'edges' must be a nonempty list of [from, to]")
    edges = []
    for e in edges_raw:
        if (not isinstance(e, list) or len(e) != 2
                or any(not isinstance(v, int) for v in e)):
            _fail("problem field 'edges' entries must be [from, to] pairs")
        if not (1 <= e[0] <= nodes and 1 <= e[1] <= nodes):
            _fail("problem field 'edges' uses node ids outside 1..%d" % nodes)
        edges.append((e[0] - 1, e[1] - 1))
    funcs_raw = _get(payload, "functions")
    functions = [None] * nodes
    if isinstance(funcs_raw, list):
        if len(funcs_raw) != nodes:
            _fail("problem field 'functions' must have one entry per node")
        items = [(j, f) for j, f in enumerate(funcs_raw) if f is not None]
    elif isinstance(funcs_raw, dict):
        items = []
        for key, f in funcs_raw.items():
            try:
                j = int(key) - 1
            except ValueError:
                _fail("problem field 'functions' keys must be node ids")
            if not 0 <= j < nodes:
                _fail("problem field 'functions' uses node id outside 1..%d"
                      % nodes)
            items.append((j, f))
    else:
        _fail("problem field 'functions' must be a list or an object")
    for j, f in items:
        functions[j] = _parse_function(f, "functions[%d]" % (j + 1))
    return mt.NetworkSpec(joint, edges, functions)


def _detect_schemes(network):
    """Per-edge rates of reference schemes matching this network's shape."""
    schemes = {}
    n = network.n_nodes
    if n != 3 or tuple(network.joint.axes[:2]) != (2, 2):
        return schemes
    f2 = network.functions[2]
    if f2 is None or network.functions[0] is not None \
            or network.functions[1] is not None:
        return schemes
    pair = network.joint.marginal((0, 1))
    tab = pair.table
    vals = f2.values.reshape(2, 2, -1)
    if vals.shape[2] != 1 or np.any(vals.min(axis=2) != vals.max(axis=2)):
        reduced = None
    else:
        reduced = FunctionTable((2, 2), f2.range_size,
                                vals[:, :, 0].reshape(-1))
    if reduced is None:
        return schemes
    is_xor = [int(v) for v in reduced.values.reshape(-1)] == [0, 1, 1, 0]
    symmetric = (abs(tab[0, 1] - tab[1, 0]) <= 1e-9
                 and abs(tab[0, 0] - tab[1, 1]) <= 1e-9)
    if (is_xor and symmetric and (0, 2) in network.edges
            and (1, 2) in network.edges):
        p = float(tab[0, 1] + tab[1, 0])
        if 0.0 < p < 1.0:
            schemes["modulo_sum"] = {
                _edge_name(j, k): rate
                for (j, k), rate in mt.modulo_sum_rates(p).items()}
    if (0, 1) in network.edges and (1, 2) in network.edges:
        schemes["relay"] = {
            _edge_name(j, k): rate
            for (j, k), rate in mt.relay_rates(pair, reduced).items()}
    return schemes


def _cmd_network(args):
    payload = _load_problem(args.input, "network")
    network = _parse_network(payload)
    cuts = _get(payload, "cuts", required=False, default="all")
    if cuts != "all":
        if not isinstance(cuts, list):
            _fail("problem field 'cuts' must be \"all\" or a list of cuts")
        cuts = [[int(v) - 1 for v in c] for c in cuts]
    extra = []
    for entry in _get(payload, "extra_cut_bounds", required=False,
                      default=[]):
        if (not isinstance(entry, dict) or "cut" not in entry
                or "bound" not in entry):
            _fail("problem field 'extra_cut_bounds' entries need 'cut' "
                  "and 'bound'")
        extra.append(([int(v) - 1 for v in entry["cut"]],
                      float(entry["bound"])))
    lp = mt.build_cutset_lp(network, cuts, extra)
    sol = mt.solve_lp(lp)
    if sol.status != "optimal":
        raise CapacityError("cut-set LP came back %s" % sol.status)
    rates = {name: float(v) for name, v in zip(
        (_edge_name(j, k) for j, k in network.edges), sol.x)}
    schemes = _detect_schemes(network)
    comparisons = {}
    for name, scheme in schemes.items():
        total = float(sum(scheme.values()))
        comparisons[name] = {"total": total,
                             "gap_to_lp": total - sol.optimum}
    results = {
        "lp": {"optimum": sol.optimum, "rates": rates},
        "schemes": schemes,
        "comparisons": comparisons,
    }
    return {"inputs": payload, "results": results,
            "notes": {"method": "cutset-lp"}}


def _row(name, value, expected=None, tol=None, bound=None):
    """One regression row; pass means |value - expected| <= tol, or
    value < bound for bound rows."""
    if bound is not None:
        ok = bool(value < bound)
    else:
        ok = bool(abs(value - expected) <= tol)
    return {"name": name, "value": float(value),
            "expected": None if expected is None else float(expected),
            "tolerance": tol, "bound": bound, "pass": ok}


def _example_rows(tol_override=None):
    from .info_core import product_function, constant_function

    def tol(default):
        return default if tol_override is None else tol_override

    h = binary_entropy
    rows = []
    rows.append(_row("and_fair_bits_two_messages",
                     float(sum(ra.two_message_rates(0.5, 0.5))),
                     1.5, tol(1e-5)))
    rows.append(_row("and_fair_bits_three_message_chain",
                     sr.and_three_message_rate(0.5), 1.405639, tol(1e-5)))
    closed = ra.closed_form_infinite_rate(0.5, 0.5)
    rows.append(_row("and_fair_bits_infinite_message_curve",
                     closed, 1.360674, tol(1e-5)))
    rows.append(_row("and_fair_bits_integral_vs_closed_form",
                     ra.integral_sum_rate(ra.optimal_curve(0.5, 0.5)),
                     closed, tol(1e-6)))
    rows.append(_row("and_fair_bits_lower_bound",
                     sr.infinite_message_lower_bound(0.5, 0.5),
                     1.311278, tol(1e-5)))
    f_and = FunctionTable((2, 2), 2, [0, 0, 0, 1])
    f_none = constant_function((2, 2))
    for p in (0.1, 0.3, 0.45):
        got = sr.min_sum_rate_bruteforce(dsbs(p), f_none, f_and, 1, "A")
        rows.append(_row("one_sided_and_exact_rate_p%02d" % round(100 * p),
                         got.achieved, h(p), tol(1e-9)))
    L, pz = 4, 0.1
    probs = np.outer(np.full(L, 1.0 / L), [1 - pz, pz]).reshape(-1)
    pmf_prod = JointPmf((L, 2), probs)
    f_prod = product_function(L)
    f_zero = constant_function((L, 2))
    one = sr.min_sum_rate_bruteforce(pmf_prod, f_zero, f_prod, 1, "A")
    two = sr.min_sum_rate_bruteforce(pmf_prod, f_zero, f_prod, 2, "B")
    rows.append(_row("product_times_bit_one_message", one.achieved,
                     np.log2(L), tol(1e-9)))
    rows.append(_row("product_times_bit_two_messages", two.achieved,
                     h(pz) + pz * np.log2(L), tol(1e-6)))
    grid = [i / 1000.0 for i in range(1, 500)]
    gaps = [1.5 * h(p) - sr.and_three_message_rate(p) for p in grid]
    k = int(np.argmax(gaps))
    rows.append(_row("three_message_gain_peak_crossover", grid[k],
                     1.0 / 3.0, tol(1e-2)))
    joint3 = JointPmf((2, 2, 1), dsbs(0.25).table.reshape(-1))
    fxor = FunctionTable((2, 2, 1), 2, [0, 1, 1, 0])
    net = mt.NetworkSpec(joint3, [(0, 2), (1, 2)], [None, None, fxor])
    sol = mt.solve_lp(mt.build_cutset_lp(net))
    rows.append(_row("xor_two_helpers_lp_p25", sol.optimum,
                     2 * h(0.25), tol(1e-7)))
    relay = mt.relay_rates(dsbs(0.25), f_and)
    rows.append(_row("relay_and_total_p25", float(sum(relay.values())),
                     h(0.25) + h(0.375), tol(1e-9)))
    third = 1.0 / 3.0
    relay_eq = mt.relay_rates(dsbs(third), f_and)
    rows.append(_row("relay_and_total_at_crossover",
                     float(sum(relay_eq.values())), 2 * h(third), tol(1e-9)))
    limit = mt.star_fair_bit_limit()
    for m in (3, 6, 64):
        rows.append(_row("star_and_fair_bits_m%02d" % m,
                         mt.star_and_total([0.5] * m), bound=limit))
    return rows


def _cmd_paper_examples(args):
    rows = _example_rows(args.tolerance)
    results = {"rows": rows,
               "all_pass": bool(all(r["pass"] for r in rows))}
    return {"inputs": {}, "results": results,
            "notes": {"method": "reference-table"}}


# ---------------------------------------------------------------------------
# entry point


def _parser():
    parser = argparse.ArgumentParser(
        prog="ifcomp",
        description="Rates and bounds for interactive function computation.")
    sub = parser.add_subparsers(dest="command")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        if name not in ("info", "paper-examples"):
            p.add_argument("--input", required=True,
                           help="problem file (JSON)")
        p.add_argument("--output", default=None,
                       help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--seed", type=int, default=None,
                       help="override the problem seed")
        p.add_argument("--tolerance", type=float, default=None,
                       help="numeric tolerance where one applies")
    return parser


_HANDLERS = {
    "info": _cmd_info,
    "analyze": _cmd_analyze,
    "sumrate": _cmd_sumrate,
    "allocate": _cmd_allocate,
    "network": _cmd_network,
    "paper-examples": _cmd_paper_examples,
}


def run(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    handler = _HANDLERS[args.command]
    started = time.perf_counter()
    try:
        body = handler(args)
    except DomainError as exc:
        print("ifcomp %s: %s" % (args.command, exc), file=sys.stderr)
        return 2
    except CapacityError as exc:
        print("ifcomp %s: %s" % (args.command, exc), file=sys.stderr)
        return 1
    wall = time.perf_counter() - started
    report = {"version": "1", "kind": args.command}
    report.update(body)
    _emit(report, args, wall)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
