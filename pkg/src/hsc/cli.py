"""Command-line front end: ``hsc {shift,entropy,loops,census,model,linking}``.

Inputs are JSON files checked against the schemas below; outputs are CSV
or JSON written to ``--out`` (stdout by default).  Exit status is 0 on
success, 1 for bad input and 2 for internal errors; failures print one
JSON object to stderr.
"""
from __future__ import annotations

import argparse
import bisect
import csv
import io
import json
import os
import sys
from pathlib import Path

import jsonschema

from . import __version__
from .census import census_chords, census_orbits, classes_json, counts_csv, growth_rate
from .linking import linking_matrix, linking_matrix_csv
from .model import AffineHorseshoeModel, build_model, intersection_pattern, periodic_orbit, verify_markov_type
from .selection import harvest_loops, verify_concatenations
from .shift import (TransitionGraph, canonical_necklace, count_necklaces, enumerate_loops, format_word,
                    is_transitive, spectral_decomposition, word)
from .spanning import spanning_entropy
from .suspension import CylinderFunction, RoofFunction
from .thermo import (abramov_entropy, entropy_lower_bound, measure_entropy, measure_from_json, pressure,
                     solve_weight_equation, weight_measure)

_number = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?\d+(/\d+|\.\d*)?([eE][-+]?\d+)?$"}]}

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["alphabet_size", "edges"],
    "properties": {
        "alphabet_size": {"type": "integer", "minimum": 1},
        "edges": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                             "minItems": 2, "maxItems": 2}},
    },
}
ROOF_SCHEMA = {
    "type": "object",
    "required": ["depth", "values"],
    "properties": {
        "depth": {"type": "integer", "minimum": 1},
        "alphabet_size": {"type": "integer", "minimum": 1},
        "values": {"type": "object", "patternProperties": {"^[A-Z]+$": _number}, "additionalProperties": False},
    },
}
MEASURE_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {"properties": {"kind": {"const": "bernoulli"},
                        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1}},
         "required": ["weights"]},
        {"properties": {"kind": {"const": "markov"},
                        "P": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                        "pi": {"type": "array", "items": {"type": "number"}}},
         "required": ["P"]},
    ],
}
MODEL_SCHEMA = {
    "type": "object",
    "required": ["L", "lambda", "roofs"],
    "properties": {
        "L": {"type": "integer", "minimum": 1},
        "lambda": _number,
        "roofs": {"type": "array", "items": _number},
        "offsets": {"type": "array", "items": _number},
        "strips": {"type": "array", "items": _number},
        "embedding": {"type": "object", "properties": {
            "R0": {"type": "number"}, "width": {"type": "number"}, "twist": {"type": "integer"},
            "branch_twists": {"type": "array", "items": {"type": "integer"}}},
            "additionalProperties": False},
    },
}


class UserError(Exception):
    def __init__(self, message: str, **info):
        super().__init__(message)
        self.info = info


def _load(path: str, schema: dict) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UserError(f"no such file: {path}", file=path)
    text = p.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise UserError(f"invalid JSON: {e.msg}", file=path, line=e.lineno, column=e.colno) from None
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(data))
    if err is not None:
        field = "/".join(str(x) for x in err.absolute_path)
        raise UserError(f"schema violation: {err.message}", file=path, field=field or "<root>",
                        line=_line_of(text, err.absolute_path))
    return data


def _line_of(text: str, path) -> int | None:
    """Line of the last key of ``path`` in the source, when it can be found."""
    keys = [k for k in path if isinstance(k, str)]
    if not keys:
        return None
    needle = json.dumps(keys[-1])
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UserError(f"expected a comma-separated list of numbers, got {text!r}", field=text) from None


def _grid(text: str) -> list[float]:
    """``"4:20"`` or ``"4:20:2"`` (inclusive) or a comma list."""
    if ":" in text:
        parts = [float(v) for v in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1.0
        out, t = [], lo
        while t <= hi + 1e-9:
            out.append(round(t, 12))
            t += step
        return out
    return _floats(text)


def _roof(args) -> RoofFunction:
    data = _load(args.roof, ROOF_SCHEMA)
    L = data.get("alphabet_size", getattr(args, "alphabet", None))
    try:
        base = CylinderFunction.from_json(data, alphabet_size=L)
        return RoofFunction(base.depth, base.alphabet_size, base.values)
    except (ValueError, TypeError) as e:
        raise UserError(str(e), file=args.roof, field="values") from None


def _model(args) -> AffineHorseshoeModel:
    if getattr(args, "model", None):
        return AffineHorseshoeModel.from_json(_load(args.model, MODEL_SCHEMA))
    return build_model(args.L, args.lam, _floats(args.roofs) if isinstance(args.roofs, str) else args.roofs)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_shift(args) -> None:
    g = TransitionGraph.from_json(_load(args.graph, GRAPH_SCHEMA))
    out = {"alphabet_size": g.alphabet_size, "edges": len(g.edges), "transitive": is_transitive(g)}
    if out["transitive"]:
        sd = spectral_decomposition(g)
        out["period"] = sd.period
        out["classes"] = [sorted(c) for c in sd.classes]
    if args.loops is not None:
        base, length = (int(v) for v in args.loops.split(","))
        out["loops"] = [format_word(w) for w in enumerate_loops(g, base, length)]
    if args.necklace:
        out["necklace"] = str(canonical_necklace(word(args.necklace)))
    if args.count:
        L, n = (int(v) for v in args.count.split(","))
        out["count_necklaces"] = count_necklaces(L, n)
    _emit(args, _json(out))


def cmd_entropy(args) -> None:
    if args.model or args.L:
        m = _model(args)
        res = spanning_entropy(m, args.T, _floats(args.eps), seed=args.seed, threads=args.threads,
                               max_buckets=args.buckets)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "estimate", "raw"])
        for r in res.rows:
            w.writerow([repr(r.epsilon), repr(r.estimate), repr(r.raw)])
        w.writerow(["0", repr(res.extrapolated), ""])
        _emit(args, buf.getvalue())
        return
    if args.roof_values:
        r = _floats(args.roof_values)
        h = solve_weight_equation(r)
        nu = weight_measure(r)
        out = {"h": h, "weights": list(nu.weights),
               "lower_bound": entropy_lower_bound(r, args.slack)}
        _emit(args, _json(out))
        return
    if args.measure:
        mu = measure_from_json(_load(args.measure, MEASURE_SCHEMA))
        out = {"entropy": measure_entropy(mu)}
        if args.roof:
            roof = _roof(args)
            out["abramov"] = abramov_entropy(mu, roof)
            out["pressure_minus_h_r"] = pressure(mu, roof.scaled(-out["abramov"]))
        _emit(args, _json(out))
        return
    raise UserError("entropy needs --model/--L, --roof-values or --measure")


def cmd_loops(args) -> None:
    g = TransitionGraph.from_json(_load(args.graph, GRAPH_SCHEMA))
    mu = measure_from_json(_load(args.measure, MEASURE_SCHEMA))
    args.alphabet = g.alphabet_size
    pot = _roof(args).scaled(-args.scale)
    h = harvest_loops(g, mu, pot, args.epsilon, args.length)
    out = h.to_json()
    if args.verify_depth:
        rep = verify_concatenations(h, pot, args.verify_depth, seed=args.seed)
        out["concatenations"] = {"ok": rep.ok, "mode": rep.mode, "checked": rep.checked,
                                 "max_depth": rep.max_depth}
    _emit(args, _json(out))


def cmd_census(args) -> None:
    args_roof = _roof(args)
    L = args.alphabet
    grid = _grid(args.grid) if args.grid else [args.T]
    if args.past or args.future:
        if not (args.past and args.future):
            raise UserError("--past and --future go together")
        extra = (canonical_necklace(word(args.past)), canonical_necklace(word(args.future)))
        fn = census_chords
    else:
        extra, fn = (), census_orbits
    T_max = max(grid + [args.T])
    classes = fn(args_roof, L, *extra, T_max)
    sizes = sorted(c.size for c in classes)
    counts = [bisect.bisect_right(sizes, T + 1e-12 * max(1.0, T)) for T in grid]
    _emit(args, counts_csv(grid, counts))
    if args.classes_out:
        Path(args.classes_out).write_text(classes_json(classes))
    if args.growth_out:
        if len(grid) < 4:
            raise UserError("--growth-out needs a grid of at least 4 points")
        est = growth_rate(fn, args_roof, L, grid, *extra)
        Path(args.growth_out).write_text(_json(est.to_json()))


def cmd_model(args) -> None:
    m = _model(args)
    out = m.to_json()
    out["markov_type"] = verify_markov_type(m)
    if args.orbit:
        o = periodic_orbit(m, word(args.orbit), args.samples)
        pat = intersection_pattern(m, o)
        out["orbit"] = {"label": str(o.label), "period": str(o.period), "hits": pat.count,
                        "sequence": format_word([s for s in pat.sequence if s >= 0]),
                        "closure_error": o.closure_error}
        if args.orbit_csv:
            Path(args.orbit_csv).write_text(o.to_csv())
    _emit(args, _json(out))


def cmd_linking(args) -> None:
    m = _model(args)
    labels = [s.strip() for s in args.orbits.split(",") if s.strip()]
    if len(labels) < 2:
        raise UserError("--orbits needs at least two labels")
    curves = [periodic_orbit(m, word(s), args.samples) for s in labels]
    M = linking_matrix(curves, seed=args.seed)
    _emit(args, linking_matrix_csv(M, labels))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hsc {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $HSC_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("shift", parents=[common], help="graph properties and loops")
    s.add_argument("--graph", required=True)
    s.add_argument("--loops", metavar="BASE,LENGTH")
    s.add_argument("--necklace", metavar="WORD")
    s.add_argument("--count", metavar="L,N")
    s.set_defaults(func=cmd_shift)

    def model_args(q):
        q.add_argument("--model", help="model JSON")
        q.add_argument("--L", type=int)
        q.add_argument("--lambda", dest="lam", default="1/5")
        q.add_argument("--roofs", default=None)

    e = sub.add_parser("entropy", parents=[common], help="spanning entropy, weight equation, measures")
    model_args(e)
    e.add_argument("--T", type=float, default=20.0)
    e.add_argument("--eps", default="0.25,0.18,0.12")
    e.add_argument("--buckets", type=int, default=64)
    e.add_argument("--roof-values")
    e.add_argument("--slack", type=float, default=0.0)
    e.add_argument("--measure")
    e.add_argument("--roof")
    e.set_defaults(func=cmd_entropy)

    lo = sub.add_parser("loops", parents=[common], help="harvest loops with typical Birkhoff sums")
    lo.add_argument("--graph", required=True)
    lo.add_argument("--measure", required=True)
    lo.add_argument("--roof", required=True, help="cylinder function r; the potential is -scale * r")
    lo.add_argument("--scale", type=float, default=1.0)
    lo.add_argument("--epsilon", type=float, required=True)
    lo.add_argument("--length", type=int, required=True)
    lo.add_argument("--verify-depth", type=int, default=0)
    lo.set_defaults(func=cmd_loops)

    c = sub.add_parser("census", parents=[common], help="orbit or chord census N(T)")
    c.add_argument("--alphabet", type=int, required=True)
    c.add_argument("--roof", required=True)
    c.add_argument("--T", type=float, required=True)
    c.add_argument("--grid", help="T values, 'lo:hi[:step]' or a comma list")
    c.add_argument("--past")
    c.add_argument("--future")
    c.add_argument("--classes-out")
    c.add_argument("--growth-out")
    c.set_defaults(func=cmd_census)

    mo = sub.add_parser("model", parents=[common], help="build and check the affine model")
    model_args(mo)
    mo.add_argument("--orbit", metavar="WORD")
    mo.add_argument("--orbit-csv")
    mo.add_argument("--samples", type=int, default=64)
    mo.set_defaults(func=cmd_model)

    li = sub.add_parser("linking", parents=[common], help="linking matrix of periodic orbits")
    model_args(li)
    li.add_argument("--orbits", required=True, metavar="W1,W2,...")
    li.add_argument("--samples", type=int, default=64)
    li.set_defaults(func=cmd_linking)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        try:
            args.threads = int(os.environ.get("HSC_THREADS", "1"))
        except ValueError:
            args.threads = 1
    args.threads = max(1, args.threads)
    if getattr(args, "L", None) and getattr(args, "roofs", None) is None:
        args.roofs = ",".join(["1"] * args.L)
    try:
        args.func(args)
    except UserError as e:
        sys.stderr.write(json.dumps({"error": "user", "message": str(e), **e.info}) + "\n")
        return 1
    except (ValueError, KeyError) as e:
        sys.stderr.write(json.dumps({"error": "user", "type": type(e).__name__, "message": str(e)}) + "\n")
        return 1
    except Exception as e:  # pragma: no cover - reported, not hidden
        sys.stderr.write(json.dumps({"error": "internal", "type": type(e).__name__, "message": str(e)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
