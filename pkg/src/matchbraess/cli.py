"""Command-line front end.

Every command reads a JSON model file and prints one report. Exit status is
0 on success, 1 on a domain error and 2 on malformed input; errors are
printed to stderr as ``{"error": CODE, "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import lumping, oracle, paradox, parametric
from .errors import MalformedInput, MatchBraessError
from .model import (
    as_fraction,
    build_model,
    check_stability,
    load_model,
    model_to_json,
    parse_word,
    require_stable,
)
from .product_form import mean_items, normalization_constant, word_probability
from .report import exact_pair, format_decimal

FORMATS = ("json", "text", "csv")


class UsageError(MalformedInput):
    code = "USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------ arg helpers


def _edge(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise UsageError(f"edge must be given as i,j, got {text!r}")
    return tuple(parts)


def _share(text):
    """``3/200`` or, for an affine share, ``a:b``."""
    if ":" in text:
        a, b = text.split(":", 1)
        return (as_fraction(a), as_fraction(b))
    return as_fraction(text)


def _pair(text, what):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise UsageError(f"{what} must be two comma-separated values, got {text!r}")
    return parts


def _delta(args):
    return None if args.delta is None else as_fraction(args.delta)


def _need(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise UsageError(f"--{name} is required for {args.command}")


def _model(args):
    graph, spec = _load(args.model)
    return graph, spec, build_model(graph, spec, _delta(args))


def _load(path):
    try:
        return load_model(path)
    except MatchBraessError:
        raise
    except OSError as exc:
        raise MalformedInput(f"cannot read model file: {exc.strerror or exc}") from None
    except (TypeError, ValueError, AttributeError, RecursionError) as exc:
        raise MalformedInput(f"malformed model file: {exc}") from None


# --------------------------------------------------------------- commands


def cmd_validate(args):
    graph, spec = _load(args.model)
    delta = _delta(args)
    out = {
        "classes": list(graph.classes),
        "edges": [list(e) for e in graph.edge_list()],
        "connected": graph.connected,
        "bipartite": graph.bipartite,
        "affine": spec.is_affine,
    }
    if spec.is_affine and delta is None:
        parametric.require_stable_on_domain(graph, spec)
        out["stable_on_domain"] = True
    else:
        require_stable(build_model(graph, spec, delta))
        out["stable"] = True
    out["valid"] = True
    return out


def cmd_stability(args):
    _, _, model = _model(args)
    rep = check_stability(model)
    return {
        "stable": rep.stable,
        "violations": [
            {"set": list(s), "lhs": exact_pair(lhs, args.digits), "rhs": exact_pair(rhs, args.digits)}
            for s, lhs, rhs in rep.violations
        ],
    }


def cmd_mean(args):
    _, _, model = _model(args)
    return {
        "delta": None if model.delta is None else str(model.delta),
        "mean": exact_pair(mean_items(model), args.digits),
        "pi0": exact_pair(normalization_constant(model), args.digits),
    }


def cmd_pi(args):
    _need(args, "word")
    graph, _, model = _model(args)
    word = parse_word(args.word, graph)
    return {"word": list(word), "probability": exact_pair(word_probability(model, word), args.digits)}


def cmd_classify(args):
    _need(args, "add-edge")
    graph, spec = _load(args.model)
    i, j = args.add_edge
    return parametric.classify_edge_addition(graph, spec, i, j, args.allow_same_category).to_json()


def cmd_regions(args):
    _need(args, "add-edge")
    graph, spec = _load(args.model)
    i, j = args.add_edge
    width = as_fraction(args.width) if args.width is not None else Fraction(1, 10**6)
    cls = parametric.classify_edge_addition(graph, spec, i, j, args.allow_same_category)
    res = parametric.isolate_paradox_regions(graph, spec, i, j, width=width)
    return {
        "verdict": cls.verdict.value,
        "saturated": [list(s) for s in cls.saturated],
        "regions": [r.to_json() for r in res.regions],
        "roots": [r.to_json() for r in res.roots],
    }


def _gap_json(res, digits):
    return {
        "delta": None if res.delta is None else str(res.delta),
        "mean_before": exact_pair(res.mean_before, digits),
        "mean_after": exact_pair(res.mean_after, digits),
        "gap": exact_pair(res.gap, digits),
        "verdict": "paradox" if res.paradox else "no paradox",
    }


def cmd_paradox(args):
    _need(args, "add-edge")
    graph, spec = _load(args.model)
    i, j = args.add_edge
    return _gap_json(paradox.expectation_gap(graph, spec, i, j, _delta(args)), args.digits)


def cmd_scaled_gap(args):
    _need(args, "add-edge", "delta")
    graph, spec = _load(args.model)
    i, j = args.add_edge
    delta = _delta(args)
    return {"delta": str(delta), "scaled_gap": exact_pair(paradox.scaled_gap(graph, spec, i, j, delta), args.digits)}


def cmd_sweep(args):
    _need(args, "add-edge", "grid")
    graph, spec = _load(args.model)
    i, j = args.add_edge
    rows = paradox.sweep_gap(graph, spec, i, j, paradox.parse_grid(args.grid), workers=args.workers)
    if args.format == "csv":
        return paradox.sweep_to_csv(rows, args.digits)
    return {"rows": paradox.sweep_records(rows, args.digits)}


def cmd_simulate(args):
    _, _, model = _model(args)
    steps = 10**6 if args.steps is None else args.steps
    seed = 0 if args.seed is None else args.seed
    res = oracle.simulate(model, steps, seed, batches=args.batches)
    return {
        "mean_estimate": format_decimal(Fraction(res.mean_estimate), args.digits),
        "ci_halfwidth": format_decimal(Fraction(res.ci_halfwidth), args.digits),
        "steps": res.steps,
        "seed": res.seed,
        "alpha0_used": str(res.alpha0_used),
        "batches": res.batches,
        "warmup": res.warmup,
    }


def cmd_solve(args):
    _need(args, "max-len")
    _, _, model = _model(args)
    sol = oracle.truncated_stationary(model, args.max_len)

    def val(v):
        if v is None or v == float("inf"):
            return None
        return exact_pair(Fraction(v), args.digits) if sol.exact else format_decimal(Fraction(v), args.digits)

    return {
        "max_len": sol.max_len,
        "states": len(sol.probabilities),
        "exact": sol.exact,
        "mean_lower": val(sol.mean_bounds[0]),
        "mean_upper": val(sol.mean_bounds[1]),
        "mass_captured": val(sol.mass_captured),
        "tail_ratio": str(sol.tail_ratio),
        "lumped": {k: list(v) for k, v in sol.lumped.items()},
    }


def cmd_extend(args):
    _need(args, "split-node", "beta", "labels")
    graph, spec = _load(args.model)
    y, z = _pair(args.labels, "--labels")
    by, bz = (_share(s) for s in _pair(args.beta, "--beta"))
    plan = lumping.DecompositionPlan(args.split_node, y, z, by, bz)
    if args.add_edge is not None:
        i, j = args.add_edge
        ext = lumping.extend_preserving_paradox(graph, spec, i, j, plan, _delta(args))
        g2, s2 = ext.graph, ext.spec
    else:
        g2, s2 = lumping.decompose_spec(graph, spec, plan)
    return model_to_json(g2, s2)


COMMANDS = {
    "validate": cmd_validate,
    "stability": cmd_stability,
    "mean": cmd_mean,
    "pi": cmd_pi,
    "classify": cmd_classify,
    "regions": cmd_regions,
    "paradox": cmd_paradox,
    "sweep": cmd_sweep,
    "scaled-gap": cmd_scaled_gap,
    "simulate": cmd_simulate,
    "solve": cmd_solve,
    "extend": cmd_extend,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matchbraess", description="Exact analysis of FCFS matching models.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", required=True)
        p.add_argument("--delta")
        p.add_argument("--add-edge", type=_edge)
        p.add_argument("--grid")
        p.add_argument("--format", choices=FORMATS, default="json")
        p.add_argument("--seed", type=int)
        p.add_argument("--steps", type=int)
        p.add_argument("--batches", type=int, default=50)
        p.add_argument("--max-len", type=int)
        p.add_argument("--output")
        p.add_argument("--word")
        p.add_argument("--width")
        p.add_argument("--digits", type=int, default=12)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--allow-same-category", action="store_true")
        p.add_argument("--split-node")
        p.add_argument("--beta")
        p.add_argument("--labels")
    return parser


def _text(obj, indent=""):
    lines = []
    for key, value in obj.items():
        if isinstance(value, dict) and set(value) == {"exact", "decimal"}:
            lines.append(f"{indent}{key}: {value['exact']} ({value['decimal']})")
        elif isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text(value, indent + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            lines.extend(f"{indent}  - " + json.dumps(v, separators=(", ", ": ")) for v in value)
        else:
            lines.append(f"{indent}{key}: {json.dumps(value)}")
    return lines


def render(result, fmt: str) -> str:
    if isinstance(result, str):
        return result
    if fmt == "text":
        return "\n".join(_text(result)) + "\n"
    if fmt == "csv":
        raise UsageError("csv output is only available for sweep")
    return json.dumps(result, indent=2) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        if args.digits < 1:
            raise UsageError("--digits must be positive")
        text = render(COMMANDS[args.command](args), args.format)
        if args.output:
            try:
                with open(args.output, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise MalformedInput(f"cannot write output file: {exc.strerror or exc}") from None
        else:
            stdout.write(text)
        return 0
    except MatchBraessError as exc:
        stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 2 if isinstance(exc, MalformedInput) else 1


def main(argv=None) -> None:
    sys.exit(run(argv))
