"""Command-line front end.

    nestad eval EXPR [--at name=value]... [--wrt name | --grad n1,n2,...] [--second] [--json]

Exit status: 0 on success (NaN/Inf results included), 2 on syntax or usage
errors, 3 on unbound variables.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from .expr import ExprError, ParseError, UnboundVariableError, evaluate
from .expr import evaluate_gradient, evaluate_second, parse

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNBOUND = 3


class UsageError(Exception):
    pass


def render(x: float) -> str:
    """Shortest decimal that reads back as the same double."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return repr(float(x))


def _json_number(x: float):
    return x if math.isfinite(x) else render(x)


def parse_bindings(items: Sequence[str]) -> dict[str, float]:
    bindings: dict[str, float] = {}
    for item in items:
        name, sep, text = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(f"binding {item!r} is not of the form name=value")
        if name in bindings:
            raise UsageError(f"variable {name!r} bound more than once")
        try:
            bindings[name] = float(text)
        except ValueError:
            raise UsageError(f"binding {item!r}: {text!r} is not a number") from None
    return bindings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nestad",
        description="Evaluate expressions and their (nested) derivatives.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    ev = commands.add_parser("eval", help="evaluate an expression at a point")
    ev.add_argument("expression", help="expression text, e.g. 'x^2*cos(x)'")
    ev.add_argument(
        "--at",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="bind a variable (repeatable)",
    )
    mode = ev.add_mutually_exclusive_group()
    mode.add_argument("--wrt", metavar="NAME", help="differentiate with respect to NAME")
    mode.add_argument(
        "--grad", metavar="N1,N2,...", help="partial derivatives with respect to each name"
    )
    ev.add_argument(
        "--second", action="store_true", help="also print the second derivative (needs --wrt)"
    )
    ev.add_argument("--json", action="store_true", help="print one JSON object")
    return parser


def _compute(args: argparse.Namespace) -> dict:
    bindings = parse_bindings(args.at)
    if args.second and args.wrt is None:
        raise UsageError("--second requires --wrt")
    e = parse(args.expression)
    result: dict = {"derivatives": {}}
    if args.grad is not None:
        names = [n.strip() for n in args.grad.split(",")]
        if not all(names):
            raise UsageError(f"bad --grad list {args.grad!r}")
        if len(set(names)) != len(names):
            raise UsageError("--grad names a variable more than once")
        result["value"], result["derivatives"] = evaluate_gradient(e, bindings, names)
    elif args.second:
        value, first, second = evaluate_second(e, bindings, args.wrt)
        result["value"] = value
        result["derivatives"] = {args.wrt: first}
        result["second"] = second
    elif args.wrt is not None:
        value, first = evaluate(e, bindings, args.wrt)
        result["value"] = value
        result["derivatives"] = {args.wrt: first}
    else:
        result["value"], _ = evaluate(e, bindings)
    return result


def format_text(result: dict) -> str:
    lines = [f"value = {render(result['value'])}"]
    for name, d in result["derivatives"].items():
        lines.append(f"d/d{name} = {render(d)}")
    if "second" in result:
        (name,) = result["derivatives"]
        lines.append(f"d2/d{name}2 = {render(result['second'])}")
    return "\n".join(lines) + "\n"


def format_json(result: dict) -> str:
    out = {
        "value": _json_number(result["value"]),
        "derivatives": {k: _json_number(v) for k, v in result["derivatives"].items()},
    }
    if "second" in result:
        out["second"] = _json_number(result["second"])
    return json.dumps(out) + "\n"


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code or 0)
    try:
        result = _compute(args)
    except UsageError as exc:
        print(f"nestad: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"nestad: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnboundVariableError as exc:
        print(f"nestad: {exc}", file=sys.stderr)
        return EXIT_UNBOUND
    except ExprError as exc:
        print(f"nestad: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(format_json(result) if args.json else format_text(result))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
