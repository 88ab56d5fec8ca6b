"""Command-line entry point: ``basilica <subcommand> ...`` or ``python -m basilica``.

Every subcommand builds a JSON-able payload with a top-level ``passed`` flag.
Exit status: 0 when all checks pass, 2 when a check fails, 3 for bad input,
4 when a resource limit is hit, 5 when numerical precision runs out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import BasilicaError, InputError
from .groups import closure as group_closure
from .groups import generator, order_formula, set_threads, sweep
from .groups.enumerate import THREADS_ENV
from .groups.kernels import MAX_PACKED_DEPTH
from .groups.predicates import GroupSelector
from .tree import TreeAut

EXIT_OK, EXIT_CHECK = 0, 2


# ---------------------------------------------------------------------------
# Output


def _dump(obj, indent: int = 0) -> str:
    """Canonical JSON: sorted keys, two-space indent, floats at 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _dump(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if hasattr(obj, "item"):  # numpy scalar
        return _dump(obj.item(), indent)
    return json.dumps(str(obj))


def dumps(payload) -> str:
    return _dump(payload) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], (dict, list, tuple)):
        for k, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{k}]")
    else:
        yield prefix, obj


def _scalar(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    text = _dump(v)
    return text[1:-1] if text.startswith('"') else text.replace("\n", "").replace("  ", " ")


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(payload)
    rows = payload.get("rows")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if rows:
            keys = list(rows[0])
            writer.writerow(keys)
            for row in rows:
                writer.writerow([_scalar(row.get(k)) for k in keys])
        else:
            writer.writerow(["key", "value"])
            for k, v in _flatten(payload):
                writer.writerow([k, _scalar(v)])
        return buf.getvalue()
    lines = []
    if rows:
        keys = list(rows[0])
        cells = [keys] + [[_scalar(r.get(k)) for k in keys] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(keys))]
        lines += ["  ".join(c.rjust(w) for c, w in zip(line, widths)) for line in cells]
        payload = {k: v for k, v in payload.items() if k != "rows"}
    lines += [f"{k}: {_scalar(v)}" for k, v in _flatten(payload)]
    return "\n".join(lines) + "\n"


def _timed(payload: dict, args, start: float) -> dict:
    if args.timings:
        payload["seconds"] = round(time.perf_counter() - start, 6)
    return payload


# ---------------------------------------------------------------------------
# Subcommands


def cmd_orders(args) -> dict:
    top = args.max_level
    if not 1 <= top <= 32:
        raise InputError("--max-level must be in 1..32")
    rows = []
    for n in range(1, top + 1):
        row = {
            "n": n,
            "e": order_formula(n, "e"),
            "b": order_formula(n, "b"),
            "m": order_formula(n, "m"),
            "aut": order_formula(n, "aut"),
            "pink": order_formula(n, "pink"),
        }
        if args.check and n <= MAX_PACKED_DEPTH:
            for key, sel in (("e", "E"), ("b", "B"), ("m", "M")):
                row[f"sweep_{key}"] = sweep(n, sel).log2
            row["check"] = "PASS" if all(row[f"sweep_{k}"] == row[k] for k in "ebm") and row["pink"] == row["b"] else "FAIL"
        elif args.check:
            row["check"] = "PASS" if row["pink"] == row["b"] else "FAIL"
        rows.append(row)
    return {"passed": all(r.get("check", "PASS") == "PASS" for r in rows), "rows": rows}


def cmd_sweep(args) -> dict:
    n = _depth(args)
    result = sweep(n, GroupSelector.parse(args.selector))
    payload = result.to_json(timing=args.timings)
    payload["log2"] = result.log2
    passed = True
    if args.check:
        which = {"M": "m", "B": "b", "E": "e", "FullAut": "aut"}.get(result.selector)
        if which is not None:
            payload["expected_log2"] = order_formula(n, which)
            passed = result.log2 == payload["expected_log2"]
    payload["passed"] = passed
    return payload


def _parse_generator(token: str, n: int) -> TreeAut:
    token = token.strip()
    if token.startswith("hex:"):
        g = TreeAut.fromhex(token[4:])
        if g.depth != n:
            raise InputError(f"portrait {token} has depth {g.depth}, expected {n}")
        return g
    return generator(token, n)


def cmd_closure(args) -> dict:
    n = _depth(args)
    tokens = [t for t in args.generators.split(",") if t.strip()]
    gens = [_parse_generator(t, n) for t in tokens]
    result = group_closure(gens, budget=args.budget, label=",".join(t.strip() for t in tokens))
    payload = result.to_json(timing=args.timings)
    payload["log2"] = result.log2
    passed = True
    if args.check:
        from .groups.verify import standard_sweep

        names = {t.strip().lower() for t in tokens}
        target = {frozenset({"alpha", "beta"}): "B", frozenset({"alpha", "beta", "epsilon", "theta"}): "M"}.get(frozenset(names))
        if target is None:
            raise InputError("--check compares only {alpha,beta} with B and {alpha,beta,epsilon,theta} with M")
        if n > MAX_PACKED_DEPTH:
            raise InputError(f"--check needs depth <= {MAX_PACKED_DEPTH}")
        pred = standard_sweep(n, target)
        passed = bool(np.array_equal(result.bitset, pred.bitset))
        payload["predicate"] = target
        payload["same_set"] = passed
    payload["passed"] = passed
    return payload


def cmd_frattini(args) -> dict:
    from .groups.verify import verify_frattini

    return verify_frattini(_depth(args, default=5)).to_json()


def cmd_preimage(args) -> dict:
    from . import preimage as pm

    n = _depth(args, default=9)
    if args.x0 is None:
        raise InputError("preimage needs --x0")
    x0 = pm.parse_complex(args.x0)
    tree = pm.build_tree(x0, n, args.seed, tol=args.tol, dps=args.dps)
    labeled = pm.canonical_label(tree)
    zeta = pm.max_zetaprod_residual(labeled)
    two = pm.twodown_residuals(labeled)
    nrel = [pm.verify_nrel(labeled, "", m, selection=args.seed)["max_residual"] for m in range((n - 1) // 2 + 1)]
    two_max = float(two.max()) if two.size else 0.0
    worst = max(zeta, two_max, *nrel)
    z = complex(labeled.root)
    payload = {
        "x0": [z.real, z.imag],
        "depth": n,
        "seed": args.seed,
        "tol": args.tol,
        "extended_dps": args.dps,
        "swaps": len(labeled.swaps),
        "max_zetaprod_residual": zeta,
        "max_2down_residual": two_max,
        "nrel_max_residual_by_m": nrel,
        "max_residual": worst,
        "relabel_swaps": len(pm.canonical_label(labeled).swaps),
        "passed": worst <= args.tol,
    }
    if args.export:
        payload["tree"] = labeled.to_json()
    return payload


def cmd_condition(args) -> dict:
    from . import rational

    if (args.x0 is None) == (args.scan is None):
        raise InputError("condition takes exactly one of --x0 or --scan")
    if args.x0 is not None:
        x0 = rational.to_rational(args.x0)
        subset = rational.degree_condition(x0)
        rank = rational.class_rank(x0)
        mirror = rational.degree_condition(-1 - x0)
        return {
            "x0": x0,
            "classes": [int(rational.square_class(g)) for g in rational.kummer_generators(x0)],
            "square_subsets": [list(s) for s in rational.square_subsets(x0)],
            "gf2_rank": rank,
            "degree": 1 << rank,
            "condition": subset,
            "oracles_agree": subset == (rank == 4),
            "symmetric": subset == mirror,
            "passed": subset == (rank == 4) and subset == mirror,
        }
    lo, hi = rational.parse_range(args.scan)
    found = rational.scan_range(lo, hi)
    mirror = sorted(-1 - x for x in rational.scan_range(-1 - hi, -1 - lo))
    return {
        "range": [lo, hi],
        "qualifying": found,
        "count": len(found),
        "symmetric": found == mirror,
        "passed": found == mirror,
    }


def cmd_verify_all(args) -> dict:
    """Every structural check at its default size, one line each."""
    from . import preimage as pm
    from . import rational
    from .groups import verify as v

    n = _depth(args, default=5)
    checks = {}
    for d in range(1, n + 1):
        checks[f"orders depth {d}"] = all(
            sweep(d, sel).log2 == order_formula(d, key) for sel, key in (("E", "e"), ("B", "b"), ("M", "m"))
        )
    checks["pink formula n=1..10"] = all(order_formula(k, "pink") == order_formula(k, "b") for k in range(1, 11))
    for d in range(1, n + 1):
        for which in ("B", "M"):
            checks[f"generation {which}_{d}"] = v.verify_generation(d, which, samples=100_000).passed
    checks[f"exact sequence depth {n}"] = v.verify_exact_sequence(n).passed
    for d in range(2, n + 1):
        checks[f"E index depth {d}"] = v.verify_inductEn(d).passed
    if n >= 5:
        checks[f"Frattini depth {n}"] = v.verify_frattini(n).passed
        checks[f"parity pattern on M_{n}"] = v.verify_parity_pattern_all(n).passed
    tree = pm.canonical_label(pm.build_tree(5, 9, args.seed, tol=args.tol))
    checks["preimage x0=5 depth 9"] = pm.max_zetaprod_residual(tree) <= args.tol
    checks["rational scan 1..23"] = rational.scan_range(1, 23) == [5, 6, 10, 11, 12, 13, 14, 19, 20, 21, 22, 23]
    rows = [{"check": k, "result": "PASS" if ok else "FAIL"} for k, ok in checks.items()]
    return {"passed": all(checks.values()), "rows": rows}


COMMANDS = {
    "orders": cmd_orders,
    "sweep": cmd_sweep,
    "closure": cmd_closure,
    "frattini": cmd_frattini,
    "preimage": cmd_preimage,
    "condition": cmd_condition,
    "verify-all": cmd_verify_all,
}


# ---------------------------------------------------------------------------


def _depth(args, default: int | None = None) -> int:
    n = args.depth if args.depth is not None else default
    if n is None:
        raise InputError(f"{args.command} needs --depth")
    if n < 1:
        raise InputError(f"depth must be positive, got {n}")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--depth", type=int)
    common.add_argument("--selector", default="M")
    common.add_argument("--x0")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--threads", type=int, help=f"default: ${THREADS_ENV} or all cores")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--check", action="store_true", help="compare against an independent oracle")
    common.add_argument("--timings", action="store_true", help="include wall-clock seconds (output no longer reproducible)")

    parser = _Parser(prog="basilica", description="Finite-level arithmetic basilica group checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("orders", parents=[common], help="order exponents per level")
    p.add_argument("--max-level", type=int, default=10)
    sub.add_parser("sweep", parents=[common], help="count portraits in a subgroup")
    p = sub.add_parser("closure", parents=[common], help="order of the subgroup generated by named or hex portraits")
    p.add_argument("--generators", default="alpha,beta,epsilon,theta")
    p.add_argument("--budget", type=int, default=1 << 26)
    sub.add_parser("frattini", parents=[common], help="Frattini subgroup report")
    p = sub.add_parser("preimage", parents=[common], help="labeled preimage tree residuals")
    p.add_argument("--dps", type=int, help="extended precision in decimal digits")
    p.add_argument("--export", action="store_true", help="include every node value")
    p = sub.add_parser("condition", parents=[common], help="degree-16 condition over Q")
    p.add_argument("--scan", help="integer range lo..hi")
    sub.add_parser("verify-all", parents=[common], help="every check at default size")
    return parser


def main(argv=None) -> int:
    out = sys.stdout
    try:
        args = build_parser().parse_args(argv)
        set_threads(args.threads)
        start = time.perf_counter()
        payload = _timed(COMMANDS[args.command](args), args, start)
    except BasilicaError as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}), end="", file=sys.stderr)
        return exc.exit_code
    out.write(render(payload, args.format))
    return EXIT_OK if payload.get("passed", True) else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
