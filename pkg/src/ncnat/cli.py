"""Command-line front end: ``ncnat <command> ...``.

Exit codes:

    0  success
    1  negative answer (``eq``: not equal, ``verify-chain``: invalid step)
    2  usage error
    3  malformed term, polynomial, site or chain file
    4  magnitude above the stratum budget
    5  file could not be read
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable

from . import __version__
from .arithmetic import factorize, is_irreducible, multiply, multiply_classes
from .config import configure, get_config
from .congruence import ClassId, are_equal, class_of, close_stratum, list_classes
from .errors import ParseError, SiteError, StratumBudgetError
from .qinv import eval_morphism, invariant_table, parse_spec
from .search import (
    find_collisions,
    flanked_candidates,
    read_chain,
    search_noncancel,
    verify_chain,
)
from .terms import (
    RewriteSite,
    apply_rewrite,
    catalan,
    encode,
    enumerate_stratum,
    parse,
    rewrite_sites,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_BUDGET = 4
EXIT_IO = 5


def _cls(c: ClassId) -> dict[str, Any]:
    return {"magnitude": c.n, "index": c.index, "rep": str(c.rep)}


class Result:
    """What a command produced: a JSON payload, its text rendering, an exit code."""

    def __init__(self, payload: dict, lines: list[str], code: int = EXIT_OK):
        self.payload = payload
        self.lines = lines
        self.code = code


def cmd_dseq(args) -> Result:
    rows = []
    for n in range(1, args.max + 1):
        rows.append({"n": n, "catalan": catalan(n), "classes": close_stratum(n).num_classes})
    lines = [f"{'n':>3} {'C(n)':>10} {'D(n)':>10}"]
    lines += [f"{r['n']:>3} {r['catalan']:>10} {r['classes']:>10}" for r in rows]
    return Result({"command": "dseq", "rows": rows}, lines)


def cmd_eq(args) -> Result:
    t1, t2 = parse(args.term1), parse(args.term2)
    equal = are_equal(t1, t2)
    payload = {"command": "eq", "term1": str(t1), "term2": str(t2), "equal": equal}
    return Result(payload, ["equal" if equal else "not equal"], EXIT_OK if equal else EXIT_NEGATIVE)


def cmd_mul(args) -> Result:
    a, b = parse(args.term1), parse(args.term2)
    product = multiply(a, b)
    payload = {"command": "mul", "product": str(product), "magnitude": product.magnitude}
    lines = [str(product)]
    if args.classes:
        cls = multiply_classes(class_of(a), class_of(b))
        payload["class"] = _cls(cls)
        lines.append(f"class {cls} rep {cls.rep}")
    return Result(payload, lines)


def cmd_invariant(args) -> Result:
    spec = parse_spec(args.spec)
    t = parse(args.term)
    value = eval_morphism(spec, t)
    payload = {
        "command": "invariant",
        "spec": str(spec),
        "term": str(t),
        "value": str(value),
        "coefficients": list(value.coeffs),
    }
    return Result(payload, [str(value)])


def cmd_table(args) -> Result:
    spec = parse_spec(args.spec)
    rows = [
        {"class_rep": str(c.rep), "value": str(v)}
        for c, v in invariant_table(spec, args.magnitude).items()
    ]
    lines = [f"{r['class_rep']}\t{r['value']}" for r in rows]
    return Result({"command": "table", "spec": str(spec), "rows": rows}, lines)


def cmd_enumerate(args) -> Result:
    n = args.magnitude
    if args.classes:
        classes = list_classes(n)
        rows = [dict(_cls(c), size=size) for c, size in classes]
        lines = [f"{c.index:>6} {size:>4} {c.rep}" for c, size in classes]
        return Result({"command": "enumerate", "magnitude": n, "classes": rows}, lines)
    terms = enumerate_stratum(n)
    rows = [{"term": str(t), "code": encode(t)} for t in terms]
    lines = [f"{r['code']} {r['term']}" for r in rows]
    return Result({"command": "enumerate", "magnitude": n, "terms": rows}, lines)


def cmd_class(args) -> Result:
    t = parse(args.term)
    c = class_of(t)
    stratum = close_stratum(t.magnitude)
    size = int(stratum.class_sizes[c.index - 1])
    payload = {"command": "class", "term": str(t), "class": dict(_cls(c), size=size)}
    return Result(payload, [f"class {c} size {size} rep {c.rep}"])


def cmd_rewrite(args) -> Result:
    t = parse(args.term)
    sites = [RewriteSite.parse(args.site)] if args.site is not None else rewrite_sites(t)
    rows = [{"site": s.path, "result": str(apply_rewrite(t, s))} for s in sites]
    lines = [f"{str(RewriteSite(r['site'])):<8} {r['result']}" for r in rows]
    return Result({"command": "rewrite", "term": str(t), "rewrites": rows}, lines)


def cmd_factor(args) -> Result:
    c = class_of(parse(args.term))
    facts = factorize(c)
    rows = [{"factors": [_cls(f) for f in fac.factors]} for fac in facts]
    payload = {
        "command": "factor",
        "class": _cls(c),
        "irreducible": is_irreducible(c),
        "factorizations": rows,
    }
    lines = [str(fac) for fac in facts]
    return Result(payload, lines)


def cmd_collisions(args) -> Result:
    spec = parse_spec(args.spec)
    pairs = find_collisions(spec, args.magnitude)
    rows = [[_cls(a), _cls(b)] for a, b in pairs]
    lines = [f"{a.rep}  ~?  {b.rep}" for a, b in pairs]
    return Result({"command": "collisions", "spec": str(spec), "pairs": rows}, lines)


def cmd_candidates(args) -> Result:
    pairs = flanked_candidates(args.max_inner)
    rows = [[str(a), str(b)] for a, b in pairs]
    lines = [f"{a}  ~?  {b}" for a, b in rows]
    return Result({"command": "candidates", "pairs": rows}, lines)


def cmd_search_noncancel(args) -> Result:
    spec = parse_spec(args.spec)
    found = search_noncancel(args.magnitude, args.multiplier_max, spec=spec)
    rows = [
        {"a": _cls(w.a), "b1": _cls(w.b1), "b2": _cls(w.b2), "product": _cls(w.product)}
        for w in found
    ]
    lines = [f"{w.a.rep} * {w.b1.rep} = {w.a.rep} * {w.b2.rep}" for w in found]
    return Result({"command": "search-noncancel", "witnesses": rows}, lines)


def cmd_verify_chain(args) -> Result:
    chain = read_chain(args.file)
    verdict = verify_chain(chain)
    rows = [
        {"step": s.index, "valid": s.valid, "site": None if s.site is None else s.site.path}
        for s in verdict.steps
    ]
    lines = [
        f"{s.index:>3} -> {s.index + 1:<3} "
        + (f"ok at {s.site}" if s.valid else "NOT a single rewrite")
        for s in verdict.steps
    ]
    lines.append("valid" if verdict.valid else f"invalid at step {verdict.first_failure}")
    payload = {
        "command": "verify-chain",
        "valid": verdict.valid,
        "first_failure": verdict.first_failure,
        "steps": rows,
    }
    return Result(payload, lines, EXIT_OK if verdict.valid else EXIT_NEGATIVE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncnat", description="Arithmetic in the free medial magma on one generator."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--n-max", type=int, help="largest magnitude that may be closed")
    parser.add_argument("--cache-dir", help="stratum cache directory (env NCNAT_CACHE_DIR)")
    parser.add_argument("--no-cache", action="store_true", help="do not read or write the disk cache")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        return p

    p = add("dseq", cmd_dseq, "term and class counts per magnitude")
    p.add_argument("--max", type=int, default=7)

    p = add("eq", cmd_eq, "decide equality of two terms")
    p.add_argument("term1")
    p.add_argument("term2")

    p = add("mul", cmd_mul, "grafting product")
    p.add_argument("term1")
    p.add_argument("term2")
    p.add_argument("--classes", action="store_true", help="also report the product class")

    p = add("invariant", cmd_invariant, "evaluate a q-deformation invariant")
    p.add_argument("term")
    p.add_argument("--spec", default="ell-a", help="ell, ell-a, or custom:<alpha>:<beta>")

    p = add("table", cmd_table, "invariant value of every class of one magnitude")
    p.add_argument("magnitude", type=int)
    p.add_argument("--spec", default="ell-a")

    p = add("enumerate", cmd_enumerate, "list terms or classes of one magnitude")
    p.add_argument("magnitude", type=int)
    p.add_argument("--classes", action="store_true")

    p = add("class", cmd_class, "class of a term")
    p.add_argument("term")

    p = add("rewrite", cmd_rewrite, "rewrite sites of a term and their images")
    p.add_argument("term")
    p.add_argument("--site", help="only this site, e.g. root or LR")

    p = add("factor", cmd_factor, "all factorizations into irreducibles")
    p.add_argument("term")

    p = add("collisions", cmd_collisions, "distinct classes sharing an invariant")
    p.add_argument("--magnitude", type=int, required=True)
    p.add_argument("--spec", default="ell-a")

    p = add("candidates", cmd_candidates, "colliding (1+a1)+(a2+1) terms")
    p.add_argument("--max-inner", type=int, default=4)

    p = add("search-noncancel", cmd_search_noncancel, "search non-cancellative products")
    p.add_argument("--magnitude", type=int, required=True)
    p.add_argument("--multiplier-max", type=int, default=2)
    p.add_argument("--spec", default="ell-a")

    p = add("verify-chain", cmd_verify_chain, "check a chain file step by step")
    p.add_argument("file")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    changes: dict[str, Any] = {"output": "json" if args.json else "text"}
    if args.n_max is not None:
        changes["n_max"] = args.n_max
    if args.cache_dir is not None:
        changes["cache_dir"] = args.cache_dir
    if args.no_cache:
        changes["use_disk_cache"] = False
    try:
        configure(**changes)
    except ValueError as exc:
        parser.error(str(exc))

    try:
        result = args.func(args)
    except (ParseError, SiteError) as exc:
        return _fail(args, "parse", str(exc), EXIT_PARSE)
    except StratumBudgetError as exc:
        return _fail(args, "budget", str(exc), EXIT_BUDGET)
    except OSError as exc:
        return _fail(args, "io", str(exc), EXIT_IO)

    if get_config().output == "json":
        print(json.dumps(result.payload, sort_keys=True))
    else:
        print("\n".join(result.lines))
    return result.code


def _fail(args, kind: str, message: str, code: int) -> int:
    if args.json:
        print(json.dumps({"command": args.command, "error": kind, "message": message}))
    else:
        print(f"ncnat: {kind} error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
