"""Command-line front end: ``dyadic-hilbert {symbol,table,selfcheck}``.

Exit codes: 0 success, 1 usage or input error, 2 path disagreement,
3 precision failure.
"""

import argparse
import json
import sys

from .harness import format_report, run_selfcheck
from .knfield import NotPrincipalUnit, kn_ctx, lift_unit
from .scaled import IntegralityError, PrecisionError
from .series import WindowError
from .symbol import Params, get_engine, hilbert_symbol, symbol_via_cup

EXIT_OK, EXIT_USAGE, EXIT_DISAGREE, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ParseError(UsageError):
    def __init__(self, msg, src, pos):
        super().__init__(f"{msg} at position {pos}: {src!r}")
        self.pos = pos


# -- element expressions ------------------------------------------------------

def _tokens(src):
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            yield ("int", int(src[i:j]), i)
            i = j
        elif c in "tw+-*^()":
            yield (c, c, i)
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", src, i)
    yield ("end", None, len(src))


class _Parser:
    """expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
    factor := atom ('^' uint)?; atom := int | 't' | 'w' | '(' expr ')'.
    A single leading '-' is also accepted."""

    def __init__(self, src, ctx):
        self.src = src
        self.ctx = ctx
        self.toks = list(_tokens(src))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            raise ParseError(f"expected {want}", self.src, tok[2])
        self.i += 1
        return tok

    def expr(self):
        neg = False
        if self.peek()[0] == "-":
            self.take()
            neg = True
        val = self.term()
        if neg:
            val = -val
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while self.peek()[0] == "*":
            self.take()
            val = val * self.factor()
        return val

    def factor(self):
        val = self.atom()
        if self.peek()[0] == "^":
            self.take()
            k = self.take("int")[1]
            val = val ** k
        return val

    def atom(self):
        kind, v, pos = self.peek()
        if kind == "int":
            self.take()
            return self.ctx.const(v)
        if kind == "t":
            self.take()
            return self.ctx.pibar()
        if kind == "w":
            if self.ctx.d == 1:
                raise ParseError("'w' needs d > 1", self.src, pos)
            self.take()
            return self.ctx.w()
        if kind == "(":
            self.take()
            val = self.expr()
            self.take(")")
            return val
        raise ParseError("expected a number, 't', 'w' or '('", self.src, pos)

    def parse(self):
        val = self.expr()
        self.take("end")
        return val


def parse_element(src, ctx):
    """Evaluate an element expression in K_n (t = zeta - 1, w generates O_K)."""
    return _Parser(src, ctx).parse()


# -- output helpers ------------------------------------------------------------

def _coeff_json(c):
    return list(c.coords) if len(c.coords) > 1 else c.coords[0]


def _series_json(f):
    return {str(e): _coeff_json(c) for e, c in sorted(f.coeffs().items())}


def _series_text(f):
    parts = []
    for e, c in sorted(f.coeffs().items()):
        coef = _coeff_json(c)
        parts.append(f"{coef}" if e == 0 else f"{coef}*T^{e}")
    return " + ".join(parts) or "0"


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _params(args, recheck=True):
    try:
        kw = {"recheck": recheck}
        if args.guard is not None:
            kw["G"] = args.guard
        return Params(args.d, args.n, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_input(src, params, label):
    ctx = kn_ctx(params.d, params.n, params.M)
    try:
        return parse_element(src, ctx)
    except ParseError as exc:
        raise UsageError(f"--{label}: {exc}") from None


# -- commands ------------------------------------------------------------------

def cmd_symbol(args):
    P = _params(args)
    x = _parse_input(args.x, P, "x")
    y = _parse_input(args.y, P, "y")
    out = {"symbol": None, "modulus": P.modulus, "n": P.n, "d": P.d,
           "guard_consumed": None, "paths_agreed": None, "seed": None}
    status = EXIT_OK
    if args.paths == "cup":
        r = symbol_via_cup(x, y, P, check=False)
    else:
        r = hilbert_symbol(x, y, P)
    out["symbol"] = r.value
    out["guard_consumed"] = r.certificate.guard_consumed
    if args.paths == "both":
        cup = symbol_via_cup(x, y, P, check=False)
        out["symbol_cup"] = cup.value
        out["paths_agreed"] = cup.value == r.value
        if not out["paths_agreed"]:
            status = EXIT_DISAGREE
    if args.lift_out:
        sctx = get_engine(P).sctx
        f, g = lift_unit(x, sctx), lift_unit(y, sctx)
        out["lifts"] = {"f": _series_json(f), "g": _series_json(g)}
    if args.emit == "json":
        print(json.dumps(out, sort_keys=False))
    else:
        print(f"[x, y] = {out['symbol']} mod {P.modulus}")
        if args.paths == "both":
            print(f"cup path = {out['symbol_cup']}")
            print(f"paths agree: {'yes' if out['paths_agreed'] else 'NO'}")
        print(f"guard consumed: {out['guard_consumed']} of {P.G} bits")
        if args.lift_out:
            print(f"f = {_series_text(f)}")
            print(f"g = {_series_text(g)}")
    if status == EXIT_DISAGREE:
        print("error: closed formula and cup product disagree", file=sys.stderr)
    return status


def cmd_table(args):
    P = _params(args)
    srcs = [s.strip() for s in args.gens.split(",")] if args.gens.strip() else []
    if not srcs or any(not s for s in srcs):
        raise UsageError("--gens needs at least one non-empty expression")
    gens = [_parse_input(s, P, "gens") for s in srcs]
    rows = []
    status = EXIT_OK
    for a in gens:
        row = []
        for b in gens:
            r = hilbert_symbol(a, b, P, cross_check=args.paths == "both")
            if r.certificate.paths_agreed is False:
                status = EXIT_DISAGREE
            row.append(r.value)
        rows.append(row)
    if args.emit == "json":
        print(json.dumps({"gens": srcs, "modulus": P.modulus, "n": P.n, "d": P.d, "table": rows}))
    else:
        width = max(len(s) for s in srcs)
        cell = max(2, len(str(P.modulus - 1)))
        for s, row in zip(srcs, rows):
            print(f"{s:>{width}} | " + " ".join(f"{v:>{cell}}" for v in row))
    if status == EXIT_DISAGREE:
        print("error: closed formula and cup product disagree", file=sys.stderr)
    return status


def cmd_selfcheck(args):
    results = run_selfcheck(args.level, args.seed)
    if args.emit == "json":
        print(json.dumps({
            "level": args.level, "seed": args.seed,
            "suites": [{"name": r.name, "criterion": r.criterion or None, "checked": r.checked,
                        "failures": r.failures, "passed": r.passed} for r in results],
        }))
    else:
        print(format_report(results, args.level, args.seed))
    return EXIT_OK if all(r.passed for r in results) else EXIT_DISAGREE


def _uint64(s):
    try:
        v = int(s, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser():
    p = _ArgParser(prog="dyadic-hilbert", description="2^n-th Hilbert symbols over unramified extensions of Q_2")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_ArgParser)

    def field_args(sp):
        sp.add_argument("--n", type=int, required=True, help="level: the symbol is computed mod 2^n")
        sp.add_argument("--d", type=int, required=True, help="degree of K over Q_2")
        sp.add_argument("--guard", type=int, default=None, help="guard bits (default 16)")
        sp.add_argument("--emit", choices=("json", "text"), default="text")

    s = sub.add_parser("symbol", help="compute [x, y] mod 2^n")
    field_args(s)
    s.add_argument("--x", required=True, help="expression in t = zeta - 1 and w")
    s.add_argument("--y", required=True)
    s.add_argument("--paths", choices=("main", "cup", "both"), default="main")
    s.add_argument("--lift-out", action="store_true", help="also print the lifts f, g")
    s.set_defaults(func=cmd_symbol)

    t = sub.add_parser("table", help="matrix of symbols over a list of generators")
    field_args(t)
    t.add_argument("--gens", required=True, help="comma-separated expressions")
    t.add_argument("--paths", choices=("main", "both"), default="main")
    t.set_defaults(func=cmd_table)

    c = sub.add_parser("selfcheck", help="run the seeded invariant suites")
    c.add_argument("--level", choices=("fast", "full"), default="fast")
    c.add_argument("--seed", type=_uint64, default=1)
    c.add_argument("--emit", choices=("json", "text"), default="text")
    c.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotPrincipalUnit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, IntegralityError, WindowError) as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
