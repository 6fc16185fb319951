"""Command-line interface.

Subcommands
-----------
analyze P Q      components and genera of P(x) - Q(y) = 0, and whether
                 P(f) = Q(g) has non-constant meromorphic solutions
self P           the curve P(x) - P(y) = 0 with the diagonal x = y split off
uniqueness P     strong-uniqueness verdict: is f = g forced (with c = 1)
                 whenever P(f) = c P(g) for meromorphic f, g and a scalar c
sweep KIND       randomized batches (pair genus checks / uniqueness verdicts)
monodromy P [Q]  loop system and permutations, with an optional point dump

Expressions use the variable z, integer and Gaussian-integer constants (the
imaginary unit is i), and the operators + - * / ^ where ^ takes an integer
exponent: "z^3 - 3*z", "(z^2 + 1)/z", "(z - i)^2 / (2*z + 3)".

Exit status: 0 on success, 1 for invalid input (including expression syntax
errors), 2 when the numeric pipeline fails even at the top of the precision
ladder.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import __version__
from .decide import (
    AnalysisOptions,
    AnalysisReport,
    SelfAnalysisReport,
    SweepReport,
    UniquenessReport,
    analyze_pair,
    analyze_self,
    generic_sweep,
    strong_uniqueness,
    uniqueness_sweep,
)
from .errors import InputError, NumericFailure, ParseError
from .gaussian import GaussianRational
from .monodromy import TrackOptions, compute_branch_data
from .numeric import PRECISION_LADDER, NumericContext
from .poly import Polynomial
from .ratfunc import CycleType, RationalFunction, SpherePoint


# ---------------------------------------------------------------------------
# expression parser
# ---------------------------------------------------------------------------

_ATOM_EXPECTED = "a number, 'z', 'i', '-', or '('"


class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind: str, text: str, offset: int):
        self.kind = kind
        self.text = text
        self.offset = offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            tokens.append(_Token("int", text[start:pos], start))
            continue
        if ch in ("z", "i") or ch in "+-*/^()":
            tokens.append(_Token(ch, ch, pos))
            pos += 1
            continue
        raise ParseError(pos, "a digit, 'z', 'i', an operator, or parentheses")
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent for  expr := term (('+'|'-') term)*  with the usual
    precedence chain ^ above unary minus above '*'/'/' above '+'/'-'."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> _Token:
        return self.tokens[self.pos]

    def _take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> RationalFunction:
        out = self._expr()
        tail = self._peek()
        if tail.kind != "end":
            raise ParseError(tail.offset, "an operator or end of expression")
        return out

    def _expr(self) -> RationalFunction:
        out = self._term()
        while self._peek().kind in ("+", "-"):
            if self._take().kind == "+":
                out = out + self._term()
            else:
                out = out - self._term()
        return out

    def _term(self) -> RationalFunction:
        out = self._unary()
        while self._peek().kind in ("*", "/"):
            if self._take().kind == "*":
                out = out * self._unary()
            else:
                out = out / self._unary()
        return out

    def _unary(self) -> RationalFunction:
        if self._peek().kind == "-":
            self._take()
            return -self._unary()
        return self._power()

    def _power(self) -> RationalFunction:
        base = self._atom()
        if self._peek().kind != "^":
            return base
        self._take()
        sign = 1
        if self._peek().kind in ("+", "-"):
            if self._take().kind == "-":
                sign = -1
        tok = self._peek()
        if tok.kind != "int":
            raise ParseError(tok.offset, "an integer exponent")
        self._take()
        return base ** (sign * int(tok.text))

    def _atom(self) -> RationalFunction:
        tok = self._take()
        if tok.kind == "int":
            return RationalFunction.constant(GaussianRational(int(tok.text)))
        if tok.kind == "z":
            return RationalFunction.variable()
        if tok.kind == "i":
            return RationalFunction.constant(GaussianRational(0, 1))
        if tok.kind == "(":
            inner = self._expr()
            closing = self._take()
            if closing.kind != ")":
                raise ParseError(closing.offset, "')'")
            return inner
        raise ParseError(tok.offset, _ATOM_EXPECTED)


def parse_function(text: str) -> RationalFunction:
    """Parse an expression in z into an exact rational function."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# plain-text formatting
# ---------------------------------------------------------------------------


def _coeff_text(c) -> str:
    if isinstance(c, GaussianRational):
        s = str(c)
        return f"({s})" if ("+" in s[1:] or "-" in s[1:]) else s
    z = complex(c)
    if z.imag == 0.0:
        return f"{z.real:.6g}"
    return f"({z.real:.6g}{z.imag:+.6g}i)"


def _poly_text(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if not c:
            continue
        if k == 0:
            terms.append(_coeff_text(c))
        else:
            power = "z" if k == 1 else f"z^{k}"
            one = c == GaussianRational(1) if isinstance(c, GaussianRational) else complex(c) == 1
            terms.append(power if one else f"{_coeff_text(c)}*{power}")
    return " + ".join(terms)


def function_text(f: RationalFunction) -> str:
    """Human-readable form used in sweep listings and reports."""
    num = _poly_text(f.num)
    if f.den.is_constant():
        return num
    return f"({num}) / ({_poly_text(f.den)})"


def _point_text(pt: SpherePoint) -> str:
    if pt.infinite:
        return "inf"
    if pt.is_exact:
        return str(pt.value)
    z = pt.to_complex()
    if abs(z.imag) < 1e-12 * max(1.0, abs(z.real)):
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _cycle_text(t: Optional[CycleType]) -> str:
    if t is None:
        return "regular"
    return "(" + ",".join(str(k) for k in t.parts) + ")"


def _perm_text(images) -> str:
    cycles = [c for c in images.cycles() if len(c) > 1]
    if not cycles:
        return "id"
    return "".join("(" + " ".join(str(j) for j in c) + ")" for c in cycles)


# ---------------------------------------------------------------------------
# JSON rendering (fixed key order so identical runs are byte-identical)
# ---------------------------------------------------------------------------


def _value_json(pt: SpherePoint):
    if pt.infinite:
        return "inf"
    z = pt.to_complex()
    return [z.real, z.imag]


def _cycle_json(t: Optional[CycleType]):
    return None if t is None else list(t.parts)


def _branch_json(rows) -> dict:
    return {
        "values": [
            {
                "value": _value_json(r.value),
                "cycle_p": _cycle_json(r.p_type),
                "cycle_q": _cycle_json(r.q_type),
            }
            for r in rows
        ]
    }


def _components_json(components) -> list:
    return [
        {"size": c.size, "genus": c.genus, "e_counts": list(c.cycle_counts)}
        for c in components
    ]


def _criteria_json(criteria) -> list:
    return [
        {"id": v.id, "conclusion": v.conclusion if v.applies else None}
        for v in criteria
    ]


def _meta_json(precision: int, seed: int) -> dict:
    return {"precision": precision, "seed": seed, "version": __version__}


def pair_report_json(rep: AnalysisReport, p_text: str, q_text: str) -> dict:
    return {
        "inputs": {"p": p_text, "q": q_text},
        "branch": _branch_json(rep.branch_values),
        "components": _components_json(rep.components),
        "criteria": _criteria_json(rep.criteria),
        "verdict": {"solutions": rep.has_solutions},
        "meta": _meta_json(rep.precision_used, rep.seed),
    }


def self_report_json(rep: SelfAnalysisReport, p_text: str) -> dict:
    # the full curve decomposes as the diagonal plus the quotient components;
    # the verdict ignores the diagonal (f = g is always a solution)
    components = ([rep.diagonal] if rep.diagonal is not None else []) + list(rep.quotient)
    return {
        "inputs": {"p": p_text, "q": p_text},
        "branch": _branch_json(rep.branch_values),
        "components": _components_json(components),
        "criteria": _criteria_json(rep.criteria),
        "verdict": {"solutions": rep.has_offdiagonal_solutions},
        "meta": _meta_json(rep.precision_used, rep.seed),
    }


def uniqueness_report_json(rep: UniquenessReport, p_text: str) -> dict:
    base = rep.base
    components = ([base.diagonal] if base.diagonal is not None else []) + list(base.quotient)
    return {
        "inputs": {"p": p_text, "q": None},
        "branch": _branch_json(base.branch_values),
        "components": _components_json(components),
        "criteria": _criteria_json(base.criteria),
        "verdict": {"strong_uniqueness": rep.strong_uniqueness},
        "meta": _meta_json(base.precision_used, base.seed),
    }


def sweep_report_json(rep: SweepReport, kind: str, args_dict: dict) -> dict:
    trials = []
    for t in rep.trials:
        row = {
            "p": function_text(t.p),
            "q": function_text(t.q) if t.q is not None else None,
            "ok": t.ok,
        }
        if isinstance(t.report, (AnalysisReport, SelfAnalysisReport)):
            row["genera"] = list(t.report.genera)
        elif isinstance(t.report, UniquenessReport):
            row["strong_uniqueness"] = t.report.strong_uniqueness
        trials.append(row)
    return {
        "sweep": {"kind": kind, **args_dict, "successes": rep.successes, "trials": trials},
        "meta": _meta_json(args_dict.get("precision", 53), args_dict.get("seed", 0)),
    }


def _emit(text_lines: list[str], json_obj: dict, args) -> None:
    """Default output is the JSON report on stdout; --json PATH moves it to a
    file (with the human-readable summary on stdout), --human asks for the
    summary instead of JSON."""
    payload = json.dumps(json_obj, indent=2) + "\n"
    json_path = args.json
    human = getattr(args, "human", False)
    if json_path == "-":
        sys.stdout.write(payload)
        return
    if json_path is not None:
        with open(json_path, "w") as fh:
            fh.write(payload)
        human = True
    if human:
        for line in text_lines:
            print(line)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# per-command text reports
# ---------------------------------------------------------------------------


def _branch_lines(rows, p_label: str = "P", q_label: str = "Q") -> list[str]:
    out = [f"branch values ({len(rows)}):"]
    for r in rows:
        out.append(
            f"  {_point_text(r.value):>14}   {p_label}: {_cycle_text(r.p_type):<12}"
            f" {q_label}: {_cycle_text(r.q_type)}"
        )
    return out


def _criteria_lines(criteria) -> list[str]:
    if not criteria:
        return []
    out = ["criteria:"]
    for v in criteria:
        status = v.conclusion if v.applies else "does not apply"
        out.append(f"  {v.id}: {status}")
    return out


def _component_lines(components, header: str) -> list[str]:
    out = [header]
    for c in components:
        counts = ", ".join(str(k) for k in c.cycle_counts)
        out.append(f"  size {c.size:>4}   genus {c.genus:>3}   cycles per value: [{counts}]")
    return out


def _run_analyze(args) -> int:
    p = parse_function(args.p)
    q = parse_function(args.q)
    rep = analyze_pair(p, q, _options(args))
    lines = [
        f"curve P(x) - Q(y) = 0 with deg P = {rep.n}, deg Q = {rep.m}",
        f"  P = {args.p}",
        f"  Q = {args.q}",
    ]
    lines += _branch_lines(rep.branch_values)
    lines += _criteria_lines(rep.criteria)
    lines += _component_lines(rep.components, f"components ({len(rep.components)}):")
    lines.append(
        "monodromy: "
        + (f"tracked at {rep.precision_used} bits" if rep.used_monodromy else "not needed (criteria decisive)")
    )
    verdict = "exist" if rep.has_solutions else "do not exist"
    lines.append(f"verdict: non-constant meromorphic solutions of P(f) = Q(g) {verdict}")
    _emit(lines, pair_report_json(rep, args.p, args.q), args)
    return 0


def _run_self(args) -> int:
    p = parse_function(args.p)
    rep = analyze_self(p, _options(args))
    lines = [
        f"curve P(x) - P(y) = 0 with deg P = {rep.n}",
        f"  P = {args.p}",
    ]
    lines += _branch_lines(rep.branch_values, "P", "P")
    lines += _criteria_lines(rep.criteria)
    if rep.diagonal is not None:
        lines.append(f"diagonal x = y: size {rep.diagonal.size}, genus {rep.diagonal.genus}")
    lines += _component_lines(rep.quotient, f"off-diagonal components ({len(rep.quotient)}):")
    lines.append(
        "monodromy: "
        + (f"tracked at {rep.precision_used} bits" if rep.used_monodromy else "not needed (criteria decisive)")
    )
    verdict = "exist" if rep.has_offdiagonal_solutions else "do not exist"
    lines.append(f"verdict: solutions of P(f) = P(g) with f != g {verdict}")
    _emit(lines, self_report_json(rep, args.p), args)
    return 0


def _run_uniqueness(args) -> int:
    p = parse_function(args.p)
    rep = strong_uniqueness(p, _options(args))
    lines = [
        f"strong uniqueness analysis for P = {args.p} (degree {rep.base.n})",
        f"base curve P(x) - P(y) = 0: off-diagonal genera {list(rep.base.genera)}",
    ]
    if rep.always_shared:
        lines.append("critical value 0 or inf: every scaled copy shares a critical value")
    lines.append(f"special scalars (ratios of critical values): {len(rep.special)}")
    for c, sub in rep.special:
        lines.append(
            f"  c = {c.real:.6g}{c.imag:+.6g}i: genera {list(sub.genera)}"
            + ("  (solutions!)" if sub.has_solutions else "")
        )
    g = rep.generic_scalar
    lines.append(f"generic scalar c = {g.real:.6g}{g.imag:+.6g}i: genera {list(rep.generic.genera)}")
    lines.append(
        "verdict: P IS a strong uniqueness function"
        if rep.strong_uniqueness
        else "verdict: P is NOT a strong uniqueness function"
    )
    _emit(lines, uniqueness_report_json(rep, args.p), args)
    return 0


def _run_sweep(args) -> int:
    opts = _options(args)
    if not args.uniqueness:
        if args.m is None:
            raise InputError("a pair sweep needs both --n and --m degrees")
        rep = generic_sweep(args.n, args.m, args.trials, opts)
        kind = "pair"
        meta = {"n": args.n, "m": args.m, "trials": args.trials,
                "precision": opts.precision, "seed": opts.seed}
        lines = [f"pair sweep: degree {args.n} vs {args.m}, {args.trials} trials"]
        for k, t in enumerate(rep.trials):
            lines.append(
                f"  trial {k}: genera {list(t.report.genera)} "
                + ("ok" if t.ok else "UNEXPECTED")
            )
        lines.append(f"{rep.successes} / {len(rep.trials)} trials gave the expected genus")
    else:
        rep = uniqueness_sweep(args.n, args.trials, opts)
        kind = "uniqueness"
        meta = {"n": args.n, "trials": args.trials,
                "precision": opts.precision, "seed": opts.seed}
        lines = [f"uniqueness sweep: degree {args.n}, {args.trials} trials"]
        for k, t in enumerate(rep.trials):
            lines.append(
                f"  trial {k}: strong uniqueness {t.report.strong_uniqueness}"
            )
        lines.append(f"{rep.successes} / {len(rep.trials)} are strong uniqueness functions")
    _emit(lines, sweep_report_json(rep, kind, meta), args)
    return 0


def _run_monodromy(args) -> int:
    p = parse_function(args.p)
    q = parse_function(args.q) if args.q is not None else None

    dump_fh = None
    topts = None
    if args.dump is not None:
        dump_fh = sys.stdout if args.dump == "-" else open(args.dump, "w")

        def writer(loop_index: int, t: float, point_index: int, z: complex) -> None:
            dump_fh.write(f"{loop_index} {t!r} {point_index} {z.real!r} {z.imag!r}\n")

        topts = TrackOptions(dump=writer)
    try:
        ladder = [args.precision] + [b for b in PRECISION_LADDER if b > args.precision]
        last: Exception = None
        for bits in ladder:
            try:
                bd = compute_branch_data(p, q, NumericContext(bits), topts, seed=args.seed)
                break
            except NumericFailure as exc:
                last = exc
        else:
            raise last
    finally:
        if dump_fh is not None and dump_fh is not sys.stdout:
            dump_fh.close()

    lines = [f"basepoint: {bd.basepoint.real:.6g}{bd.basepoint.imag:+.6g}i"]
    if bd.moebius is not None:
        lines.append("inputs were post-composed with a Moebius map to move")
        lines.append("critical values off infinity (curve is unchanged)")
    lines.append(f"loops ({len(bd.loops.loops)}), counterclockwise around:")
    for k, (mv, lp) in enumerate(zip(bd.values, bd.loops.loops)):
        lines.append(
            f"  loop {k}: center {lp.center.real:.6g}{lp.center.imag:+.6g}i"
            f"   P: {_cycle_text(mv.p_type)}  Q: {_cycle_text(mv.q_type)}"
        )
    lines.append("permutations (alpha acts on the fiber of P, beta of Q):")
    for k in range(len(bd.alpha)):
        lines.append(f"  loop {k}: alpha = {_perm_text(bd.alpha[k])}   beta = {_perm_text(bd.beta[k])}")
    if args.dump != "-":
        for line in lines:
            print(line)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _options(args) -> AnalysisOptions:
    return AnalysisOptions(
        precision=args.precision,
        tolerance=args.tolerance,
        verify=getattr(args, "verify", False),
        seed=args.seed,
    )


def _add_common(sub, verify: bool = True, json_flag: bool = True) -> None:
    sub.add_argument("--precision", type=int, default=53, metavar="BITS",
                     help="starting precision in bits (default 53; ladder may raise it)")
    sub.add_argument("--tolerance", type=float, default=1e-9, metavar="TOL",
                     help="relative clustering tolerance (default 1e-9)")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for loop geometry and sampling (default 0)")
    if verify:
        sub.add_argument("--verify", action="store_true",
                         help="always run monodromy, even when a criterion already decides")
    if json_flag:
        sub.add_argument("--json", metavar="PATH", default=None,
                         help="write the JSON report to PATH instead of stdout "
                              "('-' keeps it on stdout)")
        sub.add_argument("--human", action="store_true",
                         help="print the human-readable summary instead of JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvefactor",
        description="Irreducibility, components and genera of P(x) - Q(y) = 0 "
                    "for rational functions, via certified numerical monodromy.",
    )
    parser.add_argument("--version", action="version", version=f"curvefactor {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("analyze", help="factor the curve P(x) - Q(y) = 0")
    sp.add_argument("--p", required=True, metavar="EXPR", help="expression for P, e.g. 'z^2'")
    sp.add_argument("--q", required=True, metavar="EXPR",
                    help="expression for Q, e.g. '(z^2 + 1)/z'")
    _add_common(sp)
    sp.set_defaults(func=_run_analyze)

    sp = subs.add_parser("self", help="factor P(x) - P(y) = 0 with the diagonal removed")
    sp.add_argument("--p", required=True, metavar="EXPR", help="expression for P")
    _add_common(sp)
    sp.set_defaults(func=_run_self)

    sp = subs.add_parser("uniqueness", help="decide whether P is a strong uniqueness function")
    sp.add_argument("--p", required=True, metavar="EXPR", help="expression for P")
    _add_common(sp)
    sp.set_defaults(func=_run_uniqueness)

    sp = subs.add_parser("sweep", help="randomized batches over sampled functions")
    sp.add_argument("--n", type=int, required=True, help="degree of the first function")
    sp.add_argument("--m", type=int, default=None,
                    help="degree of the second function (pair sweeps)")
    sp.add_argument("--trials", type=int, default=5, help="number of trials (default 5)")
    sp.add_argument("--uniqueness", action="store_true",
                    help="sweep strong-uniqueness verdicts instead of pair genera")
    _add_common(sp, verify=False)
    sp.set_defaults(func=_run_sweep)

    sp = subs.add_parser("monodromy", help="print the loop system and permutations")
    sp.add_argument("--p", required=True, metavar="EXPR", help="expression for P")
    sp.add_argument("--q", default=None, metavar="EXPR",
                    help="expression for Q (omit to study P alone)")
    sp.add_argument("--dump", metavar="PATH", default=None,
                    help="write tracked fiber points as 'loop t point re im' lines "
                         "('-' for stdout)")
    _add_common(sp, verify=False, json_flag=False)
    sp.set_defaults(func=_run_monodromy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold those into the input-error code
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # reader (e.g. head) closed the pipe; suppress the shutdown complaint
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
