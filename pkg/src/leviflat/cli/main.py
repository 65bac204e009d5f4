"""Command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 usage or input error,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

from .. import kernels
from ..blowup import BlowupError, blowup_analysis
from ..levi import (
    HypersurfaceGerm,
    NotRealError,
    ShapeViolation,
    check_reality,
    complexify,
    eta_singularity_decomposition,
    integrability_test,
    singular_locus,
    quadric_shape,
)
from ..normal_form import (
    InfeasibleAtDegree,
    NotMorseBott,
    first_integral_solve,
    hessian_corank,
    morse_bott_normalize,
    theorem1_pipeline,
)
from .expr import ExpressionError, lower, max_variable, parse_expression, print_expression
from .report import emit_report, make_report

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

COMMANDS = (
    "parse",
    "check",
    "reality",
    "complexify",
    "corank",
    "first-integral",
    "normalize",
    "pipeline",
    "blowup",
    "holonomy",
)


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


@dataclass
class LfInput:
    expression: str
    metadata: dict = field(default_factory=dict)
    source: str = "<expr>"


def read_lf(text: str, source: str = "<expr>") -> LfInput:
    """One expression plus optional ``# key: value`` lines; other comments are ignored."""
    meta = {}
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            entry = stripped[1:].strip()
            if ":" in entry:
                key, value = entry.split(":", 1)
                meta[key.strip()] = value.strip()
            continue
        body.append(line)
    expression = "\n".join(body).strip()
    if not expression:
        raise UsageError(f"{source}: no expression found")
    return LfInput(expression, meta, source)


def _load(args) -> LfInput:
    if args.expr is not None:
        if args.input is not None:
            raise UsageError("give either an input file or --expr, not both")
        return LfInput(args.expr.strip())
    if args.input is None:
        raise UsageError("no input: pass a .lf file or --expr EXPRESSION")
    if args.input == "-":
        return read_lf(sys.stdin.read(), "<stdin>")
    try:
        with open(args.input, encoding="utf-8") as fh:
            return read_lf(fh.read(), args.input)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None


def _int_meta(meta: dict, key: str):
    if key not in meta:
        return None
    try:
        return int(meta[key])
    except ValueError:
        raise UsageError(f"metadata {key!r} must be an integer, got {meta[key]!r}") from None


# -- commands -------------------------------------------------------------------


def cmd_parse(F, ast, args):
    return EXIT_OK, {
        "ast": print_expression(ast),
        "polynomial": F.format(),
        "terms": len(F),
        "record": F.to_record(),
    }


def cmd_reality(F, ast, args):
    real = check_reality(F)
    return (EXIT_OK if real else EXIT_VERDICT), {"real": real, "verdict": "real" if real else "not-real"}


def cmd_complexify(F, ast, args):
    FC = complexify(F)
    return EXIT_OK, {"complexified": FC.format(), "real": check_reality(F), "record": FC.to_record()}


def _germ(F, args) -> HypersurfaceGerm:
    return HypersurfaceGerm(F, args.degree)


def cmd_check(F, ast, args):
    M = _germ(F, args)
    verdict = integrability_test(M)
    frag = verdict.to_fragment()
    frag.pop("op", None)
    try:
        shape = quadric_shape(F)
    except ShapeViolation as exc:
        frag["shape"] = {"ok": False, "reason": str(exc)}
    else:
        frag["shape"] = {"ok": True, "k": shape.k, "c": shape.c, "branch": shape.branch, "H": shape.H.format()}
        frag["singular_locus"] = singular_locus(M.complexified).to_fragment()
        frag["eta_singularities"] = eta_singularity_decomposition(F).to_fragment()
    return (EXIT_OK if verdict.flat else EXIT_VERDICT), frag


def cmd_corank(F, ast, args):
    if F.is_holomorphic():
        data = hessian_corank(F)
        frag = data.to_fragment()
        frag.pop("op", None)
        return EXIT_OK, frag
    shape = quadric_shape(F)
    return EXIT_OK, {"corank": shape.c, "rank": shape.k, "basis": "quadratic part Re(z1^2+...+zk^2)"}


def cmd_first_integral(F, ast, args):
    pair = first_integral_solve(_germ(F, args), args.degree)
    frag = pair.to_fragment()
    frag.pop("op", None)
    if any(pair.residual_by_degree):
        raise InvariantViolation(f"first-integral residuals {pair.residual_by_degree}")
    return EXIT_OK, frag


def cmd_normalize(F, ast, args):
    if not F.is_holomorphic():
        raise UsageError("normalize expects a holomorphic expression (no conj, Re or Im)")
    cert = morse_bott_normalize(F, args.degree)
    if not cert.verify(F) or cert.residual:
        raise InvariantViolation("normal-form certificate failed its independent re-check")
    frag = cert.to_fragment()
    frag.pop("op", None)
    return EXIT_OK, frag


def cmd_pipeline(F, ast, args):
    res = theorem1_pipeline(_germ(F, args), args.degree)
    if res.certificate.residual or res.end_to_end_residual or not res.block_shape:
        raise InvariantViolation("pipeline certificate failed")
    if res.U_tilde.constant_term() != 1:
        raise InvariantViolation("U~(0) != 1")
    frag = res.to_fragment()
    frag.pop("op", None)
    return EXIT_OK, frag


def cmd_blowup(F, ast, args):
    res = blowup_analysis(complexify(F), args.chart)
    frag = res.to_fragment()
    frag["reference_mismatch"] = any(h.reference_mismatch for h in res.holonomy)
    return EXIT_OK, frag


def cmd_holonomy(F, ast, args):
    res = blowup_analysis(complexify(F), args.chart)
    comps = [h.to_fragment() for h in res.holonomy]
    return EXIT_OK, {
        "chart": args.chart,
        "components": comps,
        "residues": [c["residue"] for c in comps],
        "reference_mismatch": any(h.reference_mismatch for h in res.holonomy),
    }


HANDLERS = {
    "parse": cmd_parse,
    "check": cmd_check,
    "reality": cmd_reality,
    "complexify": cmd_complexify,
    "corank": cmd_corank,
    "first-integral": cmd_first_integral,
    "normalize": cmd_normalize,
    "pipeline": cmd_pipeline,
    "blowup": cmd_blowup,
    "holonomy": cmd_holonomy,
}

# negative verdicts that map to exit code 1
VERDICT_ERRORS = (NotRealError, ShapeViolation, InfeasibleAtDegree, NotMorseBott, BlowupError)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help=".lf file with one expression ('-' for stdin)")
    common.add_argument("-e", "--expr", help="expression given inline instead of a file")
    common.add_argument("--degree", "-N", type=int, default=None, help="truncation degree N (default 8)")
    common.add_argument("--vars", "-n", type=int, default=None, help="number of variables (inferred if omitted)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--chart", type=int, default=1, help="blow-up chart index j (default 1)")
    parser = argparse.ArgumentParser(
        prog="leviflat",
        description="Exact jet-level analysis of real hypersurface germs {F = 0} in C^n.",
    )
    parser.add_argument("--backend", action="store_true", help="print the active kernel backend and exit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    helps = {
        "parse": "parse and echo an expression",
        "check": "Levi-flatness verdict with a witness",
        "reality": "test whether F is real-valued",
        "complexify": "print F_C(z, w)",
        "corank": "Hessian rank and corank",
        "first-integral": "solve Re(f) = U F degree by degree",
        "normalize": "holomorphic Morse-Bott normal form of f",
        "pipeline": "first integral, normal form and end-to-end certificate",
        "blowup": "strict transform, beta~ and exceptional components in a chart",
        "holonomy": "residues and multipliers of the exceptional components",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _execute(args, load) -> tuple[int, dict]:
    """Run ``args.command`` on the input produced by ``load``; never raises for bad input."""
    op = args.command
    source = None
    try:
        lf = load()
        meta = lf.metadata
        args.degree = args.degree if args.degree is not None else (_int_meta(meta, "degree") or 8)
        if args.degree < 2:
            raise UsageError("--degree must be at least 2")
        source = {"source": os.path.basename(lf.source),
                  "expression": lf.expression}
        ast = parse_expression(lf.expression)
        nvars = args.vars if args.vars is not None else _int_meta(meta, "vars")
        if nvars is not None and max_variable(ast) > nvars:
            raise UsageError(f"expression uses z{max_variable(ast)} but --vars is {nvars}")
        F = lower(ast, nvars)
        code, frag = HANDLERS[op](F, ast, args)
        status = "ok" if code == EXIT_OK else "fail"
        return code, make_report(op, status, source, vars=F.nvars, degree=args.degree, **frag)
    except ExpressionError as exc:
        return EXIT_USAGE, make_report(op, "error", source, error={"kind": "syntax", "message": exc.message,
                                                                    "line": exc.line, "column": exc.col})
    except UsageError as exc:
        return EXIT_USAGE, make_report(op, "error", source, error={"kind": "usage", "message": str(exc)})
    except VERDICT_ERRORS as exc:
        err = {"kind": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, InfeasibleAtDegree):
            err["degree"] = exc.degree
        if isinstance(exc, NotMorseBott):
            err["degree"] = exc.degree
            err["witness"] = exc.witness.format()
        return EXIT_VERDICT, make_report(op, "fail", source, error=err)
    except InvariantViolation as exc:
        return EXIT_INTERNAL, make_report(op, "error", source, error={"kind": "invariant", "message": str(exc)})
    except ValueError as exc:
        # remaining ValueErrors are rejected inputs (e.g. F(0) != 0, non-standard quadratic part)
        return EXIT_USAGE, make_report(op, "error", source, error={"kind": "input", "message": str(exc)})


def run_command(subcommand: str, flags: list | tuple = (), input: str | None = None) -> tuple[int, dict]:
    """Programmatic entry point returning the exit code and the report as a dict.

    ``input`` is the text of a .lf file; without it the flags must name a file or carry ``--expr``.
    """
    if subcommand not in HANDLERS:
        raise UsageError(f"unknown subcommand {subcommand!r}")
    try:
        args = build_parser().parse_args([subcommand, *flags])
    except SystemExit:
        raise UsageError(f"invalid flags {list(flags)!r}") from None
    if input is not None:
        return _execute(args, lambda: read_lf(input, "<input>"))
    return _execute(args, lambda: _load(args))


def run(argv: list | None = None) -> tuple[int, bytes]:
    """Run one command line; returns the exit code and the rendered report."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), b""
    if args.backend:
        return EXIT_OK, f"{kernels.BACKEND}\n".encode()
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE, b""
    code, report = _execute(args, lambda: _load(args))
    return code, emit_report(report, args.format)


def main(argv: list | None = None) -> int:
    try:
        code, out = run(argv)
    except Exception as exc:  # pragma: no cover - internal failure path
        sys.stderr.write(f"leviflat: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    sys.stdout.buffer.write(out)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
