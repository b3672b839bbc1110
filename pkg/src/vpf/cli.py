"""Command-line interface: ``vpf count | ehrhart | symbolic | verify``.

Exit codes: 0 success, 2 malformed input, 3 symbolic/oracle mismatch,
4 resource limit.
"""
from __future__ import annotations

import argparse
import logging
import random
import sys
from fractions import Fraction
from typing import Sequence

from .arith import AffineForm, ResourceLimitError
from .chambers import GeometryError, ehrhart, symbolic
from .engine import DecompositionError, MatrixError, SystemMatrix, run_elimination
from .final import InterpolationError, render_form, render_poly
from .oracle import brute_count, brute_count_interior, polytope_to_standard_form
from .quasipoly import qp_render, render_qp, to_json

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH, EXIT_LIMIT = 0, 2, 3, 4


class InputError(ValueError):
    """Malformed command-line input or input file."""


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _ints(tokens, no) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise InputError(f"line {no}: expected integers ({exc})") from None


def parse_matrix(text: str) -> SystemMatrix:
    """``m d`` on the first line, then ``m`` rows of ``d`` nonnegative integers."""
    lines = _content_lines(text)
    if not lines:
        raise InputError("matrix file is empty")
    no, head = lines[0]
    dims = _ints(head.split(), no)
    if len(dims) != 2 or dims[0] < 1 or dims[1] < 1:
        raise InputError(f"line {no}: header must be 'm d' with positive m, d")
    m, d = dims
    if len(lines) - 1 != m:
        raise InputError(f"expected {m} matrix rows, found {len(lines) - 1}")
    rows = []
    for no, line in lines[1:]:
        row = _ints(line.split(), no)
        if len(row) != d:
            raise InputError(f"line {no}: expected {d} entries, found {len(row)}")
        rows.append(row)
    try:
        return SystemMatrix.of(rows)
    except MatrixError as exc:
        raise InputError(str(exc)) from None


def parse_polytope(text: str) -> list[tuple[list[int], int]]:
    """Lines ``a1 ... ad <= b`` (``>=`` is accepted and negated)."""
    out = []
    for no, line in _content_lines(text):
        for op, sign in (("<=", 1), (">=", -1)):
            if op in line:
                lhs, rhs = line.split(op, 1)
                a = _ints(lhs.split(), no)
                b = _ints(rhs.split(), no)
                if len(b) != 1 or not a:
                    raise InputError(f"line {no}: expected 'a1 ... ad {op} b'")
                out.append(([sign * x for x in a], sign * b[0]))
                break
        else:
            raise InputError(f"line {no}: missing '<='")
    if not out:
        raise InputError("polytope file has no inequalities")
    if len({len(a) for a, _ in out}) != 1:
        raise InputError("inequalities have different numbers of coefficients")
    return out


def parse_rhs(text: str, m: int) -> list[int]:
    try:
        b = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise InputError(f"rhs {text!r} is not a comma-separated integer list") from None
    if len(b) != m:
        raise InputError(f"rhs has {len(b)} entries, the matrix has {m} rows")
    return b


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(path: str | None, doc: str | None, show) -> None:
    """Write JSON (to a file, or alone to stdout for ``-``) before any text output.

    The document is built by the caller first, so failures leave no partial output.
    """
    if path == "-":
        print(doc)
        return
    if path is not None:
        _write_json(path, doc)
    show()


def _write_json(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def symbolic_count(A: SystemMatrix, b: Sequence[int]) -> Fraction:
    if any(x < 0 for x in b):
        return Fraction(0)
    return symbolic(A)(b)


# -- commands ------------------------------------------------------------------

def cmd_count(args) -> int:
    A = parse_matrix(_read(args.matrix))
    b = parse_rhs(args.rhs, A.m)
    if args.method == "oracle":
        print(brute_count(A, b))
        return EXIT_OK
    sym = symbolic_count(A, b)
    if args.method == "symbolic":
        print(_fmt(sym))
        return EXIT_OK
    orc = brute_count(A, b)
    print(f"symbolic {_fmt(sym)}")
    print(f"oracle {orc}")
    if sym != orc:
        print(f"mismatch at b = {tuple(b)}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_ehrhart(args) -> int:
    if args.polytope:
        if args.matrix or args.rhs:
            raise InputError("use either --polytope or --matrix/--rhs")
        sf = polytope_to_standard_form_checked(parse_polytope(_read(args.polytope)), args.orthant)
        A, b = sf.matrix, list(sf.rhs)
    else:
        if not (args.matrix and args.rhs):
            raise InputError("ehrhart needs --matrix and --rhs, or --polytope")
        A = parse_matrix(_read(args.matrix))
        b = parse_rhs(args.rhs, A.m)
        if any(x < 0 for x in b):
            raise InputError("Ehrhart dilation needs a nonnegative right-hand side")
    qp = ehrhart(A, b, order=args.order)
    _emit(args.json, to_json(qp, A.rows) if args.json else None, lambda: print(render_qp(qp)))
    return EXIT_OK


def polytope_to_standard_form_checked(ineqs, orthant: bool):
    try:
        return polytope_to_standard_form(ineqs, nonnegativity=orthant)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_symbolic(args) -> int:
    A = parse_matrix(_read(args.matrix))
    pw = symbolic(A, order=args.order)

    def show():
        if args.show_terms:
            el = run_elimination(A, order=args.order)
            kept = el.parameter_names
            print(f"# eliminated z{', z'.join(str(i + 1) for i in el.order) or ' (none)'}; kept z{el.last + 1}")
            for gt in el.terms:
                print("# " + _render_guarded(gt, el, kept))
        print(qp_render(pw))

    _emit(args.json, to_json(pw) if args.json else None, show)
    return EXIT_OK


def _render_guarded(gt, el, params) -> str:
    t = gt.term
    z = f"z{el.last + 1}"
    num = f"{z}^({render_form(t.exponents[el.last], params)})"
    den = "*".join(f"(1 - {z}^{f.vector[el.last]})" + (f"^{f.multiplicity}" if f.multiplicity > 1 else "")
                   for f in t.denominator) or "1"
    coef = render_poly(t.coefficient, params)
    guards = [f"{render_form(s.form, params)} <= {s.on_max}" for s in gt.signs]
    guards += [f"{render_form(AffineForm.make(c.coeffs, c.constant), params)} = 0 (mod {c.modulus})"
               for c in gt.congruences]
    return f"({coef}) * {num} / ({den})" + (f"   [{'; '.join(guards)}]" if guards else "")


def verify_matrix(A: SystemMatrix, max_rhs: int, samples: int, seed: int, out=None) -> int:
    """Compare symbolic and oracle values at seeded samples; print a summary table."""
    out = out if out is not None else sys.stdout
    rng = random.Random(seed)
    points = [tuple(rng.randint(0, max_rhs) for _ in range(A.m)) for _ in range(samples)]
    pw = symbolic(A)
    bound = A.d - A.rank
    sign = (-1) ** bound
    r = A.row_sums
    failures: dict[str, list] = {"value": [], "degree": [], "reciprocity": [], "overlap": []}
    for i, p in enumerate(pw.pieces):
        if p.qp.degree > bound:
            failures["degree"].append((i, p.qp.degree))
    for b in points:
        vals = [p.qp(b) for p in pw.applicable(b)]
        if len(set(vals)) > 1:
            failures["overlap"].append(b)
        sym = vals[0] if vals else Fraction(0)
        if sym != brute_count(A, b):
            failures["value"].append(b)
        interior = brute_count_interior(A, b)
        shifted = tuple(x - ri for x, ri in zip(b, r))
        mirrored = tuple(-x - ri for x, ri in zip(b, r))
        neg = tuple(-x for x in b)
        for p in pw.applicable(b):
            paired = p.qp(b) == sign * p.qp(mirrored)
            # q(-b) = sign * q(b - r), which is the interior count when b - r stays in the chamber
            continued = not p.contains(shifted) or sign * p.qp(neg) == interior
            if not (paired and continued):
                failures["reciprocity"].append(b)
                break
    print(f"matrix {[list(row) for row in A.rows]}  pieces {len(pw.pieces)}  samples {samples}  "
          f"seed {seed}", file=out)
    print(f"{'check':<12} {'cases':>7} {'failed':>7}", file=out)
    totals = {"value": samples, "degree": len(pw.pieces), "reciprocity": samples, "overlap": samples}
    for name in ("value", "degree", "reciprocity", "overlap"):
        print(f"{name:<12} {totals[name]:>7} {len(failures[name]):>7}", file=out)
    bad = [(k, v) for k, v in failures.items() if v]
    if not bad:
        print("all checks passed", file=out)
        return EXIT_OK
    for name, items in bad:
        if name == "degree":
            i, deg = items[0]
            print(f"FAIL degree: piece {i + 1} has degree {deg} > {bound}", file=out)
        else:
            print(f"FAIL {name}: witness b = {min(items, key=lambda b: (sum(b), b))}", file=out)
    return EXIT_MISMATCH


def cmd_verify(args) -> int:
    A = parse_matrix(_read(args.matrix))
    if args.samples < 0 or args.max_rhs < 0:
        raise InputError("--samples and --max-rhs must be nonnegative")
    return verify_matrix(A, args.max_rhs, args.samples, args.seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vpf", description="Vector partition functions and Ehrhart "
                                "quasi-polynomials by iterated partial fractions.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="number of nonnegative integer solutions of A x = b")
    c.add_argument("--matrix", required=True)
    c.add_argument("--rhs", required=True, help="comma-separated integers")
    c.add_argument("--method", choices=("symbolic", "oracle", "both"), default="symbolic")
    c.set_defaults(func=cmd_count)

    e = sub.add_parser("ehrhart", help="Ehrhart quasi-polynomial t -> phi_A(t b)")
    e.add_argument("--matrix")
    e.add_argument("--rhs")
    e.add_argument("--polytope", help="file of inequalities 'a1 ... ad <= b'")
    e.add_argument("--orthant", action=argparse.BooleanOptionalAction, default=True,
                   help="imply x >= 0 for --polytope (default on)")
    e.add_argument("--order", choices=("auto", "paper", "forward"), default="auto")
    e.add_argument("--json", metavar="PATH", help="also write vpf-1 JSON ('-' prints only JSON)")
    e.set_defaults(func=cmd_ehrhart)

    s = sub.add_parser("symbolic", help="piecewise quasi-polynomial for phi_A")
    s.add_argument("--matrix", required=True)
    s.add_argument("--order", choices=("auto", "paper", "forward"), default="auto")
    s.add_argument("--show-terms", action="store_true", help="print the univariate terms before the last step")
    s.add_argument("--json", metavar="PATH", help="also write vpf-1 JSON ('-' prints only JSON)")
    s.set_defaults(func=cmd_symbolic)

    v = sub.add_parser("verify", help="cross-check the symbolic result against the oracle")
    v.add_argument("--matrix", required=True)
    v.add_argument("--max-rhs", type=int, default=20)
    v.add_argument("--samples", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InputError, MatrixError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (DecompositionError, InterpolationError, GeometryError) as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
