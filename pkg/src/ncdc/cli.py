"""Command-line front end.

Every command prints a JSON run report: command name, canonicalized
inputs (seed and order always included, even when a command ignores
them), a list of named checks with pass/fail/skipped status, and the
elapsed time.  Reports are byte-stable for fixed inputs and seed apart
from the elapsed field.  ``--human`` switches to a terse table.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 for
unreadable input, bad parameters, or a refused precondition.
"""

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction

from .errors import FormatError, NcdcError, PreconditionError, StructureError
from .scalars import GaussianRational, format_value
from .structure import (build_kappa, check_calculus_condition, read_structure,
                        validate_structure, write_structure)
from .pbw import EnvelopingAlgebra, ShiftIndex, parse_expression, render
from .weyl import WeylAlgebra
from .realize import (check_d_properties, conjecture_test, exterior_derivative,
                      shift_realization, verify_realization,
                      weyl_linear_realization, write_realization)

_BRACKET_CHECKS = ("bracket-xx", "bracket-theta-x", "bracket-theta-theta",
                   "bracket-t1-x", "bracket-t1-theta", "bracket-t2-x",
                   "bracket-t2-theta", "bracket-t4-x", "bracket-t4-theta",
                   "bracket-tt")
_D_CHECKS = ("dhat-nilpotent", "dhat-coordinate", "dhat-oneform", "dhat-leibniz")


def _load_structure(path):
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return read_structure(data)
    except FormatError as exc:
        where = f"{path}: {exc.path}" if exc.path else path
        raise FormatError(exc.message, path=where, offset=exc.offset,
                          line=exc.line, col=exc.col) from None


def _default_order():
    raw = os.environ.get("NCDC_DEFAULT_ORDER")
    if raw is None:
        return 6
    try:
        val = int(raw)
    except ValueError:
        raise PreconditionError(f"NCDC_DEFAULT_ORDER must be an integer, got {raw!r}")
    if val < 0:
        raise PreconditionError("NCDC_DEFAULT_ORDER must be non-negative")
    return val


def _resolve_order(args):
    return _default_order() if args.order is None else args.order


def _witness(payload):
    if isinstance(payload, GaussianRational):
        return format_value(payload)
    return str(payload)


def _viol_json(v):
    name, idx, payload = v
    return {"index": list(idx), "residual": _witness(payload)}


def _grouped_checks(report, names):
    """One check entry per name, first violation attached on failure."""
    by_name = {}
    for v in report.violations:
        by_name.setdefault(v[0], []).append(v)
    out = []
    for name in names:
        if name in by_name:
            out.append({"name": name, "status": "fail",
                        "firstViolation": _viol_json(by_name[name][0])})
        else:
            out.append({"name": name, "status": "pass"})
    return out


def _emit(command, inputs, checks, t0, human):
    report = {"command": command, "inputs": inputs, "checks": checks,
              "elapsed": round(time.time() - t0, 6)}
    if human:
        print(f"{command}  ({report['elapsed']}s)")
        for c in checks:
            line = f"  {c['status'].upper():7} {c['name']}"
            if "agreementOrder" in c:
                line += f"  agreement={c['agreementOrder']}"
            if "result" in c:
                line += f"  {c['result']}"
            if c.get("firstViolation"):
                line += f"  first={c['firstViolation']}"
            if c.get("reason"):
                line += f"  ({c['reason']})"
            print(line)
    else:
        print(json.dumps(report, indent=2))
    return 0 if all(c["status"] in ("pass", "skipped") for c in checks) else 1


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args):
    t0 = time.time()
    s = _load_structure(args.file)
    inputs = {"file": args.file, "calculus": bool(args.calculus),
              "order": _resolve_order(args), "seed": args.seed}
    rep = validate_structure(s)
    checks = _grouped_checks(rep, ("antisymmetry", "jacobi-even", "jacobi-mixed"))
    if args.calculus:
        crep = check_calculus_condition(s)
        checks += _grouped_checks(crep, ("leibniz-compat",))
    return _emit("validate", inputs, checks, t0, args.human)


def _parse_vector(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(Fraction(tok))
        except (ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"cannot read {tok!r} as a rational") from exc
    return out


def cmd_kappa(args):
    t0 = time.time()
    family = args.family.upper()
    try:
        c = Fraction(args.c)
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"cannot read {args.c!r} as a rational") from exc
    a = _parse_vector(args.a)
    s = build_kappa(args.dim, family, c, a)
    with open(args.out, "wb") as fh:
        fh.write(write_structure(s))
    inputs = {"dim": args.dim, "family": family, "c": str(c),
              "a": [str(v) for v in a], "out": args.out,
              "order": _resolve_order(args), "seed": args.seed}
    checks = [{"name": "kappa-build", "status": "pass",
               "cEntries": sum(1 for _ in s.c_full_items()),
               "kEntries": sum(1 for _ in s.k_items())}]
    return _emit("kappa", inputs, checks, t0, args.human)


def _require_valid(s, what):
    rep = validate_structure(s)
    if not rep.passed:
        name, idx, res = rep.violations[0]
        raise PreconditionError(
            f"{what} needs a valid structure; {name} fails at {tuple(idx)} "
            f"(residual {_witness(res)})")


def _suite_brackets(s, d):
    r = shift_realization(s, d)
    return _grouped_checks(verify_realization(r, s), _BRACKET_CHECKS)


def _suite_shift(s, d, trials, seed):
    alg = EnvelopingAlgebra(s)
    rng = random.Random(seed)
    top = s.n + s.m
    bad = []
    for t in range(trials):
        deg = rng.randint(1, 4)
        word = tuple(rng.randint(1, s.n) for _ in range(deg))
        p = alg.pbw_normal_form(word)
        A = rng.randint(1, top)
        za = alg.generator(A)
        moved = alg.move_right(A, p)
        acc = alg.zero()
        for B, q in moved.items():
            acc = acc + alg.multiply(q, alg.generator(B))
        if not (alg.multiply(za, p) - acc).is_zero():
            bad.append(("move-right-product", (t, A), "nonzero"))
        moved = alg.move_left(A, p)
        acc = alg.zero()
        for B, q in moved.items():
            acc = acc + alg.multiply(alg.generator(B), q)
        if not (alg.multiply(p, za) - acc).is_zero():
            bad.append(("move-left-product", (t, A), "nonzero"))
        cut = rng.randint(0, deg)
        left = alg.pbw_normal_form(word[:cut])
        right = alg.pbw_normal_form(word[cut:])
        B = rng.randint(1, top)
        idx = ShiftIndex(A, B, "T")
        whole = alg.shift_act_left(idx, alg.multiply(left, right))
        blocks = alg.shift_act_left_block(idx, left, right)
        if not (whole - blocks).is_zero():
            bad.append(("block-vs-recursion", (t, A, B), "nonzero"))
    by_name = {}
    for v in bad:
        by_name.setdefault(v[0], []).append(v)
    out = []
    for name in ("move-right-product", "move-left-product", "block-vs-recursion"):
        if name in by_name:
            out.append({"name": name, "status": "fail", "trials": trials,
                        "firstViolation": _viol_json(by_name[name][0])})
        else:
            out.append({"name": name, "status": "pass", "trials": trials})
    return out


def _suite_calculus(s, d, trials, seed):
    dop = exterior_derivative(s, d)
    r = weyl_linear_realization(s, d)
    rep = check_d_properties(dop, r, samples=trials, seed=seed)
    return _grouped_checks(rep, _D_CHECKS)


def cmd_verify(args):
    t0 = time.time()
    s = _load_structure(args.file)
    _require_valid(s, "verify")
    d = _resolve_order(args)
    inputs = {"file": args.file, "order": d, "trials": args.trials,
              "seed": args.seed, "suite": args.suite}
    checks = []
    if args.suite in ("brackets", "all"):
        checks += _suite_brackets(s, d)
    if args.suite in ("shift", "all"):
        checks += _suite_shift(s, d, args.trials, args.seed)
    if args.suite in ("calculus", "all"):
        try:
            checks += _suite_calculus(s, d, args.trials, args.seed)
        except PreconditionError as exc:
            if args.suite == "calculus":
                raise
            checks += [{"name": name, "status": "skipped", "reason": str(exc)}
                       for name in _D_CHECKS]
    return _emit("verify", inputs, checks, t0, args.human)


def _tensor_json(tensor):
    out = []
    for key in sorted(tensor):
        poly = tensor[key]
        terms = [{"d": list(dp), "val": format_value(poly.terms[(dp, q)])}
                 for (dp, q) in sorted(poly.terms)]
        out.append({"idx": list(key), "terms": terms})
    return out


def cmd_conjecture(args):
    t0 = time.time()
    s = _load_structure(args.file)
    _require_valid(s, "conjecture")
    d = _resolve_order(args)
    inputs = {"file": args.file, "order": d, "seed": args.seed}
    cj = conjecture_test(s, d)
    main = {"name": "conjugation-vs-merged-block",
            "status": "pass" if cj.agreement_order >= 1 else "fail",
            "agreementOrder": cj.agreement_order,
            "h": _tensor_json(cj.h), "p": _tensor_json(cj.p)}
    if cj.first_mismatch is not None:
        key, deg, val = cj.first_mismatch
        main["firstMismatch"] = {"idx": list(key), "degree": deg,
                                 "hMinusP": val,
                                 "h": _poly_coeff(cj.h[key], deg),
                                 "p": _poly_coeff(cj.p[key], deg)}
    checks = [main,
              {"name": "theta-image-match",
               "status": "pass" if cj.theta_image_ok else "fail"}]
    return _emit("conjecture", inputs, checks, t0, args.human)


def _poly_coeff(poly, deg):
    return [{"d": list(dp), "val": format_value(c)}
            for (dp, q), c in sorted(poly.terms.items()) if sum(dp) == deg]


def cmd_shift(args):
    t0 = time.time()
    s = _load_structure(args.file)
    alg = EnvelopingAlgebra(s)
    try:
        expr = parse_expression(alg, args.expr)
    except FormatError as exc:
        _print_caret(args.expr, exc)
        return 2
    if not expr.theta_free():
        print("error: shift queries act on coordinate expressions; "
              "one-form generators are not allowed here", file=sys.stderr)
        return 2
    idx = ShiftIndex(args.A, args.B, args.op)
    if args.op == "T":
        result = alg.shift_act_left(idx, expr)
    else:
        result = alg.shift_act_right(idx, expr)
    inputs = {"file": args.file, "op": args.op, "A": args.A, "B": args.B,
              "expr": args.expr, "order": _resolve_order(args), "seed": args.seed}
    checks = [{"name": "shift-action", "status": "pass", "result": render(result)}]
    return _emit("shift", inputs, checks, t0, args.human)


def _print_caret(text, exc):
    print(f"error: {exc.message}", file=sys.stderr)
    if exc.offset is not None:
        print(f"  {text}", file=sys.stderr)
        print("  " + " " * exc.offset + "^", file=sys.stderr)


def cmd_realize(args):
    t0 = time.time()
    s = _load_structure(args.file)
    _require_valid(s, "realize")
    d = _resolve_order(args)
    inputs = {"file": args.file, "order": d, "withShifts": bool(args.with_shifts),
              "withD": bool(args.with_d), "out": args.out, "seed": args.seed}
    r = shift_realization(s, d) if args.with_shifts else weyl_linear_realization(s, d)
    extra = {}
    if args.with_d:
        dop = exterior_derivative(s, d)
        alg = WeylAlgebra(s.n, s.m)
        extra["d"] = dop.d_hat
        for al, lam in enumerate(dop.lam, 1):
            extra[f"Lambda{al}"] = lam.to_weyl(alg)
    names = _BRACKET_CHECKS if args.with_shifts else _BRACKET_CHECKS[:3]
    checks = _grouped_checks(verify_realization(r, s), names)
    write_realization(args.out, r, extra or None)
    checks.append({"name": "export-written", "status": "pass", "out": args.out})
    return _emit("realize", inputs, checks, t0, args.human)


# ---------------------------------------------------------------------------
# wiring


def _build_parser():
    top = argparse.ArgumentParser(
        prog="ncdc",
        description="Exact engine for differential calculi on "
                    "Lie-algebra-type noncommutative spaces")
    sub = top.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--order", type=int, default=None,
                       help="series truncation order (default: "
                            "NCDC_DEFAULT_ORDER or 6)")
        p.add_argument("--seed", type=int, default=1,
                       help="seed for randomized checks (echoed in reports)")
        p.add_argument("--human", action="store_true",
                       help="tabular output instead of JSON")

    p = sub.add_parser("validate", help="check structure-constant laws")
    p.add_argument("file")
    p.add_argument("--calculus", action="store_true",
                   help="also check the Leibniz-compatibility law")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("kappa", help="generate a deformed-space structure file")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--family", required=True, choices=["s1", "s2", "s3", "S1", "S2", "S3"])
    p.add_argument("--c", required=True)
    p.add_argument("--a", required=True, help="comma-separated rationals")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("verify", help="run invariant suites against a structure")
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--suite", choices=["brackets", "shift", "calculus", "all"],
                   default="all")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("conjecture", help="measure conjugation-tensor agreement")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("shift", help="apply a shift-operator action to an expression")
    p.add_argument("file")
    p.add_argument("--op", choices=["T", "S"], default="T")
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--expr", required=True)
    common(p)
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("realize", help="build and export a realization")
    p.add_argument("file")
    p.add_argument("--with-shifts", action="store_true")
    p.add_argument("--with-d", action="store_true")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_realize)
    return top


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NcdcError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
