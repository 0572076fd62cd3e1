"""Command-line front end: ``ncf {expand,word,analyze,dynamics,verify}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Callable

from . import acceptance
from . import analysis as an
from . import dynamics as dy
from . import expansion as ex
from . import words as wd

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2
DEFAULT_SOURCE = "arith:start=2,step=1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Output:
    data: object
    plain: str
    rows: list[list] | None = None      # for --format csv
    exit_code: int = EXIT_OK


def _positive(name: str) -> Callable[[str], int]:
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be ≥ 1")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--N", type=_positive("N"), default=2, help="numerator N (default 2)")
    common.add_argument("--source", default=DEFAULT_SOURCE,
                        help="digit source: list:..., periodic:pre=..;per=.., arith:start=..,step=.., "
                             "surd:a=..,b=..,c=..,D=.., rational:p/q")
    common.add_argument("--format", choices=("json", "csv", "plain"), default=None)
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="ncf", description="N-continued fractions, their S-adic words and dynamics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("expand", parents=[common], help="greedy digits and convergents")
    e.add_argument("--count", type=_positive("count"), default=10)

    w = sub.add_parser("word", parents=[common], help="prefix of the limit word")
    w.add_argument("--len", type=_positive("len"), default=100)
    w.add_argument("--flavor", choices=("primal", "dual"), default="primal")
    w.add_argument("--rle", action="store_true", help="run-length encode plain output")
    w.add_argument("--output", help="write the word to this file instead of stdout")

    a = sub.add_parser("analyze", parents=[common], help="combinatorics of a prefix")
    a.add_argument("what", choices=("balance", "complexity", "special", "blocks", "frequency"))
    a.add_argument("--len", type=_positive("len"), default=100_000)
    a.add_argument("--flavor", choices=("primal", "dual"), default="primal")
    a.add_argument("--lmax", type=_positive("lmax"), default=256)
    a.add_argument("--nmax", type=_positive("nmax"), default=50)
    a.add_argument("--factor", default="01", help="factor for 'frequency'")
    a.add_argument("--windows", type=_positive("windows"), default=16)

    d = sub.add_parser("dynamics", parents=[common], help="orbits, entropy and densities")
    d.add_argument("what", choices=("entropy", "orbit", "growth", "natext", "farey"))
    d.add_argument("--map", choices=dy.MAPS, default="T")
    d.add_argument("--x0", type=float, default=None)
    d.add_argument("--y0", type=float, default=0.0)
    d.add_argument("--count", type=_positive("count"), default=20)
    d.add_argument("--iterations", type=_positive("iterations"), default=10**6)
    d.add_argument("--bins", type=_positive("bins"), default=20)
    d.add_argument("--csv", dest="csv_path", help="dump natext histogram masses to this CSV file")
    d.add_argument("--a", type=float, default=0.25)
    d.add_argument("--b", type=float, default=0.5)

    v = sub.add_parser("verify", parents=[common], help="check claimed properties")
    v.add_argument("what", choices=("balance", "complexity", "acceptance"))
    v.add_argument("--len", type=_positive("len"), default=100_000)
    v.add_argument("--flavor", choices=("primal", "dual"), default=None)
    v.add_argument("--lmax", type=_positive("lmax"), default=2048)
    v.add_argument("--nmax", type=_positive("nmax"), default=200)
    v.add_argument("--criteria", default=None, help="comma-separated criterion numbers")
    return p


def parse_args(argv: list[str]) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    try:
        args.digits = ex.parse_source(args.source, args.N)
    except ValueError as exc:
        raise UsageError(f"argument --source: {exc}") from None
    if args.format is None:
        args.format = "plain" if args.command in ("expand", "word") else "json"
    return args


# -- commands ----------------------------------------------------------------


def cmd_expand(args) -> Output:
    digits = ex.take(args.digits, args.count)
    if not digits:
        raise ex.InsufficientDigits("the source produced no digits")
    ex.validate_greedy(digits, args.N)
    cs = ex.convergents(digits, args.N)
    cyl = ex.cylinder(digits, args.N, len(digits))
    data = {
        "N": args.N, "source": args.source, "digits": digits,
        "convergents": [{"n": c.n, "p": str(c.p), "q": str(c.q)} for c in cs],
        "cylinder": {"lo": str(cyl.lo), "hi": str(cyl.hi)},
    }
    if len(digits) < args.count:
        data["terminated"] = True
    rows = [["n", "digit", "p", "q"]] + [[c.n, d, c.p, c.q] for c, d in zip(cs, digits)]
    return Output(data, " ".join(map(str, digits)), rows)


def _greedy(source, N: int):
    for i, d in enumerate(source, 1):
        if d < N:
            raise ex.DomainError(f"digit d_{i} = {d} < N = {N} is not greedy")
        yield d


def cmd_word(args) -> Output:
    w, depth, used = wd.limit_prefix_with_depth(_greedy(args.digits, args.N), args.N, args.len, args.flavor)
    text = w.to_rle() if args.rle else str(w)
    data = {"N": args.N, "flavor": args.flavor, "length": len(w), "depth": depth,
            "digits_used": used, "word": str(w)}
    if args.output:
        wd.write_word(args.output, w, rle=args.rle)
        data.pop("word")
        data["path"] = args.output
        text = args.output
    return Output(data, text, [["position", "letter"]] + [[i, int(b)] for i, b in enumerate(w.bits)])


def _prefix(args, flavor=None):
    return wd.limit_prefix(_greedy(args.digits, args.N), args.N, args.len, flavor or args.flavor)


def cmd_analyze(args) -> Output:
    w = _prefix(args)
    if args.what == "balance":
        prof = an.balance_profile(w, min(args.lmax, len(w)))
        rows = prof.to_json()
        return Output({"constant": prof.constant, "profile": rows}, f"constant {prof.constant}",
                      [["length", "min1", "max1", "spread"]] + [list(r.values()) for r in rows])
    if args.what == "complexity":
        emp = an.factor_complexity(w, args.nmax)
        ref = an.complexity_closed_form(args.digits, args.N, args.nmax, args.flavor)
        emp.bands = ref.bands
        rows = emp.to_json()
        plain = "\n".join(f"{r['n']} {r['p']}" for r in rows)
        return Output(rows, plain, [["n", "p"]] + [[r["n"], r["p"]] for r in rows])
    if args.what == "special":
        reps = an.left_special_many(w, range(0, args.nmax + 1))
        data = [{"n": n, "factors": [vars(f) for f in reps[n].factors]} for n in sorted(reps)]
        plain = "\n".join(f"{n} {' '.join(sorted(reps[n].words))}" for n in sorted(reps))
        rows = [["n", "word", "prefix", "maximal", "total_bispecial"]] + [
            [n, f.word, f.is_prefix, f.is_maximal, f.is_total_bispecial]
            for n in sorted(reps) for f in reps[n].factors]
        return Output(data, plain, rows)
    if args.what == "blocks":
        b = an.maximal_blocks(w)
        data = {"0": sorted(b[0]), "1": sorted(b[1])}
        return Output(data, f"0: {data['0']}\n1: {data['1']}",
                      [["letter", "length"]] + [[a, n] for a in (0, 1) for n in sorted(b[a])])
    rep = an.frequency_report(w, wd.word(args.factor), args.windows)
    return Output(rep.to_json(), f"mean {rep.mean:.9g} max_deviation {rep.max_deviation:.3g}",
                  [["window", "frequency"]] + [[i, f] for i, f in enumerate(rep.frequencies)])


def cmd_dynamics(args) -> Output:
    N = args.N
    if args.what == "entropy":
        r = dy.entropy_report(N).to_json()
        return Output(r, "\n".join(f"{k} {v}" for k, v in r.items()), [list(r), list(r.values())])
    if args.what == "orbit":
        import numpy as np
        x0 = args.x0 if args.x0 is not None else float(np.random.default_rng(args.seed).random())
        seed = (x0, args.y0) if args.map == "NatExt" else x0
        o = dy.orbit(args.map, N, seed, args.count)
        states = o.states.tolist()
        data = {"map": o.map, "N": N, "seed": list(o.seed), "states": states,
                "digits": o.digits.tolist(), "boundary_steps": o.boundary.tolist()}
        plain = "\n".join(f"{d} {s}" for d, s in zip([""] + o.digits.tolist(), states))
        rows = [["step", "state", "digit"]] + [[i, s, ([None] + o.digits.tolist())[i]] for i, s in enumerate(states)]
        return Output(data, plain, rows)
    if args.what == "growth":
        digits = ex.take(args.digits, args.count)
        if len(digits) < args.count:
            raise ex.InsufficientDigits(f"need {args.count} digits, source gave {len(digits)}")
        ex.validate_greedy(digits, N)
        g = dy.growth_rate(digits, N, args.count)
        data = {"N": N, "log_q": g.log_q.tolist(), "log_sigma": g.log_sigma.tolist(),
                "levy_constant": dy.levy_constant(N)}
        rows = [["k", "log_q", "log_sigma"]] + [[k + 1, a, b] for k, (a, b) in enumerate(zip(g.log_q, g.log_sigma))]
        return Output(data, f"{g.log_q[-1]:.9g} {data['levy_constant']:.9g}", rows)
    if args.what == "natext":
        two, one = dy.natext_invariance_check(N, args.iterations, args.bins, args.seed)
        if args.csv_path:
            two.write_csv(args.csv_path)
        data = {"natext": two.to_json(), "marginal": one.to_json()}
        plain = f"tv2d {two.total_variation:.6g} tv1d {one.total_variation:.6g}"
        return Output(data, plain, [["check", "sup_norm", "total_variation"],
                                    ["natext", two.sup_norm, two.total_variation],
                                    ["marginal", one.sup_norm, one.total_variation]])
    res = dy.farey_invariance_check(args.a, args.b, N)
    return Output({"a": args.a, "b": args.b, "N": N, "residual": res}, f"{res:.3g}",
                  [["a", "b", "N", "residual"], [args.a, args.b, N, res]])


def cmd_verify(args) -> Output:
    if args.what == "acceptance":
        nums = None
        if args.criteria:
            try:
                nums = [int(t) for t in args.criteria.split(",")]
            except ValueError:
                raise UsageError("argument --criteria: expected comma-separated integers") from None
        results = acceptance.run(nums)
        ok = all(r.passed for r in results)
        return Output([r.to_json() for r in results], "\n".join(r.line() for r in results),
                      [["criterion", "title", "passed"]] + [[r.number, r.title, r.passed] for r in results],
                      EXIT_OK if ok else EXIT_VERIFY)
    N = args.N
    flavors = [args.flavor] if args.flavor else ["dual", "primal"]
    checks = []
    for flavor in flavors:
        w = _prefix(args, flavor)
        if args.what == "balance":
            bound, target = (N, 2) if flavor == "dual" else (N * N, 2 * N)
            prof = an.balance_profile(w, min(args.lmax, len(w)))
            wit = an.search_imbalance(w, target, args.lmax) if N >= 2 else None
            passed = prof.constant <= bound and (N == 1 or (wit is not None and wit.spread == target))
            row = {"flavor": flavor, "passed": passed, "spread": prof.constant, "bound": bound}
            if wit is not None:
                u, v = wit.words(w)
                row["witness"] = {"length": wit.length, "spread": wit.spread, "u": str(u), "v": str(v)}
        else:
            emp = an.factor_complexity(w, args.nmax)
            ref = an.complexity_closed_form(args.digits, N, args.nmax, flavor)
            bad = [n for n in range(args.nmax + 1) if emp.p[n] != ref.p[n]]
            disc = an.compare_displayed(args.digits, N, args.nmax, flavor)
            passed = not bad
            row = {"flavor": flavor, "passed": passed, "mismatches": bad[:20],
                   "displayed_form_discrepancies": [
                       {"n": d.n, "expected": d.expected, "displayed": str(d.displayed), "band": d.band}
                       for d in disc]}
        checks.append(row)
    ok = all(c["passed"] for c in checks)
    plain = "\n".join(f"[{'PASS' if c['passed'] else 'FAIL'}] {args.what} {c['flavor']}" for c in checks)
    rows = [["flavor", "passed"]] + [[c["flavor"], c["passed"]] for c in checks]
    return Output({"check": args.what, "N": N, "results": checks}, plain, rows, EXIT_OK if ok else EXIT_VERIFY)


COMMANDS = {"expand": cmd_expand, "word": cmd_word, "analyze": cmd_analyze,
            "dynamics": cmd_dynamics, "verify": cmd_verify}


def render(out: Output, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out.data, indent=2, default=str)
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(out.rows or [[out.plain]])
        return buf.getvalue().rstrip("\n")
    return out.plain


def _error(kind: str, message: str, fmt: str | None, code: int, stdout, stderr) -> int:
    if fmt == "json":
        print(json.dumps({"error": {"type": kind, "message": message}}), file=stdout)
    else:
        print(f"ncf: {kind}: {message}", file=stderr)
    return code


def _wants_json(argv: list[str]) -> bool:
    return any(a == "json" and i > 0 and argv[i - 1] == "--format" for i, a in enumerate(argv)) \
        or "--format=json" in argv


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    fmt = "json" if _wants_json(argv) else None
    try:
        args = parse_args(argv)
    except UsageError as exc:
        return _error("usage", str(exc), fmt, EXIT_DOMAIN, stdout, stderr)
    except SystemExit as exc:          # --help
        return int(exc.code or 0)
    try:
        out = COMMANDS[args.command](args)
    except UsageError as exc:
        return _error("usage", str(exc), args.format, EXIT_DOMAIN, stdout, stderr)
    except (ValueError, ArithmeticError) as exc:
        return _error(type(exc).__name__, str(exc), args.format, EXIT_DOMAIN, stdout, stderr)
    print(render(out, args.format), file=stdout)
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
