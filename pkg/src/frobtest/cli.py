"""Command-line interface.

Exit codes: 0 when the requested value is certified (or every verdict
holds), 2 when something was truncated or left undecided, 1 on errors and
on violated claims.
"""

from __future__ import annotations

import argparse
import sys

from .algebra import split_generators
from .certificates import Caps, CertifiedValue, Status, is_decided
from .cohomology import h0_module, hsl_local_cohomology, hsl_relative_h0, hsl_ring, hsl_top
from .errors import FrobtestError
from .frobenius import frobenius_closure
from .harness import (
    HOLDS,
    UNDECIDED,
    builtin_manifest,
    cmd_batch,
    cmd_verify_bound,
    cmd_verify_properties,
    dumps,
)
from .parameters import default_sop, is_system_of_parameters
from .rings import PresentedRing, load_ring


def _exit_for(status: Status) -> int:
    return 0 if is_decided(status) else 2


def _exit_for_verdict(verdict: str) -> int:
    if verdict == HOLDS:
        return 0
    return 2 if verdict == UNDECIDED else 1


def _ideal(R: PresentedRing, text: str | None, required: bool = True):
    if text is None:
        if required:
            raise FrobtestError("--ideal is required for this command")
        return None
    return R.ideal(text)


def _sequence(R: PresentedRing, text: str | None, caps: Caps) -> list:
    if text is None:
        return list(default_sop(R, caps).elements)
    # parsed one by one to keep the user's order
    x = [R.parse(s) for s in split_generators(text)]
    if not is_system_of_parameters(R, x, caps).value:
        raise FrobtestError(f"({text}) is not a system of parameters of {R.label or R}")
    return x


def compute_closure(R, I, caps):
    res = frobenius_closure(I, R, caps)
    same = res.closure.same_ideal(R.lift(I).reduced(caps), caps)
    lines = [("I^F = I" if same else "I^F = " + str(res.closure)) + f", Fte = {res.fte.value}"
             + f" [{_tag(res.fte)}]"]
    lines += _witness_lines(R, res)
    return res.to_dict(), lines, res.fte.status


def compute_fte(R, I, caps):
    res = frobenius_closure(I, R, caps)
    lines = [f"Fte = {res.fte.describe()}"] + _witness_lines(R, res)
    return res.to_dict(), lines, res.fte.status


def _tag(v: CertifiedValue) -> str:
    if v.status is Status.TRUNCATED and v.cap:
        return f"TRUNCATED({v.cap})"
    return str(v.status)


def _witness_lines(R, res) -> list:
    p = R.p
    return [f"witness: ({w.element})^({p}^{w.e}) lies in I^[{p}^{w.e}] + relations"
            for w in res.witnesses]


def compute_hsl(R, x, degree, caps, K=None):
    if degree is None:
        agg = hsl_ring(R, x, caps)
        lines = [f"HSL(H^{r.degree}) = {r.value.describe()}, F-nilpotent: {_yes(r.nilpotent)}"
                 for r in agg.reports]
        lines.append(f"HSL(R) = {agg.value.describe()}")
        lines.append(f"bound sum_k C(d,k) HSL(H^k) = {agg.bound.describe()}")
        return agg.to_dict(), lines, agg.value.status
    d = len(x)
    if degree == d:
        rep = hsl_top(R, x, caps, K)
    else:
        rep = hsl_local_cohomology(R, x, degree, caps, K)
    lines = [f"HSL(H^{degree}) = {rep.value.value}, F-nilpotent: {_yes(rep.nilpotent)}"
             + f" [{_tag(rep.value)}]"]
    return rep.to_dict(), lines, rep.value.status


def _yes(flag) -> str:
    return {True: "yes", False: "no"}.get(flag, "unknown")


def compute_h0(R, K, caps):
    module = h0_module(R, K, caps)
    rep = hsl_relative_h0(R, K, caps)
    lines = [f"length(H^0_m(R/K)) = {module.length}",
             "basis: " + (", ".join(map(str, module.basis)) or "(empty)"),
             f"HSL_R = {rep.value.describe()}, F-nilpotent: {_yes(rep.nilpotent)}"]
    out = {"module": module.to_dict(), "hsl": rep.to_dict()}
    return out, lines, rep.value.status


def _caps(args) -> Caps:
    return Caps.from_env(
        max_e=args.max_e, window=args.window, max_stage=args.max_stage,
        degree_cap=args.degree_cap, gb_steps=args.gb_steps)


def _add_caps(p: argparse.ArgumentParser):
    g = p.add_argument_group("caps (override FROBTEST_* environment values)")
    g.add_argument("--max-e", type=int)
    g.add_argument("--max-stage", type=int)
    g.add_argument("--window", type=int)
    g.add_argument("--degree-cap", type=int)
    g.add_argument("--gb-steps", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frobtest",
        description="Frobenius closure, test exponents and HSL numbers over F_p.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", required=True,
                        help="ring file (JSON) or built-in name such as fermat2")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--seed", type=int, default=0)
    _add_caps(common)

    for name, help_ in [("closure", "Frobenius closure of an ideal"),
                        ("fte", "Frobenius test exponent of an ideal"),
                        ("h0", "H^0_m(R/K) and its relative HSL number")]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--ideal", required=name != "h0", default=None)

    p = sub.add_parser("hsl", parents=[common], help="HSL numbers of local cohomology")
    p.add_argument("--degree", type=int, help="cohomological index (default: all)")
    p.add_argument("--ideal", help="system of parameters to use (default: chosen automatically)")

    for name in ("verify-bound", "verify-properties"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--samples", type=int, default=5 if name == "verify-bound" else 3)
        p.add_argument("--degree", type=int, default=2, help="maximal degree of sampled elements")
        if name == "verify-properties":
            p.add_argument("--e-max", type=int, default=2)

    p = sub.add_parser("batch", help="run a manifest of rings")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest")
    src.add_argument("--builtin", action="store_true", help="use the built-in ring library")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    _add_caps(p)
    return parser


def run(args) -> int:
    caps = _caps(args)
    if args.command == "batch":
        manifest = builtin_manifest() if args.builtin else args.manifest
        code, results = cmd_batch(manifest, args.out_dir, args.jobs, caps)
        for r in results:
            print(f"{r.get('label') or r['ring_ref']}: {r['status']}"
                  + (f" ({r['error']})" if "error" in r else ""))
        print(f"summary: {args.out_dir}/summary.csv")
        return code

    R = load_ring(args.ring)
    if args.command in ("verify-bound", "verify-properties"):
        if args.command == "verify-bound":
            report = cmd_verify_bound(R, args.samples, args.seed, caps, args.degree)
            lines = [f"bound = {report['hsl']['bound']['value']}"
                     f" [{report['hsl']['bound']['status']}]",
                     f"max sampled Fte = {report['max_sampled_fte']}",
                     f"verdicts: {report['counts']}",
                     f"bound claim: {report['verdict']}"]
        else:
            report = cmd_verify_properties(R, args.samples, args.e_max, args.seed, caps,
                                           args.degree)
            lines = [f"{k}: {v}" for k, v in report["verdicts"].items()]
            lines.append(f"overall: {report['verdict']}")
        _emit(args, report, lines)
        return _exit_for_verdict(report["verdict"])

    if args.command == "closure":
        out, lines, status = compute_closure(R, _ideal(R, args.ideal), caps)
    elif args.command == "fte":
        out, lines, status = compute_fte(R, _ideal(R, args.ideal), caps)
    elif args.command == "h0":
        K = _ideal(R, args.ideal, required=False) or R.ideal([])
        out, lines, status = compute_h0(R, K, caps)
    else:
        x = _sequence(R, args.ideal, caps)
        out, lines, status = compute_hsl(R, x, args.degree, caps)
    report = {"command": args.command, "ring": R.to_ringfile(), "result": out}
    _emit(args, report, lines)
    return _exit_for(status)


def _emit(args, report: dict, lines: list):
    if args.json:
        sys.stdout.write(dumps(report))
    else:
        print("\n".join(lines))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except FrobtestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
