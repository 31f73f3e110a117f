"""Command-line entry point: ``einfty-bp <command> [options]``.

Exit status is 0 on success, 1 when a check fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import bp_tower as tower, verify
from .cobar import (
    differential,
    ext_low_lines,
    format_cobar,
    get_comodule,
    massey_triple,
    module_json,
    parse_cobar,
    parse_module,
    synthetic_dga,
    toda_shadow_check,
)
from .dual_steenrod import DualSteenrodAlgebra, parse_steenrod
from .dyer_lashof import NotSupported
from .free_einfty_homology import cone_generators, px_generators, rational_px
from .graded_algebra import SUPPORTED_PRIMES
from .kunneth_ss import apply_d_pminus1, build_e2, compare_with_cone_answer, einfty_series

MAX_CUTOFF = 200


class CheckFailed(Exception):
    pass


def _emit(args, data: dict, table: str) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2, default=str))
    else:
        print(table)


def _prime(text: str) -> int:
    p = int(text)
    if p not in SUPPORTED_PRIMES:
        raise argparse.ArgumentTypeError(f"prime must be one of {list(SUPPORTED_PRIMES)}")
    return p


def _cutoff(text: str) -> int:
    n = int(text)
    if not 0 <= n <= MAX_CUTOFF:
        raise argparse.ArgumentTypeError(f"cutoff must be between 0 and {MAX_CUTOFF}")
    return n


def _series_line(coeffs) -> str:
    return " ".join(str(c) for c in coeffs)


# ---------------------------------------------------------------------------
# commands


def cmd_psi(args) -> None:
    if args.comodule in (None, "steenrod"):
        A = DualSteenrodAlgebra(args.prime)
        x = parse_steenrod(args.element, A)
        t = A.coproduct(x)
        terms = [
            {"coeff": c, "left": a.to_json(), "right": b.to_json()}
            for (a, b), c in sorted(t.terms.items(), key=lambda kv: (A.sort_key(kv[0][0]), A.sort_key(kv[0][1])))
        ]
    else:
        M = get_comodule(args.comodule, args.prime, args.max)
        x = parse_module(args.element, M)
        t = M.coaction(x)
        terms = [{"coeff": c, "left": a.to_json(), "right": module_json(M, m)} for (a, m), c in t.terms.items()]
    _emit(args, {"p": args.prime, "element": args.element, "coproduct": terms}, f"psi({args.element}) = {t}")


def cmd_px_gens(args) -> None:
    d = args.base_degree
    if args.rational:
        report = rational_px("odd" if d % 2 else "even", d, args.max)
    elif args.cone:
        report = cone_generators(args.prime, d, args.max)
    else:
        report = px_generators(args.prime, [("x", d)], args.max)
    lines = [f"{'degree':>6}  {'kind':<10} generator"]
    lines += [f"{e.degree:>6}  {e.kind:<10} {e.name}" for e in report.entries]
    lines.append(f"series: {_series_line(report.series.coefficients)}")
    lines += [f"note: {n}" for n in report.notes]
    _emit(args, report.to_json(), "\n".join(lines))


def cmd_kss(args) -> None:
    p = args.prime
    if args.compare:
        rep = compare_with_cone_answer(p, args.attach, args.max)
        table = "\n".join(
            [
                f"E-infinity: {_series_line(rep.einfty.coefficients)}",
                f"cone:       {_series_line(rep.cone.coefficients)}",
                "equal" if rep.ok else f"first mismatch in degree {rep.first_mismatch}",
            ]
        )
        _emit(args, rep.to_json(), table)
        if not rep.ok:
            raise CheckFailed("series differ")
        return
    page = build_e2(p, args.attach, args.max)
    if args.page in ("p", "inf"):
        page = apply_d_pminus1(page)
    lines = [f"page {page.page}"]
    lines += [f"  ({g.s},{g.t})  {g.kind:<14} {g.name}" for g in page.generators if g.total_degree <= args.max]
    series = page.presentation_series(args.max) if page.page == 2 else einfty_series(page, args.max)
    lines.append(f"series: {_series_line(series.coefficients)}")
    _emit(args, page.to_json(), "\n".join(lines))


def cmd_cobar_d(args) -> None:
    M = get_comodule(args.comodule, args.prime, args.max)
    x = parse_cobar(args.element, M)
    dx = differential(x)
    _emit(
        args,
        {"element": x.to_json(), "differential": dx.to_json()},
        f"d({format_cobar(x)}) = {format_cobar(dx)}",
    )


def cmd_ext1(args) -> None:
    M = get_comodule(args.comodule, args.prime, max(args.to, 1))
    rep = ext_low_lines(M, getattr(args, "from"), args.to)
    lines = [f"{'degree':>6}  Ext^0  Ext^1  representatives"]
    for d, (e0, e1) in rep.dimensions().items():
        reps = "; ".join(format_cobar(x) for x in rep.ext1.get(d, []))
        lines.append(f"{d:>6}  {e0:>5}  {e1:>5}  {reps}")
    _emit(args, rep.to_json(), "\n".join(lines))


def cmd_massey(args) -> None:
    if args.synthetic:
        D = synthetic_dga(args.prime)
        a, b, c = D.element("a"), D.element("b"), D.element("c")
        res = massey_triple(a, b, c, dga=D)
        data = {"bracket": "<a, b, c>", "representative": repr(res.representative), "indeterminacy": res.indeterminacy}
        _emit(args, data, f"<a, b, c> = [{res.representative}]  indeterminacy {res.indeterminacy}")
        return
    rep = toda_shadow_check(args.toda, args.prime)
    data = {
        "n": rep.n,
        "p": rep.p,
        "steps": [{"step": s, "ok": ok} for s, ok in rep.steps],
        "representative": None if rep.representative is None else rep.representative.to_json(),
        "sign": rep.sign,
        "indeterminacy": rep.indeterminacy,
        "caveat": rep.caveat,
    }
    lines = [f"{'PASS' if ok else 'FAIL'}  {s}" for s, ok in rep.steps]
    if rep.representative is not None:
        lines.append(f"<h_0, alpha_[{rep.n}], 1> contains {format_cobar(rep.representative)} (= {rep.sign:+d} u_{rep.n})")
    lines += [f"indeterminacy: {rep.indeterminacy}", f"caveat: {rep.caveat}"]
    _emit(args, data, "\n".join(lines))
    if not rep.ok:
        raise CheckFailed("Toda shadow check failed")


def _stage_table(state: tower.TowerState) -> list[str]:
    lines = []
    for n in range(0, state.n + 1):
        lines.append(f"stage {n}")
        if n >= 1:
            lines.append(f"  |z_{n}| = {tower.generator_degree(state.p, n)}")
            lines.append(f"  u_{n} = {format_cobar(state.us[n])}")
        lines.append(f"  alpha_[{n + 1}] = {format_cobar(state.alphas[n + 1])}")
        for c in state.stage_checks(n):
            lines.append(f"  {'PASS' if c['ok'] else 'FAIL'}  {c['check']}")
    lines.append(f"rational series: {_series_line(state.rational.coefficients)}")
    return lines


def cmd_tower_run(args) -> None:
    if args.json:
        args.format = "json"
    try:
        state = tower.run(args.prime, args.stages, args.max)
    except tower.RecursionMismatch as exc:
        raise CheckFailed(str(exc)) from exc
    data = state.to_json()
    lines = _stage_table(state)
    ok = state.ok
    if args.verify_bp and args.stages >= 1:
        rep = tower.bp_comparison(state)
        data["bp"] = rep.to_json()
        lines += [f"{'PASS' if i['ok'] else 'FAIL'}  {i['name']}" for i in rep.items] + rep.notes
        ok = ok and rep.ok
    _emit(args, data, "\n".join(lines))
    if not ok:
        raise CheckFailed("tower checks failed")


def cmd_bp_check(args) -> None:
    state = tower.run(args.prime, args.stages, args.max)
    rep = tower.bp_comparison(state, args.max)
    data = rep.to_json()
    lines = [f"{'PASS' if i['ok'] else 'FAIL'}  {i['name']}" for i in rep.items] + rep.notes
    if args.prime == 2:
        variants = tower.variant_comparison(args.stages)
        data["variants"] = variants
        for name, v in variants.items():
            lines.append(f"variant {name}: generator solve {', '.join(v['generator solve'])}")
            for row in v["stages"]:
                flags = ", ".join(f"{k}={'yes' if val else 'no'}" for k, val in row.items() if k != "stage")
                lines.append(f"  stage {row['stage']}: {flags}")
    _emit(args, data, "\n".join(lines))
    if not rep.ok:
        raise CheckFailed("BP comparison failed")


def cmd_verify_all(args) -> None:
    if args.acceptance:
        results = verify.run_acceptance()
    else:
        results = verify.run_suites(args.prime, args.max, args.seed)
    data = {"prime": args.prime, "max": args.max, "seed": args.seed, "suites": [r.to_json() for r in results]}
    _emit(args, data, "\n".join(r.line(timing=args.acceptance) for r in results))
    if not all(r.passed for r in results):
        raise CheckFailed("some suites failed")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    default_p = os.environ.get("EINFTY_BP_PRIME", "3")
    default_n = os.environ.get("EINFTY_BP_MAX", "40")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=_prime, default=_prime(default_p))
    common.add_argument("--max", type=_cutoff, default=_cutoff(default_n), help="degree cutoff N")
    common.add_argument("--format", choices=("json", "table"), default="table")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="einfty-bp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("psi", parents=[common], help="coproduct or coaction of an element")
    s.add_argument("--element", required=True, help='e.g. "zeta_1^2 taubar_0" or "t_1^3"')
    s.add_argument("--comodule", help="steenrod (default), bp, trivial or tower[n]")
    s.set_defaults(func=cmd_psi)

    s = sub.add_parser("px-gens", parents=[common], help="generators of free E-infinity homology")
    s.add_argument("--base-degree", type=int, required=True)
    s.add_argument("--rational", action="store_true")
    s.add_argument("--cone", action="store_true", help="generators adjoined by coning off S^d")
    s.set_defaults(func=cmd_px_gens)

    s = sub.add_parser("kss", parents=[common], help="Kunneth spectral sequence for a cell attachment")
    s.add_argument("--attach", type=int, required=True)
    s.add_argument("--page", choices=("2", "p", "inf"), default="inf")
    s.add_argument("--compare", action="store_true")
    s.set_defaults(func=cmd_kss)

    s = sub.add_parser("cobar-d", parents=[common], help="cobar differential of an element")
    s.add_argument("--comodule", default="trivial")
    s.add_argument("--element", required=True, help='e.g. "taubar_0|t_1 + taubar_1|1"')
    s.set_defaults(func=cmd_cobar_d)

    s = sub.add_parser("ext1", parents=[common], help="Ext^0 and Ext^1 in a degree window")
    s.add_argument("--comodule", default="trivial")
    s.add_argument("--from", type=int, default=0)
    s.add_argument("--to", type=_cutoff, required=True)
    s.set_defaults(func=cmd_ext1)

    s = sub.add_parser("massey", parents=[common], help="Massey products")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--synthetic", action="store_true", help="<a, b, c> in the small test dga")
    g.add_argument("--toda", type=int, default=1, help="replay u_n in <h_0, alpha_[n], 1>")
    s.set_defaults(func=cmd_massey)

    s = sub.add_parser("tower-run", parents=[common], help="run the tower recursion")
    s.add_argument("--stages", type=int, required=True)
    s.add_argument("--verify-bp", action="store_true")
    s.add_argument("--json", action="store_true", help="same as --format json")
    s.set_defaults(func=cmd_tower_run)

    s = sub.add_parser("bp-check", parents=[common], help="compare the tower with H_*(BP)")
    s.add_argument("--stages", type=int, default=2)
    s.set_defaults(func=cmd_bp_check)

    s = sub.add_parser("verify-all", parents=[common], help="run every verification suite")
    s.add_argument("--acceptance", action="store_true", help="run the fixed acceptance criteria instead")
    s.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, LookupError, NotSupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
