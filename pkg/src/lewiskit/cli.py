"""Command-line entry point.

Exit status: 0 success, 1 failed check or countermodel found, 2 usage or
input error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import algebra as alg
from . import axioms, duality, proofs, spheres
from .search import Logic, search_countermodel
from .syntax import FormulaSyntaxError, parse, tau_translate, to_json, to_text

OK, FAILED, USAGE, BREACH = 0, 1, 2, 3


class InvariantBreach(RuntimeError):
    pass


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        payload = {"format": 1, "command": args.command, **payload}
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    else:
        for ln in lines:
            print(ln)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) in (None, [])]
    if missing:
        raise argparse.ArgumentTypeError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _formula(args):
    _need(args, "formula")
    return parse(args.formula)


def _premises(args):
    return [parse(p) for p in args.premises or []]


# ---------------------------------------------------------------------------


def cmd_parse(args) -> int:
    phi = _formula(args)
    _emit(args, {"text": to_text(phi), "tree": to_json(phi)}, [to_text(phi)])
    return OK


def cmd_eval(args) -> int:
    _need(args, "model")
    m = spheres.load_model(args.model[0])
    phi = _formula(args)
    mask = m.eval(phi)
    _emit(args, {"formula": to_text(phi), "worlds": m.names_of(mask)}, [m.format_set(mask)])
    return OK


def cmd_model_check(args) -> int:
    if args.model:
        models = [spheres.load_model(path) for path in args.model]
    elif args.samples:
        rng = random.Random(args.seed)
        models = [spheres.random_model(rng, rng.randint(1, args.max_worlds), ("p", "q"), args.flags or "")
                  for _ in range(args.samples)]
    else:
        raise argparse.ArgumentTypeError("give --model or --samples")
    wanted = [spheres.ModelClass.parse(c) for c in args.cls] if args.cls else []
    wanted += [c for c in spheres.classes_of_flags(args.flags or "") if c not in wanted]
    phi = parse(args.formula) if args.formula else None
    status = OK
    reports, lines = [], []
    for i, m in enumerate(models):
        classes = {}
        for c in spheres.ModelClass:
            rep = spheres.check_class(m, c)
            classes[c.value] = {"ok": rep.ok, "witness": rep.witness}
            if c in wanted and not rep.ok:
                status = FAILED
        if not spheres.limit_assumption_holds(m):
            raise InvariantBreach("finite model violates the limit assumption")
        entry = {"index": i, "classes": classes}
        lines.append(f"model {i}: worlds {', '.join(m.worlds)}")
        for name, r in classes.items():
            mark = "yes" if r["ok"] else f"no (witness {r['witness']})"
            if not wanted or spheres.ModelClass(name) in wanted:
                lines.append(f"  {name}: {mark}")
        if phi is not None:
            valid = m.valid(phi)
            entry["valid"] = valid
            entry["fails_at"] = m.names_of(m.full & ~m.eval(phi))
            lines.append(f"  {to_text(phi)}: {'valid' if valid else 'fails at ' + m.format_set(m.full & ~m.eval(phi))}")
            if not valid:
                status = FAILED
        if args.samples and args.flags:
            # every extension axiom of the requested class must hold on random instances
            rng = random.Random(args.seed + i if args.seed is not None else i)
            for flag in args.flags:
                sub = {v: parse(rng.choice(["p", "q", "~p", "p & q", "p | ~q", "p |> q", "box q"])) for v in axioms.METAVARS}
                inst = axioms.instance(flag, sub)
                if not m.valid(inst):
                    raise InvariantBreach(f"axiom {flag} fails on a model of its class: {m.dumps()}")
        reports.append(entry)
    _emit(args, {"models": reports, "ok": status == OK}, lines)
    return status


def _load_algebra(args):
    _need(args, "algebra")
    return alg.load_algebra(args.algebra[0])


def cmd_algebra_check(args) -> int:
    A = _load_algebra(args)
    ax = alg.check_axioms(A)
    payload = {"axioms": {k: v for k, v in ax.failures.items()}}
    lines = [f"{k}: {'pass' if v is None else 'FAIL at ' + str(tuple(A.name(x) for x in v))}" for k, v in ax.failures.items()]
    status = OK if ax.ok else FAILED
    if args.variety:
        for v in args.variety:
            rep = alg.check_variety(A, v, args.u_reading)
            payload.setdefault("varieties", {})[v] = {"ok": rep.ok, "failures": {
                k: ({n: A.name(x) for n, x in w.items()} if w else None) for k, w in rep.failures.items()}}
            lines.append(f"{v}: {'pass' if rep.ok else 'FAIL'}")
            for k, w in rep.failures.items():
                if w is not None:
                    lines.append(f"  {k} fails at " + ", ".join(f"{n}={A.name(x)}" for n, x in w.items()))
            if not rep.ok:
                status = FAILED
    if ax.ok:
        lat = alg.lattice_filters(A)
        opn = alg.open_filters(A)
        cong = alg.congruences(A)
        payload["box"] = [A.box(x) for x in A.elements]
        payload["lattice_filters"] = [sorted(F.elements) for F in lat]
        payload["open_filters"] = [sorted(F.elements) for F in opn]
        payload["congruences"] = [list(map(list, c.blocks)) for c in cong]
        lines.append("box: " + ", ".join(f"{A.name(x)}->{A.name(A.box(x))}" for x in A.elements))
        lines.append(f"lattice filters: {len(lat)}; open filters: {len(opn)}; congruences: {len(cong)}")
        if len(cong) != len(opn) or not all(alg.is_congruence(A, c) for c in cong):
            raise InvariantBreach("open filters and congruences disagree")
    _emit(args, {**payload, "ok": status == OK}, lines)
    return status


def cmd_dualize(args) -> int:
    out: dict = {}
    lines: list[str] = []
    if args.algebra:
        A = _load_algebra(args)
        if not alg.is_v_algebra(A):
            _emit(args, {"ok": False, "error": "not a V-algebra"}, ["input is not a V-algebra"])
            return FAILED
        S = duality.alpha_from_algebra(A)
        if not duality.check_alpha_axioms(S):
            raise InvariantBreach("dual of a V-algebra is not an alpha-model")
        T = duality.sphere_from_alpha(S)
        out["alpha"] = S.to_dict()
    elif args.alpha:
        S = duality.load_alpha(args.alpha)
        rep = duality.check_alpha_axioms(S)
        if not rep:
            _emit(args, {"ok": False, "failures": rep.failures}, [f"not an alpha-model: {rep.failures}"])
            return FAILED
        out["algebra"] = duality.algebra_from_alpha(S).to_dict()
        T = duality.sphere_from_alpha(S)
    elif args.model:
        T = duality.SphereStructure.from_model(spheres.load_model(args.model[0]))
        S = duality.alpha_from_sphere(T)
        out["alpha"] = S.to_dict()
        out["algebra"] = duality.algebra_from_alpha(S).to_dict()
    else:
        raise argparse.ArgumentTypeError("give --algebra, --alpha or --model")
    out["spheres"] = T.to_model().to_dict()
    m = T.to_model()
    for x, p in enumerate(S.points):
        lines.append(f"sigma({p}) = " + ", ".join(m.format_set(s) for s in T.sigma[x]) if T.sigma[x] else f"sigma({p}) = (none)")
    for a in range(1 << S.n):
        lines.append("f(" + m.format_set(a) + ") = " + "; ".join(f"{p}: {m.format_set(S.f[a][x])}" for x, p in enumerate(S.points)))
    _emit(args, {**out, "ok": True}, lines)
    return OK


def cmd_roundtrip(args) -> int:
    if args.algebra:
        A = _load_algebra(args)
        if not alg.is_v_algebra(A):
            _emit(args, {"ok": False, "error": "not a V-algebra"}, ["input is not a V-algebra"])
            return FAILED
        rt = duality.roundtrip(A)
        iso, ident = rt.algebra_iso, rt.alpha_identity
    elif args.alpha:
        S = duality.load_alpha(args.alpha)
        if not duality.check_alpha_axioms(S):
            _emit(args, {"ok": False, "error": "not an alpha-model"}, ["input is not an alpha-model"])
            return FAILED
        ident = duality.alpha_roundtrip_check(S)
        iso = duality.stone_roundtrip_check(duality.algebra_from_alpha(S))
    else:
        raise argparse.ArgumentTypeError("give --algebra or --alpha")
    lines = [f"algebra -> alpha-model -> algebra: {'pass' if iso else 'FAIL'}",
             f"alpha-model -> spheres -> alpha-model: {'pass' if ident else 'FAIL'}"]
    _emit(args, {"algebra_roundtrip": iso, "alpha_roundtrip": ident, "ok": iso and ident}, lines)
    if not (iso and ident):
        # both round trips are theorems for valid inputs
        raise InvariantBreach("round trip failed on a valid input")
    return OK


def cmd_enumerate(args) -> int:
    algebras = alg.enumerate_v_algebras(args.atoms)
    lines = [f"{len(algebras)} V-algebras with {args.atoms} atoms"]
    payload = {"count": len(algebras), "algebras": [A.to_dict() for A in algebras]}
    if args.variety:
        payload["varieties"] = {}
        for v in args.variety:
            n = sum(1 for A in algebras if alg.check_variety(A, v, args.u_reading))
            payload["varieties"][v] = n
            lines.append(f"  in {v}: {n}")
    _emit(args, payload, lines)
    return OK


def cmd_consequence(args) -> int:
    gamma = _premises(args)
    phi = _formula(args)
    logic = Logic.parse(args.logic) if args.logic else Logic("local", "")
    if args.model:
        models = [spheres.load_model(p) for p in args.model]
        fn = spheres.local_consequence if logic.mode == "local" else spheres.global_consequence
        res = fn(models, gamma, phi)
        payload = {"holds": res.holds, "model_index": res.model_index, "world": res.world}
        lines = ["holds" if res else f"fails in model {res.model_index}" + (f" at {res.world}" if res.world else "")]
    elif args.algebra:
        algebras = [alg.load_algebra(p) for p in args.algebra]
        if logic.mode == "local":
            res = alg.degree_consequence(algebras, gamma, phi)
        else:
            res = alg.equational_consequence(algebras, [tau_translate(g) for g in gamma], tau_translate(phi))
        payload = {"holds": res.holds, "algebra_index": res.algebra_index, "assignment": res.assignment}
        if res:
            lines = ["holds"]
        else:
            A = algebras[res.algebra_index]
            lines = [f"fails in algebra {res.algebra_index} under " + ", ".join(f"{k}={A.name(v)}" for k, v in res.assignment.items())]
    else:
        raise argparse.ArgumentTypeError("give --model or --algebra files")
    _emit(args, payload, lines)
    return OK if payload["holds"] else FAILED


def cmd_countermodel(args) -> int:
    gamma = _premises(args)
    phi = _formula(args)
    _need(args, "logic")
    res = search_countermodel(gamma, phi, args.logic, args.max_worlds, args.max_levels)
    if res.found:
        cm = res.countermodel
        lines = [f"countermodel ({'at ' + cm.world if cm.world else 'global'}):", json.dumps(cm.model.to_dict(), ensure_ascii=False)]
        _emit(args, {"found": True, **cm.to_dict()}, lines)
        return FAILED
    _emit(args, {"found": False, "max_worlds": args.max_worlds}, [f"none up to {args.max_worlds}"])
    return OK


def cmd_prove(args) -> int:
    if args.script:
        pr = proofs.bundled_script(args.script)
    elif args.proof:
        pr = proofs.load_proof(args.proof)
    else:
        raise argparse.ArgumentTypeError("give --proof or --script")
    name = args.logic or pr.calculus or "GV"
    base = args.base or pr.base
    calc = proofs.Calculus.parse(name, base, args.u_reading)
    res = proofs.check_proof(calc, pr)
    payload = {"accepted": res.accepted, "line": res.line, "reason": res.reason, "calculus": calc.name, "base": base,
               "conclusion": to_text(pr.conclusion) if pr.lines else None}
    lines = [f"accepted under {calc.name} (base {base}): {to_text(pr.conclusion)}" if res
             else f"rejected at line {res.line}: {res.reason}"]
    if res and args.semantic:
        sr = search_countermodel(list(pr.premises), pr.conclusion, Logic(calc.strength, calc.extensions), args.max_worlds)
        payload["sound_up_to"] = args.max_worlds
        if sr.found:
            raise InvariantBreach("accepted proof has a countermodel: " + json.dumps(sr.countermodel.to_dict()))
        lines.append(f"no countermodel up to {args.max_worlds} worlds")
    _emit(args, payload, lines)
    return OK if res else FAILED


COMMANDS = {
    "parse": cmd_parse, "eval": cmd_eval, "model-check": cmd_model_check, "algebra-check": cmd_algebra_check,
    "dualize": cmd_dualize, "roundtrip": cmd_roundtrip, "enumerate": cmd_enumerate,
    "consequence": cmd_consequence, "countermodel": cmd_countermodel, "prove": cmd_prove,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lewiskit", description="Lewis conditional logic toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--formula")
    common.add_argument("--premises", action="append", default=[], help="premise formula (repeatable)")
    common.add_argument("--model", action="append", default=[], help="sphere-model JSON file (repeatable)")
    common.add_argument("--algebra", action="append", default=[], help="algebra JSON file (repeatable)")
    common.add_argument("--alpha", help="alpha-model JSON file")
    common.add_argument("--logic", help="GV, LV, GVC, LVCSU, ...")
    common.add_argument("--variety", action="append", help="V..., LC or CA (repeatable)")
    common.add_argument("--max-worlds", type=int, default=3)
    common.add_argument("--max-levels", type=int, default=2)
    common.add_argument("--seed", type=int)
    common.add_argument("--u-reading", choices=axioms.U_READINGS, default="implication")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "model-check":
            sp.add_argument("--class", dest="cls", action="append", help="model class to require (repeatable)")
            sp.add_argument("--flags", help="extension letters whose classes are required")
            sp.add_argument("--samples", type=int, help="check this many seeded random models instead of files")
        if name == "enumerate":
            sp.add_argument("--atoms", type=int, default=2)
        if name == "prove":
            sp.add_argument("--proof", help="proof script JSON file")
            sp.add_argument("--script", choices=proofs.SCRIPT_NAMES, help="bundled proof script")
            sp.add_argument("--base", choices=proofs.BASES)
            sp.add_argument("--semantic", action="store_true", help="also search for a bounded countermodel")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvariantBreach as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return BREACH
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"lewiskit: error: {exc}", file=sys.stderr)
        return USAGE
    except (FormulaSyntaxError, spheres.ModelError, alg.AlgebraError, duality.DualityError,
            proofs.ProofFormatError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"lewiskit: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
