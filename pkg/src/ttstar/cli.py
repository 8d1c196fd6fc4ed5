"""Command-line entry point.

Exit codes: 0 success, 1 check failure, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .kernel import ProofError, check_derivation, format_sequent
from .oracle import (
    BudgetExceeded,
    EnumerationBudget,
    NotFound,
    arith_family,
    check_derivation_semantically,
    compensation_sweep,
    find_fact1_countermodel,
    theorem1_check,
)
from .semantics import EvaluationError, ModelError, evaluate, format_value, parse_assignment
from .syntax import ParseError, Signature, default_signature, parse
from .typecheck import TypeCheckError, infer

OK, FAILED, INPUT_ERROR, OVER_BUDGET = 0, 1, 2, 3


def _budget(args) -> EnumerationBudget:
    items = list(args.budget or [])
    if getattr(args, "max_order", None) is not None:
        items.append(f"order={args.max_order}")
    return EnumerationBudget.from_items(items)


def _signature(path) -> Signature:
    sig = default_signature()
    if path:
        sig = sig.merged(Signature.load(path))
    return sig


def cmd_check(args) -> int:
    from .script import load_script

    sig = Signature.load(args.sig) if args.sig else None
    script = load_script(args.proof, sig)
    try:
        report = check_derivation(script.root, script.sig)
    except ProofError as exc:
        print(f"FAIL {args.proof}: {exc}")
        return FAILED
    print(format_sequent(report.conclusion, script.sig))
    for rule, n in sorted(report.rule_counts.items()):
        print(f"  {rule}: {n}")
    for c in report.collapses:
        print(f"  collapse: {c}")
    if args.oracle:
        bad = [n for n in check_derivation_semantically(script.root, script.sig, _budget(args))
               if not n.verdict.valid]
        for n in bad:
            print(f"FAIL {n.path} {n.rule} {n.verdict.witness}")
        if bad:
            return FAILED
        print("oracle: every rule instance valid")
    return OK


def cmd_eval(args) -> int:
    from .corpus import resolve_model

    sig = _signature(args.sig)
    model = resolve_model(args.model, sig)
    c = parse(args.construction, model.sig)
    infer(c, model.sig, args.max_order)
    env = parse_assignment(args.assign or [], model.sig, model)
    model = model.with_constructions([c])
    value = evaluate(c, model, env)
    print("improper" if value is None else format_value(value))
    return OK


def cmd_corpus(args) -> int:
    from .corpus import run_corpus

    results = run_corpus(args.id or None, oracle=not args.no_oracle, budget=_budget(args))
    for r in results:
        print(r.line())
        if args.verbose:
            for line in r.lines:
                print(f"    {line}")
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} corpus items as expected")
    return FAILED if failed else OK


def cmd_oracle(args) -> int:
    budget = _budget(args)
    start = time.perf_counter()
    if args.task == "fact1":
        try:
            found = find_fact1_countermodel(budget if args.budget else EnumerationBudget(max_iota=1))
        except NotFound as exc:
            print(f"FAIL fact1 {exc}")
            return FAILED
        print("PASS fact1")
        for line in found.lines():
            print(f"    {line}")
        return OK
    if args.task == "compensation":
        from .corpus import corpus_requests
        from .generate import requests

        groups = corpus_requests()
        gen = requests(args.count, args.seed)
        report_lines, failed = [], 0
        for ids, reqs, models in groups + [([f"random-{k}" for k in range(len(gen))], gen, arith_family(budget))]:
            rep = compensation_sweep(reqs, models, budget, ids)
            failed += len(rep.violations)
            report_lines.extend(rep.lines()[:-1])
        for line in report_lines:
            print(line)
        print(f"{len(report_lines) - failed}/{len(report_lines)} requests without violation "
              f"in {time.perf_counter() - start:.2f}s")
        return FAILED if failed else OK
    if args.task == "theorem1":
        from .generate import constructions

        cs = constructions(args.count, args.seed, max_order=min(budget.max_order, 2))
        rep = theorem1_check(cs, arith_family(budget), budget)
        for line in rep.lines():
            print(line)
        return FAILED if rep.violations else OK
    raise AssertionError(args.task)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ttstar", description="Proof checker and finite-model oracle "
                                     "for a partial type theory with constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--budget", action="append", metavar="K=V",
                       help="enumeration budget entry, e.g. iota=1 or assignments=50000")
        p.add_argument("--max-order", type=int, default=None, help="largest construction order allowed")

    p = sub.add_parser("check", help="check a proof script")
    p.add_argument("proof", type=Path)
    p.add_argument("--sig", type=Path, help="signature file merged over the script's own")
    p.add_argument("--oracle", action="store_true", help="also check every rule instance semantically")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eval", help="evaluate a construction in a model")
    p.add_argument("construction")
    p.add_argument("-m", "--model", default="arith7", help="corpus model name, arith(N) or a YAML file")
    p.add_argument("--sig", type=Path, help="signature file")
    p.add_argument("--assign", action="append", metavar="X=V", help="value of a free variable")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("corpus", help="run the shipped corpus")
    p.add_argument("--all", action="store_true", help="run every item (the default)")
    p.add_argument("--id", action="append", help="run only this item")
    p.add_argument("--no-oracle", action="store_true", help="skip semantic checks of proofs")
    p.add_argument("-v", "--verbose", action="store_true")
    common(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("oracle", help="run an oracle search or sweep")
    p.add_argument("task", choices=("fact1", "compensation", "theorem1"))
    p.add_argument("--count", type=int, default=200, help="number of random items")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return OVER_BUDGET
    except (ParseError, TypeCheckError, ModelError, EvaluationError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
