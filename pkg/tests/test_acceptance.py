"""One test per acceptance criterion; each records a PASS/FAIL line."""

import time
from contextlib import contextmanager

import pytest

from conftest import ACCEPTANCE_LINES
from ttstar.corpus import congruence_witness, corpus_dir, corpus_requests, load_index, resolve_model, run_item
from ttstar.generate import constructions, requests
from ttstar.kernel import check_derivation, parse_sequent
from ttstar.oracle import (
    EnumerationBudget,
    arith_family,
    check_derivation_semantically,
    compensation_sweep,
    find_fact1_countermodel,
    theorem1_check,
)
from ttstar.script import load_script
from ttstar.semantics import FnTable, builtin_exists
from ttstar.substitution import substitute
from ttstar.syntax import Signature, Variable, default_signature, parse
from ttstar.types import IOTA, NU, OMEGA

PROOFS = corpus_dir() / "proofs"


@contextmanager
def criterion(number: int, title: str):
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield
        status = "PASS"
    finally:
        ACCEPTANCE_LINES.append(f"criterion {number}: {status} {title} ({time.perf_counter() - start:.2f}s)")
        print(ACCEPTANCE_LINES[-1])


def _check(name):
    script = load_script(PROOFS / f"{name}.proof")
    return script, check_derivation(script.root, script.sig)


def test_c1_eg_replay():
    with criterion(1, "EG proof replay for k=0 and k=1"):
        for name, end in [
            ("eg-k1", "Q(y):T, R(x,y)_(D(w)/x):T --> ∃(λx.R(x,y)):T"),
            ("eg-k0", "Q(y):T, P(x,y)_(D/x):T --> ∃(λx.P(x,y)):T"),
        ]:
            start = time.perf_counter()
            script, report = _check(name)
            assert time.perf_counter() - start < 1.0
            assert report.conclusion == parse_sequent(end, script.sig)
            assert dict(report.rule_counts) == {"AX": 2, "WR": 2, "BETA-EXP": 1, "EXISTS-I": 1, "EXEC-INST": 1}


def test_c2_exists_i_eta_replay():
    with criterion(2, "∃-Iη proof replay, sequent collapse and η-CON redundancy"):
        start = time.perf_counter()
        end = "Q(X):T, F(X):T --> ∃(λx.F(x)):T"
        reports = {}
        for name in ("exists-i-eta-1", "exists-i-eta-2", "exists-i-eta-2-no-eta"):
            script, reports[name] = _check(name)
            assert reports[name].conclusion == parse_sequent(end, script.sig)
        assert time.perf_counter() - start < 1.0
        collapses = {(c.first, c.kind, c.second) for c in reports["exists-i-eta-2"].collapses}
        assert ("1", "context", "2") in collapses
        assert reports["exists-i-eta-2"].uses("ETA-CON") == 1
        assert reports["exists-i-eta-2-no-eta"].uses("ETA-CON") == 0


def test_c3_theorem1():
    with criterion(3, "C congruent to the execution of its acquisition, 500 constructions"):
        cs = constructions(500, seed=0, max_order=2)
        assert len(cs) == 500
        rep = theorem1_check(cs, arith_family(EnumerationBudget(max_order=2)))
        assert len(rep.items) == 500
        assert not rep.violations, [str(i.witness) for i in rep.violations[:3]]


def test_c4_compensation():
    with criterion(4, "Compensation sweep, corpus plus 200 random requests"):
        start = time.perf_counter()
        budget = EnumerationBudget(max_iota=2, max_nu=7)
        groups = corpus_requests(budget)
        gen = requests(200, seed=0)
        groups.append(([f"random-{k}" for k in range(len(gen))], gen, arith_family(budget)))
        total, violations = 0, []
        for ids, reqs, models in groups:
            assert all(m.frame.max_nu == 7 for m in models if m.name != "intension")
            rep = compensation_sweep(reqs, models, budget, ids)
            total += len(rep.items)
            violations += rep.violations
        assert total >= 205
        assert not violations, [str(v.witness) for v in violations[:3]]
        assert time.perf_counter() - start < 60.0


def test_c5_fact1():
    with criterion(5, "quantifier countermodel"):
        start = time.perf_counter()
        budget = EnumerationBudget(max_iota=1, partial=True)
        found = find_fact1_countermodel(budget)
        assert time.perf_counter() - start < 5.0
        assert found.model.interpretation["S"] == FnTable((IOTA,), {})
        assert found.forall_phi == found.forall_not_phi
        assert builtin_exists(found.model.interpretation["S"]) is False
        assert found.classical_exists is True and found.exists_phi is False
        assert find_fact1_countermodel(budget).lines() == found.lines()


def test_c6_quantification_into():
    with criterion(6, "Sub-forms congruent or not congruent as stated, EG justifications accepted"):
        for item_id in ("a-e", "sub-a-h1", "sub-a-h2p", "sub-a-i1"):
            item = next(i for i in load_index() if i.id == item_id)
            assert item.expectation == "congruent" and item.files
            res = run_item(item, oracle=False)
            assert res.ok, res.witness
        arith = resolve_model("arith7", default_signature())
        alleged_h2 = parse("⌊⌊Sub2(⌈0⌉,⌈n⌉,⌈Improp(⌈3÷n⌉)⌉)⌋⌋_o")
        assert congruence_witness(alleged_h2, parse("Improp(⌈3÷0⌉)"), arith) is not None
        intension = resolve_model("intension", default_signature())
        isig = intension.sig
        alleged_i2 = parse("⌊⌊Sub1(⌈D(w')⌉,⌈x⌉,⌈∀(λw'.[F(w')](x))⌉)⌋⌋_o", isig)
        premiss = parse("∀(λw'.[F(w')](D(w')))", isig)
        assert congruence_witness(alleged_i2, premiss, intension) is not None
        good_i1 = parse("⌊⌊Sub1(⌈D(w)⌉,⌈x⌉,⌈∀(λw'.[F(w')](x))⌉)⌋⌋_o", isig)
        assert congruence_witness(good_i1, parse("∀(λw'.[F(w')](D(w)))", isig), intension) is None


def test_c7_rule_soundness():
    with criterion(7, "every shipped proof node oracle-valid, every mutation caught"):
        for path in sorted(PROOFS.glob("*.proof")):
            script = load_script(path)
            check_derivation(script.root, script.sig)
            nodes = check_derivation_semantically(script.root, script.sig)
            bad = [f"{path.stem} {n.path} {n.rule}" for n in nodes if not n.verdict.valid]
            assert not bad, bad
        muts = [i for i in load_index() if i.kind == "mutation"]
        assert len(muts) >= 10
        for item in muts:
            res = run_item(item)
            assert res.ok, f"{item.id}: {res.witness}"


def test_c8_substitution_units():
    with criterion(8, "Sub leaves non-free targets alone, skips acquisitions and renames binders"):
        n = Variable("n", NU)
        target = parse("λn.Odd(3÷n)")
        assert substitute(parse("1"), n, target) == target
        blocked = parse("Improp(⌈3÷n⌉)")
        assert substitute(parse("0"), n, blocked) == parse("Improp(⌈3÷n⌉)")
        isig = default_signature().merged(Signature.load(corpus_dir() / "signatures" / "intension.sig"))
        got = substitute(parse("D(w')", isig), Variable("x", IOTA), parse("∀(λw'.[F(w')](x))", isig))
        assert got == parse("∀(λz₀:omega.[F(z₀)](D(w')))", isig, allow_reserved=True)
        assert got.args[0].binders[0] == Variable("z₀", OMEGA)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
