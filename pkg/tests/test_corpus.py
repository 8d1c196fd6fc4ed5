import pytest

from ttstar.corpus import (
    congruence_witness,
    corpus_requests,
    item_by_id,
    load_index,
    resolve_model,
    run_corpus,
    run_item,
)
from ttstar.oracle import compensation_sweep
from ttstar.syntax import default_signature, parse

ITEMS = load_index()


@pytest.mark.parametrize("item", ITEMS, ids=lambda i: i.id)
def test_item_meets_expectation(item):
    res = run_item(item)
    assert res.ok, res.witness


def test_ids_are_unique():
    ids = [i.id for i in ITEMS]
    assert len(ids) == len(set(ids))


def test_mutation_suite_size_and_coverage():
    muts = {i.id for i in ITEMS if i.kind == "mutation"}
    assert len(muts) >= 10
    for needed in ("mut-eg-broken-freshness", "mut-beta-wrong-instance", "mut-exists-i-false",
                   "mut-eta-con-one-premise"):
        assert needed in muts


def test_alleged_ah2_form_is_not_congruent():
    model = resolve_model("arith7", default_signature())
    form = parse("⌊⌊Sub2(⌈0⌉,⌈n⌉,⌈Improp(⌈3÷n⌉)⌉)⌋⌋_o")
    w = congruence_witness(form, parse("Improp(⌈3÷0⌉)"), model)
    assert w is not None
    assert w.assignment == (("n", "0"),)
    assert w.detail == "form = F, premiss = T"


def test_alleged_ai2_form_is_not_congruent():
    res = run_item(item_by_id("sub-a-i2"))
    assert res.ok
    assert res.witness == "correctly rejected: [intension] {w'=w0, x=a} form = T, premiss = F"


def test_ai1_form_congruent():
    res = run_item(item_by_id("sub-a-i1"))
    assert res.ok and res.witness is None
    assert any("congruent to the premiss in intension" in line for line in res.lines)


def test_oracle_can_be_skipped():
    res = run_item(item_by_id("eg-k1"), oracle=False)
    assert res.ok
    assert not any(line.startswith("oracle") for line in res.lines)


def test_unknown_ids():
    with pytest.raises(KeyError):
        run_corpus(["no-such-item"])
    with pytest.raises(KeyError):
        item_by_id("no-such-item")


def test_corpus_requests_pass_compensation():
    for ids, reqs, models in corpus_requests():
        rep = compensation_sweep(reqs, models, ids=ids)
        assert not rep.violations, rep.lines()


def test_resolve_model_forms():
    assert resolve_model("arith(3)").frame.max_nu == 3
    assert resolve_model("intension").name == "intension"
