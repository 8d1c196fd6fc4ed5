"""The shipped corpus of proofs, Sub-forms, models and mutations."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import yaml

from .kernel import ProofError, check_derivation, format_sequent, parse_sequent
from .oracle import (
    EnumerationBudget,
    NotFound,
    Witness,
    check_derivation_semantically,
    find_fact1_countermodel,
    model_family,
    variables_to_assign,
    assignments,
)
from .script import load_script
from .semantics import Evaluator, Model, arith_model, format_value, load_model, same_value
from .syntax import ParseError, Signature, default_signature, parse
from .typecheck import TypeCheckError


def corpus_dir() -> Path:
    return Path(str(resources.files("ttstar") / "data"))


MODELS = {"arith7": "models/arith7.yaml", "intension": "models/intension.yaml"}


def resolve_model(name_or_path: str, sig: Optional[Signature] = None) -> Model:
    """A corpus model by name, ``arith(N)``, or a YAML file."""
    if name_or_path in MODELS:
        return load_model(corpus_dir() / MODELS[name_or_path], sig)
    text = name_or_path.strip()
    if text.startswith("arith(") and text.endswith(")"):
        return arith_model(int(text[6:-1]), sig)
    return load_model(Path(name_or_path), sig)


@dataclass
class CorpusItem:
    id: str
    kind: str
    files: list
    expectation: str
    data: dict = field(default_factory=dict)

    def path(self, k: int = 0) -> Path:
        return corpus_dir() / self.files[k]


@dataclass
class ItemResult:
    id: str
    ok: bool
    lines: list = field(default_factory=list)
    witness: Optional[str] = None
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        extra = f" {self.witness}" if self.witness else ""
        return f"{tag} {self.id}{extra}"


def load_index() -> list:
    data = yaml.safe_load((corpus_dir() / "index.yaml").read_text(encoding="utf-8"))
    out = []
    for raw in data["items"]:
        raw = dict(raw)
        out.append(CorpusItem(raw.pop("id"), raw.pop("kind"), list(raw.pop("files", [])),
                              str(raw.pop("expect")), raw))
    return out


def item_by_id(item_id: str) -> CorpusItem:
    for item in load_index():
        if item.id == item_id:
            return item
    raise KeyError(item_id)


def _check_proof(item: CorpusItem, res: ItemResult, oracle: bool, budget) -> None:
    script = load_script(item.path())
    report = check_derivation(script.root, script.sig)
    res.lines.append("end sequent: " + format_sequent(report.conclusion, script.sig))
    res.lines.append("rules: " + ", ".join(f"{r}×{n}" for r, n in sorted(report.rule_counts.items())))
    for c in report.collapses:
        res.lines.append(f"collapse: {c}")
    end = item.data.get("end")
    if end is not None:
        want = parse_sequent(end, script.sig)
        if want != report.conclusion:
            res.ok = False
            res.witness = f"end sequent differs from {end}"
    for rule in item.data.get("uses", []):
        if not report.uses(rule):
            res.ok = False
            res.witness = f"{rule} is not used"
    for rule in item.data.get("avoids", []):
        if report.uses(rule):
            res.ok = False
            res.witness = f"{rule} is used"
    want_collapses = item.data.get("collapses")
    if want_collapses is not None:
        got = sorted(f"{c.first} {c.kind} {c.second}" for c in report.collapses)
        if got != sorted(want_collapses):
            res.ok = False
            res.witness = f"collapses {got}"
    if oracle:
        for node in check_derivation_semantically(script.root, script.sig, budget):
            if not node.verdict.valid:
                res.ok = False
                res.witness = f"node {node.path} ({node.rule}) invalid: {node.verdict.witness}"
                return
        res.lines.append("oracle: every rule instance valid over the model family")


def congruence_witness(form, premiss, model: Model, budget=None) -> Optional[Witness]:
    """First assignment where the two constructions disagree, or None."""
    model = model.with_constructions([form, premiss])
    ev = Evaluator(model)
    for env in assignments(variables_to_assign([form, premiss], model), model, budget):
        a, b = ev.evaluate(form, env), ev.evaluate(premiss, env)
        if not same_value(a, b):
            show = lambda v: "improper" if v is None else format_value(v)  # noqa: E731
            return Witness(model.name, tuple((v.name, format_value(x)) for v, x in
                                             sorted(env.items(), key=lambda kv: kv[0].name)),
                           f"form = {show(a)}, premiss = {show(b)}")
    return None


def _check_sub_form(item: CorpusItem, res: ItemResult, oracle: bool, budget) -> None:
    sig = Signature.load(corpus_dir() / item.data["signature"]) if "signature" in item.data else default_signature()
    sig = default_signature().merged(sig)
    model = resolve_model(item.data.get("model", "arith7"), sig)
    form, premiss = parse(item.data["form"], model.sig), parse(item.data["premiss"], model.sig)
    w = congruence_witness(form, premiss, model, budget)
    congruent = w is None
    res.lines.append(f"{'congruent' if congruent else 'not congruent'} to the premiss in {model.name}"
                     + ("" if congruent else f": {w}"))
    if congruent != (item.expectation == "congruent"):
        res.ok = False
        res.witness = str(w) if w else "unexpectedly congruent"
    elif not congruent:
        res.witness = f"correctly rejected: {w}"
    if item.files:
        _check_proof(item, res, oracle, budget)


def _check_countermodel(item: CorpusItem, res: ItemResult, budget) -> None:
    b = EnumerationBudget.from_items(f"{k}={v}" for k, v in (item.data.get("budget") or {}).items())
    try:
        found = find_fact1_countermodel(b)
    except NotFound as exc:
        res.ok = item.expectation == "not-found"
        res.witness = str(exc)
        return
    res.lines.extend(found.lines())
    res.ok = item.expectation == "found"
    res.witness = f"S={format_value(found.model.interpretation['S'])}"


def _check_mutation(item: CorpusItem, res: ItemResult, oracle: bool, budget) -> None:
    script = load_script(item.path())
    caught = []
    try:
        check_derivation(script.root, script.sig)
        res.lines.append("kernel: accepted")
    except ProofError as exc:
        caught.append(f"kernel: {exc}")
    if oracle:
        extra = [resolve_model(m, script.sig) for m in item.data.get("models", [])]
        from .oracle import derivation_constructions

        pool = derivation_constructions(script.root)
        models = [m.with_constructions(pool) for m in extra]
        models += model_family(script.sig, pool, budget)
        for node in check_derivation_semantically(script.root, script.sig, budget, models):
            if not node.verdict.valid:
                caught.append(f"oracle: node {node.path} ({node.rule}) falsified: {node.verdict.witness}")
                break
    res.lines.extend(caught)
    res.ok = bool(caught)
    res.witness = caught[0] if caught else "neither the kernel nor the oracle objects"


def run_item(item: CorpusItem, oracle: bool = True, budget: Optional[EnumerationBudget] = None) -> ItemResult:
    res = ItemResult(item.id, True)
    start = time.perf_counter()
    try:
        if item.kind == "proof":
            _check_proof(item, res, oracle, budget)
        elif item.kind == "sub-form":
            _check_sub_form(item, res, oracle, budget)
        elif item.kind == "countermodel":
            _check_countermodel(item, res, budget)
        elif item.kind == "mutation":
            _check_mutation(item, res, oracle, budget)
        else:
            raise ValueError(f"unknown corpus item kind {item.kind!r}")
    except (ProofError, ParseError, TypeCheckError) as exc:
        res.ok = False
        res.witness = str(exc)
    res.seconds = time.perf_counter() - start
    return res


def run_corpus(ids=None, oracle: bool = True, budget: Optional[EnumerationBudget] = None) -> list:
    items = load_index()
    if ids:
        known = {i.id for i in items}
        missing = [i for i in ids if i not in known]
        if missing:
            raise KeyError(", ".join(missing))
        items = [i for i in items if i.id in ids]
    return [run_item(i, oracle, budget) for i in sorted(items, key=lambda i: i.id)]


_ARITH_REQUESTS = [
    ("a-e", "1", "n", "Odd(3÷n)"),
    ("a-h1", "⌈3÷0⌉", "c1", "Improp(c1)"),
    ("a-h2", "0", "n", "Improp(⌈3÷n⌉)"),
    ("a-h2p", "0", "n", "Improp(Sub1(⌈(n)⌉,⌈n⌉,⌈3÷n⌉))"),
    ("improper-replacement", "3÷0", "n", "Odd(3÷n)"),
]

_INTENSION_REQUESTS = [
    ("a-i1", "D(w)", "x", "∀(λw'.[F(w')](x))"),
]


def corpus_requests(budget: Optional[EnumerationBudget] = None) -> list:
    """The corpus substitution requests grouped with the models they need.

    Returns ``(ids, requests, models)`` triples.
    """
    from .oracle import arith_family
    from .substitution import SubRequest

    out = []
    sig = default_signature()
    reqs = [SubRequest(parse(d, sig), parse(x, sig), parse(c, sig)) for _, d, x, c in _ARITH_REQUESTS]
    pool = [c for r in reqs for c in (r.replacement, r.target)]
    out.append(([f"corpus-{i}" for i, *_ in _ARITH_REQUESTS], reqs, arith_family(budget, pool, sig)))
    model = resolve_model("intension", sig)
    reqs = [SubRequest(parse(d, model.sig), parse(x, model.sig), parse(c, model.sig))
            for _, d, x, c in _INTENSION_REQUESTS]
    out.append(([f"corpus-{i}" for i, *_ in _INTENSION_REQUESTS], reqs, [model]))
    return out
