"""Brute-force validity over small finite models.

Validity is checked by enumerating every assignment to the variables of a
sequent in every model of a family.  Enumeration orders are fixed, so the
first counterexample reported is always the same one.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .kernel import Derivation, Sequent, format_match, format_sequent
from .semantics import (
    Evaluator,
    FnTable,
    Frame,
    Model,
    builtin_exists,
    format_value,
    match_satisfied,
    same_value,
)
from .substitution import sub_form, substitute
from .syntax import (
    Application,
    Constant,
    Lambda,
    Signature,
    Variable,
    exec_name,
    exec_type,
    latent_free_vars,
    unparse,
    walk,
)
from .typecheck import infer
from .types import IOTA, O, OMEGA, ConstrTy, Fun, Ty, format_type


class BudgetExceeded(RuntimeError):
    pass


class NotFound(LookupError):
    pass


@dataclass(frozen=True)
class EnumerationBudget:
    max_iota: int = 2
    max_nu: int = 7
    max_omega: int = 2
    max_order: int = 2
    max_tables: int = 10000
    partial: bool = True
    max_assignments: int = 200000
    max_models: int = 64

    def __post_init__(self):
        for name in ("max_nu", "max_omega", "max_order", "max_tables", "max_assignments", "max_models"):
            if getattr(self, name) < (0 if name == "max_nu" else 1):
                raise ValueError(f"budget {name} must be positive")
        if self.max_iota < 0:
            raise ValueError("budget max_iota must not be negative")

    @classmethod
    def from_items(cls, items: Iterable[str]) -> "EnumerationBudget":
        """Build from ``key=value`` strings such as ``iota=1``."""
        kwargs = {}
        for item in items:
            key, eq, raw = item.partition("=")
            key = key.strip().replace("-", "_")
            if not eq:
                raise ValueError(f"budget entry {item!r} is not key=value")
            if not key.startswith("max_") and key != "partial":
                key = "max_" + key
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"unknown budget key {item.partition('=')[0]!r}")
            raw = raw.strip()
            if key == "partial":
                kwargs[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                kwargs[key] = int(raw)
        return cls(**kwargs)


@dataclass(frozen=True)
class Witness:
    model: str
    assignment: tuple
    detail: str = ""

    def __str__(self):
        env = ", ".join(f"{k}={v}" for k, v in self.assignment) or "-"
        text = f"[{self.model}] {{{env}}}"
        return f"{text} {self.detail}" if self.detail else text


@dataclass
class Verdict:
    valid: bool
    witness: Optional[Witness] = None
    checked: int = 0

    def __bool__(self):
        return self.valid


def _var_key(v: Variable):
    return (v.name, format_type(v.ty))


def _mentions(ty: Ty, base) -> bool:
    if isinstance(ty, Fun):
        return any(_mentions(a, base) for a in ty.args) or _mentions(ty.result, base)
    return ty == base


def _relevant_models(models, constructions) -> list:
    """Drop models that differ from a kept one only in a base domain nobody mentions.

    A base type counts as mentioned when a signature constant, a variable or
    an execution in ``constructions`` has it somewhere in its type.
    """
    types = []
    for c in constructions:
        for sub in walk(c):
            if isinstance(sub, Variable):
                types.append(sub.ty)
            elif isinstance(sub, Constant) and exec_type(sub.name) is not None:
                types.append(exec_type(sub.name))
    out, seen = [], set()
    for model in models:
        tys = types + list(model.sig.constants.values())
        key = (len(model.frame.individuals) if any(_mentions(t, IOTA) for t in tys) else None,
               len(model.frame.worlds) if any(_mentions(t, OMEGA) for t in tys) else None,
               model.frame.max_nu)
        if model.interpretation or key not in seen:
            seen.add(key)
            out.append(model)
    return out


def _show_env(env: dict) -> tuple:
    return tuple((v.name, format_value(val)) for v, val in sorted(env.items(), key=lambda kv: _var_key(kv[0])))


def _needs_pool_vars(vs) -> bool:
    return any(isinstance(v.ty, ConstrTy) for v in vs)


def variables_to_assign(constructions, model: Model) -> list:
    """Variables whose values can influence the given constructions.

    When a construction variable is among them, executing its value may read
    variables of the pool constructions, so those are included too.
    """
    vs = set()
    for c in constructions:
        vs |= latent_free_vars(c)
    if _needs_pool_vars(vs):
        for c in model.frame.constructions:
            vs |= latent_free_vars(c)
    return sorted(vs, key=_var_key)


def assignments(variables, model: Model, budget: Optional[EnumerationBudget] = None):
    """Every assignment to ``variables`` over ``model``'s domains, in a fixed order."""
    budget = budget or EnumerationBudget()
    domains = [model.domain(v.ty) for v in variables]
    total = math.prod(len(d) for d in domains)
    if total > budget.max_assignments:
        raise BudgetExceeded(
            f"{total} assignments to {', '.join(v.name for v in variables)} exceed the budget "
            f"of {budget.max_assignments}")
    for values in itertools.product(*domains):
        yield dict(zip(variables, values))


def _satisfies(seq: Sequent, ev: Evaluator, env) -> bool:
    model = ev.model
    for m in seq.context:
        if not match_satisfied(m, model, env, ev):
            return True
    return match_satisfied(seq.goal, model, env, ev)


def sequent_valid(s: Sequent, model: Model, budget: Optional[EnumerationBudget] = None) -> Verdict:
    """Whether every assignment satisfying the context satisfies the goal."""
    ev = Evaluator(model)
    count = 0
    for env in assignments(variables_to_assign(s.constructions(), model), model, budget):
        count += 1
        if not _satisfies(s, ev, env):
            failed = format_match(s.goal, model.sig)
            return Verdict(False, Witness(_model_name(model), _show_env(env), f"goal {failed} fails"), count)
    return Verdict(True, None, count)


def _model_name(model: Model) -> str:
    return model.name or model.describe()


def rule_instance_valid(premises, conclusion: Sequent, models, budget: Optional[EnumerationBudget] = None) -> Verdict:
    """No model makes every premise valid and the conclusion invalid.

    Premises and conclusion are read as sequents valid in a model, that is
    holding under all assignments, which is the reading under which rules
    with freshness conditions preserve validity.
    """
    total = 0
    for model in models:
        ok = True
        for p in premises:
            v = sequent_valid(p, model, budget)
            total += v.checked
            if not v.valid:
                ok = False
                break
        if not ok:
            continue
        v = sequent_valid(conclusion, model, budget)
        total += v.checked
        if not v.valid:
            w = v.witness
            return Verdict(False, Witness(_model_name(model), w.assignment, w.detail), total)
    return Verdict(True, None, total)


# ------------------------------------------------------------ model family


def _frames(budget: EnumerationBudget, constructions=()):
    iotas = range(1, budget.max_iota + 1) if budget.max_iota > 0 else (0,)
    for ni in iotas:
        for nw in range(1, budget.max_omega + 1):
            yield Frame(
                individuals=tuple(f"i{k}" for k in range(ni)),
                worlds=tuple(f"w{k}" for k in range(nw)),
                max_nu=budget.max_nu,
                max_tables=budget.max_tables,
                partial=budget.partial,
                allow_empty_iota=ni == 0,
                max_order=budget.max_order,
                constructions=frozenset(constructions),
            )


def _candidates(ty: Ty, model: Model, rng: random.Random, extra: int = 6) -> list:
    """Values tried for a constant of type ``ty``."""
    if not isinstance(ty, Fun):
        return list(model.domain(ty))
    points = list(itertools.product(*(model.domain(a) for a in ty.args)))
    values = list(model.domain(ty.result))
    choices = ([None] if model.frame.partial else []) + values
    if not choices:
        return [FnTable(ty.args, {})]
    if len(choices) ** len(points) <= 64:
        return [FnTable(ty.args, {p: v for p, v in zip(points, combo) if v is not None})
                for combo in itertools.product(choices, repeat=len(points))]
    out = []
    if model.frame.partial:
        out.append(FnTable(ty.args, {}))
    if values:
        for v in values[:2]:
            out.append(FnTable(ty.args, {p: v for p in points}))
    for _ in range(extra):
        table = FnTable(ty.args, {p: v for p in points if (v := rng.choice(choices)) is not None})
        if table not in out:
            out.append(table)
    return out


def model_family(sig: Signature, constructions=(), budget: Optional[EnumerationBudget] = None,
                 seed: int = 0, fixed: Optional[dict] = None) -> list:
    """Small models varying the base domains and the signature's constants.

    Frames range over ι and ω sizes up to the budget.  Interpretations are
    enumerated in full when few; otherwise a seeded sample is taken that
    always starts with the first combination.  ``fixed`` pins constants.
    """
    budget = budget or EnumerationBudget()
    fixed = fixed or {}
    pool = set()
    for c in constructions:
        pool.update(walk(c))
    frames = list(_frames(budget, pool))
    per_frame = max(1, budget.max_models // len(frames))
    names = sorted(n for n in sig.constants if n not in fixed)
    out = []
    for frame in frames:
        base = Model(frame, sig, dict(fixed), f"{frame.describe()}")
        rng = random.Random(f"{seed}:{frame.describe()}")
        cands = [_candidates(sig.constants[n], base, rng) for n in names]
        total = math.prod(len(c) for c in cands)
        if total <= per_frame:
            picks = range(total)
        else:
            picks = [0] + sorted(rng.sample(range(1, total), per_frame - 1))
        for k in picks:
            interp = dict(fixed)
            for name, cs in zip(names, cands):
                k, r = divmod(k, len(cs))
                interp[name] = cs[r]
            model = Model(frame, sig, interp, "")
            model.name = model.describe()
            out.append(model)
    return out


def derivation_constructions(d: Derivation) -> list:
    seen, out = set(), []

    def visit(node):
        if id(node) in seen:
            return
        seen.add(id(node))
        out.extend(node.conclusion.constructions())
        for p in node.premises:
            visit(p)

    visit(d)
    return out


def derivation_nodes(d: Derivation) -> list:
    seen, out = set(), []

    def visit(node, path):
        if id(node) in seen:
            return
        seen.add(id(node))
        for i, p in enumerate(node.premises, 1):
            visit(p, path + (p.label or str(i),))
        out.append(("/".join(path), node))

    visit(d, (d.label or "root",))
    return out


@dataclass
class NodeResult:
    path: str
    rule: str
    verdict: Verdict


def check_derivation_semantically(d: Derivation, sig: Signature, budget: Optional[EnumerationBudget] = None,
                                  models=None) -> list:
    """Oracle verdict for every rule-application node of a proof."""
    if models is None:
        models = model_family(sig, derivation_constructions(d), budget)
    cache: dict = {}

    def valid(seq, idx, model):
        key = (seq, idx)
        if key not in cache:
            cache[key] = sequent_valid(seq, model, budget)
        return cache[key]

    out = []
    for path, node in derivation_nodes(d):
        verdict = Verdict(True)
        for idx, model in enumerate(models):
            if not all(valid(p.conclusion, idx, model).valid for p in node.premises):
                continue
            v = valid(node.conclusion, idx, model)
            if not v.valid:
                verdict = Verdict(False, Witness(model.name, v.witness.assignment,
                                                 f"{v.witness.detail} in {format_sequent(node.conclusion, sig)}"))
                break
        out.append(NodeResult(path, node.rule, verdict))
    return out


# ---------------------------------------- quantifier countermodel search


@dataclass
class Fact1Witness:
    model: Model
    phi: object
    forall_phi: object
    forall_not_phi: object
    not_exists_phi: object
    exists_phi: object
    classical_exists: object

    def lines(self) -> list:
        sig = self.model.sig
        show = lambda v: "improper" if v is None else format_value(v)  # noqa: E731
        return [
            f"model: {self.model.describe()}",
            f"phi: {unparse(self.phi, sig)} (improper under every assignment)",
            f"∀(λx.phi) = {show(self.forall_phi)}, ∀(λx.¬phi) = {show(self.forall_not_phi)}",
            f"¬∃(λx.phi) = {show(self.not_exists_phi)} differs from ∀(λx.¬phi) = {show(self.forall_not_phi)}",
            f"∃(λx.phi) = {show(self.exists_phi)} differs from ¬∀(λx.¬phi) = {show(self.classical_exists)}",
        ]


def find_fact1_countermodel(budget: Optional[EnumerationBudget] = None) -> Fact1Witness:
    """A model where the quantifiers are not interdefinable.

    Searches tables of a predicate S over individuals, smallest domain and
    emptiest table first, for a body ``S(x)`` that is improper everywhere
    and makes ∀ blind to negation while ¬∀¬ and ∃ come apart.
    """
    budget = budget or EnumerationBudget(max_iota=1)
    if budget.max_iota < 1:
        raise NotFound("the budget excludes individuals")
    sig = Signature({"S": Fun((IOTA,), O)}, {"x": IOTA})
    x = Variable("x", IOTA)
    phi = Application(Constant("S"), (x,))
    neg = lambda c: Application(Constant("¬"), (c,))  # noqa: E731
    forall = lambda body: Application(Constant("∀"), (Lambda((x,), body),))  # noqa: E731
    exists = lambda body: Application(Constant("∃"), (Lambda((x,), body),))  # noqa: E731
    for ni in range(1, budget.max_iota + 1):
        frame = Frame(individuals=tuple(f"i{k}" for k in range(ni)), worlds=("w0",),
                      max_nu=budget.max_nu, max_tables=budget.max_tables, partial=budget.partial)
        base = Model(frame, sig, {}, "")
        for table in base.domain(Fun((IOTA,), O)):
            model = Model(frame, sig, {"S": table}, f"fact1-i{ni}")
            ev = Evaluator(model)
            if any(ev.evaluate(phi, env) is not None for env in assignments([x], model, budget)):
                continue
            a, b = ev.evaluate(forall(phi), {}), ev.evaluate(forall(neg(phi)), {})
            ne = ev.evaluate(neg(exists(phi)), {})
            ex, cl = ev.evaluate(exists(phi), {}), ev.evaluate(neg(forall(neg(phi))), {})
            lam = ev.evaluate(Lambda((x,), phi), {})
            if (same_value(a, b) and not same_value(ne, b) and not same_value(ex, cl)
                    and builtin_exists(lam) == ex):
                return Fact1Witness(model, phi, a, b, ne, ex, cl)
    raise NotFound("no countermodel within the budget; classical interdefinability holds for total tables")


# ----------------------------------------------------- compensation sweep


@dataclass
class SweepItem:
    id: str
    ok: bool
    checked: int = 0
    skipped: int = 0
    witness: Optional[Witness] = None

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        extra = f" {self.witness}" if self.witness else ""
        return f"{tag} {self.id}{extra}"


@dataclass
class SweepReport:
    items: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [i for i in self.items if not i.ok]

    @property
    def skipped(self) -> int:
        return sum(i.skipped for i in self.items)

    @property
    def checked(self) -> int:
        return sum(i.checked for i in self.items)

    def lines(self) -> list:
        out = [i.line() for i in self.items]
        out.append(f"{len(self.items) - len(self.violations)}/{len(self.items)} passed; "
                   f"{self.checked} assignments checked"
                   + (f", {self.skipped} skipped with improper replacement" if self.skipped else ""))
        return out


def compensation_sweep(requests, models, budget: Optional[EnumerationBudget] = None, ids=None) -> SweepReport:
    """Check that substituting a proper D for x agrees with assigning its value to x.

    For every request, model and assignment with D proper, both the
    computed substitution and its object-level Sub form must construct what
    C constructs once x takes D's value.  Assignments with D improper are
    skipped and counted.
    """
    report = SweepReport()
    for k, req in enumerate(requests):
        rid = ids[k] if ids else f"request-{k}"
        d, x, c = req.replacement, req.variable, req.target
        result = substitute(d, x, c)
        item = SweepItem(rid, True)
        for model in _relevant_models(models, [d, c]):
            model = model.with_constructions([d, c])
            ty = infer(c, model.sig)
            form = sub_form(d, x, c, ty, model.sig)
            ev = Evaluator(model)
            vs = variables_to_assign([d, x, c, result], model)
            for env in assignments(vs, model, budget):
                val = ev.evaluate(d, env)
                if val is None:
                    item.skipped += 1
                    continue
                item.checked += 1
                want = ev.evaluate(c, {**env, x: val})
                got, got_form = ev.evaluate(result, env), ev.evaluate(form, env)
                if not same_value(got, want) or not same_value(got_form, want):
                    item.ok = False
                    show = lambda v: "improper" if v is None else format_value(v)  # noqa: E731
                    item.witness = Witness(
                        model.name or model.describe(), _show_env(env),
                        f"{unparse(result, model.sig)} = {show(got)}, form = {show(got_form)}, "
                        f"C[x:=D] = {show(want)}")
                    break
            if not item.ok:
                break
        report.items.append(item)
    return report


def theorem1_check(constructions, models, budget: Optional[EnumerationBudget] = None) -> SweepReport:
    """Check that each C is congruent to the execution of its acquisition."""
    from .syntax import Acquisition

    report = SweepReport()
    for k, c in enumerate(constructions):
        item = SweepItem(f"construction-{k}", True)
        for model in _relevant_models(models, [c]):
            model = model.with_constructions([c])
            ty = infer(c, model.sig)
            wrapped = Application(Constant(exec_name(ty)), (Acquisition(c),))
            ev = Evaluator(model)
            for env in assignments(variables_to_assign([c], model), model, budget):
                item.checked += 1
                a, b = ev.evaluate(c, env), ev.evaluate(wrapped, env)
                if not same_value(a, b):
                    item.ok = False
                    item.witness = Witness(model.name or model.describe(), _show_env(env),
                                           f"{unparse(c, model.sig)} is not congruent to its execution")
                    break
            if not item.ok:
                break
        report.items.append(item)
    return report


def arith_family(budget: Optional[EnumerationBudget] = None, constructions=(), sig: Optional[Signature] = None) -> list:
    """Arithmetic models with ι and ω sizes up to the budget and no user constants."""
    budget = budget or EnumerationBudget()
    from .syntax import default_signature

    sig = sig or default_signature()
    pool = set()
    for c in constructions:
        pool.update(walk(c))
    out = []
    for frame in _frames(budget, pool):
        out.append(Model(frame, sig, {}, f"arith({budget.max_nu}) {frame.describe()}"))
    return out


__all__ = [
    "BudgetExceeded", "NotFound", "EnumerationBudget", "Witness", "Verdict", "SweepReport", "SweepItem",
    "Fact1Witness", "sequent_valid", "rule_instance_valid", "model_family", "arith_family",
    "find_fact1_countermodel", "compensation_sweep", "theorem1_check", "check_derivation_semantically",
    "variables_to_assign", "assignments",
]
