"""Matches, sequents and the rule checker.

A match ``C:x`` says that C constructs what the right side constructs; the
right side is a variable, a constant or an acquisition.  The empty match
``C:_`` says that C is improper.  A sequent is a set of matches entailing
one match.

The checker verifies explicitly given trees and never searches.  Every
rule is checked together with the side conditions that keep it sound in
the finite semantics; see the ``_rule_*`` functions.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .substitution import (
    check_sub_form,
    contains_exec,
    expand_sub_forms,
    match_sub_form,
    match_sub_form_many,
    substitute_many,
)
from .syntax import (
    Acquisition,
    Application,
    Constant,
    Construction,
    Lambda,
    ParseError,
    Parser,
    Signature,
    Variable,
    exec_type,
    latent_free_vars,
    unparse,
)
from .typecheck import TypeCheckError, infer
from .types import IOTA, O, Base, compatible, format_type

TRUE = Constant("T")


class RuleError(Exception):
    """A rule application that does not fit its schema or side conditions."""


class ProofError(Exception):
    def __init__(self, path: tuple, error: Exception, node=None):
        where = "/".join(path) or "root"
        super().__init__(f"at {where}: {error}")
        self.path = path
        self.error = error
        self.node = node


# ----------------------------------------------------------------- matches


@dataclass(frozen=True)
class Match:
    left: Construction
    right: Optional[Construction]  # None is the empty match

    def __post_init__(self):
        if self.right is not None and not isinstance(self.right, (Variable, Constant, Acquisition)):
            raise ValueError("the right side of a match is a variable, a constant or an acquisition")

    @property
    def empty(self) -> bool:
        return self.right is None

    def constructions(self) -> tuple:
        return (self.left,) if self.right is None else (self.left, self.right)


@dataclass(frozen=True)
class Sequent:
    context: frozenset
    goal: Match

    def __post_init__(self):
        object.__setattr__(self, "context", frozenset(self.context))

    def constructions(self) -> list:
        out = []
        for m in sorted(self.context, key=format_match):
            out.extend(m.constructions())
        out.extend(self.goal.constructions())
        return out


def format_match(m: Match, sig: Optional[Signature] = None) -> str:
    right = "_" if m.right is None else unparse(m.right, sig)
    return f"{unparse(m.left, sig)}:{right}"


def format_sequent(s: Sequent, sig: Optional[Signature] = None, order=None) -> str:
    ctx = list(order) if order is not None else sorted(s.context, key=lambda m: format_match(m, sig))
    left = ", ".join(format_match(m, sig) for m in ctx)
    return (left + " " if left else "") + "--> " + format_match(s.goal, sig)


def parse_match_from(p: Parser) -> Match:
    left = p.construction()
    p.expect(":")
    pos = p._skip(p.pos)
    if p.text.startswith("_", pos) and not (p.text[pos + 1:pos + 2].isalnum()):
        p.pos = pos + 1
        return Match(left, None)
    start = p.peek().start
    right = p.construction()
    if not isinstance(right, (Variable, Constant, Acquisition)):
        raise p.error("the right side of a match must be a variable, a constant or an acquisition", start)
    return Match(left, right)


def parse_match(text: str, sig: Optional[Signature] = None) -> Match:
    p = Parser(text, sig)
    m = parse_match_from(p)
    p.done()
    return m


def parse_sequent_from(p: Parser, contexts: Optional[Mapping] = None) -> tuple:
    """Parse ``M1, …, Mk --> M``; return the sequent and the context as written.

    Names in ``contexts`` (such as ``Γ``) stand for sets of matches.
    """
    contexts = contexts or {}
    written = []
    if not p.at("SEQ"):
        while True:
            tok = p.peek()
            if tok.kind == "IDENT" and tok.value in contexts:
                save = p.pos
                p.advance()
                if p.at(",", "SEQ"):
                    written.extend(contexts[tok.value])
                else:
                    p.pos = save
                    written.append(parse_match_from(p))
            else:
                written.append(parse_match_from(p))
            if p.at(","):
                p.advance()
                continue
            break
    p.expect("SEQ")
    goal = parse_match_from(p)
    return Sequent(frozenset(written), goal), tuple(written)


def parse_sequent(text: str, sig: Optional[Signature] = None, contexts: Optional[Mapping] = None) -> Sequent:
    p = Parser(text, sig)
    s, _ = parse_sequent_from(p, contexts)
    p.done()
    return s


# ------------------------------------------------------------- derivations


@dataclass(eq=False)
class Derivation:
    rule: str
    premises: list
    conclusion: Sequent
    inst: dict = field(default_factory=dict)
    label: Optional[str] = None
    written_context: tuple = ()
    line: int = 0


@dataclass(frozen=True)
class Collapse:
    """Two nodes that coincide once contexts are read as sets."""

    kind: str  # "sequent": identical sequents; "context": same context written differently
    first: str
    second: str

    def __str__(self):
        rel = "is identical to" if self.kind == "sequent" else "has the same context as"
        return f"sequent {self.first} {rel} sequent {self.second}"


@dataclass
class CheckReport:
    conclusion: Sequent
    rule_counts: Counter
    collapses: list
    nodes: int

    def uses(self, rule: str) -> int:
        return self.rule_counts.get(canonical_rule(rule), 0)


RULES = (
    "AX", "WR", "EXISTS-I", "BETA-EXP", "APP-INST", "LAMBDA-INST", "EXEC-INST", "ETA-CON", "RT",
    "DEF-SUB", "EG", "EXISTS-I-ETA", "ACQ-EXEC-INTRO", "ACQ-EXEC-ELIM",
)

_ALIASES = {
    "∃-I": "EXISTS-I", "β-EXP": "BETA-EXP", "APP-INST": "APP-INST", "λ-INST": "LAMBDA-INST",
    "⌊⌊·⌋⌋_O-INST": "EXEC-INST", "EXEC_O-INST": "EXEC-INST", "η-CON": "ETA-CON",
    "DEF OF SUB": "DEF-SUB", "DEF-OF-SUB": "DEF-SUB", "∃-Iη": "EXISTS-I-ETA", "∃-IΗ": "EXISTS-I-ETA",
    "EXISTS-I-η": "EXISTS-I-ETA",
}


def canonical_rule(name: str) -> str:
    key = name.strip()
    if key in _ALIASES:
        return _ALIASES[key]
    up = key.upper().replace("_", "-").replace(" ", "-")
    if up in RULES:
        return up
    for alias, rule in _ALIASES.items():
        if alias.upper().replace(" ", "-") == up:
            return rule
    raise RuleError(f"unknown rule {name!r}")


# ----------------------------------------------------------------- helpers


def _is_true(c, sig) -> bool:
    return c == TRUE and "T" not in sig.constants


def _is_truth_rhs(c, sig) -> bool:
    if c is None:
        return False
    if isinstance(c, Variable):
        return c.ty == O
    return isinstance(c, Constant) and c.name in ("T", "⊥", "F") and c.name not in sig.constants


def _show(c, sig=None) -> str:
    return unparse(c, sig)


def _fresh(v: Variable, where, what: str, sig, allowed=()) -> None:
    """``v`` must not occur free in any construction in ``where``.

    Occurrences inside acquisitions count, since execution may read them.
    ``allowed`` lists matches exempt from the check.
    """
    for item in where:
        if isinstance(item, Match):
            if item in allowed:
                continue
            items = item.constructions()
        else:
            items = (item,)
        for c in items:
            if any(u.name == v.name for u in latent_free_vars(c)):
                raise RuleError(f"freshness: {v.name} occurs free in {what} ({_show(c, sig)})")


def _forcing(x: Variable, c: Construction) -> bool:
    """x occurs in c on a path of application heads and arguments only.

    Evaluation is strict along such a path, so c is improper whenever the
    construction put in place of x is.
    """
    if c == x:
        return True
    if isinstance(c, Application):
        return _forcing(x, c.head) or any(_forcing(x, a) for a in c.args)
    return False


def _forces_replacement(x: Variable, c: Construction, rhs, sig) -> bool:
    """Whether ``c`` with an improper replacement for ``x`` cannot match ``rhs``."""
    if _forcing(x, c):
        return True
    if not _is_true(rhs, sig):
        return False
    if (isinstance(c, Application) and isinstance(c.head, Constant) and c.head.name in ("∃", "∀")
            and c.head.name not in sig.constants and len(c.args) == 1 and isinstance(c.args[0], Lambda)):
        lam = c.args[0]
        if x in lam.binders or not _forcing(x, lam.body):
            return False
        if c.head.name == "∀":
            # a true universal claim only forces its body if the range is non-empty
            return all(isinstance(b.ty, Base) and b.ty != IOTA for b in lam.binders)
        return True
    return False


def _sub_form_parts(c, sig, what: str):
    parts = match_sub_form(c)
    if parts is None:
        raise RuleError(f"{what} must be a substitution form C_(D/x), got {_show(c, sig)}")
    try:
        check_sub_form(c, sig)
    except TypeCheckError as exc:
        raise RuleError(f"{what}: {exc}") from None
    return parts


def _typecheck_sequent(s: Sequent, sig) -> None:
    for m in list(s.context) + [s.goal]:
        try:
            lt = infer(m.left, sig)
            if m.right is not None:
                rt = infer(m.right, sig)
                if not compatible(lt, rt):
                    raise RuleError(
                        f"match {format_match(m, sig)} relates {format_type(lt)} to {format_type(rt)}")
        except TypeCheckError as exc:
            raise RuleError(f"ill-typed match {format_match(m, sig)}: {exc}") from None


def _same_context(a: Sequent, b: Sequent, what: str) -> None:
    if a.context != b.context:
        raise RuleError(f"{what}: contexts differ")


# ------------------------------------------------------------------- rules


def _rule_ax(prem, concl, sig):
    if concl.goal not in concl.context:
        raise RuleError("AX: the goal is not among the assumptions")
    return {"M": concl.goal.left}


def _rule_wr(prem, concl, sig):
    (p,) = prem
    if p.goal != concl.goal:
        raise RuleError("WR: goal changed")
    if not p.context <= concl.context:
        raise RuleError("WR: the conclusion drops an assumption")
    return {}


def _rule_exists_i(prem, concl, sig):
    (p,) = prem
    _same_context(p, concl, "∃-I")
    g = concl.goal
    if not (_is_true(g.right, sig) and isinstance(g.left, Application) and g.left.head == Constant("∃")
            and len(g.left.args) == 1):
        raise RuleError("∃-I: the conclusion must be ∃(F):T")
    f = g.left.args[0]
    pg = p.goal
    if not _is_true(pg.right, sig):
        raise RuleError(f"∃-I: the premise must be F(A):T, not :{'_' if pg.right is None else _show(pg.right, sig)}")
    if not (isinstance(pg.left, Application) and pg.left.head == f):
        raise RuleError(f"∃-I: the premise does not apply {_show(f, sig)}")
    out = {"F": f}
    for i, a in enumerate(pg.left.args, 1):
        out["A" if len(pg.left.args) == 1 else f"A{i}"] = a
    return out


def _beta_parts(concl, sig):
    g = concl.goal
    if not (isinstance(g.left, Application) and isinstance(g.left.head, Lambda)):
        raise RuleError("β-EXP: the conclusion must be [λx̄.Y](X̄):y")
    lam = g.left.head
    if len(lam.binders) != len(g.left.args):
        raise RuleError("β-EXP: arity mismatch between binders and arguments")
    if g.right is None:
        raise RuleError("β-EXP: the conclusion must not be an empty match")
    return lam, g.left.args


def _rule_beta_exp(prem, concl, sig):
    lam, args = _beta_parts(concl, sig)
    xs, y = lam.binders, lam.body
    if len(prem) != len(args) + 1:
        raise RuleError(f"β-EXP: expected {len(args) + 1} premises, got {len(prem)}")
    for p in prem:
        _same_context(p, concl, "β-EXP")
    if len(xs) > 1:
        for a in args:
            for x in xs:
                if x in latent_free_vars(a):
                    raise RuleError(f"β-EXP: argument {_show(a, sig)} contains the bound variable {x.name}")
    if contains_exec(y):
        raise RuleError("β-EXP: the body executes a construction; substitution need not preserve its value")
    pairs = list(zip(args, xs))
    computed = substitute_many(pairs, y)
    last_error = None
    for k, p in enumerate(prem):
        if p.goal.right != concl.goal.right:
            continue
        left = p.goal.left
        if left != computed:
            many = match_sub_form_many(left)
            if many is None or many[1] != y or list(many[0]) != pairs:
                last_error = RuleError(
                    f"β-EXP: {_show(left, sig)} is not {_show(y, sig)} with the arguments substituted")
                continue
            try:
                check_sub_form(left, sig)
            except TypeCheckError as exc:
                raise RuleError(f"β-EXP: {exc}") from None
        rest = [q for i, q in enumerate(prem) if i != k]
        needed = list(args)
        ok = True
        for q in rest:
            if q.goal.right is None or q.goal.left not in needed:
                ok = False
                break
            needed.remove(q.goal.left)
        if ok and not needed:
            out = {"Y": y}
            for i, (a, x) in enumerate(pairs, 1):
                suffix = "" if len(pairs) == 1 else str(i)
                out["x" + suffix] = x
                out["X" + suffix] = a
            return out
        last_error = RuleError("β-EXP: the argument premises must be X:x for each argument X")
    raise last_error or RuleError("β-EXP: no premise has the substituted body with the conclusion's right side")


def _eta_guarded(m: Match, f: Variable, head: Construction) -> bool:
    left = m.left
    return (m.right == f and isinstance(left, Lambda) and isinstance(left.body, Application)
            and left.body.head == head and left.body.args == left.binders)


def _rule_app_inst(prem, concl, sig):
    p1, p2 = prem
    _same_context(p1, concl, "app-INST")
    g1 = p1.goal
    if not isinstance(g1.left, Application) or g1.right is None:
        raise RuleError("app-INST: the first premise must be F(X̄):y")
    if p2.goal != concl.goal:
        raise RuleError("app-INST: the second premise must have the conclusion's goal")
    head, args = g1.left.head, list(g1.left.args)
    gamma = concl.context
    new = p2.context - gamma
    if not gamma <= p2.context:
        raise RuleError("app-INST: the second premise drops an assumption")
    slots = [head] + args
    if len(new) != len(slots):
        raise RuleError(f"app-INST: expected {len(slots)} new assumptions F:f, X:x, got {len(new)}")
    assignment = _assign_slots(slots, sorted(new, key=format_match))
    if assignment is None:
        raise RuleError("app-INST: new assumptions must be F:f and X_i:x_i")
    fresh = [m.right for m in assignment]
    if not all(isinstance(v, Variable) for v in fresh):
        raise RuleError("app-INST: introduced right sides must be variables")
    if len({v.name for v in fresh}) != len(fresh):
        raise RuleError("app-INST: introduced variables must be pairwise distinct")
    f = fresh[0]
    others = [concl.goal] + slots
    guarded = [m for m in gamma if _eta_guarded(m, f, head)]
    for v in fresh:
        _fresh(v, others, "the rule's constructions", sig)
        _fresh(v, gamma, "the context", sig, allowed=guarded if v is f else ())
    for m in guarded:
        for v in fresh[1:]:
            _fresh(v, [m], "the context", sig)
    out = {"F": head, "f": f}
    for i, (a, m) in enumerate(zip(args, assignment[1:]), 1):
        suffix = "" if len(args) == 1 else str(i)
        out["X" + suffix] = a
        out["x" + suffix] = m.right
    return out


def _assign_slots(slots, matches):
    """Pair each slot with a distinct match whose left side equals it."""
    for perm in itertools.permutations(matches):
        if all(m.left == s for m, s in zip(perm, slots)):
            return list(perm)
    return None


def _rule_lambda_inst(prem, concl, sig):
    (p,) = prem
    if p.goal != concl.goal:
        raise RuleError("λ-INST: goal changed")
    new = p.context - concl.context
    if not concl.context <= p.context or len(new) != 1:
        raise RuleError("λ-INST: the premise must add exactly one assumption λx̄.Y:f")
    (m,) = new
    if not (isinstance(m.left, Lambda) and isinstance(m.right, Variable)):
        raise RuleError("λ-INST: the discharged assumption must be λx̄.Y:f")
    f = m.right
    _fresh(f, list(concl.context) + [concl.goal, m.left], "the conclusion", sig)
    return {"f": f, "Y": m.left}


def _rule_exec_inst(prem, concl, sig):
    p1, p2 = prem
    _same_context(p1, concl, "⌊⌊·⌋⌋_o-INST")
    g1 = p1.goal
    d, x, c, ty = _sub_form_parts(g1.left, sig, "⌊⌊·⌋⌋_o-INST first premise")
    if ty != O or not _is_truth_rhs(g1.right, sig):
        raise RuleError("⌊⌊·⌋⌋_o-INST: the first premise must be C_(D/x):o with a truth value on the right")
    if p2.goal != concl.goal:
        raise RuleError("⌊⌊·⌋⌋_o-INST: the second premise must have the conclusion's goal")
    new = p2.context - concl.context
    if not concl.context <= p2.context or len(new) != 1:
        raise RuleError("⌊⌊·⌋⌋_o-INST: the second premise must add exactly D:d")
    (m,) = new
    if m.left != d or not isinstance(m.right, Variable):
        raise RuleError(f"⌊⌊·⌋⌋_o-INST: expected the assumption {_show(d, sig)}:d with d a variable")
    dv = m.right
    if dv.name == x.name:
        raise RuleError("⌊⌊·⌋⌋_o-INST: d must differ from the substituted variable")
    _fresh(dv, list(concl.context) + [concl.goal, d, c], "the rule's constructions", sig)
    if not _forces_replacement(x, c, g1.right, sig):
        raise RuleError(
            f"⌊⌊·⌋⌋_o-INST: {x.name} does not occur strictly in {_show(c, sig)}, "
            "so a proper result does not make the replacement proper")
    return {"C": c, "D": d, "x": x, "d": dv}


def _rule_eta_con(prem, concl, sig):
    p1, p2 = prem
    _same_context(p1, concl, "η-CON")
    _same_context(p2, concl, "η-CON")
    g1 = p1.goal
    lam = g1.left
    if not (isinstance(lam, Lambda) and isinstance(lam.body, Application) and lam.body.args == lam.binders):
        raise RuleError("η-CON: the first premise must be λx̄.F(x̄):f")
    head = lam.body.head
    for b in lam.binders:
        if b in latent_free_vars(head):
            raise RuleError(f"η-CON: {b.name} occurs in {_show(head, sig)}")
    if p2.goal.left != head or p2.goal.right is None:
        raise RuleError("η-CON: the second premise must show that F is proper (F:g)")
    if concl.goal != Match(head, g1.right) or g1.right is None:
        raise RuleError("η-CON: the conclusion must be F:f")
    return {"F": head, "f": g1.right, "g": p2.goal.right}


def _rule_rt(prem, concl, sig):
    g = concl.goal
    d1, x1, c, ty = _sub_form_parts(g.left, sig, "RT conclusion")
    if ty != O or g.right is None:
        raise RuleError("RT: the conclusion must be C_(D₁/x₁):o")
    if contains_exec(c):
        raise RuleError("RT: C executes a construction; substitution need not preserve its value")
    errors = []
    for m in sorted(concl.context, key=format_match):
        if m.right != g.right:
            continue
        parts = match_sub_form(m.left)
        if parts is None or parts[2] != c or parts[3] != O:
            continue
        d2, x2 = parts[0], parts[1]
        try:
            check_sub_form(m.left, sig)
        except TypeCheckError as exc:
            errors.append(str(exc))
            continue
        gamma = concl.context - {m}
        want_a = Sequent(gamma | {Match(d1, x1)}, Match(d2, x2))
        want_b = Sequent(gamma | {Match(d2, x2)}, Match(d1, x1))
        if set(prem) != {want_a, want_b} or len(prem) != 2:
            errors.append("RT: premises must be Γ,D₁:x₁ --> D₂:x₂ and Γ,D₂:x₂ --> D₁:x₁")
            continue
        if Match(d1, x1) in gamma and Match(d2, x2) in gamma:
            return {"C": c, "D1": d1, "x1": x1, "D2": d2, "x2": x2}
        if x1 != x2:
            errors.append("RT: with different variables both D₁:x₁ and D₂:x₂ must be assumed")
            continue
        try:
            _fresh(x1, list(gamma) + [d1, d2, g.right], "the context", sig)
        except RuleError as exc:
            errors.append(f"RT: {exc}; otherwise both D₁:x₁ and D₂:x₂ must be assumed")
            continue
        return {"C": c, "D1": d1, "x1": x1, "D2": d2, "x2": x2}
    raise RuleError(errors[0] if errors else "RT: no assumption C_(D₂/x₂) with the goal's C and right side")


def _expand_match(m: Match, sig) -> Match:
    return Match(expand_sub_forms(m.left, sig), m.right)


def _rule_def_sub(prem, concl, sig):
    (p,) = prem
    if p == concl:
        raise RuleError("Def of Sub: nothing is rewritten")
    try:
        lhs = (frozenset(_expand_match(m, sig) for m in p.context), _expand_match(p.goal, sig))
        rhs = (frozenset(_expand_match(m, sig) for m in concl.context), _expand_match(concl.goal, sig))
    except TypeCheckError as exc:
        raise RuleError(f"Def of Sub: {exc}") from None
    if lhs != rhs:
        raise RuleError("Def of Sub: the sequents differ by more than computing substitution forms")
    return {}


def _eg_goal(concl, sig):
    g = concl.goal
    if not (_is_true(g.right, sig) and isinstance(g.left, Application) and g.left.head == Constant("∃")
            and len(g.left.args) == 1 and isinstance(g.left.args[0], Lambda)
            and len(g.left.args[0].binders) == 1):
        raise RuleError("EG: the conclusion must be ∃(λx.C):T")
    lam = g.left.args[0]
    return lam.binders[0], lam.body


def _eg_check(form: Construction, x, c, sig):
    d, fx, fc, ty = _sub_form_parts(form, sig, "EG assumption")
    if fx != x or fc != c or ty != O:
        raise RuleError(f"EG: {_show(form, sig)} is not C_(D/x) for the conclusion's λx.C")
    if contains_exec(c):
        raise RuleError("EG: C executes a construction; substitution need not preserve its value")
    if not _forces_replacement(x, c, TRUE, sig):
        raise RuleError(
            f"EG: {x.name} does not occur strictly in {_show(c, sig)}, so a true instance need not have "
            "a proper witness")
    return {"C": c, "D": d, "x": x}


def _rule_eg(prem, concl, sig):
    x, c = _eg_goal(concl, sig)
    if prem:
        (p,) = prem
        _same_context(p, concl, "EG")
        if not _is_true(p.goal.right, sig):
            raise RuleError("EG: the premise must be C_(D/x):T")
        return _eg_check(p.goal.left, x, c, sig)
    errors = []
    for m in sorted(concl.context, key=format_match):
        if not _is_true(m.right, sig) or match_sub_form(m.left) is None:
            continue
        try:
            return _eg_check(m.left, x, c, sig)
        except RuleError as exc:
            errors.append(exc)
    if errors:
        raise errors[0]
    raise RuleError("EG: no assumption C_(D/x):T for the conclusion's λx.C")


def _rule_exists_i_eta(prem, concl, sig):
    g = concl.goal
    lam = g.left.args[0] if isinstance(g.left, Application) and len(g.left.args) == 1 else None
    if not (_is_true(g.right, sig) and g.left.head == Constant("∃") and isinstance(lam, Lambda)
            and isinstance(lam.body, Application) and lam.body.args == lam.binders):
        raise RuleError("∃-Iη: the conclusion must be ∃(λx̄.F(x̄)):T")
    head = lam.body.head
    for b in lam.binders:
        if b in latent_free_vars(head):
            raise RuleError(f"∃-Iη: {b.name} occurs in {_show(head, sig)}")
    for m in sorted(concl.context, key=format_match):
        if (_is_true(m.right, sig) and isinstance(m.left, Application) and m.left.head == head
                and len(m.left.args) == len(lam.binders)):
            return {"F": head, "X": m.left.args[0] if len(m.left.args) == 1 else m.left.args}
    raise RuleError(f"∃-Iη: no assumption {_show(head, sig)}(X):T")


def _exec_of_acq(c):
    if (isinstance(c, Application) and isinstance(c.head, Constant) and len(c.args) == 1
            and isinstance(c.args[0], Acquisition)):
        ty = exec_type(c.head.name)
        if ty is not None:
            return c.args[0].body, ty
    return None


def _rule_acq_exec(prem, concl, sig, intro: bool):
    (p,) = prem
    name = "⌊⌊⌈·⌉⌋⌋-intro" if intro else "⌊⌊⌈·⌉⌋⌋-elim"
    _same_context(p, concl, name)
    wrapped, plain = (concl.goal, p.goal) if intro else (p.goal, concl.goal)
    if wrapped.right != plain.right:
        raise RuleError(f"{name}: right sides differ")
    parts = _exec_of_acq(wrapped.left)
    if parts is None or parts[0] != plain.left:
        raise RuleError(f"{name}: expected ⌊⌊⌈C⌉⌋⌋_t against C")
    try:
        got = infer(plain.left, sig)
    except TypeCheckError as exc:
        raise RuleError(f"{name}: {exc}") from None
    if got != parts[1]:
        raise RuleError(f"{name}: C has type {format_type(got)}, not {format_type(parts[1])}")
    return {"C": plain.left}


_ARITY = {
    "AX": (0,), "WR": (1,), "EXISTS-I": (1,), "APP-INST": (2,), "LAMBDA-INST": (1,),
    "EXEC-INST": (2,), "ETA-CON": (2,), "RT": (2,), "DEF-SUB": (1,), "EG": (0, 1),
    "EXISTS-I-ETA": (0,), "ACQ-EXEC-INTRO": (1,), "ACQ-EXEC-ELIM": (1,),
}

_ORDERED = {
    "APP-INST": _rule_app_inst,
    "EXEC-INST": _rule_exec_inst,
    "ETA-CON": _rule_eta_con,
}

_UNORDERED = {
    "AX": _rule_ax,
    "WR": _rule_wr,
    "EXISTS-I": _rule_exists_i,
    "BETA-EXP": _rule_beta_exp,
    "LAMBDA-INST": _rule_lambda_inst,
    "RT": _rule_rt,
    "DEF-SUB": _rule_def_sub,
    "EG": _rule_eg,
    "EXISTS-I-ETA": _rule_exists_i_eta,
    "ACQ-EXEC-INTRO": lambda p, c, s: _rule_acq_exec(p, c, s, True),
    "ACQ-EXEC-ELIM": lambda p, c, s: _rule_acq_exec(p, c, s, False),
}


def check_rule_application(rule: str, premises, conclusion: Sequent, inst: Optional[Mapping] = None,
                           sig: Optional[Signature] = None) -> dict:
    """Check one rule step; return the instantiation the kernel reads off.

    Premises of the two-premise rules may come in either order.  Entries
    of ``inst`` must agree with the instantiation found.
    """
    from .syntax import default_signature

    sig = sig if sig is not None else default_signature()
    name = canonical_rule(rule)
    premises = list(premises)
    if name != "BETA-EXP" and len(premises) not in _ARITY[name]:
        raise RuleError(f"{name} takes {' or '.join(map(str, _ARITY[name]))} premise(s), got {len(premises)}")
    for s in premises + [conclusion]:
        _typecheck_sequent(s, sig)
    if name in _ORDERED:
        errors = []
        for order in (premises, premises[::-1]):
            try:
                found = _ORDERED[name](order, conclusion, sig)
                break
            except RuleError as exc:
                errors.append(exc)
        else:
            # prefer the complaint from the order whose shapes matched further
            informative = [e for e in errors if "contexts differ" not in str(e)]
            raise (informative or errors)[0]
    else:
        found = _UNORDERED[name](premises, conclusion, sig)
    for key, want in (inst or {}).items():
        if key not in found:
            raise RuleError(f"{name}: unknown instantiation key {key!r}")
        if found[key] != want:
            raise RuleError(f"{name}: {key} is {_show(found[key], sig)}, not {_show(want, sig)}")
    return found


def check_derivation(d: Derivation, sig: Optional[Signature] = None) -> CheckReport:
    """Check every node of a (possibly shared) proof tree.

    Returns the root conclusion, how often each rule is used (shared nodes
    once) and which sequents coincide once contexts are read as sets.
    """
    seen: dict = {}
    order: list = []

    def visit(node: Derivation, path: tuple, stack: tuple):
        if id(node) in stack:
            raise ProofError(path, RuleError("the proof refers to itself"), node)
        if id(node) in seen:
            return
        for i, p in enumerate(node.premises, 1):
            visit(p, path + (p.label or str(i),), stack + (id(node),))
        try:
            check_rule_application(node.rule, [p.conclusion for p in node.premises], node.conclusion,
                                   node.inst, sig)
        except (RuleError, ParseError) as exc:
            raise ProofError(path, exc, node) from None
        seen[id(node)] = node
        order.append((path, node))

    visit(d, (d.label or "root",), ())
    counts = Counter(canonical_rule(n.rule) for _, n in order)
    return CheckReport(d.conclusion, counts, find_collapses(order), len(order))


def find_collapses(nodes) -> list:
    out = []
    named = [(n.label or "/".join(path), n) for path, n in nodes]
    named.sort(key=lambda item: _label_key(item[0]))
    for (la, a), (lb, b) in itertools.combinations(named, 2):
        if a.conclusion == b.conclusion:
            out.append(Collapse("sequent", la, lb))
        elif (a.conclusion.context == b.conclusion.context and a.written_context and b.written_context
              and a.written_context != b.written_context):
            out.append(Collapse("context", la, lb))
    return out


def _label_key(label: str):
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def acq_exec_rules(direction: str, premise: Sequent, sig: Optional[Signature] = None) -> Sequent:
    """Rewrite the goal between ``C`` and ``⌊⌊⌈C⌉⌋⌋_t`` (direction "intro" or "elim")."""
    from .syntax import default_signature, exec_name

    sig = sig if sig is not None else default_signature()
    g = premise.goal
    if direction.lower() == "intro":
        try:
            ty = infer(g.left, sig)
        except TypeCheckError as exc:
            raise RuleError(str(exc)) from None
        wrapped = Application(Constant(exec_name(ty)), (Acquisition(g.left),))
        return Sequent(premise.context, Match(wrapped, g.right))
    if direction.lower() == "elim":
        parts = _exec_of_acq(g.left)
        if parts is None:
            raise RuleError("elim needs a goal of the form ⌊⌊⌈C⌉⌋⌋_t")
        try:
            got = infer(parts[0], sig)
        except TypeCheckError as exc:
            raise RuleError(str(exc)) from None
        if got != parts[1]:
            raise RuleError(f"C has type {format_type(got)}, not {format_type(parts[1])}")
        return Sequent(premise.context, Match(parts[0], g.right))
    raise ValueError("direction is 'intro' or 'elim'")
