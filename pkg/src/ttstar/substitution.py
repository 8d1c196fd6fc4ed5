"""Capture-avoiding substitution that never enters acquisitions.

``substitute(D, x, C)`` computes ``C`` with ``D`` for the free occurrences
of ``x``.  Because ``⌈·⌉`` binds everything inside it, substituting into an
acquisition leaves it unchanged.  Under a λ that binds a variable free in
``D``, the binder is first renamed to a reserved name ``z₀, z₁, …``.

``sub_form`` builds the object-level form ``⌊⌊Sub(⌈D⌉,⌈x⌉,⌈C⌉)⌋⌋_t``, and
``match_sub_form``/``expand_sub_forms`` recognise and compute such forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import (
    Acquisition,
    Application,
    Constant,
    Construction,
    Lambda,
    Signature,
    Variable,
    exec_name,
    exec_type,
    free_vars,
    sub_index,
)
from .types import Ty, compatible, format_type

_SUBSCRIPT_DIGITS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


@dataclass(frozen=True)
class SubRequest:
    replacement: Construction
    variable: Variable
    target: Construction


def fresh_name(k: int) -> str:
    return "z" + str(k).translate(_SUBSCRIPT_DIGITS)


def fresh_variable(avoid: Iterable, ty: Ty) -> Variable:
    """First of ``z₀, z₁, …`` whose name is not used by anything in ``avoid``.

    ``avoid`` may hold variables or plain names.
    """
    names = {a.name if isinstance(a, Variable) else a for a in avoid}
    k = 0
    while fresh_name(k) in names:
        k += 1
    return Variable(fresh_name(k), ty)


def _names(vs) -> set:
    return {v.name for v in vs}


def substitute(d: Construction, x: Variable, c: Construction, sig: Optional[Signature] = None) -> Construction:
    """The result of putting ``d`` for the free occurrences of ``x`` in ``c``.

    With ``sig`` the request is type-checked first.
    """
    if sig is not None:
        _check_request(d, x, c, sig)
    return _subst(d, x, c, free_vars(d))


def _check_request(d, x, c, sig):
    from .typecheck import TypeCheckError, infer

    if not isinstance(x, Variable):
        raise TypeCheckError("only a variable can be substituted for", x)
    d_ty = infer(d, sig)
    infer(c, sig)
    if not compatible(d_ty, x.ty):
        raise TypeCheckError(
            f"cannot put a {format_type(d_ty)}-construction for {x.name}:{format_type(x.ty)}", d, x.ty, d_ty)


def _subst(d, x, c, fv_d):
    if x not in free_vars(c):
        return c
    if isinstance(c, Variable):
        return d
    if isinstance(c, Application):
        return Application(_subst(d, x, c.head, fv_d), tuple(_subst(d, x, a, fv_d) for a in c.args))
    # a λ-abstraction in which x is free; x is not among the binders
    body = c.body
    clash = _names(fv_d)
    binders = list(c.binders)
    colliding = [b for b in binders if b.name in clash]
    if colliding:
        avoid = _names(free_vars(body)) | clash | _names(binders)
        for i, b in enumerate(binders):
            if b.name not in clash:
                continue
            z = fresh_variable(avoid, b.ty)
            avoid.add(z.name)
            body = _subst(z, b, body, frozenset((z,)))
            binders[i] = z
    return Lambda(tuple(binders), _subst(d, x, body, fv_d))


def substitute_many(pairs, c: Construction) -> Construction:
    """Sequential substitution ``c`` with ``D₁/x₁`` then ``D₂/x₂`` and so on."""
    for d, x in pairs:
        c = substitute(d, x, c)
    return c


# ------------------------------------------------------------------ forms


def sub_form(d: Construction, x: Variable, c: Construction, ty: Ty, sig: Optional[Signature] = None) -> Application:
    """``⌊⌊Sub<n>(⌈d⌉,⌈x⌉,⌈c⌉)⌋⌋_ty`` with n the largest order of d, x and c."""
    return sub_form_many([(d, x)], c, ty, sig)


def sub_form_many(pairs, c: Construction, ty: Ty, sig: Optional[Signature] = None) -> Application:
    """One execution around nested ``Sub`` applications, innermost pair first."""
    from .typecheck import order_of_construction

    pairs = list(pairs)
    if not pairs:
        raise ValueError("at least one substitution pair is needed")
    for d, x in pairs:
        _check_request(d, x, c, sig)
    inner: Construction = Acquisition(c)
    n = order_of_construction(c, sig)
    for d, x in pairs:
        n = max(n, order_of_construction(d, sig), order_of_construction(x, sig))
        inner = Application(Constant(f"Sub{n}"), (Acquisition(d), Acquisition(x), inner))
    return Application(Constant(exec_name(ty)), (inner,))


def match_sub_form_many(c: Construction) -> Optional[tuple]:
    """Split ``exec_t(Sub(⌈Dₘ⌉,⌈xₘ⌉, … Sub(⌈D₁⌉,⌈x₁⌉,⌈C⌉)))``.

    Returns ``(pairs, C, t)`` with pairs innermost first, or None.
    """
    if not (isinstance(c, Application) and isinstance(c.head, Constant) and len(c.args) == 1):
        return None
    ty = exec_type(c.head.name)
    if ty is None:
        return None
    pairs = []
    node = c.args[0]
    while True:
        if not (isinstance(node, Application) and isinstance(node.head, Constant)
                and sub_index(node.head.name) is not None and len(node.args) == 3):
            return None
        d, x, rest = node.args
        if not (isinstance(d, Acquisition) and isinstance(x, Acquisition) and isinstance(x.body, Variable)):
            return None
        pairs.append((d.body, x.body))
        if isinstance(rest, Acquisition):
            pairs.reverse()
            return pairs, rest.body, ty
        node = rest


def match_sub_form(c: Construction) -> Optional[tuple]:
    """``(D, x, C, t)`` when ``c`` is a single-pair substitution form."""
    parts = match_sub_form_many(c)
    if parts is None or len(parts[0]) != 1:
        return None
    (d, x), = parts[0]
    return d, x, parts[1], parts[2]


def is_sub_form(c: Construction) -> bool:
    return match_sub_form_many(c) is not None


def check_sub_form(c: Construction, sig: Optional[Signature] = None) -> tuple:
    """Split a substitution form and make sure it computes its result.

    The form must type-check, every replacement must suit its variable and
    the executed type must be that of the target, so that executing the
    form yields what the substitution yields.
    """
    from .typecheck import TypeCheckError, infer
    from .types import subtype

    parts = match_sub_form_many(c)
    if parts is None:
        raise TypeCheckError("not a substitution form", c)
    pairs, target, ty = parts
    infer(c, sig)
    for d, x in pairs:
        _check_request(d, x, target, sig)
    got = infer(target, sig)
    if not subtype(got, ty):
        raise TypeCheckError(
            f"substitution form executes a {format_type(got)}-construction at type {format_type(ty)}",
            c, ty, got)
    return parts


def expand_sub_forms(c: Construction, sig: Optional[Signature] = None) -> Construction:
    """Replace every substitution form outside acquisitions by its result.

    Forms occurring in a computed result are expanded in turn; acquisitions
    are left untouched.  With ``sig`` each form is validated by
    :func:`check_sub_form` first.
    """
    if isinstance(c, (Variable, Constant, Acquisition)):
        return c
    if isinstance(c, Lambda):
        return Lambda(c.binders, expand_sub_forms(c.body, sig))
    parts = match_sub_form_many(c)
    if parts is not None:
        if sig is not None:
            check_sub_form(c, sig)
        pairs, target, _ = parts
        return expand_sub_forms(substitute_many(pairs, target), sig)
    return Application(expand_sub_forms(c.head, sig), tuple(expand_sub_forms(a, sig) for a in c.args))


def contains_exec(c: Construction) -> bool:
    """True if an execution constant is applied anywhere outside acquisitions."""
    if isinstance(c, Application):
        if isinstance(c.head, Constant) and exec_type(c.head.name) is not None:
            return True
        return contains_exec(c.head) or any(contains_exec(a) for a in c.args)
    if isinstance(c, Lambda):
        return contains_exec(c.body)
    return False
