"""Typing and order inference for constructions.

Most builtins have fixed types.  A few are schematic and take their type
from the arguments they are applied to: the quantifiers, identity, the
substitution family ``Sub``/``Sub<n>``, execution ``exec_t``,
trivialization ``triv`` and ``Improp``.  A schematic constant is only
typable in head position.
"""

from __future__ import annotations

from typing import Optional

from .syntax import (
    Acquisition,
    Application,
    Constant,
    Construction,
    Lambda,
    Signature,
    Variable,
    default_signature,
    exec_type,
    is_numeral,
    sub_index,
)
from .types import NU, O, ConstrTy, Fun, Ty, compatible, format_type, order_of_type, subtype

DEFAULT_MAX_ORDER = 3

FIXED_BUILTINS = {
    "T": O,
    "F": O,
    "⊥": O,
    "¬": Fun((O,), O),
    "Odd": Fun((NU,), O),
    "÷": Fun((NU, NU), NU),
}

SCHEMATIC = {"∃", "∀", "=", "triv", "Improp"}


class TypeCheckError(TypeError):
    def __init__(self, message: str, construction=None, expected=None, found=None):
        super().__init__(message)
        self.construction = construction
        self.expected = expected
        self.found = found


def is_schematic(name: str) -> bool:
    return name in SCHEMATIC or sub_index(name) is not None or exec_type(name) is not None


def constant_type(name: str, sig: Signature) -> Optional[Ty]:
    """Fixed type of a constant, or None when it is schematic or unknown."""
    if name in sig.constants:
        return sig.constants[name]
    if is_numeral(name):
        return NU
    return FIXED_BUILTINS.get(name)


def _show(c) -> str:
    from .syntax import unparse

    return unparse(c)


class Inferer:
    """Memoizing type and order inference under one signature."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.cache: dict = {}

    def infer(self, c: Construction) -> tuple:
        """Return (type, order) of ``c``."""
        hit = self.cache.get(c)
        if hit is not None:
            return hit
        out = self._infer(c)
        self.cache[c] = out
        return out

    def _infer(self, c):
        if isinstance(c, Variable):
            return c.ty, order_of_type(c.ty)
        if isinstance(c, Constant):
            ty = constant_type(c.name, self.sig)
            if ty is None:
                if is_schematic(c.name):
                    raise TypeCheckError(f"{c.name} needs arguments to fix its type", c)
                raise TypeCheckError(f"unknown constant {c.name!r}", c)
            return ty, order_of_type(ty)
        if isinstance(c, Acquisition):
            _, inner = self.infer(c.body)
            ty = ConstrTy(inner)
            return ty, order_of_type(ty)
        if isinstance(c, Lambda):
            body_ty, body_order = self.infer(c.body)
            ty = Fun(tuple(b.ty for b in c.binders), body_ty)
            return ty, max(order_of_type(ty), body_order)
        return self._application(c)

    def _application(self, c: Application):
        typed = [self.infer(a) for a in c.args]
        arg_tys = [t for t, _ in typed]
        order = max(o for _, o in typed)
        head = c.head
        if isinstance(head, Constant) and constant_type(head.name, self.sig) is None and is_schematic(head.name):
            result = self._schematic(c, head.name, arg_tys)
            head_ty = Fun(tuple(arg_tys), result)
            return result, max(order, order_of_type(head_ty))
        head_ty, head_order = self.infer(head)
        if not isinstance(head_ty, Fun):
            raise TypeCheckError(f"{_show(head)} is applied but has type {format_type(head_ty)}", c, found=head_ty)
        if len(head_ty.args) != len(arg_tys):
            raise TypeCheckError(
                f"{_show(head)} expects {len(head_ty.args)} argument(s), got {len(arg_tys)}", c)
        for arg, want, got in zip(c.args, head_ty.args, arg_tys):
            if not subtype(got, want):
                raise TypeCheckError(
                    f"argument {_show(arg)} has type {format_type(got)}, expected {format_type(want)}",
                    arg, want, got)
        return head_ty.result, max(order, head_order)

    def _schematic(self, c: Application, name: str, arg_tys: list) -> Ty:
        n_args = len(arg_tys)

        def arity(k):
            if n_args != k:
                raise TypeCheckError(f"{name} takes {k} argument(s), got {n_args}", c)

        if name in ("∃", "∀"):
            arity(1)
            t = arg_tys[0]
            if not (isinstance(t, Fun) and t.result == O):
                raise TypeCheckError(f"{name} needs a set (…)->o, got {format_type(t)}", c.args[0], found=t)
            return O
        if name == "=":
            arity(2)
            if not compatible(arg_tys[0], arg_tys[1]):
                raise TypeCheckError(
                    f"identity between {format_type(arg_tys[0])} and {format_type(arg_tys[1])}", c)
            return O
        if name == "triv":
            arity(1)
            return ConstrTy(order_of_type(arg_tys[0]))
        if name == "Improp":
            arity(1)
            if not isinstance(arg_tys[0], ConstrTy):
                raise TypeCheckError("Improp needs a construction", c.args[0], found=arg_tys[0])
            return O
        idx = sub_index(name)
        if idx is not None:
            arity(3)
            for a, t in zip(c.args, arg_tys):
                if not isinstance(t, ConstrTy):
                    raise TypeCheckError(f"{name} needs constructions, got {format_type(t)}", a, found=t)
            n = idx or max(t.order for t in arg_tys)
            for a, t in zip(c.args, arg_tys):
                if t.order > n:
                    raise TypeCheckError(f"{name} cannot take a construction of type *{t.order}", a,
                                         ConstrTy(n), t)
            return ConstrTy(n)
        result = exec_type(name)
        arity(1)
        t = arg_tys[0]
        if not isinstance(t, ConstrTy):
            raise TypeCheckError(f"{name} needs a construction, got {format_type(t)}", c.args[0], found=t)
        if isinstance(c.args[0], Acquisition):
            inner_ty, _ = self.infer(c.args[0].body)
            if not subtype(inner_ty, result):
                raise TypeCheckError(
                    f"{name} executes a construction of type {format_type(inner_ty)}",
                    c.args[0].body, result, inner_ty)
        return result


_CACHES: dict = {}


def inferer_for(sig: Optional[Signature]) -> Inferer:
    """A memoizing inferer shared by every caller using an equal signature."""
    sig = sig if sig is not None else default_signature()
    key = (tuple(sig.constants.items()), tuple(sig.variables.items()))
    inf = _CACHES.get(key)
    if inf is None:
        if len(_CACHES) > 64:
            _CACHES.clear()
        inf = _CACHES[key] = Inferer(sig)
    return inf


def infer(c: Construction, sig: Optional[Signature] = None, max_order: Optional[int] = None) -> Ty:
    ty, order = inferer_for(sig).infer(c)
    if max_order is not None and order > max_order:
        raise TypeCheckError(f"order {order} exceeds the maximum {max_order}", c)
    return ty


def order_of_construction(c: Construction, sig: Optional[Signature] = None) -> int:
    """Least n such that every subconstruction has a type of order <= n.

    Acquisition bodies are not descended into: ``⌈C⌉`` contributes the
    order of its own type ``*k``, which is one more than C's order.
    """
    return inferer_for(sig).infer(c)[1]


def check(c: Construction, expected: Ty, sig: Optional[Signature] = None,
          max_order: int = DEFAULT_MAX_ORDER) -> Ty:
    """Succeed iff ``c`` has a type usable where ``expected`` is required."""
    got = infer(c, sig, max_order)
    if not subtype(got, expected):
        raise TypeCheckError(
            f"{_show(c)} has type {format_type(got)}, expected {format_type(expected)}", c, expected, got)
    return got


def typable(c: Construction, sig: Optional[Signature] = None) -> bool:
    try:
        infer(c, sig)
    except TypeCheckError:
        return False
    return True
