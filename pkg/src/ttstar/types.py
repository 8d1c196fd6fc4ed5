"""Order-stratified types.

Base types are ``o`` (truth values), ``i`` (individuals), ``nu`` (naturals)
and ``omega`` (possible worlds).  ``(t1,...,tm)->t0`` is the type of total
and partial functions, and ``*n`` the type of constructions of order ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

BASE_NAMES = ("o", "i", "nu", "omega")

_BASE_ALIASES = {
    "o": "o",
    "i": "i",
    "ι": "i",
    "iota": "i",
    "nu": "nu",
    "ν": "nu",
    "omega": "omega",
    "ω": "omega",
}

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")


class TypeSyntaxError(ValueError):
    def __init__(self, message: str, pos: int = 0):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Base:
    name: str

    def __post_init__(self):
        if self.name not in BASE_NAMES:
            raise ValueError(f"unknown base type {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Fun:
    args: tuple
    result: "Ty"

    def __post_init__(self):
        if not self.args:
            raise ValueError("function type needs at least one argument type")
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return format_type(self)


@dataclass(frozen=True)
class ConstrTy:
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("construction types are *1, *2, ...")

    def __str__(self):
        return f"*{self.order}"


Ty = Union[Base, Fun, ConstrTy]

O = Base("o")
IOTA = Base("i")
NU = Base("nu")
OMEGA = Base("omega")


def fun(*tys: Ty) -> Fun:
    """``fun(a, b, r)`` is ``(a,b)->r``."""
    return Fun(tuple(tys[:-1]), tys[-1])


def order_of_type(t: Ty) -> int:
    if isinstance(t, Base):
        return 1
    if isinstance(t, ConstrTy):
        return t.order + 1
    return max(max(order_of_type(a) for a in t.args), order_of_type(t.result))


def subtype(a: Ty, b: Ty) -> bool:
    """True if an ``a``-object may be used where a ``b``-object is expected.

    The only cumulativity is between construction types: every construction
    of order k is also one of every order above k.
    """
    if a == b:
        return True
    return isinstance(a, ConstrTy) and isinstance(b, ConstrTy) and a.order <= b.order


def compatible(a: Ty, b: Ty) -> bool:
    return subtype(a, b) or subtype(b, a)


def format_type(t: Ty) -> str:
    if isinstance(t, Fun):
        if len(t.args) == 1 and not isinstance(t.args[0], Fun):
            left = format_type(t.args[0])
        else:
            left = "(" + ",".join(format_type(a) for a in t.args) + ")"
        return f"{left}->{format_type(t.result)}"
    return str(t)


def parse_type(text: str) -> Ty:
    ty, pos = parse_type_prefix(text, 0)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise TypeSyntaxError(f"trailing input {text[pos:]!r} after type", pos)
    return ty


def parse_type_prefix(text: str, pos: int) -> tuple[Ty, int]:
    """Parse a type starting at ``pos``; return it with the end offset."""
    pos = _skip_ws(text, pos)
    if text.startswith("(", pos) or text.startswith("⟨", pos):
        close = ")" if text[pos] == "(" else "⟩"
        items = []
        pos += 1
        while True:
            item, pos = parse_type_prefix(text, pos)
            items.append(item)
            pos = _skip_ws(text, pos)
            if text.startswith(",", pos):
                pos += 1
                continue
            if text.startswith(close, pos):
                pos += 1
                break
            raise TypeSyntaxError("expected ',' or closing bracket in type", pos)
        arrow = _arrow_at(text, pos)
        if arrow:
            result, pos = parse_type_prefix(text, arrow)
            return Fun(tuple(items), result), pos
        if len(items) != 1:
            raise TypeSyntaxError("argument tuple must be followed by '->'", pos)
        return items[0], pos
    atom, pos = parse_type_atom(text, pos)
    arrow = _arrow_at(text, pos)
    if arrow:
        result, pos = parse_type_prefix(text, arrow)
        return Fun((atom,), result), pos
    return atom, pos


def parse_type_atom(text: str, pos: int) -> tuple[Ty, int]:
    """Parse a base type or ``*n`` (no arrows) starting at ``pos``."""
    if text.startswith("*", pos):
        end = pos + 1
        while end < len(text) and (text[end].isdigit() or text[end] in "⁰¹²³⁴⁵⁶⁷⁸⁹"):
            end += 1
        digits = text[pos + 1:end].translate(_SUPERSCRIPTS)
        if not digits:
            raise TypeSyntaxError("'*' must be followed by an order", pos)
        return ConstrTy(int(digits)), end
    end = pos
    while end < len(text) and (text[end].isalpha()):
        end += 1
    word = text[pos:end]
    if word not in _BASE_ALIASES:
        raise TypeSyntaxError(f"unknown type {word or text[pos:pos + 1]!r}", pos)
    return Base(_BASE_ALIASES[word]), end


def _arrow_at(text: str, pos: int) -> int:
    pos = _skip_ws(text, pos)
    # '-->' is the sequent arrow, never a type arrow
    if text.startswith("->", pos) and not text.startswith("-->", pos):
        return pos + 2
    if text.startswith("↦", pos) or text.startswith("→", pos):
        return pos + 1
    return 0


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in " \t":
        pos += 1
    return pos
