"""Constructions: AST, concrete syntax and binding analysis.

Concrete syntax::

    C := X | x | C(C, ..., C) | λ x:t, y:t . C | ⌈C⌉

with the conveniences

* ``3÷0`` and ``a = b`` for ``÷(3,0)`` and ``=(a,b)``;
* ``[C]`` as auxiliary brackets, ``(C)`` as grouping;
* ``⌊⌊C⌋⌋_o`` for an application of the execution function (ASCII ``exec_o(C)``);
* ``⌈(C)⌉`` for an application of trivialization (ASCII ``triv(C)``);
* ``C_(D/x)`` for the substitution form ``⌊⌊Sub(⌈D⌉,⌈x⌉,⌈C⌉)⌋⌋_t``;
* ``D_(1)`` for ``D(w)`` and ``D_(0)`` for ``D``;
* ASCII aliases ``\\`` / ``lambda``, ``'[C]`` / ``acq[C]``, ``exists``, ``forall``, ``not``, ``sub2``.

Identifiers resolve by scope: a name bound by an enclosing λ is that
variable, a name declared as a variable in the signature is a free
variable, anything else is a constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Union

from .types import ConstrTy, Ty, TypeSyntaxError, format_type, parse_type, parse_type_atom, parse_type_prefix

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")
_SUBSCRIPTS = "₀₁₂₃₄₅₆₇₈₉"
RESERVED = re.compile(r"^z[₀₁₂₃₄₅₆₇₈₉]+$")

SYMBOLS = {"¬", "∃", "∀", "=", "÷", "⊥"}
ALIASES = {"exists": "∃", "forall": "∀", "not": "¬", "div": "÷", "eq": "="}
INFIX = {"÷", "="}


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnknownConstant(ParseError):
    pass


# --------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self):
        return unparse(self)


@dataclass(frozen=True)
class Variable:
    name: str
    ty: Ty

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Application:
    head: "Construction"
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("an application needs at least one argument")

    def __str__(self):
        return unparse(self)


@dataclass(frozen=True)
class Lambda:
    binders: tuple
    body: "Construction"

    def __post_init__(self):
        object.__setattr__(self, "binders", tuple(self.binders))
        if not self.binders:
            raise ValueError("a λ-abstraction needs at least one binder")
        names = [b.name for b in self.binders]
        if len(set(names)) != len(names):
            raise ValueError(f"binders must be pairwise distinct: {names}")
        if not all(isinstance(b, Variable) for b in self.binders):
            raise ValueError("binders must be variables")

    def __str__(self):
        return unparse(self)


@dataclass(frozen=True)
class Acquisition:
    body: "Construction"

    def __str__(self):
        return unparse(self)


Construction = Union[Constant, Variable, Application, Lambda, Acquisition]


def app(head: Construction, *args: Construction) -> Application:
    return Application(head, args)


def exec_name(ty: Ty) -> str:
    text = format_type(ty)
    if re.fullmatch(r"[a-z]+", text):
        return "exec_" + text
    return "exec_{" + text + "}"


def exec_type(name: str) -> Optional[Ty]:
    """The result type encoded in an execution constant's name, else None."""
    if not name.startswith("exec_"):
        return None
    rest = name[5:]
    if rest.startswith("{") and rest.endswith("}"):
        rest = rest[1:-1]
    try:
        return parse_type(rest)
    except (TypeSyntaxError, ValueError):
        return None


def sub_index(name: str) -> Optional[int]:
    """0 for the unindexed ``Sub``, n for ``Sub<n>``, None otherwise."""
    if name == "Sub":
        return 0
    m = re.fullmatch(r"Sub([1-9][0-9]*)", name)
    return int(m.group(1)) if m else None


def is_numeral(name: str) -> bool:
    return name.isdigit()


BUILTIN_NAMES = {"∃", "∀", "¬", "=", "÷", "⊥", "T", "F", "Odd", "Improp", "triv"}


def is_builtin(name: str) -> bool:
    return (
        name in BUILTIN_NAMES
        or is_numeral(name)
        or sub_index(name) is not None
        or exec_type(name) is not None
    )


# --------------------------------------------------------------- signature


@dataclass
class Signature:
    """Types of constants, plus the variables allowed to occur free.

    Text format, one declaration per line::

        Odd : nu->o
        var n, n' : nu
    """

    constants: dict = field(default_factory=dict)
    variables: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        sig = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise ParseError("expected 'name : type'", lineno, 1)
            names, ty_text = line.split(":", 1)
            names = names.strip()
            target = sig.constants
            for kw in ("var ", "const "):
                if names.startswith(kw):
                    target = sig.variables if kw == "var " else sig.constants
                    names = names[len(kw):]
            try:
                ty = parse_type(ty_text.strip())
            except (TypeSyntaxError, ValueError) as exc:
                raise ParseError(str(exc), lineno, len(raw) - len(ty_text) + 1) from None
            for name in names.split(","):
                name = _normalize_ident(name.strip())
                if not name:
                    raise ParseError("empty name", lineno, 1)
                target[name] = ty
        return sig

    @classmethod
    def load(cls, path) -> "Signature":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def merged(self, other: "Signature") -> "Signature":
        return Signature({**self.constants, **other.constants}, {**self.variables, **other.variables})

    def variable(self, name: str) -> Variable:
        return Variable(name, self.variables[name])

    def dumps(self) -> str:
        lines = [f"{n} : {format_type(t)}" for n, t in self.constants.items()]
        lines += [f"var {n} : {format_type(t)}" for n, t in self.variables.items()]
        return "\n".join(lines) + "\n"


def default_signature() -> Signature:
    """Variable conventions used when no signature is supplied."""
    from .types import IOTA, NU, O, OMEGA

    return Signature(
        constants={},
        variables={
            "x": IOTA, "y": IOTA,
            "n": NU, "m": NU, "n'": NU,
            "w": OMEGA, "w'": OMEGA,
            "p": O,
            "c1": ConstrTy(1), "c2": ConstrTy(2),
        },
    )


def _normalize_ident(name: str) -> str:
    name = name.translate(_SUPERSCRIPTS)
    if re.fullmatch(r"sub([1-9][0-9]*)?", name):
        return "S" + name[1:]
    return ALIASES.get(name, name)


# ------------------------------------------------------------------ lexer


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    start: int
    end: int


_FIXED = [
    ("-->", "SEQ"), ("⟶", "SEQ"), ("|-", "TURNSTILE"), ("⊢", "TURNSTILE"),
    ("⌈(", "TRIV"), ("⌈", "ACQ"), ("'[", "ACQA"), ("⌉", "ACQ_END"),
    ("⌊⌊", "EXEC"), ("⌋⌋_", "EXEC_END"), ("_(", "SUBST"),
    ("λ", "LAMBDA"), ("\\", "LAMBDA"),
    ("(", "("), (")", ")"), ("[", "["), ("]", "]"), (",", ","), (".", "."),
    (":", ":"), ("/", "/"),
]


class Parser:
    """Recursive-descent parser over a string.

    Also used by the proof-script reader, which needs the same token stream
    for matches and sequents.
    """

    def __init__(self, text: str, sig: Optional[Signature] = None, *, allow_reserved: bool = False):
        self.text = text
        self.strict = sig is not None
        self.sig = sig if sig is not None else default_signature()
        self.allow_reserved = allow_reserved
        self.pos = 0
        self.scope: list = []

    # tokens

    def error(self, message: str, pos: Optional[int] = None, cls=ParseError):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return cls(message, line, col)

    def _skip(self, pos: int) -> int:
        while pos < len(self.text) and self.text[pos].isspace():
            pos += 1
        return pos

    def peek(self) -> Token:
        pos = self._skip(self.pos)
        text = self.text
        if pos >= len(text):
            return Token("EOF", "", pos, pos)
        for lit, kind in _FIXED:
            if text.startswith(lit, pos):
                return Token(kind, lit, pos, pos + len(lit))
        ch = text[pos]
        if ch in SYMBOLS:
            return Token("SYM", ch, pos, pos + 1)
        if ch.isdigit():
            end = pos
            while end < len(text) and text[end].isdigit():
                end += 1
            return Token("NUM", text[pos:end], pos, end)
        if ch.isalpha() and ch != "λ":
            end = pos
            while end < len(text):
                c = text[end]
                if c == "_":
                    if text.startswith("_(", end):
                        break
                    if text[pos:end] == "exec" and text.startswith("_{", end):
                        depth, end = 0, end + 1
                        while end < len(text):
                            depth += {"{": 1, "}": -1}.get(text[end], 0)
                            end += 1
                            if depth == 0:
                                break
                        break
                    end += 1
                elif c == "'":
                    if text.startswith("'[", end):
                        break
                    end += 1
                elif (c.isalnum() and c != "λ") or c in _SUBSCRIPTS:
                    end += 1
                else:
                    break
            word = text[pos:end]
            if word == "lambda":
                return Token("LAMBDA", word, pos, end)
            if word == "acq" and text.startswith("[", end):
                return Token("ACQA", "acq[", pos, end + 1)
            return Token("IDENT", _normalize_ident(word), pos, end)
        raise self.error(f"unexpected character {ch!r}", pos)

    def advance(self) -> Token:
        tok = self.peek()
        self.pos = tok.end
        return tok

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.value or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}", tok.start)
        return self.advance()

    def done(self) -> None:
        tok = self.peek()
        if tok.kind != "EOF":
            raise self.error(f"unexpected {tok.value!r}", tok.start)

    def parse_type_here(self, atom_only: bool = False) -> Ty:
        pos = self._skip(self.pos)
        try:
            if self.text.startswith("{", pos):
                close = self.text.find("}", pos)
                if close < 0:
                    raise self.error("unclosed '{' in type", pos)
                ty = parse_type(self.text[pos + 1:close])
                self.pos = close + 1
                return ty
            if atom_only:
                ty, self.pos = parse_type_atom(self.text, pos)
            else:
                ty, self.pos = parse_type_prefix(self.text, pos)
        except TypeSyntaxError as exc:
            raise self.error(str(exc), pos + exc.pos if atom_only else exc.pos) from None
        return ty

    # constructions

    def construction(self) -> Construction:
        if self.at("LAMBDA"):
            return self._lambda()
        left = self._postfix()
        while self.peek().kind == "SYM" and self.peek().value in INFIX:
            op = self.advance().value
            right = self._postfix()
            left = Application(Constant(op), (left, right))
        return left

    def _lambda(self) -> Lambda:
        self.expect("LAMBDA")
        binders = []
        while True:
            tok = self.expect("IDENT")
            name = tok.value
            self._check_reserved(name, tok.start)
            if self.at(":"):
                self.advance()
                ty = self.parse_type_here()
            elif name in self.sig.variables:
                ty = self.sig.variables[name]
            else:
                raise self.error(f"binder {name!r} has no type annotation or declaration", tok.start)
            if any(b.name == name for b in binders):
                raise self.error(f"repeated binder {name!r}", tok.start)
            binders.append(Variable(name, ty))
            if self.at(","):
                self.advance()
                continue
            self.expect(".")
            break
        self.scope.append({b.name: b for b in binders})
        try:
            body = self.construction()
        finally:
            self.scope.pop()
        return Lambda(tuple(binders), body)

    def _postfix(self) -> Construction:
        c = self._atom()
        while True:
            if self.at("("):
                self.advance()
                args = [self.construction()]
                while self.at(","):
                    self.advance()
                    args.append(self.construction())
                self.expect(")")
                c = Application(c, tuple(args))
            elif self.at("SUBST"):
                c = self._subst_sugar(c)
            else:
                return c

    def _subst_sugar(self, target: Construction) -> Construction:
        start = self.expect("SUBST").start
        first = self.construction()
        if self.at(")"):
            self.advance()
            if first == Constant("0"):
                return target
            if first == Constant("1"):
                w = self.resolve("w", start)
                if not isinstance(w, Variable):
                    raise self.error("D_(1) needs a world variable 'w'", start)
                return Application(target, (w,))
            raise self.error("expected D_(0), D_(1) or C_(D/x)", start)
        self.expect("/")
        tok = self.expect("IDENT")
        var = self.resolve(tok.value, tok.start)
        if not isinstance(var, Variable):
            raise self.error(f"{tok.value!r} is not a variable", tok.start)
        self.expect(")")
        from .substitution import sub_form
        from .typecheck import TypeCheckError, infer

        sig = self.sig if self.strict else None
        try:
            return sub_form(first, var, target, infer(target, sig), sig)
        except TypeCheckError as exc:
            raise self.error(f"ill-typed substitution form: {exc}", start) from None

    def _atom(self) -> Construction:
        tok = self.peek()
        kind = tok.kind
        if kind in ("IDENT", "NUM", "SYM"):
            self.advance()
            return self.resolve(tok.value, tok.start)
        if kind == "(":
            self.advance()
            c = self.construction()
            self.expect(")")
            return c
        if kind == "[":
            self.advance()
            c = self.construction()
            self.expect("]")
            return c
        if kind == "ACQ":
            self.advance()
            c = self.construction()
            self.expect("ACQ_END")
            return Acquisition(c)
        if kind == "ACQA":
            self.advance()
            c = self.construction()
            self.expect("]")
            return Acquisition(c)
        if kind == "TRIV":
            self.advance()
            c = self.construction()
            self.expect(")")
            self.expect("ACQ_END")
            return Application(Constant("triv"), (c,))
        if kind == "EXEC":
            self.advance()
            c = self.construction()
            self.expect("EXEC_END")
            ty = self.parse_type_here(atom_only=True)
            return Application(Constant(exec_name(ty)), (c,))
        if kind == "LAMBDA":
            raise self.error("a λ-abstraction in this position needs brackets [λ ...]", tok.start)
        raise self.error(f"unexpected {tok.value or 'end of input'!r}", tok.start)

    def _check_reserved(self, name: str, pos: int) -> None:
        if RESERVED.match(name) and not self.allow_reserved:
            raise self.error(f"{name!r} is reserved for fresh variables", pos)

    def resolve(self, name: str, pos: int) -> Construction:
        for frame in reversed(self.scope):
            if name in frame:
                return frame[name]
        self._check_reserved(name, pos)
        if name in self.sig.variables:
            return Variable(name, self.sig.variables[name])
        if RESERVED.match(name):
            raise self.error(f"fresh variable {name!r} occurs unbound", pos)
        if is_builtin(name) or name in self.sig.constants or not self.strict:
            return Constant(name)
        raise self.error(f"unknown constant {name!r}", pos, UnknownConstant)


def parse(text: str, sig: Optional[Signature] = None, *, allow_reserved: bool = False) -> Construction:
    """Parse one construction.

    Without a signature the default variable conventions apply and unknown
    names are accepted as constants; with one, undeclared constants raise
    :class:`UnknownConstant`.
    """
    p = Parser(text, sig, allow_reserved=allow_reserved)
    c = p.construction()
    p.done()
    return c


# ---------------------------------------------------------------- printer


def unparse(c: Construction, sig: Optional[Signature] = None) -> str:
    """Render ``c`` so that ``parse(unparse(c, sig), sig) == c``.

    Binder types are written out unless ``sig`` declares the binder with the
    same type.  With a signature, canonical substitution forms are shown in
    the ``C_(D/x)`` notation.
    """
    return _Printer(sig).show(c)


class _Printer:
    def __init__(self, sig):
        self.sig = sig

    def show(self, c) -> str:
        if isinstance(c, Variable):
            return c.name
        if isinstance(c, Constant):
            return c.name
        if isinstance(c, Acquisition):
            return "⌈" + self.show(c.body) + "⌉"
        if isinstance(c, Lambda):
            parts = []
            for b in c.binders:
                if self.sig is not None and self.sig.variables.get(b.name) == b.ty:
                    parts.append(b.name)
                else:
                    parts.append(f"{b.name}:{_type_text(b.ty)}")
            return "λ" + ",".join(parts) + "." + self.show(c.body)
        return self._application(c)

    def _application(self, c: Application) -> str:
        head = c.head
        if isinstance(head, Constant):
            ty = exec_type(head.name)
            if ty is not None and len(c.args) == 1:
                sugar = self._sub_sugar(c)
                if sugar is not None:
                    return sugar
                return "⌊⌊" + self.show(c.args[0]) + "⌋⌋_" + _subscript(ty)
            if head.name == "triv" and len(c.args) == 1:
                return "⌈(" + self.show(c.args[0]) + ")⌉"
        return self._head(head) + "(" + ",".join(self.show(a) for a in c.args) + ")"

    def _head(self, head) -> str:
        if isinstance(head, Lambda):
            return "[" + self.show(head) + "]"
        return self.show(head)

    def _sub_sugar(self, c: Application) -> Optional[str]:
        if self.sig is None:
            return None
        from .substitution import match_sub_form, sub_form
        from .typecheck import TypeCheckError, infer

        parts = match_sub_form(c)
        if parts is None:
            return None
        d, x, target, _ = parts
        try:
            canonical = sub_form(d, x, target, infer(target, self.sig), self.sig)
        except TypeCheckError:
            return None
        if canonical != c:
            return None
        return self._head(target) + "_(" + self.show(d) + "/" + x.name + ")"


def _type_text(ty: Ty) -> str:
    text = format_type(ty)
    # a binder type followed by ',' or '.' must not swallow them
    return text


def _subscript(ty: Ty) -> str:
    text = format_type(ty)
    return text if re.fullmatch(r"[a-z]+|\*[0-9]+", text) else "{" + text + "}"


# ------------------------------------------------------------- binding


@dataclass(frozen=True)
class VarOccurrence:
    variable: Variable
    path: tuple
    status: str  # "free" or "bound"


def occurrences(c: Construction) -> list:
    """Every variable occurrence with its path and Free/Bound status.

    Paths index children: 0 is an application's head, 1.. its arguments; a
    λ-abstraction's or acquisition's body is child 0.  Binder positions are
    not occurrences.
    """
    out = []

    def walk(node, path, bound, opaque):
        if isinstance(node, Variable):
            status = "bound" if opaque or node in bound else "free"
            out.append(VarOccurrence(node, path, status))
        elif isinstance(node, Application):
            walk(node.head, path + (0,), bound, opaque)
            for i, a in enumerate(node.args, 1):
                walk(a, path + (i,), bound, opaque)
        elif isinstance(node, Lambda):
            walk(node.body, path + (0,), bound | set(node.binders), opaque)
        elif isinstance(node, Acquisition):
            walk(node.body, path + (0,), bound, True)

    walk(c, (), frozenset(), False)
    return out


def free_vars(c: Construction) -> frozenset:
    if isinstance(c, Variable):
        return frozenset((c,))
    if isinstance(c, Application):
        out = free_vars(c.head)
        for a in c.args:
            out |= free_vars(a)
        return out
    if isinstance(c, Lambda):
        return free_vars(c.body) - frozenset(c.binders)
    return frozenset()


def latent_free_vars(c: Construction) -> frozenset:
    """Free variables when acquisitions are looked through.

    These are the variables whose values an execution of some part of ``c``
    may consult.
    """
    if isinstance(c, Variable):
        return frozenset((c,))
    if isinstance(c, Application):
        out = latent_free_vars(c.head)
        for a in c.args:
            out |= latent_free_vars(a)
        return out
    if isinstance(c, Lambda):
        return latent_free_vars(c.body) - frozenset(c.binders)
    if isinstance(c, Acquisition):
        return latent_free_vars(c.body)
    return frozenset()


def variables_in(c: Construction) -> set:
    """Every variable in ``c``: occurrences, binders and acquisition bodies."""
    out = set()
    for node in walk(c):
        if isinstance(node, Variable):
            out.add(node)
        elif isinstance(node, Lambda):
            out.update(node.binders)
    return out


def all_variable_names(c: Construction) -> set:
    """Names of every variable in ``c``, binders and acquisition bodies included."""
    names = set()
    for node in walk(c):
        if isinstance(node, Variable):
            names.add(node.name)
        elif isinstance(node, Lambda):
            names.update(b.name for b in node.binders)
    return names


def subconstructions(c: Construction) -> list:
    """Preorder list of subconstructions, ``c`` first.

    Acquisition bodies are included; λ binder positions are not.
    """
    return list(walk(c))


def walk(c: Construction) -> Iterator[Construction]:
    yield c
    if isinstance(c, Application):
        yield from walk(c.head)
        for a in c.args:
            yield from walk(a)
    elif isinstance(c, (Lambda, Acquisition)):
        yield from walk(c.body)


def constants_in(c: Construction) -> set:
    return {n.name for n in walk(c) if isinstance(n, Constant)}
