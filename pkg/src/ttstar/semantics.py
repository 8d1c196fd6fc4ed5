"""Finite models and the evaluation function.

Values are plain Python objects:

* truth values are ``bool`` and naturals are ``int``;
* individuals and worlds are :class:`Ind` and :class:`World`;
* constructions-as-objects are :class:`ConstrVal`;
* functions are finite, possibly partial :class:`FnTable` objects;
* schematic builtins used as values are :class:`BuiltinFn`.

``None`` stands for "nothing is constructed" (improper).  It is never
confused with falsity, which is ``False``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional

from .substitution import substitute
from .syntax import (
    Acquisition,
    Application,
    Constant,
    Construction,
    Lambda,
    Signature,
    Variable,
    exec_type,
    is_numeral,
    sub_index,
    unparse,
    walk,
)
from .typecheck import Inferer, TypeCheckError, is_schematic
from .types import Base, ConstrTy, Fun, Ty, compatible, format_type, subtype

DEFAULT_DEPTH = 64
DEFAULT_MAX_TABLES = 10000


class EvaluationError(RuntimeError):
    """Precondition failures: unassigned variables, uninterpreted constants, runaway execution."""


class ModelError(ValueError):
    pass


# ------------------------------------------------------------------ values


@dataclass(frozen=True)
class Ind:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class World:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ConstrVal:
    construction: Construction

    def __str__(self):
        return unparse(self.construction)


@dataclass(frozen=True)
class BuiltinFn:
    name: str

    def __str__(self):
        return self.name


class FnTable:
    """A finite partial function: argument tuples mapped to values.

    Arguments missing from ``entries`` are points where the function is
    undefined.  Instances are immutable and compare by their entries.
    """

    __slots__ = ("arg_types", "entries", "_hash")

    def __init__(self, arg_types, entries: Mapping):
        self.arg_types = tuple(arg_types)
        self.entries = dict(entries)
        self._hash = None

    def __call__(self, *args):
        return self.entries.get(args)

    def __eq__(self, other):
        return isinstance(other, FnTable) and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.entries.items()))
        return self._hash

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"FnTable({format_value(self)})"


def same_value(a, b) -> bool:
    """Congruence of two evaluation results: same object, or both improper."""
    if a is None or b is None:
        return a is None and b is None
    return type(a) is type(b) and a == b


def format_value(v) -> str:
    if v is None:
        return "improper"
    if isinstance(v, bool):
        return "T" if v else "F"
    if isinstance(v, FnTable):
        items = []
        for args, val in sorted(v.entries.items(), key=lambda kv: _sort_key(kv[0])):
            key = ",".join(format_value(a) for a in args)
            items.append(f"{key}↦{format_value(val)}")
        return "{" + ", ".join(items) + "}"
    return str(v)


def _sort_key(v):
    if isinstance(v, tuple):
        return tuple(_sort_key(x) for x in v)
    return (type(v).__name__, format_value(v))


def canonical_name(v) -> Optional[Construction]:
    """The construction chosen as the proper name of a value, if any."""
    if isinstance(v, bool):
        return Constant("T" if v else "⊥")
    if isinstance(v, int):
        return Constant(str(v))
    if isinstance(v, (Ind, World)):
        return Constant(v.name)
    if isinstance(v, ConstrVal):
        return Acquisition(v.construction)
    return None


# ------------------------------------------------------------------ frames


@dataclass(frozen=True)
class Frame:
    """Finite domains for the base types plus the construction pool.

    ``constructions`` is the finite stand-in for the domains of ``*n``: the
    ``*n`` domain holds its members of order at most n.  ``partial`` admits
    partial functions into function domains.
    """

    individuals: tuple = ("i0", "i1")
    worlds: tuple = ("w0", "w1")
    max_nu: int = 7
    max_tables: int = DEFAULT_MAX_TABLES
    partial: bool = True
    allow_empty_iota: bool = False
    max_order: int = 3
    constructions: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "individuals", tuple(self.individuals))
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "constructions", frozenset(self.constructions))
        if not self.individuals and not self.allow_empty_iota:
            raise ModelError("the domain of individuals is empty; set allow-empty-iota to permit it")
        if not self.worlds:
            raise ModelError("the domain of worlds must not be empty")
        if self.max_nu < 0:
            raise ModelError("nu must contain at least 0")

    def base_domain(self, name: str) -> tuple:
        if name == "o":
            return (False, True)
        if name == "nu":
            return tuple(range(self.max_nu + 1))
        if name == "i":
            return tuple(Ind(n) for n in self.individuals)
        return tuple(World(n) for n in self.worlds)

    def describe(self) -> str:
        return f"i={len(self.individuals)},omega={len(self.worlds)},nu=0..{self.max_nu}"


@dataclass
class Model:
    """A frame, a signature and interpretations of the signature's constants."""

    frame: Frame
    sig: Signature
    interpretation: dict = field(default_factory=dict)
    name: str = ""
    _domains: dict = field(default_factory=dict, repr=False, compare=False)
    _inferer: Optional[Inferer] = field(default=None, repr=False, compare=False)
    _fixed: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def inferer(self) -> Inferer:
        if self._inferer is None:
            self._inferer = Inferer(self.sig)
        return self._inferer

    def domain(self, ty: Ty) -> tuple:
        hit = self._domains.get(ty)
        if hit is None:
            hit = self._domains[ty] = self._domain(ty)
        return hit

    def _domain(self, ty: Ty) -> tuple:
        if isinstance(ty, Base):
            return self.frame.base_domain(ty.name)
        if isinstance(ty, ConstrTy):
            out = []
            for c in sorted(self.frame.constructions, key=unparse):
                try:
                    order = self.inferer.infer(c)[1]
                except TypeCheckError:
                    continue
                if order <= ty.order:
                    out.append(ConstrVal(c))
            return tuple(out)
        return self._function_domain(ty)

    def _function_domain(self, ty: Fun) -> tuple:
        points = list(itertools.product(*(self.domain(a) for a in ty.args)))
        values = self.domain(ty.result)
        options = len(values) + (1 if self.frame.partial else 0)
        if options ** len(points) <= self.frame.max_tables:
            choices = ([None] if self.frame.partial else []) + list(values)
            tables = []
            for combo in itertools.product(choices, repeat=len(points)):
                tables.append(FnTable(ty.args, {p: v for p, v in zip(points, combo) if v is not None}))
            return tuple(tables)
        # too many tables: fall back to the ones the model itself mentions
        seen = []
        if self.frame.partial:
            seen.append(FnTable(ty.args, {}))
        for name, cty in self.sig.constants.items():
            if cty == ty and name in self.interpretation and self.interpretation[name] not in seen:
                seen.append(self.interpretation[name])
        return tuple(seen)

    def fixed_table(self, name: str) -> FnTable:
        """The table of a builtin with a fixed first-order type."""
        hit = self._fixed.get(name)
        if hit is None:
            nus = self.frame.base_domain("nu")
            if name == "¬":
                hit = FnTable((Base("o"),), {(False,): True, (True,): False})
            elif name == "Odd":
                hit = FnTable((Base("nu"),), {(n,): n % 2 == 1 for n in nus})
            else:
                hit = FnTable((Base("nu"), Base("nu")),
                              {(a, b): a // b for a in nus for b in nus if b != 0})
            self._fixed[name] = hit
        return hit

    def with_constructions(self, constructions) -> "Model":
        """This model with every subconstruction of ``constructions`` in the pool."""
        pool = set(self.frame.constructions)
        for c in constructions:
            pool.update(walk(c))
        if pool == set(self.frame.constructions):
            return self
        return Model(replace(self.frame, constructions=frozenset(pool)), self.sig, dict(self.interpretation), self.name)

    def with_interpretation(self, **updates) -> "Model":
        interp = dict(self.interpretation)
        interp.update(updates)
        return Model(self.frame, self.sig, interp, self.name)

    def describe(self) -> str:
        parts = [self.frame.describe()]
        for name in sorted(self.interpretation):
            parts.append(f"{name}={format_value(self.interpretation[name])}")
        return "; ".join(parts)


# -------------------------------------------------------------- evaluation

_DIRECT = {"∃", "∀", "¬", "=", "÷", "Odd", "Improp", "triv"}


class Evaluator:
    """Evaluates constructions in one model.  Stateless between calls."""

    def __init__(self, model: Model, depth_limit: int = DEFAULT_DEPTH):
        self.model = model
        self.depth_limit = depth_limit
        self.sig = model.sig

    def evaluate(self, c: Construction, env: Mapping, depth: int = 0):
        ev = self.evaluate
        if isinstance(c, Variable):
            try:
                return env[c]
            except KeyError:
                raise EvaluationError(f"variable {c.name} is not assigned") from None
        if isinstance(c, Application):
            head = c.head
            if isinstance(head, Constant) and self._is_direct(head.name):
                args = []
                for a in c.args:
                    val = ev(a, env, depth)
                    if val is None:
                        return None
                    args.append(val)
                return self.apply_builtin(head.name, args, env, depth)
            fn = ev(head, env, depth)
            if fn is None:
                return None
            args = []
            for a in c.args:
                val = ev(a, env, depth)
                if val is None:
                    return None
                args.append(val)
            return self.apply(fn, args, env, depth)
        if isinstance(c, Lambda):
            return self._lambda(c, env, depth)
        if isinstance(c, Acquisition):
            return ConstrVal(c.body)
        return self.constant(c.name)

    def _is_direct(self, name: str) -> bool:
        if name in self.sig.constants:
            return False
        return name in _DIRECT or sub_index(name) is not None or exec_type(name) is not None

    def _lambda(self, c: Lambda, env, depth):
        doms = [self.model.domain(b.ty) for b in c.binders]
        inner = dict(env)
        entries = {}
        binders = c.binders
        body = c.body
        for vals in itertools.product(*doms):
            for b, val in zip(binders, vals):
                inner[b] = val
            r = self.evaluate(body, inner, depth)
            if r is not None:
                entries[vals] = r
        return FnTable(tuple(b.ty for b in binders), entries)

    def constant(self, name: str):
        interp = self.model.interpretation
        if name in interp:
            return interp[name]
        if name in self.sig.constants:
            raise EvaluationError(f"constant {name} has no interpretation in the model")
        if name == "T":
            return True
        if name in ("F", "⊥"):
            return False
        if is_numeral(name):
            n = int(name)
            return n if n <= self.model.frame.max_nu else None
        if name in ("¬", "Odd", "÷"):
            return self.model.fixed_table(name)
        if is_schematic(name):
            return BuiltinFn(name)
        frame = self.model.frame
        if name in frame.individuals:
            return Ind(name)
        if name in frame.worlds:
            return World(name)
        raise EvaluationError(f"unknown constant {name}")

    def apply(self, fn, args, env, depth):
        if isinstance(fn, FnTable):
            return fn.entries.get(tuple(args))
        if isinstance(fn, BuiltinFn):
            return self.apply_builtin(fn.name, args, env, depth)
        return None

    def apply_builtin(self, name, args, env, depth):
        if name == "∃":
            (f,) = args
            return isinstance(f, FnTable) and any(v is True for v in f.entries.values())
        if name == "∀":
            (f,) = args
            if not isinstance(f, FnTable):
                return False
            size = 1
            for t in f.arg_types:
                size *= len(self.model.domain(t))
            return len(f.entries) == size and all(v is True for v in f.entries.values())
        if name == "¬":
            (p,) = args
            return (not p) if isinstance(p, bool) else None
        if name == "=":
            a, b = args
            return same_value(a, b)
        if name == "÷":
            a, b = args
            return a // b if b != 0 else None
        if name == "Odd":
            (n,) = args
            return n % 2 == 1
        if name == "triv":
            (v,) = args
            named = canonical_name(v)
            return ConstrVal(named) if named is not None else None
        if name == "Improp":
            (cv,) = args
            if not isinstance(cv, ConstrVal):
                return None
            return self.improper_everywhere(cv.construction, env, depth)
        idx = sub_index(name)
        if idx is not None:
            return self._sub(idx, args)
        ty = exec_type(name)
        if ty is not None:
            (cv,) = args
            return self._exec(ty, cv, env, depth)
        raise EvaluationError(f"no builtin {name}")

    def _sub(self, idx, args):
        if not all(isinstance(a, ConstrVal) for a in args):
            return None
        d, x, c = (a.construction for a in args)
        if not isinstance(x, Variable):
            return None
        try:
            d_ty, d_order = self.model.inferer.infer(d)
            _, c_order = self.model.inferer.infer(c)
        except TypeCheckError:
            return None
        if not compatible(d_ty, x.ty):
            return None
        x_order = self.model.inferer.infer(x)[1]
        if idx and max(d_order, c_order, x_order) > idx:
            return None
        return ConstrVal(substitute(d, x, c))

    def _exec(self, ty, cv, env, depth):
        if not isinstance(cv, ConstrVal):
            return None
        if depth >= self.depth_limit:
            raise EvaluationError(f"execution nested deeper than {self.depth_limit}; cyclic construction?")
        try:
            got = self.model.inferer.infer(cv.construction)[0]
        except TypeCheckError:
            return None
        if not subtype(got, ty):
            return None
        return self.evaluate(cv.construction, env, depth + 1)

    def improper_everywhere(self, c: Construction, env, depth) -> bool:
        """True iff ``c`` is improper under every assignment to its variables.

        Every variable that occurs free once acquisitions are looked through
        is varied, so the verdict does not depend on the ambient assignment.
        """
        from .syntax import latent_free_vars

        vs = sorted(latent_free_vars(c), key=lambda v: (v.name, format_type(v.ty)))
        inner = dict(env)
        for vals in itertools.product(*(self.model.domain(v.ty) for v in vs)):
            for v, val in zip(vs, vals):
                inner[v] = val
            if self.evaluate(c, inner, depth + 1) is not None:
                return False
        return True


def evaluate(c: Construction, model: Model, assignment: Optional[Mapping] = None, depth_limit: int = DEFAULT_DEPTH):
    """The object ``c`` constructs in ``model`` under ``assignment``, or None."""
    return Evaluator(model, depth_limit).evaluate(c, assignment or {})


def congruent(c1: Construction, c2: Construction, model: Model, assignment: Optional[Mapping] = None) -> bool:
    ev = Evaluator(model)
    env = assignment or {}
    return same_value(ev.evaluate(c1, env), ev.evaluate(c2, env))


def builtin_exists(f: FnTable) -> bool:
    return any(v is True for v in f.entries.values())


def builtin_forall(f: FnTable, model: Model) -> bool:
    return Evaluator(model).apply_builtin("∀", [f], {}, 0)


def match_satisfied(match, model: Model, assignment: Optional[Mapping] = None, evaluator: Optional[Evaluator] = None) -> bool:
    """Congruence of the two sides; an empty match holds iff its left side is improper."""
    ev = evaluator or Evaluator(model)
    env = assignment or {}
    left = ev.evaluate(match.left, env)
    if match.right is None:
        return left is None
    if left is None:
        return False
    return same_value(left, ev.evaluate(match.right, env))


# ----------------------------------------------------------------- loading


def parse_value(raw, ty: Ty, frame: Frame, sig: Optional[Signature] = None):
    """Read a value of type ``ty`` from YAML data."""
    if isinstance(ty, Base):
        if ty.name == "o":
            if raw in (True, "T", "t", "true"):
                return True
            if raw in (False, "F", "f", "false", "⊥"):
                return False
            raise ModelError(f"{raw!r} is not a truth value")
        if ty.name == "nu":
            try:
                n = int(raw)
            except (TypeError, ValueError):
                raise ModelError(f"{raw!r} is not a natural number") from None
            if not 0 <= n <= frame.max_nu:
                raise ModelError(f"{n} is outside 0..{frame.max_nu}")
            return n
        pool = frame.individuals if ty.name == "i" else frame.worlds
        if str(raw) not in pool:
            raise ModelError(f"{raw!r} is not in the domain of {ty.name}")
        return Ind(str(raw)) if ty.name == "i" else World(str(raw))
    if isinstance(ty, ConstrTy):
        from .syntax import parse

        return ConstrVal(parse(str(raw), sig))
    if not isinstance(raw, Mapping):
        raise ModelError(f"a {format_type(ty)} value must be a mapping from arguments to values")
    entries = {}
    for key, val in raw.items():
        if len(ty.args) == 1:
            parts = [key]
        elif isinstance(key, (list, tuple)):
            parts = list(key)
        else:
            parts = [p.strip() for p in str(key).split(",")]
        if len(parts) != len(ty.args):
            raise ModelError(f"key {key!r} does not have {len(ty.args)} argument(s)")
        args = tuple(parse_value(p, t, frame, sig) for p, t in zip(parts, ty.args))
        entries[args] = parse_value(val, ty.result, frame, sig)
    return FnTable(ty.args, entries)


_PRESET = re.compile(r"arith\((\d+)\)$")


def model_from_dict(data: Mapping, base: Optional[Path] = None, sig: Optional[Signature] = None) -> Model:
    """Build a model from parsed YAML.

    Keys: ``name``, ``preset`` (``arith(N)``), ``signature`` (inline text or
    a ``.sig`` path), ``domains`` (``i``/``omega`` as name lists or sizes,
    ``nu`` as the largest number), ``constants`` and ``flags``
    (``allow-empty-iota``, ``max-order``, ``max-tables``, ``partial``).
    """
    data = dict(data or {})
    kwargs = {}
    preset = data.get("preset")
    if preset:
        m = _PRESET.match(str(preset).strip())
        if not m:
            raise ModelError(f"unknown preset {preset!r}")
        kwargs["max_nu"] = int(m.group(1))
    for key, val in (data.get("domains") or {}).items():
        if key in ("i", "iota", "ι"):
            kwargs["individuals"] = _names(val, "i")
        elif key in ("omega", "ω"):
            kwargs["worlds"] = _names(val, "w")
        elif key in ("nu", "ν"):
            kwargs["max_nu"] = int(val)
        else:
            raise ModelError(f"unknown domain {key!r}")
    flags = data.get("flags") or {}
    for key, val in flags.items():
        attr = {"allow-empty-iota": "allow_empty_iota", "max-order": "max_order",
                "max-tables": "max_tables", "partial": "partial"}.get(key)
        if attr is None:
            raise ModelError(f"unknown flag {key!r}")
        kwargs[attr] = val
    frame = Frame(**kwargs)
    model_sig = Signature()
    sig_text = data.get("signature")
    if sig_text:
        sig_text = str(sig_text)
        if "\n" not in sig_text and sig_text.strip().endswith(".sig"):
            path = Path(sig_text.strip())
            if base is not None and not path.is_absolute():
                path = base / path
            model_sig = Signature.load(path)
        else:
            model_sig = Signature.parse(sig_text)
    if sig is not None:
        model_sig = model_sig.merged(sig)
    interp = {}
    for name, raw in (data.get("constants") or {}).items():
        name = str(name)
        if name not in model_sig.constants:
            raise ModelError(f"constant {name} is interpreted but not declared")
        interp[name] = parse_value(raw, model_sig.constants[name], frame, model_sig)
    return Model(frame, model_sig, interp, str(data.get("name", "")))


def _names(val, prefix):
    if isinstance(val, int):
        return tuple(f"{prefix}{k}" for k in range(val))
    return tuple(str(v) for v in val)


def load_model(path, sig: Optional[Signature] = None) -> Model:
    import yaml

    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ModelError(f"{path}: {exc}") from None
    model = model_from_dict(data, path.parent, sig)
    if not model.name:
        model.name = path.stem
    return model


def arith_model(n: int = 7, sig: Optional[Signature] = None, **frame_kwargs) -> Model:
    return Model(Frame(max_nu=n, **frame_kwargs), sig or Signature(), {}, f"arith{n}")


def parse_assignment(items, sig: Signature, model: Model) -> dict:
    """``["x=i0", "n=3"]`` to an assignment over declared variables."""
    env = {}
    for item in items:
        if "=" not in item:
            raise ModelError(f"assignment {item!r} is not of the form name=value")
        name, raw = (s.strip() for s in item.split("=", 1))
        if name not in sig.variables:
            raise ModelError(f"{name} is not a declared variable")
        ty = sig.variables[name]
        if isinstance(ty, Fun):
            import yaml

            raw = yaml.safe_load(raw)
        env[Variable(name, ty)] = parse_value(raw, ty, model.frame, sig)
    return env


__all__ = [
    "BuiltinFn", "ConstrVal", "EvaluationError", "Evaluator", "FnTable", "Frame", "Ind", "Model",
    "ModelError", "World", "arith_model", "builtin_exists", "builtin_forall", "canonical_name",
    "congruent", "evaluate", "format_value", "load_model", "match_satisfied", "model_from_dict",
    "parse_assignment", "parse_value", "same_value",
]
