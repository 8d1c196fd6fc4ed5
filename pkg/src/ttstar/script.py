"""Reader and writer for indented proof scripts.

A script lists one derivation node per line, conclusion first; a node's
premises follow it, indented further::

    # comments start with '#'
    signature eg.sig
    context Γ = Q(y):T
    rule EXEC-INST ⊢ Γ, R(x,y)_(D(w)/x):T --> ∃(λx.R(x,y)):T
      ref 1
      [4] rule EXISTS-I ⊢ ...

``[label]`` names a node so that ``ref label`` can reuse it elsewhere,
``inst k=v …`` asks the checker to confirm parts of the instantiation, and
``context`` defines a name standing for a set of matches.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .kernel import Derivation, canonical_rule, format_match, format_sequent, parse_match_from, parse_sequent_from
from .syntax import ParseError, Parser, Signature, default_signature, parse

_NODE = re.compile(r"^(?:\[(?P<label>[^\]]+)\]\s*)?rule\s+(?P<rest>.*)$")
_TURNSTILE = re.compile(r"\s(?:⊢|\|-)\s")


@dataclass
class Script:
    root: Derivation
    sig: Signature
    contexts: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)


@dataclass
class _Line:
    indent: int
    lineno: int
    node: Optional[Derivation] = None
    ref: Optional[str] = None


def _error(message: str, lineno: int, column: int = 1) -> ParseError:
    return ParseError(message, lineno, column)


def parse_script(text: str, sig: Optional[Signature] = None, base_dir=None) -> Script:
    """Parse a proof script into a derivation tree.

    ``signature`` lines are resolved against ``base_dir``; a signature
    passed in explicitly is merged on top of the script's own.
    """
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    script_sig: Optional[Signature] = None
    contexts: dict = {}
    lines: list = []
    labels: dict = {}

    def current_sig() -> Signature:
        s = script_sig if script_sig is not None else default_signature()
        return s.merged(sig) if sig is not None else s

    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].rstrip() if not raw.lstrip().startswith("#") else ""
        if not stripped.strip():
            continue
        indent = len(stripped) - len(stripped.lstrip(" "))
        if "\t" in stripped[:indent + 1]:
            raise _error("indent with spaces, not tabs", lineno)
        body = stripped.strip()
        if body.startswith("signature "):
            if lines:
                raise _error("'signature' must come before the proof", lineno)
            target = body[len("signature "):].strip()
            path = base / target
            try:
                loaded = Signature.load(path)
            except OSError as exc:
                raise _error(f"cannot read signature {target!r}: {exc.strerror}", lineno) from None
            script_sig = loaded if script_sig is None else script_sig.merged(loaded)
            continue
        if body.startswith("var ") or (body.startswith("const ")):
            decl = Signature.parse(body.replace("const ", "", 1) if body.startswith("const ") else body)
            base_sig = script_sig if script_sig is not None else default_signature()
            script_sig = base_sig.merged(decl)
            continue
        if body.startswith("context "):
            name, _, matches = body[len("context "):].partition("=")
            name = name.strip()
            if not name:
                raise _error("context needs a name", lineno)
            contexts[name] = _parse_matches(matches, current_sig(), contexts, lineno)
            continue
        if body.startswith("ref "):
            lines.append(_Line(indent, lineno, ref=body[4:].strip()))
            continue
        m = _NODE.match(body)
        if not m:
            raise _error(f"expected 'rule …', 'ref …', 'context …' or 'signature …', got {body!r}", lineno)
        node = _parse_node(m.group("label"), m.group("rest"), current_sig(), contexts, lineno)
        if node.label is not None:
            if node.label in labels:
                raise _error(f"label {node.label!r} used twice", lineno)
            labels[node.label] = node
        lines.append(_Line(indent, lineno, node=node))

    if not lines:
        raise _error("empty proof script", 1)
    root = _build_tree(lines, labels)
    return Script(root, current_sig(), contexts, labels)


def _parse_matches(text: str, sig, contexts, lineno) -> tuple:
    text = text.strip()
    if not text:
        return ()
    p = Parser(text, sig)
    out = []
    try:
        while True:
            tok = p.peek()
            if tok.kind == "IDENT" and tok.value in contexts:
                save = p.pos
                p.advance()
                if p.at(",", "EOF"):
                    out.extend(contexts[tok.value])
                else:
                    p.pos = save
                    out.append(parse_match_from(p))
            else:
                out.append(parse_match_from(p))
            if p.at(","):
                p.advance()
                continue
            p.done()
            return tuple(out)
    except ParseError as exc:
        raise _error(f"in context: {exc.message}", lineno, exc.column) from None


def _parse_node(label, rest, sig, contexts, lineno) -> Derivation:
    split = _TURNSTILE.search(" " + rest + " ")
    if split is None:
        raise _error("missing '⊢' before the sequent", lineno)
    head = (" " + rest)[:split.start()].strip()
    seq_text = (" " + rest)[split.end():]
    rule_text, inst_text = head, ""
    m = re.search(r"\binst\b", head)
    if m:
        rule_text, inst_text = head[:m.start()].strip(), head[m.end():]
    try:
        rule = canonical_rule(rule_text)
    except Exception as exc:
        raise _error(str(exc), lineno) from None
    inst = {}
    for item in shlex.split(inst_text):
        key, eq, value = item.partition("=")
        if not eq or not key:
            raise _error(f"instantiation {item!r} is not key=value", lineno)
        try:
            inst[key] = parse(value, sig)
        except ParseError as exc:
            raise _error(f"instantiation {key}: {exc.message}", lineno) from None
    p = Parser(seq_text, sig)
    try:
        seq, written = parse_sequent_from(p, contexts)
        p.done()
    except ParseError as exc:
        raise _error(f"in sequent: {exc.message}", lineno, exc.column) from None
    return Derivation(rule, [], seq, inst, label, written, lineno)


def _build_tree(lines, labels) -> Derivation:
    first = lines[0]
    if first.node is None:
        raise _error("the first node must be a rule, not a reference", first.lineno)
    if any(ln.indent <= first.indent for ln in lines[1:]):
        bad = next(ln for ln in lines[1:] if ln.indent <= first.indent)
        raise _error("only one root node is allowed", bad.lineno)
    stack = [first]
    for ln in lines[1:]:
        while stack and stack[-1].indent >= ln.indent:
            stack.pop()
        parent = stack[-1]
        if parent.node is None:
            raise _error("a reference cannot have premises", ln.lineno)
        if ln.ref is not None:
            target = labels.get(ln.ref)
            if target is None:
                raise _error(f"unknown label {ln.ref!r}", ln.lineno)
            parent.node.premises.append(target)
        else:
            parent.node.premises.append(ln.node)
        stack.append(ln)
    return first.node


def load_script(path, sig: Optional[Signature] = None) -> Script:
    path = Path(path)
    return parse_script(path.read_text(encoding="utf-8"), sig, path.parent)


def format_derivation(d: Derivation, sig: Optional[Signature] = None) -> str:
    """Render a derivation as a script; shared nodes become references."""
    out: list = []
    done: set = set()

    def emit(node: Derivation, depth: int):
        pad = "  " * depth
        if id(node) in done and node.label:
            out.append(f"{pad}ref {node.label}")
            return
        done.add(id(node))
        label = f"[{node.label}] " if node.label else ""
        inst = ""
        if node.inst:
            from .syntax import unparse

            inst = " inst " + " ".join(shlex.quote(f"{k}={unparse(v, sig)}") for k, v in node.inst.items())
        order = node.written_context or None
        out.append(f"{pad}{label}rule {node.rule}{inst} ⊢ {format_sequent(node.conclusion, sig, order)}")
        for p in node.premises:
            emit(p, depth + 1)

    emit(d, 0)
    return "\n".join(out) + "\n"


__all__ = ["Script", "parse_script", "load_script", "format_derivation", "format_match"]
