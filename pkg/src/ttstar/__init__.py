"""Proof checker, evaluator and finite-model oracle for a partial type theory
with constructions, executions and a substitution primitive."""

from .kernel import (
    CheckReport,
    Derivation,
    Match,
    ProofError,
    RuleError,
    Sequent,
    check_derivation,
    check_rule_application,
    parse_sequent,
)
from .script import load_script, parse_script
from .semantics import Model, evaluate
from .substitution import SubRequest, sub_form, substitute
from .syntax import Signature, parse, unparse
from .typecheck import infer
from .types import parse_type

__version__ = "0.1.0"

__all__ = [
    "CheckReport", "Derivation", "Match", "Model", "ProofError", "RuleError", "Sequent", "Signature",
    "SubRequest", "check_derivation", "check_rule_application", "evaluate", "infer", "load_script",
    "parse", "parse_script", "parse_sequent", "parse_type", "sub_form", "substitute", "unparse",
]
