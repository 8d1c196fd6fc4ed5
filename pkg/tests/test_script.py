import pytest

from ttstar.corpus import corpus_dir, load_index
from ttstar.kernel import check_derivation
from ttstar.script import format_derivation, load_script, parse_script
from ttstar.syntax import ParseError

PROOFS = sorted((corpus_dir() / "proofs").glob("*.proof"))

TINY = """\
# weakening an axiom
var n : nu
context Γ = Odd(n):T
rule WR ⊢ Γ, 3÷0:_ --> Odd(n):T
  [a] rule AX ⊢ Γ --> Odd(n):T
"""


def test_tiny_script():
    script = parse_script(TINY)
    report = check_derivation(script.root, script.sig)
    assert report.rule_counts == {"WR": 1, "AX": 1}
    assert "a" in script.labels
    assert "Γ" in script.contexts


def test_refs_share_nodes():
    script = parse_script(TINY + "  ref a\n")
    assert script.root.premises[0] is script.root.premises[1]


@pytest.mark.parametrize("text, message", [
    ("", "empty"),
    ("# only a comment\n", "empty"),
    ("rule AX ⊢ T:T --> T:T\n ref nowhere\n", "nowhere"),
    ("bogus line\n", "expected"),
    ("rule AX ⊢ T:T --> T:T\n\trule AX ⊢ T:T --> T:T\n", "tabs"),
    ("signature missing.sig\n", "cannot read"),
    ("[1] rule AX ⊢ T:T --> T:T\n  [1] rule AX ⊢ T:T --> T:T\n", "twice"),
])
def test_script_errors(text, message):
    with pytest.raises(ParseError, match=message):
        parse_script(text)


def test_second_root_rejected():
    with pytest.raises(ParseError):
        parse_script("rule AX ⊢ T:T --> T:T\nrule AX ⊢ T:T --> T:T\n")


@pytest.mark.parametrize("path", PROOFS, ids=lambda p: p.stem)
def test_format_round_trip(path):
    script = load_script(path)
    text = format_derivation(script.root, script.sig)
    again = parse_script(text, script.sig)
    a = check_derivation(script.root, script.sig)
    b = check_derivation(again.root, again.sig)
    assert a.conclusion == b.conclusion
    assert a.rule_counts == b.rule_counts


def test_every_indexed_file_exists():
    for item in load_index():
        for k in range(len(item.files)):
            assert item.path(k).is_file(), item.path(k)
