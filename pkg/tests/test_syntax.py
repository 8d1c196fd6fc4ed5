import pytest
from hypothesis import given, strategies as st

from ttstar.generate import constructions
from ttstar.syntax import (
    Acquisition,
    Application,
    Constant,
    Lambda,
    ParseError,
    Signature,
    UnknownConstant,
    Variable,
    free_vars,
    latent_free_vars,
    occurrences,
    parse,
    subconstructions,
    unparse,
    walk,
)
from ttstar.types import IOTA, NU, O, ConstrTy

n = Variable("n", NU)


def test_parse_application():
    assert parse("Odd(÷(3,1))") == Application(Constant("Odd"), (Application(Constant("÷"), (Constant("3"), Constant("1"))),))


def test_parse_acquisition_of_variable():
    assert parse("⌈x⌉") == Acquisition(Variable("x", IOTA))


def test_parse_lambda_with_spaces():
    c = parse("λ n . Odd(÷(3,n))")
    assert c == Lambda((n,), Application(Constant("Odd"), (Application(Constant("÷"), (Constant("3"), n)),)))


def test_infix_division_is_sugar():
    assert parse("3 ÷ n") == parse("÷(3,n)")
    assert parse("Odd(3÷1)") == parse("Odd(÷(3,1))")


def test_ascii_aliases():
    assert parse("exists(lambda n. Odd(n))") == parse("∃(λn.Odd(n))")
    assert parse("acq[÷(3,0)]") == parse("⌈÷(3,0)⌉")
    assert parse("'[÷(3,0)]") == parse("⌈÷(3,0)⌉")
    assert parse("exec_o(acq[T])") == parse("⌊⌊⌈T⌉⌋⌋_o")
    assert parse("sub1(acq[1],acq[n],acq[n])") == parse("Sub1(⌈1⌉,⌈n⌉,⌈n⌉)")


def test_print():
    assert unparse(Acquisition(parse("3÷0"))) == "⌈÷(3,0)⌉"
    assert unparse(n, Signature(variables={"n": NU})) == "n"


def test_shadowing_round_trip():
    inner = Lambda((n,), n)
    c = Lambda((n,), Application(inner, (n,)))
    assert parse(unparse(c)) == c


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse("Odd(3")
    assert err.value.line == 1 and err.value.column >= 1
    with pytest.raises(ParseError):
        parse("λn Odd(n)")
    with pytest.raises(ParseError):
        parse("")


def test_unknown_constant_with_signature():
    with pytest.raises(UnknownConstant):
        parse("Frob(1)", Signature())


def test_reserved_fresh_names_rejected():
    with pytest.raises(ParseError):
        parse("λz₀:nu.z₀")


def test_free_vars_examples():
    assert free_vars(parse("⌈3÷n⌉")) == frozenset()
    assert free_vars(parse("λn.Odd(3÷n)")) == frozenset()
    assert free_vars(parse("Improp(Sub1(⌈(n)⌉,⌈n⌉,⌈3÷n⌉))")) == {n}


def test_latent_free_vars_see_through_acquisitions():
    assert latent_free_vars(parse("⌈3÷n⌉")) == {n}
    assert latent_free_vars(parse("⌈λn.n⌉")) == frozenset()


def test_subconstructions_preorder():
    x = Variable("x", IOTA)
    assert subconstructions(x) == [x]
    c = parse("Odd(n)")
    assert subconstructions(c) == [c, Constant("Odd"), n]
    acq = parse("⌈n⌉")
    assert subconstructions(acq) == [acq, n]


def test_occurrence_status():
    occ = occurrences(parse("=(n, ÷(3, n))"))
    assert [o.status for o in occ] == ["free", "free"]
    assert [o.path for o in occ] == [(1,), (2, 2)]
    occ = occurrences(parse("Improp(⌈n⌉)"))
    assert [o.status for o in occ] == ["bound"]
    occ = occurrences(parse("[λn.n](n)"))
    assert [o.status for o in occ] == ["bound", "free"]


seeds = st.integers(0, 10**6)


@given(seeds)
def test_round_trip_generated(seed):
    for c in constructions(3, seed):
        assert parse(unparse(c)) == c


@given(seeds)
def test_subconstruction_count_is_node_count(seed):
    def count(c):
        if isinstance(c, Application):
            return 1 + count(c.head) + sum(count(a) for a in c.args)
        if isinstance(c, Lambda):
            return 1 + count(c.body)
        if isinstance(c, Acquisition):
            return 1 + count(c.body)
        return 1

    for c in constructions(3, seed):
        assert len(subconstructions(c)) == count(c)


@given(seeds)
def test_free_vars_laws(seed):
    for c in constructions(3, seed):
        assert free_vars(Acquisition(c)) == frozenset()
        assert free_vars(c) <= latent_free_vars(c)
        for v in (n, Variable("x", IOTA), Variable("p", O), Variable("c1", ConstrTy(1))):
            assert free_vars(Lambda((v,), c)) == free_vars(c) - {v}


@given(seeds)
def test_free_status_stable_under_printing(seed):
    for c in constructions(2, seed):
        before = [(o.variable, o.status) for o in occurrences(c)]
        after = [(o.variable, o.status) for o in occurrences(parse(unparse(c)))]
        assert before == after
        assert {o.variable for o in occurrences(c) if o.status == "free"} == set(free_vars(c))
        assert set(walk(c)) == set(subconstructions(c))
