import pytest
from hypothesis import given, strategies as st

from ttstar.types import (
    IOTA,
    NU,
    O,
    OMEGA,
    ConstrTy,
    Fun,
    TypeSyntaxError,
    compatible,
    format_type,
    fun,
    order_of_type,
    parse_type,
    subtype,
)


def types(max_leaves=6):
    base = st.sampled_from([O, IOTA, NU, OMEGA]) | st.integers(1, 3).map(ConstrTy)
    return st.recursive(
        base,
        lambda inner: st.builds(lambda args, r: Fun(tuple(args), r), st.lists(inner, min_size=1, max_size=3), inner),
        max_leaves=max_leaves,
    )


@pytest.mark.parametrize("text, order", [
    ("o", 1),
    ("(nu,nu)->nu", 1),
    ("*1->o", 2),
    ("*2", 3),
    ("omega->(i->o)", 1),
])
def test_order_of_type(text, order):
    assert order_of_type(parse_type(text)) == order


def test_aliases_and_unicode():
    assert parse_type("ι") == IOTA
    assert parse_type("ω->ν") == fun(OMEGA, NU)
    assert parse_type("⟨ν,ν⟩->ν") == fun(NU, NU, NU)
    assert parse_type("*¹") == ConstrTy(1)


@pytest.mark.parametrize("bad", ["", "q", "nu->", "*0", "(nu", "nu nu"])
def test_bad_types(bad):
    with pytest.raises((TypeSyntaxError, ValueError)):
        parse_type(bad)


def test_cumulativity_only_between_construction_types():
    assert subtype(ConstrTy(1), ConstrTy(2))
    assert not subtype(ConstrTy(2), ConstrTy(1))
    assert compatible(ConstrTy(2), ConstrTy(1))
    assert not subtype(NU, O)
    assert not subtype(fun(NU, O), fun(NU, NU))


@given(types())
def test_format_parse_round_trip(t):
    assert parse_type(format_type(t)) == t


@given(types())
def test_function_order_dominates_parts(t):
    if isinstance(t, Fun):
        assert all(order_of_type(t) >= order_of_type(a) for a in t.args)
        assert order_of_type(t) >= order_of_type(t.result)
