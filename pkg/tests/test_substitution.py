import random

import pytest
from hypothesis import given, strategies as st

from ttstar.corpus import corpus_dir
from ttstar.generate import ConstructionGenerator, requests
from ttstar.substitution import (
    SubRequest,
    expand_sub_forms,
    fresh_variable,
    match_sub_form,
    sub_form,
    substitute,
    substitute_many,
)
from ttstar.syntax import Acquisition, Signature, Variable, default_signature, free_vars, parse
from ttstar.typecheck import TypeCheckError, infer
from ttstar.types import IOTA, NU, O, OMEGA, ConstrTy

n = Variable("n", NU)


@pytest.fixture(scope="module")
def isig():
    return default_signature().merged(Signature.load(corpus_dir() / "signatures" / "intension.sig"))


def P(text, sig=None):
    return parse(text, sig, allow_reserved=True)


# x not free in C leaves C untouched, acquisitions included

def test_point_one_identity():
    c = parse("λn.Odd(3÷n)")
    assert substitute(parse("1"), n, c) is c
    c = parse("Odd(3÷m)")
    assert substitute(parse("1"), n, c) == c


def test_acquisition_opacity_blocks_ah2():
    c = parse("Improp(⌈3÷n⌉)")
    assert substitute(parse("0"), n, c) == parse("Improp(⌈3÷n⌉)")
    assert substitute(parse("0"), n, c) is c


def test_acquisition_opacity_direct():
    body = parse("3÷n")
    assert substitute(parse("0"), n, Acquisition(body)) == Acquisition(body)


def test_renaming_under_binder_gives_z0(isig):
    c = parse("∀(λw'.[F(w')](x))", isig)
    got = substitute(parse("D(w')", isig), Variable("x", IOTA), c)
    assert got == P("∀(λz₀:omega.[F(z₀)](D(w')))", isig)


def test_renaming_simple():
    x, y = Variable("x", IOTA), Variable("y", IOTA)
    got = substitute(y, x, parse("λy.=(x,y)"))
    assert got == P("λz₀:i.=(y,z₀)")


def test_renaming_only_avoids_free_names():
    # z₀ is bound, not free, in the body, so it is still chosen; the inner
    # binder is then renamed in turn so nothing is captured
    x, y = Variable("x", IOTA), Variable("y", IOTA)
    got = substitute(y, x, P("λy.[λz₀:i.=(x,y)](x)"))
    assert got == P("λz₀:i.[λz₁:i.=(y,z₀)](y)")


def test_no_renaming_without_clash(isig):
    c = parse("∀(λw'.[F(w')](x))", isig)
    got = substitute(parse("D(w)", isig), Variable("x", IOTA), c)
    assert got == parse("∀(λw'.[F(w')](D(w)))", isig)


def test_definition_cases():
    assert substitute(parse("1"), n, parse("Odd(3÷n)")) == parse("Odd(3÷1)")
    assert substitute(parse("1"), n, n) == parse("1")


def test_type_mismatch_rejected_with_signature():
    with pytest.raises(TypeCheckError):
        substitute(parse("T"), n, parse("Odd(n)"), default_signature())


def test_multi_binder_renames_only_colliding():
    got = substitute(parse("m"), n, parse("λm,k:nu.=(n,÷(m,k))"))
    assert got == P("λz₀:nu,k:nu.=(m,÷(z₀,k))")


def test_simultaneous_is_sequential():
    c = parse("=(n,m)")
    assert substitute_many([(parse("1"), n), (parse("2"), Variable("m", NU))], c) == parse("=(1,2)")


def test_sub_form_displays(isig):
    got = sub_form(parse("⌈3÷0⌉"), Variable("c1", ConstrTy(1)), parse("Improp(c1)"), O)
    assert got == parse("⌊⌊Sub2(⌈⌈3÷0⌉⌉,⌈c1⌉,⌈Improp(c1)⌉)⌋⌋_o")
    got = sub_form(parse("0"), n, parse("Improp(⌈3÷n⌉)"), O)
    assert got == parse("⌊⌊Sub2(⌈0⌉,⌈n⌉,⌈Improp(⌈3÷n⌉)⌉)⌋⌋_o")
    got = sub_form(parse("0"), n, parse("Improp(Sub1(⌈(n)⌉,⌈n⌉,⌈3÷n⌉))"), O)
    assert got == parse("⌊⌊Sub2(⌈0⌉,⌈n⌉,⌈Improp(Sub1(⌈(n)⌉,⌈n⌉,⌈3÷n⌉))⌉)⌋⌋_o")
    got = sub_form(parse("D(w)", isig), Variable("x", IOTA), parse("∀(λw'.[F(w')](x))", isig), O, isig)
    assert got == parse("⌊⌊Sub1(⌈D(w)⌉,⌈x⌉,⌈∀(λw'.[F(w')](x))⌉)⌋⌋_o", isig)


def test_sub_form_round_trip_and_expansion():
    form = sub_form(parse("1"), n, parse("Odd(3÷n)"), O)
    assert match_sub_form(form) == (parse("1"), n, parse("Odd(3÷n)"), O)
    assert expand_sub_forms(form) == parse("Odd(3÷1)")
    assert expand_sub_forms(parse("Odd(3÷n)_(1/n)")) == parse("Odd(3÷1)")


def test_fresh_variable():
    z0 = fresh_variable(set(), OMEGA)
    assert z0 == Variable("z₀", OMEGA)
    assert fresh_variable({z0}, OMEGA) == Variable("z₁", OMEGA)
    assert fresh_variable({"z₀", "z₁"}, NU).name == "z₂"
    assert fresh_variable({z0}, OMEGA) == fresh_variable({z0}, OMEGA)


seeds = st.integers(0, 10**6)


def _requests(seed, k=4):
    return requests(k, seed)


@given(seeds)
def test_opacity_property(seed):
    gen = ConstructionGenerator(random.Random(seed), allow_exec=False)
    for req in _requests(seed):
        body = gen.construction(O)
        assert substitute(req.replacement, req.variable, Acquisition(body)) == Acquisition(body)


@given(seeds)
def test_no_capture(seed):
    for r in _requests(seed):
        got = substitute(r.replacement, r.variable, r.target)
        bound = (free_vars(r.target) - {r.variable}) | free_vars(r.replacement)
        assert free_vars(got) <= bound
        if r.variable in free_vars(r.target):
            assert free_vars(got) == bound
        else:
            assert got == r.target


@given(seeds)
def test_result_typechecks_at_same_type(seed):
    for r in _requests(seed):
        assert infer(substitute(r.replacement, r.variable, r.target)) == infer(r.target)


@given(seeds)
def test_deterministic(seed):
    a = [substitute(r.replacement, r.variable, r.target) for r in _requests(seed)]
    b = [substitute(r.replacement, r.variable, r.target) for r in _requests(seed)]
    assert a == b


def test_sub_request_is_frozen():
    r = SubRequest(parse("1"), n, n)
    with pytest.raises(AttributeError):
        r.target = parse("2")
