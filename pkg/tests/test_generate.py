from hypothesis import given, strategies as st

from ttstar.generate import constructions, requests
from ttstar.substitution import contains_exec
from ttstar.typecheck import infer, order_of_construction
from ttstar.types import compatible


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_constructions_are_typed_and_bounded(seed, max_order):
    for c in constructions(5, seed, max_order=max_order):
        infer(c)
        assert order_of_construction(c) <= max_order


def test_seeded():
    assert constructions(20, 7) == constructions(20, 7)
    assert requests(20, 7) == requests(20, 7)
    assert constructions(20, 7) != constructions(20, 8)


@given(st.integers(0, 10**6))
def test_requests_are_first_order_and_well_typed(seed):
    for r in requests(5, seed):
        assert not contains_exec(r.target) and not contains_exec(r.replacement)
        assert compatible(infer(r.replacement), r.variable.ty)
        assert order_of_construction(r.target) == 1
