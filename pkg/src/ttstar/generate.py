"""Random well-typed constructions over the arithmetic signature.

Used by the property tests and the oracle sweeps.  Everything is driven by
an explicit ``random.Random`` so runs are reproducible.
"""

from __future__ import annotations

import random
from typing import Optional

from .substitution import SubRequest, contains_exec
from .syntax import Acquisition, Application, Constant, Construction, Lambda, Variable, exec_name
from .typecheck import TypeCheckError, infer, order_of_construction
from .types import IOTA, NU, O, ConstrTy, Ty

N = Variable("n", NU)
M = Variable("m", NU)
X = Variable("x", IOTA)
Y = Variable("y", IOTA)
P = Variable("p", O)
C1 = Variable("c1", ConstrTy(1))


def _c(name: str) -> Constant:
    return Constant(name)


class ConstructionGenerator:
    """Draws constructions of a requested type.

    ``allow_exec`` and ``allow_acq`` switch off execution and acquisitions
    (and so everything of order above 1).
    """

    def __init__(self, rng: random.Random, max_depth: int = 3, allow_exec: bool = True,
                 allow_acq: bool = True, numerals: int = 9):
        self.rng = rng
        self.max_depth = max_depth
        self.allow_exec = allow_exec
        self.allow_acq = allow_acq
        self.numerals = numerals

    def construction(self, ty: Ty, depth: Optional[int] = None) -> Construction:
        depth = self.max_depth if depth is None else depth
        if ty == O:
            return self._o(depth)
        if ty == NU:
            return self._nu(depth)
        if ty == IOTA:
            return self.rng.choice((X, Y))
        if isinstance(ty, ConstrTy) and ty.order == 1 and self.allow_acq:
            return self._constr1(depth)
        raise ValueError(f"cannot generate constructions of type {ty}")

    def _pick(self, leaves, nodes, depth):
        if depth <= 0 or self.rng.random() < 0.25:
            return self.rng.choice(leaves)()
        return self.rng.choice(nodes)()

    def _o(self, d):
        r = self.rng
        leaves = [lambda: _c("T"), lambda: _c("⊥"), lambda: P]
        nodes = [
            lambda: Application(_c("¬"), (self._o(d - 1),)),
            lambda: Application(_c("Odd"), (self._nu(d - 1),)),
            lambda: Application(_c("="), (self._nu(d - 1), self._nu(d - 1))),
            lambda: Application(_c("="), (r.choice((X, Y)), r.choice((X, Y)))),
            lambda: Application(_c(r.choice(("∃", "∀"))), (Lambda((r.choice((N, M)),), self._o(d - 1)),)),
            lambda: Application(Lambda((r.choice((N, M)),), self._o(d - 1)), (self._nu(d - 1),)),
        ]
        if self.allow_acq:
            nodes.append(lambda: Application(_c("Improp"), (self._constr1(d - 1),)))
        if self.allow_exec:
            nodes.append(lambda: Application(_c(exec_name(O)), (Acquisition(self._first_order(O, d - 1)),)))
        return self._pick(leaves, nodes, d)

    def _nu(self, d):
        r = self.rng
        leaves = [lambda: _c(str(r.randint(0, self.numerals))), lambda: N, lambda: M]
        nodes = [
            lambda: Application(_c("÷"), (self._nu(d - 1), self._nu(d - 1))),
            lambda: Application(Lambda((r.choice((N, M)),), self._nu(d - 1)), (self._nu(d - 1),)),
        ]
        if self.allow_exec:
            nodes.append(lambda: Application(_c(exec_name(NU)), (Acquisition(self._first_order(NU, d - 1)),)))
        return self._pick(leaves, nodes, d)

    def _first_order(self, ty, d):
        """A construction of ``ty`` with no acquisitions or executions."""
        inner = ConstructionGenerator(self.rng, max(d, 0), False, False, self.numerals)
        return inner.construction(ty)

    def _constr1(self, d):
        r = self.rng
        leaves = [lambda: C1, lambda: Acquisition(self._first_order(r.choice((NU, O)), d))]
        nodes = [
            lambda: Application(_c("triv"), (self._first_order(NU, d - 1),)),
            lambda: Application(_c("Sub1"), (Acquisition(self._first_order(NU, d - 1)),
                                             Acquisition(r.choice((N, M))),
                                             Acquisition(self._first_order(r.choice((NU, O)), d - 1)))),
        ]
        return self._pick(leaves, nodes, d)

    def bounded(self, ty: Ty, max_order: int, tries: int = 100) -> Construction:
        """A construction of ``ty`` whose order is at most ``max_order``."""
        for _ in range(tries):
            c = self.construction(ty)
            try:
                infer(c)
            except TypeCheckError:
                continue
            if order_of_construction(c) <= max_order:
                return c
        raise RuntimeError(f"no construction of order <= {max_order} found")

    def request(self) -> SubRequest:
        """A substitution request of order 1 without executions."""
        first = ConstructionGenerator(self.rng, self.max_depth, False, False, self.numerals)
        x = self.rng.choice((N, M))
        for _ in range(100):
            target = first.construction(self.rng.choice((O, NU)))
            if x in _free(target) or self.rng.random() < 0.1:
                break
        d = first.construction(NU, max(self.max_depth - 1, 0))
        assert not contains_exec(target) and not contains_exec(d)
        return SubRequest(d, x, target)


def _free(c):
    from .syntax import free_vars

    return free_vars(c)


def constructions(n: int, seed: int = 0, max_order: int = 2, max_depth: int = 3) -> list:
    """``n`` random constructions of type o, nu or *1 with order at most ``max_order``."""
    rng = random.Random(seed)
    higher = max_order >= 2
    gen = ConstructionGenerator(rng, max_depth, allow_exec=higher, allow_acq=higher)
    kinds = (O, O, NU, ConstrTy(1)) if higher else (O, NU)
    out = []
    while len(out) < n:
        ty = rng.choice(kinds)
        out.append(gen.bounded(ty, max_order))
    return out


def requests(n: int, seed: int = 0, max_depth: int = 3) -> list:
    rng = random.Random(seed)
    gen = ConstructionGenerator(rng, max_depth)
    return [gen.request() for _ in range(n)]
