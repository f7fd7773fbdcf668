import random
from fractions import Fraction

import pytest

from charvar import elim
from charvar.classes import all_zero_one
from charvar.elim import Ideal, closure_equations, groebner, ideal_contains
from charvar.poly import MultiPoly, parse


def P(*xs):
    return [parse(x) for x in xs]


def _s_polys_reduce(basis, order):
    R = elim._Ring(order)
    B = elim._Basis(R)
    packed = [R.pack(g) for g in basis]
    for g in packed:
        B.add(g, 0)
    for i, f in enumerate(packed):
        for g in packed[i + 1:]:
            s, _ = elim._spoly(R, f, g)
            if B.reduce(s):
                return False
    return True


def test_groebner_examples():
    assert groebner(P("x - y", "y^2"), ["x", "y"]) == P("y^2", "x - y")
    assert groebner(P("x*y - 1", "x^2"), ["x", "y"]) == [MultiPoly.const(1)]


def test_basis_is_cached_and_deterministic():
    I = Ideal(P("x^2 - y", "x*y - 1"), ["x", "y"])
    b = I.basis
    assert I.basis is b
    assert Ideal(P("x*y - 1", "x^2 - y"), ["x", "y"]).basis == b
    for g in I.generators:
        assert I.normal_form(g) == MultiPoly()
    assert _s_polys_reduce(b, ["x", "y"])


def test_buchberger_criterion_on_closures():
    for xi in all_zero_one(3):
        gens = closure_equations(3, xi)
        order = elim.y_vars(3)
        assert _s_polys_reduce(groebner(gens, order + ["y11", "y22"]), order + ["y11", "y22"])


def test_contains():
    x = Ideal(P("x"), ["x", "y"])
    assert ideal_contains(x, Ideal(P("x^2"), ["x", "y"]))
    assert not ideal_contains(x, Ideal(P("y"), ["x", "y"]))


def test_closures_n2():
    I, J = all_zero_one(2)
    assert sorted(map(str, closure_equations(2, I))) == sorted(["y11 - 1", "y12"])
    assert list(map(str, closure_equations(2, J))) == ["y11 - 1"]
    order = elim.y_vars(2) + ["y11"]
    pt = Ideal(closure_equations(2, I), order)
    line = Ideal(closure_equations(2, J), order)
    assert ideal_contains(pt, line) and not ideal_contains(line, pt)


def _upper_inverse(g):
    n = len(g)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = Fraction(1) / g[j][j]
        for i in range(j - 1, -1, -1):
            s = sum(g[i][k] * inv[k][j] for k in range(i + 1, j + 1))
            inv[i][j] = -s / g[i][i]
    return inv


def _mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


@pytest.mark.parametrize("n", [3, 4])
def test_closure_vanishes_on_orbit_samples(n):
    rng = random.Random(n)
    reps = all_zero_one(n)
    for xi in reps[:: max(1, len(reps) // 6)]:
        gens = closure_equations(n, xi)
        for _ in range(20 if n == 3 else 8):
            g = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    g[i][j] = Fraction(rng.choice([-2, -1, 1, 2]) if i == j else rng.randint(-3, 3))
            g[n - 1][n - 1] = Fraction(1)
            y = _mul(_mul(g, [[Fraction(v) for v in r] for r in xi]), _upper_inverse(g))
            vals = {elim.yname(i, j): y[i][j] for i in range(n) for j in range(i, n)}
            for f in gens:
                assert f.evaluate(vals) == 0


def test_closure_contains_representative():
    for xi in all_zero_one(3):
        vals = {elim.yname(i, j): xi[i][j] for i in range(3) for j in range(i, 3)}
        assert all(f.evaluate(vals) == 0 for f in closure_equations(3, xi))


def test_resource_budget(monkeypatch):
    from charvar.errors import ResourceLimit
    monkeypatch.setattr(elim, "MAX_BASIS", 1)
    with pytest.raises(ResourceLimit):
        groebner(P("x^2 - y", "x*y - 1", "y^3 - x"), ["x", "y"])
