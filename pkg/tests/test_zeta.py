import pytest

from charvar import golden, oracle
from charvar.errors import BranchFailure
from charvar.poly import MultiPoly, parse, parse_zeta
from charvar.zeta import (conjugacy_count, order_exponents, pattern_group, triangular_group,
                          unipotent_group, zeta, zeta_family)

Q = MultiPoly.var("q")


def test_examples():
    assert zeta(unipotent_group(1)) == parse_zeta("1")
    assert zeta(unipotent_group(2)) == parse_zeta("q")
    assert zeta(unipotent_group(3)) == parse_zeta("q^2 + (q - 1)*q^(-s)")
    assert zeta(unipotent_group(4)) == parse_zeta("q^3 + q^(1 - s)*(q - 1)*(q + 1) + q^(1 - 2*s)*(q - 1)")
    assert zeta(triangular_group(2)) == parse_zeta("(q - 1)^2 + (q - 1)^(1 - s)")


def test_family_stabilizer_example():
    G = pattern_group(["1 0 * *".split(), "0 1 * *".split(), "0 0 1 *".split(), "0 0 0 1".split()])
    assert zeta(G) == parse_zeta("q^3 + q^(1 - s)*(q - 1)*(q + 1)")


def test_conjugacy_counts():
    assert conjugacy_count(zeta(unipotent_group(3))) == Q ** 2 + Q - 1
    assert conjugacy_count(zeta(unipotent_group(4))).evaluate_q(2) == 16
    assert conjugacy_count(zeta(triangular_group(2))) == Q * (Q - 1)


@pytest.mark.parametrize("family,n", [("un", n) for n in range(1, 7)] + [("tn", n) for n in range(1, 6)])
def test_goldens(family, n):
    assert zeta_family(family, n) == golden.zeta(family, n)


@pytest.mark.parametrize("family,n", [("un", n) for n in range(1, 8)] + [("tn", n) for n in range(1, 7)])
def test_degree_sum_is_group_order(family, n):
    Z = zeta_family(family, n)
    a, b = order_exponents(unipotent_group(n) if family == "un" else triangular_group(n))
    assert Z.substitute_s(-2) == Q ** a * (Q - 1) ** b


@pytest.mark.parametrize("kind,n,q", [("U", n, 2) for n in range(1, 7)] + [("U", n, 3) for n in range(1, 5)]
                         + [("T", n, q) for n in range(1, 4) for q in (2, 3)])
def test_class_counts_against_oracle(kind, n, q):
    Z = zeta_family("un" if kind == "U" else "tn", n)
    assert conjugacy_count(Z).evaluate_q(q) == oracle.count_conjugacy_classes(kind, n, q)


def _block(sizes, diag="1"):
    n = sum(sizes)
    grid = [["0"] * n for _ in range(n)]
    start = 0
    for s in sizes:
        for i in range(start, start + s):
            grid[i][i] = diag
            for j in range(i + 1, start + s):
                grid[i][j] = "*"
        start += s
    return pattern_group(grid)


@pytest.mark.parametrize("sizes", [(2, 3), (3, 3), (1, 4), (3, 2)])
def test_products(sizes):
    a, b = sizes
    assert zeta(_block(sizes)) == zeta(unipotent_group(a)) * zeta(unipotent_group(b))


def test_triangular_product():
    assert zeta(_block((2, 2), "m")) == zeta(triangular_group(2)) * zeta(triangular_group(2))


def test_bad_patterns():
    with pytest.raises(ValueError):
        pattern_group(["1 * 0".split(), "0 1 *".split(), "0 0 1".split()])
    with pytest.raises(ValueError):
        pattern_group(["1 0".split(), "* 1".split()])


def test_genus_zero_is_one():
    from charvar.surface import genus_form
    for fam in ("un", "tn"):
        for n in range(1, 7):
            assert genus_form(zeta_family(fam, n), fam, n).evaluate(0) == MultiPoly.const(1)
