import pytest

from charvar import golden, oracle
from charvar.classes import group_class, unipotent_group_class
from charvar.poly import GenusPoly, MultiPoly, parse, parse_genus
from charvar.tqft import (check_tables, first_column, reconstruct_closed_form,
                          representation_variety_class, representation_variety_closed_form,
                          twisted_class)

Q = MultiPoly.var("q")


def test_genus_matrix_n2(models):
    Z = models(2).genus.entries
    expect = [["q^2*(q - 1)", "q^2*(q - 2)*(q - 1)"], ["q^2*(q - 2)", "q^2*(q^2 - 3*q + 3)"]]
    assert Z == [[parse(x) for x in r] for r in expect]


def test_first_column_n2(models):
    m = models(2)
    col = first_column(m.catalog, m.tables)
    assert col[0] == Q ** 2 * (Q - 1)
    # complement identity: [I] c_I + [J] c_J = [T~_2]^2 with c_J the J-coefficient
    assert col[0] + col[1] == group_class(2) ** 2


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("unipotent", [False, True])
def test_four_sanity_identities(models, n, unipotent):
    m = models(n, unipotent)
    cat, T = m.catalog, m.tables
    G = unipotent_group_class(n) if unipotent else group_class(n)
    for j in range(cat.M):
        col = sum((m.genus.entries[i][j] * cat.unipotent[i].class_poly for i in range(cat.M)),
                  MultiPoly())
        assert col == G ** 2 * cat.unipotent[j].class_poly
    for k in range(cat.M):
        for j in range(cat.M):
            assert sum((T.F[i][j][k] for i in range(cat.M)), MultiPoly()) == cat.unipotent[j].class_poly
        for i in range(cat.M):
            assert sum((T.F[i][j][k] for j in range(cat.M)), MultiPoly()) == cat.unipotent[i].class_poly
    for j in range(len(T.E[0])):
        assert sum((T.E[i][j] for i in range(cat.M)), MultiPoly()) == G * cat.families[j].base_poly
    check_tables(cat, T)


def test_closed_forms():
    assert representation_variety_closed_form("Tt", 2) == golden.virtual_class("Tt2")
    assert representation_variety_closed_form("U", 3) == parse_genus("q^(4*g - 1)*(q - 1) + q^(6*g - 1)")
    assert representation_variety_closed_form("U", 4) == golden.virtual_class("U4")


@pytest.mark.parametrize("group", ["Tt", "T", "U"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_genus_zero(group, n):
    assert representation_variety_class(group, n, 0) == MultiPoly.const(1)


def test_symbolic_agrees_with_fixed():
    for group, n in (("Tt", 3), ("U", 4), ("T", 2)):
        gp = representation_variety_closed_form(group, n)
        for g in range(7):
            assert gp.evaluate(g) == representation_variety_class(group, n, g)


def test_reconstruct_constant():
    one = MultiPoly.const(1)
    assert reconstruct_closed_form([(g, one) for g in range(6)]) == GenusPoly.constant(1)


def test_reconstruct_from_values():
    vals = [(g, representation_variety_class("Tt", 2, g)) for g in range(5)]
    assert reconstruct_closed_form(vals) == golden.virtual_class("Tt2")


@pytest.mark.parametrize("kind,group,n,q", [("Tt", "Tt", 2, 2), ("Tt", "Tt", 2, 3), ("U", "U", 3, 2),
                                            ("U", "U", 3, 3), ("T", "T", 2, 3), ("Tt", "Tt", 3, 2)])
def test_fixed_genus_against_oracle(kind, group, n, q):
    v = representation_variety_class(group, n, 1)
    assert v.evaluate_q(q) == oracle.count_representation_variety(kind, n, q, 1)


def test_genus_two_against_oracle():
    v = representation_variety_class("U", 3, 2)
    assert v.evaluate_q(2) == oracle.count_representation_variety("U", 3, 2, 2)


def test_twisted():
    for g in range(3):
        assert twisted_class("Tt", 2, g, []) == representation_variety_class("Tt", 2, g)
        assert twisted_class("Tt", 2, g, [0]) == representation_variety_class("Tt", 2, g)
    J = [[1, 1], [0, 1]]
    v = twisted_class("Tt", 2, 1, [1])
    for q in (2, 3):
        assert v.evaluate_q(q) == oracle.count_representation_variety("Tt", 2, q, 1, [J])


def test_twisted_n3_against_oracle(models):
    cat = models(3).catalog
    for k in range(cat.M):
        v = twisted_class("Tt", 3, 1, [k])
        assert v.evaluate_q(2) == oracle.count_representation_variety(
            "Tt", 3, 2, 1, [cat.unipotent[k].rep])


def test_puncture_out_of_range():
    with pytest.raises(ValueError):
        twisted_class("Tt", 2, 1, [5])


def test_reconstruct_u4_from_seven_values():
    vals = [(g, representation_variety_class("U", 4, g)) for g in range(7)]
    assert reconstruct_closed_form(vals) == golden.virtual_class("U4")


def test_reconstruct_rejects_short_or_wrong_input():
    from charvar.errors import InterpolationFailure
    vals = [(g, representation_variety_class("U", 4, g)) for g in range(5)]
    with pytest.raises(InterpolationFailure):
        reconstruct_closed_form(vals)
    with pytest.raises(InterpolationFailure):
        reconstruct_closed_form([(0, MultiPoly.const(1)), (2, MultiPoly.const(1))])
