import pytest

from charvar import oracle
from charvar.errors import SizeLimit
from charvar.poly import parse
from charvar.zeta import conjugacy_count, zeta_family


@pytest.mark.parametrize("q", oracle.SUPPORTED_Q)
def test_field_axioms(q):
    F = oracle.field(q)
    for x in range(q):
        assert F.add[x][0] == x and F.mul[x][1] == x
        if x:
            assert F.mul[x][F.inv[x]] == 1
    assert F.power(F.generator, q - 1) == 1
    assert len({F.power(F.generator, k) for k in range(q - 1)}) == q - 1


def test_unsupported_field():
    with pytest.raises(ValueError):
        oracle.field(6)


def test_class_count_examples():
    assert oracle.count_conjugacy_classes("U", 3, 2) == 5
    assert oracle.count_conjugacy_classes("T", 2, 3) == 6
    assert oracle.count_conjugacy_classes("U", 5, 2) == conjugacy_count(zeta_family("un", 5)).evaluate_q(2)


def test_representation_variety_examples():
    assert oracle.count_representation_variety("U", 3, 2, 1) == 40
    assert oracle.count_representation_variety("U", 3, 2, 0) == 1
    assert oracle.count_representation_variety("Tt", 2, 2, 1) == 4


@pytest.mark.parametrize("kind,n,q", [("U", 3, 2), ("U", 4, 2), ("T", 2, 3), ("Tt", 3, 3), ("U", 3, 3)])
def test_centralizer_sum_matches_pairs(kind, n, q):
    assert oracle.commuting_pairs(kind, n, q) == oracle.commuting_pairs_naive(kind, n, q)


@pytest.mark.parametrize("kind,n,q", [("U", 3, 2), ("T", 3, 2), ("Tt", 3, 3)])
def test_bitmask_model_agrees(kind, n, q):
    # over F_2 make_group uses the bitmask model; compare with the generic matrix group
    a = oracle.count_conjugacy_classes(kind, n, q)
    G = oracle.MatrixGroup(kind, n, q)
    seen, k = set(), 0
    for x in G.elements():
        if x not in seen:
            seen |= G.orbit(x)
            k += 1
    assert a == k


def test_class_equation():
    from charvar.classes import all_zero_one
    G = oracle.MatrixGroup("Tt", 3, 3)
    reps = all_zero_one(3)
    blocks = oracle.orbit_partition("Tt", 3, 3, reps)
    assert sorted(i for b in blocks for i in b) == list(range(len(reps)))
    seen, total = set(), 0
    for x in G.elements():
        if x not in seen:
            orb = G.orbit(x)
            seen |= orb
            total += len(orb)
    assert total == G.order


def test_point_counts():
    assert oracle.count_points(["a", "b"], [parse("a*b - 1")], [], 4) == 3
    assert oracle.count_points(["x", "y"], [parse("x^2 + y^2 - 1")], [], 3) == 4


def test_budgets():
    with pytest.raises(SizeLimit):
        oracle.make_group("U", 4, 3, budget=100)
    with pytest.raises(SizeLimit):
        oracle.count_points(["a", "b", "c"], [], [], 9, budget=100)
