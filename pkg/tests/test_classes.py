import pytest
from sympy import Matrix

from charvar import oracle
from charvar.classes import (all_zero_one, check_catalog, conjugacy_test, group_class, identity,
                             set_partitions, stabilizer_class, unipotent_group_class)
from charvar.errors import CharvarError
from charvar.poly import MultiPoly, parse

Q = MultiPoly.var("q")
J = ((1, 1), (0, 1))


def test_conjugacy_examples():
    assert conjugacy_test(2, J, J)
    assert not conjugacy_test(2, identity(2), J)
    a = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    b = ((1, 0, 0), (0, 1, 1), (0, 0, 1))
    expect = any(len(blk) > 1 for blk in oracle.orbit_partition("Tt", 3, 3, [a, b]))
    assert conjugacy_test(3, a, b) == expect


@pytest.mark.parametrize("q", [2, 3])
def test_conjugacy_matches_finite_orbits(q):
    reps = all_zero_one(3)
    blocks = oracle.orbit_partition("Tt", 3, q, reps)
    where = {i: k for k, blk in enumerate(blocks) for i in blk}
    for i, a in enumerate(reps):
        for j, b in enumerate(reps[i + 1:], i + 1):
            assert conjugacy_test(3, a, b) == (where[i] == where[j])


def test_stabilizers_n2():
    assert stabilizer_class(2, identity(2)) == Q * (Q - 1)
    assert stabilizer_class(2, J) == Q


@pytest.mark.parametrize("n,M,N", [(1, 1, 1), (2, 2, 3), (3, 5, 12), (4, 16, 61)])
def test_counts(catalogs, n, M, N):
    cat = catalogs(n)
    assert (cat.M, cat.N) == (M, N)


def test_n5_rejected_range():
    from charvar.classes import enumerate_unipotent_classes
    with pytest.raises(CharvarError):
        enumerate_unipotent_classes(6)


def test_transition_n2(catalogs):
    cat = catalogs(2)
    assert [u.rep for u in cat.unipotent] == [identity(2), J]
    assert cat.transition.C == [[1, 0], [-1, 1]]
    assert cat.transition.order[0][1] and not cat.transition.order[1][0]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_catalog_identities(catalogs, n):
    cat = catalogs(n)
    check_catalog(cat, closures=n <= 3)
    for u in cat.unipotent:
        assert u.class_poly * u.stabilizer_poly == group_class(n)
    assert sum((u.class_poly for u in cat.unipotent), MultiPoly()) == unipotent_group_class(n)
    assert abs(Matrix(cat.transition.C).det()) == 1
    C = cat.transition.C
    for i in range(cat.M):
        assert C[i][i] == 1
        for j in range(cat.M):
            if C[i][j]:
                assert cat.transition.order[j][i]


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("q", [2, 3])
def test_class_polys_match_orbit_sizes(catalogs, n, q):
    for u in catalogs(n).unipotent:
        assert u.class_poly.evaluate_q(q) == oracle.orbit_size("Tt", n, q, u.rep)


def test_families_n2(catalogs):
    cat = catalogs(2)
    fams = cat.families
    assert [f.unipotent for f in fams[:2]] == [0, 1]
    assert fams[2].base_poly == Q - 2 and fams[2].orbit_poly == Q
    assert fams[2].stabilizer_poly == Q - 1


def test_catalog_json_roundtrip(catalogs):
    from charvar.classes import ClassCatalog
    cat = catalogs(3)
    assert ClassCatalog.from_json(cat.to_json()).to_json() == cat.to_json()


def test_set_partitions():
    assert [len(set_partitions(n)) for n in range(1, 6)] == [1, 2, 5, 15, 52]
