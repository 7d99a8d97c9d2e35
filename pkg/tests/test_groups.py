import random

import pytest
from hypothesis import given, strategies as st

from amenact.groups import (
    DirectProductGroup,
    FiniteSubgroup,
    FiniteTableGroup,
    FreeAbelianGroup,
    GroupError,
    Homomorphism,
    SubgroupIso,
    Sublattice,
    coset_rep,
    identity_hom,
    inverse,
    multiply,
    power,
    trivial_subgroup,
)
from amenact.presets import load_group


@pytest.fixture(scope="module")
def c4():
    return load_group("c4").spec


@pytest.fixture(scope="module")
def c6():
    return load_group("c6").spec


@pytest.fixture(scope="module")
def z():
    return load_group("z").spec


@pytest.fixture(scope="module")
def zxc2():
    return load_group("zxc2").spec


def test_multiply_examples(c4, z):
    z2 = FreeAbelianGroup(2)
    assert multiply(z2.element((1, 0)), z2.element((0, 1))) == z2.element((1, 1))
    g = c4.element(3)
    assert multiply(g, c4.identity()) == g
    assert multiply(c4.element(3), c4.element(2)) == c4.element(1)


def test_inverse_examples(c6):
    z2 = FreeAbelianGroup(2)
    assert inverse(z2.identity()) == z2.identity()
    assert inverse(z2.element((3, -1))) == z2.element((-3, 1))
    assert inverse(c6.element(4)) == c6.element(2)


def test_mixed_group_elements_rejected(c4, c6):
    with pytest.raises(GroupError):
        multiply(c4.element(1), c6.element(1))


def test_enumerate_table_order(c4):
    assert [g.value for g in list(c4.elements())[:4]] == [0, 1, 2, 3]


def _bfs_shells(rank, gens, depth):
    """Independent BFS oracle over the lattice Cayley graph."""
    seen = {(0,) * rank}
    order = [(0,) * rank]
    shell = [(0,) * rank]
    for _ in range(depth):
        nxt = set()
        for v in shell:
            for s in gens:
                w = tuple(a + b for a, b in zip(v, s))
                if w not in seen:
                    nxt.add(w)
        shell = sorted(nxt)
        seen.update(shell)
        order.extend(shell)
    return order


def test_enumerate_free_abelian_matches_bfs_oracle(z):
    oracle = _bfs_shells(1, [(1,), (-1,)], 4)
    got = [z.element_at(i).value for i in range(len(oracle))]
    assert got == oracle
    assert got[:5] == [(0,), (-1,), (1,), (-2,), (2,)]


def test_enumerate_direct_product_c2c2():
    c2a = FiniteTableGroup([[0, 1], [1, 0]], generators=[1], name="c2a")
    c2b = FiniteTableGroup([[0, 1], [1, 0]], generators=[1], name="c2b")
    prod = DirectProductGroup([c2a, c2b])
    got = [prod.element_at(i).value for i in range(4)]
    assert got == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(IndexError):
        prod.element_at(4)


def test_enumerate_no_duplicates_long_prefix(zxc2):
    seen = set()
    for i in range(10**4):
        seen.add(zxc2.element_at(i))
    assert len(seen) == 10**4
    # prefix stability across a second pass
    assert [zxc2.element_at(i) for i in range(100)] == [zxc2.element_at(i) for i in range(100)]


def test_coset_rep_examples(c6, zxc2):
    a = FiniteSubgroup(c6, [c6.element(0), c6.element(3)])
    assert coset_rep(c6.element(4), a, "right") == c6.element(1)
    g_in = c6.element(3)
    assert coset_rep(g_in, a, "right") == c6.element(0)
    sub = load_group("zxc2").subgroup("c2")
    g = zxc2.element(((5,), 1))
    assert coset_rep(g, sub, "left") == zxc2.element(((5,), 0))


def test_coset_rep_idempotent_and_partitions(c6):
    a = FiniteSubgroup(c6, [c6.element(0), c6.element(2), c6.element(4)])
    for g in c6.elements():
        r = coset_rep(g, a, "right")
        assert coset_rep(r, a, "right") == r
        for h in c6.elements():
            same = coset_rep(g, a, "right") == coset_rep(h, a, "right")
            assert same == (multiply(g, inverse(h)) in a)


@given(st.integers(0, 23), st.integers(0, 23), st.integers(0, 23))
def test_group_laws_s4(i, j, k):
    s4 = load_group("s4").spec
    a, b, c = s4.element_at(i), s4.element_at(j), s4.element_at(k)
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, inverse(a)) == s4.identity()
    assert multiply(a, s4.identity()) == a


@given(st.tuples(st.integers(-30, 30), st.integers(-30, 30)),
       st.tuples(st.integers(-30, 30), st.integers(-30, 30)))
def test_group_laws_lattice(u, v):
    z2 = FreeAbelianGroup(2)
    a, b = z2.element(u), z2.element(v)
    assert multiply(a, b) == multiply(b, a)
    assert multiply(a, inverse(a)) == z2.identity()


def test_power(c6):
    assert power(c6.element(2), 5) == c6.element(4)
    assert power(c6.element(2), -1) == c6.element(4)
    assert power(c6.element(5), 0) == c6.identity()


def test_finite_table_validation_catches_bad_tables():
    with pytest.raises(GroupError):
        FiniteTableGroup([[0, 0], [1, 1]])  # rows not permutations
    with pytest.raises(GroupError):
        FiniteTableGroup([[1, 0, 2], [0, 2, 1], [2, 1, 0]])  # latin square without identity
    with pytest.raises(GroupError):
        FiniteTableGroup([[0, 1], [1, 0]], generators=[0])  # does not generate


def test_subgroup_validation(c6):
    with pytest.raises(GroupError):
        FiniteSubgroup(c6, [c6.element(1)])  # no identity
    with pytest.raises(GroupError):
        FiniteSubgroup(c6, [c6.element(0), c6.element(2)])  # not closed
    sub = FiniteSubgroup(c6, [c6.element(4), c6.element(0), c6.element(2)])
    assert [e.value for e in sub.elements] == [0, 2, 4]


def test_generators_must_span():
    with pytest.raises(GroupError):
        FreeAbelianGroup(2, generators=[(2, 0), (-2, 0), (0, 1), (0, -1)])
    g = FreeAbelianGroup(2, generators=[(2, 1), (-2, -1), (1, 1), (-1, -1)])
    coords = g.generator_coordinates(g.element((1, 0)))
    acc = g.identity()
    for c, gen in zip(coords, g.generators):
        acc = multiply(acc, power(gen, c))
    assert acc == g.element((1, 0))


def test_hom_z_to_c4(z, c4):
    pi = Homomorphism(z, c4, {z.element((1,)): c4.element(1), z.element((-1,)): c4.element(3)})
    assert pi.apply(z.element((7,))) == c4.element(3)
    assert pi.apply(z.identity()) == c4.identity()


def test_hom_identity(c6):
    f = identity_hom(c6)
    for g in c6.elements():
        assert f.apply(g) == g


def test_hom_rejects_non_homomorphic_images(c4):
    c2 = load_group("c2").spec
    with pytest.raises(GroupError):
        # order 4 element cannot land on an order 2 generator consistently
        Homomorphism(c4, c2, {c4.element(1): c2.element(1), c4.element(3): c2.element(1)})


def test_hom_property_random_pairs(zxc2, c4):
    c2 = load_group("c2").spec
    pi = Homomorphism(
        zxc2, c2,
        {g: c2.element(g.value[1]) for g in zxc2.generators},
    )
    rng = random.Random(7)
    for _ in range(300):
        a = zxc2.element_at(rng.randrange(500))
        b = zxc2.element_at(rng.randrange(500))
        assert pi.apply(multiply(a, b)) == multiply(pi.apply(a), pi.apply(b))


def test_hom_direct_product_cross_commuting_rejected(zxc2):
    s3 = load_group("s3").spec
    flip = s3.parse_element("102")
    cycle = s3.parse_element("120")
    images = {}
    for g in zxc2.generators:
        if g.value[1] == 1:
            images[g] = flip
        else:
            images[g] = cycle if g.value[0] == (1,) else inverse(cycle)
    with pytest.raises(GroupError):
        Homomorphism(zxc2, s3, images)


def test_subgroup_iso(c4, c6):
    a4 = FiniteSubgroup(c4, [c4.element(0), c4.element(2)])
    a6 = FiniteSubgroup(c6, [c6.element(0), c6.element(3)])
    phi = SubgroupIso(a4, a6, {c4.element(0): c6.element(0), c4.element(2): c6.element(3)})
    assert phi.forward(c4.element(2)) == c6.element(3)
    assert phi.backward(c6.element(3)) == c4.element(2)
    with pytest.raises(GroupError):
        SubgroupIso(a4, a6, {c4.element(0): c6.element(3), c4.element(2): c6.element(0)})


def test_sublattice(z):
    five = Sublattice(z, [[5]])
    assert five.index == 5
    assert five.reduce(z.element((13,))) == z.element((3,))
    assert z.element((10,)) in five
    assert z.element((11,)) not in five
    z2 = FreeAbelianGroup(2)
    lat = Sublattice(z2, [[2, 1], [0, 3]])
    assert lat.index == 6
    residues = {lat.reduce(z2.element((i, j))) for i in range(-9, 9) for j in range(-9, 9)}
    assert len(residues) == 6


def test_element_name_round_trip(zxc2, c6):
    for i in range(20):
        g = zxc2.element_at(i)
        assert zxc2.parse_element(zxc2.element_name(g)) == g
    for g in c6.elements():
        assert c6.parse_element(c6.element_name(g)) == g


def test_trivial_subgroup(z):
    t = trivial_subgroup(z)
    assert len(t) == 1 and t.is_trivial()
