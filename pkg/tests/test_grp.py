"""Group engine tests: enumeration, subgroup machinery, classification,
file format.  Structural values are checked against closed forms and brute
oracles computed here by direct element enumeration.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from endotriv.ffla import field_make
from endotriv.grp import (GroupTable, MatOps, PermOps, parse_group_file,
                          serialize_group_file)


def perm(degree, *cycles):
    img = list(range(degree))
    for cyc in cycles:
        for i, a in enumerate(cyc):
            img[a] = cyc[(i + 1) % len(cyc)]
    return tuple(img)


def cyclic(n):
    return GroupTable(PermOps(n), [perm(n, tuple(range(n)))])


def dihedral(order):
    m = order // 2
    return GroupTable(PermOps(m), [perm(m, tuple(range(m))),
                                   tuple((-i) % m for i in range(m))])


def a4():
    return GroupTable(PermOps(4), [perm(4, (0, 1, 2)), perm(4, (1, 2, 3))])


def a5():
    return GroupTable(PermOps(5), [perm(5, (0, 1, 2)),
                                   perm(5, (0, 1, 2, 3, 4))])


def s4():
    return GroupTable(PermOps(4), [perm(4, (0, 1, 2, 3)), perm(4, (0, 1))])


def q8():
    f3 = field_make(3, 1)
    i = np.array([[0, 2], [1, 0]], dtype=f3.dtype)
    j = np.array([[1, 1], [1, 2]], dtype=f3.dtype)
    return GroupTable(MatOps(f3, 2), [i, j])


def sd16():
    rot = perm(8, tuple(range(8)))
    flip = tuple((3 * i) % 8 for i in range(8))
    return GroupTable(PermOps(8), [rot, flip])


# -- enumeration basics -------------------------------------------------------

def test_orders():
    assert cyclic(12).order == 12
    assert dihedral(8).order == 8
    assert dihedral(16).order == 16
    assert a4().order == 12
    assert a5().order == 60
    assert s4().order == 24
    assert q8().order == 8
    assert sd16().order == 16


def test_identity_and_index():
    G = a5()
    assert G.elements[0] == tuple(range(5))
    for i in range(G.order):
        assert G.idx(G.elements[i]) == i
        assert G.mul(i, G.inv(i)) == 0
        assert G.mul(0, i) == i and G.mul(i, 0) == i


def test_words_evaluate_to_elements():
    G = a5()
    for i in range(0, G.order, 7):
        acc = 0
        for gi in G.word(i):
            acc = G.mul(acc, G.gen_idx[gi])
        assert acc == i


def test_matrix_group_edge_mul_matches_raw():
    G = q8()
    ops = G.ops
    for i in range(G.order):
        for j in range(G.order):
            raw = G.index[ops.key(ops.mul(G.elements[i], G.elements[j]))]
            assert G.mul(i, j) == raw
    for i in range(G.order):
        raw = G.index[ops.key(ops.inv(G.elements[i]))]
        assert G.inv(i) == raw


def test_cap_enforced():
    with pytest.raises(ValueError):
        GroupTable(PermOps(5), [perm(5, (0, 1, 2)), perm(5, (0, 1, 2, 3, 4))],
                   cap=30)


def test_order_of_and_power():
    G = cyclic(12)
    g = G.gen_idx[0]
    assert G.order_of(g) == 12
    assert G.power(g, 12) == 0
    assert G.order_of(G.power(g, 4)) == 3
    assert G.power(g, -1) == G.inv(g)


def test_conj():
    G = s4()
    for g in range(0, G.order, 3):
        for x in range(0, G.order, 5):
            lhs = G.conj(g, x)
            rhs = G.mul(G.mul(g, x), G.inv(g))
            assert lhs == rhs


# -- subgroup machinery -------------------------------------------------------

def test_closure_is_subgroup():
    G = a5()
    sub = G.closure([G.gen_idx[0]])
    assert len(sub) == 3
    for x in sub:
        for y in sub:
            assert G.mul(x, y) in sub


def test_center():
    assert len(dihedral(8).center()) == 2
    assert len(q8().center()) == 2
    assert len(a5().center()) == 1
    assert len(cyclic(6).center()) == 6


def test_derived_subgroups():
    assert len(a4().derived_subgroup()) == 4
    assert len(s4().derived_subgroup()) == 12
    assert len(dihedral(8).derived_subgroup()) == 2
    assert a5().is_perfect()
    assert not s4().is_perfect()


def test_normal_closure():
    G = s4()
    # normal closure of a transposition is everything
    t = G.idx(perm(4, (0, 1)))
    assert len(G.normal_closure({t})) == 24
    # normal closure of a double transposition is the Klein four-group
    d = G.idx(perm(4, (0, 1), (2, 3)))
    assert len(G.normal_closure({d})) == 4


SYLOW_TABLE = [
    # builder, |G|, |P|, |N_G(P)|
    (a4, 12, 4, 12),
    (a5, 60, 4, 12),
    (s4, 24, 8, 8),
    (lambda: dihedral(8), 8, 8, 8),
    (lambda: cyclic(12), 12, 4, 12),
]


@pytest.mark.parametrize("builder,order,sp,sn", SYLOW_TABLE)
def test_sylow_and_normalizer_closed_forms(builder, order, sp, sn):
    G = builder()
    assert G.order == order
    P = G.sylow(2)
    assert len(P) == sp
    # every element order is a power of 2, and P is a subgroup
    for x in P:
        o = G.order_of(x)
        assert o & (o - 1) == 0
    assert set(G.closure(P)) == set(P)
    N = G.normalizer(P)
    assert len(N) == sn
    ps = set(P)
    for g in N:
        assert {G.conj(g, x) for x in P} == ps


def test_normalizer_brute():
    G = a5()
    P = G.sylow(2)
    ps = set(P)
    brute = [g for g in range(G.order)
             if {G.conj(g, x) for x in P} == ps]
    assert sorted(G.normalizer(P)) == brute


def test_o_pprime():
    assert len(a4().o_pprime(2)) == 1
    assert len(cyclic(6).o_pprime(2)) == 3
    assert len(cyclic(12).o_pprime(2)) == 3
    s3 = GroupTable(PermOps(3), [perm(3, (0, 1, 2)), perm(3, (0, 1))])
    assert len(s3.o_pprime(2)) == 3
    assert len(s3.o_pprime(3)) == 1


def _brute_subgroups(G):
    """All subgroups by closing small seeds; complete for tiny groups."""
    found = {frozenset({0})}
    idxs = list(range(G.order))
    for a in idxs:
        found.add(G.closure([a]))
        for b in idxs[a:]:
            found.add(G.closure([a, b]))
    return found


def test_subgroups_up_to_conj_d8():
    G = dihedral(8)
    P = list(range(G.order))
    reps = G.subgroups_up_to_conj(P)
    # D8 has 10 subgroups in 8 conjugacy classes
    brute = _brute_subgroups(G)
    assert len(brute) == 10
    classes = set()
    for s in brute:
        orbit = {frozenset(G.conj(g, x) for x in s) for g in range(G.order)}
        classes.add(min(tuple(sorted(o)) for o in orbit))
    assert len(classes) == 8
    assert sorted(reps) == sorted(classes)
    # ordering is by size then tuple
    sizes = [len(r) for r in reps]
    assert sizes == sorted(sizes)


def test_subgroups_up_to_conj_klein():
    G = a4()
    P = G.sylow(2)
    reps = G.subgroups_up_to_conj(P)
    assert [len(r) for r in reps] == [1, 2, 2, 2, 4]


def test_classify_2group():
    assert cyclic(1).classify_2group(cyclic(1).sylow(2)) == "trivial"
    c2 = cyclic(2)
    assert c2.classify_2group(c2.sylow(2)) == "cyclic"
    c8 = cyclic(8)
    assert c8.classify_2group(c8.sylow(2)) == "cyclic"
    k = GroupTable(PermOps(4), [perm(4, (0, 1)), perm(4, (2, 3))])
    assert k.classify_2group(list(range(4))) == "klein_four"
    d8 = dihedral(8)
    assert d8.classify_2group(list(range(8))) == "dihedral"
    d16 = dihedral(16)
    assert d16.classify_2group(list(range(16))) == "dihedral"
    q = q8()
    assert q.classify_2group(list(range(8))) == "quaternion"
    sd = sd16()
    assert sd.classify_2group(list(range(16))) == "semidihedral"
    c42 = GroupTable(PermOps(6), [perm(6, (0, 1, 2, 3)), perm(6, (4, 5))])
    assert c42.classify_2group(list(range(8))) == "other"


def test_abelianization_pprime():
    ab = a4().abelianization_pprime(2)
    assert ab.orders == (3,)
    assert ab.exponent == 3
    ab2 = s4().abelianization_pprime(2)
    assert ab2.orders == ()
    c15 = cyclic(15)
    assert c15.abelianization_pprime(2).orders == (15,)
    assert c15.abelianization_pprime(3).orders == (5,)
    assert c15.abelianization_pprime(5).orders == (3,)
    c12 = cyclic(12)
    ab3 = c12.abelianization_pprime(2)
    assert ab3.orders == (3,)
    # projection is a homomorphism onto the quotient coordinates
    for i in range(12):
        for j in range(12):
            k = c12.mul(i, j)
            assert tuple((ab3.proj[i] + ab3.proj[j]) % 3) == tuple(ab3.proj[k])


def test_conjugacy_classes_partition():
    G = s4()
    classes = G.conjugacy_classes()
    sizes = sorted(len(c) for c in classes)
    assert sizes == [1, 3, 6, 6, 8]
    seen = sorted(x for c in classes for x in c)
    assert seen == list(range(24))


# -- group files --------------------------------------------------------------

def test_perm_file_roundtrip():
    G = dihedral(8)
    text = serialize_group_file(G.ops, G.gens)
    ops, gens = parse_group_file(text)
    H = GroupTable(ops, gens)
    assert H.order == 8
    assert H.classify_2group(list(range(8))) == "dihedral"


def test_mat_file_roundtrip():
    G = q8()
    text = serialize_group_file(G.ops, G.gens)
    ops, gens = parse_group_file(text)
    H = GroupTable(ops, gens)
    assert H.order == 8
    assert H.classify_2group(list(range(8))) == "quaternion"


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_group_file("")
    with pytest.raises(ValueError):
        parse_group_file("perm")
    with pytest.raises(ValueError):
        parse_group_file("mat 2 2\n")
    with pytest.raises(ValueError):
        parse_group_file("frob 3\n(0 1)")


@given(st.integers(2, 5), st.data())
@settings(max_examples=25, deadline=None)
def test_random_perm_groups_lagrange(degree, data):
    n_gens = data.draw(st.integers(1, 2))
    gens = []
    for _ in range(n_gens):
        img = data.draw(st.permutations(list(range(degree))))
        gens.append(tuple(img))
    G = GroupTable(PermOps(degree), gens, cap=200)
    for i in range(G.order):
        assert G.order % G.order_of(i) == 0
    sub = G.closure([data.draw(st.integers(0, G.order - 1))])
    assert G.order % len(sub) == 0
