"""Module representation tests: linear characters, induction contexts,
Brauer quotients.  The Brauer quotient of a permutation module is checked
against the subgroup fixed-point count, an independent combinatorial value.
"""
import random

import numpy as np
import pytest

from endotriv.ffla import FMatrix, field_make, gauss
from endotriv.grp import GroupTable, PermOps
from endotriv.modrep import (InducedContext, ModuleRep, brauer_quotient,
                             character_group, fixed_point_rows, jordan_profile,
                             one_dim_module, subgroup_table)


def perm(degree, *cycles):
    img = list(range(degree))
    for cyc in cycles:
        for i, a in enumerate(cyc):
            img[a] = cyc[(i + 1) % len(cyc)]
    return tuple(img)


def a5():
    return GroupTable(PermOps(5), [perm(5, (0, 1, 2)),
                                   perm(5, (0, 1, 2, 3, 4))])


def perm_module(G, f):
    """Natural permutation module on the points, row-vector convention."""
    deg = G.ops.degree
    mats = []
    for g in G.gens:
        m = np.zeros((deg, deg), dtype=f.dtype)
        for j in range(deg):
            m[g[j], j] = 1
        mats.append(FMatrix(f, m))
    return ModuleRep(G, f, mats)


@pytest.fixture(scope="module")
def a5ctx():
    G = a5()
    P = G.sylow(2)
    N = G.normalizer(P)
    return G, P, InducedContext(G, N)


# -- characters ---------------------------------------------------------------

def test_character_group_structure(a5ctx):
    G, P, ctx = a5ctx
    f = field_make(2, 2)
    ab = ctx.ntable.abelianization_pprime(2)
    chars = character_group(ctx.ntable, ab, f)
    assert len(chars) == 3
    assert [c.order for c in chars] == [1, 3, 3]
    assert chars[0].is_trivial
    # values are cube roots of unity and multiply like the exponents
    nt = ctx.ntable
    for c in chars:
        for i in range(nt.order):
            v = c.value(i)
            assert f.pow(v, 3) == 1
    for c1 in chars:
        for c2 in chars:
            prod = [(a + b) % d for a, b, d
                    in zip(c1.exps, c2.exps, ab.orders)]
            c3 = next(c for c in chars if list(c.exps) == prod)
            for i in range(nt.order):
                assert f.mul(c1.value(i), c2.value(i)) == c3.value(i)


def test_character_is_homomorphism(a5ctx):
    G, P, ctx = a5ctx
    f = field_make(2, 2)
    ab = ctx.ntable.abelianization_pprime(2)
    chars = character_group(ctx.ntable, ab, f)
    nt = ctx.ntable
    for c in chars:
        for i in range(0, nt.order, 2):
            for j in range(0, nt.order, 3):
                assert c.value(nt.mul(i, j)) == f.mul(c.value(i), c.value(j))


def test_one_dim_module(a5ctx):
    G, P, ctx = a5ctx
    f = field_make(2, 2)
    ab = ctx.ntable.abelianization_pprime(2)
    chars = character_group(ctx.ntable, ab, f)
    lam = chars[1]
    rep = one_dim_module(ctx.ntable, lam)
    assert rep.dim == 1
    for k, gi in enumerate(ctx.ntable.gen_idx):
        assert rep.gen_mats[k].a[0, 0] == lam.value(gi)


# -- representations ----------------------------------------------------------

def test_rep_is_homomorphism():
    G = a5()
    f = field_make(2, 1)
    rep = perm_module(G, f)
    rng = random.Random(0)
    for _ in range(30):
        i, j = rng.randrange(G.order), rng.randrange(G.order)
        assert (rep.at(i) @ rep.at(j)).a.tolist() == rep.at(G.mul(i, j)).a.tolist()


def test_restrict_tensor_dual():
    G = a5()
    f = field_make(2, 1)
    rep = perm_module(G, f)
    P = G.sylow(2)
    pt = subgroup_table(G, P)
    rest = rep.restrict(pt)
    for j in range(pt.order):
        amb = G.idx(pt.elements[j])
        assert rest.at(j).a.tolist() == rep.at(amb).a.tolist()
    tens = rep.tensor(rep)
    assert tens.dim == 25
    du = rep.dual()
    for k in range(len(G.gens)):
        assert (du.gen_mats[k].T @ rep.gen_mats[k]).is_identity()


def test_fixed_point_rows():
    G = a5()
    f = field_make(2, 1)
    rep = perm_module(G, f)
    P = G.sylow(2)
    rows = fixed_point_rows(rep, G.small_gens(P))
    # brute: stack rep(g) - I over generators of P and take the kernel
    blocks = []
    for g in G.small_gens(P):
        m = rep.at(g).a.astype(np.int64)
        blocks.append(f.sub_vec(m, np.eye(5, dtype=np.int64)).T)
    stacked = FMatrix(f, np.vstack(blocks).astype(f.dtype))
    want_dim = gauss(stacked).kernel.a.shape[0]
    assert rows.a.shape[0] == want_dim
    for g in G.small_gens(P):
        assert (FMatrix(f, rows.a) @ rep.at(g)).a.tolist() == rows.a.tolist()
    # no generators fixes everything
    assert fixed_point_rows(rep, []).a.shape[0] == 5


# -- Brauer quotients ---------------------------------------------------------

def _fixed_points(G, Q):
    deg = G.ops.degree
    out = 0
    for x in range(deg):
        if all(G.elements[g][x] == x for g in Q):
            out += 1
    return out


def test_brauer_quotient_permutation_oracle():
    G = a5()
    f = field_make(2, 1)
    rep = perm_module(G, f)
    P = G.sylow(2)
    for cls in G.subgroups_up_to_conj(P):
        if len(cls) == 1:
            continue
        bq = brauer_quotient(rep, list(cls), 2)
        assert bq.dim == _fixed_points(G, cls)


def test_brauer_quotient_random_corpus():
    rng = random.Random(42)
    checked = 0
    while checked < 25:
        deg = rng.randrange(4, 8)
        gens = []
        for _ in range(rng.randrange(1, 3)):
            img = list(range(deg))
            rng.shuffle(img)
            gens.append(tuple(img))
        try:
            G = GroupTable(PermOps(deg), gens, cap=400)
        except ValueError:
            continue
        if G.order % 2:
            continue
        x = rng.randrange(G.order)
        o = G.order_of(x)
        odd = o
        while odd % 2 == 0:
            odd //= 2
        u = G.power(x, odd)
        if u == 0:
            continue
        Q = sorted(G.closure([u]))
        f = field_make(2, 1)
        rep = perm_module(G, f)
        bq = brauer_quotient(rep, Q, 2)
        assert bq.dim == _fixed_points(G, Q)
        # involutions: Jordan blocks of size 1 count the same thing
        if G.order_of(u) == 2:
            prof = jordan_profile(rep, u)
            assert prof.get(1, 0) == bq.dim
        checked += 1


def test_brauer_action_scalar_trivial():
    G = a5()
    f = field_make(2, 2)
    one = ModuleRep(G, f, [FMatrix.identity(f, 1) for _ in G.gens])
    P = G.sylow(2)
    bq = brauer_quotient(one, P, 2)
    assert bq.dim == 1
    for g in range(0, G.order, 11):
        N = G.normalizer(P)
        if g in N:
            assert bq.action_scalar(g) == 1


# -- induction ----------------------------------------------------------------

def test_induced_context_basics(a5ctx):
    G, P, ctx = a5ctx
    assert ctx.dim == 5
    assert ctx.transversal[0] == 0
    # transversal hits every coset exactly once
    seen = {ctx.coset_of[t] for t in ctx.transversal}
    assert len(seen) == 5
    # pairprod entries: t_i * t_j^-1
    for i in range(5):
        for j in range(5):
            want = G.mul(ctx.transversal[i], G.inv(ctx.transversal[j]))
            assert ctx.pairprod[i, j] == want


def test_induced_module_is_homomorphism(a5ctx):
    G, P, ctx = a5ctx
    f = field_make(2, 2)
    ab = ctx.ntable.abelianization_pprime(2)
    chars = character_group(ctx.ntable, ab, f)
    for lam in chars:
        ind = ctx.induce(lam)
        assert ind.dim == 5
        rng = random.Random(3)
        for _ in range(12):
            i, j = rng.randrange(G.order), rng.randrange(G.order)
            assert (ind.at(i) @ ind.at(j)).a.tolist() == \
                ind.at(G.mul(i, j)).a.tolist()
        # restriction to N acts on the identity-coset line by lambda
        for n in ctx.n_indices:
            col = ind.at(n).a[:, 0]
            assert col[0] == lam.value(ctx.ntable.idx(G.elements[n]))


def test_good_double_cosets(a5ctx):
    G, P, ctx = a5ctx
    f = field_make(2, 2)
    ab = ctx.ntable.abelianization_pprime(2)
    chars = character_group(ctx.ntable, ab, f)
    n_dcs = len(ctx.dc_reps)
    # trivial character: every double coset is good
    assert ctx.good_dcs(chars[0]) == list(range(n_dcs))
    assert 0 in ctx.good_dcs(chars[1])
    # independent count: g is good iff the character agrees with its
    # g-conjugate on the intersection N cap gNg^-1
    nset = set(ctx.n_indices)
    nt = ctx.ntable
    for lam in chars:
        good = []
        for d, g in enumerate(ctx.dc_reps):
            gi = G.inv(g)
            ok = True
            for x in ctx.n_indices:
                y = G.mul(G.mul(gi, x), g)
                if y in nset:
                    if lam.value(nt.idx(G.elements[x])) != \
                            lam.value(nt.idx(G.elements[y])):
                        ok = False
                        break
            if ok:
                good.append(d)
        assert ctx.good_dcs(lam) == good
