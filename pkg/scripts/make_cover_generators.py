"""Regenerate the matrix-generator data files for the perfect central
extensions shipped in endotriv/data/.

Constructions (self-contained, no external tables):

1. 1080-element cover, three_a6_gf4.txt.  The hexacode H over GF(4) is the
   span of
       v1 = (1,0,0, 1, w^2, w), v2 = (0,1,0, 1, w, w^2), v3 = (0,0,1, 1,1,1)
   (rows of the systematic generator matrix; column j+3 evaluates
   a x^2 + b x + c at 1, w, w^2).  Its monomial automorphism group
   (coordinate permutations combined with nonzero scalings) has order 1080,
   is perfect with center of order 3, and acts faithfully on the
   3-dimensional space H.  That action gives 3x3 generators over GF(4).

2. 7560-element cover, three_a7_gf25.txt.  The cover embeds in SU(3,5),
   the 3x3 matrices over GF(25) preserving the hermitian form
   sum_i u_i v_i^5, as a subgroup of index 50.  A seeded random search over
   pairs of SU(3,5) elements, prefiltered by element orders, finds a
   generating pair whose closure has order 7560.

   (A 6-dimensional characteristic-2 matrix model does not exist for this
   cover: a block sum of the two 3-dimensional GF(4) actions of the
   1080-element cover never extends, because the extending involution would
   need the blocks to be isomorphic after an outer twist, and the twist
   swaps their Frobenius types.  The intertwiner spaces are spanned by
   singular maps; verified computationally before switching to SU(3,5).)

Both files are verified from scratch here: closure order, perfectness,
center of order 3, and that every noncentral conjugacy class normally
generates the whole group (so the central quotient is simple, which pins
the isomorphism type).  The catalog re-checks the cheap invariants on load.
"""
from __future__ import annotations

import itertools
import random
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from endotriv.ffla import FMatrix, field_make, gauss
from endotriv.grp import GroupTable, MatOps, serialize_group_file

F4 = field_make(2, 2)
W = F4.gen                       # w, a primitive cube root of unity
W2 = F4.mul(W, W)

HEX_BASIS = np.array(
    [
        [1, 0, 0, 1, W2, W],
        [0, 1, 0, 1, W, W2],
        [0, 0, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)


def hexacode_words() -> set[bytes]:
    words = set()
    for a in range(4):
        for b in range(4):
            for c in range(4):
                coef = np.array([[a, b, c]], dtype=np.uint8)
                w = F4.matmul(coef, HEX_BASIS)
                words.add(w.tobytes())
    assert len(words) == 64
    return words


def monomial_automorphisms() -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (perm, scaling) pairs preserving the hexacode.

    The map acts by (T v)_i = s_i * v_perm[i]; perm is an image tuple on
    coordinates 0..5 and s_i runs over nonzero field codes.
    """
    words = hexacode_words()
    units = [1, W, W2]
    scalings = [np.array(s, dtype=np.uint8) for s in itertools.product(units, repeat=6)]
    hits = []
    base = HEX_BASIS.astype(np.int64)
    for perm in itertools.permutations(range(6)):
        permuted = base[:, list(perm)]
        for s in scalings:
            img = F4.mul_vec(permuted, s[None, :].astype(np.int64))
            if all(img[k].astype(np.uint8).tobytes() in words for k in range(3)):
                hits.append((perm, tuple(int(v) for v in s)))
    return hits


def monomial_matrix(perm: tuple[int, ...], s: tuple[int, ...]) -> np.ndarray:
    m = np.zeros((6, 6), dtype=np.uint8)
    for i in range(6):
        m[i, perm[i]] = s[i]
    return m


def code_action(mono: np.ndarray) -> np.ndarray:
    """3x3 matrix of the monomial map on the hexacode basis.

    Images of basis vectors are again codewords; their coordinates in the
    systematic basis are just their first three entries.
    """
    img = F4.matmul(HEX_BASIS, mono.T)
    return img[:, :3].T.copy()


def check_cover(G: GroupTable, order: int) -> None:
    assert G.order == order, G.order
    assert G.is_perfect()
    Z = G.center()
    assert len(Z) == 3, len(Z)
    zset = set(Z)
    for cls in G.conjugacy_classes():
        if cls[0] in zset:
            continue
        assert len(G.normal_closure({cls[0]})) == G.order
    print(f"  verified: order {order}, perfect, |Z| = 3, no other normal subgroups")


def build_three_a6() -> tuple[GroupTable, list[np.ndarray]]:
    print("searching monomial automorphisms of the hexacode ...")
    autos = monomial_automorphisms()
    print(f"  found {len(autos)} monomial maps")
    assert len(autos) == 1080

    mats3 = [code_action(monomial_matrix(p, s)) for p, s in autos]
    assert len({m.tobytes() for m in mats3}) == 1080  # the action is faithful
    ops3 = MatOps(F4, 3)

    # deterministic greedy generating set (add matrices in byte order while
    # they enlarge the closure), then shrink it
    greedy: list[np.ndarray] = []
    known = {ops3.key(ops3.identity())}
    table = None
    for m in sorted(mats3, key=lambda x: x.tobytes()):
        if m.tobytes() in known:
            continue
        table = GroupTable(ops3, greedy + [m], cap=1200)
        greedy.append(m)
        known = set(table.index.keys())
        if table.order == 1080:
            break
    assert table is not None and table.order == 1080
    gens3 = [table.elements[i] for i in table.small_gens(range(1080))]
    cover6 = GroupTable(ops3, gens3, cap=1200)
    print(f"three_a6: {len(gens3)} generators after reduction")
    check_cover(cover6, 1080)
    return cover6, gens3


# --- SU(3,5) search for the 7560-element cover -------------------------------

F25 = field_make(5, 2)

# element orders occurring in the target group; order filters reject almost
# all pairs that would close up to something larger
ALLOWED_ORDERS = {1, 2, 3, 4, 5, 6, 7, 9, 12, 15, 21}


def herm(u: np.ndarray, v: np.ndarray) -> int:
    """sum_i u_i v_i^5 for code vectors."""
    tw = F25.frobenius_vec(v.astype(np.int64))
    return int(F25.sum_vec(F25.mul_vec(u.astype(np.int64), tw)))


def norm_solve(c: int) -> int:
    """s with s * s^5 = c, for c in the prime subfield."""
    l = int(F25.log[c])
    assert l % 6 == 0
    return int(F25.exp[l // 6])


def random_su35(rng: random.Random) -> np.ndarray:
    """Random element of SU(3,5) via hermitian Gram-Schmidt, columns are an
    orthonormal basis for the form sum u_i v_i^5."""
    cols = []
    while len(cols) < 3:
        # random vector in the hermitian complement of the chosen columns
        if cols:
            rows = np.array([F25.frobenius_vec(c.astype(np.int64)) for c in cols],
                            dtype=np.int64)
            ker = gauss(FMatrix(F25, rows.astype(np.uint8))).kernel.a
            v = np.zeros(3, dtype=np.int64)
            for r in ker:
                v = F25.add_vec(v, F25.mul_vec(np.int64(rng.randrange(25)),
                                               r.astype(np.int64)))
        else:
            v = np.array([rng.randrange(25) for _ in range(3)], dtype=np.int64)
        n = herm(v, v)
        if n == 0:
            continue
        s = F25.inv(norm_solve(n))
        cols.append(F25.mul_vec(np.int64(s), v).astype(np.uint8))
    g = np.stack(cols, axis=1)
    # scale the last column by det^-1, which has norm 1 for unitary g
    d = det3(g)
    g[:, 2] = F25.mul_vec(np.int64(F25.inv(d)), g[:, 2].astype(np.int64)).astype(np.uint8)
    return g


def det3(m: np.ndarray) -> int:
    f = F25
    t = 0
    for (a, b, c), sgn in ((((0, 1, 2)), 1), ((0, 2, 1), -1), ((1, 0, 2), -1),
                           ((1, 2, 0), 1), ((2, 0, 1), 1), ((2, 1, 0), -1)):
        prod = f.mul(f.mul(int(m[0, a]), int(m[1, b])), int(m[2, c]))
        t = f.add(t, prod if sgn > 0 else f.neg(prod))
    return t


def mat_order(m: np.ndarray, cap: int = 64) -> int:
    ident = np.eye(3, dtype=np.uint8)
    x = m.copy()
    for k in range(1, cap + 1):
        if np.array_equal(x, ident):
            return k
        x = F25.matmul(x, m)
    return cap + 1


def is_unitary(g: np.ndarray) -> bool:
    prod = F25.matmul(g.T.copy(), F25.frobenius_vec(g.astype(np.int64)).astype(np.uint8))
    return np.array_equal(prod, np.eye(3, dtype=np.uint8))


def build_three_a7(seed: int = 20250823) -> tuple[GroupTable, list[np.ndarray]]:
    rng = random.Random(seed)
    ops = MatOps(F25, 3)
    attempts = 0
    while True:
        attempts += 1
        a, b = random_su35(rng), random_su35(rng)
        assert is_unitary(a) and is_unitary(b) and det3(a) == 1 and det3(b) == 1
        if mat_order(a) not in ALLOWED_ORDERS or mat_order(b) not in ALLOWED_ORDERS:
            continue
        if mat_order(F25.matmul(a, b)) not in ALLOWED_ORDERS:
            continue
        if mat_order(F25.matmul(F25.matmul(a, b), b)) not in ALLOWED_ORDERS:
            continue
        try:
            G = GroupTable(ops, [a, b], cap=7700)
        except ValueError:
            continue
        if G.order == 7560:
            print(f"three_a7: generating pair found after {attempts} attempts")
            check_cover(G, 7560)
            # center must consist of the scalar cube roots of unity
            for z in G.center():
                m = G.elements[z]
                assert np.array_equal(m, np.eye(3, dtype=np.uint8) * m[0, 0])
            return G, [a, b]


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "src" / "endotriv" / "data"
    ops3 = MatOps(F4, 3)
    cover6, gens3 = build_three_a6()
    path3 = out_dir / "three_a6_gf4.txt"
    path3.write_text(
        "# 3x3 generators over GF(4), produced by scripts/make_cover_generators.py\n"
        + serialize_group_file(ops3, gens3)
    )
    print(f"  wrote {path3}")

    cover7, gens7 = build_three_a7()
    ops25 = MatOps(F25, 3)
    path7 = out_dir / "three_a7_gf25.txt"
    path7.write_text(
        "# 3x3 generators over GF(25), produced by scripts/make_cover_generators.py\n"
        + serialize_group_file(ops25, gens7)
    )
    print(f"  wrote {path7}")


if __name__ == "__main__":
    main()
