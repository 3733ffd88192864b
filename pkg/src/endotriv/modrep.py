"""Modules for a finite group over GF(p^e): linear characters, induction
from a subgroup, restriction, tensor and dual, fixed points and Brauer
quotients.

A module is stored as one matrix per group generator (column-vector action,
so R(g) R(h) = R(gh)); matrices for arbitrary elements are evaluated through
the enumeration's parent chain and memoized.  Induction of a linear character
lambda from N to G uses a right transversal G = union of N t_i, with all
coset and double-coset combinatorics cached per (G, N) pair in an
InducedContext so that every lambda reuses them.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

import numpy as np

from .ffla import FieldTable, FMatrix, gauss, kron, solve_right
from .grp import AbelianPPrime, GroupTable

__all__ = [
    "LinearCharacter",
    "character_group",
    "ModuleRep",
    "InducedContext",
    "one_dim_module",
    "subgroup_table",
    "fixed_point_rows",
    "brauer_quotient",
    "BrauerQuotient",
    "jordan_profile",
]


class LinearCharacter:
    """p'-linear character of a group table, given by exponents against the
    invariant factors of its p'-abelianization.

    Values are field codes; the field must contain the needed roots of unity.
    """

    def __init__(self, ntable: GroupTable, ab: AbelianPPrime, field: FieldTable,
                 exps: Sequence[int]):
        assert len(exps) == len(ab.orders)
        self.ntable = ntable
        self.ab = ab
        self.field = field
        self.exps = tuple(int(a) % d for a, d in zip(exps, ab.orders))
        roots = [field.root_of_unity(d) for d in ab.orders]
        vals = np.ones(ntable.order, dtype=np.int64)
        for j, (r, a) in enumerate(zip(roots, self.exps)):
            if a == 0:
                continue
            # value contribution zeta_d^(a * coordinate); exponentiate via logs
            lstep = int(field.log[field.pow(r, a)])
            col = ab.proj[:, j].astype(np.int64)
            contrib = field.exp[(lstep * col) % (field.q - 1)]
            vals = field.mul_vec(vals, contrib.astype(np.int64)).astype(np.int64)
        self.vals = vals

    @property
    def order(self) -> int:
        o = 1
        for a, d in zip(self.exps, self.ab.orders):
            o = lcm(o, d // gcd(d, a))
        return o

    def value(self, i: int) -> int:
        return int(self.vals[i])

    def is_trivial(self) -> bool:
        return all(a == 0 for a in self.exps)

    def __repr__(self) -> str:
        return f"LinearCharacter{self.exps}"


def character_group(ntable: GroupTable, ab: AbelianPPrime,
                    field: FieldTable) -> list[LinearCharacter]:
    """All p'-linear characters, ordered by exponent tuple."""
    out = []
    tuples = [()]
    for d in ab.orders:
        tuples = [t + (a,) for t in tuples for a in range(d)]
    for t in sorted(tuples):
        out.append(LinearCharacter(ntable, ab, field, t))
    return out


class ModuleRep:
    """Matrix representation attached to a group table (one matrix per
    generator, memoized evaluation elsewhere)."""

    def __init__(self, table: GroupTable, field: FieldTable,
                 gen_mats: Sequence[FMatrix]):
        assert len(gen_mats) == len(table.gens)
        self.table = table
        self.field = field
        self.gen_mats = list(gen_mats)
        self.dim = gen_mats[0].a.shape[0] if gen_mats else 1
        self._memo: dict[int, FMatrix] = {0: FMatrix.identity(field, self.dim)}

    def at(self, i: int) -> FMatrix:
        """Matrix of element i, multiplying down the enumeration parent chain."""
        memo = self._memo
        stack = []
        j = i
        while j not in memo:
            stack.append(j)
            j = self.table._parent[j]
        for j in reversed(stack):
            memo[j] = memo[self.table._parent[j]] @ self.gen_mats[self.table._genidx[j]]
        return memo[i]

    def restrict(self, sub: GroupTable) -> "ModuleRep":
        """Restriction to a subgroup re-enumerated on its own generators.

        The subgroup table must hold raw elements of the same ops object.
        """
        mats = [self.at(self.table.idx(g)) for g in sub.gens]
        return ModuleRep(sub, self.field, mats)

    def tensor(self, other: "ModuleRep") -> "ModuleRep":
        assert self.table is other.table
        mats = [kron(a, b) for a, b in zip(self.gen_mats, other.gen_mats)]
        return ModuleRep(self.table, self.field, mats)

    def dual(self) -> "ModuleRep":
        mats = [m.inverse().T for m in self.gen_mats]
        return ModuleRep(self.table, self.field, mats)


def one_dim_module(ntable: GroupTable, lam: LinearCharacter) -> ModuleRep:
    mats = [FMatrix(lam.field, np.array([[lam.value(gi)]]))
            for gi in ntable.gen_idx]
    return ModuleRep(ntable, lam.field, mats)


def subgroup_table(G: GroupTable, indices: Iterable[int]) -> GroupTable:
    """Group table of a subgroup on its own small generating set."""
    idx = list(indices)
    gens = [G.elements[i] for i in G.small_gens(idx)]
    if not gens:
        gens = [G.elements[0]]
    return GroupTable(G.ops, gens, cap=len(idx) + 1)


class InducedContext:
    """Coset and double-coset data for inducing characters from N up to G.

    Right transversal t_0 = 1, t_1, ... chosen as lowest element indices;
    arrays over G: coset_of, npart (x = npart * t_coset), dc_of, nnprod (a
    product n1*n2 from some factorization x = n1 * rep * n2).  Per double
    coset, diffs holds the N-table indices whose lambda-values must all be 1
    for the coset to carry a Hecke basis element.
    """

    def __init__(self, G: GroupTable, n_indices: Sequence[int]):
        self.G = G
        self.n_indices = sorted(n_indices)
        self.ntable = subgroup_table(G, self.n_indices)
        assert self.ntable.order == len(self.n_indices)
        # map G-index -> N-table index
        self.g2n = np.full(G.order, -1, dtype=np.int64)
        for i in self.n_indices:
            self.g2n[i] = self.ntable.index[G.ops.key(G.elements[i])]

        # right transversal and coset decomposition
        self.coset_of = np.full(G.order, -1, dtype=np.int64)
        self.npart = np.full(G.order, -1, dtype=np.int64)
        self.transversal: list[int] = []
        for x in range(G.order):
            if self.coset_of[x] >= 0:
                continue
            c = len(self.transversal)
            self.transversal.append(x)
            for n in self.n_indices:
                y = G.mul(n, x)
                self.coset_of[y] = c
                self.npart[y] = n
        self.dim = len(self.transversal)

        # double cosets with difference sets for Hecke goodness
        self.dc_of = np.full(G.order, -1, dtype=np.int64)
        self.nnprod = np.full(G.order, -1, dtype=np.int64)
        self.dc_reps: list[int] = []
        self.dc_diffs: list[set[int]] = []
        for x in range(G.order):
            if self.dc_of[x] >= 0:
                continue
            d = len(self.dc_reps)
            self.dc_reps.append(x)
            diffs: set[int] = set()
            for n1 in self.n_indices:
                lead = G.mul(n1, x)
                for n2 in self.n_indices:
                    y = G.mul(lead, n2)
                    pr = G.mul(n1, n2)
                    if self.dc_of[y] < 0:
                        self.dc_of[y] = d
                        self.nnprod[y] = pr
                    else:
                        diffs.add(G.mul(G.inv(int(self.nnprod[y])), pr))
            self.dc_diffs.append({int(self.g2n[t]) for t in diffs})
        self._pairprod: Optional[np.ndarray] = None

    # dc reps are minimal in their double coset, hence transversal elements
    def dc_rep_coset(self, d: int) -> int:
        return int(self.coset_of[self.dc_reps[d]])

    @property
    def pairprod(self) -> np.ndarray:
        """index of t_i * t_j^-1, dim x dim."""
        if self._pairprod is None:
            t = self.transversal
            tinv = [self.G.inv(j) for j in t]
            arr = np.empty((self.dim, self.dim), dtype=np.int64)
            for i, ti in enumerate(t):
                for j in range(self.dim):
                    arr[i, j] = self.G.mul(ti, tinv[j])
            self._pairprod = arr
        return self._pairprod

    def lambda_on_g(self, lam: LinearCharacter) -> np.ndarray:
        """Array over G of lambda(npart-product) used by Hecke evaluation."""
        vals = np.zeros(self.G.order, dtype=np.int64)
        mask = self.nnprod >= 0
        vals[mask] = lam.vals[self.g2n[self.nnprod[mask]]]
        return vals

    def good_dcs(self, lam: LinearCharacter) -> list[int]:
        """Double cosets carrying a Hecke basis element for lambda."""
        out = []
        for d, diffs in enumerate(self.dc_diffs):
            if all(lam.value(t) == 1 for t in diffs):
                out.append(d)
        return out

    def induce(self, lam: LinearCharacter) -> ModuleRep:
        """Module of lambda induced up to G; dim = [G:N], permutation-like
        matrices with lambda-values as entries."""
        assert lam.ntable is self.ntable
        f = lam.field
        mats = []
        for gidx in self.G.gen_idx:
            m = np.zeros((self.dim, self.dim), dtype=f.dtype)
            for i, ti in enumerate(self.transversal):
                y = self.G.mul(ti, gidx)
                j = int(self.coset_of[y])
                m[i, j] = lam.value(int(self.g2n[self.npart[y]]))
            mats.append(FMatrix(f, m))
        return ModuleRep(self.G, f, mats)


def fixed_point_rows(rep: ModuleRep, gen_indices: Optional[Sequence[int]] = None
                     ) -> FMatrix:
    """Row basis of the common fixed space of the listed elements (default:
    the table's generators)."""
    idxs = list(gen_indices) if gen_indices is not None else list(rep.table.gen_idx)
    f = rep.field
    if not idxs:
        return FMatrix.identity(f, rep.dim)
    blocks = []
    for i in idxs:
        m = rep.at(i)
        blocks.append(f.sub_vec(m.a.astype(np.int64), np.eye(rep.dim, dtype=np.int64)))
    stacked = FMatrix(f, np.vstack(blocks))
    return gauss(stacked).kernel


@dataclass
class BrauerQuotient:
    """Fixed rows, relative-trace image rows, and the quotient dimension."""
    rep: ModuleRep
    subgroup: tuple[int, ...]
    fixed: FMatrix
    image: FMatrix
    dim: int

    def action_scalar(self, g: int) -> int:
        """Scalar action of element g (must normalize the subgroup) on a
        1-dimensional quotient."""
        assert self.dim == 1
        f = self.rep.field
        img = self.image.a
        # pick a fixed row outside the image span
        base = None
        for r in range(self.fixed.a.shape[0]):
            cand = np.vstack([img, self.fixed.a[r:r + 1]])
            if FMatrix(f, cand).rank() == img.shape[0] + 1:
                base = self.fixed.a[r]
                break
        assert base is not None
        w = self.rep.at(g) @ FMatrix(f, base[:, None].copy())
        basis = FMatrix(f, np.vstack([img, base[None, :]])).T
        sol = solve_right(basis, w)
        assert sol is not None
        return int(sol.a[-1, 0])


def _all_subgroups_small(table: GroupTable, indices: Sequence[int]) -> list[frozenset[int]]:
    """All subgroups of a small subgroup, by closure of subsets (order <= 16)."""
    idx = sorted(indices)
    assert len(idx) <= 16
    found = {frozenset([0])}
    frontier = [frozenset([0])]
    while frontier:
        nxt = []
        for s in frontier:
            # extend by one generator at a time
            for x in idx:
                if x in s:
                    continue
                t = frozenset(table.closure(set(s) | {x}))
                if t not in found:
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), tuple(sorted(s))))


def _maximal_subgroups(table: GroupTable, indices: Sequence[int], p: int
                       ) -> list[frozenset[int]]:
    """Maximal subgroups (index p) of a p-subgroup given by ambient indices."""
    n = len(list(indices))
    subs = _all_subgroups_small(table, indices)
    return [s for s in subs if len(s) * p == n]


def brauer_quotient(rep: ModuleRep, sub_indices: Sequence[int], p: int
                    ) -> BrauerQuotient:
    """Brauer construction at a p-subgroup of rep.table: fixed points modulo
    the sum of relative traces from maximal subgroups."""
    table = rep.table
    f = rep.field
    sub = sorted(sub_indices)
    fixed = fixed_point_rows(rep, table.small_gens(sub))
    if len(sub) == 1:
        return BrauerQuotient(rep, tuple(sub), fixed,
                              FMatrix(f, np.zeros((0, rep.dim), dtype=f.dtype)),
                              fixed.a.shape[0])
    image_rows = []
    for mx in _maximal_subgroups(table, sub, p):
        fr = fixed_point_rows(rep, table.small_gens(mx))
        if fr.a.shape[0] == 0:
            continue
        # transversal of sub over mx
        reps, seen = [], set()
        for x in sub:
            if x in seen:
                continue
            reps.append(x)
            seen.update(table.mul(m, x) for m in mx)
        acc = np.zeros((rep.dim, rep.dim), dtype=np.int64)
        for q in reps:
            acc = f.add_vec(acc, rep.at(q).a.astype(np.int64)).astype(np.int64)
        # rows fr.a are fixed vectors v of mx; traces are (sum_q rep(q)) v
        tr = f.matmul(fr.a, np.ascontiguousarray(acc.T).astype(f.dtype))
        image_rows.append(tr)
    if image_rows:
        reduced = gauss(FMatrix(f, np.vstack(image_rows)))
        image = FMatrix(f, np.ascontiguousarray(reduced.rref.a[: reduced.rank]))
    else:
        image = FMatrix(f, np.zeros((0, rep.dim), dtype=f.dtype))
    dim = fixed.a.shape[0] - image.a.shape[0]
    return BrauerQuotient(rep, tuple(sub), fixed, image, dim)


def jordan_profile(rep: ModuleRep, i: int) -> dict[int, int]:
    """Jordan block sizes of element i (order a power of char): {size: count}."""
    f = rep.field
    m = rep.at(i)
    a = FMatrix(f, f.sub_vec(m.a.astype(np.int64), np.eye(rep.dim, dtype=np.int64)))
    ranks = [rep.dim]
    power = a
    while ranks[-1] > 0:
        ranks.append(power.rank())
        power = power @ a
    # ranks[j] = rank((m - 1)^j), ending in 0; block counts by second difference
    out = {}
    for j in range(1, len(ranks)):
        nxt = ranks[j + 1] if j + 1 < len(ranks) else 0
        cnt = ranks[j - 1] - 2 * ranks[j] + nxt
        if cnt > 0:
            out[j] = cnt
    return out
