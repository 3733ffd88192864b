"""Endomorphism-algebra decomposition engine.

Splits an induced module lambda^G into indecomposable summands by computing
its Hecke endomorphism algebra on double cosets, finding the radical of that
algebra, extracting a complete set of orthogonal primitive idempotents, and
realizing their images.  Also provides irreducibility testing and chopping
into composition factors for the summands themselves.

All randomized steps draw from an explicitly passed random.Random, so a run
is reproducible from its seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional, Sequence

import numpy as np

from .ffla import FieldTable, FMatrix, gauss, solve_right
from .modrep import InducedContext, LinearCharacter, ModuleRep

__all__ = [
    "HeckeEnd",
    "Summand",
    "split_summands",
    "algebra_radical",
    "charpoly",
    "factor_poly",
    "is_irreducible",
    "chop",
    "composition_factor_dims",
    "module_iso",
    "NeedSplittingField",
]


class NeedSplittingField(RuntimeError):
    """Raised when idempotent extraction cannot certify a corner as local
    over the working field; retry over an extension."""


# ---------------------------------------------------------------------------
# dense polynomials over a FieldTable: int64 arrays of codes, ascending
# degree, no trailing zeros (zero polynomial is length 0)

def pstrip(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    if len(nz) == 0:
        return a[:0]
    return a[: nz[-1] + 1]


def pdeg(a: np.ndarray) -> int:
    return len(a) - 1


def padd(f: FieldTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.int64)
    out[: len(a)] = a
    out[: len(b)] = f.add_vec(out[: len(b)], b)
    return pstrip(out)


def pneg(f: FieldTable, a: np.ndarray) -> np.ndarray:
    return f.neg_vec(a).astype(np.int64)


def psub(f: FieldTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return padd(f, a, pneg(f, b))


def pscale(f: FieldTable, c: int, a: np.ndarray) -> np.ndarray:
    if c == 0:
        return a[:0]
    return f.mul_vec(np.int64(c), a).astype(np.int64)


def pmul(f: FieldTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return a[:0]
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, c in enumerate(a):
        if c:
            out[i: i + len(b)] = f.add_vec(out[i: i + len(b)],
                                           pscale(f, int(c), b))
    return pstrip(out)


def pdivmod(f: FieldTable, a: np.ndarray, b: np.ndarray
            ) -> tuple[np.ndarray, np.ndarray]:
    assert len(b) > 0
    a = a.copy()
    binv = f.inv(int(b[-1]))
    q = np.zeros(max(len(a) - len(b) + 1, 0), dtype=np.int64)
    while len(a) >= len(b):
        c = f.mul(int(a[-1]), binv)
        k = len(a) - len(b)
        q[k] = c
        a[k: k + len(b)] = f.sub_vec(a[k:], pscale(f, c, b))
        a = pstrip(a[:-1])
    return pstrip(q), a


def pmod(f: FieldTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return pdivmod(f, a, b)[1]


def pmonic(f: FieldTable, a: np.ndarray) -> np.ndarray:
    assert len(a) > 0
    return pscale(f, f.inv(int(a[-1])), a)


def pgcd(f: FieldTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    while len(b) > 0:
        a, b = b, pmod(f, a, b)
    return pmonic(f, a) if len(a) else a


def pxgcd(f: FieldTable, a: np.ndarray, b: np.ndarray
          ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(g, u, v) with u a + v b = g, g monic gcd."""
    one = np.array([1], dtype=np.int64)
    zero = one[:0]
    r0, r1 = a, b
    u0, u1 = one, zero
    v0, v1 = zero, one
    while len(r1) > 0:
        q, r = pdivmod(f, r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, psub(f, u0, pmul(f, q, u1))
        v0, v1 = v1, psub(f, v0, pmul(f, q, v1))
    if len(r0) == 0:
        return r0, u0, v0
    c = f.inv(int(r0[-1]))
    return pscale(f, c, r0), pscale(f, c, u0), pscale(f, c, v0)


def _int_times(f: FieldTable, k: int) -> int:
    """the field element k * 1."""
    v = 0
    for _ in range(k % f.p):
        v = f.add(v, 1)
    return v


def pderiv(f: FieldTable, a: np.ndarray) -> np.ndarray:
    if len(a) <= 1:
        return a[:0]
    out = np.zeros(len(a) - 1, dtype=np.int64)
    for i in range(1, len(a)):
        out[i - 1] = f.mul(int(a[i]), _int_times(f, i))
    return pstrip(out)


def ppow_mod(f: FieldTable, a: np.ndarray, n: int, m: np.ndarray) -> np.ndarray:
    out = np.array([1], dtype=np.int64)
    a = pmod(f, a, m)
    while n:
        if n & 1:
            out = pmod(f, pmul(f, out, a), m)
        a = pmod(f, pmul(f, a, a), m)
        n >>= 1
    return out


def pth_root_poly(f: FieldTable, a: np.ndarray) -> np.ndarray:
    """For a = h(t^p), return h with p-th roots taken on coefficients."""
    assert (len(a) - 1) % f.p == 0
    coeffs = a[:: f.p].astype(np.int64)
    # p-th root on F_q is Frobenius applied e-1 times
    for _ in range(f.e - 1):
        coeffs = f.frobenius_vec(coeffs).astype(np.int64)
    return pstrip(coeffs)


def squarefree_parts(f: FieldTable, a: np.ndarray) -> list[tuple[np.ndarray, int]]:
    """[(g, m)] with a = prod g^m up to a constant, g squarefree, pairwise
    coprime; standard characteristic-p refinement."""
    a = pmonic(f, a)
    if pdeg(a) == 0:
        return []
    d = pderiv(f, a)
    if len(d) == 0:
        return [(g, f.p * m) for g, m in squarefree_parts(f, pth_root_poly(f, a))]
    out: list[tuple[np.ndarray, int]] = []
    c = pgcd(f, a, d)
    w = pdivmod(f, a, c)[0]
    i = 1
    while pdeg(w) > 0:
        y = pgcd(f, w, c)
        z = pdivmod(f, w, y)[0]
        if pdeg(z) > 0:
            out.append((pmonic(f, z), i))
        w = y
        c = pdivmod(f, c, y)[0]
        i += 1
    if pdeg(c) > 0:
        # leftover: factors with multiplicity divisible by p; c has zero
        # derivative, so the recursion scales those multiplicities itself
        out.extend(squarefree_parts(f, c))
    return out


def _ddf(f: FieldTable, a: np.ndarray) -> list[tuple[np.ndarray, int]]:
    """Distinct-degree split of a squarefree monic poly: [(product, d)]."""
    out = []
    t = np.array([0, 1], dtype=np.int64)
    h = t.copy()
    d = 0
    while pdeg(a) > 0:
        d += 1
        if 2 * d > pdeg(a):
            out.append((a, pdeg(a)))
            break
        h = ppow_mod(f, h, f.q, a)
        g = pgcd(f, psub(f, h, t), a)
        if pdeg(g) > 0:
            out.append((g, d))
            a = pdivmod(f, a, g)[0]
            h = pmod(f, h, a)
    return out


def _edf(f: FieldTable, a: np.ndarray, d: int, rng: random.Random
         ) -> list[np.ndarray]:
    """Equal-degree split (all irreducible factors have degree d)."""
    if pdeg(a) == d:
        return [pmonic(f, a)]
    while True:
        r = np.array([rng.randrange(f.q) for _ in range(pdeg(a))], dtype=np.int64)
        r = pstrip(r)
        if pdeg(r) < 1:
            continue
        if f.p == 2:
            # trace map over GF(2): r + r^2 + r^4 + ... splits the roots
            acc = pmod(f, r, a)
            s = acc.copy()
            for _ in range(f.e * d - 1):
                acc = pmod(f, pmul(f, acc, acc), a)
                s = padd(f, s, acc)
            g = pgcd(f, s, a)
        else:
            b = ppow_mod(f, r, (f.q ** d - 1) // 2, a)
            g = pgcd(f, psub(f, b, np.array([1], dtype=np.int64)), a)
        if 0 < pdeg(g) < pdeg(a):
            left = _edf(f, g, d, rng)
            right = _edf(f, pdivmod(f, a, g)[0], d, rng)
            return left + right


def factor_poly(f: FieldTable, a: np.ndarray, rng: random.Random
                ) -> list[tuple[np.ndarray, int]]:
    """Monic irreducible factors with multiplicities, deterministically
    ordered by (degree, coefficient tuple)."""
    found: dict[tuple[int, ...], int] = {}
    for g, mult in squarefree_parts(f, a):
        for prod, d in _ddf(f, g):
            for irr in _edf(f, prod, d, rng):
                key = tuple(int(v) for v in irr)
                found[key] = found.get(key, 0) + mult
    items = [(np.array(k, dtype=np.int64), m) for k, m in found.items()]
    items.sort(key=lambda t: (len(t[0]), tuple(int(v) for v in t[0])))
    return items


# ---------------------------------------------------------------------------
# characteristic polynomial and selected coefficients

def charpoly(f: FieldTable, M: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial (ascending coefficients, length n+1)
    via Hessenberg reduction."""
    n = M.shape[0]
    H = M.astype(np.int64).copy()
    for j in range(n - 2):
        piv = None
        for i in range(j + 1, n):
            if H[i, j]:
                piv = i
                break
        if piv is None:
            continue
        if piv != j + 1:
            H[[j + 1, piv], :] = H[[piv, j + 1], :]
            H[:, [j + 1, piv]] = H[:, [piv, j + 1]]
        inv = f.inv(int(H[j + 1, j]))
        for i in range(j + 2, n):
            if H[i, j]:
                c = f.mul(int(H[i, j]), inv)
                H[i, :] = f.sub_vec(H[i, :], f.mul_vec(np.int64(c), H[j + 1, :]))
                H[:, j + 1] = f.add_vec(H[:, j + 1], f.mul_vec(np.int64(c), H[:, i]))
    # p_k(t) = (t - H[k-1,k-1]) p_{k-1} - sum_i H[i-1,k-1] (prod subdiag) p_{i-1}
    polys = [np.array([1], dtype=np.int64)]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        term = np.zeros(k + 1, dtype=np.int64)
        term[1:] = prev
        c0 = int(H[k - 1, k - 1])
        if c0:
            term[: len(prev)] = f.sub_vec(term[: len(prev)],
                                          f.mul_vec(np.int64(c0), prev))
        run = 1
        for i in range(k - 1, 0, -1):
            run = f.mul(run, int(H[i, i - 1]))
            if run == 0:
                break
            c = f.mul(int(H[i - 1, k - 1]), run)
            if c:
                pi = polys[i - 1]
                term[: len(pi)] = f.sub_vec(term[: len(pi)], pscale(f, c, pi))
        polys.append(term)
    return polys[n]


def _det_small(f: FieldTable, M: np.ndarray) -> int:
    m = M.astype(np.int64).copy()
    n = m.shape[0]
    det = 1
    for j in range(n):
        piv = None
        for i in range(j, n):
            if m[i, j]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != j:
            m[[j, piv]] = m[[piv, j]]
            det = f.neg(det)
        det = f.mul(det, int(m[j, j]))
        inv = f.inv(int(m[j, j]))
        for i in range(j + 1, n):
            if m[i, j]:
                c = f.mul(int(m[i, j]), inv)
                m[i, j:] = f.sub_vec(m[i, j:], f.mul_vec(np.int64(c), m[j, j:]))
    return det


def elem_symmetric_coeff(f: FieldTable, M: np.ndarray, k: int) -> int:
    """e_k of the eigenvalues: the sum of principal k x k minors."""
    n = M.shape[0]
    if k > n:
        return 0
    if k == 1:
        return int(f.sum_vec(np.diag(M).astype(np.int64)))
    if k == 2:
        d = np.diag(M).astype(np.int64)
        # sum_{i<j} d_i d_j via prefix sums (no division by 2)
        acc, pref, cross = 0, 0, 0
        for i in range(n):
            acc = f.add(acc, f.mul(int(d[i]), pref))
            pref = f.add(pref, int(d[i]))
        up = f.mul_vec(M.astype(np.int64), M.T.astype(np.int64))
        iu = np.triu_indices(n, 1)
        cross = int(f.sum_vec(up[iu])) if len(iu[0]) else 0
        return f.sub(acc, cross)
    if comb(n, k) * k ** 3 <= 60000:
        tot = 0
        for sel in combinations(range(n), k):
            ix = np.ix_(sel, sel)
            tot = f.add(tot, _det_small(f, M[ix]))
        return tot
    cp = charpoly(f, M)
    c = int(cp[M.shape[0] - k])
    # charpoly coefficient is (-1)^k e_k
    return c if (k % 2 == 0 or f.p == 2) else f.neg(c)


# ---------------------------------------------------------------------------
# radical of an associative unital algebra given by left-regular matrices

def algebra_radical(f: FieldTable, reg: Sequence[np.ndarray]) -> FMatrix:
    """Row basis (coordinates) of the Jacobson radical.

    reg[k] is the left-multiplication matrix of basis element k acting on
    coordinate columns; the chain tests vanishing of characteristic
    polynomial coefficients at t^(n - p^i), which cuts out the radical over
    a perfect field.  Level i conditions are p^i-semilinear, so each level
    solves a linear system in Frobenius-twisted unknowns.
    """
    d = len(reg)
    stack = np.stack([r.astype(np.int64) for r in reg])
    cur = FMatrix(f, np.eye(d, dtype=np.int64)).a.astype(np.int64)

    def reg_of(row: np.ndarray) -> np.ndarray:
        acc = np.zeros((d, d), dtype=np.int64)
        for k in np.nonzero(row)[0]:
            acc = f.add_vec(acc, f.mul_vec(np.int64(int(row[k])), stack[k])).astype(np.int64)
        return acc

    i = 0
    while f.p ** i <= d and cur.shape[0] > 0:
        m = cur.shape[0]
        mats = [reg_of(cur[k]) for k in range(m)]
        k_coeff = f.p ** i
        gamma = np.zeros((m, m), dtype=np.int64)
        for a in range(m):
            for b in range(m):
                prod = f.matmul(mats[a].astype(f.dtype), mats[b].astype(f.dtype))
                gamma[a, b] = elem_symmetric_coeff(f, prod, k_coeff)
        eta = gauss(FMatrix(f, gamma.T)).kernel.a.astype(np.int64)
        if eta.shape[0] == 0:
            cur = cur[:0]
            break
        shift = (-i) % f.e
        xi = f.pow_vec(eta, f.p ** shift).astype(np.int64)
        new = f.matmul(xi.astype(f.dtype), cur.astype(f.dtype))
        red = gauss(FMatrix(f, new))
        cur = red.rref.a[: red.rank].astype(np.int64)
        i += 1
    return FMatrix(f, cur)


# ---------------------------------------------------------------------------
# Hecke endomorphism algebra of an induced character

class HeckeEnd:
    """End_kG(lambda^G) on its double-coset basis.

    Basis elements F_a live on the lambda-good (N,N) double cosets; the
    realization sends F_a to the dim x dim matrix F_a(t_i t_j^-1), which
    commutes with the induced action.  Structure constants come from
    convolution over N-cosets.
    """

    def __init__(self, ctx: InducedContext, lam: LinearCharacter):
        self.ctx = ctx
        self.lam = lam
        self.f = lam.field
        f = self.f
        self.good = ctx.good_dcs(lam)
        self.dim_alg = len(self.good)
        lamg = ctx.lambda_on_g(lam)
        trans = np.array(ctx.transversal, dtype=np.int64)
        pair = ctx.pairprod
        self.fvals = np.zeros((self.dim_alg, ctx.G.order), dtype=np.int64)
        for pos, a in enumerate(self.good):
            mask = ctx.dc_of == a
            self.fvals[pos, mask] = lamg[mask]
        # realized matrices
        self.realized = [FMatrix(f, self.fvals[pos][pair])
                         for pos in range(self.dim_alg)]
        # structure constants c[d][a, b] with F_a F_b = sum_d c F_d,
        # via c = sum over cosets t_j of F_a(rep_d t_j^-1) F_b(t_j)
        m_f = np.stack([self.fvals[pos][trans] for pos in range(self.dim_alg)])
        self.structure = np.zeros((self.dim_alg,) * 3, dtype=np.int64)
        for dpos, dcid in enumerate(self.good):
            row = pair[ctx.dc_rep_coset(dcid)]
            va = np.stack([self.fvals[pos][row] for pos in range(self.dim_alg)])
            self.structure[dpos] = f.matmul(va.astype(f.dtype),
                                            np.ascontiguousarray(m_f.T).astype(f.dtype)
                                            ).astype(np.int64)
        # identity coordinates: the double coset of 1 is N itself, id 0
        assert self.good[0] == 0
        self.unit = np.zeros(self.dim_alg, dtype=np.int64)
        self.unit[0] = 1
        # left regular representation
        self.reg = [np.ascontiguousarray(self.structure[:, a, :])
                    for a in range(self.dim_alg)]

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        f = self.f
        acc = np.zeros(self.dim_alg, dtype=np.int64)
        for a in np.nonzero(x)[0]:
            contrib = f.matmul(self.reg[a].astype(f.dtype),
                               y.astype(f.dtype)[:, None])[:, 0]
            acc = f.add_vec(acc, f.mul_vec(np.int64(int(x[a])), contrib.astype(np.int64))).astype(np.int64)
        return acc

    def realize(self, x: np.ndarray) -> FMatrix:
        f = self.f
        acc = np.zeros((self.ctx.dim, self.ctx.dim), dtype=np.int64)
        for a in np.nonzero(x)[0]:
            acc = f.add_vec(acc, f.mul_vec(np.int64(int(x[a])),
                                           self.realized[a].a.astype(np.int64))).astype(np.int64)
        return FMatrix(f, acc)

    # -- idempotent machinery -------------------------------------------------

    def _corner_basis(self, e: np.ndarray) -> np.ndarray:
        rows = np.stack([self.mul(self.mul(e, unitvec(self.dim_alg, k)), e)
                         for k in range(self.dim_alg)])
        red = gauss(FMatrix(self.f, rows))
        return red.rref.a[: red.rank].astype(np.int64)

    def _corner_regular(self, basis: np.ndarray) -> list[np.ndarray]:
        f = self.f
        m = basis.shape[0]
        prods = np.stack([self.mul(basis[i], basis[j])
                          for i in range(m) for j in range(m)])
        sol = solve_right(FMatrix(f, basis).T, FMatrix(f, prods).T)
        assert sol is not None, "corner not closed under multiplication"
        coords = sol.a.astype(np.int64)  # m x (m*m), column i*m+j = b_i b_j
        return [np.ascontiguousarray(coords[:, i * m:(i + 1) * m])
                for i in range(m)]

    def _corner_minpoly(self, e: np.ndarray, x: np.ndarray) -> np.ndarray:
        f = self.f
        rows = [e]
        power = x.copy()
        while True:
            prev = FMatrix(f, np.stack(rows)).T
            target = FMatrix(f, power[None, :]).T
            sol = solve_right(prev, target)
            if sol is not None:
                coeffs = f.neg_vec(sol.a[:, 0].astype(np.int64)).astype(np.int64)
                out = np.zeros(len(rows) + 1, dtype=np.int64)
                out[: len(rows)] = coeffs
                out[len(rows)] = 1
                return out
            rows.append(power.copy())
            power = self.mul(power, x)

    def _poly_at(self, poly: np.ndarray, x: np.ndarray, e: np.ndarray
                 ) -> np.ndarray:
        """Evaluate poly at x inside the corner with unit e (Horner)."""
        f = self.f
        acc = np.zeros(self.dim_alg, dtype=np.int64)
        for c in poly[::-1]:
            acc = self.mul(acc, x)
            if c:
                acc = f.add_vec(acc, f.mul_vec(np.int64(int(c)), e)).astype(np.int64)
        return acc

    def _split_corner(self, e: np.ndarray, rng: random.Random, tries: int = 40
                      ) -> list[np.ndarray]:
        f = self.f
        basis = self._corner_basis(e)
        m = basis.shape[0]
        if m == 1:
            return [e]
        reg = self._corner_regular(basis)
        rad = algebra_radical(f, reg)
        sdim = m - rad.a.shape[0]
        if sdim == 1:
            return [e]
        for _ in range(tries):
            coeffs = np.array([rng.randrange(f.q) for _ in range(m)], dtype=np.int64)
            x = f.matmul(coeffs[None, :].astype(f.dtype),
                         basis.astype(f.dtype))[0].astype(np.int64)
            mp = self._corner_minpoly(e, x)
            fac = factor_poly(f, mp, rng)
            if len(fac) >= 2:
                g0, m0 = fac[0]
                part = g0
                for _ in range(m0 - 1):
                    part = pmul(f, part, g0)
                rest = pdivmod(f, mp, part)[0]
                g, u, v = pxgcd(f, rest, part)
                assert pdeg(g) == 0 and int(g[0]) == 1
                # idempotent: (u * rest) = 1 mod part, 0 mod rest
                eps_poly = pmod(f, pmul(f, u, rest), mp)
                eps = self._poly_at(eps_poly, x, e)
                assert np.array_equal(self.mul(eps, eps), eps)
                other = f.sub_vec(e, eps).astype(np.int64)
                assert np.array_equal(self.mul(eps, other),
                                      np.zeros(self.dim_alg, dtype=np.int64))
                return (self._split_corner(eps, rng, tries)
                        + self._split_corner(other, rng, tries))
            g0, _ = fac[0]
            if pdeg(g0) == sdim:
                # residue field is generated by the image of x: local corner
                return [e]
        raise NeedSplittingField(
            f"could not split or certify corner of dim {m} over GF({f.q})")

    def primitive_idempotents(self, rng: random.Random) -> list[np.ndarray]:
        prims = self._split_corner(self.unit, rng)
        # consistency: orthogonal decomposition of the identity
        total = np.zeros(self.dim_alg, dtype=np.int64)
        for e in prims:
            total = self.f.add_vec(total, e).astype(np.int64)
        assert np.array_equal(total, self.unit)
        return prims


def unitvec(n: int, k: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.int64)
    v[k] = 1
    return v


# ---------------------------------------------------------------------------
# summand realization

@dataclass
class Summand:
    """Indecomposable direct summand of an induced module."""
    rep: ModuleRep
    dim: int
    idem: np.ndarray
    basis_cols: FMatrix          # dim(V) x dim embedding of the summand


def split_summands(ctx: InducedContext, lam: LinearCharacter,
                   induced: ModuleRep, rng: random.Random) -> list[Summand]:
    """Decompose lambda^G into indecomposables via its Hecke algebra."""
    f = lam.field
    hecke = HeckeEnd(ctx, lam)
    prims = hecke.primitive_idempotents(rng)
    out = []
    total = 0
    for e in prims:
        E = hecke.realize(e)
        red = gauss(E)
        cols = np.ascontiguousarray(E.a[:, red.pivots])
        C = FMatrix(f, cols)
        mats = []
        for g in induced.gen_mats:
            sol = solve_right(C, g @ C)
            assert sol is not None, "summand basis not invariant"
            mats.append(sol)
        rep = ModuleRep(induced.table, f, mats)
        out.append(Summand(rep, red.rank, e, C))
        total += red.rank
    assert total == induced.dim
    order = sorted(range(len(out)), key=lambda i: (out[i].dim,
                                                   out[i].idem.tobytes()))
    return [out[i] for i in order]


# ---------------------------------------------------------------------------
# spinning, irreducibility (randomized), composition factors

class RowSpan:
    """Row space with incremental reduction."""

    def __init__(self, f: FieldTable, ncols: int):
        self.f = f
        self.ncols = ncols
        self.rows: list[np.ndarray] = []
        self.piv: dict[int, int] = {}

    def reduce(self, v: np.ndarray) -> np.ndarray:
        f = self.f
        v = v.astype(np.int64).copy()
        for c, r in self.piv.items():
            if v[c]:
                v = f.sub_vec(v, f.mul_vec(np.int64(int(v[c])), self.rows[r])).astype(np.int64)
        return v

    def add(self, v: np.ndarray) -> bool:
        v = self.reduce(v)
        nz = np.nonzero(v)[0]
        if len(nz) == 0:
            return False
        c = int(nz[0])
        v = self.f.mul_vec(np.int64(self.f.inv(int(v[c]))), v).astype(np.int64)
        self.piv[c] = len(self.rows)
        self.rows.append(v)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)

    def matrix(self) -> FMatrix:
        if not self.rows:
            return FMatrix(self.f, np.zeros((0, self.ncols), dtype=np.int64))
        return FMatrix(self.f, np.stack(self.rows))


def spin(f: FieldTable, mats: Sequence[FMatrix], seeds: np.ndarray) -> RowSpan:
    """Smallest invariant subspace (column action) containing the seed rows."""
    n = mats[0].a.shape[0] if mats else seeds.shape[1]
    span = RowSpan(f, n)
    frontier = []
    for s in np.atleast_2d(seeds):
        if span.add(s):
            frontier.append(span.rows[-1])
    tns = [np.ascontiguousarray(m.a.T) for m in mats]
    while frontier:
        nxt = []
        for v in frontier:
            for mt in tns:
                w = f.matmul(v[None, :].astype(f.dtype), mt.astype(f.dtype))[0]
                if span.add(w):
                    nxt.append(span.rows[-1])
        frontier = nxt
    return span


def _random_algebra_elem(f: FieldTable, mats: Sequence[FMatrix],
                         rng: random.Random) -> FMatrix:
    n = mats[0].a.shape[0]
    acc = FMatrix(f, np.zeros((n, n), dtype=np.int64))
    for _ in range(3):
        m = FMatrix.identity(f, n)
        for _ in range(rng.randrange(1, 4)):
            m = m @ mats[rng.randrange(len(mats))]
        c = rng.randrange(1, f.q)
        acc = acc + m.scale(c)
    return acc


def _krylov_minpoly(f: FieldTable, z: FMatrix, v: np.ndarray,
                    ) -> np.ndarray:
    """Minimal polynomial of z on the cyclic subspace generated by v."""
    rows = [v.astype(np.int64)]
    cur = rows[0]
    while True:
        cur = f.matmul(z.a.astype(f.dtype), cur.astype(f.dtype)[:, None]
                       )[:, 0].astype(np.int64)
        prev = FMatrix(f, np.stack(rows)).T
        sol = solve_right(prev, FMatrix(f, cur[None, :]).T)
        if sol is not None:
            coeffs = f.neg_vec(sol.a[:, 0].astype(np.int64)).astype(np.int64)
            out = np.zeros(len(rows) + 1, dtype=np.int64)
            out[: len(rows)] = coeffs
            out[len(rows)] = 1
            return out
        rows.append(cur)


def _mat_poly(f: FieldTable, poly: np.ndarray, z: FMatrix) -> FMatrix:
    n = z.a.shape[0]
    acc = FMatrix(f, np.zeros((n, n), dtype=np.int64))
    ident = FMatrix.identity(f, n)
    for c in poly[::-1]:
        acc = acc @ z
        if c:
            acc = acc + ident.scale(int(c))
    return acc


def _projective_combos(f: FieldTable, rows: np.ndarray):
    """All nonzero combinations of the rows, one per scalar line."""
    from itertools import product as iproduct
    d = rows.shape[0]
    for lead in range(d):
        for tail in iproduct(range(f.q), repeat=d - lead - 1):
            coeffs = np.zeros(d, dtype=np.int64)
            coeffs[lead] = 1
            coeffs[lead + 1:] = tail
            yield f.matmul(coeffs[None, :].astype(f.dtype),
                           rows.astype(f.dtype))[0].astype(np.int64)


def is_irreducible(f: FieldTable, mats: Sequence[FMatrix], rng: random.Random
                   ) -> tuple[bool, Optional[FMatrix]]:
    """Norton-style test with exhaustive null-space spinning.

    Returns (True, None), or (False, row basis of a proper nonzero invariant
    subspace).  For a singular algebra element w, any proper submodule meets
    null(w) or its annihilator meets the left null space, so spinning every
    scalar line on both sides decides irreducibility outright.
    """
    n = mats[0].a.shape[0]
    if n == 1:
        return True, None
    q = f.q
    for _ in range(80):
        z = _random_algebra_elem(f, mats, rng)
        if z.is_zero():
            continue
        v = np.array([rng.randrange(q) for _ in range(n)], dtype=np.int64)
        if not v.any():
            continue
        mp = _krylov_minpoly(f, z, v)
        fac = factor_poly(f, mp, rng)
        if len(fac) == 1 and fac[0][1] == 1 and pdeg(fac[0][0]) == n:
            # the algebra contains a field of degree n, so the module is a
            # one-dimensional space over it: irreducible
            return True, None
        g0 = fac[0][0]
        w = _mat_poly(f, g0, z)
        d = n - w.rank()
        if d == 0 or d == n:
            continue
        if (q ** d - 1) // (q - 1) > 420:
            continue
        null = gauss(w).kernel
        for u in _projective_combos(f, null.a):
            span = spin(f, mats, u)
            if span.dim < n:
                return False, span.matrix()
        nullt = gauss(w.T).kernel
        tmats = [FMatrix(f, np.ascontiguousarray(m.a.T)) for m in mats]
        for u in _projective_combos(f, nullt.a):
            spant = spin(f, tmats, u)
            if spant.dim < n:
                # annihilator of the dual-side submodule is invariant
                ann = gauss(spant.matrix()).kernel
                assert 0 < ann.a.shape[0] < n
                return False, ann
        return True, None
    raise RuntimeError("no usable singular element found")


def chop(f: FieldTable, mats: Sequence[FMatrix], rng: random.Random
         ) -> list[list[FMatrix]]:
    """Composition factors (as generator-matrix lists), recursively."""
    n = mats[0].a.shape[0]
    if n == 0:
        return []
    ok, wit = is_irreducible(f, mats, rng)
    if ok:
        return [list(mats)]
    red = gauss(wit)
    w = red.rref.a[: red.rank].astype(np.int64)
    r = w.shape[0]
    piv = [int(c) for c in red.pivots]
    rest = [c for c in range(n) if c not in piv]
    basis = np.zeros((n, n), dtype=np.int64)
    basis[:, :r] = w.T
    for k, c in enumerate(rest):
        basis[c, r + k] = 1
    P = FMatrix(f, basis)
    Pinv = P.inverse()
    subs, quots = [], []
    for m in mats:
        mm = (Pinv @ m @ P).a
        assert not mm[r:, :r].any(), "invariant subspace not respected"
        subs.append(FMatrix(f, np.ascontiguousarray(mm[:r, :r])))
        quots.append(FMatrix(f, np.ascontiguousarray(mm[r:, r:])))
    return chop(f, subs, rng) + chop(f, quots, rng)


def composition_factor_dims(f: FieldTable, mats: Sequence[FMatrix],
                            rng: random.Random) -> list[int]:
    return sorted(m[0].a.shape[0] for m in chop(f, mats, rng))


def module_iso(f: FieldTable, amats: Sequence[FMatrix],
               bmats: Sequence[FMatrix], rng: random.Random
               ) -> Optional[FMatrix]:
    """Invertible T with T A_g = B_g T for all generators, or None."""
    n = amats[0].a.shape[0]
    if bmats[0].a.shape[0] != n:
        return None
    blocks = []
    for A, B in zip(amats, bmats):
        blk = np.zeros((n * n, n * n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                # equation (T A - B T)[i, j] = 0 in the unknowns T[a, b]
                row = np.zeros((n, n), dtype=np.int64)
                row[i, :] = A.a[:, j].astype(np.int64)
                col = np.zeros((n, n), dtype=np.int64)
                col[:, j] = B.a[i, :].astype(np.int64)
                blk[i * n + j] = f.sub_vec(row.reshape(-1), col.reshape(-1))
        blocks.append(blk)
    ker = gauss(FMatrix(f, np.vstack(blocks))).kernel.a
    if ker.shape[0] == 0:
        return None
    for row in ker:
        T = FMatrix(f, row.reshape(n, n))
        if T.rank() == n:
            return T
    for _ in range(30):
        coeffs = np.array([rng.randrange(f.q) for _ in range(ker.shape[0])],
                          dtype=np.int64)
        comb_row = f.matmul(coeffs[None, :].astype(f.dtype),
                            ker.astype(f.dtype))[0]
        T = FMatrix(f, comb_row.reshape(n, n))
        if T.rank() == n:
            return T
    return None
