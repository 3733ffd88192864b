"""Exact dense linear algebra over small finite fields GF(p^e) with p^e <= 2^16.

Field elements are stored as integer codes: the code of sum(d_i * x^i) is
sum(d_i * p^i) with digits 0 <= d_i < p, so code arithmetic never carries
between digits.  Multiplication runs through discrete log/exp tables over a
fixed primitive polynomial; matrix products are digit-sliced into float64
BLAS calls, which is exact as long as dim * (p-1)^2 * e < 2^53.  For GF(2)
matrices the rows are bit-packed into Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import gf2

__all__ = [
    "FieldTable",
    "FMatrix",
    "GaussResult",
    "field_make",
    "gauss",
    "kron",
]

MAX_Q = 1 << 16

# Anchor table of primitive polynomials, coefficients (c_0, ..., c_{e-1}) of
# the monic polynomial x^e + c_{e-1} x^{e-1} + ... + c_0.  Every entry is
# verified at construction time (the exp table must enumerate all q-1 units);
# sizes not listed fall back to a deterministic lexicographic search.
_PRIMITIVE_POLYS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1,),
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 0, 0, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0),
    (3, 1): (1,),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (5, 1): (3,),
    (5, 2): (2, 4),
    (7, 1): (4,),
    (7, 2): (3, 6),
    (11, 1): (9,),
    (13, 1): (11,),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _code_to_digits(code: int, p: int, e: int) -> list[int]:
    out = []
    for _ in range(e):
        out.append(code % p)
        code //= p
    return out


def _digits_to_code(digits: list[int], p: int) -> int:
    code = 0
    for d in reversed(digits):
        code = code * p + d
    return code


class FieldTable:
    """Arithmetic tables for GF(p^e).

    Attributes:
        p, e, q: characteristic, extension degree, order q = p**e.
        poly: coefficient tuple of the primitive polynomial used.
        gen: code of the fixed primitive element (x for e >= 2).
        exp, log: numpy tables with exp[k] = gen^k and log[exp[k]] = k.
    """

    def __init__(self, p: int, e: int, poly: Optional[tuple[int, ...]] = None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        q = p**e
        if q > MAX_Q:
            raise ValueError(f"field size {q} exceeds {MAX_Q}")
        self.p = p
        self.e = e
        self.q = q
        self.dtype = np.uint8 if q <= 256 else np.uint16
        if poly is None:
            poly = _PRIMITIVE_POLYS.get((p, e))
        if poly is not None:
            built = self._try_tables(poly)
            if built is None:
                raise ValueError(f"polynomial {poly} is not primitive for GF({p}^{e})")
        else:
            built = None
            for poly in self._candidate_polys():
                built = self._try_tables(poly)
                if built is not None:
                    break
            if built is None:
                raise ValueError(f"no primitive polynomial found for GF({p}^{e})")
        self.poly = tuple(poly)
        exp_list, log_list = built
        self.exp = np.array(exp_list, dtype=np.int64)
        self.log = np.array(log_list, dtype=np.int64)
        self.gen = int(self.exp[1]) if q > 2 else 1
        self._red = self._reduction_table()
        self._embed_cache: dict[tuple[int, int], np.ndarray] = {}

    # -- construction helpers -------------------------------------------------

    def _candidate_polys(self):
        # lexicographic by integer value of the coefficient code
        for val in range(self.q):
            yield tuple(_code_to_digits(val, self.p, self.e))

    def _mulx(self, code: int, poly: tuple[int, ...]) -> int:
        p, e = self.p, self.e
        shifted = code * p
        top, low = divmod(shifted, p**e)
        if top == 0:
            return low
        ld = _code_to_digits(low, p, e)
        for i, c in enumerate(poly):
            ld[i] = (ld[i] - top * c) % p
        return _digits_to_code(ld, p)

    def _try_tables(self, poly: tuple[int, ...]):
        q = self.q
        exp_list = [1]
        c = 1
        for _ in range(q - 2):
            c = self._mulx(c, poly)
            if c == 1 or c == 0:
                return None
            exp_list.append(c)
        if self._mulx(c, poly) != 1:
            return None
        if len(set(exp_list)) != q - 1:
            return None
        log_list = [-1] * q
        for k, v in enumerate(exp_list):
            log_list[v] = k
        return exp_list, log_list

    def _reduction_table(self) -> np.ndarray:
        # red[m, k]: coefficient of x^k in (x^m mod poly), for m < 2e-1
        p, e = self.p, self.e
        red = np.zeros((2 * e - 1, e), dtype=np.int64)
        for m in range(2 * e - 1):
            if m < e:
                red[m, m] = 1
            else:
                # x^m = x * x^(m-1)
                prev = red[m - 1]
                cur = np.zeros(e + 1, dtype=np.int64)
                cur[1:] = prev
                top = cur[e] % p
                cur = cur[:e].copy()
                if top:
                    for i, c in enumerate(self.poly):
                        cur[i] = (cur[i] - top * c) % p
                red[m] = cur % p
        return red

    # -- scalar ops -----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        da = _code_to_digits(a, self.p, self.e)
        db = _code_to_digits(b, self.p, self.e)
        return _digits_to_code([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        da = _code_to_digits(a, self.p, self.e)
        return _digits_to_code([(-x) % self.p for x in da], self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(-self.log[a]) % (self.q - 1)])

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n == 0:
                return 1
            if n < 0:
                raise ZeroDivisionError("inverse of zero")
            return 0
        return int(self.exp[(self.log[a] * n) % (self.q - 1)])

    def root_of_unity(self, m: int) -> int:
        """Canonical primitive m-th root of unity gen^((q-1)/m); m must divide q-1."""
        if m < 1 or (self.q - 1) % m != 0:
            raise ValueError(f"no primitive {m}-th root of unity in GF({self.p}^{self.e})")
        z = int(self.exp[((self.q - 1) // m) % (self.q - 1)])
        assert self.pow(z, m) == 1
        return z

    # -- vectorized ops on code arrays ---------------------------------------

    def add_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return (a ^ b).astype(self.dtype)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pk = 1
        for _ in range(self.e):
            da = (a // pk) % self.p
            db = (b // pk) % self.p
            out += ((da + db) % self.p) * pk
            pk *= self.p
        return out.astype(self.dtype)

    def neg_vec(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.astype(self.dtype)
        out = np.zeros(a.shape, dtype=np.int64)
        pk = 1
        for _ in range(self.e):
            da = (a // pk) % self.p
            out += ((-da) % self.p) * pk
            pk *= self.p
        return out.astype(self.dtype)

    def sub_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.add_vec(a, self.neg_vec(b))

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        zero = (a == 0) | (b == 0)
        la = self.log[np.where(a == 0, 1, a)]
        lb = self.log[np.where(b == 0, 1, b)]
        prod = self.exp[(la + lb) % (self.q - 1)]
        return np.where(zero, 0, prod).astype(self.dtype)

    def inv_vec(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(-self.log[a]) % (self.q - 1)].astype(self.dtype)

    def pow_vec(self, a: np.ndarray, n: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        zero = a == 0
        la = self.log[np.where(zero, 1, a)]
        out = self.exp[(la * n) % (self.q - 1)]
        return np.where(zero, 0, out).astype(self.dtype)

    def frobenius_vec(self, a: np.ndarray) -> np.ndarray:
        return self.pow_vec(a, self.p)

    def sum_vec(self, a: np.ndarray, axis=None) -> np.ndarray:
        """Field sum along an axis of a code array."""
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis).astype(self.dtype)
        out = 0
        pk = 1
        for _ in range(self.e):
            da = (a // pk) % self.p
            out = out + (da.sum(axis=axis) % self.p) * pk
            pk *= self.p
        return np.asarray(out, dtype=self.dtype)

    # -- matrix product -------------------------------------------------------

    def _digits_f64(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        out = np.empty((self.e,) + a.shape, dtype=np.float64)
        pk = 1
        for i in range(self.e):
            out[i] = (a // pk) % self.p
            pk *= self.p
        return out

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape[1] != b.shape[0]:
            raise ValueError("matmul shape mismatch")
        if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=self.dtype)
        if self.q == 2:
            ar = gf2.pack_rows(a)
            br = gf2.pack_rows(b)
            return gf2.unpack_rows(gf2.mul_packed(ar, br), b.shape[1]).astype(self.dtype)
        p, e = self.p, self.e
        da = self._digits_f64(a)
        db = self._digits_f64(b)
        parts = np.zeros((2 * e - 1, a.shape[0], b.shape[1]), dtype=np.float64)
        for i in range(e):
            for j in range(e):
                parts[i + j] += da[i] @ db[j]
        parts %= p
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        pk = 1
        for k in range(e):
            ck = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
            for m in range(2 * e - 1):
                r = int(self._red[m, k])
                if r:
                    ck += r * parts[m].astype(np.int64)
            out += (ck % p) * pk
            pk *= p
        return out.astype(self.dtype)

    # -- subfield embedding ---------------------------------------------------

    def embed_from(self, sub: "FieldTable") -> np.ndarray:
        """Code-translation table realizing a field embedding sub -> self.

        Requires same characteristic and sub.e dividing self.e.  The choice is
        deterministic: the first multiplicative embedding (by power of the
        canonical generator) that is additive on all of sub.
        """
        key = (sub.p, sub.e)
        if key in self._embed_cache:
            return self._embed_cache[key]
        if sub.p != self.p or self.e % sub.e != 0:
            raise ValueError("no subfield embedding")
        if sub.q == 2:
            table = np.array([0, 1], dtype=np.int64)
            self._embed_cache[key] = table
            return table
        step = (self.q - 1) // (sub.q - 1)
        for c in range(1, sub.q - 1):
            if np.gcd(c, sub.q - 1) != 1:
                continue
            table = np.zeros(sub.q, dtype=np.int64)
            for k in range(sub.q - 1):
                table[sub.exp[k]] = self.exp[(k * c * step) % (self.q - 1)]
            ok = True
            for x in range(sub.q):
                if not ok:
                    break
                for y in range(sub.q):
                    if table[sub.add(x, y)] != self.add(int(table[x]), int(table[y])):
                        ok = False
                        break
            if ok:
                self._embed_cache[key] = table
                return table
        raise ValueError("no additive embedding found")

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldTable)
            and self.p == other.p
            and self.e == other.e
            and self.poly == other.poly
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.poly))


_FIELD_CACHE: dict[tuple[int, int], FieldTable] = {}


def field_make(p: int, e: int) -> FieldTable:
    """Return the canonical FieldTable for GF(p^e) (cached)."""
    key = (p, e)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FieldTable(p, e)
    return _FIELD_CACHE[key]


class FMatrix:
    """Dense matrix over a FieldTable; entries are field codes in a numpy array."""

    __slots__ = ("field", "a")

    def __init__(self, field: FieldTable, a: np.ndarray):
        arr = np.ascontiguousarray(np.asarray(a, dtype=field.dtype))
        if arr.ndim != 2:
            raise ValueError("FMatrix needs a 2-d array")
        if arr.size and int(arr.max()) >= field.q:
            raise ValueError("entry code out of field range")
        self.field = field
        self.a = arr

    @classmethod
    def zeros(cls, field: FieldTable, r: int, c: int) -> "FMatrix":
        return cls(field, np.zeros((r, c), dtype=field.dtype))

    @classmethod
    def identity(cls, field: FieldTable, n: int) -> "FMatrix":
        return cls(field, np.eye(n, dtype=field.dtype))

    @classmethod
    def random(cls, field: FieldTable, r: int, c: int, rng) -> "FMatrix":
        return cls(field, np.array([[rng.randrange(field.q) for _ in range(c)] for _ in range(r)]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> "FMatrix":
        return FMatrix(self.field, self.a.T.copy())

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        if self.field is not other.field and self.field != other.field:
            raise ValueError("field mismatch")
        return FMatrix(self.field, self.field.matmul(self.a, other.a))

    def __add__(self, other: "FMatrix") -> "FMatrix":
        return FMatrix(self.field, self.field.add_vec(self.a, other.a))

    def __sub__(self, other: "FMatrix") -> "FMatrix":
        return FMatrix(self.field, self.field.sub_vec(self.a, other.a))

    def __neg__(self) -> "FMatrix":
        return FMatrix(self.field, self.field.neg_vec(self.a))

    def scale(self, c: int) -> "FMatrix":
        return FMatrix(self.field, self.field.mul_vec(self.a, np.int64(c)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FMatrix)
            and self.field == other.field
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self) -> int:
        return hash((self.a.shape, self.a.tobytes()))

    def to_bytes(self) -> bytes:
        return self.a.tobytes()

    def is_identity(self) -> bool:
        r, c = self.a.shape
        return r == c and bool(np.array_equal(self.a, np.eye(r, dtype=self.field.dtype)))

    def is_zero(self) -> bool:
        return not np.any(self.a)

    def is_scalar(self) -> Optional[int]:
        """Return c if the matrix equals c*I, else None."""
        r, c = self.a.shape
        if r != c or r == 0:
            return None
        d = int(self.a[0, 0])
        if np.array_equal(self.a, d * np.eye(r, dtype=np.int64)):
            return d
        return None

    def rank(self) -> int:
        return gauss(self).rank

    def inverse(self) -> "FMatrix":
        n, m = self.shape
        if n != m:
            raise ValueError("inverse of non-square matrix")
        aug = FMatrix(self.field, np.hstack([self.a, np.eye(n, dtype=self.field.dtype)]))
        res = gauss(aug)
        if res.rank < n:
            raise ZeroDivisionError("matrix is singular")
        return FMatrix(self.field, res.rref.a[:, n:])

    def power(self, n: int) -> "FMatrix":
        if self.shape[0] != self.shape[1]:
            raise ValueError("power of non-square matrix")
        if n < 0:
            return self.inverse().power(-n)
        out = FMatrix.identity(self.field, self.shape[0])
        base = self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base if n > 1 else base
            n >>= 1
        return out

    def trace(self) -> int:
        return int(self.field.sum_vec(np.diagonal(self.a))) if self.shape[0] else 0

    def __repr__(self) -> str:
        return f"FMatrix({self.field!r}, shape={self.shape})"


@dataclass(frozen=True)
class GaussResult:
    """Row reduction output: rank, pivot columns, RREF, and right kernel basis.

    kernel rows k satisfy M @ k = 0 (each row is one basis vector of the
    null space of the input, in the deterministic free-column order).
    """

    rank: int
    pivots: tuple[int, ...]
    rref: FMatrix
    kernel: FMatrix


def gauss(M: FMatrix) -> GaussResult:
    """Deterministic reduced row echelon form: leftmost pivot, first nonzero row."""
    field = M.field
    r, c = M.shape
    if field.q == 2:
        rank, pivots, rows = gf2.rref_packed(gf2.pack_rows(M.a), c)
        work = gf2.unpack_rows(rows, c).astype(field.dtype)
    else:
        work = M.a.astype(np.int64).copy()
        pivots = []
        row = 0
        for col in range(c):
            if row >= r:
                break
            nz = np.nonzero(work[row:, col])[0]
            if nz.size == 0:
                continue
            piv = row + int(nz[0])
            if piv != row:
                work[[row, piv]] = work[[piv, row]]
            inv = field.inv(int(work[row, col]))
            work[row] = field.mul_vec(work[row], np.int64(inv))
            others = np.nonzero(work[:, col])[0]
            others = others[others != row]
            if others.size:
                factors = work[others, col][:, None]
                work[others] = field.sub_vec(
                    work[others], field.mul_vec(factors, work[row][None, :])
                )
            pivots.append(col)
            row += 1
        pivots = tuple(pivots)
        work = work.astype(field.dtype)
    rank = len(pivots)
    free = [j for j in range(c) if j not in set(pivots)]
    kern = np.zeros((len(free), c), dtype=field.dtype)
    for i, f in enumerate(free):
        kern[i, f] = 1
        for k, pv in enumerate(pivots):
            kern[i, pv] = field.neg(int(work[k, f]))
    return GaussResult(rank, tuple(pivots), FMatrix(field, work), FMatrix(field, kern))


def kron(A: FMatrix, B: FMatrix) -> FMatrix:
    """Kronecker product over the common field."""
    if A.field != B.field:
        raise ValueError("field mismatch")
    f = A.field
    ra, ca = A.shape
    rb, cb = B.shape
    out = f.mul_vec(
        np.repeat(np.repeat(A.a.astype(np.int64), rb, axis=0), cb, axis=1),
        np.tile(B.a.astype(np.int64), (ra, ca)),
    )
    return FMatrix(f, out)


def solve_right(A: FMatrix, B: FMatrix) -> Optional[FMatrix]:
    """Solve A @ X = B; returns None if inconsistent.

    When the solution is not unique the free coordinates are set to zero.
    """
    if A.field != B.field:
        raise ValueError("field mismatch")
    f = A.field
    n, m = A.shape
    if B.shape[0] != n:
        raise ValueError("shape mismatch")
    aug = FMatrix(f, np.hstack([A.a, B.a]))
    res = gauss(aug)
    main_pivots = [p for p in res.pivots if p < m]
    if len(main_pivots) != len(res.pivots):
        return None
    X = np.zeros((m, B.shape[1]), dtype=f.dtype)
    for k, pv in enumerate(main_pivots):
        X[pv] = res.rref.a[k, m:]
    # consistency check against the original system
    if not np.array_equal(f.matmul(A.a, X), B.a):
        return None
    return FMatrix(f, X)
