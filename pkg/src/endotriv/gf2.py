"""Bit-packed GF(2) matrix kernels: rows are Python ints, bit i = column i."""
from __future__ import annotations

import numpy as np

__all__ = ["pack_rows", "unpack_rows", "mul_packed", "rref_packed"]


def pack_rows(a: np.ndarray) -> list[int]:
    a = np.asarray(a)
    if a.shape[1] == 0:
        return [0] * a.shape[0]
    packed = np.packbits((a != 0).astype(np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def unpack_rows(rows: list[int], ncols: int) -> np.ndarray:
    nbytes = (ncols + 7) // 8
    if ncols == 0:
        return np.zeros((len(rows), 0), dtype=np.uint8)
    buf = b"".join(v.to_bytes(nbytes, "little") for v in rows)
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8).reshape(len(rows), nbytes),
                         axis=1, bitorder="little")
    return bits[:, :ncols].copy()


def mul_packed(arows: list[int], brows: list[int]) -> list[int]:
    """Product rows: C_i = xor of B_j over set bits j of A_i."""
    out = []
    for v in arows:
        acc = 0
        while v:
            low = v & -v
            acc ^= brows[low.bit_length() - 1]
            v ^= low
        out.append(acc)
    return out


def rref_packed(rows: list[int], ncols: int) -> tuple[int, tuple[int, ...], list[int]]:
    """Reduced row echelon form with leftmost-pivot, first-nonzero-row rule.

    Returns (rank, pivot columns, reduced rows).
    """
    work = list(rows)
    nrows = len(work)
    pivots = []
    r = 0
    for col in range(ncols):
        if r >= nrows:
            break
        mask = 1 << col
        piv = -1
        for i in range(r, nrows):
            if work[i] & mask:
                piv = i
                break
        if piv < 0:
            continue
        work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        for i in range(nrows):
            if i != r and work[i] & mask:
                work[i] ^= prow
        pivots.append(col)
        r += 1
    return r, tuple(pivots), work
