"""Dense GF(2) vector and matrix arithmetic.

Matrices and vectors are plain numpy ``uint8`` arrays holding 0/1 entries.
Rank and inversion pack each row into a Python int and eliminate with XOR;
the packing never leaves this module.
"""

from __future__ import annotations

from functools import reduce
from itertools import combinations
from operator import xor

import numpy as np

MAX_XOR_EXPANSION_TERMS = 32


class NotInvertible(ValueError):
    """Raised when a square GF(2) matrix is rank deficient."""


def as_bits(a, ndim: int | None = None) -> np.ndarray:
    """Return ``a`` as a uint8 array, rejecting anything outside {0, 1}."""
    arr = np.asarray(a)
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("GF(2) entries must be 0 or 1")
    arr = arr.astype(np.uint8, copy=False)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty bit array")
    return arr


def identity(k: int) -> np.ndarray:
    return np.eye(k, dtype=np.uint8)


def mat_vec_mod2(m, v) -> np.ndarray:
    """(M v) mod 2."""
    m = as_bits(m, 2)
    v = as_bits(v, 1)
    if m.shape[1] != v.shape[0]:
        raise ValueError(f"cannot multiply {m.shape} matrix by length-{v.shape[0]} vector")
    return ((m.astype(np.int64) @ v) & 1).astype(np.uint8)


def mat_mul_mod2(a, b) -> np.ndarray:
    a = as_bits(a, 2)
    b = as_bits(b, 2)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return ((a.astype(np.int64) @ b) & 1).astype(np.uint8)


def elementwise_product(a, b) -> np.ndarray:
    a = as_bits(a, 1)
    b = as_bits(b, 1)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a & b


def pack_rows(m: np.ndarray) -> list[int]:
    # column j -> bit j
    return [sum(int(b) << j for j, b in enumerate(row)) for row in m]


def unpack_rows(rows: list[int], cols: int) -> np.ndarray:
    out = np.zeros((len(rows), cols), dtype=np.uint8)
    for i, r in enumerate(rows):
        for j in range(cols):
            out[i, j] = (r >> j) & 1
    return out


def rank_packed(rows: list[int], cols: int) -> int:
    rows = list(rows)
    rank = 0
    for col in range(cols):
        bit = 1 << col
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i] & bit:
                rows[i] ^= rows[rank]
        rank += 1
        if rank == len(rows):
            break
    return rank


def rank_gf2(m) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    m = as_bits(m, 2)
    return rank_packed(pack_rows(m), m.shape[1])


def invert_packed(rows: list[int], n: int) -> list[int]:
    """Gauss-Jordan on ``[M | I]`` with rows packed as ints.

    Bits ``0..n-1`` hold M, bits ``n..2n-1`` hold the identity side.
    """
    aug = [r | (1 << (n + i)) for i, r in enumerate(rows)]
    for col in range(n):
        bit = 1 << col
        pivot = next((i for i in range(col, n) if aug[i] & bit), None)
        if pivot is None:
            raise NotInvertible(f"matrix is singular over GF(2) (no pivot in column {col})")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col]
        for i in range(n):
            if i != col and aug[i] & bit:
                aug[i] ^= p
    return [r >> n for r in aug]


def invert_gf2(m) -> np.ndarray:
    m = as_bits(m, 2)
    n, c = m.shape
    if n != c:
        raise ValueError(f"only square matrices can be inverted, got {m.shape}")
    return unpack_rows(invert_packed(pack_rows(m), n), n)


def xor_expansion(bits) -> int:
    """XOR of ``bits`` evaluated with the alternating subset-product sum.

    Evaluates ``sum_q (-2)**(q-1) * sum_{|S|=q} prod_{s in S} a_s`` in
    integer arithmetic.  Exponential in the input length, so it is meant for
    checking, not for production use.
    """
    a = [int(b) for b in bits]
    if not a:
        raise ValueError("need at least one bit")
    if len(a) > MAX_XOR_EXPANSION_TERMS:
        raise ValueError(f"xor_expansion is capped at {MAX_XOR_EXPANSION_TERMS} terms")
    if any(b not in (0, 1) for b in a):
        raise ValueError("xor_expansion inputs must be 0 or 1")
    total = 0
    for q in range(1, len(a) + 1):
        s = sum(all(a[p] for p in subset) for subset in combinations(range(len(a)), q))
        total += (-2) ** (q - 1) * s
    return total


def xor_fold(bits) -> int:
    return reduce(xor, (int(b) for b in bits), 0)


# -- text format -------------------------------------------------------------

def parse_matrix(text: str) -> np.ndarray:
    """Parse ``rows cols`` followed by ``rows`` lines of space-separated 0/1."""
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError("first line must be '<rows> <cols>'")
    try:
        rows, cols = int(lines[0][0]), int(lines[0][1])
    except ValueError:
        raise ValueError("first line must be '<rows> <cols>'") from None
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} matrix rows, found {len(body)}")
    out = np.zeros((rows, cols), dtype=np.uint8)
    for i, toks in enumerate(body):
        if len(toks) != cols:
            raise ValueError(f"row {i + 1}: expected {cols} entries, found {len(toks)}")
        for j, tok in enumerate(toks):
            if tok not in ("0", "1"):
                raise ValueError(f"row {i + 1}: invalid token {tok!r}")
            out[i, j] = int(tok)
    return out


def format_matrix(m) -> str:
    m = as_bits(m, 2)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines += [" ".join(str(int(b)) for b in row) for row in m]
    return "\n".join(lines) + "\n"
