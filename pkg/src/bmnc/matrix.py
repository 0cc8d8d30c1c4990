"""BMNC encoding matrices: construction, validation, decoding and enumeration.

Users are numbered ``1..N`` everywhere in this module's public API, matching
the usual U_1..U_N labelling; column ``i`` of an encoding matrix belongs to
user ``i``.  Broadcast slots are numbered ``1..N-1`` (row ``k`` is the bit
the relay sends in slot ``k``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import gf2

MAX_ENUMERATION_USERS = 6


class InvalidMatrix(ValueError):
    """The matrix does not let every user decode."""


@dataclass(frozen=True)
class ValidityReport:
    n_users: int
    full_rank: tuple[bool, ...]
    column_sum_ok: tuple[bool, ...]
    valid: bool
    # Anchor check: when the matrix without the last column is full rank,
    # valid <=> the last column is the XOR of the rest.
    anchor_full_rank: bool
    anchor_column_sum_ok: bool
    equivalence_holds: bool

    @property
    def failing_users(self) -> list[int]:
        return [i + 1 for i, ok in enumerate(self.full_rank) if not ok]

    def lines(self) -> list[str]:
        out = [f"valid={str(self.valid).lower()}", f"n_users={self.n_users}"]
        out += [f"fullrank_user_{i + 1}={str(ok).lower()}" for i, ok in enumerate(self.full_rank)]
        out += [f"column_sum_user_{i + 1}={str(ok).lower()}" for i, ok in enumerate(self.column_sum_ok)]
        out.append("failing_users=" + ",".join(map(str, self.failing_users)))
        out.append(f"anchor_equivalence={str(self.equivalence_holds).lower()}")
        return out


def _check_shape(f: np.ndarray) -> int:
    rows, cols = f.shape
    if cols < 2 or rows != cols - 1:
        raise ValueError(f"encoding matrix must be (N-1) x N with N >= 2, got {f.shape}")
    return cols


def _check_user(i: int, n: int) -> int:
    if not 1 <= i <= n:
        raise IndexError(f"user index {i} out of range 1..{n}")
    return i - 1


def delete_column(f: np.ndarray, i: int) -> np.ndarray:
    """The matrix with user ``i``'s column removed (user ``i``'s sub-matrix)."""
    f = gf2.as_bits(f, 2)
    idx = _check_user(i, f.shape[1])
    return np.delete(f, idx, axis=1)


def validate(f) -> ValidityReport:
    f = gf2.as_bits(f, 2)
    n = _check_shape(f)
    full = tuple(gf2.rank_gf2(np.delete(f, c, axis=1)) == n - 1 for c in range(n))
    total = np.bitwise_xor.reduce(f, axis=1)
    # column c == XOR of the others  <=>  XOR of all columns is zero
    col_sum = tuple(bool(np.array_equal(f[:, c], total ^ f[:, c])) for c in range(n))
    valid = all(full)
    anchor_full = full[-1]
    anchor_sum = col_sum[-1]
    equivalence = (not anchor_full) or (valid == anchor_sum)
    return ValidityReport(n, full, col_sum, valid, anchor_full, anchor_sum, equivalence)


@dataclass(frozen=True, eq=False)
class EncodingMatrix:
    """A validated (N-1) x N encoding matrix with its per-user decoders."""

    f: np.ndarray
    _sub: tuple[np.ndarray, ...] = field(init=False, repr=False)
    _inv: tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self):
        f = gf2.as_bits(self.f, 2).copy()
        n = _check_shape(f)
        report = validate(f)
        if not report.valid:
            raise InvalidMatrix(
                f"sub-encoding matrices of users {report.failing_users} are rank deficient"
            )
        f.setflags(write=False)
        subs, invs = [], []
        for c in range(n):
            s = np.delete(f, c, axis=1)
            s.setflags(write=False)
            inv = gf2.invert_gf2(s)
            inv.setflags(write=False)
            subs.append(s)
            invs.append(inv)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "_sub", tuple(subs))
        object.__setattr__(self, "_inv", tuple(invs))

    @property
    def n_users(self) -> int:
        return self.f.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.f[:, _check_user(i, self.n_users)]

    def submatrix(self, i: int) -> np.ndarray:
        return self._sub[_check_user(i, self.n_users)]

    def inverse(self, i: int) -> np.ndarray:
        return self._inv[_check_user(i, self.n_users)]

    def column_weights(self, i: int) -> np.ndarray:
        """Hamming weight of each column of user ``i``'s decoder."""
        return self.inverse(i).sum(axis=0, dtype=np.int64)

    def encode(self, x) -> np.ndarray:
        return gf2.mat_vec_mod2(self.f, x)

    def __eq__(self, other):
        if not isinstance(other, EncodingMatrix):
            return NotImplemented
        return np.array_equal(self.f, other.f)

    def __hash__(self):
        return hash(self.f.tobytes()) ^ hash(self.f.shape)

    def __str__(self):
        return gf2.format_matrix(self.f)


def submatrix_excluding(f: EncodingMatrix, i: int) -> np.ndarray:
    return f.submatrix(i)


def design(n_users: int) -> EncodingMatrix:
    """Row ``j`` is 1 in column 1 and column ``j+1``.

    The design for ``N-1`` users is the upper-left block of the design for
    ``N`` users, so a relay only has to store the largest one.
    """
    if n_users < 2:
        raise ValueError("need at least two users")
    f = np.zeros((n_users - 1, n_users), dtype=np.uint8)
    f[:, 0] = 1
    f[np.arange(n_users - 1), np.arange(1, n_users)] = 1
    return EncodingMatrix(f)


@dataclass(frozen=True)
class DecodingSet:
    submatrices: tuple[np.ndarray, ...]
    inverses: tuple[np.ndarray, ...]
    column_weights: tuple[tuple[int, ...], ...]


def decoding_matrices(f: EncodingMatrix) -> DecodingSet:
    n = f.n_users
    return DecodingSet(
        tuple(f.submatrix(i) for i in range(1, n + 1)),
        tuple(f.inverse(i) for i in range(1, n + 1)),
        tuple(tuple(int(w) for w in f.column_weights(i)) for i in range(1, n + 1)),
    )


def decode_user(f: EncodingMatrix, i: int, r_detected, own_bit: int) -> np.ndarray:
    """Recover the other users' bits at user ``i``.

    Returns ``inverse(i) @ (r_detected xor column(i) * own_bit) mod 2``, ordered by user
    index with user ``i`` skipped.
    """
    r_detected = gf2.as_bits(r_detected, 1)
    if r_detected.shape[0] != f.n_users - 1:
        raise ValueError(f"expected {f.n_users - 1} broadcast bits, got {r_detected.shape[0]}")
    if own_bit not in (0, 1):
        raise ValueError("own_bit must be 0 or 1")
    rhs = r_detected ^ (f.column(i) * np.uint8(own_bit))
    return gf2.mat_vec_mod2(f.inverse(i), rhs)


def error_vector(f: EncodingMatrix, i: int, x, x_detected, r, r_detected) -> np.ndarray:
    """Decoding error seen by user ``i`` written as three XOR-ed sources.

    ``x`` are the true source bits, ``x_detected`` the relay's decisions,
    ``r`` what the relay broadcast and ``r_detected`` what user ``i`` heard.
    """
    n = f.n_users
    x = gf2.as_bits(x, 1)
    x_detected = gf2.as_bits(x_detected, 1)
    r = gf2.as_bits(r, 1)
    r_detected = gf2.as_bits(r_detected, 1)
    if x.shape[0] != n or x_detected.shape[0] != n:
        raise ValueError(f"source vectors must have length {n}")
    if r.shape[0] != n - 1 or r_detected.shape[0] != n - 1:
        raise ValueError(f"broadcast vectors must have length {n - 1}")
    idx = _check_user(i, n)
    uplink = np.delete(x ^ x_detected, idx)
    own = np.full(n - 1, (x[idx] ^ x_detected[idx]), dtype=np.uint8)
    downlink = gf2.mat_vec_mod2(f.inverse(i), r ^ r_detected)
    return uplink ^ own ^ downlink


# -- enumeration -------------------------------------------------------------

def _gl_rows(n: int) -> Iterator[tuple[int, ...]]:
    """Every invertible n x n GF(2) matrix, as tuples of packed rows."""
    full = 1 << n

    def extend(rows: tuple[int, ...], span: frozenset[int]):
        if len(rows) == n:
            yield rows
            return
        for r in range(1, full):
            if r not in span:
                yield from extend(rows + (r,), span | {s ^ r for s in span})

    yield from extend((), frozenset({0}))


def enumerate_valid_packed(n_users: int) -> Iterator[tuple[int, ...]]:
    """Valid matrices as tuples of packed rows (bit ``c`` is column ``c+1``).

    Every invertible (N-1) x (N-1) matrix is extended with the parity of each
    row as the last column, so that column is the XOR of the others.
    """
    if n_users < 2:
        raise ValueError("need at least two users")
    if n_users > MAX_ENUMERATION_USERS:
        raise ValueError(f"enumeration is limited to N <= {MAX_ENUMERATION_USERS}")
    m = n_users - 1
    for rows in _gl_rows(m):
        yield tuple(r | ((bin(r).count("1") & 1) << m) for r in rows)


def enumerate_valid(n_users: int) -> Iterator[EncodingMatrix]:
    for rows in enumerate_valid_packed(n_users):
        yield EncodingMatrix(gf2.unpack_rows(list(rows), n_users))
