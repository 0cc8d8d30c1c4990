"""Closed-form error probability and throughput of the relay schemes.

Two normalisations appear throughout.  The "raw" per-user value is the
expected *number* of wrongly decoded symbols at a user (a sum of ``N-1``
per-symbol probabilities), which is what the closed forms naturally produce;
the "normalised" value divides by ``N-1`` to give a per-symbol probability.
Throughput always consumes normalised probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SnrProfile, bpsk_rayleigh_sep
from .matrix import EncodingMatrix

MAX_EXACT_TERMS = 24


def _check_profile(f: EncodingMatrix, profile: SnrProfile) -> int:
    if profile.n_users != f.n_users:
        raise ValueError(
            f"profile is for {profile.n_users} users but matrix is for {f.n_users}"
        )
    return f.n_users


def error_terms(
    f: EncodingMatrix, i: int, profile: SnrProfile, row_slot_indexing: bool = False
) -> np.ndarray:
    """Mean of each XOR-ed error source, per decoded symbol, at user ``i``.

    Returns an ``(N+1) x (N-1)`` array ``t`` where column ``k`` is symbol ``k``
    of user ``i``'s decoded vector and the rows are:

    * ``t[0, k]`` uplink error of the ``k``-th other user,
    * ``t[1, k]`` uplink error of user ``i`` itself,
    * ``t[2 + n, k]`` error in broadcast slot ``n+1``, masked by
      entry ``[k, n]`` of user ``i``'s decoder (it only reaches symbol ``k`` through that entry).

    With ``row_slot_indexing`` every masked term in column ``k`` uses slot
    ``k``'s error rate instead of slot ``n+1``'s.  That shortcut treats the
    element-wise product of a decoder column with the broadcast error vector
    as if it were the column's contribution; it is only kept for comparison.
    """
    n = _check_profile(f, profile)
    idx = i - 1
    inv = f.inverse(i).astype(float)
    p_up = bpsk_rayleigh_sep(profile.uplink)
    p_down = bpsk_rayleigh_sep(profile.downlink[idx])
    t = np.empty((n + 1, n - 1))
    t[0] = np.delete(p_up, idx)
    t[1] = p_up[idx]
    if row_slot_indexing:
        t[2:] = (inv * p_down[:, None]).T
    else:
        t[2:] = (inv * p_down[None, :]).T
    return t


def _xor_probability(p: np.ndarray) -> float:
    """P(odd number of events) for independent events with means ``p``.

    Alternating inclusion-exclusion over every non-empty subset, enumerated
    as bitmasks.
    """
    q = len(p)
    if q > MAX_EXACT_TERMS:
        raise ValueError(f"exact evaluation is limited to {MAX_EXACT_TERMS} error terms")
    # prod[mask] = product of p over the set bits of mask, built incrementally
    prod = np.ones(1 << q)
    sign = np.ones(1 << q)
    for j in range(q):
        lo = 1 << j
        prod[lo : 2 * lo] = prod[:lo] * p[j]
        sign[lo : 2 * lo] = sign[:lo] * -2.0
    # each mask of size s carries (-2)**(s-1)
    return float(-0.5 * (sign[1:] * prod[1:]).sum())


def exact_user_sep(
    f: EncodingMatrix,
    i: int,
    profile: SnrProfile,
    normalized: bool = False,
    row_slot_indexing: bool = False,
) -> float:
    """Expected number of wrong symbols decoded by user ``i`` (or per symbol)."""
    t = error_terms(f, i, profile, row_slot_indexing)
    raw = sum(_xor_probability(t[:, k]) for k in range(t.shape[1]))
    return raw / (f.n_users - 1) if normalized else raw


def exact_system_sep(
    f: EncodingMatrix,
    profile: SnrProfile,
    normalized: bool = True,
    row_slot_indexing: bool = False,
) -> float:
    n = _check_profile(f, profile)
    total = sum(
        exact_user_sep(f, i, profile, normalized, row_slot_indexing) for i in range(1, n + 1)
    )
    return total / n


def user_sep_bound(f: EncodingMatrix, i: int, profile: SnrProfile) -> float:
    """Union bound on the expected number of wrong symbols at user ``i``."""
    n = _check_profile(f, profile)
    idx = i - 1
    p_up = bpsk_rayleigh_sep(profile.uplink)
    p_down = bpsk_rayleigh_sep(profile.downlink[idx])
    others = p_up.sum() - p_up[idx]
    return float(others + (n - 1) * p_up[idx] + (p_down * f.column_weights(i)).sum())


def sep_upper_bound(f: EncodingMatrix, profile: SnrProfile, normalized: bool = True) -> float:
    n = _check_profile(f, profile)
    raw = sum(user_sep_bound(f, i, profile) for i in range(1, n + 1)) / n
    return raw / (n - 1) if normalized else raw


def sep_no_nc(
    n_users: int, profile: SnrProfile, normalized: bool = True, pairwise_exact: bool = False
) -> float:
    """Error probability of plain detect-and-forward through the relay.

    By default the bit of each user ``i`` contributes
    ``(N-1) p_i + (1 - p_i) * sum_j q_ji`` where ``p_i`` is the relay's
    detection error and ``q_ji`` user ``j``'s error on the forwarding slot.
    That slightly overcounts the event where both hops fail (which cancels);
    ``pairwise_exact`` uses ``p + q - 2pq`` per receiver instead.
    """
    n = n_users
    if n < 2:
        raise ValueError("need at least two users")
    if profile.n_users != n:
        raise ValueError(f"profile is for {profile.n_users} users, not {n}")
    p_up = bpsk_rayleigh_sep(profile.no_nc_uplink)
    q = bpsk_rayleigh_sep(profile.no_nc_downlink)  # q[j, i]: user j hearing user i's bit
    total = 0.0
    for i in range(n):
        recv = np.delete(q[:, i], i)
        if pairwise_exact:
            total += float((p_up[i] + recv - 2.0 * p_up[i] * recv).sum())
        else:
            total += (n - 1) * p_up[i] + (1.0 - p_up[i]) * float(recv.sum())
    return total / (n * (n - 1)) if normalized else total


@dataclass(frozen=True)
class ThroughputReport:
    nc: float
    no_nc: float
    nc_asymptotic: float
    no_nc_asymptotic: float
    delta_asymptotic: float

    @property
    def relative_gain(self) -> float:
        return self.nc / self.no_nc - 1.0


def asymptotic_gain(n_users: int) -> float:
    """High-SNR throughput advantage of coding: ``(1 - 1/(2N-1)) / 4``."""
    return 0.25 * (1.0 - 1.0 / (2 * n_users - 1))


def throughput(n_users: int, pe_nc: float, pe_no_nc: float) -> ThroughputReport:
    """Correctly delivered symbols per slot with (2N-1 slots) and without (2N) coding."""
    n = n_users
    for p in (pe_nc, pe_no_nc):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
    nc_inf = n * (n - 1) / (2 * n - 1)
    no_nc_inf = (n - 1) / 2
    return ThroughputReport(
        nc=nc_inf * (1.0 - pe_nc),
        no_nc=no_nc_inf * (1.0 - pe_no_nc),
        nc_asymptotic=nc_inf,
        no_nc_asymptotic=no_nc_inf,
        delta_asymptotic=asymptotic_gain(n),
    )


@dataclass(frozen=True)
class SepReport:
    per_user_exact: tuple[float, ...]
    system_exact: float
    per_user_bound: tuple[float, ...]
    system_bound: float
    system_exact_normalized: float
    system_bound_normalized: float


def sep_report(f: EncodingMatrix, profile: SnrProfile) -> SepReport:
    n = _check_profile(f, profile)
    users = range(1, n + 1)
    exact = tuple(exact_user_sep(f, i, profile) for i in users)
    bound = tuple(user_sep_bound(f, i, profile) for i in users)
    return SepReport(
        per_user_exact=exact,
        system_exact=sum(exact) / n,
        per_user_bound=bound,
        system_bound=sum(bound) / n,
        system_exact_normalized=sum(exact) / (n * (n - 1)),
        system_bound_normalized=sum(bound) / (n * (n - 1)),
    )
