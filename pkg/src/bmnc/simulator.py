"""Monte Carlo simulation of relay rounds with and without network coding.

A run of ``rounds`` rounds is cut into fixed blocks of ``BLOCK_ROUNDS``.  Block
``b`` draws from its own generator seeded with ``SeedSequence(seed,
spawn_key=(b,))``, so the counts do not depend on how blocks are spread over
workers or in which order they finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .channel import SnrProfile
from .matrix import EncodingMatrix

BLOCK_ROUNDS = 1 << 14


class DecompositionViolation(AssertionError):
    """The decoder's error disagreed with the three-term error decomposition."""


@dataclass(frozen=True)
class SimConfig:
    profile: SnrProfile
    matrix: EncodingMatrix | None  # None: detect-and-forward without coding
    rounds: int
    seed: int
    workers: int = 1
    debug: bool = False

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.matrix is not None and self.matrix.n_users != self.profile.n_users:
            raise ValueError("matrix and profile disagree on the number of users")

    @property
    def n_users(self) -> int:
        return self.profile.n_users

    @property
    def scheme(self) -> str:
        return "no-nc" if self.matrix is None else "nc"

    @property
    def slots_per_round(self) -> int:
        n = self.n_users
        return 2 * n if self.matrix is None else 2 * n - 1


@dataclass(frozen=True)
class SimResult:
    sep_estimate: float
    sep_stderr: float
    throughput_estimate: float
    throughput_stderr: float
    rounds_run: int
    seed: int
    errors: np.ndarray
    decomposition_mismatches: int = 0
    # Symbols within a round share error events, so the binomial stderr is
    # optimistic; this one comes from the spread of per-block error rates.
    sep_stderr_batch: float = float("nan")


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _amplitudes(profile: SnrProfile, coded: bool):
    if coded:
        return np.sqrt(profile.uplink), np.sqrt(profile.downlink)
    return np.sqrt(profile.no_nc_uplink), np.sqrt(profile.no_nc_downlink)


def _nc_rounds(f: EncodingMatrix, profile: SnrProfile, rng, rounds: int, debug: bool):
    n = f.n_users
    x = rng.integers(0, 2, size=(rounds, n), dtype=np.uint8)
    up = rng.standard_normal((rounds, n, 4))
    down = rng.standard_normal((rounds, n, n - 1, 4))
    inv = np.ascontiguousarray(np.stack([f.inverse(i) for i in range(1, n + 1)]))
    su, sd = _amplitudes(profile, True)
    return kernels.nc_block(x, up, down, su, sd, np.ascontiguousarray(f.f), inv, debug)


def _no_nc_rounds(profile: SnrProfile, rng, rounds: int):
    n = profile.n_users
    x = rng.integers(0, 2, size=(rounds, n), dtype=np.uint8)
    up = rng.standard_normal((rounds, n, 4))
    down = rng.standard_normal((rounds, n, n, 4))
    su, sd = _amplitudes(profile, False)
    return kernels.no_nc_block(x, up, down, su, np.ascontiguousarray(sd))


def run_round_nc(f: EncodingMatrix, profile: SnrProfile, rng, debug: bool = True) -> np.ndarray:
    """One coded round; ``table[i-1, k]`` is True if user ``i`` got its
    ``k``-th unknown bit (other users in index order) right."""
    errors, mismatches = _nc_rounds(f, profile, rng, 1, debug)
    if mismatches:
        raise DecompositionViolation("decoded error does not match the error decomposition")
    return errors == 0


def run_round_no_nc(profile: SnrProfile, rng) -> np.ndarray:
    """One forwarding round; ``table[i, j]`` is True if user ``j+1`` got
    ``x_{i+1}`` right.  The diagonal is True."""
    return _no_nc_rounds(profile, rng, 1) == 0


def _run_block(config: SimConfig, block: int, rounds: int):
    rng = block_rng(config.seed, block)
    if config.matrix is None:
        return _no_nc_rounds(config.profile, rng, rounds), 0
    return _nc_rounds(config.matrix, config.profile, rng, rounds, config.debug)


def simulate(config: SimConfig) -> SimResult:
    n_blocks = math.ceil(config.rounds / BLOCK_ROUNDS)
    sizes = [BLOCK_ROUNDS] * (n_blocks - 1) + [config.rounds - BLOCK_ROUNDS * (n_blocks - 1)]

    def work(span):
        errs, bad, wrong_per_block = None, 0, []
        for b in span:
            e, m = _run_block(config, b, sizes[b])
            errs = e if errs is None else errs + e
            bad += m
            wrong_per_block.append(int(e.sum()))
        return errs, bad, wrong_per_block

    # contiguous runs of blocks per worker
    per = math.ceil(n_blocks / config.workers)
    spans = [range(s, min(s + per, n_blocks)) for s in range(0, n_blocks, per)]
    if len(spans) == 1:
        parts = [work(spans[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(work, spans))
    errors = sum(p[0] for p in parts)
    mismatches = sum(p[1] for p in parts)
    block_wrong = np.array([w for p in parts for w in p[2]], dtype=float)
    if config.debug and mismatches:
        raise DecompositionViolation(f"{mismatches} rounds violated the error decomposition")

    n = config.n_users
    deliveries = n * (n - 1) * config.rounds
    wrong = int(errors.sum())
    p = wrong / deliveries
    stderr = math.sqrt(p * (1.0 - p) / deliveries)
    per_slot = n * (n - 1) / config.slots_per_round
    batch = float("nan")
    if n_blocks > 1:
        # ratio estimator over blocks of unequal size
        sz = np.array(sizes, dtype=float) * n * (n - 1)
        resid = block_wrong - p * sz
        batch = math.sqrt(n_blocks / (n_blocks - 1) * (resid**2).sum()) / sz.sum()
    return SimResult(
        sep_estimate=p,
        sep_stderr=stderr,
        throughput_estimate=(deliveries - wrong) / (config.slots_per_round * config.rounds),
        throughput_stderr=per_slot * stderr,
        rounds_run=config.rounds,
        seed=config.seed,
        errors=errors,
        decomposition_mismatches=mismatches,
        sep_stderr_batch=batch,
    )
