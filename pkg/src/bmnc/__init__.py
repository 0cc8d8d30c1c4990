"""Binary multi-user network coding for N-way relay networks."""

from ._backend import NAME as BACKEND
from .analysis import (
    SepReport,
    ThroughputReport,
    exact_system_sep,
    exact_user_sep,
    sep_no_nc,
    sep_report,
    sep_upper_bound,
    throughput,
)
from .channel import SnrProfile, bpsk_rayleigh_sep, ladder_profile, transmit_detect
from .matrix import (
    EncodingMatrix,
    InvalidMatrix,
    decode_user,
    design,
    enumerate_valid,
    validate,
)
from .optimizer import SearchResult, bound_gap, search_optimal, verify_lemma5_orderings, verify_three_user_orderings
from .simulator import SimConfig, SimResult, simulate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EncodingMatrix",
    "InvalidMatrix",
    "SearchResult",
    "SepReport",
    "SimConfig",
    "SimResult",
    "SnrProfile",
    "ThroughputReport",
    "bound_gap",
    "bpsk_rayleigh_sep",
    "decode_user",
    "design",
    "enumerate_valid",
    "exact_system_sep",
    "exact_user_sep",
    "ladder_profile",
    "search_optimal",
    "sep_no_nc",
    "sep_report",
    "sep_upper_bound",
    "simulate",
    "throughput",
    "transmit_detect",
    "validate",
    "verify_lemma5_orderings",
    "verify_three_user_orderings",
]
