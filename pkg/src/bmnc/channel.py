"""Rayleigh-fading BPSK links and the SNR profiles that parameterise them."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

LADDER_STEP_DB = 3.0


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    return 10.0 * np.log10(np.asarray(lin, dtype=float))


@dataclass(frozen=True, eq=False)
class SnrProfile:
    """Average received SNRs (linear) for one N-user relay round.

    ``uplink[k]`` is user ``k+1`` as heard by the relay.  ``downlink[i, k]`` is
    what user ``i+1`` receives in broadcast slot ``k+1`` when the relay uses
    network coding.  The ``no_nc_*`` arrays describe the plain forwarding
    scheme: ``no_nc_uplink[k]`` as above and ``no_nc_downlink[i, k]`` is what
    user ``i+1`` receives in the slot carrying user ``k+1``'s bit (the
    diagonal is unused).  When omitted they are derived with
    :func:`default_no_nc`.
    """

    uplink: np.ndarray
    downlink: np.ndarray
    no_nc_uplink: np.ndarray | None = None
    no_nc_downlink: np.ndarray | None = None

    def __post_init__(self):
        up = np.array(self.uplink, dtype=float)
        down = np.array(self.downlink, dtype=float)
        n = up.shape[0]
        if up.ndim != 1 or n < 2:
            raise ValueError("uplink must list at least two users")
        if down.shape != (n, n - 1):
            raise ValueError(f"downlink must be {n} x {n - 1}, got {down.shape}")
        if (self.no_nc_uplink is None) != (self.no_nc_downlink is None):
            raise ValueError("give both no_nc_uplink and no_nc_downlink or neither")
        if self.no_nc_uplink is None:
            nonc_up, nonc = default_no_nc(up, down)
        else:
            nonc_up = np.array(self.no_nc_uplink, dtype=float)
            nonc = np.array(self.no_nc_downlink, dtype=float)
        if nonc_up.shape != (n,):
            raise ValueError(f"no_nc_uplink must have {n} entries, got {nonc_up.shape}")
        if nonc.shape != (n, n):
            raise ValueError(f"no_nc_downlink must be {n} x {n}, got {nonc.shape}")
        arrays = {"uplink": up, "downlink": down, "no_nc_uplink": nonc_up, "no_nc_downlink": nonc}
        for name, a in arrays.items():
            if not (a > 0).all():
                raise ValueError(f"{name} SNRs must be strictly positive")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_users(self) -> int:
        return self.uplink.shape[0]

    def scaled(self, factor_db: float) -> "SnrProfile":
        g = float(db_to_linear(factor_db))
        return SnrProfile(
            self.uplink * g, self.downlink * g, self.no_nc_uplink * g, self.no_nc_downlink * g
        )

    # -- key/value text format ------------------------------------------------

    def to_text(self) -> str:
        def fmt(a):
            return ",".join(repr(float(v)) for v in linear_to_db(a))

        lines = [f"n_users={self.n_users}", f"uplink_db={fmt(self.uplink)}"]
        lines += [f"downlink_db_user_{i + 1}={fmt(row)}" for i, row in enumerate(self.downlink)]
        lines.append(f"no_nc_uplink_db={fmt(self.no_nc_uplink)}")
        lines += [
            f"no_nc_downlink_db_user_{i + 1}={fmt(row)}"
            for i, row in enumerate(self.no_nc_downlink)
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SnrProfile":
        kv = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected key=value")
            kv[key.strip()] = value.strip()

        def floats(key):
            try:
                return [float(v) for v in kv[key].split(",")]
            except KeyError:
                raise ValueError(f"profile is missing {key!r}") from None

        n = int(kv.get("n_users", "0"))
        if n < 2:
            raise ValueError("profile needs n_users >= 2")
        up = db_to_linear(floats("uplink_db"))
        down = db_to_linear([floats(f"downlink_db_user_{i}") for i in range(1, n + 1)])
        if "no_nc_uplink_db" in kv:
            nonc_up = db_to_linear(floats("no_nc_uplink_db"))
            nonc = db_to_linear([floats(f"no_nc_downlink_db_user_{i}") for i in range(1, n + 1)])
            return cls(up, down, nonc_up, nonc)
        return cls(up, down)

    @classmethod
    def load(cls, path) -> "SnrProfile":
        return cls.from_text(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


def default_no_nc(uplink: np.ndarray, downlink: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forwarding-scheme SNRs under the same total round energy.

    Assumes equal user transmit powers and that the coded scheme's weakest
    relay slot uses that same power, so relay slot powers relative to a user
    are read off user 1's downlink.  The forwarding relay uses ``N`` slots on
    a 3 dB ladder whose weakest slot again equals the user power; user
    ``k``'s bit goes out in slot ``k``.  Every forwarding slot (uplink
    included) is then scaled by one factor so both schemes spend the same
    energy per round.
    """
    uplink = np.asarray(uplink, dtype=float)
    downlink = np.asarray(downlink, dtype=float)
    n = uplink.shape[0]
    coded_tx = downlink[0] / downlink[0, -1]
    fwd_tx = db_to_linear(LADDER_STEP_DB * np.arange(n - 1, -1, -1))
    scale = (n + coded_tx.sum()) / (n + fwd_tx.sum())
    # user i's gain from the relay, referenced to its weakest coded slot
    gain = downlink[:, -1]
    nonc = gain[:, None] * fwd_tx[None, :] * scale
    return uplink * scale, nonc


def no_nc_energy_scale(n_users: int) -> float:
    """Uniform power factor applied to the forwarding scheme on the ladder."""
    n = n_users
    coded = n + db_to_linear(LADDER_STEP_DB * np.arange(n - 1)).sum()
    fwd = n + db_to_linear(LADDER_STEP_DB * np.arange(n)).sum()
    return float(coded / fwd)


def ladder_profile(
    n_users: int,
    esn0_db: float,
    uplink_offset_db: float = 0.0,
    user_step_db: float = LADDER_STEP_DB,
) -> SnrProfile:
    """SNR profile with 3 dB steps between users and between broadcast slots.

    The last broadcast slot at user 1 sits at ``esn0_db``; each earlier slot
    is 3 dB stronger.  User ``i`` hears the relay ``user_step_db`` better than
    user ``i-1``.  Uplink: user N sits at ``esn0_db + uplink_offset_db`` and
    each lower-numbered user is 3 dB weaker.
    """
    if n_users < 2:
        raise ValueError("need at least two users")
    n = n_users
    users = np.arange(n)
    slots = np.arange(1, n)
    uplink_db = esn0_db + uplink_offset_db - LADDER_STEP_DB * (n - 1 - users)
    down_db = (
        esn0_db
        + LADDER_STEP_DB * (n - 1 - slots)[None, :]
        + user_step_db * users[:, None]
    )
    return SnrProfile(db_to_linear(uplink_db), db_to_linear(down_db))


def uniform_profile(n_users: int, snr_db: float) -> SnrProfile:
    g = float(db_to_linear(snr_db))
    n = n_users
    return SnrProfile(np.full(n, g), np.full((n, n - 1), g), np.full(n, g), np.full((n, n), g))


# -- link model --------------------------------------------------------------

def bpsk_rayleigh_sep(gamma):
    """Average BPSK symbol error probability over Rayleigh fading.

    ``0.5 - 0.5*sqrt(gamma/(1+gamma))``; ``gamma`` is the linear average SNR
    and may be an array or ``inf``.
    """
    g = np.asarray(gamma, dtype=float)
    if (g < 0).any() or np.isnan(g).any():
        raise ValueError("SNR must be non-negative")
    with np.errstate(invalid="ignore"):
        ratio = np.where(np.isinf(g), 1.0, g / (1.0 + g))
    # 0.5*(1 - sqrt(t)) == 0.5*(1 - t)/(1 + sqrt(t)); the latter keeps precision
    # at high SNR where sqrt(t) -> 1.
    p = 0.5 * (1.0 - ratio) / (1.0 + np.sqrt(ratio))
    return p if p.ndim else float(p)


def modulate(bits):
    """BPSK map: 0 -> +1, 1 -> -1."""
    b = np.asarray(bits)
    return 1.0 - 2.0 * b.astype(float)


def demodulate(symbols):
    return (np.asarray(symbols, dtype=float) < 0).astype(np.uint8)


def complex_gaussian(rng: np.random.Generator, size, variance: float = 1.0) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def transmit_detect(bits, gamma, rng: np.random.Generator) -> np.ndarray:
    """Send ``bits`` over independent Rayleigh BPSK links and detect them.

    Each symbol gets its own fade ``h ~ CN(0, 1)`` and noise ``n ~ CN(0, 1)``;
    the received sample is ``h * s * sqrt(gamma) + n`` and the receiver,
    knowing ``h``, decides on the sign of ``Re(conj(h) y)``.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), bits.shape)
    if (gamma <= 0).any():
        raise ValueError("SNR must be positive")
    h = complex_gaussian(rng, bits.shape)
    n = complex_gaussian(rng, bits.shape)
    y = h * modulate(bits) * np.sqrt(gamma) + n
    return demodulate(np.real(np.conj(h) * y))
