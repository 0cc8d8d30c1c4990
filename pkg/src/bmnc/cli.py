"""Command line interface: ``bmnc <command> [options]``.

Commands
  design     print the designed matrix for N users
  validate   check that every user can decode (exit 1 if not)
  invert     print every user's decoding matrix
  analyze    closed-form SEP or throughput over an Es/N0 grid
  simulate   Monte Carlo SEP and throughput over an Es/N0 grid
  search     exhaustive search for the bound-minimising matrix
  figure     regenerate one figure's curves as CSV files

SNR grids are ``X`` or ``start:step:stop`` (stop included).  Without
``--profile`` the ladder profile anchored at each grid value is used; with
``--profile`` the file's SNRs are shifted by each grid value (default 0 dB).
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gf2
from .analysis import exact_system_sep, sep_no_nc, sep_upper_bound, throughput
from .channel import SnrProfile, ladder_profile
from .matrix import EncodingMatrix, InvalidMatrix, design, validate
from .optimizer import search_optimal
from .simulator import SimConfig, simulate

DEFAULT_ROUNDS = 10**6
DEFAULT_SEED = 2024

ANALYZE_HEADER = ["esn0_db", "n_users", "metric", "value"]
SIM_HEADER = [
    "esn0_db", "scheme", "n_users", "sep", "sep_stderr",
    "throughput", "thr_stderr", "rounds", "seed",
]

# The three ad-hoc four-user matrices compared against the design.
ADHOC_MATRICES = (
    [[0, 0, 1, 1], [0, 1, 0, 1], [1, 0, 0, 1]],
    [[0, 0, 1, 1], [0, 1, 1, 0], [1, 1, 0, 0]],
    [[0, 1, 0, 1], [1, 0, 1, 0], [0, 0, 1, 1]],
)


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``"10"`` -> [10.0]; ``"0:5:20"`` -> [0, 5, 10, 15, 20]."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad SNR grid {text!r}") from None
    if not all(math.isfinite(v) for v in nums):
        raise UsageError(f"bad SNR grid {text!r}")
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError("SNR grid must be 'X' or 'start:step:stop'")
    start, step, stop = nums
    if step <= 0:
        raise UsageError("grid step must be positive")
    count = math.floor((stop - start) / step + 1e-9) + 1
    if count < 1:
        raise UsageError(f"SNR grid {text!r} is empty")
    # rounding keeps 0.1-style steps from printing as 0.30000000000000004
    return [round(start + k * step, 10) for k in range(count)]


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows(stream, header, rows):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def read_matrix(path: str) -> np.ndarray:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return gf2.parse_matrix(text)


def load_matrix(path: str | None, n_users: int) -> EncodingMatrix:
    if path is None:
        return design(n_users)
    f = EncodingMatrix(read_matrix(path))
    if f.n_users != n_users:
        raise UsageError(f"matrix is for {f.n_users} users but --users is {n_users}")
    return f


def profile_at(args, esn0_db: float) -> SnrProfile:
    if args.profile:
        base = SnrProfile.load(args.profile)
        if base.n_users != args.users:
            raise UsageError(f"profile is for {base.n_users} users but --users is {args.users}")
        return base.scaled(esn0_db)
    return ladder_profile(args.users, esn0_db, uplink_offset_db=args.uplink_offset_db)


def grid_of(args) -> list[float]:
    if args.esn0_db is None:
        if args.profile:
            return [0.0]
        raise UsageError("--esn0-db is required without --profile")
    return parse_grid(args.esn0_db)


# -- commands ------------------------------------------------------------------

def cmd_design(args, out):
    out.write(str(design(args.users)))
    return 0


def cmd_validate(args, out):
    report = validate(read_matrix(args.matrix))
    out.write("\n".join(report.lines()) + "\n")
    return 0 if report.valid else 1


def cmd_invert(args, out):
    f = EncodingMatrix(read_matrix(args.matrix))
    for i in range(1, f.n_users + 1):
        out.write(f"# user {i}\n")
        out.write(gf2.format_matrix(f.inverse(i)))
    return 0


def analyze_rows(args):
    n = args.users
    f = load_matrix(args.matrix, n)
    for e in grid_of(args):
        p = profile_at(args, e)
        if args.mode == "exact":
            yield e, n, "sep_exact", exact_system_sep(f, p)
        elif args.mode == "bound":
            yield e, n, "sep_bound", sep_upper_bound(f, p)
        elif args.mode == "no_nc":
            yield e, n, "sep_no_nc", sep_no_nc(n, p)
        else:
            rep = throughput(n, exact_system_sep(f, p), sep_no_nc(n, p))
            yield e, n, "thr_nc", rep.nc
            yield e, n, "thr_no_nc", rep.no_nc
            yield e, n, "thr_delta", rep.nc - rep.no_nc
            yield e, n, "thr_relative_gain", rep.relative_gain


def cmd_analyze(args, out):
    rows = list(analyze_rows(args))
    write_rows(out, ANALYZE_HEADER, rows)
    return 0


def sim_row(esn0_db, config: SimConfig):
    r = simulate(config)
    return [
        esn0_db, config.scheme, config.n_users, r.sep_estimate, r.sep_stderr,
        r.throughput_estimate, r.throughput_stderr, r.rounds_run, r.seed,
    ]


def cmd_simulate(args, out):
    n = args.users
    f = None if args.scheme == "no-nc" else load_matrix(args.matrix, n)
    rows = [
        sim_row(e, SimConfig(profile_at(args, e), f, args.rounds, args.seed, args.workers, args.debug))
        for e in grid_of(args)
    ]
    write_rows(out, SIM_HEADER, rows)
    return 0


def cmd_search(args, out):
    grid = grid_of(args)
    if len(grid) != 1:
        raise UsageError("search takes a single --esn0-db value")
    p = profile_at(args, grid[0])
    res = search_optimal(args.users, p, objective=args.objective)
    for m in res.best_matrices:
        out.write(str(m))
    out.write(f"bound={fmt(res.best_bound)}\n")
    out.write(f"candidates={res.candidates_examined}\n")
    out.write(f"orderings_ok={fmt(res.profile_orderings_ok)}\n")
    if res.objective == "exact":
        out.write(f"objective=exact\nobjectives_agree={fmt(res.objectives_agree)}\n")
    return 0


# -- figures -------------------------------------------------------------------

@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    users: tuple[int, ...]
    grid: tuple[float, ...]
    rounds: int
    seed: int
    uplink_offset_db: float = 0.0

    def __post_init__(self):
        if not self.grid or list(self.grid) != sorted(set(self.grid)):
            raise UsageError("figure grid must be nonempty and strictly ascending")


FIGURE_GRIDS = {2: "0:2:40", 3: "5:5:25", 4: "0:2:30", 5: "0:1:30"}


def figure_spec(figure_id: int, grid: str | None, rounds: int, seed: int) -> FigureSpec:
    if figure_id not in FIGURE_GRIDS:
        raise UsageError(f"unknown figure id {figure_id}; choose from 2, 3, 4, 5")
    points = tuple(parse_grid(grid or FIGURE_GRIDS[figure_id]))
    users = (4, 5, 6) if figure_id in (2, 3) else (4,)
    offset = 20.0 if figure_id == 5 else 0.0
    return FigureSpec(figure_id, users, points, rounds, seed, offset)


def slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", label).strip("_").lower()


def figure_curves(spec: FigureSpec, workers: int = 1):
    """Yield ``(label, header, rows)`` for every curve of a figure."""

    def prof(n, e):
        return ladder_profile(n, e, uplink_offset_db=spec.uplink_offset_db)

    def sim(f, n):
        return [
            sim_row(e, SimConfig(prof(n, e), f, spec.rounds, spec.seed, workers))
            for e in spec.grid
        ]

    if spec.figure_id == 2:
        for n in spec.users:
            f = design(n)
            reps = [
                throughput(n, exact_system_sep(f, prof(n, e)), sep_no_nc(n, prof(n, e)))
                for e in spec.grid
            ]
            yield (f"{n} users with NC", ANALYZE_HEADER,
                   [(e, n, "thr_nc", r.nc) for e, r in zip(spec.grid, reps)])
            yield (f"{n} users without NC", ANALYZE_HEADER,
                   [(e, n, "thr_no_nc", r.no_nc) for e, r in zip(spec.grid, reps)])
    elif spec.figure_id == 3:
        for n in spec.users:
            f = design(n)
            yield f"{n} users, simulation", SIM_HEADER, sim(f, n)
            yield (f"{n} users, numerical", ANALYZE_HEADER,
                   [(e, n, "sep_bound", sep_upper_bound(f, prof(n, e))) for e in spec.grid])
    else:
        n = 4
        for k, rows in enumerate(ADHOC_MATRICES, 1):
            yield f"matrix {k}", SIM_HEADER, sim(EncodingMatrix(np.array(rows)), n)
        yield "designed matrix", SIM_HEADER, sim(design(n), n)
        yield "without NC", SIM_HEADER, sim(None, n)


def cmd_figure(args, out):
    spec = figure_spec(args.id, args.esn0_db, args.rounds, args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for label, header, rows in figure_curves(spec, args.workers):
        path = outdir / f"fig{spec.figure_id}_{slug(label)}.csv"
        with path.open("w", newline="") as fh:
            write_rows(fh, ["label"] + header, [[label, *r] for r in rows])
        out.write(f"{path}\t{label}\n")
    return 0


# -- argument parsing ------------------------------------------------------------

def positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def user_count(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("need at least two users")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bmnc", description="Binary network coding for N-way relays.")
    sub = parser.add_subparsers(dest="command", required=True)

    def snr_opts(p, grid_default=None):
        p.add_argument("--users", type=user_count, required=True)
        p.add_argument("--esn0-db", default=grid_default, help="X or start:step:stop")
        p.add_argument("--profile", help="SNR profile file (key=value lines)")
        p.add_argument("--uplink-offset-db", type=float, default=0.0,
                       help="ladder only: raise every uplink SNR by this much")

    p = sub.add_parser("design", help="print the designed matrix")
    p.add_argument("--users", type=user_count, required=True)
    p.set_defaults(func=cmd_design)

    for name, func in (("validate", cmd_validate), ("invert", cmd_invert)):
        p = sub.add_parser(name, help=f"{name} a matrix file ('-' for stdin)")
        p.add_argument("--matrix", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("analyze", help="closed-form sweeps")
    snr_opts(p)
    p.add_argument("--mode", choices=["exact", "bound", "no_nc", "throughput"], default="exact")
    p.add_argument("--matrix")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo sweeps")
    snr_opts(p)
    p.add_argument("--scheme", choices=["nc", "no-nc"], default="nc")
    p.add_argument("--matrix")
    p.add_argument("--rounds", type=positive_int, default=DEFAULT_ROUNDS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=positive_int, default=1)
    p.add_argument("--debug", action="store_true", help="check the error decomposition every round")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", help="exhaustive matrix search")
    snr_opts(p)
    p.add_argument("--objective", choices=["bound", "exact"], default="bound")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("figure", help="write one figure's curves as CSV")
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--esn0-db", help="override the figure's grid")
    p.add_argument("--rounds", type=positive_int, default=DEFAULT_ROUNDS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=positive_int, default=1)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.error(str(exc))
    except (InvalidMatrix, ValueError, OSError) as exc:
        print(f"bmnc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
