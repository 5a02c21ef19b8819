"""Game sweeps over (n, rho, policy) grids with resumable per-point storage.

Every grid point (n, rho, policy) is played as an independent batch of
games and written to its own CSV under <outdir>/points/. A finished point
file doubles as its completion marker: reruns load it instead of replaying,
so an interrupted sweep resumes where it stopped. The aggregate games.csv
and summary.csv are rebuilt from the point rows on every run and rows are
canonically sorted, so output bytes depend only on the configuration, never
on scheduling or resume history.

Per-game seeds are spawned from the master seed and the (rho, game index)
pair alone. Policies and board sizes share board seeds at fixed rho, which
makes per-seed comparisons across policies, and slope comparisons across
sizes, paired.

Wall-clock columns are zeroed unless record_timing is set, keeping repeated
runs byte-identical.
"""
from __future__ import annotations

import csv
import math
import multiprocessing
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .board import Boundary, GenerationExhausted, generate_board
from .player import GameRecord, Outcome, Policy, play_game

GAMES_COLUMNS = ("n", "rho", "policy", "seed", "alpha", "max_core",
                 "turns", "outcome", "wall_ms")
SUMMARY_COLUMNS = ("n", "rho", "policy", "games", "alpha_mean", "alpha_se",
                   "maxcore_mean", "maxcore_se", "stuck_fraction",
                   "mean_wall_time", "generation_exhausted")

# Desk-scale preset: small lattices, a coarse density grid, enough games
# for stable means on one core.
DESK_NS = (20, 40)
DESK_GAMES = 50
DESK_RHO_START = 0.025
DESK_RHO_STOP = 0.45
DESK_RHO_STEP = 0.025


def desk_rhos() -> Tuple[float, ...]:
    return float_range(DESK_RHO_START, DESK_RHO_STOP, DESK_RHO_STEP)


def float_range(start: float, stop: float, step: float) -> Tuple[float, ...]:
    """Inclusive range built on micro-unit integers, immune to float drift."""
    si = int(round(start * 1_000_000))
    ei = int(round(stop * 1_000_000))
    di = int(round(step * 1_000_000))
    if di <= 0:
        raise ValueError("step must be positive")
    return tuple(k / 1_000_000 for k in range(si, ei + 1, di))


@dataclass
class SweepConfig:
    ns: Sequence[int] = DESK_NS
    rhos: Sequence[float] = field(default_factory=desk_rhos)
    policies: Sequence[str] = ("sat",)
    games: int = DESK_GAMES
    seed: int = 0
    boundary: Boundary = Boundary.TORUS
    outdir: Optional[Union[str, Path]] = None
    track_cores: bool = True
    time_budget_s: Optional[float] = 60.0
    conflict_budget: int = 1_000_000
    record_timing: bool = False
    workers: Optional[int] = None       # None: MINELAB_WORKERS env, else 1


@dataclass(frozen=True)
class SweepRecord:
    """Aggregate of one (n, rho, policy) point.

    games counts games that produced a playable board; generation failures
    are excluded from every mean and reported in generation_exhausted.
    maxcore fields are None when cores were not tracked. Standard errors
    use the sample standard deviation and are 0.0 for a single game.
    """
    n: int
    rho: float
    policy: str
    games: int
    alpha_mean: float
    alpha_se: float
    maxcore_mean: Optional[float]
    maxcore_se: Optional[float]
    stuck_fraction: float
    mean_wall_time: float
    generation_exhausted: int


def _rho_key(rho: float) -> int:
    return int(round(rho * 1_000_000))


def game_seed(master: int, rho: float, index: int) -> np.random.SeedSequence:
    """Board seed stream for game `index` at density rho.

    Deliberately independent of board size and policy, so the same index
    replays the same stream everywhere rho matches.
    """
    return np.random.SeedSequence(entropy=master,
                                  spawn_key=(_rho_key(rho), index))


def _play_one(task) -> GameRecord:
    (n, rho, policy, master, idx, boundary_value, track_cores,
     time_budget_s, conflict_budget) = task
    boundary = Boundary(boundary_value)
    ss = game_seed(master, rho, idx)
    try:
        board = generate_board(n, rho, ss, boundary)
    except GenerationExhausted:
        return GameRecord(n=n, rho=rho, seed=idx, policy=policy,
                          alpha=float("nan"), max_core=None, turns=0,
                          outcome=Outcome.GENERATION_EXHAUSTED, wall_ms=0.0)
    return play_game(board, policy, track_cores=track_cores,
                     time_budget_s=time_budget_s,
                     conflict_budget=conflict_budget, rho=rho, seed=idx)


# Typed per-game row shared by fresh plays and cached point files.

def _record_to_row(rec: GameRecord, record_timing: bool) -> Dict[str, object]:
    exhausted = rec.outcome is Outcome.GENERATION_EXHAUSTED
    outcome = rec.outcome.value
    if rec.outcome is Outcome.STUCK and rec.timed_out:
        outcome = "stuck_timeout"
    return {
        "n": rec.n,
        "rho": rec.rho,
        "policy": rec.policy,
        "seed": rec.seed,
        "alpha": None if exhausted else rec.alpha,
        "max_core": rec.max_core,
        "turns": rec.turns,
        "outcome": outcome,
        "wall_ms": rec.wall_ms if record_timing else 0.0,
    }


def _fmt_float(x: Optional[float]) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def _fmt_opt_int(x: Optional[int]) -> str:
    return "" if x is None else str(int(x))


def _row_to_cells(row: Dict[str, object]) -> List[str]:
    return [str(row["n"]), _fmt_float(row["rho"]), str(row["policy"]),
            str(row["seed"]), _fmt_float(row["alpha"]),
            _fmt_opt_int(row["max_core"]), str(row["turns"]),
            str(row["outcome"]), _fmt_float(row["wall_ms"])]


def _cells_to_row(cells: Dict[str, str]) -> Dict[str, object]:
    return {
        "n": int(cells["n"]),
        "rho": float(cells["rho"]),
        "policy": cells["policy"],
        "seed": int(cells["seed"]),
        "alpha": float(cells["alpha"]) if cells["alpha"] else None,
        "max_core": int(cells["max_core"]) if cells["max_core"] else None,
        "turns": int(cells["turns"]),
        "outcome": cells["outcome"],
        "wall_ms": float(cells["wall_ms"]),
    }


def _config_token(config: SweepConfig) -> str:
    return ("master={} games={} boundary={} cores={} budget={} conflicts={} "
            "timing={}").format(config.seed, config.games,
                                config.boundary.value,
                                int(config.track_cores),
                                config.time_budget_s, config.conflict_budget,
                                int(config.record_timing))


def _point_path(outdir: Path, n: int, rho: float, policy: str) -> Path:
    safe_policy = policy.replace(":", "-")
    return outdir / "points" / f"point_n{n}_r{_rho_key(rho)}_{safe_policy}.csv"


def _load_point(path: Path, token: str, games: int) -> Optional[List[Dict[str, object]]]:
    if not path.exists():
        return None
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != f"# {token}":
            return None
        reader = csv.DictReader(fh)
        try:
            rows = [_cells_to_row(c) for c in reader]
        except (KeyError, ValueError):
            return None
    if len(rows) != games:
        return None
    return rows


def _store_point(path: Path, token: str, rows: List[Dict[str, object]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(f"# {token}\n")
        writer = csv.writer(fh)
        writer.writerow(GAMES_COLUMNS)
        for row in rows:
            writer.writerow(_row_to_cells(row))
    os.replace(tmp, path)


def _mean_se(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return mean, se


def _aggregate(n: int, rho: float, policy: str,
               rows: List[Dict[str, object]]) -> SweepRecord:
    done = [r for r in rows if r["outcome"] != "generation_exhausted"]
    exhausted = len(rows) - len(done)
    if not done:
        return SweepRecord(n=n, rho=rho, policy=policy, games=0,
                           alpha_mean=float("nan"), alpha_se=float("nan"),
                           maxcore_mean=None, maxcore_se=None,
                           stuck_fraction=float("nan"),
                           mean_wall_time=float("nan"),
                           generation_exhausted=exhausted)
    alpha_mean, alpha_se = _mean_se([r["alpha"] for r in done])
    cores = [r["max_core"] for r in done if r["max_core"] is not None]
    if cores:
        maxcore_mean, maxcore_se = _mean_se([float(c) for c in cores])
    else:
        maxcore_mean = maxcore_se = None
    stuck = sum(1 for r in done if r["outcome"] in ("stuck", "stuck_timeout"))
    wall_mean = float(np.mean([r["wall_ms"] for r in done]))
    return SweepRecord(n=n, rho=rho, policy=policy, games=len(done),
                       alpha_mean=alpha_mean, alpha_se=alpha_se,
                       maxcore_mean=maxcore_mean, maxcore_se=maxcore_se,
                       stuck_fraction=stuck / len(done),
                       mean_wall_time=wall_mean,
                       generation_exhausted=exhausted)


def _resolve_workers(config: SweepConfig) -> int:
    if config.workers is not None:
        return max(1, int(config.workers))
    env = os.environ.get("MINELAB_WORKERS", "")
    return max(1, int(env)) if env.strip() else 1


def _validate(config: SweepConfig) -> None:
    if not config.ns or any(n < 1 for n in config.ns):
        raise ValueError("ns must be a nonempty list of positive sizes")
    if not config.rhos or any(not 0.0 <= r < 1.0 for r in config.rhos):
        raise ValueError("rhos must be a nonempty list of densities in [0, 1)")
    if config.games < 1:
        raise ValueError("games must be at least 1")
    if not config.policies:
        raise ValueError("policies must be nonempty")
    for p in config.policies:
        Policy.parse(p)


def run_sweep(config: SweepConfig) -> List[SweepRecord]:
    """Play (or reload) every grid point and return canonical aggregates.

    With an outdir set, writes <outdir>/games.csv and <outdir>/summary.csv
    and keeps per-point files under <outdir>/points/ for resumption. Point
    files carry the configuration in a header comment; a stale header
    forces a replay of that point.
    """
    _validate(config)
    workers = _resolve_workers(config)
    token = _config_token(config)
    outdir = Path(config.outdir) if config.outdir is not None else None
    points = [(n, rho, str(Policy.parse(p)))
              for n in config.ns for rho in config.rhos
              for p in config.policies]

    pool = None
    if workers > 1:
        pool = multiprocessing.get_context("fork").Pool(workers)
    try:
        all_rows: List[Dict[str, object]] = []
        records: List[SweepRecord] = []
        for n, rho, policy in points:
            rows = None
            path = None
            if outdir is not None:
                path = _point_path(outdir, n, rho, policy)
                rows = _load_point(path, token, config.games)
            if rows is None:
                tasks = [(n, rho, policy, config.seed, idx,
                          config.boundary.value, config.track_cores,
                          config.time_budget_s, config.conflict_budget)
                         for idx in range(config.games)]
                if pool is not None:
                    recs = pool.map(_play_one, tasks, chunksize=1)
                else:
                    recs = [_play_one(t) for t in tasks]
                rows = [_record_to_row(r, config.record_timing) for r in recs]
                if path is not None:
                    _store_point(path, token, rows)
            all_rows.extend(rows)
            records.append(_aggregate(n, rho, policy, rows))
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    all_rows.sort(key=lambda r: (r["n"], r["rho"], r["policy"], r["seed"]))
    records.sort(key=lambda r: (r.n, r.rho, r.policy))
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        write_games_csv(outdir / "games.csv", all_rows)
        write_summary_csv(outdir / "summary.csv", records)
    return records


DEFAULT_COMPARE_POLICIES = ("sat", "kset:1", "kset:2", "kset:3")


def kset_compare(config: SweepConfig) -> List[SweepRecord]:
    """Sweep the SAT policy against bounded k-set policies, seed-paired.

    Board seeds depend only on (master, rho, index), so every policy sees
    the same boards and per-seed alpha differences are paired samples.
    """
    policies = [str(Policy.parse(p)) for p in config.policies] or []
    if not policies or policies == ["sat"]:
        policies = list(DEFAULT_COMPARE_POLICIES)
    if "sat" not in policies:
        policies.insert(0, "sat")
    return run_sweep(replace(config, policies=tuple(policies)))


def model_alpha(P: float, T: float) -> float:
    """Expected fraction of unforced sites after T independent passes at
    forcing probability P: (1 - P) ** T."""
    if not 0.0 <= P <= 1.0:
        raise ValueError("P must lie in [0, 1]")
    if T < 0:
        raise ValueError("T must be nonnegative")
    return (1.0 - P) ** T


def write_games_csv(path: Union[str, Path], rows: List[Dict[str, object]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GAMES_COLUMNS)
        for row in rows:
            writer.writerow(_row_to_cells(row))
    return path


def write_summary_csv(path: Union[str, Path],
                      records: List[SweepRecord]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for r in records:
            writer.writerow([
                str(r.n), _fmt_float(r.rho), r.policy, str(r.games),
                _fmt_float(r.alpha_mean), _fmt_float(r.alpha_se),
                _fmt_float(r.maxcore_mean), _fmt_float(r.maxcore_se),
                _fmt_float(r.stuck_fraction), _fmt_float(r.mean_wall_time),
                str(r.generation_exhausted)])
    return path


def read_games_csv(path: Union[str, Path]) -> List[Dict[str, object]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [_cells_to_row(c) for c in reader]


def read_summary_csv(path: Union[str, Path]) -> List[SweepRecord]:
    out = []
    with open(path, newline="") as fh:
        for c in csv.DictReader(fh):
            out.append(SweepRecord(
                n=int(c["n"]), rho=float(c["rho"]), policy=c["policy"],
                games=int(c["games"]),
                alpha_mean=float(c["alpha_mean"]) if c["alpha_mean"] else float("nan"),
                alpha_se=float(c["alpha_se"]) if c["alpha_se"] else float("nan"),
                maxcore_mean=float(c["maxcore_mean"]) if c["maxcore_mean"] else None,
                maxcore_se=float(c["maxcore_se"]) if c["maxcore_se"] else None,
                stuck_fraction=float(c["stuck_fraction"]) if c["stuck_fraction"] else float("nan"),
                mean_wall_time=float(c["mean_wall_time"]) if c["mean_wall_time"] else float("nan"),
                generation_exhausted=int(c["generation_exhausted"])))
    return out


def parse_sweep_config(text: str,
                       base: Optional[SweepConfig] = None) -> SweepConfig:
    """key=value configuration, one per line, # comments allowed.

    Keys: n, rho, policies, games, seed, boundary, outdir, track_cores,
    time_budget_s, conflict_budget, record_timing, workers. Lists are
    comma-separated; rho entries may be start:stop:step ranges.
    """
    config = replace(base) if base is not None else SweepConfig()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "n":
            config.ns = tuple(int(v) for v in value.split(","))
        elif key == "rho":
            rhos: List[float] = []
            for part in value.split(","):
                if ":" in part:
                    a, b, s = (float(x) for x in part.split(":"))
                    rhos.extend(float_range(a, b, s))
                else:
                    rhos.append(float(part))
            config.rhos = tuple(rhos)
        elif key == "policies":
            config.policies = tuple(v.strip() for v in value.split(","))
        elif key == "games":
            config.games = int(value)
        elif key == "seed":
            config.seed = int(value)
        elif key == "boundary":
            config.boundary = Boundary(value)
        elif key == "outdir":
            config.outdir = Path(value)
        elif key == "track_cores":
            config.track_cores = _parse_bool(value, ln)
        elif key == "time_budget_s":
            config.time_budget_s = None if value == "none" else float(value)
        elif key == "conflict_budget":
            config.conflict_budget = int(value)
        elif key == "record_timing":
            config.record_timing = _parse_bool(value, ln)
        elif key == "workers":
            config.workers = int(value)
        else:
            raise ValueError(f"line {ln}: unknown key {key!r}")
    return config


def _parse_bool(value: str, ln: int) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"line {ln}: expected a boolean, got {value!r}")
