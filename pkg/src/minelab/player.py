"""Play full games by logical inference and record the α metric.

One pass builds the frontier formula once, then tests every outer variable
both ways: F ∧ x unsatisfiable means the site is safe, F ∧ ¬x unsatisfiable
means it is a mine. All inferences from a pass are applied together (flags
first, then reveals) before the frontiers are recomputed. The game ends when
every mine is flagged or a pass yields nothing.

Witness reuse keeps passes cheap: every model seen with all groups active
fixes a value for each variable it assigns, and a variable already witnessed
with value b skips the "forced to not-b" query, since that query is
satisfiable. Models found inside core extraction activate only a subset of
groups and are never used as witnesses.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Union

from .board import (Board, COVERED, GameState, Site, flag, frontiers, reveal)
from .cnf import InfeasibleLabel, build_formula
from .gmus import GmusResult, extract_gmus, max_core_size
from .kset import build_constraints, kset_infer
from .sat import ResourceLimit, Solver


class Verdict(enum.Enum):
    SAFE = "safe"
    MINE = "mine"


class Outcome(enum.Enum):
    ALL_MINES_FLAGGED = "all_mines_flagged"
    STUCK = "stuck"
    GENERATION_EXHAUSTED = "generation_exhausted"


@dataclass(frozen=True)
class Inference:
    site: Site
    verdict: Verdict
    core: Optional[GmusResult] = None


@dataclass(frozen=True)
class Policy:
    """Inference policy: full SAT tests or bounded k-set search."""
    kind: str               # "sat" or "kset"
    k: int = 0

    @staticmethod
    def parse(text: Union[str, "Policy"]) -> "Policy":
        if isinstance(text, Policy):
            return text
        if text == "sat":
            return Policy("sat")
        if text.startswith("kset:"):
            k = int(text.split(":", 1)[1])
            if k < 1:
                raise ValueError("kset arity must be >= 1")
            return Policy("kset", k)
        raise ValueError(f"unknown policy {text!r}, expected sat or kset:K")

    def __str__(self) -> str:
        return "sat" if self.kind == "sat" else f"kset:{self.k}"


@dataclass(frozen=True)
class GameRecord:
    """Outcome of one played game.

    alpha is the fraction of mines flagged (1 when there are no mines);
    max_core is the largest GMUS size met by the SAT policy, None when cores
    were not tracked or the policy was k-set; turns counts inference passes
    that applied at least one move.
    """
    n: int
    rho: float
    seed: Optional[int]
    policy: str
    alpha: float
    max_core: Optional[int]
    turns: int
    outcome: Outcome
    wall_ms: float
    timed_out: bool = False


def infer_step(state: GameState, *, extract_cores: bool = True,
               conflict_budget: int = 1_000_000) -> List[Inference]:
    """All forced verdicts for the current frontiers, row-major order.

    Builds the formula once, reuses one solver (and its learned clauses)
    for every query, and attaches a minimal core to each inference when
    extract_cores is set.
    """
    fr = frontiers(state)
    if not fr.inner:
        return []
    formula = build_formula(state)
    solver = Solver(formula, conflict_budget=conflict_budget)
    base = solver.solve()
    if not base.sat:
        raise ValueError("state is inconsistent, no inference is meaningful")
    nv = formula.num_vars
    seen_true = bytearray(nv + 1)
    seen_false = bytearray(nv + 1)

    def witness(model):
        for v in range(1, nv + 1):
            if model[v]:
                seen_true[v] = 1
            else:
                seen_false[v] = 1

    witness(base.model)
    inferences: List[Inference] = []
    for v in range(1, nv + 1):
        site = formula.var_sites[v - 1]
        if not seen_true[v]:
            res = solver.solve(None, [v])
            if res.sat:
                witness(res.model)
            else:
                core = None
                if extract_cores:
                    core = extract_gmus(
                        formula, v, solver=solver,
                        initial_core=_groups_of(solver, res.core))
                inferences.append(Inference(site, Verdict.SAFE, core))
                continue
        if not seen_false[v]:
            res = solver.solve(None, [-v])
            if res.sat:
                witness(res.model)
            else:
                core = None
                if extract_cores:
                    core = extract_gmus(
                        formula, -v, solver=solver,
                        initial_core=_groups_of(solver, res.core))
                inferences.append(Inference(site, Verdict.MINE, core))
    return inferences


def _groups_of(solver: Solver, core_lits) -> List[int]:
    back = {sel: g for g, sel in solver.selector_of.items()}
    return sorted(back[l] for l in core_lits if l in back)


def consistency_check(state: GameState) -> bool:
    """Does any mine placement realize every effective label."""
    fr = frontiers(state)
    if not fr.inner:
        return True
    try:
        formula = build_formula(state)
    except InfeasibleLabel:
        return False
    return Solver(formula).solve().sat


def play_game(board: Board, policy: Union[str, Policy] = "sat", *,
              track_cores: bool = True,
              time_budget_s: Optional[float] = 60.0,
              conflict_budget: int = 1_000_000,
              rho: Optional[float] = None,
              seed: Optional[int] = None,
              validate: bool = True,
              trace_fn: Optional[Callable[[int, List[Inference]], None]] = None) -> GameRecord:
    """Play one game from the board's disclosed zero start.

    Loops inference passes, flagging inferred mines and revealing inferred
    safe sites, until all mines are flagged or a pass finds nothing (Stuck).
    A pass that starts after the time budget has elapsed is not run and the
    game records Stuck with timed_out set. The conflict budget, if ever
    exceeded, also ends the game as Stuck.

    rho and seed are metadata echoed into the record; rho defaults to the
    board's realized mine fraction. trace_fn, when given, is called after
    every inference pass (including the final empty one) with the pass
    number and its inferences.
    """
    policy = Policy.parse(policy)
    if board.start is None:
        raise ValueError("board has no disclosed zero start")
    t0 = time.perf_counter()
    state = GameState(board)
    out = reveal(state, board.start)
    assert not out.boom, "the disclosed start is guaranteed empty"
    n_mines = len(board.mines)
    mines = board.mines
    rho_val = rho if rho is not None else n_mines / (board.n * board.n)
    flags = 0
    turns = 0
    cores: List[GmusResult] = []
    timed_out = False
    outcome = Outcome.STUCK
    while True:
        if flags == n_mines:
            outcome = Outcome.ALL_MINES_FLAGGED
            break
        if time_budget_s is not None and time.perf_counter() - t0 > time_budget_s:
            timed_out = True
            break
        try:
            if policy.kind == "sat":
                inferences = infer_step(state, extract_cores=track_cores,
                                        conflict_budget=conflict_budget)
            else:
                cs = build_constraints(state)
                inferences = [
                    Inference(cs.col_sites[fa.col],
                              Verdict.MINE if fa.value else Verdict.SAFE)
                    for fa in kset_infer(cs, policy.k)]
        except ResourceLimit:
            break
        if trace_fn is not None:
            trace_fn(turns + 1, inferences)
        if not inferences:
            break
        for inf in inferences:
            if inf.verdict is Verdict.MINE:
                if validate:
                    assert inf.site in mines, f"unsound mine verdict at {inf.site}"
                flag(state, inf.site)
                flags += 1
                if inf.core is not None:
                    cores.append(inf.core)
            elif validate:
                assert inf.site not in mines, f"unsound safe verdict at {inf.site}"
        for inf in inferences:
            if inf.verdict is Verdict.SAFE:
                if int(state.status[inf.site]) == COVERED:
                    res = reveal(state, inf.site)
                    assert not res.boom
                if inf.core is not None:
                    cores.append(inf.core)
        turns += 1
    wall_ms = (time.perf_counter() - t0) * 1000.0
    alpha = 1.0 if n_mines == 0 else flags / n_mines
    max_core: Optional[int] = None
    if policy.kind == "sat" and track_cores:
        max_core = max_core_size(cores)
    return GameRecord(n=board.n, rho=rho_val, seed=seed, policy=str(policy),
                      alpha=alpha, max_core=max_core, turns=turns,
                      outcome=outcome, wall_ms=wall_ms, timed_out=timed_out)
