"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own code paths: labels
are recounted with explicit loops, satisfiability is decided by truth
table, frontier placements are enumerated exhaustively, and clusters are
labeled by recursive flood fill. Tests compare library output against
these independent computations.
"""
from __future__ import annotations

import itertools
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import numpy as np
import pytest

from minelab.board import (Board, Boundary, COVERED, GameState, Site,
                           effective_label, flag, frontiers, generate_board,
                           neighbors, parse_board, parse_overlay, reveal)

FIXTURES = Path(__file__).parent / "fixtures"


def load_state(state_name: str, boundary: Boundary = Boundary.OPEN,
               board_name: Optional[str] = None) -> GameState:
    """Parse a fixture overlay, with its ground-truth board when named."""
    board = None
    if board_name is not None:
        board = parse_board((FIXTURES / board_name).read_text())
        boundary = board.boundary
    return parse_overlay((FIXTURES / state_name).read_text(), boundary, board)


def naive_labels(n: int, mines, boundary: Boundary) -> List[List[int]]:
    """Mine-adjacency recount with explicit loops."""
    mset = set(mines)
    lab = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            cnt = 0
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == 0 and dc == 0:
                        continue
                    rr, cc = r + dr, c + dc
                    if boundary is Boundary.TORUS:
                        rr %= n
                        cc %= n
                    elif not (0 <= rr < n and 0 <= cc < n):
                        continue
                    if (rr, cc) in mset:
                        cnt += 1
            lab[r][c] = cnt
    return lab


def eval_clause(clause, assign: Dict[int, bool]) -> bool:
    return any(assign[abs(l)] == (l > 0) for l in clause)


def eval_formula(formula, assign: Dict[int, bool], active=None) -> bool:
    gids = formula.groups.keys() if active is None else active
    return all(eval_clause(c, assign)
               for g in gids for c in formula.groups[g])


def truth_table_models(formula, active=None) -> List[Dict[int, bool]]:
    """Every satisfying assignment over vars 1..num_vars, by enumeration."""
    nv = formula.num_vars
    models = []
    for bits in itertools.product((False, True), repeat=nv):
        assign = {v: bits[v - 1] for v in range(1, nv + 1)}
        if eval_formula(formula, assign, active):
            models.append(assign)
    return models


def consistent_placements(state: GameState) -> List[FrozenSet[Site]]:
    """All outer-frontier mine subsets realizing every effective label."""
    fr = frontiers(state)
    placements = []
    for bits in itertools.product((False, True), repeat=len(fr.outer)):
        mines = {s for s, b in zip(fr.outer, bits) if b}
        ok = True
        for inner in fr.inner:
            need = effective_label(state, inner)
            have = sum(1 for nb in neighbors(inner, state.n, state.boundary)
                       if nb in mines)
            if need != have:
                ok = False
                break
        if ok:
            placements.append(frozenset(mines))
    return placements


def forced_verdicts(state: GameState) -> Dict[Site, bool]:
    """site -> True (mine everywhere) / False (safe everywhere); free
    sites are absent. Raises if the state is inconsistent."""
    placements = consistent_placements(state)
    assert placements, "oracle needs a consistent state"
    fr = frontiers(state)
    out: Dict[Site, bool] = {}
    for s in fr.outer:
        vals = {s in p for p in placements}
        if len(vals) == 1:
            out[s] = vals.pop()
    return out


def random_reachable_state(rng: np.random.Generator, *,
                           max_outer: int = 20,
                           attempts: int = 200) -> Optional[GameState]:
    """A mid-game state reached by sound moves (reveal empties, flag mines).

    Returns None if no attempt produced a state with a nonempty inner
    frontier and 1..max_outer outer sites.
    """
    for _ in range(attempts):
        n = int(rng.integers(5, 10))
        rho = float(rng.uniform(0.08, 0.32))
        try:
            board = generate_board(n, rho, rng, max_attempts=50)
        except Exception:
            continue
        state = GameState(board)
        reveal(state, board.start)
        safe_pool = [(r, c) for r in range(n) for c in range(n)
                     if (r, c) not in board.mines]
        moves = int(rng.integers(0, 6))
        for _ in range(moves):
            covered_safe = [s for s in safe_pool
                            if int(state.status[s]) == COVERED]
            covered_mines = [s for s in sorted(board.mines)
                             if int(state.status[s]) == COVERED]
            if covered_mines and rng.random() < 0.3:
                flag(state, covered_mines[int(rng.integers(len(covered_mines)))])
            elif covered_safe:
                reveal(state, covered_safe[int(rng.integers(len(covered_safe)))])
        fr = frontiers(state)
        if fr.inner and 1 <= len(fr.outer) <= max_outer:
            return state
    return None


def dfs_cluster_oracle(occ: np.ndarray, boundary: Boundary,
                       steps) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Flood-fill labeling with unrolled-coordinate spanning detection."""
    n = occ.shape[0]
    torus = boundary is Boundary.TORUS
    seen: Set[Site] = set()
    sizes, spanning = [], []
    for r0 in range(n):
        for c0 in range(n):
            if not occ[r0, c0] or (r0, c0) in seen:
                continue
            pos = {(r0, c0): (r0, c0)}
            stack = [(r0, c0)]
            seen.add((r0, c0))
            wrap = False
            cells = [(r0, c0)]
            while stack:
                r, c = stack.pop()
                ur, uc = pos[(r, c)]
                for dr, dc in steps:
                    rr, cc = r + dr, c + dc
                    if torus:
                        tr, tc = rr % n, cc % n
                    else:
                        if not (0 <= rr < n and 0 <= cc < n):
                            continue
                        tr, tc = rr, cc
                    if not occ[tr, tc]:
                        continue
                    t = (tr, tc)
                    if t in pos:
                        if torus and pos[t] != (ur + dr, uc + dc):
                            wrap = True
                        continue
                    pos[t] = (ur + dr, uc + dc)
                    seen.add(t)
                    cells.append(t)
                    stack.append(t)
            sizes.append(len(cells))
            if torus:
                if wrap:
                    spanning.append(len(cells))
            else:
                rows = [p for p, _ in cells]
                cols = [q for _, q in cells]
                if ((min(rows) == 0 and max(rows) == n - 1)
                        or (min(cols) == 0 and max(cols) == n - 1)):
                    spanning.append(len(cells))
    return tuple(sorted(sizes)), tuple(sorted(spanning))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260816)
