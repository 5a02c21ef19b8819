"""Ground-truth Minesweeper boards and the player-facing game state.

Sites are (row, col) tuples indexed from the top-left corner. The lattice is
square with side n and either toroidal (wrap-around) or open (clipped)
boundary. Mine labels count mines in the Moore 8-neighborhood.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

Site = Tuple[int, int]

# Status grid cell values.
COVERED = 0
REVEALED = 1
FLAGGED = 2

_OFFSETS = tuple(
    (dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)
)


class Boundary(enum.Enum):
    TORUS = "torus"
    OPEN = "open"


class Status(enum.Enum):
    COVERED = COVERED
    REVEALED = REVEALED
    FLAGGED = FLAGGED


class IllegalMove(Exception):
    """A reveal or flag that violates the game rules."""


class IllegalQuery(Exception):
    """A state query whose precondition does not hold."""


class GenerationExhausted(Exception):
    """Board generation could not satisfy the zero-start requirement."""

    def __init__(self, n: int, rho: float, attempts: int):
        super().__init__(
            f"no zero-labeled empty site after {attempts} boards "
            f"(n={n}, rho={rho})"
        )
        self.n = n
        self.rho = rho
        self.attempts = attempts


class ParseError(Exception):
    """Malformed board or overlay text."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


def neighbors(site: Site, n: int, boundary: Boundary) -> List[Site]:
    """Moore neighborhood of a site, wrapped on a torus, clipped when open.

    Returns a deterministic list in offset order. On a torus the lattice
    side must be at least 3 so that the 8 neighbors are distinct.
    """
    r, c = site
    if not (0 <= r < n and 0 <= c < n):
        raise ValueError(f"site {site} outside an {n}x{n} board")
    if boundary is Boundary.TORUS:
        if n < 3:
            raise ValueError("torus boundary requires n >= 3")
        return [((r + dr) % n, (c + dc) % n) for dr, dc in _OFFSETS]
    out = []
    for dr, dc in _OFFSETS:
        rr, cc = r + dr, c + dc
        if 0 <= rr < n and 0 <= cc < n:
            out.append((rr, cc))
    return out


def _neighbor_sum(grid: np.ndarray, boundary: Boundary) -> np.ndarray:
    """Sum of the 8 neighboring cells for every cell of an integer grid."""
    n = grid.shape[0]
    acc = np.zeros_like(grid)
    if boundary is Boundary.TORUS:
        for dr, dc in _OFFSETS:
            acc += np.roll(np.roll(grid, dr, axis=0), dc, axis=1)
    else:
        padded = np.zeros((n + 2, n + 2), dtype=grid.dtype)
        padded[1:-1, 1:-1] = grid
        for dr, dc in _OFFSETS:
            acc += padded[1 + dr:1 + dr + n, 1 + dc:1 + dc + n]
    return acc


def _neighbor_any(mask: np.ndarray, boundary: Boundary) -> np.ndarray:
    """Boolean grid: does any of the 8 neighbors satisfy the mask."""
    return _neighbor_sum(mask.astype(np.int16), boundary) > 0


class Board:
    """Immutable ground truth: mine set plus derived labels.

    Equality compares (n, boundary, mines); the disclosed zero start is
    bookkeeping for the player and does not participate in equality.
    """

    def __init__(self, n: int, boundary: Boundary, mines: Iterable[Site],
                 start: Optional[Site] = None):
        if n < 1:
            raise ValueError("board side must be positive")
        mines = frozenset((int(r), int(c)) for r, c in mines)
        for r, c in mines:
            if not (0 <= r < n and 0 <= c < n):
                raise ValueError(f"mine {(r, c)} outside an {n}x{n} board")
        self.n = n
        self.boundary = boundary
        self.mines: FrozenSet[Site] = mines
        self.start = start
        grid = np.zeros((n, n), dtype=np.int16)
        for r, c in mines:
            grid[r, c] = 1
        self.labels = _neighbor_sum(grid, boundary)
        self.mine_grid = grid.astype(bool)

    def is_mine(self, site: Site) -> bool:
        return site in self.mines

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Board):
            return NotImplemented
        return (self.n == other.n and self.boundary == other.boundary
                and self.mines == other.mines)

    def __hash__(self) -> int:
        return hash((self.n, self.boundary, self.mines))

    def __repr__(self) -> str:
        return (f"Board(n={self.n}, boundary={self.boundary.value}, "
                f"mines={len(self.mines)})")


def generate_board(n: int, rho: float, seed, boundary: Boundary = Boundary.TORUS,
                   require_zero: bool = True, max_attempts: int = 10_000) -> Board:
    """Place floor(n*n*rho) mines uniformly at random.

    Mine sites are drawn by a partial Fisher-Yates shuffle of the flattened
    lattice, so the mine count is exact. With require_zero, whole boards are
    rejection-sampled until one contains a zero-labeled empty site, and the
    disclosed start is chosen uniformly among those sites.

    Args:
      n: lattice side.
      rho: mine density in [0, 1).
      seed: anything accepted by numpy.random.default_rng.
      boundary: lattice topology.
      require_zero: demand a zero-labeled empty start site.
      max_attempts: rejection budget before GenerationExhausted.

    Raises:
      GenerationExhausted: require_zero unmet within the budget.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    total = n * n
    m = int(np.floor(total * rho))
    if m >= total:
        raise ValueError("board must keep at least one empty site")
    rng = np.random.default_rng(seed)
    attempts = max_attempts if require_zero else 1
    for _ in range(attempts):
        idx = np.arange(total, dtype=np.int64)
        for k in range(m):
            j = int(rng.integers(k, total))
            idx[k], idx[j] = idx[j], idx[k]
        mine_flat = idx[:m]
        grid = np.zeros(total, dtype=np.int16)
        grid[mine_flat] = 1
        grid = grid.reshape(n, n)
        labels = _neighbor_sum(grid, boundary)
        mines = [(int(f) // n, int(f) % n) for f in mine_flat]
        if not require_zero:
            board = Board(n, boundary, mines)
            return board
        zero_mask = (labels == 0) & (grid == 0)
        zeros = np.flatnonzero(zero_mask.ravel())
        if zeros.size:
            pick = int(zeros[int(rng.integers(zeros.size))])
            start = (pick // n, pick % n)
            return Board(n, boundary, mines, start=start)
    raise GenerationExhausted(n, rho, max_attempts)


@dataclass(frozen=True)
class RevealOutcome:
    """Result of one reveal: either a Boom or the set of sites opened."""
    boom: bool
    revealed: FrozenSet[Site]


@dataclass(frozen=True)
class Frontiers:
    """Row-major frontier lists: inner is revealed sites with a covered
    neighbor, outer is covered unflagged sites with a revealed neighbor."""
    inner: Tuple[Site, ...]
    outer: Tuple[Site, ...]


class GameState:
    """Player-facing view of a game in progress.

    Holds the per-site status grid, the labels revealed so far, and a turn
    counter. The ground-truth board is optional: fixture states built from
    an overlay alone support consistency queries but cannot be played.
    """

    def __init__(self, board: Optional[Board] = None, *,
                 n: Optional[int] = None,
                 boundary: Optional[Boundary] = None,
                 status: Optional[np.ndarray] = None,
                 view_labels: Optional[np.ndarray] = None):
        if board is not None:
            n = board.n
            boundary = board.boundary
        if n is None or boundary is None:
            raise ValueError("a GameState needs a board or explicit n and boundary")
        self.board = board
        self.n = n
        self.boundary = boundary
        self.status = (np.full((n, n), COVERED, dtype=np.int8)
                       if status is None else status.astype(np.int8))
        self.view_labels = (np.full((n, n), -1, dtype=np.int16)
                            if view_labels is None else view_labels.astype(np.int16))
        self.turn_counter = 0
        self.exploded = False
        self.boom_site: Optional[Site] = None

    def status_at(self, site: Site) -> Status:
        return Status(int(self.status[site]))

    def revealed_count(self) -> int:
        return int(np.count_nonzero(self.status == REVEALED))

    def flagged_sites(self) -> List[Site]:
        return [tuple(s) for s in np.argwhere(self.status == FLAGGED)]

    def covered_unflagged_count(self) -> int:
        return int(np.count_nonzero(self.status == COVERED))

    def is_won(self) -> bool:
        if self.board is None:
            raise IllegalQuery("no ground-truth board attached")
        return (not self.exploded and
                self.revealed_count() == self.n * self.n - len(self.board.mines))

    def copy(self) -> "GameState":
        dup = GameState(self.board, n=self.n, boundary=self.boundary,
                        status=self.status.copy(),
                        view_labels=self.view_labels.copy())
        dup.turn_counter = self.turn_counter
        dup.exploded = self.exploded
        dup.boom_site = self.boom_site
        return dup


def reveal(state: GameState, site: Site) -> RevealOutcome:
    """Reveal a covered site; zero labels flood-fill their neighborhoods.

    Flagged sites are never opened by the flood (flags are the player's
    bookkeeping and stay put). Returns every site opened by this move, or a
    Boom that makes the state terminal.
    """
    if state.board is None:
        raise IllegalMove("cannot reveal without a ground-truth board")
    if state.exploded:
        raise IllegalMove("game is over")
    st = int(state.status[site])
    if st == REVEALED:
        raise IllegalMove(f"site {site} is already revealed")
    if st == FLAGGED:
        raise IllegalMove(f"site {site} is flagged")
    state.turn_counter += 1
    if state.board.is_mine(site):
        state.exploded = True
        state.boom_site = site
        return RevealOutcome(boom=True, revealed=frozenset())
    opened = set()
    queue = deque([site])
    labels = state.board.labels
    while queue:
        s = queue.popleft()
        if int(state.status[s]) != COVERED:
            continue
        state.status[s] = REVEALED
        state.view_labels[s] = labels[s]
        opened.add(s)
        # Zero labels certify a mine-free neighborhood, so the flood is safe.
        if labels[s] == 0:
            for t in neighbors(s, state.n, state.boundary):
                if int(state.status[t]) == COVERED:
                    queue.append(t)
    return RevealOutcome(boom=False, revealed=frozenset(opened))


def flag(state: GameState, site: Site) -> None:
    """Flag a covered site as a mine claim."""
    if state.exploded:
        raise IllegalMove("game is over")
    st = int(state.status[site])
    if st != COVERED:
        raise IllegalMove(f"site {site} is not covered")
    state.status[site] = FLAGGED


def effective_label(state: GameState, site: Site) -> int:
    """Revealed label minus the number of flagged neighbors."""
    if int(state.status[site]) != REVEALED:
        raise IllegalQuery(f"site {site} is not revealed")
    flags = sum(1 for t in neighbors(site, state.n, state.boundary)
                if int(state.status[t]) == FLAGGED)
    return int(state.view_labels[site]) - flags


def frontiers(state: GameState) -> Frontiers:
    """Inner and outer frontier lists in row-major order."""
    revealed = state.status == REVEALED
    covered = state.status == COVERED
    inner_mask = revealed & _neighbor_any(covered, state.boundary)
    outer_mask = covered & _neighbor_any(revealed, state.boundary)
    inner = tuple((int(r), int(c)) for r, c in np.argwhere(inner_mask))
    outer = tuple((int(r), int(c)) for r, c in np.argwhere(outer_mask))
    return Frontiers(inner=inner, outer=outer)


_BOUNDARY_WORDS = {"torus": Boundary.TORUS, "open": Boundary.OPEN}


def parse_board(text: str) -> Board:
    """Parse the board text format: `N <n> <torus|open>` then n mine rows."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty board text", line=1)
    header = lines[0].split()
    if len(header) != 3 or header[0] != "N":
        raise ParseError("header must be 'N <n> <torus|open>'", line=1)
    try:
        n = int(header[1])
    except ValueError:
        raise ParseError(f"bad board size {header[1]!r}", line=1) from None
    if n < 1:
        raise ParseError("board size must be positive", line=1)
    if header[2] not in _BOUNDARY_WORDS:
        raise ParseError(f"unknown boundary {header[2]!r}", line=1)
    boundary = _BOUNDARY_WORDS[header[2]]
    rows = lines[1:]
    if len(rows) < n:
        raise ParseError(f"expected {n} rows, found {len(rows)}",
                         line=len(lines) + 1)
    for extra in rows[n:]:
        if extra.strip():
            raise ParseError("trailing content after board rows", line=n + 2)
    mines = []
    for i in range(n):
        row = rows[i]
        if len(row) != n:
            raise ParseError(f"row has length {len(row)}, expected {n}",
                             line=i + 2, column=len(row) + 1)
        for j, ch in enumerate(row):
            if ch == "*":
                mines.append((i, j))
            elif ch != ".":
                raise ParseError(f"bad cell {ch!r}", line=i + 2, column=j + 1)
    return Board(n, boundary, mines)


def serialize_board(board: Board) -> str:
    """Inverse of parse_board (the start site is not part of the format)."""
    rows = ["N %d %s" % (board.n, board.boundary.value)]
    for i in range(board.n):
        rows.append("".join("*" if (i, j) in board.mines else "."
                            for j in range(board.n)))
    return "\n".join(rows) + "\n"


def parse_overlay(text: str, boundary: Boundary,
                  board: Optional[Board] = None) -> GameState:
    """Parse a status overlay: '#' covered, 'F' flagged, digits revealed.

    The grid must be square; the boundary comes from the caller (the format
    has no header). When a ground-truth board is supplied it is attached and
    the revealed labels are checked against it.
    """
    rows = [row for row in text.splitlines() if row.strip() != ""]
    if not rows:
        raise ParseError("empty overlay text", line=1)
    n = len(rows)
    status = np.full((n, n), COVERED, dtype=np.int8)
    view = np.full((n, n), -1, dtype=np.int16)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ParseError(f"row has length {len(row)}, expected {n}",
                             line=i + 1, column=len(row) + 1)
        for j, ch in enumerate(row):
            if ch == "#":
                continue
            if ch == "F":
                status[i, j] = FLAGGED
            elif ch.isdigit() and int(ch) <= 8:
                status[i, j] = REVEALED
                view[i, j] = int(ch)
            else:
                raise ParseError(f"bad overlay cell {ch!r}", line=i + 1, column=j + 1)
    if board is not None:
        if board.n != n:
            raise ValueError(f"overlay side {n} does not match board side {board.n}")
        if board.boundary != boundary:
            raise ValueError("overlay boundary does not match board boundary")
        for r, c in map(tuple, np.argwhere(status == REVEALED)):
            if board.is_mine((r, c)):
                raise ValueError(f"revealed site {(r, c)} is mined")
            if int(board.labels[r, c]) != int(view[r, c]):
                raise ValueError(
                    f"label mismatch at {(r, c)}: overlay {int(view[r, c])}, "
                    f"board {int(board.labels[r, c])}")
    return GameState(board, n=n, boundary=boundary, status=status, view_labels=view)


def serialize_overlay(state: GameState) -> str:
    """Inverse of parse_overlay."""
    rows = []
    for i in range(state.n):
        chars = []
        for j in range(state.n):
            st = int(state.status[i, j])
            if st == COVERED:
                chars.append("#")
            elif st == FLAGGED:
                chars.append("F")
            else:
                chars.append(str(int(state.view_labels[i, j])))
        rows.append("".join(chars))
    return "\n".join(rows) + "\n"
