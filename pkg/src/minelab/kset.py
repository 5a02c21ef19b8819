"""Polynomial-time k-set search over frontier counting constraints.

Each inner-frontier site i yields the linear constraint sum_j a_ij x_j = e_i
with a_ij = 1 exactly when i borders outer site j. A k-set combination picks
up to k rows and signs (-1)^{b_l}, forms c_j = sum of signed rows and
r = sum of signed labels, and compares r against the extreme values the left
side can take over x in {0,1}^n: when r equals the maximum, every positive
c_j forces x_j = 1 and every negative c_j forces x_j = 0; when r equals the
minimum, the mirror holds.

Enumeration skips combinations that provably add nothing:

 * repeated rows are never picked (opposite signs cancel to 0 = 0, equal
   signs rescale one constraint beyond the ±1 regime);
 * the first sign is fixed positive, since negating every sign swaps the
   min and max cases and forces the same values;
 * by default only connected row sets are visited (rows adjacent when their
   supports share a column). A disconnected combination splits into
   independent blocks, is tight only when every block is tight on its own,
   and then forces exactly what the blocks force, so on consistent systems
   the connected union equals the full union. The full enumeration stays
   available for differential testing via prune_disconnected=False.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .board import COVERED, GameState, Site, effective_label, frontiers, neighbors


@dataclass(frozen=True)
class ConstraintSystem:
    """0/1 incidence rows, effective labels, and the site maps."""
    a: np.ndarray                  # (n_inner, n_outer) of 0/1
    e: np.ndarray                  # (n_inner,)
    row_sites: Tuple[Site, ...]
    col_sites: Tuple[Site, ...]

    @property
    def n_rows(self) -> int:
        return self.a.shape[0]

    @property
    def n_cols(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True, order=True)
class ForcedAssignment:
    col: int
    value: int


def build_constraints(state: GameState) -> ConstraintSystem:
    """Incidence matrix and effective labels for the current frontiers."""
    fr = frontiers(state)
    col_of = {site: j for j, site in enumerate(fr.outer)}
    a = np.zeros((len(fr.inner), len(fr.outer)), dtype=np.int8)
    e = np.zeros(len(fr.inner), dtype=np.int64)
    for i, isite in enumerate(fr.inner):
        for t in neighbors(isite, state.n, state.boundary):
            if int(state.status[t]) == COVERED:
                a[i, col_of[t]] = 1
        e[i] = effective_label(state, isite)
    return ConstraintSystem(a=a, e=e, row_sites=fr.inner, col_sites=fr.outer)


def combine_and_infer(cs: ConstraintSystem, rows: Sequence[int],
                      signs: Sequence[int]) -> List[ForcedAssignment]:
    """Evaluate one signed combination of rows (signs are the b_l bits).

    Returns the assignments forced when the combined label meets the
    combination's attainable maximum or minimum. Repeated rows are allowed
    here (the general multiset form); only the enumerator skips them.
    """
    if len(rows) != len(signs):
        raise ValueError("rows and signs must have equal length")
    c: Dict[int, int] = {}
    r = 0
    for i, b in zip(rows, signs):
        s = -1 if b else 1
        r += s * int(cs.e[i])
        for j in np.flatnonzero(cs.a[i]):
            j = int(j)
            c[j] = c.get(j, 0) + s
    hi = sum(v for v in c.values() if v > 0)
    lo = sum(v for v in c.values() if v < 0)
    if hi == lo:               # all coefficients cancelled, nothing to force
        return []
    out: List[ForcedAssignment] = []
    if r == hi:
        for j in sorted(c):
            if c[j] > 0:
                out.append(ForcedAssignment(j, 1))
            elif c[j] < 0:
                out.append(ForcedAssignment(j, 0))
    elif r == lo:
        for j in sorted(c):
            if c[j] > 0:
                out.append(ForcedAssignment(j, 0))
            elif c[j] < 0:
                out.append(ForcedAssignment(j, 1))
    return out


def _row_adjacency(supports: List[Tuple[int, ...]], n_cols: int) -> List[set]:
    """Rows are adjacent when their supports share a column."""
    by_col: List[List[int]] = [[] for _ in range(n_cols)]
    for i, sup in enumerate(supports):
        for j in sup:
            by_col[j].append(i)
    adj: List[set] = [set() for _ in range(len(supports))]
    for rows in by_col:
        for x in rows:
            for y in rows:
                if x != y:
                    adj[x].add(y)
    return adj


def _connected_subsets(adj: List[set], m: int, k: int) -> Iterator[Tuple[int, ...]]:
    """Every connected row set of size 1..k, each exactly once (ESU scheme)."""
    for root in range(m):
        sub = [root]
        ext = sorted(u for u in adj[root] if u > root)
        yield from _esu(adj, sub, ext, root, k)


def _esu(adj: List[set], sub: List[int], ext: List[int], root: int,
         k: int) -> Iterator[Tuple[int, ...]]:
    yield tuple(sub)
    if len(sub) == k:
        return
    seen_nb = set().union(*(adj[v] for v in sub)) | set(sub)
    for idx, w in enumerate(ext):
        new_ext = ext[idx + 1:] + sorted(
            u for u in adj[w] if u > root and u not in seen_nb)
        sub.append(w)
        yield from _esu(adj, sub, new_ext, root, k)
        sub.pop()


def kset_infer(cs: ConstraintSystem, k: int, *,
               prune_disconnected: bool = True,
               stats: Optional[dict] = None) -> List[ForcedAssignment]:
    """Union of combine_and_infer over all size-<=k combinations and signs.

    Deduplicated and sorted by (col, value). The stats dict, when given,
    receives the number of (row set, sign vector) pairs enumerated under
    the key "evaluated".
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    m = cs.n_rows
    supports: List[Tuple[int, ...]] = [
        tuple(int(j) for j in np.flatnonzero(cs.a[i])) for i in range(m)]
    sizes = [len(s) for s in supports]
    labels = [int(x) for x in cs.e]
    evaluated = 0
    forced: set = set()
    if prune_disconnected:
        subsets: Iterable[Tuple[int, ...]] = _connected_subsets(
            _row_adjacency(supports, cs.n_cols), m, k)
    else:
        import itertools
        subsets = (c for s in range(1, k + 1)
                   for c in itertools.combinations(range(m), s))
    for sub in subsets:
        s = len(sub)
        for bits in range(1 << (s - 1)):      # first sign fixed positive
            evaluated += 1
            r = labels[sub[0]]
            hi_bound = sizes[sub[0]]
            lo_bound = 0
            for t in range(1, s):
                if (bits >> (t - 1)) & 1:
                    r -= labels[sub[t]]
                    lo_bound -= sizes[sub[t]]
                else:
                    r += labels[sub[t]]
                    hi_bound += sizes[sub[t]]
            # Tightness needs r at an attainable extreme; the support sizes
            # bound both extremes, so off-range r can be dropped unevaluated.
            if not (0 <= r <= hi_bound or lo_bound <= r <= 0):
                continue
            c: Dict[int, int] = {}
            for t in range(s):
                delta = -1 if t and (bits >> (t - 1)) & 1 else 1
                for j in supports[sub[t]]:
                    c[j] = c.get(j, 0) + delta
            hi = 0
            lo = 0
            for v in c.values():
                if v > 0:
                    hi += v
                else:
                    lo += v
            if hi == lo:
                continue
            if r == hi:
                for j, v in c.items():
                    if v > 0:
                        forced.add((j, 1))
                    elif v < 0:
                        forced.add((j, 0))
            elif r == lo:
                for j, v in c.items():
                    if v > 0:
                        forced.add((j, 0))
                    elif v < 0:
                        forced.add((j, 1))
    if stats is not None:
        stats["evaluated"] = evaluated
    return [ForcedAssignment(j, v) for j, v in sorted(forced)]
