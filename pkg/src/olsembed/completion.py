"""Constructive completion of partial latin squares at any order t >= 2n.

The classical route: fill the n x n block over [t] row by row, widen it to an
n x t latin rectangle, then append rows until the square is complete.  Every
step reduces to a bipartite matching whose feasibility is guaranteed by
counting (Hall / regularity) as long as t >= 2n, so a matching shortfall here
is an invariant breach and raises :class:`CompletionError` with diagnostics
rather than being retried.

Everything is deterministic: matchings scan vertices in ascending index and
there is no randomness anywhere, so identical inputs give bit-identical
squares.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import (
    LatinSquare,
    PartialLatinSquare,
    partial_latin_violations,
)


class CompletionError(RuntimeError):
    """A matching the theory guarantees could not be found."""


@dataclass(frozen=True)
class BipartiteGraph:
    """Adjacency of a bipartite graph, one sorted neighbour list per left vertex."""

    n_left: int
    n_right: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.n_left:
            raise ValueError("adjacency must list every left vertex")
        for u, neighbours in enumerate(self.adjacency):
            if len(set(neighbours)) != len(neighbours):
                raise ValueError(f"duplicate edge at left vertex {u}")
            for v in neighbours:
                if not (0 <= v < self.n_right):
                    raise ValueError(f"edge ({u}, {v}) leaves the right side")


def max_matching(graph: BipartiteGraph) -> dict[int, int]:
    """Maximum matching as a left -> right dict.

    Augmenting-path search, processing left vertices and neighbour lists in
    ascending order, so the result is a deterministic function of the input.
    """
    match_left = [-1] * graph.n_left
    match_right = [-1] * graph.n_right
    for source in range(graph.n_left):
        if not graph.adjacency[source]:
            continue
        # BFS over alternating paths from the unmatched source.
        parent: dict[int, int] = {}
        queue = deque([source])
        goal = -1
        while queue and goal < 0:
            u = queue.popleft()
            for v in graph.adjacency[u]:
                if v in parent:
                    continue
                parent[v] = u
                if match_right[v] < 0:
                    goal = v
                    break
                queue.append(match_right[v])
        if goal < 0:
            continue
        v = goal
        while v >= 0:
            u = parent[v]
            previous = match_left[u]
            match_left[u] = v
            match_right[v] = u
            v = previous
    return {u: v for u, v in enumerate(match_left) if v >= 0}


def _require_perfect(matching: dict[int, int], wanted: int, stage: str) -> None:
    if len(matching) < wanted:
        missing = [u for u in range(wanted) if u not in matching]
        raise CompletionError(
            f"{stage}: matched {len(matching)} of {wanted}, unmatched left vertices {missing}"
        )


def fill_block(partial: PartialLatinSquare, t: int) -> np.ndarray:
    """Fill the n x n cells with symbols from [t], agreeing with ``partial``.

    Rows are processed top to bottom; each row's empty cells are matched to
    symbols free in both the row and the column.  With t >= 2n every cell
    admits more symbols than the row has holes, so the matching is perfect.
    """
    problems = partial_latin_violations(partial)
    if problems:
        raise ValueError("input is not a partial latin square: " + "; ".join(problems))
    n = partial.order
    if t < 2 * n:
        raise ValueError(f"target order {t} is below 2n = {2 * n}")
    if partial.symbol_bound > t:
        raise ValueError(f"symbols may reach {partial.symbol_bound - 1}, above order {t}")
    block = np.full((n, n), -1, dtype=np.int64)
    for r, c, e in partial.triples:
        block[r, c] = e
    for r in range(n):
        holes = [c for c in range(n) if block[r, c] < 0]
        if not holes:
            continue
        in_row = {int(x) for x in block[r] if x >= 0}
        adjacency = []
        for c in holes:
            in_col = {int(x) for x in block[:, c] if x >= 0}
            adjacency.append(tuple(s for s in range(t) if s not in in_row and s not in in_col))
        matching = max_matching(BipartiteGraph(len(holes), t, tuple(adjacency)))
        _require_perfect(matching, len(holes), f"fill_block row {r}")
        for i, c in enumerate(holes):
            block[r, c] = matching[i]
    return block


@dataclass(frozen=True, eq=False)
class LatinRectangle:
    """k rows of width t: each row a permutation of [t], no column repeats."""

    grid: np.ndarray

    def __post_init__(self) -> None:
        g = np.array(self.grid, dtype=np.int64)
        if g.ndim != 2 or g.shape[0] > g.shape[1]:
            raise ValueError(f"rectangle shape {g.shape} must be k x t with k <= t")
        k, t = g.shape
        if g.min() < 0 or g.max() >= t:
            raise ValueError("rectangle entry outside the symbol range")
        if any(len(set(g[r].tolist())) != t for r in range(k)):
            raise ValueError("rectangle rows must be permutations of [t]")
        if any(len(set(g[:, c].tolist())) != k for c in range(t)):
            raise ValueError("rectangle columns must not repeat symbols")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def rows(self) -> int:
        return int(self.grid.shape[0])

    @property
    def width(self) -> int:
        return int(self.grid.shape[1])


def _validate_block(block: np.ndarray, t: int) -> int:
    b = np.asarray(block)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"block shape {b.shape} must be square")
    n = b.shape[0]
    if b.min() < 0 or b.max() >= t:
        raise ValueError("block entry outside [0, t)")
    if any(len(set(b[r].tolist())) != n for r in range(n)):
        raise ValueError("block repeats a symbol within a row")
    if any(len(set(b[:, c].tolist())) != n for c in range(n)):
        raise ValueError("block repeats a symbol within a column")
    return n


def extend_to_rectangle(block: np.ndarray, t: int) -> LatinRectangle:
    """Widen a repeat-free n x n block over [t] into an n x t latin rectangle.

    One matching per new column.  A plain rows-to-missing-symbols matching
    can paint itself into a corner, so the graph is padded with t - n dummy
    rows absorbing each symbol's slack below the target degree t - j; the
    padded graph is regular, hence has a perfect matching, and symbols at
    full degree are forced onto real rows.  That keeps every later column
    feasible.
    """
    n = _validate_block(block, t)
    if t < 2 * n:
        raise ValueError(f"target order {t} is below 2n = {2 * n}")
    rect = np.full((n, t), -1, dtype=np.int64)
    rect[:, :n] = block
    missing = [sorted(set(range(t)) - set(block[r].tolist())) for r in range(n)]
    degree = [0] * t  # number of rows still missing each symbol
    for r in range(n):
        for s in missing[r]:
            degree[s] += 1
    dummies = t - n
    for j in range(n, t):
        target = t - j
        slack = [target - degree[s] for s in range(t)]
        if min(slack) < 0:
            raise CompletionError(f"extend column {j}: symbol degree above {target}")
        dummy_adj: list[set[int]] = [set() for _ in range(dummies)]
        slot = 0
        for s in range(t):
            for _ in range(slack[s]):
                dummy_adj[slot // target].add(s)
                slot += 1
        adjacency = tuple(tuple(missing[r]) for r in range(n)) + tuple(
            tuple(sorted(d)) for d in dummy_adj
        )
        matching = max_matching(BipartiteGraph(n + dummies, t, adjacency))
        _require_perfect(matching, n + dummies, f"extend column {j}")
        for r in range(n):
            s = matching[r]
            rect[r, j] = s
            missing[r].remove(s)
            degree[s] -= 1
    return LatinRectangle(rect)


def ryser_complete(rectangle: LatinRectangle) -> LatinSquare:
    """Append rows to a k x t latin rectangle until it is an order-t square.

    For each new row the columns-to-missing-symbols graph is (t - k)-regular,
    so a perfect matching exists and regularity is preserved.
    """
    k, t = rectangle.rows, rectangle.width
    grid = np.full((t, t), -1, dtype=np.int64)
    grid[:k] = rectangle.grid
    missing = [sorted(set(range(t)) - set(grid[:k, c].tolist())) for c in range(t)]
    for i in range(k, t):
        adjacency = tuple(tuple(m) for m in missing)
        matching = max_matching(BipartiteGraph(t, t, adjacency))
        _require_perfect(matching, t, f"ryser row {i}")
        for c in range(t):
            s = matching[c]
            grid[i, c] = s
            missing[c].remove(s)
    return LatinSquare(grid)


def embed_pls(partial: PartialLatinSquare, t: int) -> LatinSquare:
    """Embed a partial latin square of order n top-left into an order-t square.

    Requires t >= 2n.  The result agrees with ``partial`` on its filled cells
    under identity row/column/symbol maps.
    """
    block = fill_block(partial, t)
    rectangle = extend_to_rectangle(block, t)
    return ryser_complete(rectangle)
