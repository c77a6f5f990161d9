"""Core types and verification predicates for orthogonal latin square work.

Conventions used across the package:

- rows, columns and symbols are 0-based ints;
- group elements live in ``[0, 2**exponent)`` and multiply by bitwise XOR;
- an index pair ``(hi, lo)`` flattens to ``hi * 2**exponent + lo``, so pairs
  of the form ``(0, e)`` keep the plain value ``e``.

All types are immutable after construction and every predicate is pure, so
callers may verify disjoint row ranges concurrently.  Predicates that answer
a yes/no question have a ``*_violations`` sibling returning human-readable
diagnostics (capped at :data:`MAX_VIOLATIONS`) for debugging.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

MAX_VIOLATIONS = 10


class OrderMismatchError(ValueError):
    """Two squares that must share an order do not."""


class EmptySquareError(ValueError):
    """A partial latin square must contain at least one triple."""


class Cell(NamedTuple):
    row: int
    col: int


class Triple(NamedTuple):
    row: int
    col: int
    symbol: int

    @property
    def cell(self) -> Cell:
        return Cell(self.row, self.col)


def xor_mul(x: int, y: int) -> int:
    """Product in the elementary abelian 2-group: bitwise XOR."""
    return x ^ y


def encode_pair(hi: int, lo: int, exponent: int) -> int:
    """Flatten the index pair ``(hi, lo)`` over ``[2**exponent]`` to an int."""
    size = 1 << exponent
    if not (0 <= hi < size and 0 <= lo < size):
        raise ValueError(f"pair ({hi}, {lo}) out of range for exponent {exponent}")
    return (hi << exponent) | lo


def decode_pair(value: int, exponent: int) -> tuple[int, int]:
    """Inverse of :func:`encode_pair`."""
    size = 1 << exponent
    if not (0 <= value < size * size):
        raise ValueError(f"value {value} out of range for exponent {exponent}")
    return value >> exponent, value & (size - 1)


def _capped(messages: list[str]) -> list[str]:
    if len(messages) > MAX_VIOLATIONS:
        extra = len(messages) - MAX_VIOLATIONS
        return messages[:MAX_VIOLATIONS] + [f"... {extra} further violations suppressed"]
    return messages


@dataclass(frozen=True)
class PartialLatinSquare:
    """A set of (row, col, symbol) triples with a declared order.

    ``symbol_bound`` defaults to ``order``; internal squares whose repeated
    symbols were split off carry a wider bound.  Triples are normalised to a
    sorted, duplicate-free tuple so iteration order is deterministic.
    """

    order: int
    triples: tuple[Triple, ...]
    symbol_bound: int | None = None

    def __post_init__(self) -> None:
        if int(self.order) < 1:
            raise ValueError(f"order must be positive, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        norm = tuple(sorted({Triple(int(r), int(c), int(e)) for r, c, e in self.triples}))
        if not norm:
            raise EmptySquareError("a partial latin square needs at least one triple")
        object.__setattr__(self, "triples", norm)
        bound = self.order if self.symbol_bound is None else int(self.symbol_bound)
        object.__setattr__(self, "symbol_bound", bound)

    @classmethod
    def from_grid(
        cls, rows: Sequence[Sequence[int | None]], symbol_bound: int | None = None
    ) -> "PartialLatinSquare":
        """Build from a row-major array where ``None`` marks an empty cell."""
        triples = [
            Triple(r, c, e)
            for r, row in enumerate(rows)
            for c, e in enumerate(row)
            if e is not None
        ]
        return cls(len(rows), tuple(triples), symbol_bound)

    @property
    def volume(self) -> int:
        return len(self.triples)

    def cells(self) -> tuple[Cell, ...]:
        return tuple(t.cell for t in self.triples)

    def mapping(self) -> dict[Cell, int]:
        """Cell -> symbol dict (fresh copy; duplicates collapse arbitrarily)."""
        return {t.cell: t.symbol for t in self.triples}

    def symbols(self) -> tuple[int, ...]:
        return tuple(sorted({t.symbol for t in self.triples}))

    def to_grid(self) -> list[list[int | None]]:
        grid: list[list[int | None]] = [[None] * self.order for _ in range(self.order)]
        for r, c, e in self.triples:
            if 0 <= r < self.order and 0 <= c < self.order:
                grid[r][c] = e
        return grid


def partial_latin_violations(square: PartialLatinSquare) -> list[str]:
    """Diagnostics for the partial-latin property, including malformed coords."""
    msgs: list[str] = []
    seen_cell: dict[Cell, int] = {}
    seen_row: dict[tuple[int, int], int] = {}
    seen_col: dict[tuple[int, int], int] = {}
    for r, c, e in square.triples:
        if not (0 <= r < square.order and 0 <= c < square.order):
            msgs.append(f"cell ({r}, {c}) outside the order-{square.order} array")
            continue
        if not (0 <= e < square.symbol_bound):
            msgs.append(f"symbol {e} at ({r}, {c}) exceeds bound {square.symbol_bound}")
            continue
        cell = Cell(r, c)
        if cell in seen_cell:
            msgs.append(f"cell ({r}, {c}) holds both {seen_cell[cell]} and {e}")
        else:
            seen_cell[cell] = e
        if (r, e) in seen_row:
            msgs.append(f"row {r}: symbol {e} repeats (cols {seen_row[r, e]} and {c})")
        else:
            seen_row[r, e] = c
        if (c, e) in seen_col:
            msgs.append(f"col {c}: symbol {e} repeats (rows {seen_col[c, e]} and {r})")
        else:
            seen_col[c, e] = r
    return _capped(msgs)


def is_partial_latin(square: PartialLatinSquare) -> bool:
    return not partial_latin_violations(square)


def orthogonality_violations(p: PartialLatinSquare, q: PartialLatinSquare) -> list[str]:
    """Diagnostics for orthogonality of two partial latin squares.

    Requires equal orders (raising :class:`OrderMismatchError` otherwise);
    any other defect, including either input failing the partial-latin
    property or mismatched filled cells, is reported as a violation.
    """
    if p.order != q.order:
        raise OrderMismatchError(f"orders differ: {p.order} vs {q.order}")
    msgs = [f"first: {m}" for m in partial_latin_violations(p)]
    msgs += [f"second: {m}" for m in partial_latin_violations(q)]
    if msgs:
        return _capped(msgs)
    p_map = p.mapping()
    q_map = q.mapping()
    if set(p_map) != set(q_map):
        for cell in sorted(set(p_map) ^ set(q_map)):
            side = "second" if cell in p_map else "first"
            msgs.append(f"cell ({cell.row}, {cell.col}) empty in the {side} square")
        return _capped(msgs)
    seen: dict[tuple[int, int], Cell] = {}
    for cell in sorted(p_map):
        pair = (p_map[cell], q_map[cell])
        if pair in seen:
            other = seen[pair]
            msgs.append(
                f"symbol pair {pair} repeats at cells "
                f"({other.row}, {other.col}) and ({cell.row}, {cell.col})"
            )
        else:
            seen[pair] = cell
    return _capped(msgs)


def are_orthogonal_partial(p: PartialLatinSquare, q: PartialLatinSquare) -> bool:
    return not orthogonality_violations(p, q)


def latin_grid_violations(grid) -> list[str]:
    """Diagnostics for the latin property of a raw square array."""
    g = np.asarray(grid)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
        return [f"grid has shape {g.shape}, expected square"]
    if not np.issubdtype(g.dtype, np.integer):
        return ["grid holds non-integer entries"]
    t = g.shape[0]
    msgs: list[str] = []
    bad = np.argwhere((g < 0) | (g >= t))
    for r, c in bad[:MAX_VIOLATIONS]:
        msgs.append(f"entry {g[r, c]} at ({r}, {c}) outside [0, {t})")
    if msgs:
        return _capped(msgs)
    expected = np.arange(t)
    for r in np.nonzero((np.sort(g, axis=1) != expected).any(axis=1))[0]:
        values, counts = np.unique(g[r], return_counts=True)
        dup = values[counts > 1][0]
        cols = np.nonzero(g[r] == dup)[0]
        msgs.append(f"row {r}: symbol {dup} repeats (cols {cols[0]} and {cols[1]})")
    for c in np.nonzero((np.sort(g, axis=0) != expected[:, None]).any(axis=0))[0]:
        values, counts = np.unique(g[:, c], return_counts=True)
        dup = values[counts > 1][0]
        rows = np.nonzero(g[:, c] == dup)[0]
        msgs.append(f"col {c}: symbol {dup} repeats (rows {rows[0]} and {rows[1]})")
    return _capped(msgs)


def is_latin_grid(grid) -> bool:
    return not latin_grid_violations(grid)


@dataclass(frozen=True, eq=False)
class LatinSquare:
    """A fully filled order-t square; every row and column is a permutation.

    The constructor validates the latin property eagerly and freezes the
    grid, so any held instance is known-good.  Raw, possibly corrupt arrays
    are diagnosed with :func:`latin_grid_violations` instead.
    """

    grid: np.ndarray

    def __post_init__(self) -> None:
        g = np.array(self.grid, dtype=np.int64)
        problems = latin_grid_violations(g)
        if problems:
            raise ValueError("not a latin square: " + "; ".join(problems))
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @classmethod
    def xor_table(cls, exponent: int) -> "LatinSquare":
        """Operation table of the elementary abelian 2-group on [2**exponent]."""
        size = 1 << exponent
        idx = np.arange(size)
        return cls(idx[:, None] ^ idx[None, :])

    @property
    def order(self) -> int:
        return int(self.grid.shape[0])

    def __getitem__(self, key):
        return self.grid[key]

    @cached_property
    def _left_division(self) -> np.ndarray:
        table = np.empty_like(self.grid)
        rows = np.arange(self.order)
        table[rows[:, None], self.grid] = rows[None, :]
        return table

    def left_divide(self, a: int, target: int) -> int:
        """The unique b with ``self[a][b] == target``."""
        return int(self._left_division[a, target])

    def left_division_table(self) -> np.ndarray:
        """Read-only view of the full left-division table."""
        view = self._left_division.view()
        view.setflags(write=False)
        return view

    def triples(self) -> Iterator[Triple]:
        for r in range(self.order):
            for c in range(self.order):
                yield Triple(r, c, int(self.grid[r, c]))

    def as_partial(self, symbol_bound: int | None = None) -> PartialLatinSquare:
        return PartialLatinSquare(self.order, tuple(self.triples()), symbol_bound)


def orthogonal_grid_violations(a, b) -> list[str]:
    """Diagnostics for pairwise-distinct symbol pairs across two full grids."""
    ga = np.asarray(a)
    gb = np.asarray(b)
    if ga.shape != gb.shape:
        raise OrderMismatchError(f"shapes differ: {ga.shape} vs {gb.shape}")
    t = ga.shape[0]
    codes = ga.astype(np.int64) * t * t + gb.astype(np.int64)
    values, counts = np.unique(codes, return_counts=True)
    msgs: list[str] = []
    for code in values[counts > 1][:MAX_VIOLATIONS]:
        cells = np.argwhere(codes == code)[:2]
        pair = (int(code) // (t * t), int(code) % (t * t))
        msgs.append(
            f"symbol pair {pair} repeats at cells "
            f"({cells[0][0]}, {cells[0][1]}) and ({cells[1][0]}, {cells[1][1]})"
        )
    return _capped(msgs)


def are_orthogonal_latin(a: LatinSquare, b: LatinSquare) -> bool:
    """True iff the ordered symbol pairs over all cells are pairwise distinct."""
    if a.order != b.order:
        raise OrderMismatchError(f"orders differ: {a.order} vs {b.order}")
    return not orthogonal_grid_violations(a.grid, b.grid)


def is_transversal(square: LatinSquare, triples: Iterable[Triple]) -> bool:
    """True iff ``triples`` hit every row, column and symbol exactly once.

    Every triple must actually occur in the square; a missing triple is an
    input error, not a falsified property.
    """
    entries = [Triple(int(r), int(c), int(e)) for r, c, e in triples]
    t = square.order
    for r, c, e in entries:
        if not (0 <= r < t and 0 <= c < t) or int(square.grid[r, c]) != e:
            raise ValueError(f"triple ({r}, {c}, {e}) does not occur in the square")
    if len(entries) != t:
        return False
    rows = {e.row for e in entries}
    cols = {e.col for e in entries}
    syms = {e.symbol for e in entries}
    return len(rows) == len(cols) == len(syms) == t


def _as_injection(mapping, domain: int, codomain: int, name: str) -> np.ndarray:
    if mapping is None:
        if domain > codomain:
            raise ValueError(f"identity {name} needs order {domain} <= {codomain}")
        return np.arange(domain)
    arr = np.asarray([mapping[i] for i in range(domain)] if isinstance(mapping, dict) else mapping)
    if arr.shape != (domain,):
        raise ValueError(f"{name} must map all of [0, {domain})")
    if len(set(arr.tolist())) != domain:
        raise ValueError(f"{name} is not injective")
    if arr.min() < 0 or arr.max() >= codomain:
        raise ValueError(f"{name} leaves [0, {codomain})")
    return arr


def contains(
    partial: PartialLatinSquare,
    square: LatinSquare,
    row_map=None,
    col_map=None,
    sym_map=None,
) -> bool:
    """True iff every mapped triple of ``partial`` occurs in ``square``.

    The three maps must be injections into ``[square.order]``; ``None``
    means the identity embedding (top-left corner, literal symbols).
    """
    rm = _as_injection(row_map, partial.order, square.order, "row_map")
    cm = _as_injection(col_map, partial.order, square.order, "col_map")
    sm = _as_injection(sym_map, partial.symbol_bound, square.order, "sym_map")
    return all(
        int(square.grid[rm[r], cm[c]]) == int(sm[e]) for r, c, e in partial.triples
    )


def _as_permutation(perm, size: int, name: str) -> np.ndarray:
    arr = np.asarray(perm)
    if arr.shape != (size,) or sorted(arr.tolist()) != list(range(size)):
        raise ValueError(f"{name} is not a permutation of [0, {size})")
    return arr


def apply_isotopy(square: LatinSquare, row_perm, col_perm, sym_perm) -> LatinSquare:
    """Relocate rows/columns and relabel symbols; all maps send old -> new."""
    t = square.order
    rp = _as_permutation(row_perm, t, "row_perm")
    cp = _as_permutation(col_perm, t, "col_perm")
    sp = _as_permutation(sym_perm, t, "sym_perm")
    out = np.empty_like(square.grid)
    out[rp[:, None], cp[None, :]] = sp[square.grid]
    return LatinSquare(out)
