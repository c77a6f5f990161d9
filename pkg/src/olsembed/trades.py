"""Intercalate trades that plant repeated symbols in the product square.

A trade is keyed by two same-symbol cells (r1, c1) and (r2, c2) of the
original partial square, together with the mate-table values a, b at those
cells.  Subject to the switch conditions below, the main product square
contains two intercalates on eight cells spread over eight distinct blocks;
swapping each for its disjoint mate keeps the square latin, keeps it
orthogonal to the mate square, and plants the symbol of cell (r1, c1) at the
top-left-block position of (r2, c2).

Switch conditions for same-symbol triples (r_i, c_i, x), indices i in the
group [2^M]:

    C1  rows strictly increasing,
    C2  columns pairwise distinct,
    C3  the mate values at the cells pairwise distinct,
    C4  r_i ^ r_j != c_i ^ c_k whenever i != j and i != k.

C1-C3 hold automatically for cells drawn from an orthogonal pair; C4 is
forced later by column dilation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

from .core import Cell, LatinSquare, Triple, encode_pair
from .product import SymbolArray


class TradeConditionError(ValueError):
    """A trade was requested for cells violating the switch conditions."""


class TradeOverlapError(RuntimeError):
    """Two trades touched the same cell; upstream disjointness is broken."""


@dataclass(frozen=True)
class TradeSpec:
    """Self-contained record of one double-intercalate switch.

    ``a`` and ``b`` are the mate-table values at (r1, c1) and (r2, c2); they
    are captured eagerly so an overlay can be replayed or audited without the
    table that produced it.
    """

    r1: int
    c1: int
    r2: int
    c2: int
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.r1 == self.r2:
            raise TradeConditionError(f"rows coincide: {self.r1}")
        if self.c1 == self.c2:
            raise TradeConditionError(f"columns coincide: {self.c1}")
        if self.a == self.b:
            raise TradeConditionError(f"mate values coincide: {self.a}")
        if self.r1 ^ self.r2 == self.c1 ^ self.c2:
            raise TradeConditionError(
                f"row xor equals column xor: {self.r1 ^ self.r2}"
            )

    @classmethod
    def from_square(cls, square: LatinSquare, r1: int, c1: int, r2: int, c2: int) -> "TradeSpec":
        """Capture a and b from the completed latin square."""
        return cls(r1, c1, r2, c2, int(square.grid[r1, c1]), int(square.grid[r2, c2]))


class IntercalateEntry(NamedTuple):
    """One of the eight traded cells, in flat coordinates.

    ``source`` is the symbol-array cell whose value occupies this position
    before the trade; the trade replaces it with the value of the spec's
    other cell.
    """

    row: int
    col: int
    source: Cell


def _check_bounds(spec: TradeSpec, exponent: int) -> int:
    size = 1 << exponent
    for name, value in (("r1", spec.r1), ("c1", spec.c1), ("r2", spec.r2),
                        ("c2", spec.c2), ("a", spec.a), ("b", spec.b)):
        if not (0 <= value < size):
            raise ValueError(f"{name} = {value} outside [0, {size})")
    return size


def intercalate_cells(spec: TradeSpec, exponent: int) -> tuple[IntercalateEntry, ...]:
    """The eight cells of the double intercalate, with their current sources.

    The first four entries form the intercalate containing the top-left-block
    cell of (r2, c2); the other four are its companion.  The eight cells are
    pairwise distinct, span four rows, four columns and eight distinct
    2^M x 2^M blocks.
    """
    _check_bounds(spec, exponent)
    rows = (spec.c1 ^ spec.c2, spec.r1 ^ spec.r2, spec.a ^ spec.b)
    gamma, rho, shift = rows
    first = Cell(spec.r1, spec.c1)
    second = Cell(spec.r2, spec.c2)
    row1 = encode_pair(0, spec.r2, exponent)
    row2 = encode_pair(gamma, spec.r1, exponent)
    row3 = encode_pair(gamma ^ shift, spec.r2 ^ shift, exponent)
    row4 = encode_pair(shift, spec.r1 ^ shift, exponent)
    col1 = encode_pair(0, spec.c2, exponent)
    col2 = encode_pair(rho, spec.c1, exponent)
    col3 = encode_pair(rho ^ shift, spec.c2 ^ shift, exponent)
    col4 = encode_pair(shift, spec.c1 ^ shift, exponent)
    entries = (
        IntercalateEntry(row1, col1, second),
        IntercalateEntry(row1, col2, first),
        IntercalateEntry(row2, col1, first),
        IntercalateEntry(row2, col2, second),
        IntercalateEntry(row3, col3, first),
        IntercalateEntry(row3, col4, second),
        IntercalateEntry(row4, col3, second),
        IntercalateEntry(row4, col4, first),
    )
    if len({(e.row, e.col) for e in entries}) != 8:
        raise TradeConditionError("intercalate cells collapsed; conditions violated")
    return entries


def mate_entries(spec: TradeSpec, exponent: int) -> tuple[Triple, ...]:
    """The mate-square symbols at the eight traded cells (flattened pairs).

    Each of the four distinct mate symbols occurs exactly twice, once against
    each of the two traded main-square symbols, which is why the swap
    preserves orthogonality: it merely re-pairs each mate symbol with the
    other partner.
    """
    _check_bounds(spec, exponent)
    cells = intercalate_cells(spec, exponent)
    gamma = spec.c1 ^ spec.c2
    rho = spec.r1 ^ spec.r2
    symbols = (
        encode_pair(0, spec.b, exponent),
        encode_pair(rho, spec.a, exponent),
        encode_pair(gamma, gamma ^ spec.a, exponent),
        encode_pair(gamma ^ rho, gamma ^ spec.b, exponent),
        encode_pair(gamma ^ rho, gamma ^ spec.b, exponent),
        encode_pair(gamma, gamma ^ spec.a, exponent),
        encode_pair(rho, spec.a, exponent),
        encode_pair(0, spec.b, exponent),
    )
    return tuple(Triple(e.row, e.col, s) for e, s in zip(cells, symbols))


def condition_violations(triples: Sequence[Triple], square: LatinSquare) -> list[str]:
    """Diagnostics for the switch conditions C1-C4 on 2 or 3 triples."""
    if len(triples) not in (2, 3):
        raise ValueError(f"expected 2 or 3 triples, got {len(triples)}")
    entries = [Triple(int(r), int(c), int(e)) for r, c, e in triples]
    symbols = {e.symbol for e in entries}
    if len(symbols) != 1:
        raise ValueError(f"triples must share one symbol, got {sorted(symbols)}")
    t = square.order
    for r, c, _ in entries:
        if not (0 <= r < t and 0 <= c < t):
            raise ValueError(f"cell ({r}, {c}) outside the order-{t} square")
    msgs = []
    rows = [e.row for e in entries]
    cols = [e.col for e in entries]
    values = [int(square.grid[e.row, e.col]) for e in entries]
    if any(rows[i] >= rows[i + 1] for i in range(len(rows) - 1)):
        msgs.append(f"C1: rows {rows} not strictly increasing")
    if len(set(cols)) != len(cols):
        msgs.append(f"C2: columns {cols} not distinct")
    if len(set(values)) != len(values):
        msgs.append(f"C3: mate values {values} not distinct")
    k = len(entries)
    for i in range(k):
        for j in range(k):
            for l in range(k):
                if i == j or i == l:
                    continue
                if rows[i] ^ rows[j] == cols[i] ^ cols[l]:
                    msgs.append(
                        f"C4: r{i + 1}^r{j + 1} == c{i + 1}^c{l + 1} "
                        f"== {rows[i] ^ rows[j]}"
                    )
    return msgs


def check_conditions(triples: Sequence[Triple], square: LatinSquare) -> bool:
    """True iff the 2 or 3 same-symbol triples satisfy C1-C4."""
    return not condition_violations(triples, square)


@dataclass(frozen=True, eq=False)
class TradeOverlay:
    """Sparse cell -> symbol replacements accumulated from disjoint trades.

    Keys come in eight-cell groups, one per applied spec, and must stay
    pairwise distinct across trades: a collision falsifies the disjointness
    argument upstream and raises :class:`TradeOverlapError` immediately.
    """

    array: SymbolArray
    cells: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    @classmethod
    def empty(cls, array: SymbolArray) -> "TradeOverlay":
        return cls(array, {})

    def __len__(self) -> int:
        return len(self.cells)

    def get(self, row: int, col: int) -> int | None:
        """Replacement symbol at (row, col), or None if the cell is untouched."""
        entry = self.cells.get((row, col))
        return None if entry is None else entry[1]

    @cached_property
    def _by_row(self) -> dict[int, tuple[tuple[int, int], ...]]:
        index: dict[int, list[tuple[int, int]]] = {}
        for (row, col), (_, new) in self.cells.items():
            index.setdefault(row, []).append((col, new))
        return {row: tuple(sorted(pairs)) for row, pairs in index.items()}

    @cached_property
    def _by_col(self) -> dict[int, tuple[tuple[int, int], ...]]:
        index: dict[int, list[tuple[int, int]]] = {}
        for (row, col), (_, new) in self.cells.items():
            index.setdefault(col, []).append((row, new))
        return {col: tuple(sorted(pairs)) for col, pairs in index.items()}

    def row_entries(self, row: int) -> tuple[tuple[int, int], ...]:
        return self._by_row.get(row, ())

    def col_entries(self, col: int) -> tuple[tuple[int, int], ...]:
        return self._by_col.get(col, ())

    def records(self) -> tuple[tuple[int, int, int, int], ...]:
        """Audit export: (row, col, old symbol, new symbol), sorted by cell."""
        return tuple(
            (row, col, old, new)
            for (row, col), (old, new) in sorted(self.cells.items())
        )


def apply_trade(overlay: TradeOverlay, spec: TradeSpec) -> TradeOverlay:
    """Swap both intercalates of ``spec`` for their disjoint mates.

    Returns a new overlay; the input is unchanged.  After the trade the
    top-left-block cell of (r2, c2) evaluates to the symbol of (r1, c1).
    """
    array = overlay.array
    entries = intercalate_cells(spec, array.exponent)
    value = {
        Cell(spec.r1, spec.c1): int(array.grid[spec.r1, spec.c1]),
        Cell(spec.r2, spec.c2): int(array.grid[spec.r2, spec.c2]),
    }
    merged = dict(overlay.cells)
    for entry in entries:
        key = (entry.row, entry.col)
        if key in merged:
            raise TradeOverlapError(f"cell {key} already traded")
        other = Cell(spec.r2, spec.c2) if entry.source == Cell(spec.r1, spec.c1) else Cell(spec.r1, spec.c1)
        merged[key] = (value[entry.source], value[other])
    return TradeOverlay(array, merged)


def specs_disjoint(first: TradeSpec, second: TradeSpec, exponent: int) -> bool:
    """True iff the two eight-cell configurations share no cell."""
    cells_a = {(e.row, e.col) for e in intercalate_cells(first, exponent)}
    cells_b = {(e.row, e.col) for e in intercalate_cells(second, exponent)}
    return not cells_a & cells_b
