"""Product construction of an orthogonal square pair from two small tables.

Given a 2^M x 2^M array holding every symbol of [2^{2M}] exactly once and a
latin square of order 2^M, the pair of order-2^{2M} squares defined cellwise
by

    main[(p, r), (q, c)] = array[q ^ r][p ^ c]
    mate[(p, r), (q, c)] = (p ^ q, p ^ square[q ^ r][p ^ c])   (pair flattened)

is a pair of orthogonal latin squares.  The main square splits into 2^{2M}
disjoint transversals, one per mate symbol (z, d); that partition is both the
orthogonality proof and the hook for the intercalate trades that later plant
repeated symbols in the top-left block.

Cells evaluate in O(1) from the formulas, so the pair exists lazily at any
size; dense materialisation is refused above :data:`DENSE_ORDER_LIMIT`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from .core import Cell, LatinSquare, PartialLatinSquare, Triple, partial_latin_violations

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from .trades import TradeOverlay

DENSE_ORDER_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class SymbolArray:
    """2^M x 2^M array holding each symbol of [2^{2M}] exactly once."""

    grid: np.ndarray

    def __post_init__(self) -> None:
        g = np.array(self.grid, dtype=np.int64)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"symbol array shape {g.shape} must be square")
        size = g.shape[0]
        if size < 1 or size & (size - 1):
            raise ValueError(f"symbol array size {size} must be a power of two")
        flat = g.ravel()
        if flat.min() < 0 or flat.max() >= size * size or len(np.unique(flat)) != size * size:
            raise ValueError("symbol array must hold each symbol of [size^2] exactly once")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def size(self) -> int:
        return int(self.grid.shape[0])

    @property
    def exponent(self) -> int:
        return self.size.bit_length() - 1

    @property
    def symbol_bound(self) -> int:
        return self.size * self.size

    @cached_property
    def _positions(self) -> np.ndarray:
        inverse = np.empty(self.symbol_bound, dtype=np.int64)
        inverse[self.grid.ravel()] = np.arange(self.symbol_bound)
        return inverse

    def locate(self, symbol: int) -> Cell:
        """The unique cell holding ``symbol``."""
        if not (0 <= symbol < self.symbol_bound):
            raise ValueError(f"symbol {symbol} outside [0, {self.symbol_bound})")
        flat = int(self._positions[symbol])
        return Cell(flat // self.size, flat % self.size)


def build_symbol_array(partial: PartialLatinSquare, exponent: int) -> SymbolArray:
    """Place a distinct-symbol partial square, then fill row-major ascending.

    The input's cells are kept verbatim; every still-empty cell receives the
    lowest unused symbol in row-major order, making the array a deterministic
    function of the input.
    """
    size = 1 << exponent
    bound = size * size
    problems = partial_latin_violations(partial)
    if problems:
        raise ValueError("input is not a partial latin square: " + "; ".join(problems))
    grid = np.full((size, size), -1, dtype=np.int64)
    used = set()
    for r, c, e in partial.triples:
        if r >= size or c >= size:
            raise ValueError(f"cell ({r}, {c}) outside the {size} x {size} array")
        if e >= bound:
            raise ValueError(f"symbol {e} outside [0, {bound})")
        if e in used:
            raise ValueError(f"symbol {e} occurs twice in the input")
        grid[r, c] = e
        used.add(e)
    fresh = iter(s for s in range(bound) if s not in used)
    for r in range(size):
        for c in range(size):
            if grid[r, c] < 0:
                grid[r, c] = next(fresh)
    return SymbolArray(grid)


@dataclass(frozen=True, eq=False)
class ProductPair:
    """The orthogonal square pair of order 2^{2M}, evaluated lazily per cell.

    ``overlay`` (if any) is a sparse cell -> symbol replacement map recording
    intercalate trades; it affects only the main square.
    """

    array: SymbolArray
    square: LatinSquare
    overlay: "TradeOverlay | None" = None

    def __post_init__(self) -> None:
        if self.array.size != self.square.order:
            raise ValueError(
                f"array size {self.array.size} and square order {self.square.order} differ"
            )
        if self.overlay is not None and self.overlay.array is not self.array:
            raise ValueError("overlay was built against a different symbol array")

    @property
    def size(self) -> int:
        return self.array.size

    @property
    def exponent(self) -> int:
        return self.array.exponent

    @property
    def order(self) -> int:
        return self.size * self.size

    def with_overlay(self, overlay: "TradeOverlay | None") -> "ProductPair":
        return ProductPair(self.array, self.square, overlay)

    def without_overlay(self) -> "ProductPair":
        return ProductPair(self.array, self.square, None)

    def _split(self, index: int) -> tuple[int, int]:
        if not (0 <= index < self.order):
            raise IndexError(f"index {index} outside [0, {self.order})")
        return index >> self.exponent, index & (self.size - 1)

    def cell_main(self, row: int, col: int) -> int:
        """Main-square symbol at flat (row, col), honouring the overlay."""
        if self.overlay is not None:
            traded = self.overlay.get(row, col)
            if traded is not None:
                return traded
        p, r = self._split(row)
        q, c = self._split(col)
        return int(self.array.grid[q ^ r, p ^ c])

    def cell_mate(self, row: int, col: int) -> int:
        """Mate-square symbol (a flattened pair); never affected by trades."""
        p, r = self._split(row)
        q, c = self._split(col)
        return ((p ^ q) << self.exponent) | (p ^ int(self.square.grid[q ^ r, p ^ c]))

    def _col_parts(self) -> tuple[np.ndarray, np.ndarray]:
        cols = np.arange(self.order)
        return cols >> self.exponent, cols & (self.size - 1)

    def row_main(self, row: int) -> np.ndarray:
        p, r = self._split(row)
        q, c = self._col_parts()
        out = self.array.grid[q ^ r, p ^ c]
        if self.overlay is not None:
            out = out.copy()
            for col, symbol in self.overlay.row_entries(row):
                out[col] = symbol
        return out

    def row_mate(self, row: int) -> np.ndarray:
        p, r = self._split(row)
        q, c = self._col_parts()
        return ((p ^ q) << self.exponent) | (p ^ self.square.grid[q ^ r, p ^ c])

    def col_main(self, col: int) -> np.ndarray:
        q, c = self._split(col)
        p, r = self._col_parts()
        out = self.array.grid[q ^ r, p ^ c]
        if self.overlay is not None:
            out = out.copy()
            for row, symbol in self.overlay.col_entries(col):
                out[row] = symbol
        return out

    def col_mate(self, col: int) -> np.ndarray:
        q, c = self._split(col)
        p, r = self._col_parts()
        return ((p ^ q) << self.exponent) | (p ^ self.square.grid[q ^ r, p ^ c])

    def materialize(self) -> tuple[LatinSquare, LatinSquare]:
        """Dense (main, mate) squares; refuses orders above the dense limit."""
        if self.order > DENSE_ORDER_LIMIT:
            raise ValueError(
                f"order {self.order} exceeds the dense limit {DENSE_ORDER_LIMIT}; "
                "use cell/row access instead"
            )
        main = np.empty((self.order, self.order), dtype=np.int64)
        mate = np.empty_like(main)
        for i in range(self.order):
            main[i] = self.row_main(i)
            mate[i] = self.row_mate(i)
        return LatinSquare(main), LatinSquare(mate)

    def transversal(self, z: int, d: int) -> tuple[Triple, ...]:
        """The cells of the untraded main square paired with mate symbol (z, d).

        For each row-half p (so q = p ^ z) and each r, the column low part
        solves to c = p ^ (square left-division of q ^ r into p ^ d), giving
        exactly ``order`` cells: one per row, one per column, all symbols
        distinct.  Stated for the untraded square, so a non-empty overlay is
        an error.
        """
        if self.overlay is not None and len(self.overlay) > 0:
            raise ValueError("transversals are defined on the untraded square")
        size = self.size
        if not (0 <= z < size and 0 <= d < size):
            raise ValueError(f"mate symbol ({z}, {d}) outside [0, {size})^2")
        division = self.square.left_division_table()
        p = np.arange(size)[:, None]
        r = np.arange(size)[None, :]
        q = p ^ z
        c = p ^ division[q ^ r, np.broadcast_to(p ^ d, (size, size))]
        rows = ((p << self.exponent) | r).ravel()
        cols = ((q << self.exponent) | c).ravel()
        symbols = self.array.grid[(q ^ r).ravel(), (p ^ c).ravel()]
        cells = sorted(zip(rows.tolist(), cols.tolist(), symbols.tolist()))
        return tuple(Triple(r_, c_, e_) for r_, c_, e_ in cells)
