"""End-to-end embedding of an orthogonal partial pair into orthogonal squares.

Stages for inputs of order n:

1. pick m with n <= 2^m (smallest, floored at 1) and set M = 2m;
2. dilate columns c -> c * (2^m + 1), which forces switch condition C4
   because row xors stay inside the order-2^m subgroup while distinct
   dilated columns xor into other cosets;
3. split repeated symbols of the first square off onto fresh symbols,
   keeping each symbol's first occurrence;
4. build the symbol array from the split square and complete the second
   square to a latin square of order 2^M with its columns spread onto the
   dilated positions;
5. build the order-2^{2M} product pair and trade every non-first occurrence
   back to its original symbol;
6. reorder columns so the embedded copies sit in the top-left n x n corner.

The final order is 2^{4m} <= 16 n^4.  Everything is deterministic; the only
timing-dependent data lives outside the report so artifacts are
byte-reproducible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

from .completion import embed_pls
from .core import (
    Cell,
    LatinSquare,
    OrderMismatchError,
    PartialLatinSquare,
    Triple,
    apply_isotopy,
    orthogonality_violations,
)
from .product import DENSE_ORDER_LIMIT, ProductPair, build_symbol_array
from .trades import TradeOverlay, TradeSpec, apply_trade, condition_violations


def minimal_group_exponent(n: int) -> int:
    """Smallest m >= 1 with n <= 2^m."""
    if n < 1:
        raise ValueError(f"order must be positive, got {n}")
    return max(1, (n - 1).bit_length())


def dilate_columns(partial: PartialLatinSquare, m: int) -> PartialLatinSquare:
    """Map triples (r, c, e) to (r, c * (2^m + 1), e) at order 2^{2m}.

    Distinct dilated columns xor to values outside the order-2^m subgroup,
    which is exactly what condition C4 needs.
    """
    size = 1 << m
    if partial.order > size:
        raise ValueError(f"order {partial.order} exceeds 2^m = {size}")
    factor = size + 1
    return PartialLatinSquare(
        size * size,
        tuple(Triple(r, c * factor, e) for r, c, e in partial.triples),
        symbol_bound=partial.symbol_bound,
    )


def first_occurrences(partial: PartialLatinSquare) -> dict[int, Cell]:
    """For each symbol, the cell of its minimum-row occurrence."""
    first: dict[int, Cell] = {}
    for r, c, e in partial.triples:  # sorted by (row, col)
        first.setdefault(e, Cell(r, c))
    return first


def split_repeated_symbols(
    partial: PartialLatinSquare, symbol_bound: int
) -> tuple[PartialLatinSquare, dict[int, int]]:
    """Replace every non-first symbol occurrence by a fresh symbol.

    Fresh symbols are drawn ascending from ``partial.symbol_bound`` upward,
    assigned in (row, col) order.  Returns the distinct-symbol square plus a
    map fresh -> original for audit.
    """
    first = first_occurrences(partial)
    used = {e for _, _, e in partial.triples}
    fresh = iter(s for s in range(partial.symbol_bound, symbol_bound) if s not in used)
    replaced: dict[int, int] = {}
    out: list[Triple] = []
    for r, c, e in partial.triples:
        if first[e] == (r, c):
            out.append(Triple(r, c, e))
        else:
            try:
                substitute = next(fresh)
            except StopIteration:
                raise ValueError(f"fresh symbol pool [{partial.symbol_bound}, {symbol_bound}) exhausted")
            replaced[substitute] = e
            out.append(Triple(r, c, substitute))
    split = PartialLatinSquare(partial.order, tuple(out), symbol_bound=symbol_bound)
    return split, replaced


def build_trade_set(
    dilated: PartialLatinSquare, first: dict[int, Cell], square: LatinSquare
) -> list[TradeSpec]:
    """One trade per non-first symbol occurrence, ordered by (symbol, row, col).

    Verifies the switch conditions for every same-symbol pair and triple
    against ``square`` first; a failure aborts with the offending cells,
    which cannot happen after column dilation.
    """
    by_symbol: dict[int, list[Triple]] = {}
    for triple in dilated.triples:
        by_symbol.setdefault(triple.symbol, []).append(triple)
    specs: list[TradeSpec] = []
    for symbol in sorted(by_symbol):
        occurrences = sorted(by_symbol[symbol])  # row-major, rows distinct
        for size in (2, 3):
            for group in combinations(occurrences, size):
                problems = condition_violations(group, square)
                if problems:
                    raise ValueError(
                        f"switch conditions fail for symbol {symbol} at "
                        f"{[(t.row, t.col) for t in group]}: {'; '.join(problems)}"
                    )
        anchor = first[symbol]
        for triple in occurrences:
            if triple.cell != anchor:
                specs.append(
                    TradeSpec.from_square(square, anchor.row, anchor.col, triple.row, triple.col)
                )
    return specs


def _spread_columns(n: int, m: int) -> np.ndarray:
    """Permutation of [2^{2m}] sending column c < n to c * (2^m + 1)."""
    size = 1 << (2 * m)
    factor = (1 << m) + 1
    perm = np.full(size, -1, dtype=np.int64)
    targets = [c * factor for c in range(n)]
    perm[:n] = targets
    rest = iter(sorted(set(range(size)) - set(targets)))
    for src in range(n, size):
        perm[src] = next(rest)
    return perm


def final_column_permutation(n: int, m: int, exponent: int) -> np.ndarray:
    """Permutation of [2^{2M}] gathering the dilated columns into [0, n).

    Source column c * (2^m + 1) (flat index of the pair (0, c * (2^m + 1)))
    moves to position c for c < n; the remaining columns keep their relative
    order.  Applying it to both squares of a pair preserves orthogonality.
    """
    order = 1 << (2 * exponent)
    factor = (1 << m) + 1
    sources = [c * factor for c in range(n)]
    perm = np.full(order, -1, dtype=np.int64)
    for c, src in enumerate(sources):
        perm[src] = c
    rest = iter(range(n, order))
    for src in range(order):
        if perm[src] < 0:
            perm[src] = next(rest)
    return perm


@dataclass(frozen=True)
class EmbeddingReport:
    """Deterministic summary of one embedding run."""

    n: int
    volume: int
    m: int | None
    exponent: int
    order: int
    bound: int
    trade_count: int
    fresh_symbols: int
    mode: str = "general"

    @property
    def bound_ok(self) -> bool:
        return self.order <= self.bound

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "volume": self.volume,
            "m": self.m,
            "exponent": self.exponent,
            "order": self.order,
            "bound": self.bound,
            "bound_ok": self.bound_ok,
            "trade_count": self.trade_count,
            "fresh_symbols": self.fresh_symbols,
            "mode": self.mode,
        }

    def to_text(self) -> str:
        lines = [f"{key}={value}" for key, value in self.to_dict().items()]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class EmbeddedPair:
    """Lazy handle on the finished pair: product squares plus column reorder."""

    product: ProductPair
    column_perm: np.ndarray | None = None

    @property
    def order(self) -> int:
        return self.product.order

    @cached_property
    def _inverse_perm(self) -> np.ndarray | None:
        if self.column_perm is None:
            return None
        inverse = np.empty_like(self.column_perm)
        inverse[self.column_perm] = np.arange(len(self.column_perm))
        return inverse

    def _source_col(self, col: int) -> int:
        if self._inverse_perm is None:
            return col
        return int(self._inverse_perm[col])

    def cell_main(self, row: int, col: int) -> int:
        return self.product.cell_main(row, self._source_col(col))

    def cell_mate(self, row: int, col: int) -> int:
        return self.product.cell_mate(row, self._source_col(col))

    def _reorder(self, values: np.ndarray) -> np.ndarray:
        if self.column_perm is None:
            return values
        out = np.empty_like(values)
        out[self.column_perm] = values
        return out

    def row_main(self, row: int) -> np.ndarray:
        return self._reorder(self.product.row_main(row))

    def row_mate(self, row: int) -> np.ndarray:
        return self._reorder(self.product.row_mate(row))

    def col_main(self, col: int) -> np.ndarray:
        return self.product.col_main(self._source_col(col))

    def col_mate(self, col: int) -> np.ndarray:
        return self.product.col_mate(self._source_col(col))

    def materialize(self) -> tuple[LatinSquare, LatinSquare]:
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


@dataclass(eq=False)
class Embedding:
    """Result bundle: lazy handle, deterministic report, wall-clock timings."""

    handle: EmbeddedPair
    report: EmbeddingReport
    specs: tuple[TradeSpec, ...] = ()
    timings: dict[str, float] = field(default_factory=dict)

    @cached_property
    def dense(self) -> tuple[LatinSquare, LatinSquare]:
        return self.handle.materialize()

    @property
    def main(self) -> LatinSquare:
        return self.dense[0]

    @property
    def mate(self) -> LatinSquare:
        return self.dense[1]


def _validated_pair(p: PartialLatinSquare, q: PartialLatinSquare) -> None:
    if p.order != q.order:
        raise OrderMismatchError(f"orders differ: {p.order} vs {q.order}")
    problems = orthogonality_violations(p, q)
    if problems:
        raise ValueError("inputs are not an orthogonal pair: " + "; ".join(problems))


def embed_pair(p: PartialLatinSquare, q: PartialLatinSquare, m: int | None = None) -> Embedding:
    """Embed the orthogonal partial pair (p, q) at order 2^{4m} <= 16 n^4.

    The embedded copies occupy rows [0, n) x columns [0, n) of both output
    squares with identity symbol maps.
    """
    _validated_pair(p, q)
    n = p.order
    if m is None:
        m = minimal_group_exponent(n)
    elif n > (1 << m):
        raise ValueError(f"m = {m} too small for order {n}")
    exponent = 2 * m
    size = 1 << exponent
    order = size * size
    timings: dict[str, float] = {}

    clock = time.perf_counter()
    dilated_p = dilate_columns(p, m)
    dilated_q = dilate_columns(q, m)
    split, replaced = split_repeated_symbols(dilated_p, order)
    timings["dilate_split"] = time.perf_counter() - clock

    clock = time.perf_counter()
    array = build_symbol_array(split, exponent)
    timings["symbol_array"] = time.perf_counter() - clock

    clock = time.perf_counter()
    base = embed_pls(q, size)
    identity = np.arange(size)
    square = apply_isotopy(base, identity, _spread_columns(n, m), identity)
    timings["complete_mate"] = time.perf_counter() - clock

    clock = time.perf_counter()
    first = first_occurrences(dilated_p)
    specs = build_trade_set(dilated_p, first, square)
    overlay = TradeOverlay.empty(array)
    for spec in specs:
        overlay = apply_trade(overlay, spec)
    timings["trades"] = time.perf_counter() - clock

    handle = EmbeddedPair(
        ProductPair(array, square, overlay),
        final_column_permutation(n, m, exponent),
    )
    report = EmbeddingReport(
        n=n,
        volume=p.volume,
        m=m,
        exponent=exponent,
        order=order,
        bound=16 * n**4,
        trade_count=len(specs),
        fresh_symbols=len(replaced),
        mode="general",
    )
    if not report.bound_ok:
        raise AssertionError(f"order {order} exceeds the bound {report.bound}")
    if report.trade_count != p.volume - len({e for _, _, e in p.triples}):
        raise AssertionError("trade count does not match volume minus distinct symbols")
    # sanity: the dilated copy of q must sit in the completed square verbatim
    for r, c, e in dilated_q.triples:
        if int(square.grid[r, c]) != e:
            raise AssertionError(f"completed square misses cell ({r}, {c})")
    return Embedding(handle, report, tuple(specs), timings)


def embed_pair_basic(
    p: PartialLatinSquare, q: PartialLatinSquare, exponent: int | None = None
) -> Embedding:
    """Product-only embedding for a first square with no repeated symbol.

    Needs 2n <= 2^exponent; the result has order 2^{2 exponent} and contains
    p and q top-left with identity maps, with no trades and no column
    reorder.
    """
    _validated_pair(p, q)
    n = p.order
    symbols = [e for _, _, e in p.triples]
    if len(set(symbols)) != len(symbols):
        raise ValueError("first square repeats a symbol; use embed_pair instead")
    if exponent is None:
        exponent = minimal_group_exponent(2 * n)
    elif 2 * n > (1 << exponent):
        raise ValueError(f"exponent {exponent} too small for 2n = {2 * n}")
    size = 1 << exponent
    timings: dict[str, float] = {}

    clock = time.perf_counter()
    array = build_symbol_array(p, exponent)
    square = embed_pls(q, size)
    timings["build"] = time.perf_counter() - clock

    handle = EmbeddedPair(ProductPair(array, square, None), None)
    report = EmbeddingReport(
        n=n,
        volume=p.volume,
        m=None,
        exponent=exponent,
        order=size * size,
        bound=16 * n**4,
        trade_count=0,
        fresh_symbols=0,
        mode="basic",
    )
    return Embedding(handle, report, (), timings)
