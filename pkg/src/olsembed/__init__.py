"""Embed orthogonal partial latin squares into orthogonal latin squares.

Given an orthogonal pair of partial latin squares of order n, the pipeline
builds a pair of orthogonal latin squares of order 2^{4m} <= 16 n^4
(with 2^m the smallest power of two >= n) containing the inputs in the
top-left corner.  The machinery is exposed piecewise: an XOR-group product
construction, a Hall-matching completion engine for single partial squares,
intercalate trades, and verification predicates for every property involved.
"""

from .completion import (
    BipartiteGraph,
    CompletionError,
    LatinRectangle,
    embed_pls,
    extend_to_rectangle,
    fill_block,
    max_matching,
    ryser_complete,
)
from .core import (
    Cell,
    EmptySquareError,
    LatinSquare,
    OrderMismatchError,
    PartialLatinSquare,
    Triple,
    apply_isotopy,
    are_orthogonal_latin,
    are_orthogonal_partial,
    contains,
    decode_pair,
    encode_pair,
    is_latin_grid,
    is_partial_latin,
    is_transversal,
    latin_grid_violations,
    orthogonal_grid_violations,
    orthogonality_violations,
    partial_latin_violations,
    xor_mul,
)
from .pipeline import (
    EmbeddedPair,
    Embedding,
    EmbeddingReport,
    build_trade_set,
    dilate_columns,
    embed_pair,
    embed_pair_basic,
    final_column_permutation,
    first_occurrences,
    minimal_group_exponent,
    split_repeated_symbols,
)
from .product import DENSE_ORDER_LIMIT, ProductPair, SymbolArray, build_symbol_array
from .trades import (
    IntercalateEntry,
    TradeConditionError,
    TradeOverlapError,
    TradeOverlay,
    TradeSpec,
    apply_trade,
    check_conditions,
    condition_violations,
    intercalate_cells,
    mate_entries,
    specs_disjoint,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "Cell",
    "CompletionError",
    "DENSE_ORDER_LIMIT",
    "EmbeddedPair",
    "Embedding",
    "EmbeddingReport",
    "EmptySquareError",
    "IntercalateEntry",
    "LatinRectangle",
    "LatinSquare",
    "OrderMismatchError",
    "PartialLatinSquare",
    "ProductPair",
    "SymbolArray",
    "TradeConditionError",
    "TradeOverlapError",
    "TradeOverlay",
    "TradeSpec",
    "Triple",
    "apply_isotopy",
    "apply_trade",
    "are_orthogonal_latin",
    "are_orthogonal_partial",
    "build_symbol_array",
    "build_trade_set",
    "check_conditions",
    "condition_violations",
    "contains",
    "decode_pair",
    "dilate_columns",
    "embed_pair",
    "embed_pair_basic",
    "embed_pls",
    "encode_pair",
    "extend_to_rectangle",
    "fill_block",
    "final_column_permutation",
    "first_occurrences",
    "intercalate_cells",
    "is_latin_grid",
    "is_partial_latin",
    "is_transversal",
    "latin_grid_violations",
    "mate_entries",
    "max_matching",
    "minimal_group_exponent",
    "orthogonal_grid_violations",
    "orthogonality_violations",
    "partial_latin_violations",
    "ryser_complete",
    "specs_disjoint",
    "split_repeated_symbols",
    "xor_mul",
]
