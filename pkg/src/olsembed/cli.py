"""File formats, command surface and streaming verification.

Two document kinds: whitespace-separated text grids (``.`` marks an empty
cell) for humans, and JSON for pair inputs and embedding manifests.  A
manifest records the small tables, the trade list and the reorder parameters
of an embedding, enough to regenerate any cell in O(1), because squares of
order 65536 cannot ship as grids.

Exit codes (scriptability contract):

    0  ok
    2  parse or usage error
    3  a square is not partial latin
    4  the two squares are not an orthogonal pair
    5  latin property violated
    6  orthogonality violated
    7  embedded copy missing (containment violated)

All commands are deterministic; repeated runs produce byte-identical files.
Timing goes to stderr only.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .core import (
    LatinSquare,
    PartialLatinSquare,
    Triple,
    latin_grid_violations,
    orthogonality_violations,
    partial_latin_violations,
)
from .pipeline import (
    EmbeddedPair,
    Embedding,
    EmbeddingReport,
    embed_pair,
    embed_pair_basic,
    final_column_permutation,
)
from .product import DENSE_ORDER_LIMIT, ProductPair, SymbolArray
from .trades import TradeOverlay, TradeSpec, apply_trade, intercalate_cells

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_PARTIAL_LATIN = 3
EXIT_NOT_ORTHOGONAL_PAIR = 4
EXIT_LATIN_VIOLATION = 5
EXIT_ORTHOGONALITY_VIOLATION = 6
EXIT_CONTAINMENT_VIOLATION = 7

MANIFEST_FORMAT = "olsembed-manifest/1"


class GridParseError(ValueError):
    """A grid or pair document could not be parsed."""


# ---------------------------------------------------------------------------
# grid documents


def parse_grid(text: str) -> PartialLatinSquare:
    """Parse a text grid into a partial latin square; ``.`` is an empty cell."""
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise GridParseError("empty grid document")
    order = len(rows)
    triples = []
    for r, tokens in enumerate(rows):
        if len(tokens) != order:
            raise GridParseError(f"line {r + 1}: {len(tokens)} tokens, expected {order}")
        for c, token in enumerate(tokens):
            if token == ".":
                continue
            try:
                symbol = int(token)
            except ValueError:
                raise GridParseError(f"line {r + 1}, column {c + 1}: bad token {token!r}")
            if symbol < 0:
                raise GridParseError(f"line {r + 1}, column {c + 1}: negative symbol")
            triples.append(Triple(r, c, symbol))
    if not triples:
        raise GridParseError("grid document has no filled cells")
    return PartialLatinSquare(order, tuple(triples))


def parse_full_grid(text: str) -> np.ndarray:
    """Parse a text grid with no empty cells into an int array."""
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise GridParseError("empty grid document")
    width = len(rows[0])
    out = np.empty((len(rows), width), dtype=np.int64)
    for r, tokens in enumerate(rows):
        if len(tokens) != width:
            raise GridParseError(f"line {r + 1}: {len(tokens)} tokens, expected {width}")
        for c, token in enumerate(tokens):
            try:
                out[r, c] = int(token)
            except ValueError:
                raise GridParseError(f"line {r + 1}, column {c + 1}: bad token {token!r}")
    return out


def emit_grid(square) -> str:
    """Canonical text form: single spaces, ``.`` for empty, trailing newline."""
    if isinstance(square, PartialLatinSquare):
        rows = square.to_grid()
        lines = [" ".join("." if e is None else str(e) for e in row) for row in rows]
    else:
        grid = square.grid if isinstance(square, LatinSquare) else np.asarray(square)
        lines = [" ".join(str(int(e)) for e in row) for row in grid]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pair documents


def parse_pair(text: str) -> tuple[PartialLatinSquare, PartialLatinSquare]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise GridParseError(f"bad JSON: {err}")
    try:
        order = int(doc["order"])
        p = PartialLatinSquare(order, tuple(Triple(*t) for t in doc["P"]))
        q = PartialLatinSquare(order, tuple(Triple(*t) for t in doc["Q"]))
    except (KeyError, TypeError, ValueError) as err:
        raise GridParseError(f"bad pair document: {err}")
    return p, q


def emit_pair(p: PartialLatinSquare, q: PartialLatinSquare) -> str:
    doc = {
        "order": p.order,
        "P": [[r, c, e] for r, c, e in p.triples],
        "Q": [[r, c, e] for r, c, e in q.triples],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def load_pair(path: str | Path) -> tuple[PartialLatinSquare, PartialLatinSquare]:
    return parse_pair(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# manifests


def emit_manifest(embedding: Embedding) -> str:
    product = embedding.handle.product
    doc = {
        "format": MANIFEST_FORMAT,
        "report": embedding.report.to_dict(),
        "array": product.array.grid.tolist(),
        "square": product.square.grid.tolist(),
        "trades": [
            {"r1": s.r1, "c1": s.c1, "r2": s.r2, "c2": s.c2, "a": s.a, "b": s.b}
            for s in embedding.specs
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def parse_manifest(text: str) -> tuple[EmbeddedPair, EmbeddingReport]:
    """Rebuild the lazy handle from a manifest; fully deterministic."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise GridParseError(f"bad JSON: {err}")
    if doc.get("format") != MANIFEST_FORMAT:
        raise GridParseError(f"unknown manifest format {doc.get('format')!r}")
    try:
        report = EmbeddingReport(
            n=int(doc["report"]["n"]),
            volume=int(doc["report"]["volume"]),
            m=doc["report"]["m"],
            exponent=int(doc["report"]["exponent"]),
            order=int(doc["report"]["order"]),
            bound=int(doc["report"]["bound"]),
            trade_count=int(doc["report"]["trade_count"]),
            fresh_symbols=int(doc["report"]["fresh_symbols"]),
            mode=str(doc["report"]["mode"]),
        )
        array = SymbolArray(np.asarray(doc["array"], dtype=np.int64))
        square = LatinSquare(np.asarray(doc["square"], dtype=np.int64))
        overlay = TradeOverlay.empty(array)
        for item in doc["trades"]:
            spec = TradeSpec(
                int(item["r1"]), int(item["c1"]), int(item["r2"]), int(item["c2"]),
                int(item["a"]), int(item["b"]),
            )
            overlay = apply_trade(overlay, spec)
    except (KeyError, TypeError, ValueError) as err:
        raise GridParseError(f"bad manifest: {err}")
    column_perm = None
    if report.mode == "general":
        column_perm = final_column_permutation(report.n, int(report.m), report.exponent)
    product = ProductPair(array, square, overlay if len(overlay) else None)
    return EmbeddedPair(product, column_perm), report


# ---------------------------------------------------------------------------
# verification engines


def _check_pair(p: PartialLatinSquare, q: PartialLatinSquare, out) -> int:
    for name, square in (("P", p), ("Q", q)):
        problems = partial_latin_violations(square)
        if problems:
            for msg in problems:
                print(f"{name}: {msg}", file=out)
            return EXIT_NOT_PARTIAL_LATIN
    problems = orthogonality_violations(p, q)
    if problems:
        for msg in problems:
            print(msg, file=out)
        return EXIT_NOT_ORTHOGONAL_PAIR
    return EXIT_OK


def verify_dense_embedding(
    p: PartialLatinSquare,
    q: PartialLatinSquare,
    main: np.ndarray,
    mate: np.ndarray,
    out,
) -> int:
    """Check latinness, orthogonality and containment of two dense grids."""
    for name, grid in (("main", main), ("mate", mate)):
        problems = latin_grid_violations(grid)
        if problems:
            for msg in problems:
                print(f"{name} square: latin violation: {msg}", file=out)
            return EXIT_LATIN_VIOLATION
    if main.shape != mate.shape:
        print("squares have different orders", file=out)
        return EXIT_LATIN_VIOLATION
    t = main.shape[0]
    codes = main.astype(np.int64) * t * t + mate.astype(np.int64)
    values, counts = np.unique(codes, return_counts=True)
    if (counts > 1).any():
        code = int(values[counts > 1][0])
        cells = np.argwhere(codes == code)[:2]
        print(
            f"orthogonality violation: pair ({code // (t * t)}, {code % (t * t)}) "
            f"repeats at ({cells[0][0]}, {cells[0][1]}) and ({cells[1][0]}, {cells[1][1]})",
            file=out,
        )
        return EXIT_ORTHOGONALITY_VIOLATION
    for name, partial, grid in (("P", p, main), ("Q", q, mate)):
        for r, c, e in partial.triples:
            if r >= t or c >= t or int(grid[r, c]) != e:
                print(
                    f"containment violation: {name} expects {e} at ({r}, {c})",
                    file=out,
                )
                return EXIT_CONTAINMENT_VIOLATION
    return EXIT_OK


def verify_handle_embedding(
    p: PartialLatinSquare,
    q: PartialLatinSquare,
    handle: EmbeddedPair,
    out,
) -> int:
    """Streaming verification against a lazy handle, O(order) memory.

    Rows and columns are checked one at a time.  Orthogonality is checked
    exactly via the transversal partition of the untraded product square:
    every enumerated cell must carry its transversal's mate symbol (so the
    transversals partition the square), and the traded main-square symbols
    within each transversal must be pairwise distinct.
    """
    order = handle.order
    expected = np.arange(order)
    for i in range(order):
        for name, row in (("main", handle.row_main(i)), ("mate", handle.row_mate(i))):
            if not np.array_equal(np.sort(row), expected):
                print(f"{name} square: latin violation: row {i} is not a permutation", file=out)
                return EXIT_LATIN_VIOLATION
    for j in range(order):
        for name, col in (("main", handle.col_main(j)), ("mate", handle.col_mate(j))):
            if not np.array_equal(np.sort(col), expected):
                print(f"{name} square: latin violation: column {j} is not a permutation", file=out)
                return EXIT_LATIN_VIOLATION
    product = handle.product
    bare = product.without_overlay()
    overlay = product.overlay
    size = product.size
    for z in range(size):
        for d in range(size):
            cells = bare.transversal(z, d)
            mate_symbol = (z << product.exponent) | d
            seen = np.zeros(order, dtype=bool)
            for row, col, symbol in cells:
                if product.cell_mate(row, col) != mate_symbol:
                    print(
                        f"orthogonality violation: cell ({row}, {col}) left its transversal",
                        file=out,
                    )
                    return EXIT_ORTHOGONALITY_VIOLATION
                if overlay is not None:
                    traded = overlay.get(row, col)
                    if traded is not None:
                        symbol = traded
                if seen[symbol]:
                    print(
                        f"orthogonality violation: pair ({symbol}, {mate_symbol}) repeats",
                        file=out,
                    )
                    return EXIT_ORTHOGONALITY_VIOLATION
                seen[symbol] = True
    for name, partial, cell in (("P", p, handle.cell_main), ("Q", q, handle.cell_mate)):
        for r, c, e in partial.triples:
            if r >= order or c >= order or cell(r, c) != e:
                print(f"containment violation: {name} expects {e} at ({r}, {c})", file=out)
                return EXIT_CONTAINMENT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# commands


def cmd_verify_pair(args, out=sys.stdout) -> int:
    try:
        p, q = load_pair(args.pair)
    except (OSError, GridParseError) as err:
        print(f"parse error: {err}", file=out)
        return EXIT_PARSE
    status = _check_pair(p, q, out)
    if status == EXIT_OK:
        print(f"ok order={p.order} volume={p.volume}", file=out)
    return status


def cmd_embed(args, out=sys.stdout) -> int:
    try:
        p, q = load_pair(args.pair)
    except (OSError, GridParseError) as err:
        print(f"parse error: {err}", file=out)
        return EXIT_PARSE
    status = _check_pair(p, q, out)
    if status != EXIT_OK:
        return status
    embedding = embed_pair_basic(p, q) if args.basic else embed_pair(p, q)
    report = embedding.report
    wants_grids = args.out_a or args.out_b
    if wants_grids and report.order > DENSE_ORDER_LIMIT and not args.lazy:
        print(
            f"order {report.order} exceeds the dense limit {DENSE_ORDER_LIMIT}; "
            "pass --lazy and use a manifest",
            file=out,
        )
        return EXIT_PARSE
    if wants_grids and report.order <= DENSE_ORDER_LIMIT:
        main, mate = embedding.dense
        if args.out_a:
            Path(args.out_a).write_text(emit_grid(main), encoding="utf-8")
        if args.out_b:
            Path(args.out_b).write_text(emit_grid(mate), encoding="utf-8")
    if args.manifest:
        Path(args.manifest).write_text(emit_manifest(embedding), encoding="utf-8")
    out.write(report.to_text())
    if args.dump_trades:
        for index, spec in enumerate(embedding.specs):
            entries = intercalate_cells(spec, report.exponent)
            overlay = embedding.handle.product.overlay
            for entry in sorted(entries):
                old, new = overlay.cells[(entry.row, entry.col)]
                print(f"trade {index} {entry.row} {entry.col} {old} {new}", file=out)
    for stage, seconds in embedding.timings.items():
        print(f"timing {stage}={seconds:.6f}s", file=sys.stderr)
    return EXIT_OK


def cmd_verify_embedding(args, out=sys.stdout) -> int:
    try:
        p, q = load_pair(args.pair)
    except (OSError, GridParseError) as err:
        print(f"parse error: {err}", file=out)
        return EXIT_PARSE
    status = _check_pair(p, q, out)
    if status != EXIT_OK:
        return status
    if args.manifest:
        try:
            handle, _ = parse_manifest(Path(args.manifest).read_text(encoding="utf-8"))
        except (OSError, GridParseError) as err:
            print(f"parse error: {err}", file=out)
            return EXIT_PARSE
        status = verify_handle_embedding(p, q, handle, out)
    elif args.square_a and args.square_b:
        try:
            main = parse_full_grid(Path(args.square_a).read_text(encoding="utf-8"))
            mate = parse_full_grid(Path(args.square_b).read_text(encoding="utf-8"))
        except (OSError, GridParseError) as err:
            print(f"parse error: {err}", file=out)
            return EXIT_PARSE
        status = verify_dense_embedding(p, q, main, mate, out)
    else:
        print("pass either --square-a and --square-b or --manifest", file=out)
        return EXIT_PARSE
    if status == EXIT_OK:
        print("ok", file=out)
    return status


def cmd_cell(args, out=sys.stdout) -> int:
    try:
        handle, report = parse_manifest(Path(args.manifest).read_text(encoding="utf-8"))
    except (OSError, GridParseError) as err:
        print(f"parse error: {err}", file=out)
        return EXIT_PARSE
    if not (0 <= args.row < report.order and 0 <= args.col < report.order):
        print(f"cell ({args.row}, {args.col}) outside order {report.order}", file=out)
        return EXIT_PARSE
    if args.square == "a":
        value = handle.cell_main(args.row, args.col)
    else:
        value = handle.cell_mate(args.row, args.col)
    print(value, file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olsembed",
        description="Embed orthogonal partial latin squares into orthogonal latin squares.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify-pair", help="check a pair document for orthogonality")
    p_verify.add_argument("pair", help="JSON pair document")
    p_verify.set_defaults(func=cmd_verify_pair)

    p_embed = sub.add_parser("embed", help="embed a pair and write squares or a manifest")
    p_embed.add_argument("pair", help="JSON pair document")
    p_embed.add_argument("--basic", action="store_true", help="product-only construction")
    p_embed.add_argument("--lazy", action="store_true", help="allow orders above the dense limit")
    p_embed.add_argument("--dump-trades", action="store_true", help="print trade audit records")
    p_embed.add_argument("--out-a", help="write the main square grid here")
    p_embed.add_argument("--out-b", help="write the mate square grid here")
    p_embed.add_argument("--manifest", help="write the lazy-handle manifest here")
    p_embed.set_defaults(func=cmd_embed)

    p_check = sub.add_parser("verify-embedding", help="verify an embedding against its pair")
    p_check.add_argument("pair", help="JSON pair document")
    p_check.add_argument("--square-a", help="main square grid file")
    p_check.add_argument("--square-b", help="mate square grid file")
    p_check.add_argument("--manifest", help="manifest file instead of grids")
    p_check.set_defaults(func=cmd_verify_embedding)

    p_cell = sub.add_parser("cell", help="evaluate one cell of a manifest")
    p_cell.add_argument("manifest", help="manifest file")
    p_cell.add_argument("row", type=int)
    p_cell.add_argument("col", type=int)
    p_cell.add_argument("square", choices=("a", "b"), help="which square to read")
    p_cell.set_defaults(func=cmd_cell)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
