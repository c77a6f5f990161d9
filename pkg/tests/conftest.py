"""Shared fixtures and independent generators for the test suite.

The random generators here are deliberately separate from the library code
they exercise: latin squares come from a Jacobson-Matthews walk on the
incidence cube, partial squares from rejection-free greedy placement, and
orthogonal pairs from randomised joint placement.  Everything is seeded, so
the suite is reproducible.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np
import pytest

from olsembed import PartialLatinSquare, Triple

FIXTURES = Path(__file__).parent / "fixtures"


def load_reference_pair() -> tuple[PartialLatinSquare, PartialLatinSquare]:
    doc = json.loads((FIXTURES / "pair_order4.json").read_text())
    p = PartialLatinSquare(doc["order"], tuple(Triple(*t) for t in doc["P"]))
    q = PartialLatinSquare(doc["order"], tuple(Triple(*t) for t in doc["Q"]))
    return p, q


@pytest.fixture(scope="session")
def reference_pair() -> tuple[PartialLatinSquare, PartialLatinSquare]:
    """The bundled order-4 orthogonal partial pair (volume 11)."""
    return load_reference_pair()


def random_latin_grid(order: int, rng: random.Random) -> np.ndarray:
    """Uniform-ish random latin square via Jacobson-Matthews moves.

    Independent of the library's completion machinery on purpose: it serves
    as the generator for oracle inputs.
    """
    cube = np.zeros((order, order, order), dtype=np.int8)
    for i in range(order):
        for j in range(order):
            cube[i, j, (i + j) % order] = 1
    proper = True
    improper = (0, 0, 0)
    steps = 0
    min_steps = max(1, order**3)
    while not proper or steps < min_steps:
        if proper:
            while True:
                t = (rng.randrange(order), rng.randrange(order), rng.randrange(order))
                if cube[t] == 0:
                    break
            c = (
                int(np.nonzero(cube[:, t[1], t[2]] == 1)[0][0]),
                int(np.nonzero(cube[t[0], :, t[2]] == 1)[0][0]),
                int(np.nonzero(cube[t[0], t[1], :] == 1)[0][0]),
            )
        else:
            t = improper
            c = (
                int(rng.choice(np.nonzero(cube[:, t[1], t[2]] == 1)[0])),
                int(rng.choice(np.nonzero(cube[t[0], :, t[2]] == 1)[0])),
                int(rng.choice(np.nonzero(cube[t[0], t[1], :] == 1)[0])),
            )
        cube[t[0], t[1], t[2]] += 1
        cube[t[0], c[1], c[2]] += 1
        cube[c[0], c[1], t[2]] += 1
        cube[c[0], t[1], c[2]] += 1
        cube[t[0], t[1], c[2]] -= 1
        cube[t[0], c[1], t[2]] -= 1
        cube[c[0], t[1], t[2]] -= 1
        cube[c[0], c[1], c[2]] -= 1
        proper = cube[c[0], c[1], c[2]] != -1
        if not proper:
            improper = c
        steps += 1
    grid = np.argmax(cube, axis=2).astype(np.int64)
    return grid


def random_symbol_grid(exponent: int, rng: random.Random) -> np.ndarray:
    """Random bijection [2^M]^2 -> [2^{2M}] as a grid."""
    size = 1 << exponent
    flat = list(range(size * size))
    rng.shuffle(flat)
    return np.asarray(flat, dtype=np.int64).reshape(size, size)


def random_partial(order: int, rng: random.Random, density: float = 0.5) -> PartialLatinSquare:
    """Random partial latin square by greedy admissible placement."""
    cells = [(r, c) for r in range(order) for c in range(order)]
    rng.shuffle(cells)
    rows: list[set[int]] = [set() for _ in range(order)]
    cols: list[set[int]] = [set() for _ in range(order)]
    triples = []
    for r, c in cells:
        if rng.random() > density:
            continue
        free = [s for s in range(order) if s not in rows[r] and s not in cols[c]]
        if not free:
            continue
        s = rng.choice(free)
        rows[r].add(s)
        cols[c].add(s)
        triples.append(Triple(r, c, s))
    if not triples:
        triples.append(Triple(0, 0, 0))
        return PartialLatinSquare(order, tuple(triples))
    return PartialLatinSquare(order, tuple(triples))


def find_trade_spec(square, rng: random.Random):
    """Random switch-condition-satisfying trade spec against ``square``."""
    from olsembed import TradeConditionError, TradeSpec

    order = square.order
    while True:
        r1, r2 = sorted(rng.sample(range(order), 2))
        c1, c2 = rng.sample(range(order), 2)
        try:
            return TradeSpec.from_square(square, r1, c1, r2, c2)
        except TradeConditionError:
            continue


def random_orthogonal_pair(
    order: int, rng: random.Random, density: float = 0.6
) -> tuple[PartialLatinSquare, PartialLatinSquare]:
    """Random orthogonal partial pair by greedy joint placement."""
    cells = [(r, c) for r in range(order) for c in range(order)]
    rng.shuffle(cells)
    p_rows: list[set[int]] = [set() for _ in range(order)]
    p_cols: list[set[int]] = [set() for _ in range(order)]
    q_rows: list[set[int]] = [set() for _ in range(order)]
    q_cols: list[set[int]] = [set() for _ in range(order)]
    used_pairs: set[tuple[int, int]] = set()
    p_triples, q_triples = [], []
    for r, c in cells:
        if rng.random() > density:
            continue
        options = [
            (x, y)
            for x in range(order)
            if x not in p_rows[r] and x not in p_cols[c]
            for y in range(order)
            if y not in q_rows[r] and y not in q_cols[c] and (x, y) not in used_pairs
        ]
        if not options:
            continue
        x, y = rng.choice(options)
        p_rows[r].add(x)
        p_cols[c].add(x)
        q_rows[r].add(y)
        q_cols[c].add(y)
        used_pairs.add((x, y))
        p_triples.append(Triple(r, c, x))
        q_triples.append(Triple(r, c, y))
    if not p_triples:
        p_triples.append(Triple(0, 0, 0))
        q_triples.append(Triple(0, 0, 0))
    return (
        PartialLatinSquare(order, tuple(p_triples)),
        PartialLatinSquare(order, tuple(q_triples)),
    )
