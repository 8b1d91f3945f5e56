"""Unitaries defining the eight-dimensional MUB family used for the qudit-8 runs.

Entries are stored symbolically, one token per entry from {0, 1, -1, i, -i},
with a common scale per matrix, and converted to complex at load time.
Basis vectors are the *columns* of each unitary (the unitary acting on the
logical basis); the row reading does not certify as mutually unbiased.
"""

import numpy as np

# (scale denominator, rows)
_TABLES = {
    1: ("sqrt8", [
        "1 -i -1 i -1 i 1 -i",
        "-i 1 i -1 i -1 -i 1",
        "-i 1 -i 1 i -1 i -1",
        "1 -i 1 -i -1 i -1 i",
        "1 -i -1 i 1 -i -1 i",
        "-i 1 i -1 -i 1 i -1",
        "-i 1 -i 1 -i 1 -i 1",
        "1 -i 1 -i 1 -i 1 -i",
    ]),
    2: ("sqrt8", [
        "1 -1 -1 1 -i i i -i",
        "1 1 -1 -1 -i -i i i",
        "-1 1 -1 1 i -i i -i",
        "1 1 1 1 -i -i -i -i",
        "-i i i -i 1 -1 -1 1",
        "-i -i i i 1 1 -1 -1",
        "i -i i -i -1 1 -1 1",
        "-i -i -i -i 1 1 1 1",
    ]),
    3: ("sqrt2", [
        "1 0 -1 0 0 0 0 0",
        "0 i 0 -i 0 0 0 0",
        "0 1 0 1 0 0 0 0",
        "i 0 i 0 0 0 0 0",
        "0 0 0 0 1 0 -1 0",
        "0 0 0 0 0 i 0 -i",
        "0 0 0 0 0 1 0 1",
        "0 0 0 0 i 0 i 0",
    ]),
    4: ("2", [
        "1 -1 0 0 -1 -1 0 0",
        "-1 1 0 0 -1 -1 0 0",
        "0 0 1 -1 0 0 -1 -1",
        "0 0 -1 1 0 0 -1 -1",
        "1 1 0 0 -1 1 0 0",
        "1 1 0 0 1 -1 0 0",
        "0 0 1 1 0 0 -1 1",
        "0 0 1 1 0 0 1 -1",
    ]),
    5: ("sqrt8", [
        "1 -i -i -1 -1 -i i -1",
        "-i 1 -1 -i -i -1 -1 i",
        "-i -1 1 -i i -1 -1 -i",
        "-1 -i -i 1 -1 i -i -1",
        "-i 1 -1 -i i 1 1 -i",
        "1 -i -i -1 1 i -i 1",
        "-1 -i -i 1 1 -i i 1",
        "-i -1 1 -i -i 1 1 i",
    ]),
    6: ("2", [
        "1 0 -1 0 -1 0 1 0",
        "0 i 0 -i 0 -i 0 i",
        "1 0 1 0 -1 0 -1 0",
        "0 i 0 i 0 -i 0 -i",
        "0 1 0 -1 0 1 0 -1",
        "i 0 -i 0 i 0 -i 0",
        "0 1 0 1 0 1 0 1",
        "i 0 i 0 i 0 i 0",
    ]),
    7: ("2", [
        "1 -i 0 0 -1 i 0 0",
        "-i 1 0 0 i -1 0 0",
        "0 0 1 -i 0 0 -1 i",
        "0 0 -i 1 0 0 i -1",
        "0 0 i 1 0 0 i 1",
        "0 0 1 i 0 0 1 i",
        "i 1 0 0 i 1 0 0",
        "1 i 0 0 1 i 0 0",
    ]),
    8: ("sqrt8", [
        "1 -1 -1 1 -1 1 -1 1",
        "1 1 -1 -1 -1 -1 -1 -1",
        "-1 1 1 -1 -1 1 -1 1",
        "-1 -1 1 1 -1 -1 -1 -1",
        "1 -1 1 -1 -1 1 1 -1",
        "1 1 1 1 -1 -1 1 1",
        "1 -1 1 -1 1 -1 -1 1",
        "1 1 1 1 1 1 -1 -1",
    ]),
    9: ("2", [
        "1 0 -i 0 -1 0 i 0",
        "0 1 0 -i 0 -1 0 i",
        "-i 0 1 0 i 0 -1 0",
        "0 -i 0 1 0 i 0 -1",
        "-i 0 1 0 -i 0 1 0",
        "0 -i 0 1 0 -i 0 1",
        "1 0 -i 0 1 0 -i 0",
        "0 1 0 -i 0 1 0 -i",
    ]),
}

_TOKENS = {"0": 0, "1": 1, "-1": -1, "i": 1j, "-i": -1j}
_SCALES = {"sqrt8": np.sqrt(8.0), "sqrt2": np.sqrt(2.0), "2": 2.0}


def table_unitary(index):
    """Return ``U^(index)`` (1..9) as an 8x8 complex array."""
    try:
        scale, rows = _TABLES[index]
    except KeyError:
        raise ValueError(f"no tabulated unitary with index {index}; expected 1..9") from None
    entries = [[_TOKENS[tok] for tok in row.split()] for row in rows]
    return np.array(entries, dtype=complex) / _SCALES[scale]


def table_indices():
    return tuple(sorted(_TABLES))
