"""The ``FMTR 1`` relation text format.

::

    FMTR 1 <n> <p>
    <i> <j> <q>        one line per entry with q > 0, row-major ascending

Unlisted entries are 0.  Both engines read and write this format so their
outputs can be compared byte for byte.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import ParseError
from .membership import check_precision


@dataclass
class Entries:
    """Sparse view of a logical ``n x n`` relation (raw integer values)."""

    n: int
    p: int
    rows: np.ndarray
    cols: np.ndarray
    qs: np.ndarray

    @classmethod
    def from_dense(cls, cells, p):
        cells = np.asarray(cells)
        rows, cols = np.nonzero(cells)
        return cls(cells.shape[0], p, rows, cols, cells[rows, cols].astype(np.int64))

    def to_dense(self, dtype=np.int16):
        out = np.zeros((self.n, self.n), dtype=dtype)
        out[self.rows, self.cols] = self.qs
        return out


def format_fmtr(entries):
    rows = np.asarray(entries.rows, dtype=np.int64)
    cols = np.asarray(entries.cols, dtype=np.int64)
    qs = np.asarray(entries.qs, dtype=np.int64)
    keep = qs > 0
    rows, cols, qs = rows[keep], cols[keep], qs[keep]
    order = np.lexsort((cols, rows))
    body = np.column_stack((rows[order], cols[order], qs[order]))
    lines = [f"FMTR 1 {entries.n} {entries.p}"]
    lines.extend(f"{i} {j} {q}" for i, j, q in body.tolist())
    return "\n".join(lines) + "\n"


def parse_fmtr(text):
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", line=1)
    header = lines[0].split()
    if len(header) != 4 or header[0] != "FMTR" or header[1] != "1":
        raise ParseError(f"bad header {lines[0]!r}", line=1)
    try:
        n = int(header[2])
        p = check_precision(int(header[3]))
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}", line=1) from None
    if n < 1:
        raise ParseError(f"domain size must be positive, got {n}", line=1)
    top = 10 ** p
    rows, cols, qs = [], [], []
    seen = set()
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 'i j q', got {line!r}", line=lineno)
        try:
            i, j, q = (int(x) for x in parts)
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", line=lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(f"index ({i}, {j}) outside domain of size {n}", line=lineno)
        if not 0 <= q <= top:
            raise ParseError(f"value {q} outside [0, {top}]", line=lineno)
        if (i, j) in seen:
            raise ParseError(f"duplicate entry ({i}, {j})", line=lineno)
        seen.add((i, j))
        rows.append(i)
        cols.append(j)
        qs.append(q)
    return Entries(n, p, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                   np.array(qs, dtype=np.int64))


def read_fmtr(path):
    with open(path, encoding="ascii") as fh:
        return parse_fmtr(fh.read())


def write_fmtr(path, entries):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_fmtr(entries))
