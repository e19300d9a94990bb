"""Two-dimensional array relations: the reference implementation.

Cells hold raw integers as ``int16`` (values never exceed 1000).  The
outer loop of each algorithm is explicit; only the innermost row/column
sweep is handed to numpy, which keeps the cubic cost of the textbook
loops while staying runnable at image sizes.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, PreconditionError, UsageError
from .fmtr import Entries
from .membership import MembershipValue, check_precision

BYTES_PER_ENTRY = 3


@dataclass(eq=False)
class DenseRelation:
    cells: np.ndarray
    precision: int

    def __post_init__(self):
        self.precision = check_precision(self.precision)
        cells = np.asarray(self.cells)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1] or cells.shape[0] < 1:
            raise UsageError(f"relation must be a non-empty square matrix, got shape {cells.shape}")
        if cells.size and (cells.min() < 0 or cells.max() > 10 ** self.precision):
            raise DomainError(f"cells must lie in [0, {10 ** self.precision}]")
        self.cells = cells.astype(np.int16, copy=True)

    @property
    def n(self):
        return self.cells.shape[0]

    @classmethod
    def identity(cls, n, precision):
        return cls(np.eye(n, dtype=np.int16) * 10 ** check_precision(precision), precision)

    @classmethod
    def from_entries(cls, entries):
        return cls(entries.to_dense(), entries.p)

    def to_entries(self):
        return Entries.from_dense(self.cells, self.precision)

    def get(self, i, j):
        return MembershipValue(int(self.cells[i, j]), self.precision)

    def is_reflexive(self):
        return bool(np.all(np.diagonal(self.cells) == 10 ** self.precision))

    def memory_bytes(self):
        return dense_memory_bytes(self.n)

    def __eq__(self, other):
        if not isinstance(other, DenseRelation):
            return NotImplemented
        return self.precision == other.precision and np.array_equal(self.cells, other.cells)


def _check_pair(a, b):
    if a.n != b.n:
        raise UsageError(f"size mismatch: {a.n} vs {b.n}")
    if a.precision != b.precision:
        raise UsageError(f"precision mismatch: {a.precision} vs {b.precision}")


def dense_mmc(a, b):
    """Max-min composition: ``out[i, j] = max_c min(a[i, c], b[c, j])``."""
    _check_pair(a, b)
    x, y = a.cells, b.cells
    out = np.zeros_like(x)
    tmp = np.empty_like(x)
    for c in range(a.n):
        np.minimum(x[:, c, None], y[None, c, :], out=tmp)
        np.maximum(out, tmp, out=out)
    return DenseRelation(out, a.precision)


def floyd_warshall_closure(c):
    """Max-min transitive closure with the k-outermost triple loop."""
    if not c.is_reflexive():
        raise PreconditionError("closure requires a reflexive relation (diagonal = 1)")
    m = c.cells.copy()
    tmp = np.empty_like(m)
    for k in range(c.n):
        np.minimum(m[:, k, None].copy(), m[None, k, :].copy(), out=tmp)
        np.maximum(m, tmp, out=m)
    return DenseRelation(m, c.precision)


def squaring_closure(c, max_iter=None):
    """Closure by repeated dense squaring; returns ``(relation, squarings)``."""
    if not c.is_reflexive():
        raise PreconditionError("closure requires a reflexive relation (diagonal = 1)")
    if max_iter is None:
        max_iter = max(1, (c.n - 1).bit_length()) + 2
    res = c
    for it in range(1, max_iter + 1):
        nxt = dense_mmc(res, res)
        if nxt == res:
            return nxt, it
        res = nxt
    raise RuntimeError(f"no fixpoint after {max_iter} squarings")


def dense_memory_bytes(n):
    """Modeled footprint of an ``n x n`` array at three bytes per entry."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return BYTES_PER_ENTRY * n * n
