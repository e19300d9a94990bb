"""Binary fuzzy relations on {0, ..., n-1} as multi-terminal diagrams.

Row index ``i`` and column index ``j`` each use ``k`` variables, interleaved
as ``x0, y0, x1, y1, ...`` (level ``2t`` holds bit ``k-1-t`` of ``i``, level
``2t+1`` the same bit of ``j``).  The top two levels therefore split the
matrix into its four quadrant blocks.  When ``n`` is not a power of two the
relation is embedded in a ``2**k x 2**k`` one whose extra block is the
identity, which max-min composition leaves intact.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, PreconditionError, UsageError
from .fmtr import Entries
from .membership import MembershipValue, quantize_array
from .mtbdd import MAX, NodeTable

NODE_BYTES = 20


def domain_bits(n):
    """Variables per domain: ``ceil(log2 n)``, at least 1."""
    if n < 1:
        raise DomainError(f"domain size must be positive, got {n}")
    return max(1, (n - 1).bit_length())


def interleave(i, j, k):
    """Key of pair ``(i, j)`` with row bits on the odd positions (vectorized)."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    key = np.zeros(np.broadcast(i, j).shape, dtype=np.int64)
    for b in range(k):
        key |= ((i >> b) & 1) << (2 * b + 1)
        key |= ((j >> b) & 1) << (2 * b)
    return key


@dataclass(frozen=True, eq=False)
class FuzzyRelation:
    table: NodeTable
    root: int
    n: int
    k: int

    @property
    def precision(self):
        return self.table.precision

    @property
    def size(self):
        """Padded side length ``2**k``."""
        return 1 << self.k

    def get(self, i, j):
        return get(self, i, j)

    def to_dense(self, padded=False):
        return to_dense(self, padded)

    def to_entries(self):
        return Entries.from_dense(to_dense(self), self.precision)

    def is_reflexive(self):
        t = self.table
        return all(t.eval(self.root, _path(i, i, self.k)) == t.top for i in range(self.n))

    def stats(self):
        return relation_stats(self)

    def __matmul__(self, other):
        return mmc(self, other)

    def __eq__(self, other):
        if not isinstance(other, FuzzyRelation):
            return NotImplemented
        return (self.table is other.table and self.n == other.n and self.k == other.k
                and self.root == other.root)

    def __hash__(self):
        return hash((id(self.table), self.n, self.k, self.root))


def _path(i, j, k):
    bits = [0] * (2 * k)
    for t in range(k):
        shift = k - 1 - t
        bits[2 * t] = (i >> shift) & 1
        bits[2 * t + 1] = (j >> shift) & 1
    return bits


def from_entries(table, entries):
    """Relation from sparse raw entries; padding is added here."""
    if entries.p != table.precision:
        raise UsageError(f"entries use precision {entries.p}, table uses {table.precision}")
    n = entries.n
    k = domain_bits(n)
    rows = np.asarray(entries.rows, dtype=np.int64)
    cols = np.asarray(entries.cols, dtype=np.int64)
    qs = np.asarray(entries.qs, dtype=np.int64)
    if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
        raise DomainError(f"entry index outside domain of size {n}")
    keep = qs != 0
    pad = np.arange(n, 1 << k, dtype=np.int64)
    rows = np.concatenate((rows[keep], pad))
    cols = np.concatenate((cols[keep], pad))
    qs = np.concatenate((qs[keep], np.full(pad.size, table.top, dtype=np.int64)))
    root = table.build(2 * k, interleave(rows, cols, k), qs)
    return FuzzyRelation(table, root, n, k)


def relation_from_matrix(matrix, table):
    """Relation from an ``n x n`` matrix.

    Integer matrices hold raw values at the table's precision; float
    matrices are memberships in [0, 1] and get quantized.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise UsageError(f"relation matrix must be square and non-empty, got shape {m.shape}")
    if not np.issubdtype(m.dtype, np.integer):
        m = quantize_array(m, table.precision)
    return from_entries(table, Entries.from_dense(m, table.precision))


def identity(n, table):
    i = np.arange(n)
    return from_entries(table, Entries(n, table.precision, i, i,
                                       np.full(n, table.top, dtype=np.int64)))


def get(r, i, j):
    if not (0 <= i < r.size and 0 <= j < r.size):
        raise DomainError(f"index ({i}, {j}) outside padded domain of size {r.size}")
    return MembershipValue(r.table.eval(r.root, _path(i, j, r.k)), r.precision)


def to_dense(r, padded=False):
    """Raw-value matrix (``int16``) of the logical or padded relation."""
    side = r.size if padded else r.n
    out = np.zeros((side, side), dtype=np.int16)
    table = r.table

    def fill(h, t, r0, c0, span):
        if r0 >= side or c0 >= side:
            return
        if h & 1:
            out[r0:r0 + span, c0:c0 + span] = h >> 1
            return
        half = span >> 1
        a, b, c, d = table._quad(h, 2 * t)
        fill(a, t + 1, r0, c0, half)
        fill(b, t + 1, r0, c0 + half, half)
        fill(c, t + 1, r0 + half, c0, half)
        fill(d, t + 1, r0 + half, c0 + half, half)

    fill(r.root, 0, 0, 0, r.size)
    return out


def _check_pair(a, b):
    if a.table is not b.table:
        raise UsageError("relations belong to different node tables")
    if a.k != b.k or a.n != b.n:
        raise UsageError(f"size mismatch: n={a.n} vs n={b.n}")


def mmc(a, b, cache=True):
    """Max-min composition ``a o b`` by quadrant recursion.

    The memo maps ``(a, b, depth)`` to results within this call only.
    ``cache=False`` disables it (and the apply cache), for testing.
    """
    _check_pair(a, b)
    table = a.table
    if not cache:
        saved = table._mask
        table._mask = -1
    try:
        root = _compose(table, a.root, b.root, cache)
    finally:
        if not cache:
            table._mask = saved
    return FuzzyRelation(table, root, a.n, a.k)


def _compose(table, a, b, use_memo):
    zero = table.zero
    quad = table._quad
    apply = table._apply
    mk = table._mk
    memo = {}
    lookup = memo.get if use_memo else (lambda key: None)

    def rec(a, b, depth):
        if a == zero or b == zero:
            # min with 0 is 0 everywhere in the block
            return zero
        if a & 1 and b & 1:
            return a if a < b else b
        key = (a, b, depth)
        r = lookup(key)
        if r is not None:
            return r
        level = 2 * depth
        a0, a1, a2, a3 = quad(a, level)
        b0, b1, b2, b3 = quad(b, level)
        depth += 1
        lo = apply(MAX, rec(a0, b0, depth), rec(a1, b2, depth))
        hi = apply(MAX, rec(a0, b1, depth), rec(a1, b3, depth))
        upper = mk(level + 1, lo, hi)
        lo = apply(MAX, rec(a2, b0, depth), rec(a3, b2, depth))
        hi = apply(MAX, rec(a2, b1, depth), rec(a3, b3, depth))
        r = mk(level, upper, mk(level + 1, lo, hi))
        memo[key] = r
        return r

    return rec(a, b, 0)


def transitive_closure(r, return_iterations=False):
    """Max-min transitive closure by repeated squaring.

    Stops when squaring returns the same root.  Requires a reflexive
    relation; at most ``k + 2`` squarings are attempted.
    """
    if not r.is_reflexive():
        raise PreconditionError("closure requires a reflexive relation (diagonal = 1)")
    limit = r.k + 2
    res = r
    for it in range(1, limit + 1):
        old = res
        res = mmc(res, res)
        if res.root == old.root:
            return (res, it) if return_iterations else res
    raise RuntimeError(f"no fixpoint after {limit} squarings")


@dataclass(frozen=True)
class RelationStats:
    nodes: int
    terminals: frozenset
    estimated_bytes: int

    @property
    def kb(self):
        return self.estimated_bytes // 1000


def relation_stats(r):
    t = r.table
    nodes = t.node_count(r.root)
    return RelationStats(nodes, frozenset(t.terminal_values(r.root)), NODE_BYTES * nodes)
