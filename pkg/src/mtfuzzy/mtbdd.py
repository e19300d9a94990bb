"""Reduced ordered multi-terminal decision diagrams.

All diagrams live in a :class:`NodeTable`.  Handles are plain ``int``:

* internal node -> ``index << 1`` where ``index`` is its arena slot,
* terminal      -> ``(q << 1) | 1`` where ``q`` is the raw membership value.

The low bit is the kind tag, so the two handle spaces never collide, and
terminal handles compare in the same order as their values, which lets
max/min on two terminals work on the handles directly.

Levels are 0-based variable indices; level 0 is tested first.  The table
never reclaims nodes; call :meth:`NodeTable.reset` to start over.
"""
import logging

import numpy as np

from .exceptions import CapacityError, DomainError, StructuralOrderError, UsageError
from .membership import MembershipValue, check_precision

logger = logging.getLogger(__name__)

MAX = 0
MIN = 1
_OPS = {"max": MAX, "min": MIN, MAX: MAX, MIN: MIN}
_BOOLEAN_OPS = {"and", "or", "xor", "not", "nand", "nor", "imp", "equiv", "diff"}

# terminals sit below every variable
TERMINAL_LEVEL = 1 << 30
DEFAULT_CACHE_SIZE = 1 << 18


def is_terminal(h):
    return h & 1 == 1


def _op_code(op):
    try:
        return _OPS[op]
    except (KeyError, TypeError):
        pass
    if isinstance(op, str) and op.lower() in _BOOLEAN_OPS:
        raise UsageError(
            f"boolean operator {op!r} is undefined on multi-terminal diagrams; use 'max' or 'min'")
    raise UsageError(f"unknown operator {op!r}")


class NodeTable:
    """Shared node arena, unique table, terminal registry and apply cache.

    Parameters
    ----------
    precision : int
        Decimal digits of the membership values stored in terminals (1, 2 or 3).
    cache_size : int
        Number of slots of the direct-mapped apply cache, a power of two.
        ``0`` disables caching.
    max_nodes : int or None
        Raise :class:`CapacityError` once this many internal nodes exist.
    """

    def __init__(self, precision=1, cache_size=DEFAULT_CACHE_SIZE, max_nodes=None):
        self.precision = check_precision(precision)
        self.top = 10 ** self.precision
        if cache_size < 0 or cache_size & (cache_size - 1):
            raise UsageError("cache_size must be 0 or a power of two")
        self.cache_size = cache_size
        self.max_nodes = max_nodes
        self.reset()

    def reset(self):
        """Drop every node; all previously issued handles become invalid."""
        self._level = []
        self._low = []
        self._high = []
        # (level, low, high) -> handle
        self._unique = {}
        # q -> handle, filled on demand
        self._terminals = {}
        self._cache_key = [None] * self.cache_size
        self._cache_val = [0] * self.cache_size
        self._mask = self.cache_size - 1
        self.zero = self.terminal(0)
        self.one = self.terminal(self.top)

    def __len__(self):
        return len(self._level)

    # -- terminals -------------------------------------------------------

    def terminal(self, value):
        """Canonical handle of the terminal carrying ``value``.

        ``value`` is a raw integer at the table's precision or a
        :class:`MembershipValue` of the same precision.
        """
        if isinstance(value, MembershipValue):
            if value.p != self.precision:
                raise UsageError(
                    f"value has precision {value.p}, table uses {self.precision}")
            value = value.q
        q = int(value)
        if q != value or not 0 <= q <= self.top:
            raise DomainError(f"terminal value {value!r} out of range [0, {self.top}]")
        h = self._terminals.get(q)
        if h is None:
            h = (q << 1) | 1
            self._terminals[q] = h
        return h

    def value(self, h):
        """Raw integer value of terminal ``h``."""
        if not h & 1:
            raise UsageError(f"handle {h} is not a terminal")
        return h >> 1

    def registered_terminals(self):
        """All terminal values created so far, ascending."""
        return sorted(self._terminals)

    # -- node structure --------------------------------------------------

    def check(self, h):
        if not isinstance(h, (int, np.integer)) or h < 0:
            raise UsageError(f"invalid handle {h!r}")
        if h & 1:
            if (h >> 1) not in self._terminals:
                raise UsageError(f"terminal handle {h} was not issued by this table")
        elif (h >> 1) >= len(self._level):
            raise UsageError(f"handle {h} does not belong to this table")
        return int(h)

    def level(self, h):
        return TERMINAL_LEVEL if h & 1 else self._level[h >> 1]

    def low(self, h):
        return self._low[h >> 1]

    def high(self, h):
        return self._high[h >> 1]

    def triple(self, h):
        i = h >> 1
        return self._level[i], self._low[i], self._high[i]

    def _mk(self, level, low, high):
        if low == high:
            return low
        key = (level, low, high)
        h = self._unique.get(key)
        if h is None:
            idx = len(self._level)
            if self.max_nodes is not None and idx >= self.max_nodes:
                raise CapacityError(f"node limit of {self.max_nodes} reached")
            h = idx << 1
            self._level.append(level)
            self._low.append(low)
            self._high.append(high)
            self._unique[key] = h
        return h

    def make_node(self, level, low, high):
        """Return the unique node testing ``level`` with the given children.

        Equal children are elided: the child itself is returned.
        """
        low = self.check(low)
        high = self.check(high)
        if level < 0:
            raise StructuralOrderError(f"negative level {level}")
        if level >= self.level(low) or level >= self.level(high):
            raise StructuralOrderError(
                f"level {level} must be above children at levels "
                f"{self.level(low)}, {self.level(high)}")
        return self._mk(level, low, high)

    # -- apply -----------------------------------------------------------

    def apply(self, f, g, op, cache=True):
        """Pointwise ``op`` ('max' or 'min') of two diagrams."""
        code = _op_code(op)
        f = self.check(f)
        g = self.check(g)
        if not cache:
            saved = self.cache_size
            self._mask = -1
            try:
                return self._apply(code, f, g)
            finally:
                self._mask = saved - 1
        return self._apply(code, f, g)

    def _apply(self, op, f, g):
        if f == g:
            return f
        if f & 1:
            if g & 1:
                if op == MAX:
                    return f if f > g else g
                return f if f < g else g
            if f == self.zero:
                return g if op == MAX else f
            if f == self.one:
                return f if op == MAX else g
        elif g & 1:
            if g == self.zero:
                return f if op == MAX else g
            if g == self.one:
                return g if op == MAX else f
        if f > g:
            f, g = g, f
        mask = self._mask
        if mask >= 0:
            key = ((f << 32) | g) << 1 | op
            slot = (f * 12582917 + g * 4256249 + op) & mask
            if self._cache_key[slot] == key:
                return self._cache_val[slot]
        lf = TERMINAL_LEVEL if f & 1 else self._level[f >> 1]
        lg = TERMINAL_LEVEL if g & 1 else self._level[g >> 1]
        if lf == lg:
            i, j = f >> 1, g >> 1
            lo = self._apply(op, self._low[i], self._low[j])
            hi = self._apply(op, self._high[i], self._high[j])
            lvl = lf
        elif lf < lg:
            i = f >> 1
            lo = self._apply(op, self._low[i], g)
            hi = self._apply(op, self._high[i], g)
            lvl = lf
        else:
            j = g >> 1
            lo = self._apply(op, f, self._low[j])
            hi = self._apply(op, f, self._high[j])
            lvl = lg
        r = self._mk(lvl, lo, hi)
        if mask >= 0:
            self._cache_key[slot] = key
            self._cache_val[slot] = r
        return r

    # -- queries ---------------------------------------------------------

    def eval(self, f, assignment):
        """Follow ``f`` along ``assignment`` (bit per level) to a terminal value."""
        f = self.check(f)
        while not f & 1:
            i = f >> 1
            f = self._high[i] if assignment[self._level[i]] else self._low[i]
        return f >> 1

    def cofactors(self, f, level):
        """(low, high) cofactors of ``f`` with respect to the variable at ``level``."""
        if f & 1:
            return f, f
        i = f >> 1
        lv = self._level[i]
        if lv == level:
            return self._low[i], self._high[i]
        if lv < level:
            raise StructuralOrderError(f"node at level {lv} lies above level {level}")
        return f, f

    def _quad(self, f, root):
        # caller guarantees level(f) >= root
        if f & 1:
            return f, f, f, f
        i = f >> 1
        level, low, high = self._level, self._low, self._high
        if level[i] == root:
            f0, f1 = low[i], high[i]
        else:
            f0 = f1 = f
        nxt = root + 1
        if not f0 & 1 and level[f0 >> 1] == nxt:
            a, b = low[f0 >> 1], high[f0 >> 1]
        else:
            a = b = f0
        if not f1 & 1 and level[f1 >> 1] == nxt:
            c, d = low[f1 >> 1], high[f1 >> 1]
        else:
            c = d = f1
        return a, b, c, d

    def quad_partition(self, f, root_level):
        """Cofactors of ``f`` on the variables ``root_level`` and ``root_level + 1``.

        Returned in the order (00, 01, 10, 11).  Existing sub-graphs are
        returned; nothing is allocated.
        """
        f = self.check(f)
        if self.level(f) < root_level:
            raise StructuralOrderError(
                f"node at level {self.level(f)} lies above root level {root_level}")
        return self._quad(f, root_level)

    def reachable(self, f):
        """Handles of internal nodes reachable from ``f`` (each once)."""
        f = self.check(f)
        seen = set()
        stack = [f]
        while stack:
            h = stack.pop()
            if h & 1 or h in seen:
                continue
            seen.add(h)
            stack.append(self._low[h >> 1])
            stack.append(self._high[h >> 1])
        return seen

    def node_count(self, f):
        return len(self.reachable(f))

    def terminal_values(self, f):
        """Set of raw terminal values reachable from ``f``."""
        f = self.check(f)
        if f & 1:
            return {f >> 1}
        out = set()
        for h in self.reachable(f):
            for child in (self._low[h >> 1], self._high[h >> 1]):
                if child & 1:
                    out.add(child >> 1)
        return out

    # -- construction ----------------------------------------------------

    def build(self, nvars, keys, values, default=0):
        """Diagram over ``nvars`` variables from a sparse table of points.

        ``keys`` are distinct integers below ``2**nvars``; the bit of a key
        read by level ``t`` is bit ``nvars - 1 - t`` (most significant bit at
        level 0).  Points not listed take ``default``.
        """
        keys = np.asarray(keys, dtype=np.int64)
        values = np.asarray(values, dtype=np.int64)
        if keys.shape != values.shape or keys.ndim != 1:
            raise UsageError("keys and values must be 1-d arrays of equal length")
        background = self.terminal(default)
        if keys.size == 0:
            return background
        if nvars < 0 or nvars > 62:
            raise DomainError(f"nvars must lie in [0, 62], got {nvars}")
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        values = values[order]
        if keys[0] < 0 or keys[-1] >= (1 << nvars):
            raise DomainError(f"key out of range for {nvars} variables")
        if np.any(keys[1:] == keys[:-1]):
            raise UsageError("duplicate keys")
        if values.min() < 0 or values.max() > self.top:
            raise DomainError(f"values must lie in [0, {self.top}]")
        for q in np.unique(values):
            self.terminal(int(q))
        # run_end[i]: first index after i whose value differs
        change = np.flatnonzero(values[1:] != values[:-1]) + 1
        bounds = np.append(change, values.size)
        run_end = np.repeat(bounds, np.diff(np.concatenate(([0], bounds))))
        vals = values.tolist()
        ends = run_end.tolist()
        searchsorted = np.searchsorted

        def rec(level, lo, hi, base):
            if lo == hi:
                return background
            size = 1 << (nvars - level)
            if hi - lo == size and ends[lo] >= hi:
                return (vals[lo] << 1) | 1
            half = size >> 1
            mid = lo + int(searchsorted(keys[lo:hi], base + half))
            return self._mk(level, rec(level + 1, lo, mid, base),
                            rec(level + 1, mid, hi, base + half))

        return rec(0, 0, keys.size, 0)

    def cube(self, level_bits, value):
        """Diagram that is ``value`` on one path and 0 elsewhere.

        ``level_bits`` maps level -> bit for every tested variable.
        """
        h = self.terminal(value)
        for level in sorted(level_bits, reverse=True):
            if level_bits[level]:
                h = self.make_node(level, self.zero, h)
            else:
                h = self.make_node(level, h, self.zero)
        return h

    # -- debugging -------------------------------------------------------

    def to_dot(self, f, names=None):
        """DOT text of the diagram rooted at ``f``; for inspection only."""
        scale = 10 ** self.precision
        lines = ["digraph mtbdd {"]
        nodes = sorted(self.reachable(f))
        terms = self.terminal_values(f)
        for q in sorted(terms):
            lines.append(f'  t{q} [shape=box, label="{q / scale:g}"];')
        for h in nodes:
            lv, lo, hi = self.triple(h)
            label = names[lv] if names else f"v{lv}"
            lines.append(f'  n{h} [label="{label}"];')
            for child, style in ((lo, "dashed"), (hi, "solid")):
                tgt = f"t{child >> 1}" if child & 1 else f"n{child}"
                lines.append(f"  n{h} -> {tgt} [style={style}];")
        lines.append("}")
        return "\n".join(lines) + "\n"
