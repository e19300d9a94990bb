"""Fuzzy sets over {0, ..., 2**m - 1} stored as multi-terminal diagrams.

Element ``e`` is encoded most significant bit first: the variable at level
``t`` carries bit ``m - 1 - t`` of ``e``.
"""
from dataclasses import dataclass

from .exceptions import DomainError, ParseError, UsageError
from .membership import MembershipValue, format_q
from .mtbdd import NodeTable


def element_bits(e, m):
    return {t: (e >> (m - 1 - t)) & 1 for t in range(m)}


@dataclass(frozen=True, eq=False)
class FuzzySet:
    table: NodeTable
    root: int
    m: int

    @property
    def precision(self):
        return self.table.precision

    def membership(self, e):
        return membership(self, e)

    def items(self):
        """(element, MembershipValue) for every element of non-zero grade, ascending."""
        out = []
        table, m = self.table, self.m
        p = table.precision

        def walk(h, level, prefix):
            if h == table.zero:
                return
            if level == m:
                out.append((prefix, MembershipValue(table.value(h), p)))
                return
            lo, hi = table.cofactors(h, level)
            walk(lo, level + 1, prefix << 1)
            walk(hi, level + 1, (prefix << 1) | 1)

        walk(self.root, 0, 0)
        return out

    def __or__(self, other):
        return set_union(self, other)

    def __and__(self, other):
        return set_intersection(self, other)

    def __eq__(self, other):
        if not isinstance(other, FuzzySet):
            return NotImplemented
        return self.table is other.table and self.m == other.m and self.root == other.root

    def __hash__(self):
        return hash((id(self.table), self.m, self.root))


def _raw(table, value):
    if isinstance(value, MembershipValue):
        if value.p != table.precision:
            raise UsageError(f"value precision {value.p} != table precision {table.precision}")
        return value.q
    return value


def set_from_pairs(pairs, m, table):
    """Build a fuzzy set from ``(element, value)`` pairs.

    Values are raw integers or :class:`MembershipValue`.  Each pair becomes
    a single-path diagram and the paths are merged with pointwise max.
    """
    if m < 1:
        raise DomainError("a fuzzy set needs at least one variable")
    seen = set()
    root = table.zero
    for e, v in pairs:
        if not 0 <= e < (1 << m):
            raise DomainError(f"element {e} outside universe of size {1 << m}")
        if e in seen:
            raise UsageError(f"duplicate element {e}")
        seen.add(e)
        q = _raw(table, v)
        if q == 0:
            table.terminal(0)
            continue
        root = table.apply(root, table.cube(element_bits(e, m), q), "max")
    return FuzzySet(table, root, m)


def universe(m, table, value=None):
    """Every element at ``value`` (default: full membership)."""
    q = table.top if value is None else _raw(table, value)
    return FuzzySet(table, table.terminal(q), m)


def membership(s, e):
    if not 0 <= e < (1 << s.m):
        raise DomainError(f"element {e} outside universe of size {1 << s.m}")
    bits = [(e >> (s.m - 1 - t)) & 1 for t in range(s.m)]
    return MembershipValue(s.table.eval(s.root, bits), s.table.precision)


def _check_compatible(a, b):
    if a.table is not b.table:
        raise UsageError("fuzzy sets belong to different node tables")
    if a.m != b.m:
        raise UsageError(f"universe mismatch: {a.m} vs {b.m} variables")


def set_union(a, b):
    """Pointwise max."""
    _check_compatible(a, b)
    return FuzzySet(a.table, a.table.apply(a.root, b.root, "max"), a.m)


def set_intersection(a, b):
    """Pointwise min."""
    _check_compatible(a, b)
    return FuzzySet(a.table, a.table.apply(a.root, b.root, "min"), a.m)


def format_listing(s):
    """One ``element value`` line per member of non-zero grade."""
    p = s.precision
    return "".join(f"{e} {format_q(v.q, p)}\n" for e, v in s.items())


def parse_listing(text, m, table):
    p = table.precision
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'element value'", line=lineno)
        try:
            e = int(parts[0])
            whole, _, frac = parts[1].partition(".")
            if len(frac) != p or not whole.isdigit() or not frac.isdigit():
                raise ValueError
            q = int(whole) * 10 ** p + int(frac)
        except ValueError:
            raise ParseError(f"bad entry {line!r}", line=lineno) from None
        pairs.append((e, q))
    try:
        return set_from_pairs(pairs, m, table)
    except (DomainError, UsageError) as exc:
        raise ParseError(str(exc)) from exc
