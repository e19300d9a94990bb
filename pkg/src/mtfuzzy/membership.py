"""Fixed-point membership values.

A membership value at precision ``p`` is an integer ``q`` with
``0 <= q <= 10**p`` that denotes ``q / 10**p``.  Keeping the raw integer
makes max/min exact and every result reproducible bit for bit.
"""
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from functools import total_ordering

import numpy as np

from .exceptions import DomainError, UsageError

PRECISIONS = (1, 2, 3)


def check_precision(p):
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p not in PRECISIONS:
        raise DomainError(f"precision must be one of {PRECISIONS}, got {p!r}")
    return int(p)


def top(p):
    """Raw integer of membership 1 at precision ``p``."""
    return 10 ** check_precision(p)


def format_q(q, p):
    """Render raw ``q`` with exactly ``p`` fractional digits, e.g. ``0.30``."""
    scale = 10 ** p
    return f"{q // scale}.{q % scale:0{p}d}"


@total_ordering
@dataclass(frozen=True)
class MembershipValue:
    q: int
    p: int

    def __post_init__(self):
        check_precision(self.p)
        if not 0 <= self.q <= 10 ** self.p:
            raise DomainError(f"raw value {self.q} out of range [0, {10 ** self.p}]")

    def _same(self, other):
        if not isinstance(other, MembershipValue):
            return NotImplemented
        if other.p != self.p:
            raise UsageError(f"precision mismatch: {self.p} vs {other.p}")
        return True

    def __lt__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self.q < other.q

    def __float__(self):
        return mv_to_real(self)

    def __str__(self):
        return format_q(self.q, self.p)


def quantize(x, p):
    """Round ``x`` in [0, 1] to precision ``p`` (half away from zero).

    The float is read through its shortest decimal repr, so ``0.05`` at
    ``p=1`` becomes 1 rather than suffering from binary representation error.
    """
    p = check_precision(p)
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"membership {x!r} outside [0, 1]")
    scaled = Decimal(repr(x)).scaleb(p)
    return MembershipValue(int(scaled.to_integral_value(rounding=ROUND_HALF_UP)), p)


def quantize_array(x, p):
    """Vectorized :func:`quantize` returning raw integers (same rounding rule)."""
    p = check_precision(p)
    x = np.asarray(x, dtype=float)
    if x.size and (np.isnan(x).any() or x.min() < 0.0 or x.max() > 1.0):
        raise DomainError("membership values must lie in [0, 1]")
    uniq, inverse = np.unique(x, return_inverse=True)
    raw = np.array([quantize(v, p).q for v in uniq], dtype=np.int64)
    return raw[inverse].reshape(x.shape)


def mv_max(a, b):
    a._same(b)
    return a if a.q >= b.q else b


def mv_min(a, b):
    a._same(b)
    return a if a.q <= b.q else b


def mv_to_real(a):
    # exact enough for display: q / 10**p with p <= 3
    return a.q / 10 ** a.p
