"""Difference bound matrices over exact rationals.

Entry ``(i, j)`` bounds ``x_i - x_j``; variable 0 is the reference clock fixed
at 0. Internally a bound ``(c, strict)`` is stored as the integer
``2 * c * scale + (0 if strict else 1)``, where ``scale`` clears every
denominator of the constants involved. The encoding is exact, totally ordered
(tighter bounds are smaller) and makes bound addition an integer expression,
so closure runs as vectorised numpy code without ever touching floats.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

import numpy as np

from .model import Bound

INF_RAW = 1 << 60
LE_ZERO = 1
LT_ZERO = 0


def encode(b: Bound, scale: int) -> int:
    if b.value is None:
        return INF_RAW
    v = b.value * scale
    if v.denominator != 1:
        raise ValueError(f"scale {scale} does not clear the denominator of {b.value}")
    return 2 * int(v) + (0 if b.strict else 1)


def decode(raw: int, scale: int) -> Bound:
    raw = int(raw)
    if raw >= INF_RAW:
        return Bound.inf()
    return Bound(Fraction(raw >> 1, scale), not (raw & 1))


def scale_for(values: Iterable[Fraction]) -> int:
    s = 1
    for v in values:
        if v is not None:
            s = lcm(s, Fraction(v).denominator)
    return s


def add(a, b):
    """Bound addition on encoded values (numpy arrays or ints), saturating at infinity."""
    if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
        if a >= INF_RAW or b >= INF_RAW:
            return INF_RAW
        return int(a) + int(b) - ((int(a) | int(b)) & 1)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    s = a + b - ((a | b) & 1)
    return np.where((a >= INF_RAW) | (b >= INF_RAW), INF_RAW, s)


def close(m: np.ndarray) -> Optional[np.ndarray]:
    """Floyd-Warshall closure in place; ``None`` if the system is inconsistent."""
    n = m.shape[0]
    for k in range(n):
        np.minimum(m, add(m[:, k:k + 1], m[k:k + 1, :]), out=m)
        if m[k, k] < LE_ZERO:
            return None
    if (np.diagonal(m) < LE_ZERO).any():
        return None
    return m


def constrain(m: np.ndarray, i: int, j: int, c: int) -> Optional[np.ndarray]:
    """Add ``x_i - x_j <= c`` to a closed matrix, keeping it closed (O(n^2))."""
    if add(c, int(m[j, i])) < LE_ZERO:
        return None
    if c >= m[i, j]:
        return m
    via = add(add(m[:, i:i + 1], c), m[j:j + 1, :])
    return np.minimum(m, via)


def unconstrained(n: int) -> np.ndarray:
    m = np.full((n, n), INF_RAW, dtype=np.int64)
    np.fill_diagonal(m, LE_ZERO)
    return m


class DBM:
    """A named difference bound matrix; ``names[0]`` is the reference variable."""

    __slots__ = ("names", "scale", "raw")

    def __init__(self, names: Sequence[str], raw: np.ndarray, scale: int = 1):
        self.names = tuple(names)
        self.raw = np.asarray(raw, dtype=np.int64)
        self.scale = scale
        if self.raw.shape != (len(self.names), len(self.names)):
            raise ValueError("matrix shape does not match the variable list")

    @classmethod
    def from_constraints(cls, names: Sequence[str], constraints, scale: Optional[int] = None) -> "DBM":
        """Build a (not yet closed) DBM from ``(i, j, Bound)`` triples meaning ``x_i - x_j`` bound."""
        constraints = list(constraints)
        if scale is None:
            scale = scale_for(b.value for _, _, b in constraints)
        n = len(names)
        raw = unconstrained(n)
        for i, j, b in constraints:
            raw[i, j] = min(raw[i, j], encode(b, scale))
        return cls(names, raw, scale)

    def entry(self, i: int, j: int) -> Bound:
        return decode(self.raw[i, j], self.scale)

    def upper(self, i: int) -> Bound:
        return self.entry(i, 0)

    def lower(self, i: int) -> Bound:
        """``-entry(0, i)``: the bound ``x_i >= value`` (strict if open)."""
        b = self.entry(0, i)
        return Bound(-b.value, b.strict) if b.value is not None else b

    def __len__(self):
        return len(self.names)

    def copy(self) -> "DBM":
        return DBM(self.names, self.raw.copy(), self.scale)

    def rescaled(self, scale: int) -> "DBM":
        if scale % self.scale:
            raise ValueError("new scale must be a multiple of the current one")
        f = scale // self.scale
        raw = self.raw.copy()
        fin = raw < INF_RAW
        raw[fin] = 2 * ((raw[fin] >> 1) * f) + (raw[fin] & 1)
        return DBM(self.names, raw, scale)

    def permuted(self, order: Sequence[int]) -> "DBM":
        order = list(order)
        return DBM([self.names[i] for i in order], self.raw[np.ix_(order, order)], self.scale)

    def is_canonical(self) -> bool:
        c = canonicalize(self)
        return c is not None and np.array_equal(c.raw, self.raw)

    def __eq__(self, other):
        if not isinstance(other, DBM):
            return NotImplemented
        if self.names != other.names:
            return False
        if self.scale != other.scale:
            s = lcm(self.scale, other.scale)
            return np.array_equal(self.rescaled(s).raw, other.rescaled(s).raw)
        return np.array_equal(self.raw, other.raw)

    def __hash__(self):
        return hash((self.names, self.raw.tobytes()))

    def constraints(self):
        """Finite off-diagonal bounds as ``(i, j, Bound)`` triples."""
        n = len(self.names)
        return [(i, j, self.entry(i, j)) for i in range(n) for j in range(n)
                if i != j and self.raw[i, j] < INF_RAW]

    def __repr__(self):
        rows = []
        for i, j, b in self.constraints():
            lhs = self.names[i] if j == 0 else ("-" + self.names[j] if i == 0 else f"{self.names[i]} - {self.names[j]}")
            rows.append(f"{lhs} {b}")
        return "DBM(" + ", ".join(rows) + ")"


def canonicalize(d: DBM) -> Optional[DBM]:
    """Shortest-path closure; ``None`` stands for the empty (inconsistent) system."""
    m = close(d.raw.copy())
    if m is None:
        return None
    return DBM(d.names, m, d.scale)
