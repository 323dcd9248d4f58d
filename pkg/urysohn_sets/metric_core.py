"""
Exact-rational finite metric spaces, type functions and isometry search.

Distances are stored as an integer numerator matrix over one common
denominator, so every comparison is exact and most scans are numpy
vector operations. ``d(i, j)`` hands back a ``Fraction``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .config import ISOMETRY_CAP
from .errors import (
    Asymmetry, CapExceeded, InvalidInput, NotMetricType,
    TriangleViolation, ZeroOffDiagonal,
)

logger = logging.getLogger(__name__)

Rat = Fraction
XRat = Union[Fraction, float]
INF = math.inf

_INT64_SAFE = 2 ** 60


def to_rat(value) -> Fraction:
    """Coerce int / Fraction / 'p/q' text to a Fraction. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInput(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise InvalidInput(f"not a rational: {value!r}") from e
    raise InvalidInput(f"not an exact rational: {value!r}")


def int_array(values) -> np.ndarray:
    """int64 array when every entry is safely small, else an object array of ints."""
    flat = [int(v) for v in np.asarray(values, dtype=object).ravel()]
    shape = np.shape(values)
    if all(-_INT64_SAFE < v < _INT64_SAFE for v in flat):
        return np.array(flat, dtype=np.int64).reshape(shape)
    arr = np.empty(len(flat), dtype=object)
    arr[:] = flat
    return arr.reshape(shape)


def common_denominator(values: Iterable[Fraction], start: int = 1) -> int:
    den = start
    for v in values:
        den = math.lcm(den, v.denominator)
    return den


def simplest_rational(lo: Fraction, hi: XRat = INF,
                      lo_closed: bool = True, hi_closed: bool = True) -> Optional[Fraction]:
    """The rational of least denominator (then least numerator) in the interval.

    ``hi`` may be ``INF``; ``None`` is returned for an empty interval.
    Assumes ``lo >= 0``.
    """
    if hi != INF and (hi < lo or (hi == lo and not (lo_closed and hi_closed))):
        return None
    fl = math.floor(lo)
    first = fl if (lo_closed and fl == lo) else fl + 1
    if hi == INF or first < hi or (first == hi and hi_closed):
        return Fraction(first)
    # no integer inside: lo and hi share the integer part fl
    rest = simplest_rational(
        1 / (hi - fl),
        INF if lo == fl else 1 / (lo - fl),
        hi_closed, lo_closed,
    )
    return fl + 1 / rest


def is_metric_triple(a, b, c) -> bool:
    if a < 0 or b < 0 or c < 0:
        raise InvalidInput(f"negative value in triple ({a}, {b}, {c})")
    return abs(a - b) <= c <= a + b


class FiniteMetricSpace:
    """An immutable finite metric space with exact rational distances.

    Build one with :func:`validate_space`; internal constructors skip the
    triangle scan when the caller already guarantees it.
    """

    def __init__(self, nums: np.ndarray, den: int, labels: Optional[Sequence[str]] = None):
        nums = np.asarray(nums)
        if nums.ndim != 2 or nums.shape[0] != nums.shape[1]:
            raise InvalidInput("distance table must be square")
        nums.setflags(write=False)
        self.nums = nums
        self.den = int(den)
        self.labels = tuple(labels) if labels is not None else None

    # Construction helpers

    @classmethod
    def empty(cls) -> 'FiniteMetricSpace':
        return cls(np.zeros((0, 0), dtype=np.int64), 1)

    @classmethod
    def point(cls) -> 'FiniteMetricSpace':
        return cls(np.zeros((1, 1), dtype=np.int64), 1)

    @classmethod
    def _from_fractions(cls, table, labels=None) -> 'FiniteMetricSpace':
        n = len(table)
        den = common_denominator(v for row in table for v in row)
        nums = int_array([[int(table[i][j] * den) for j in range(n)] for i in range(n)]) \
            if n else np.zeros((0, 0), dtype=np.int64)
        return cls(nums, den, labels)

    # Queries

    @property
    def n(self) -> int:
        return self.nums.shape[0]

    def __len__(self) -> int:
        return self.n

    def d(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.nums[i, j]), self.den)

    @cached_property
    def table(self) -> tuple:
        return tuple(tuple(self.d(i, j) for j in range(self.n)) for i in range(self.n))

    def scaled_to(self, den: int) -> np.ndarray:
        """Numerator matrix over ``den`` (a multiple of self.den)."""
        factor = den // self.den
        if factor == 1:
            return self.nums
        if self.nums.dtype == np.int64 and self.nums.size and \
                int(np.abs(self.nums).max()) * factor < _INT64_SAFE:
            return self.nums * factor
        return int_array(self.nums.astype(object) * factor)

    def extend(self, column: Sequence[Fraction]) -> 'FiniteMetricSpace':
        """New space with one extra point at the given distances (no validation)."""
        n = self.n
        den = common_denominator(column, self.den)
        old = self.scaled_to(den)
        col = [int(v * den) for v in column]
        small = old.dtype == np.int64 and all(-_INT64_SAFE < v < _INT64_SAFE for v in col)
        big = np.zeros((n + 1, n + 1), dtype=np.int64 if small else object)
        big[:n, :n] = old
        big[n, :n] = col
        big[:n, n] = col
        labels = None if self.labels is None else self.labels + (f"p{n}",)
        return FiniteMetricSpace(big, den, labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        if self.n != other.n:
            return False
        den = math.lcm(self.den, other.den)
        return bool(np.array_equal(self.scaled_to(den), other.scaled_to(den)))

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        rows = '; '.join(' '.join(str(v) for v in row) for row in self.table)
        return f"FiniteMetricSpace(n={self.n}, [{rows}])"


def validate_space(table, labels: Optional[Sequence[str]] = None) -> FiniteMetricSpace:
    """Check a square table of rationals and return the space, or raise."""
    rows = [[to_rat(v) for v in row] for row in table]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise InvalidInput("distance table must be square")
    for i in range(n):
        if rows[i][i] != 0:
            raise InvalidInput(f"d({i},{i}) must be 0")
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise Asymmetry(i, j)
            if rows[i][j] <= 0:
                raise ZeroOffDiagonal(i, j)
    space = FiniteMetricSpace._from_fractions(rows, labels)
    D = space.nums
    violations = []
    for k in range(n):
        bad = D > D[:, k:k + 1] + D[k:k + 1, :]
        for i, j in np.argwhere(bad):
            if i < j and k not in (i, j):
                violations.append((int(i), int(j), k))
    if violations:
        raise TriangleViolation(sorted(violations))
    return space


def restrict(M: FiniteMetricSpace, points: Sequence[int]) -> FiniteMetricSpace:
    points = list(points)
    for p in points:
        if not 0 <= p < M.n:
            raise InvalidInput(f"point {p} out of range for a {M.n}-point space")
    idx = np.array(points, dtype=np.int64)
    sub = M.nums[np.ix_(idx, idx)] if points else np.zeros((0, 0), dtype=np.int64)
    labels = None if M.labels is None else tuple(M.labels[p] for p in points)
    return FiniteMetricSpace(np.array(sub), M.den, labels)


def dist_set(M: FiniteMetricSpace) -> list:
    if M.n == 0:
        return []
    return [Fraction(int(v), M.den) for v in np.unique(M.nums)]


@dataclass(frozen=True)
class TypeFunction:
    """A prospective point: positive distances to the points of ``dom``."""
    host: FiniteMetricSpace
    items: tuple  # ((point, Fraction), ...) sorted by point

    @classmethod
    def of(cls, host: FiniteMetricSpace, values: Mapping[int, object]) -> 'TypeFunction':
        items = tuple(sorted((int(p), to_rat(v)) for p, v in values.items()))
        for p, v in items:
            if not 0 <= p < host.n:
                raise InvalidInput(f"type domain point {p} out of range")
            if v <= 0:
                raise InvalidInput(f"type value at {p} must be positive, got {v}")
        return cls(host, items)

    @property
    def dom(self) -> tuple:
        return tuple(p for p, _ in self.items)

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self.items)

    def __call__(self, p: int) -> Fraction:
        return dict(self.items)[p]

    def key(self) -> tuple:
        return self.items

    def __str__(self) -> str:
        dom = ','.join(str(p) for p in self.dom)
        vals = ','.join(str(v) for v in self.values)
        return f"{dom}:{vals}"


def metric_violation(M: FiniteMetricSpace, t: TypeFunction) -> Optional[tuple]:
    """First pair of dom(t) breaking |t(x)-t(y)| <= d(x,y) <= t(x)+t(y), if any."""
    items = t.items
    for a in range(len(items)):
        x, tx = items[a]
        for b in range(a + 1, len(items)):
            y, ty = items[b]
            if not is_metric_triple(tx, ty, M.d(x, y)):
                return (x, y)
    return None


def span_space(M: FiniteMetricSpace, t: TypeFunction) -> FiniteMetricSpace:
    """restrict(M, dom t) plus one new last point at the prescribed distances."""
    bad = metric_violation(M, t)
    if bad is not None:
        raise NotMetricType(*bad)
    return restrict(M, t.dom).extend(list(t.values))


def typeset(M: FiniteMetricSpace, t: TypeFunction) -> list:
    mask = np.ones(M.n, dtype=bool)
    for p, v in t.items:
        scaled = v * M.den
        if scaled.denominator != 1:
            return []
        mask &= M.nums[:, p] == int(scaled)
    mask[list(t.dom)] = False
    return [int(i) for i in np.flatnonzero(mask)]


@dataclass(frozen=True)
class PartialIsometry:
    source: FiniteMetricSpace
    target: FiniteMetricSpace
    mapping: tuple  # ((i, j), ...) sorted by i

    def __post_init__(self):
        pairs = self.mapping
        if len({j for _, j in pairs}) != len(pairs) or len({i for i, _ in pairs}) != len(pairs):
            raise InvalidInput("partial isometry must be injective")
        for a in range(len(pairs)):
            for b in range(a + 1, len(pairs)):
                (i, j), (k, l) = pairs[a], pairs[b]
                if self.source.d(i, k) != self.target.d(j, l):
                    raise InvalidInput(f"map does not preserve d({i},{k})")

    @classmethod
    def of(cls, source, target, mapping: Mapping[int, int]) -> 'PartialIsometry':
        return cls(source, target, tuple(sorted(mapping.items())))

    @property
    def domain(self) -> tuple:
        return tuple(i for i, _ in self.mapping)

    @property
    def image(self) -> tuple:
        return tuple(j for _, j in self.mapping)

    def as_dict(self) -> dict:
        return dict(self.mapping)

    def __call__(self, i: int) -> int:
        return self.as_dict()[i]

    def extended(self, i: int, j: int) -> 'PartialIsometry':
        return PartialIsometry.of(self.source, self.target, {**self.as_dict(), i: j})


def find_isometry(A: FiniteMetricSpace, B: FiniteMetricSpace,
                  seed: Optional[PartialIsometry] = None,
                  cap: int = ISOMETRY_CAP) -> Optional[PartialIsometry]:
    """Extend ``seed`` to an isometric embedding of all of A into B, or None."""
    if A.n > cap:
        raise CapExceeded("find_isometry", A.n, cap)
    fixed = seed.as_dict() if seed is not None else {}
    order = list(fixed) + [p for p in range(A.n) if p not in fixed]
    An = A.nums.astype(object) * B.den
    Bn = B.nums.astype(object) * A.den
    images = [fixed[p] for p in order[:len(fixed)]]
    used = np.zeros(B.n, dtype=bool)
    used[images] = True

    def search(depth: int) -> bool:
        if depth == len(order):
            return True
        a = order[depth]
        mask = ~used
        for prev, img in zip(order[:depth], images):
            mask &= Bn[:, img] == An[a, prev]
        for y in np.flatnonzero(mask):
            used[y] = True
            images.append(int(y))
            if search(depth + 1):
                return True
            images.pop()
            used[y] = False
        return False

    if not search(len(fixed)):
        return None
    return PartialIsometry.of(A, B, dict(zip(order, images)))
