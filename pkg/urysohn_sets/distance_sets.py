"""
Candidate distance sets R and the order/topology queries the deciders need.

Four representations share the DistanceSet interface: FiniteSet (and its
special case OmegaSegment), IntervalUnion with optional rays and
rational-points components, and SumClosure.
"""
from __future__ import annotations

import bisect
import itertools
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .config import DENSE_BUDGET, SUMCLOSURE_SCAN, SWAP_ROUNDS
from .errors import EmptyInterval, InvalidInput, ZeroMissing
from .metric_core import INF, XRat, common_denominator, is_metric_triple, simplest_rational, to_rat

logger = logging.getLogger(__name__)


def _fmt(v: XRat) -> str:
    return 'inf' if v == INF else str(v)


def _pick_key(v: Fraction) -> tuple:
    return (v.denominator, v.numerator)


@dataclass(frozen=True)
class SetTrait:
    countable: bool
    closed: bool
    zero_limit: bool
    notes: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class WindowHull:
    """inf/sup of R inside an open window, with attainment flags."""
    inf: Fraction
    inf_attained: bool
    sup: Fraction
    sup_attained: bool


class DistanceSet(ABC):

    @abstractmethod
    def contains(self, q: Fraction) -> bool: ...

    @abstractmethod
    def range_pick(self, lo: Fraction, hi: XRat,
                   lo_open: bool = False, hi_open: bool = False) -> Optional[Fraction]:
        """Canonical element of R in the interval between lo and hi, or None."""

    @abstractmethod
    def traits(self) -> SetTrait: ...

    @abstractmethod
    def closure(self) -> 'DistanceSet': ...

    @abstractmethod
    def has_right_gap(self, x: Fraction) -> bool:
        """x in R and (x, x+eps) misses R for some eps > 0."""

    @abstractmethod
    def is_isolated(self, x: Fraction) -> bool: ...

    @abstractmethod
    def r_paren(self) -> 'FiniteSet': ...

    @abstractmethod
    def isolated_points(self) -> 'FiniteSet': ...

    @abstractmethod
    def grid(self, max_denominator: int, cap: Fraction) -> 'FiniteSet': ...

    @abstractmethod
    def window_hull(self, lo: Fraction, hi: Fraction) -> Optional[WindowHull]: ...

    @property
    def is_finite(self) -> bool:
        return False

    def has_zero_limit(self) -> bool:
        return self.traits().zero_limit

    def __contains__(self, q) -> bool:
        return self.contains(to_rat(q))


class FiniteSet(DistanceSet):
    """A finite set of rationals. Holds 0 unless built as a query result."""

    def __init__(self, values: Iterable, require_zero: bool = True, bound: Optional[Fraction] = None):
        vals = sorted({to_rat(v) for v in values})
        if any(v < 0 for v in vals):
            raise InvalidInput("distances must be nonnegative")
        if require_zero and (not vals or vals[0] != 0):
            raise ZeroMissing()
        self.values = tuple(vals)
        # set when the set is a truncated enumeration of an infinite one
        self.bound = bound

    @property
    def is_finite(self) -> bool:
        return True

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, FiniteSet) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __str__(self):
        return '{' + ', '.join(str(v) for v in self.values) + '}'

    def __repr__(self):
        return f"FiniteSet({self})"

    def contains(self, q):
        i = bisect.bisect_left(self.values, q)
        return i < len(self.values) and self.values[i] == q

    def range_pick(self, lo, hi, lo_open=False, hi_open=False):
        i = (bisect.bisect_right if lo_open else bisect.bisect_left)(self.values, lo)
        if i == len(self.values):
            return None
        v = self.values[i]
        if v < hi or (v == hi and not hi_open):
            return v
        return None

    def traits(self):
        return SetTrait(True, True, False, {
            'countable': 'finite set',
            'closed': 'finite sets are closed',
            'zero_limit': 'finite set has a least positive element',
        })

    def closure(self):
        return self

    def has_right_gap(self, x):
        return self.contains(x)

    def is_isolated(self, x):
        return self.contains(x)

    def r_paren(self):
        return FiniteSet(self.values, require_zero=False, bound=self.bound)

    def isolated_points(self):
        return FiniteSet(self.values, require_zero=False, bound=self.bound)

    def grid(self, max_denominator, cap):
        return FiniteSet((v for v in self.values if v <= cap and v.denominator <= max_denominator),
                         require_zero=False)

    def window_hull(self, lo, hi):
        inside = [v for v in self.values if lo < v < hi]
        if not inside:
            return None
        return WindowHull(inside[0], True, inside[-1], True)


class OmegaSegment(FiniteSet):
    """The initial segment {0, 1, ..., n-1} of the naturals."""

    def __init__(self, n: int):
        if n < 1:
            raise ZeroMissing()
        self.n = n
        super().__init__(range(n))

    def __str__(self):
        return f"omega({self.n})"

    def __repr__(self):
        return f"OmegaSegment({self.n})"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: XRat
    lo_closed: bool = True
    hi_closed: bool = True
    rational: bool = False

    def __post_init__(self):
        if self.hi == INF and self.hi_closed:
            raise InvalidInput("an infinite endpoint must be open")
        if self.hi < self.lo or (self.hi == self.lo and not (self.lo_closed and self.hi_closed)):
            raise EmptyInterval(str(self))

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, q: Fraction) -> bool:
        above = q > self.lo or (q == self.lo and self.lo_closed)
        below = q < self.hi or (q == self.hi and self.hi_closed)
        return above and below

    def clip(self, lo: Fraction, hi: XRat, lo_open: bool, hi_open: bool) -> Optional['Interval']:
        """Intersection with the interval from lo to hi, or None."""
        if lo > self.lo or (lo == self.lo and lo_open):
            nlo, nlo_closed = lo, not lo_open
        else:
            nlo, nlo_closed = self.lo, self.lo_closed
        if hi < self.hi or (hi == self.hi and hi_open):
            nhi, nhi_closed = hi, not hi_open
        else:
            nhi, nhi_closed = self.hi, self.hi_closed
        if nhi == INF:
            nhi_closed = False
        if nhi < nlo or (nhi == nlo and not (nlo_closed and nhi_closed)):
            return None
        return Interval(nlo, nhi, nlo_closed, nhi_closed, self.rational)

    def simplest(self) -> Fraction:
        return simplest_rational(self.lo, self.hi, self.lo_closed, self.hi_closed)

    def __str__(self):
        if self.is_point:
            return '{' + str(self.lo) + '}'
        left = '[' if self.lo_closed else '('
        right = ']' if self.hi_closed else ')'
        return f"{'q' if self.rational else ''}{left}{self.lo},{_fmt(self.hi)}{right}"


def _touching(a: Interval, b: Interval) -> bool:
    """a starts no later than b and their union is connected."""
    if b.lo < a.hi:
        return True
    return b.lo == a.hi and (a.hi_closed or b.lo_closed)


def _merge(a: Interval, b: Interval) -> Interval:
    rational = a.rational if not a.is_point else b.rational
    if b.hi == INF or (a.hi != INF and (b.hi > a.hi or (b.hi == a.hi and b.hi_closed))):
        hi, hi_closed = b.hi, b.hi_closed
    else:
        hi, hi_closed = a.hi, a.hi_closed
    lo_closed = a.lo_closed or (b.lo == a.lo and b.lo_closed)
    return Interval(a.lo, hi, lo_closed, hi_closed and hi != INF, rational)


def normalize_components(components: Iterable[Interval]) -> tuple:
    items = sorted(components, key=lambda c: (c.lo, not c.lo_closed))
    stack = []
    for comp in items:
        if stack and _touching(stack[-1], comp):
            top = stack[-1]
            flags_agree = top.is_point or comp.is_point or top.rational == comp.rational
            if flags_agree:
                stack[-1] = _merge(top, comp)
                continue
            if comp.lo < top.hi or (comp.lo == top.hi and top.hi_closed and comp.lo_closed):
                raise InvalidInput(f"rational-points component overlaps a real one: {top} u {comp}")
        stack.append(comp)
    return tuple(stack)


class IntervalUnion(DistanceSet):
    """Finite union of intervals with rational endpoints, rays allowed.

    A component flagged ``rational`` stands for its rational points only.
    """

    def __init__(self, components: Iterable[Interval]):
        comps = normalize_components(components)
        if not comps or not comps[0].contains(Fraction(0)):
            raise ZeroMissing()
        if comps[0].lo < 0:
            raise InvalidInput("distances must be nonnegative")
        self.components = comps

    def __eq__(self, other):
        return isinstance(other, IntervalUnion) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __str__(self):
        return ' u '.join(str(c) for c in self.components)

    def __repr__(self):
        return f"IntervalUnion({self})"

    def _component_of(self, q) -> Optional[Interval]:
        for comp in self.components:
            if comp.contains(q):
                return comp
        return None

    @property
    def finite_endpoints(self) -> list:
        pts = set()
        for c in self.components:
            pts.add(c.lo)
            if c.hi != INF:
                pts.add(c.hi)
        return sorted(pts)

    @property
    def max_finite_endpoint(self) -> Fraction:
        return self.finite_endpoints[-1]

    @property
    def gaps(self) -> list:
        """Maximal open-or-half-open gaps between consecutive components.

        Each gap is (lo, lo_open, hi, hi_open): numbers g with lo < g (or <=
        when not lo_open) and g < hi (or <=) avoid R; hi may be INF.
        """
        out = []
        comps = self.components
        for left, right in zip(comps, comps[1:] + (None,)):
            if left.hi == INF:
                continue
            if right is not None and right.lo == left.hi and (left.hi_closed or right.lo_closed):
                # touching components of different kinds leave no gap
                continue
            out.append((left.hi, left.hi_closed,
                        INF if right is None else right.lo,
                        True if right is None else right.lo_closed))
        return out

    def contains(self, q):
        return self._component_of(q) is not None

    def range_pick(self, lo, hi, lo_open=False, hi_open=False):
        best = None
        for comp in self.components:
            piece = comp.clip(lo, hi, lo_open, hi_open)
            if piece is None:
                continue
            v = piece.simplest()
            if best is None or _pick_key(v) < _pick_key(best):
                best = v
        return best

    def traits(self):
        nondegenerate = [c for c in self.components if not c.is_point]
        countable = all(c.rational for c in nondegenerate)
        open_ends = [str(c) for c in self.components
                     if not c.lo_closed or (c.hi != INF and not c.hi_closed)]
        rational_parts = [str(c) for c in nondegenerate if c.rational]
        closed = not open_ends and not rational_parts
        zero_limit = not self.components[0].is_point
        notes = {
            'countable': ('every nondegenerate component is rational-only' if countable
                          else f"nondegenerate real component {next(str(c) for c in nondegenerate if not c.rational)}"),
            'closed': ('all finite endpoints closed' if closed
                       else f"open endpoint or rational-only part in {', '.join(open_ends + rational_parts)}"),
            'zero_limit': (f"0 lies in nondegenerate component {self.components[0]}" if zero_limit
                           else f"least positive element is {self.components[1].lo if len(self.components) > 1 else 'absent'}"),
        }
        return SetTrait(countable, closed, zero_limit, notes)

    def closure(self):
        return IntervalUnion(Interval(c.lo, c.hi, True, c.hi != INF) for c in self.components)

    def has_right_gap(self, x):
        comp = self._component_of(x)
        if comp is None or comp.hi != x:
            return False
        return not any(c.lo == x and c is not comp for c in self.components)

    def is_isolated(self, x):
        comp = self._component_of(x)
        return comp is not None and comp.is_point

    def r_paren(self):
        return FiniteSet((c.hi for c in self.components
                          if c.hi != INF and c.hi_closed and self.has_right_gap(c.hi)),
                         require_zero=False)

    def isolated_points(self):
        return FiniteSet((c.lo for c in self.components if c.is_point), require_zero=False)

    def grid(self, max_denominator, cap):
        found = set()
        for comp in self.components:
            top = cap if comp.hi == INF else min(cap, comp.hi)
            for q in range(1, max_denominator + 1):
                for p in range(math.ceil(comp.lo * q), math.floor(top * q) + 1):
                    v = Fraction(p, q)
                    if comp.contains(v):
                        found.add(v)
        return FiniteSet(found, require_zero=False)

    def window_hull(self, lo, hi):
        pieces = [p for p in (c.clip(lo, hi, True, True) for c in self.components) if p is not None]
        if not pieces:
            return None
        first, last = pieces[0], pieces[-1]
        return WindowHull(first.lo, first.lo_closed, last.hi, last.hi_closed)

    def dense_anchors(self) -> list:
        """Isolated points, then closed finite endpoints, ascending within each group."""
        isolated = [c.lo for c in self.components if c.is_point]
        closed_ends = sorted({e for c in self.components if not c.is_point
                              for e, closed in ((c.lo, c.lo_closed), (c.hi, c.hi_closed))
                              if closed and e != INF})
        return isolated + [e for e in closed_ends if e not in isolated]


class SumClosure(DistanceSet):
    """Nonnegative integer combinations of positive generators, capped."""

    def __init__(self, generators: Sequence, cap: XRat = INF, cap_closed: bool = True):
        gens = sorted({to_rat(g) for g in generators})
        if not gens or gens[0] <= 0:
            raise InvalidInput("sum-closure generators must be positive")
        if cap != INF:
            cap = to_rat(cap)
            if cap < 0 or (cap == 0 and not cap_closed):
                raise ZeroMissing()
        self.generators = tuple(gens)
        self.cap = cap
        self.cap_closed = cap_closed and cap != INF
        self.scale = common_denominator(gens)
        self._int_gens = tuple(int(g * self.scale) for g in gens)
        self._period = math.gcd(*self._int_gens)
        # every multiple of the period from here on is a sum (Schur's bound)
        first, last = self._int_gens[0] // self._period, self._int_gens[-1] // self._period
        self._conductor = (first - 1) * (last - 1) * self._period

    def __eq__(self, other):
        return (isinstance(other, SumClosure) and self.generators == other.generators
                and self.cap == other.cap and self.cap_closed == other.cap_closed)

    def __hash__(self):
        return hash((self.generators, self.cap, self.cap_closed))

    def __str__(self):
        gens = ', '.join(str(g) for g in self.generators)
        return f"sumclosed({gens}; {_fmt(self.cap)})"

    def __repr__(self):
        return f"SumClosure({self})"

    @property
    def is_finite(self):
        return self.cap != INF

    def _limit(self, hi: XRat) -> int:
        """Largest scaled integer admitted below min(hi, cap)."""
        top = hi if self.cap == INF else min(hi, self.cap)
        if top == INF:
            raise InvalidInput("unbounded scan of an infinite sum closure")
        lim = math.floor(top * self.scale)
        if top == self.cap and not self.cap_closed and Fraction(lim, self.scale) == self.cap:
            lim -= 1
        return lim

    def _reachable(self, limit: int) -> np.ndarray:
        reach = np.zeros(max(limit, -1) + 1, dtype=bool)
        if limit < 0:
            return reach
        reach[0] = True
        for g in self._int_gens:
            for offset in range(min(g, limit + 1)):
                reach[offset::g] = np.logical_or.accumulate(reach[offset::g])
        return reach

    def elements_upto(self, hi: XRat) -> list:
        reach = self._reachable(self._limit(hi))
        return [Fraction(int(k), self.scale) for k in np.flatnonzero(reach)]

    def elements(self) -> list:
        return self.elements_upto(INF)

    def to_finite(self) -> FiniteSet:
        return FiniteSet(self.elements())

    def contains(self, q):
        if q < 0 or (self.cap != INF and (q > self.cap or (q == self.cap and not self.cap_closed))):
            return False
        scaled = q * self.scale
        if scaled.denominator != 1:
            return False
        k = int(scaled)
        if k % self._period:
            return False
        if k >= self._conductor:
            return True
        return bool(self._reachable(k)[-1])

    def _first_at_least(self, k: int) -> int:
        """Smallest scaled sum >= k."""
        k = max(k, 0)
        if k >= self._conductor:
            return -(-k // self._period) * self._period
        reach = self._reachable(self._conductor)
        return k + int(np.flatnonzero(reach[k:])[0])

    def range_pick(self, lo, hi, lo_open=False, hi_open=False):
        if lo == INF:
            return None
        scaled_lo = lo * self.scale
        k = math.floor(scaled_lo) + 1 if lo_open else math.ceil(scaled_lo)
        v = Fraction(self._first_at_least(k), self.scale)
        if hi != INF and (v > hi or (v == hi and hi_open)):
            return None
        if self.cap != INF and (v > self.cap or (v == self.cap and not self.cap_closed)):
            return None
        return v

    def traits(self):
        return SetTrait(True, True, False, {
            'countable': 'sum closure of finitely many generators',
            'closed': 'only finitely many elements below any bound',
            'zero_limit': f"least positive element is {self.generators[0]}",
        })

    def closure(self):
        return self

    def has_right_gap(self, x):
        return self.contains(x)

    def is_isolated(self, x):
        return self.contains(x)

    def _enumeration(self) -> FiniteSet:
        if self.cap != INF:
            return FiniteSet(self.elements(), require_zero=False)
        bound = Fraction(SUMCLOSURE_SCAN, self.scale)
        return FiniteSet(self.elements_upto(bound), require_zero=False, bound=bound)

    def r_paren(self):
        return self._enumeration()

    def isolated_points(self):
        return self._enumeration()

    def grid(self, max_denominator, cap):
        return FiniteSet((v for v in self.elements_upto(cap) if v.denominator <= max_denominator),
                         require_zero=False)

    def window_hull(self, lo, hi):
        inside = [v for v in self.elements_upto(hi) if lo < v < hi]
        if not inside:
            return None
        return WindowHull(inside[0], True, inside[-1], True)


def union_of(components: Sequence[Interval]) -> DistanceSet:
    """FiniteSet when every component is a point, else an IntervalUnion."""
    if all(c.is_point for c in components):
        return FiniteSet(c.lo for c in components)
    return IntervalUnion(components)


# Dense enumeration

def iter_dense(R: DistanceSet) -> Iterator[Fraction]:
    """Deterministic enumeration of a countable dense subset of R.

    Anchors (isolated points, then closed endpoints) come first; afterwards
    round n emits the new elements with denominator <= n below the
    round's height, ordered by (denominator, numerator).
    """
    if isinstance(R, FiniteSet):
        yield from R.values
        return
    if isinstance(R, SumClosure):
        if R.cap != INF:
            yield from R.elements()
            return
        for block in itertools.count():
            lo, hi = Fraction(block * SUMCLOSURE_SCAN, R.scale), Fraction((block + 1) * SUMCLOSURE_SCAN, R.scale)
            yield from (v for v in R.elements_upto(hi) if lo <= v < hi)
        return
    seen = set()
    for v in R.dense_anchors():
        seen.add(v)
        yield v
    top = R.max_finite_endpoint
    for n in itertools.count(1):
        height = top + n
        fresh = []
        for q in range(1, n + 1):
            for p in range(0, math.floor(height * q) + 1):
                v = Fraction(p, q)
                if v.denominator == q and v not in seen and R.contains(v):
                    fresh.append(v)
        fresh.sort(key=_pick_key)
        for v in fresh:
            seen.add(v)
            yield v


def swap_closed(R: DistanceSet, values: Sequence[Fraction], rounds: int, window: int = 16) -> list:
    """Add canonical swap values for quadruples drawn from the first ``window`` values.

    For every x, a >= max(b, c, d) from the window with (x,a,b), (x,c,d)
    metric and no current value y with (y,a,d), (y,c,b) metric, the
    canonical element of R in [max(|a-d|,|b-c|), min(a+d,b+c)] is appended.
    """
    out = list(values)
    for _ in range(rounds):
        pool = sorted(set(out[:window]))
        have = sorted(set(out))
        added = []
        for a, b, c, d in itertools.product(pool, repeat=4):
            if a < max(b, c, d):
                continue
            lo_x, hi_x = max(abs(a - b), abs(c - d)), min(a + b, c + d)
            i = bisect.bisect_left(pool, lo_x)
            if i == len(pool) or pool[i] > hi_x:
                continue
            u, l = max(abs(a - d), abs(b - c)), min(a + d, b + c)
            j = bisect.bisect_left(have, u)
            if j < len(have) and have[j] <= l:
                continue
            y = R.range_pick(u, l)
            if y is not None and y not in added:
                assert is_metric_triple(a, d, y) and is_metric_triple(c, b, y)
                added.append(y)
                have.insert(bisect.bisect_left(have, y), y)
        if not added:
            break
        out.extend(added)
    return out


def dense_subset(R: DistanceSet, budget: int = DENSE_BUDGET, swap_rounds: Optional[int] = None) -> list:
    """First ``budget`` values of the dense enumeration, plus swap witnesses.

    With ``swap_rounds`` unset the swap closure runs only when R is infinite
    and satisfies the 4-values condition. Added witnesses follow the prefix.
    """
    values = list(itertools.islice(iter_dense(R), budget))
    if swap_rounds is None:
        swap_rounds = 0
        if not isinstance(R, FiniteSet) and not R.is_finite:
            from .four_values import check_four_values
            if check_four_values(R).holds:
                swap_rounds = SWAP_ROUNDS
    if swap_rounds:
        values = swap_closed(R, values, swap_rounds)
    logger.debug(f"dense prefix of {R}: {len(values)} values")
    return values


def grid(R: DistanceSet, max_denominator: int, cap) -> FiniteSet:
    return R.grid(max_denominator, to_rat(cap))
