"""
Finite approximations of the countable universal space over R.

The builder starts from one point and realizes restricted type functions
in a fixed fair order: batch k holds every type whose newest domain point
is k (at most ``domain_cap`` domain points, values from the attached value
list), ordered by (domain size, domain, values). A type that already has
a realization is logged as skipped and does not advance the stage; only
realizations count as stages. New points come from amalgamating
Sp(t) with the current space over dom(t).
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .amalgamation import amalgamate
from .config import (
    AGES_CLASS_CAP, AGES_SIZE_CAP, BUILD_DOMAIN_CAP, BUILD_VALUE_BUDGET,
    DEFAULT_SEED, ISOMETRY_CAP, SATURATE_BUDGET, SWAP_ROUNDS,
)
from .distance_sets import DistanceSet, FiniteSet, SumClosure, dense_subset, swap_closed
from .errors import (
    CapExceeded, InvalidInput, NotRestricted, PreconditionError,
    SearchBudget, Unrealized,
)
from .four_values import Quadruple, check_four_values, leadsto
from .metric_core import (
    FiniteMetricSpace, PartialIsometry, TypeFunction, dist_set,
    find_isometry, metric_violation, span_space, typeset, validate_space,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LogEntry:
    stage: int
    type: str
    action: str    # 'realized' | 'skipped'
    point: int


@dataclass(frozen=True)
class ApproximationState:
    M: FiniteMetricSpace
    R: DistanceSet
    values: tuple
    domain_cap: int = BUILD_DOMAIN_CAP
    seed: int = DEFAULT_SEED
    batch: int = 0
    index: int = 0
    log: tuple = field(default=(), repr=False)
    stage: int = 0

    @classmethod
    def start(cls, R: DistanceSet, values: Sequence[Fraction], domain_cap: int = BUILD_DOMAIN_CAP,
              seed: int = DEFAULT_SEED) -> 'ApproximationState':
        vals = tuple(sorted({Fraction(v) for v in values if v > 0}))
        outside = [v for v in vals if not R.contains(v)]
        if outside:
            raise InvalidInput(f"attached value {outside[0]} is not in {R}")
        return cls(FiniteMetricSpace.point(), R, vals, domain_cap, seed)

    @property
    def settled(self) -> range:
        """Points whose whole batch has been processed."""
        return range(min(self.batch, self.M.n))

    @property
    def exhausted(self) -> bool:
        return self.batch >= self.M.n


# Schedule

def batch_size(k: int, n_values: int, domain_cap: int) -> int:
    return sum(math.comb(k, s - 1) * n_values ** s for s in range(1, domain_cap + 1))


def _unrank_combination(index: int, n: int, r: int) -> list:
    """The index-th r-subset of range(n) in lexicographic order."""
    out, start = [], 0
    for left in range(r, 0, -1):
        for x in range(start, n):
            block = math.comb(n - x - 1, left - 1)
            if index < block:
                out.append(x)
                start = x + 1
                break
            index -= block
    return out


def type_at(k: int, pos: int, values: Sequence[Fraction], domain_cap: int) -> tuple:
    """(dom, values) of the pos-th type of batch k."""
    V = len(values)
    for s in range(1, domain_cap + 1):
        count = math.comb(k, s - 1) * V ** s
        if pos < count:
            ci, vi = divmod(pos, V ** s)
            dom = _unrank_combination(ci, k, s - 1) + [k]
            digits = []
            for _ in range(s):
                vi, r = divmod(vi, V)
                digits.append(values[r])
            return tuple(dom), tuple(reversed(digits))
        pos -= count
    raise IndexError(f"position {pos} beyond batch {k}")


def _rotation(seed: int, k: int, total: int) -> int:
    if seed == 0 or total == 0:
        return 0
    return int(np.random.default_rng([seed, k]).integers(total))


def is_restricted(state: ApproximationState, t: TypeFunction) -> Optional[str]:
    """None when t is restricted, else the reason it is not."""
    bad = metric_violation(state.M, t)
    if bad is not None:
        return f"Sp(t) is not metric on the pair {bad}"
    outside = [v for v in t.values if not state.R.contains(v)]
    if outside:
        return f"value {outside[0]} is not in {state.R}"
    return None


# Operations

def realize_type(state: ApproximationState, t: TypeFunction) -> ApproximationState:
    if t.host is not state.M and t.host != state.M:
        t = TypeFunction(state.M, t.items)
    reason = is_restricted(state, t)
    if reason is not None:
        raise NotRestricted(reason)
    found = typeset(state.M, t)
    if found:
        entry = LogEntry(state.stage, str(t), 'skipped', found[0])
        return replace(state, log=state.log + (entry,))
    stage = state.stage + 1
    result = amalgamate(span_space(state.M, t), state.M, {k: p for k, p in enumerate(t.dom)}, state.R)
    M = result.C
    point = M.n - 1
    assert typeset(M, TypeFunction(M, t.items)) == [point]
    logger.debug(f"stage {stage}: realized {t} at point {point}")
    entry = LogEntry(stage, str(t), 'realized', point)
    return replace(state, M=M, log=state.log + (entry,), stage=stage)


def step(state: ApproximationState) -> ApproximationState:
    """Process the next restricted type of the schedule; idle once it runs dry."""
    batch, index = state.batch, state.index
    while batch < state.M.n:
        total = batch_size(batch, len(state.values), state.domain_cap)
        if index >= total:
            batch, index = batch + 1, 0
            continue
        pos = (index + _rotation(state.seed, batch, total)) % total
        dom, vals = type_at(batch, pos, state.values, state.domain_cap)
        index += 1
        t = TypeFunction(state.M, tuple(zip(dom, vals)))
        if metric_violation(state.M, t) is not None:
            continue
        return realize_type(replace(state, batch=batch, index=index), t)
    return replace(state, batch=batch, index=index)


def attached_values(R: DistanceSet, budget: int = BUILD_VALUE_BUDGET, swap_rounds: int = 0) -> tuple:
    if isinstance(R, FiniteSet):
        return tuple(v for v in R.values if v > 0)
    if isinstance(R, SumClosure) and R.is_finite:
        return tuple(v for v in R.elements() if v > 0)
    prefix = [v for v in dense_subset(R, budget + 1, swap_rounds=0) if v > 0][:budget]
    if swap_rounds:
        prefix = swap_closed(R, prefix, swap_rounds)
    return tuple(v for v in prefix if v > 0)


def build(R: DistanceSet, stages: int, seed: int = DEFAULT_SEED, domain_cap: int = BUILD_DOMAIN_CAP,
          values: Optional[Sequence[Fraction]] = None) -> ApproximationState:
    verdict = check_four_values(R)
    if verdict.holds is False:
        raise PreconditionError(f"{R} fails the 4-values condition (witness {verdict.witness})")
    if verdict.holds is None:
        logger.warning(f"4-values for {R} is undecided; building anyway")
    if values is None:
        values = attached_values(R, swap_rounds=SWAP_ROUNDS if verdict.holds else 0)
    state = ApproximationState.start(R, values, domain_cap, seed)
    logger.info(f"Building over {R} with values {[str(v) for v in state.values]} for {stages} stages…")
    while state.stage < stages:
        nxt = step(state)
        if len(nxt.log) == len(state.log):
            logger.info(f"schedule exhausted after {nxt.stage} stages")
            state = nxt
            break
        state = nxt
    logger.info(f"Build finished: {state.M.n} points, stage {state.stage}, batch {state.batch}")
    return state


@dataclass(frozen=True)
class AuditReport:
    passed: bool
    checked: int
    realized: int
    pending: tuple   # type strings


def audit_extension(state: ApproximationState, domain_cap: int, value_set: Sequence[Fraction],
                    points: Optional[Sequence[int]] = None) -> AuditReport:
    pts = list(state.settled if points is None else points)
    vals = sorted({Fraction(v) for v in value_set if v > 0})
    checked = realized = 0
    pending = []
    for s in range(1, domain_cap + 1):
        for dom in itertools.combinations(pts, s):
            for combo in itertools.product(vals, repeat=s):
                t = TypeFunction(state.M, tuple(zip(dom, combo)))
                if is_restricted(state, t) is not None:
                    continue
                checked += 1
                if typeset(state.M, t):
                    realized += 1
                else:
                    pending.append(str(t))
    return AuditReport(not pending, checked, realized, tuple(pending))


def extend_isometry(state: ApproximationState, f: PartialIsometry, target_point: int,
                    budget: Optional[int] = None) -> tuple:
    """Extend f to ``target_point``; returns (state, extension).

    With ``budget=None`` a missing realization is produced directly,
    otherwise up to ``budget`` schedule steps are run before giving up.
    """
    if target_point in f.domain:
        raise InvalidInput(f"point {target_point} is already in the domain")
    mapping = f.as_dict()
    items = tuple(sorted((img, state.M.d(x, target_point)) for x, img in mapping.items()))

    def candidates(st):
        found = typeset(st.M, TypeFunction(st.M, items))
        return ([target_point] if target_point in found else []) + [y for y in found if y != target_point]

    found = candidates(state)
    if not found:
        t = TypeFunction(state.M, items)
        if budget is None:
            state = realize_type(state, t)
        else:
            for _ in range(budget):
                state = step(state)
                if candidates(state):
                    break
        found = candidates(state)
        if not found:
            raise Unrealized(str(t))
    ext = PartialIsometry.of(state.M, state.M, {**mapping, target_point: found[0]})
    return state, ext


def embed_space(state: ApproximationState, N: FiniteMetricSpace) -> tuple:
    """Embed N point by point, realizing a type per point when needed."""
    if N.n == 0:
        return state, PartialIsometry.of(N, state.M, {})
    images = [0]
    for i in range(1, N.n):
        items = tuple(sorted((images[j], N.d(i, j)) for j in range(i)))
        t = TypeFunction(state.M, items)
        found = typeset(state.M, t)
        if not found:
            state = realize_type(state, t)
            found = typeset(state.M, TypeFunction(state.M, items))
        images.append(found[0])
    return state, PartialIsometry.of(N, state.M, dict(enumerate(images)))


def swap_witness_in(M: FiniteMetricSpace, x: Fraction, q: Quadruple) -> Optional[tuple]:
    """Points (v, w, p, q) of M realizing x leading to q, with y = d(p, q); else None.

    v, w sit at distance x, p at (a, b) from (v, w) and q at (d, c).
    """
    if not leadsto(x, q):
        raise InvalidInput(f"{x} does not lead to {q}")
    for v in range(M.n):
        for w in range(M.n):
            if v == w or M.d(v, w) != x:
                continue
            ps = typeset(M, TypeFunction(M, tuple(sorted(((v, q.a), (w, q.b))))))
            qs = typeset(M, TypeFunction(M, tuple(sorted(((v, q.d), (w, q.c))))))
            for p in ps:
                for r in qs:
                    if p != r:
                        return (v, w, p, r), M.d(p, r)
    return None


# Ages

def _canonical(table: Sequence[Sequence[Fraction]]) -> tuple:
    n = len(table)
    pairs = list(itertools.combinations(range(n), 2))
    return min(tuple(table[perm[i]][perm[j]] for i, j in pairs)
               for perm in itertools.permutations(range(n)))


def age_classes(values: Sequence[Fraction], size: int, cap: int = AGES_CLASS_CAP) -> list:
    """One representative per isometry class of metric spaces on ``size`` points over ``values``."""
    vals = sorted({Fraction(v) for v in values if v > 0})
    if size <= 1:
        return [FiniteMetricSpace.empty() if size == 0 else FiniteMetricSpace.point()]
    pairs = list(itertools.combinations(range(size), 2))
    total = len(vals) ** len(pairs)
    if total > cap:
        raise CapExceeded("age_classes", total, cap)
    seen = {}
    for combo in itertools.product(vals, repeat=len(pairs)):
        table = [[Fraction(0)] * size for _ in range(size)]
        for (i, j), v in zip(pairs, combo):
            table[i][j] = table[j][i] = v
        if any(table[i][j] > table[i][k] + table[k][j]
               for i, j in pairs for k in range(size) if k not in (i, j)):
            continue
        key = _canonical(table)
        if key not in seen:
            seen[key] = validate_space(table)
    return [seen[k] for k in sorted(seen)]


def embeds(N: FiniteMetricSpace, M: FiniteMetricSpace) -> bool:
    return find_isometry(N, M, cap=max(ISOMETRY_CAP, N.n)) is not None


def age_complete(M: FiniteMetricSpace, values: Sequence[Fraction], size_cap: int) -> bool:
    return all(embeds(N, M) for size in range(2, size_cap + 1) for N in age_classes(values, size))


def ages_equal(M: FiniteMetricSpace, N: FiniteMetricSpace, size_cap: int = 4) -> bool:
    if size_cap > AGES_SIZE_CAP:
        raise CapExceeded("ages_equal", size_cap, AGES_SIZE_CAP)
    if dist_set(M) != dist_set(N):
        return False
    vals = [v for v in dist_set(M) if v > 0]
    for size in range(3, size_cap + 1):
        for cls in age_classes(vals, size):
            if embeds(cls, M) != embeds(cls, N):
                logger.debug(f"age difference at {cls!r}")
                return False
    return True


def saturate(state: ApproximationState, size_cap: int = 4, budget: int = SATURATE_BUDGET) -> ApproximationState:
    """Step until every space on at most ``size_cap`` points over the values embeds in M."""
    if age_complete(state.M, state.values, size_cap):
        return state
    for _ in range(budget):
        before = state.batch
        state = step(state)
        if state.batch != before or state.exhausted:
            if age_complete(state.M, state.values, size_cap):
                logger.info(f"saturated at stage {state.stage} with {state.M.n} points")
                return state
            if state.exhausted:
                break
    raise SearchBudget(f"saturate(size_cap={size_cap})", budget)
