"""
Approximation machinery: perturbation thresholds, h-joins, rounding a
space into a dense subset, membership in the age of the completion, and
the final classification of a distance set.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .amalgamation import amalgamate
from .config import COMPLETION_BUDGET, COMPLETION_DENOMINATOR
from .distance_sets import DistanceSet, FiniteSet, _pick_key
from .errors import (
    HypothesisViolated, InvalidInput, NoSmallElement, PreconditionGap, SearchBudget,
)
from .four_values import FourValuesVerdict, check_four_values
from .metric_core import (
    INF, FiniteMetricSpace, dist_set, is_metric_triple, restrict, to_rat, validate_space,
)

logger = logging.getLogger(__name__)


# Perturbation threshold

def star(R: DistanceSet, x: Fraction) -> Fraction:
    """A positive element of R below x/2: x/3 when R has it, else the canonical one."""
    third = x / 3
    if R.contains(third):
        return third
    v = R.range_pick(Fraction(0), x / 2, lo_open=True, hi_open=True)
    if v is None:
        raise NoSmallElement(x / 2)
    return v


def gamma_chain(R: DistanceSet, m: int, r, h) -> list:
    """[h_0, ..., h_{m-1}] with h_{m-1} < min(h, r), each h_i in R and 2*h_i < h_{i+1}."""
    r, h = to_rat(r), to_rat(h)
    if m < 1 or r <= 0 or h <= 0:
        raise InvalidInput("gamma needs m >= 1 and positive r, h")
    bound = min(h, r)
    top = bound / 2 if R.contains(bound / 2) else R.range_pick(Fraction(0), bound, lo_open=True, hi_open=True)
    if top is None:
        raise NoSmallElement(bound)
    chain = [top]
    for _ in range(m - 1):
        chain.append(star(R, chain[-1]))
    chain.reverse()
    assert chain[-1] < bound and all(2 * a < b for a, b in zip(chain, chain[1:]))
    return chain


def gamma(R: DistanceSet, m: int, r, h) -> Fraction:
    return gamma_chain(R, m, r, h)[0]


# h-joins

@dataclass(frozen=True)
class JoinLevel:
    level: int
    l: Fraction     # largest pair distance of the previous join
    k: Fraction     # largest perturbation at the new point
    h: Fraction     # distance given to the new pair


def perturbation(A: FiniteMetricSpace, B: FiniteMetricSpace) -> Fraction:
    if A.n != B.n:
        raise InvalidInput(f"spaces have {A.n} and {B.n} points")
    return max((abs(A.d(i, j) - B.d(i, j)) for i in range(A.n) for j in range(i + 1, A.n)),
               default=Fraction(0))


def h_join_trace(A: FiniteMetricSpace, B: FiniteMetricSpace, h, R: DistanceSet, *, r,
                 pairing: Optional[Sequence[int]] = None) -> tuple:
    """(P, chain, trace): an h-join on a_0..a_{m-1}, b_0..b_{m-1}, with its audit trail."""
    h, r = to_rat(h), to_rat(r)
    if pairing is not None:
        B = restrict(B, pairing)
    m = A.n
    if m != B.n:
        raise InvalidInput(f"h_join needs equinumerous spaces, got {A.n} and {B.n}")
    for name, space in (('A', A), ('B', B)):
        dists = dist_set(space)
        outside = [v for v in dists if not R.contains(v)]
        if outside:
            raise InvalidInput(f"distance {outside[0]} of {name} is not in {R}")
        if len(dists) > 1 and dists[1] < r:
            raise InvalidInput(f"{name} has distance {dists[1]} below r = {r}")
    chain = gamma_chain(R, max(m, 1), r, h)
    pert = perturbation(A, B)
    if pert >= chain[0]:
        raise PreconditionGap(pert, chain[0])

    labels = [f"a{i}" for i in range(m)] + [f"b{i}" for i in range(m)]
    trace = []
    Q = None  # join of the first i pairs; points a_0..a_{i-1}, b_0..b_{i-1}
    for i in range(m):
        hi = chain[i]
        if Q is None:
            table = [[Fraction(0), hi], [hi, Fraction(0)]]
            trace.append(JoinLevel(0, Fraction(0), Fraction(0), hi))
        else:
            l = max(Q.d(j, i + j) for j in range(i))
            k = max(abs(A.d(i, j) - B.d(i, j)) for j in range(i))
            assert l + k <= hi
            a_star = amalgamate(restrict(A, range(i + 1)), Q, {j: j for j in range(i)}, R).C
            b_star = amalgamate(restrict(B, range(i + 1)), Q, {j: i + j for j in range(i)}, R).C
            size = 2 * (i + 1)
            # new layout: a_0..a_i, b_0..b_i
            pos = [j for j in range(i)] + [i + 1 + j for j in range(i)]
            table = [[Fraction(0)] * size for _ in range(size)]
            for x in range(2 * i):
                for y in range(2 * i):
                    table[pos[x]][pos[y]] = Q.d(x, y)
            for x in range(2 * i):
                table[i][pos[x]] = table[pos[x]][i] = a_star.d(2 * i, x)
                table[2 * i + 1][pos[x]] = table[pos[x]][2 * i + 1] = b_star.d(2 * i, x)
            table[i][2 * i + 1] = table[2 * i + 1][i] = hi
            trace.append(JoinLevel(i, l, k, hi))
        Q = validate_space(table)
        logger.debug(f"h-join level {i}: pair distance {hi}")
    P = FiniteMetricSpace(Q.nums, Q.den, labels) if m else FiniteMetricSpace.empty()
    assert all(P.d(i, m + i) < h for i in range(m))
    return P, chain, tuple(trace)


def h_join(A: FiniteMetricSpace, B: FiniteMetricSpace, h, R: DistanceSet, *, r,
           pairing: Optional[Sequence[int]] = None) -> FiniteMetricSpace:
    return h_join_trace(A, B, h, R, r=r, pairing=pairing)[0]


# Rounding into a dense subset

@dataclass(frozen=True)
class HatPlan:
    delta: Union[Fraction, float]
    I: tuple
    E: tuple
    K: tuple
    hat: dict = field(compare=False)

    def __call__(self, x: Fraction) -> Fraction:
        return self.hat[x]


def _delta(values: Sequence[Fraction]) -> Union[Fraction, float]:
    gaps = [y + x - z for x, y, z in itertools.product(values, repeat=3) if z < y + x]
    return min(gaps) / 3 if gaps else INF


def _as_dense(S) -> DistanceSet:
    if isinstance(S, DistanceSet):
        return S
    return FiniteSet(S, require_zero=False)


def hat_map(A: FiniteMetricSpace, R: DistanceSet, S=None, eps=Fraction(1, 10)) -> tuple:
    """(HatPlan, B): B has its distances in S, each within eps of A's, and is metric."""
    eps = to_rat(eps)
    S = R if S is None else _as_dense(S)
    values = dist_set(A) or [Fraction(0)]
    outside = [v for v in values if not R.contains(v)]
    if outside:
        raise InvalidInput(f"distance {outside[0]} of A is not in {R}")
    if not R.has_zero_limit():
        raise HypothesisViolated(f"0 is not a limit of {R}")
    delta = _delta(values)
    positive = [v for v in values if v > 0]
    I = [v for v in positive if R.is_isolated(v)]
    E = [v for v in positive if not R.has_right_gap(v)]
    K = sorted((v for v in positive if R.has_right_gap(v) and not R.is_isolated(v)), reverse=True)
    missing = [v for v in I if not S.contains(v)]
    if missing:
        raise HypothesisViolated(f"isolated distance {missing[0]} is missing from the dense subset")

    hat = {Fraction(0): Fraction(0), **{v: v for v in I}}
    width = min(delta, eps)
    for e in E:
        pick = S.range_pick(e, e + width, lo_open=True, hi_open=True)
        if pick is None:
            if S is R:
                raise HypothesisViolated(f"{e} has a right gap in {R} but was classed as accumulating")
            raise SearchBudget(f"window ({e}, {e + width})", len(getattr(S, 'values', ())))
        hat[e] = pick
        width = (pick - e) / 3
    if not E:
        width = width / 3
    for k in K:
        pick = S.range_pick(k - width, k, lo_open=True, hi_open=True)
        if pick is None:
            raise SearchBudget(f"window ({k - width}, {k})", len(getattr(S, 'values', ())))
        hat[k] = pick
        width = (k - pick) / 3

    for x, y, z in itertools.combinations_with_replacement(values, 3):
        if is_metric_triple(x, y, z) and not is_metric_triple(hat[x], hat[y], hat[z]):
            raise HypothesisViolated(f"rounded triple ({hat[x]}, {hat[y]}, {hat[z]}) is not metric")
    plan = HatPlan(delta, tuple(I), tuple(E), tuple(K), hat)
    table = [[hat[A.d(i, j)] for j in range(A.n)] for i in range(A.n)]
    B = validate_space(table, A.labels)
    logger.debug(f"hat map over {len(values)} values, delta {delta}")
    return plan, B


# Completion age

@dataclass(frozen=True)
class CompletionVerdict:
    status: str                       # 'witness' | 'impossible' | 'unknown'
    B: Optional[FiniteMetricSpace] = None
    certificate: dict = field(default_factory=dict, compare=False)
    nodes: int = 0


def _window(R: DistanceSet, delta: Fraction, eps: Fraction) -> tuple:
    return max(delta - eps, Fraction(0)), delta + eps


def _candidates(R: DistanceSet, delta: Fraction, eps: Fraction, denominator: int) -> list:
    lo, hi = _window(R, delta, eps)
    out = []
    if delta > 0 and R.contains(delta):
        out.append(delta)
    pick = R.range_pick(lo, hi, lo_open=True, hi_open=True)
    if pick is not None and pick > 0 and pick not in out:
        out.append(pick)
    grid = [v for v in R.grid(denominator, hi).values if lo < v < hi and v > 0]
    grid.sort(key=lambda v: (abs(v - delta), _pick_key(v)))
    for v in grid:
        if v not in out:
            out.append(v)
    return out


def _triangle_impossible(hulls, i, j, k) -> Optional[dict]:
    edges = {(i, j): hulls[(i, j)], (i, k): hulls[(i, k)], (j, k): hulls[(j, k)]}
    for top in edges:
        legs = [e for e in edges if e != top]
        z, x, y = edges[top], edges[legs[0]], edges[legs[1]]
        reach = x.sup + y.sup
        if z.inf > reach or (z.inf == reach and not (z.inf_attained and x.sup_attained and y.sup_attained)):
            return {
                'triangle': (i, j, k), 'top': top,
                'top_inf': z.inf, 'top_inf_attained': z.inf_attained,
                'legs': tuple(legs), 'legs_sup': (x.sup, y.sup),
                'legs_sup_attained': (x.sup_attained, y.sup_attained),
            }
    return None


def completion_age_test(A: FiniteMetricSpace, R: DistanceSet, eps, budget: int = COMPLETION_BUDGET,
                        denominator: int = COMPLETION_DENOMINATOR) -> CompletionVerdict:
    eps = to_rat(eps)
    if all(R.contains(v) for v in dist_set(A)):
        return CompletionVerdict('witness', A, {'because': 'dist(A) is inside R'})
    n = A.n
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    hulls = {}
    for e in edges:
        lo, hi = _window(R, A.d(*e), eps)
        hull = R.window_hull(lo, hi)
        if hull is None or hull.sup <= 0:
            return CompletionVerdict('impossible', None, {'edge': e, 'window': (lo, hi)})
        hulls[e] = hull
    for i, j, k in itertools.combinations(range(n), 3):
        cert = _triangle_impossible(hulls, i, j, k)
        if cert is not None:
            return CompletionVerdict('impossible', None, cert)

    cands = {e: _candidates(R, A.d(*e), eps, denominator) for e in edges}
    chosen = {}
    nodes = 0

    def consistent(e) -> bool:
        i, j = e
        for k in range(n):
            if k in (i, j):
                continue
            a, b = tuple(sorted((i, k))), tuple(sorted((j, k)))
            if a in chosen and b in chosen and not is_metric_triple(chosen[a], chosen[b], chosen[e]):
                return False
        return True

    def search(idx: int) -> bool:
        nonlocal nodes
        if idx == len(edges):
            return True
        e = edges[idx]
        for v in cands[e]:
            nodes += 1
            if nodes > budget:
                raise SearchBudget('completion_age_test', budget)
            chosen[e] = v
            if consistent(e) and search(idx + 1):
                return True
            del chosen[e]
        return False

    try:
        found = search(0)
    except SearchBudget:
        return CompletionVerdict('unknown', None, {'budget': budget}, nodes)
    if not found:
        return CompletionVerdict('unknown', None, {'exhausted': 'candidate lists', 'denominator': denominator}, nodes)
    table = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in chosen.items():
        table[i][j] = table[j][i] = v
    B = validate_space(table, A.labels)
    assert all(abs(B.d(i, j) - A.d(i, j)) < eps for i, j in edges)
    return CompletionVerdict('witness', B, {'perturbation': perturbation(A, B)}, nodes)


# Classification

URYSOHN = 'UrysohnAdmissible'
COUNTABLE_ONLY = 'CountableUniversalOnly'
INADMISSIBLE = 'Inadmissible'


@dataclass(frozen=True)
class Classification:
    verdict: str
    fourvalues: FourValuesVerdict
    closed: bool
    countable: bool
    zero_limit: bool
    notes: dict = field(default_factory=dict, compare=False)
    conditional: bool = False
    completion_distances: Optional[DistanceSet] = None


def decide(fourvalues: Optional[bool], closed: bool, countable: bool, zero_limit: bool) -> str:
    if fourvalues is False:
        return INADMISSIBLE
    if zero_limit:
        if closed:
            return URYSOHN
        return COUNTABLE_ONLY if countable else INADMISSIBLE
    return URYSOHN if countable else INADMISSIBLE


def classify(R: DistanceSet, **options) -> Classification:
    fv = check_four_values(R, **options)
    traits = R.traits()
    verdict = decide(fv.holds, traits.closed, traits.countable, traits.zero_limit)
    notes = dict(traits.notes)
    if fv.witness is not None:
        w = fv.witness
        notes['fourvalues'] = f"{w.x} leads to ({w.q.a},{w.q.b},{w.q.c},{w.q.d}) and R misses [{w.u},{w.l}]"
    else:
        notes['fourvalues'] = fv.details.get('because', f"decided by {fv.method}")
    completion = R.closure() if fv.holds is not False and traits.countable else None
    logger.info(f"{R}: {verdict} (4-values {fv.label})")
    return Classification(verdict, fv, traits.closed, traits.countable, traits.zero_limit,
                          notes, fv.holds is None, completion)
