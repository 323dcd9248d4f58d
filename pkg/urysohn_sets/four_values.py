"""
The 4-values condition.

x leads to (a,b,c,d) when (x,a,b) and (x,c,d) are metric triples and a is
the largest of the four. R satisfies the condition when every such
quadruple over R also admits a y in R making (y,a,d) and (y,c,b) metric,
i.e. R meets [max(|a-d|,|b-c|), min(a+d,b+c)].

Three deciders: exact enumeration for finite sets, exact cell
decomposition plus Fourier-Motzkin for interval unions, and a seeded
sampler over finite grids for anything else.
"""
from __future__ import annotations

import bisect
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .config import (
    CELL_CAP, CELL_GRID_BRANCH, CELL_GRID_DENOMINATOR, DEFAULT_SEED, DEFAULT_WORKERS, FALSIFY_BATCH,
    FALSIFY_CAP, FALSIFY_DENOMINATOR, FALSIFY_SAMPLES,
)
from .distance_sets import DistanceSet, FiniteSet, IntervalUnion, SumClosure
from .elimination import LinearSystem, ge
from .errors import CellExplosion
from .metric_core import INF, int_array, is_metric_triple

logger = logging.getLogger(__name__)

X, A, B, C, D = range(5)
# eliminate x first so that a is assigned first on the way back
ELIMINATION_ORDER = (X, D, C, B, A)


@dataclass(frozen=True)
class Quadruple:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def swapped(self) -> 'Quadruple':
        return Quadruple(self.a, self.d, self.c, self.b)


def leadsto(x, q: Quadruple) -> bool:
    return (is_metric_triple(x, q.a, q.b) and is_metric_triple(x, q.c, q.d)
            and q.a >= max(q.b, q.c, q.d))


def swap_interval(q: Quadruple) -> tuple:
    return max(abs(q.a - q.d), abs(q.b - q.c)), min(q.a + q.d, q.b + q.c)


def pair_sum_swap(q: Quadruple) -> Optional[Fraction]:
    """When a <= some pair sum of b, c, d, a value among a,b,c,d the swap leads to."""
    target = q.swapped()
    for y in (q.a, q.b, q.c, q.d):
        if is_metric_triple(y, target.a, target.b) and is_metric_triple(y, target.c, target.d):
            return y
    return None


@dataclass(frozen=True)
class Witness:
    x: Fraction
    q: Quadruple
    u: Fraction
    l: Fraction

    @classmethod
    def of(cls, x, a, b, c, d) -> 'Witness':
        q = Quadruple(a, b, c, d)
        u, l = swap_interval(q)
        return cls(x, q, u, l)

    def key(self) -> tuple:
        vals = (self.x, *self.q)
        den = 1
        for v in vals:
            den = math.lcm(den, v.denominator)
        return (den, self.q.a, self.q.b, self.q.c, self.q.d, self.x)

    def validate(self, R: DistanceSet) -> bool:
        return (all(R.contains(v) for v in (self.x, *self.q))
                and leadsto(self.x, self.q)
                and R.range_pick(self.u, self.l) is None)


@dataclass(frozen=True)
class FourValuesVerdict:
    holds: Optional[bool]          # None means unknown
    method: str
    witness: Optional[Witness] = None
    details: dict = field(default_factory=dict, compare=False)

    @property
    def label(self) -> str:
        return {True: 'holds', False: 'fails', None: 'unknown'}[self.holds]

    @property
    def exact(self) -> bool:
        return self.method != 'falsifier'


# Finite sets

def check_finite(R: FiniteSet, prune: bool = True) -> FourValuesVerdict:
    values = list(R.values)
    best = None
    checked = 0
    for ia, a in enumerate(values):
        below = values[:ia + 1]
        for b, c, d in itertools.product(below, repeat=3):
            if prune and not (a > b + c and a > b + d and a > c + d):
                continue
            lo, hi = max(abs(a - b), abs(c - d)), min(a + b, c + d)
            i = bisect.bisect_left(values, lo)
            if i == len(values) or values[i] > hi:
                continue
            checked += 1
            x = values[i]
            u, l = max(abs(a - d), abs(b - c)), min(a + d, b + c)
            j = bisect.bisect_left(values, u)
            if j < len(values) and values[j] <= l:
                continue
            w = Witness.of(x, a, b, c, d)
            if best is None or w.key() < best.key():
                best = w
    details = {'quadruples': checked, 'pruned': prune}
    if best is None:
        return FourValuesVerdict(True, 'exact-finite', None, details)
    return FourValuesVerdict(False, 'exact-finite', best, details)


# Interval unions

def _membership(var: int, comp, nvars: int = 5) -> list:
    out = [ge({var: 1}, {'c': comp.lo}, nvars, strict=not comp.lo_closed)]
    if comp.hi != INF:
        out.append(ge({'c': comp.hi}, {var: 1}, nvars, strict=not comp.hi_closed))
    return out


def _base_constraints() -> list:
    n = 5
    return [
        ge({X: 1, B: 1}, {A: 1}, n), ge({X: 1, A: 1}, {B: 1}, n), ge({A: 1, B: 1}, {X: 1}, n),
        ge({X: 1, D: 1}, {C: 1}, n), ge({X: 1, C: 1}, {D: 1}, n), ge({C: 1, D: 1}, {X: 1}, n),
        ge({A: 1}, {B: 1}, n), ge({A: 1}, {C: 1}, n), ge({A: 1}, {D: 1}, n),
        # only quadruples with a above every pair sum can fail
        ge({A: 1}, {B: 1, C: 1}, n, strict=True),
        ge({A: 1}, {B: 1, D: 1}, n, strict=True),
        ge({A: 1}, {C: 1, D: 1}, n, strict=True),
    ]


_U_CASES = ((A, D), (D, A), (B, C), (C, B))   # u is the value of p - q
_L_CASES = ((A, D), (B, C))                   # l is the value of p + q


def _gap_cases(gap) -> list:
    g_lo, lo_open, g_hi, hi_open = gap
    cases = []
    for p, q in _U_CASES:
        above = ge({p: 1}, {q: 1, 'c': g_lo}, 5, strict=lo_open)
        if g_hi == INF:
            cases.append([above])
            continue
        for s, t in _L_CASES:
            cases.append([above, ge({'c': g_hi}, {s: 1, t: 1}, 5, strict=hi_open)])
    return cases


def _box_feasible(constraints, boxes) -> bool:
    for con in constraints:
        top = Fraction(con.const)
        for c, (lo, hi) in zip(con.coeffs, boxes):
            if c > 0:
                if hi == INF:
                    top = INF
                    break
                top += c * hi
            elif c < 0:
                top += c * lo
        if top != INF and top < 0:
            return False
    return True


def count_cells(R: IntervalUnion) -> int:
    k = len(R.components)
    per_gap = sum(4 if g[2] == INF else 8 for g in R.gaps)
    return sum((ia + 1) ** 3 for ia in range(k)) * k * per_gap


def _least_in_cell(system: LinearSystem, found: Witness) -> Witness:
    """Smallest witness of the cell by (denominator, a, b, c, d, x), searched on grids."""
    top = min(found.key()[0], CELL_GRID_DENOMINATOR)
    for den in range(1, top + 1):
        solution = system.solve_on_grid(ELIMINATION_ORDER, den, CELL_GRID_BRANCH)
        if solution is not None:
            w = Witness.of(solution[X], solution[A], solution[B], solution[C], solution[D])
            return w if w.key() < found.key() else found
    return found


def _scan_cells(R: IntervalUnion, a_indices) -> tuple:
    comps = R.components
    base = _base_constraints()
    gap_cases = [c for gap in R.gaps for c in _gap_cases(gap)]
    best, feasible, visited = None, 0, 0
    for ia in a_indices:
        for ib, ic, idd in itertools.product(range(ia + 1), repeat=3):
            for ix in range(len(comps)):
                assign = {A: comps[ia], B: comps[ib], C: comps[ic], D: comps[idd], X: comps[ix]}
                boxes = [(assign[v].lo, assign[v].hi) for v in range(5)]
                cell = base + [m for v in range(5) for m in _membership(v, assign[v])]
                if not _box_feasible(cell, boxes):
                    visited += len(gap_cases)
                    continue
                for extra in gap_cases:
                    visited += 1
                    if not _box_feasible(extra, boxes):
                        continue
                    system = LinearSystem(5, cell + extra)
                    solution = system.solve(ELIMINATION_ORDER)
                    if solution is None:
                        continue
                    feasible += 1
                    w = _least_in_cell(system, Witness.of(solution[X], solution[A], solution[B], solution[C], solution[D]))
                    if not w.validate(R):
                        logger.warning(f"discarding unvalidated cell witness {w}")
                        continue
                    if best is None or w.key() < best.key():
                        best = w
    return best, feasible, visited


def check_intervals(R: IntervalUnion, cell_cap: int = CELL_CAP,
                    workers: int = DEFAULT_WORKERS, seed: int = DEFAULT_SEED) -> FourValuesVerdict:
    cells = count_cells(R)
    if cells > cell_cap:
        logger.warning(f"{R}: {CellExplosion(cells, cell_cap)}; falling back to the falsifier")
        verdict = falsify_verdict(R, seed=seed, workers=workers)
        verdict.details['cell_explosion'] = cells
        return verdict
    logger.info(f"Deciding {R} over {cells} cells…")
    chunks = [[ia] for ia in range(len(R.components))]
    results = []
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_scan_cells, R, chunk): idx for idx, chunk in enumerate(chunks)}
            for fut in as_completed(futures):
                results.append(fut.result())
    else:
        results = [_scan_cells(R, chunk) for chunk in chunks]
    witnesses = [w for w, _, _ in results if w is not None]
    details = {
        'cells': cells,
        'feasible_cells': sum(f for _, f, _ in results),
        'ray_cap': None,
    }
    if not witnesses:
        return FourValuesVerdict(True, 'exact-interval', None, details)
    return FourValuesVerdict(False, 'exact-interval', min(witnesses, key=Witness.key), details)


# Seeded falsifier

def _falsify_batch(R: DistanceSet, grid_values: tuple, batch: int, size: int, seed: int) -> tuple:
    """First validated witness in this batch (by sample order), plus counts."""
    den = 1
    for v in grid_values:
        den = math.lcm(den, v.denominator)
    scaled = int_array([int(v * den) for v in grid_values])
    rng = np.random.default_rng([seed, batch])
    idx = rng.integers(0, len(grid_values), size=(size, 5))
    x, a, b, c, d = (scaled[idx[:, k]] for k in range(5))
    ok = ((a >= b) & (a >= c) & (a >= d)
          & (np.abs(a - b) <= x) & (x <= a + b)
          & (np.abs(c - d) <= x) & (x <= c + d))
    u = np.maximum(np.abs(a - d), np.abs(b - c))
    l = np.minimum(a + d, b + c)
    j = np.searchsorted(scaled, u, side='left')
    jc = np.minimum(j, len(grid_values) - 1)
    covered = (j < len(grid_values)) & (scaled[jc] <= l)
    candidates = np.flatnonzero(ok & ~covered)
    rejected = 0
    for row in candidates:
        vals = [grid_values[k] for k in idx[row]]
        w = Witness.of(*vals)
        if w.validate(R):
            return w, int(ok.sum()), rejected
        rejected += 1
    return None, int(ok.sum()), rejected


def falsify(R: DistanceSet, samples: int = FALSIFY_SAMPLES, max_denominator: int = FALSIFY_DENOMINATOR,
            cap=FALSIFY_CAP, seed: int = DEFAULT_SEED, workers: int = DEFAULT_WORKERS,
            batch_size: int = FALSIFY_BATCH) -> tuple:
    """Sample quadruples plus x from grid(R); return (witness or None, coverage report)."""
    grid_values = R.grid(max_denominator, Fraction(cap)).values
    n_batches = max(1, math.ceil(samples / batch_size))
    sizes = [min(batch_size, samples - k * batch_size) for k in range(n_batches)]
    logger.info(f"Falsifying {R}: {samples} samples over a {len(grid_values)}-point grid, seed {seed}")
    results = {}
    if workers > 1 and n_batches > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_falsify_batch, R, grid_values, k, sizes[k], seed): k
                       for k in range(n_batches)}
            for fut in as_completed(futures):
                results[futures[fut]] = fut.result()
    else:
        for k in range(n_batches):
            results[k] = _falsify_batch(R, grid_values, k, sizes[k], seed)
            if results[k][0] is not None:
                break
    report = {
        'samples': samples, 'seed': seed, 'denominator': max_denominator, 'cap': Fraction(cap),
        'grid_size': len(grid_values),
        'batches_run': len(results),
        'leadsto_samples': sum(r[1] for r in results.values()),
        'rejected_candidates': sum(r[2] for r in results.values()),
    }
    for k in sorted(results):
        if results[k][0] is not None:
            return results[k][0], report
    return None, report


def falsify_verdict(R: DistanceSet, samples: int = FALSIFY_SAMPLES, max_denominator: int = FALSIFY_DENOMINATOR,
                    cap=FALSIFY_CAP, seed: int = DEFAULT_SEED, workers: int = DEFAULT_WORKERS) -> FourValuesVerdict:
    witness, report = falsify(R, samples, max_denominator, cap, seed, workers)
    return FourValuesVerdict(False if witness is not None else None, 'falsifier', witness, report)


# Dispatch

METHODS = ('auto', 'finite', 'interval', 'falsifier')


def check_four_values(R: DistanceSet, method: str = 'auto', **options) -> FourValuesVerdict:
    if method not in METHODS:
        raise ValueError(f"Unknown decision method: {method}")
    if method == 'falsifier':
        return falsify_verdict(R, **options)
    if isinstance(R, SumClosure):
        if R.is_finite:
            return check_finite(R.to_finite())
        return FourValuesVerdict(True, 'sum-closed', None, {
            'because': 'every sum-closed set containing 0 satisfies the condition',
        })
    if isinstance(R, FiniteSet):
        return check_finite(R, prune=options.get('prune', True))
    if isinstance(R, IntervalUnion):
        opts = {k: v for k, v in options.items() if k in ('cell_cap', 'workers', 'seed')}
        return check_intervals(R, **opts)
    return falsify_verdict(R, **options)
