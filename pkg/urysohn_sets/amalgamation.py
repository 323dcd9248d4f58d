"""
Amalgamation of finite metric spaces over a distance set R.

Cross distances are chosen one pair at a time from R, inside the window
[u, l] left by every point already placed, so the result is metric by
construction. 0 is never chosen for a cross pair.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .config import AMALGAM_ENUM_CAP
from .distance_sets import DistanceSet, FiniteSet
from .errors import CapExceeded, EmptyChoiceInterval, InvalidInput, TriangleViolation
from .metric_core import (
    INF, FiniteMetricSpace, PartialIsometry, dist_set, int_array,
    restrict, validate_space,
)

logger = logging.getLogger(__name__)


def amalg_interval(a, b, c, d) -> tuple:
    """(u, l) for a = d(p,v), b = d(p,w), c = d(q,w), d = d(q,v)."""
    return max(abs(a - d), abs(b - c)), min(a + d, b + c)


@dataclass(frozen=True)
class Choice:
    pair: tuple                  # (point of A, point of C)
    u: Optional[Fraction]
    l: Optional[Fraction]
    value: Fraction
    identifiable: bool = False   # 0 lay in [u, l] and both points had the same profile


@dataclass(frozen=True)
class AmalgamResult:
    C: FiniteMetricSpace
    embed_A: dict
    embed_B: dict
    choices: tuple = field(default=())

    @property
    def identifiable(self) -> bool:
        return any(ch.identifiable for ch in self.choices)


def _check_instance(A: FiniteMetricSpace, B: FiniteMetricSpace, shared: Mapping[int, int], R: Optional[DistanceSet]):
    PartialIsometry.of(A, B, shared)
    if R is None:
        return
    for name, space in (('A', A), ('B', B)):
        outside = [v for v in dist_set(space) if not R.contains(v)]
        if outside:
            raise InvalidInput(f"distance {outside[0]} of {name} is not in {R}")


def _rescale(arr: np.ndarray, factor: int) -> np.ndarray:
    return arr if factor == 1 else int_array(arr.astype(object) * factor)


def amalgamate_point(A: FiniteMetricSpace, B: FiniteMetricSpace, shared: Mapping[int, int],
                     R: DistanceSet, *, check: bool = True) -> AmalgamResult:
    """Add the single point of A outside ``shared`` to B."""
    shared = dict(shared)
    if check:
        _check_instance(A, B, shared, R)
    new = [p for p in range(A.n) if p not in shared]
    if not new:
        return AmalgamResult(B, shared, {y: y for y in range(B.n)})
    if len(new) > 1:
        raise InvalidInput(f"amalgamate_point needs exactly one new point, got {len(new)}")
    p = new[0]
    den = math.lcm(A.den, B.den)
    Bn = B.scaled_to(den)
    An = A.scaled_to(den)

    column = np.zeros(B.n, dtype=object)
    placed = []
    for v, img in sorted(shared.items()):
        column[img] = int(An[p, v])
        placed.append(img)
    choices = []
    for y in range(B.n):
        if y in shared.values():
            continue
        if placed:
            known = np.array([column[k] for k in placed], dtype=object)
            row = np.array([Bn[y, k] for k in placed], dtype=object)
            u = Fraction(int(np.max(np.abs(known - row))), den)
            l = Fraction(int(np.min(known + row)), den)
        else:
            u, l = Fraction(0), INF
        value = R.range_pick(u, l, lo_open=(u == 0))
        if value is None:
            raise EmptyChoiceInterval((p, y), u, l)
        if value.denominator != 1 and den % value.denominator:
            factor = math.lcm(den, value.denominator) // den
            den *= factor
            Bn = _rescale(Bn, factor)
            column = column * factor
        column[y] = int(value * den)
        placed.append(y)
        choices.append(Choice((p, y), u, l, value, identifiable=(u == 0)))
        logger.debug(f"d(p{p}, {y}) := {value} from [{u}, {l}]")

    C = B.extend([Fraction(int(c), den) for c in column])
    embed_A = {**shared, p: B.n}
    return AmalgamResult(C, embed_A, {y: y for y in range(B.n)}, tuple(choices))


def amalgamate(A: FiniteMetricSpace, B: FiniteMetricSpace, shared: Mapping[int, int],
               R: DistanceSet) -> AmalgamResult:
    """Iterate one-point amalgamation over A minus shared, ascending."""
    shared = dict(shared)
    _check_instance(A, B, shared, R)
    C = B
    embed = dict(shared)
    choices = []
    for p in range(A.n):
        if p in embed:
            continue
        dom = sorted(embed) + [p]
        sub = restrict(A, dom)
        local_shared = {k: embed[q] for k, q in enumerate(dom[:-1])}
        step = amalgamate_point(sub, C, local_shared, R, check=False)
        C = step.C
        embed[p] = C.n - 1
        choices.extend(Choice((p, ch.pair[1]), ch.u, ch.l, ch.value, ch.identifiable) for ch in step.choices)
    logger.debug(f"amalgamated {A.n}+{B.n} points into {C.n}")
    return AmalgamResult(C, embed, {y: y for y in range(B.n)}, tuple(choices))


def enumerate_amalgams(A: FiniteMetricSpace, B: FiniteMetricSpace, shared: Mapping[int, int],
                       Rfin: FiniteSet, cap: int = AMALGAM_ENUM_CAP) -> list:
    """Every metric completion of A and B glued along ``shared`` with cross distances in Rfin."""
    shared = dict(shared)
    _check_instance(A, B, shared, None)
    new_A = [p for p in range(A.n) if p not in shared]
    new_B = [y for y in range(B.n) if y not in shared.values()]
    pairs = [(p, y) for p in new_A for y in new_B]
    if len(pairs) > cap:
        raise CapExceeded("enumerate_amalgams", len(pairs), cap)
    positions = {y: y for y in range(B.n)}
    positions.update({p: B.n + k for k, p in enumerate(new_A)})
    embed_A = {**shared, **{p: positions[p] for p in new_A}}
    size = B.n + len(new_A)

    base = [[Fraction(0)] * size for _ in range(size)]
    for i in range(B.n):
        for j in range(B.n):
            base[i][j] = B.d(i, j)
    for p in range(A.n):
        for q in range(A.n):
            base[embed_A[p]][embed_A[q]] = A.d(p, q)

    positive = [v for v in Rfin.values if v > 0]
    results = []
    for combo in itertools.product(positive, repeat=len(pairs)):
        table = [row[:] for row in base]
        for (p, y), value in zip(pairs, combo):
            table[embed_A[p]][y] = table[y][embed_A[p]] = value
        try:
            C = validate_space(table)
        except TriangleViolation:
            continue
        choices = tuple(Choice((p, y), None, None, v) for (p, y), v in zip(pairs, combo))
        results.append(AmalgamResult(C, dict(embed_A), {y: y for y in range(B.n)}, choices))
    return results


def gap_instance(x, a, b, c, d) -> tuple:
    """The (A, B, shared) instance of a quadruple: v, w at distance x, then p or q.

    A = (v, w, p) with d(p,v) = a, d(p,w) = b; B = (v, w, q) with d(q,w) = c,
    d(q,v) = d. Cross distance d(p,q) must lie in amalg_interval(a, b, c, d).
    """
    A = validate_space([[0, x, a], [x, 0, b], [a, b, 0]])
    B = validate_space([[0, x, d], [x, 0, c], [d, c, 0]])
    return A, B, {0: 0, 1: 1}


def completion_values(a, b, c, d, x, grid) -> list:
    """Grid values y making the glued 4-point space metric."""
    out = []
    for y in grid:
        if y <= 0:
            continue
        table = [[0, x, a, d], [x, 0, b, c], [a, b, 0, y], [d, c, y, 0]]
        try:
            validate_space(table)
        except TriangleViolation:
            continue
        out.append(y)
    return out
