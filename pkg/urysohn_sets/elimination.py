"""
Exact Fourier-Motzkin elimination over the rationals.

A constraint ``sum(c_i * v_i) + k >= 0`` (or ``> 0`` when strict) is stored
with integer coefficients reduced by their gcd, so elimination never
touches Fractions. Back-substitution returns the simplest rational value
for each variable in turn.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .metric_core import INF, simplest_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple  # ints
    const: int
    strict: bool

    @classmethod
    def of(cls, coeffs: Sequence, const=0, strict: bool = False) -> 'Constraint':
        """Normalized constraint from rational coefficients."""
        fr = [Fraction(c) for c in coeffs] + [Fraction(const)]
        den = 1
        for f in fr:
            den = math.lcm(den, f.denominator)
        ints = [int(f * den) for f in fr]
        return cls._reduced(ints[:-1], ints[-1], strict)

    @classmethod
    def _reduced(cls, coeffs, const, strict) -> 'Constraint':
        g = 0
        for c in coeffs:
            g = math.gcd(g, c)
        if g == 0:
            return cls(tuple(coeffs), (const > 0) - (const < 0), strict)
        g = math.gcd(g, const)
        return cls(tuple(c // g for c in coeffs), const // g, strict)

    @property
    def is_constant(self) -> bool:
        return not any(self.coeffs)

    def holds_trivially(self) -> bool:
        return self.const > 0 or (self.const == 0 and not self.strict)

    def evaluate(self, values: Sequence[Fraction]) -> bool:
        total = sum((c * v for c, v in zip(self.coeffs, values) if c), Fraction(self.const))
        return total > 0 if self.strict else total >= 0


def ge(lhs: dict, rhs: dict, nvars: int, strict: bool = False) -> Constraint:
    """Build lhs >= rhs (or >) from {var_index or 'c': coefficient} maps."""
    coeffs = [Fraction(0)] * nvars
    const = Fraction(0)
    for side, sign in ((lhs, 1), (rhs, -1)):
        for key, value in side.items():
            if key == 'c':
                const += sign * Fraction(value)
            else:
                coeffs[key] += sign * Fraction(value)
    return Constraint.of(coeffs, const, strict)


class LinearSystem:
    def __init__(self, nvars: int, constraints):
        self.nvars = nvars
        self.constraints = []
        self.contradiction = False
        tightest = {}
        for con in constraints:
            if con.is_constant:
                if not con.holds_trivially():
                    self.contradiction = True
                continue
            prev = tightest.get(con.coeffs)
            if prev is None or con.const < prev.const or (con.const == prev.const and con.strict):
                tightest[con.coeffs] = con
        self.constraints = list(tightest.values())

    def __len__(self):
        return len(self.constraints)

    def eliminate(self, var: int) -> 'LinearSystem':
        pos, neg, rest = [], [], []
        for con in self.constraints:
            c = con.coeffs[var]
            (pos if c > 0 else neg if c < 0 else rest).append(con)
        combined = list(rest)
        for p in pos:
            cp = p.coeffs[var]
            for n in neg:
                cn = -n.coeffs[var]
                coeffs = [cn * a + cp * b for a, b in zip(p.coeffs, n.coeffs)]
                const = cn * p.const + cp * n.const
                combined.append(Constraint._reduced(coeffs, const, p.strict or n.strict))
        out = LinearSystem(self.nvars, combined)
        out.contradiction = out.contradiction or self.contradiction
        return out

    def _stages(self, order: Sequence[int]) -> Optional[list]:
        stages = [self]
        for var in order:
            if stages[-1].contradiction:
                return None
            stages.append(stages[-1].eliminate(var))
        if stages[-1].contradiction:
            return None
        return stages

    @staticmethod
    def _bounds(system: 'LinearSystem', var: int, values: list) -> tuple:
        lo, lo_strict, hi, hi_strict = None, False, INF, False
        for con in system.constraints:
            c = con.coeffs[var]
            if c == 0:
                continue
            rest = Fraction(con.const) + sum(
                (a * values[i] for i, a in enumerate(con.coeffs) if a and i != var), Fraction(0))
            bound = -rest / c
            if c > 0:
                if lo is None or bound > lo or (bound == lo and con.strict):
                    lo, lo_strict = bound, con.strict
            else:
                if bound < hi or (bound == hi and con.strict):
                    hi, hi_strict = bound, con.strict
        return lo, lo_strict, hi, hi_strict

    def solve(self, order: Sequence[int]) -> Optional[list]:
        """Eliminate in ``order``; return a rational solution or None.

        The last eliminated variable is assigned first.
        """
        stages = self._stages(order)
        if stages is None:
            return None
        values: list = [None] * self.nvars
        for k in range(len(order) - 1, -1, -1):
            var = order[k]
            values[var] = _pick(*self._bounds(stages[k], var, values))
            if values[var] is None:
                logger.debug(f"back-substitution failed at variable {var}")
                return None
        return values

    def solve_on_grid(self, order: Sequence[int], den: int, branch: int = 64) -> Optional[list]:
        """Least nonnegative solution on the grid (1/den)Z, or None.

        Variables are tried in assignment order, each ascending, so the
        first solution found is lexicographically least in that order. At
        most ``branch`` grid values are tried per variable.
        """
        stages = self._stages(order)
        if stages is None:
            return None
        values: list = [None] * self.nvars

        def descend(k: int) -> bool:
            if k < 0:
                return True
            var = order[k]
            lo, lo_strict, hi, hi_strict = self._bounds(stages[k], var, values)
            lo, lo_strict = (Fraction(0), False) if lo is None or lo < 0 else (lo, lo_strict)
            step = math.floor(lo * den) + 1 if lo_strict else math.ceil(lo * den)
            for n in range(step, step + branch):
                v = Fraction(n, den)
                if hi != INF and (v > hi or (v == hi and hi_strict)):
                    break
                values[var] = v
                if descend(k - 1):
                    return True
            values[var] = None
            return False

        return list(values) if descend(len(order) - 1) else None


def _pick(lo, lo_strict, hi, hi_strict) -> Optional[Fraction]:
    if lo is None:
        if hi == INF or hi > 0 or (hi == 0 and not hi_strict):
            return Fraction(0)
        lo, lo_strict = hi - 1, False
    if lo < 0:
        if hi == INF or hi > 0 or (hi == 0 and not hi_strict):
            return Fraction(0) if (lo < 0 or not lo_strict) else None
        # entirely negative range: mirror
        mirrored = simplest_rational(-hi, -lo, not hi_strict, not lo_strict)
        return None if mirrored is None else -mirrored
    return simplest_rational(lo, hi, not lo_strict, not hi_strict)
