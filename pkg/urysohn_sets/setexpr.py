"""Recursive-descent parser for R-spec set expressions.

    setexpr := term ("u" term)*
    term    := "{" rat ("," rat)* "}"
             | ["q"] lbr rat "," (rat | "inf") rbr
             | "omega" "(" nat ")"
             | "sumclosed" "(" rat ("," rat)* ";" (rat | "inf") ")"
    rat     := int | int "/" posint

A leading "q" restricts an interval to its rational points.
"""
import logging
from fractions import Fraction

from .distance_sets import DistanceSet, FiniteSet, Interval, OmegaSegment, SumClosure, union_of
from .errors import EmptyInterval, InvalidInput, SetExprSyntaxError, ZeroMissing
from .metric_core import INF

logger = logging.getLogger(__name__)


class SetExprParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # Lexing helpers

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def _error(self, message: str):
        raise SetExprSyntaxError(message, self.pos)

    def _expect(self, token: str):
        self._skip()
        if not self.text.startswith(token, self.pos):
            self._error(f"expected {token!r}")
        self.pos += len(token)

    def _keyword(self, word: str) -> bool:
        self._skip()
        if self.text.startswith(word, self.pos):
            after = self.pos + len(word)
            if after >= len(self.text) or not self.text[after].isalnum():
                self.pos = after
                return True
        return False

    def _int(self) -> int:
        self._skip()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in '+-':
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        digits = self.text[start:self.pos]
        if not digits.lstrip('+-'):
            self.pos = start
            self._error("expected an integer")
        return int(digits)

    def _rat(self) -> Fraction:
        start = self.pos
        num = self._int()
        if self._peek() == '/':
            self.pos += 1
            den = self._int()
            if den <= 0:
                self.pos = start
                self._error("denominator must be positive")
            value = Fraction(num, den)
        else:
            value = Fraction(num)
        if value < 0:
            self.pos = start
            self._error("distances must be nonnegative")
        return value

    # Grammar

    def _term(self):
        """Returns a list of Interval components, or a standalone DistanceSet."""
        ch = self._peek()
        if ch == '{':
            self.pos += 1
            values = [self._rat()]
            while self._peek() == ',':
                self.pos += 1
                values.append(self._rat())
            self._expect('}')
            return [Interval(v, v) for v in values]
        if self._keyword('omega'):
            self._expect('(')
            n = self._int()
            self._expect(')')
            if n < 1:
                raise ZeroMissing()
            return OmegaSegment(n)
        if self._keyword('sumclosed'):
            self._expect('(')
            gens = [self._rat()]
            while self._peek() == ',':
                self.pos += 1
                gens.append(self._rat())
            self._expect(';')
            cap = INF if self._keyword('inf') else self._rat()
            self._expect(')')
            return SumClosure(gens, cap)
        rational = self._keyword('q')
        ch = self._peek()
        if ch not in '[(' or not ch:
            self._error("expected a set term")
        start = self.pos
        self.pos += 1
        lo = self._rat()
        self._expect(',')
        hi = INF if self._keyword('inf') else self._rat()
        rbr = self._peek()
        if rbr not in '])' or not rbr:
            self._error("expected ']' or ')'")
        self.pos += 1
        if hi == INF and rbr != ')':
            self.pos -= 1
            self._error("'inf' must be closed with ')'")
        try:
            return [Interval(lo, hi, ch == '[', rbr == ']', rational)]
        except EmptyInterval:
            raise EmptyInterval(self.text[start:self.pos])

    def parse(self) -> DistanceSet:
        terms = [self._term()]
        while self._keyword('u'):
            terms.append(self._term())
        if self._peek():
            self._error("unexpected trailing input")
        standalone = [t for t in terms if isinstance(t, (SumClosure, OmegaSegment))]
        if standalone:
            if len(terms) == 1:
                return terms[0]
            components = []
            for t in terms:
                if isinstance(t, SumClosure) and not t.is_finite:
                    raise InvalidInput("an unbounded sumclosed term cannot be united with others")
                values = t.elements() if isinstance(t, SumClosure) else (t.values if isinstance(t, FiniteSet) else None)
                if values is None:
                    components.extend(t)
                else:
                    components.extend(Interval(v, v) for v in values)
            return union_of(components)
        return union_of([c for t in terms for c in t])


def parse_setexpr(text: str) -> DistanceSet:
    R = SetExprParser(text).parse()
    logger.debug(f"parsed {text!r} as {R!r}")
    return R
