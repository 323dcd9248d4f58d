"""Exception hierarchy shared by every urysohn_sets module."""


class UrysohnError(Exception):
    """Base class for all errors raised by the package."""


# Invalid input

class InvalidInput(UrysohnError, ValueError):
    pass


class ZeroOffDiagonal(InvalidInput):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"distance between distinct points {i} and {j} is 0")


class Asymmetry(InvalidInput):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"d({i},{j}) != d({j},{i})")


class TriangleViolation(InvalidInput):
    """Carries every violating triple, the first one also as i, j, k."""

    def __init__(self, triples):
        self.triples = list(triples)
        self.i, self.j, self.k = self.triples[0]
        shown = ', '.join(str(t) for t in self.triples[:5])
        more = '' if len(self.triples) <= 5 else f" (+{len(self.triples) - 5} more)"
        super().__init__(f"triangle inequality fails for {shown}{more}")


class NotMetricType(InvalidInput):
    def __init__(self, x, y):
        self.x, self.y = x, y
        super().__init__(f"type function is not metric on the pair ({x},{y})")


class SetExprSyntaxError(InvalidInput):
    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} at position {position}")


class ZeroMissing(InvalidInput):
    def __init__(self):
        super().__init__("distance set must contain 0")


class EmptyInterval(InvalidInput):
    def __init__(self, text):
        super().__init__(f"empty interval {text}")


class NotRestricted(InvalidInput):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"type function is not restricted: {reason}")


class PreconditionGap(InvalidInput):
    def __init__(self, perturbation, gamma):
        self.perturbation, self.gamma = perturbation, gamma
        super().__init__(f"perturbation {perturbation} is not below gamma {gamma}")


# Search / construction failures

class SearchFailure(UrysohnError, RuntimeError):
    pass


class CapExceeded(SearchFailure):
    def __init__(self, what, size, cap):
        self.what, self.size, self.cap = what, size, cap
        super().__init__(f"{what}: size {size} exceeds cap {cap}")


class CellExplosion(SearchFailure):
    def __init__(self, cells, cap):
        self.cells, self.cap = cells, cap
        super().__init__(f"{cells} cells exceed the cell cap {cap}")


class EmptyChoiceInterval(SearchFailure):
    def __init__(self, pair, u, l):
        self.pair, self.u, self.l = pair, u, l
        super().__init__(f"no admissible distance for pair {pair} in [{u},{l}]")


class Unrealized(SearchFailure):
    def __init__(self, type_function):
        self.type_function = type_function
        super().__init__(f"type {type_function} was not realized within budget")


class NoSmallElement(SearchFailure):
    def __init__(self, threshold):
        self.threshold = threshold
        super().__init__(f"no positive element of R below {threshold}")


class SearchBudget(SearchFailure):
    def __init__(self, what, budget):
        self.what, self.budget = what, budget
        super().__init__(f"{what}: budget {budget} exhausted")


class HypothesisViolated(SearchFailure):
    pass


class PreconditionError(SearchFailure):
    pass
