import itertools
from fractions import Fraction

import numpy as np
import pytest

from urysohn_sets.errors import (
    Asymmetry, CapExceeded, InvalidInput, NotMetricType, TriangleViolation, ZeroOffDiagonal,
)
from urysohn_sets.metric_core import (
    INF, FiniteMetricSpace, PartialIsometry, TypeFunction, dist_set, find_isometry,
    is_metric_triple, restrict, simplest_rational, span_space, to_rat, typeset, validate_space,
)


def test_to_rat_refuses_floats():
    assert to_rat('3/6') == Fraction(1, 2)
    assert to_rat(4) == Fraction(4)
    with pytest.raises(InvalidInput):
        to_rat(0.5)
    with pytest.raises(InvalidInput):
        to_rat('half')


@pytest.mark.parametrize('lo, hi, lo_closed, hi_closed, expected', [
    (Fraction(0), Fraction(1, 2), False, False, Fraction(1, 3)),
    (Fraction(3, 2), Fraction(3, 2), True, True, Fraction(3, 2)),
    (Fraction(29, 30), Fraction(1), False, False, Fraction(30, 31)),
    (Fraction(1), Fraction(11, 10), False, False, Fraction(12, 11)),
    (Fraction(7, 3), INF, True, False, Fraction(3)),
    (Fraction(2), Fraction(2), True, False, None),
])
def test_simplest_rational(lo, hi, lo_closed, hi_closed, expected):
    assert simplest_rational(lo, hi, lo_closed, hi_closed) == expected


def test_is_metric_triple():
    assert is_metric_triple(1, 1, 2)
    assert not is_metric_triple(Fraction(1, 2), Fraction(1, 2), 2)
    with pytest.raises(InvalidInput):
        is_metric_triple(-1, 1, 1)


def test_validate_space_keeps_exact_distances():
    M = validate_space([[0, '1/2', '1/3'], ['1/2', 0, '1/2'], ['1/3', '1/2', 0]])
    assert M.n == 3
    assert M.den == 6
    assert M.d(0, 2) == Fraction(1, 3)
    assert dist_set(M) == [0, Fraction(1, 3), Fraction(1, 2)]


def test_validate_space_errors():
    with pytest.raises(ZeroOffDiagonal):
        validate_space([[0, 0], [0, 0]])
    with pytest.raises(Asymmetry):
        validate_space([[0, 1], [2, 0]])
    with pytest.raises(TriangleViolation) as exc:
        validate_space([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert (exc.value.i, exc.value.j, exc.value.k) == (0, 2, 1)


def test_restrict_and_extend(simplex):
    M = simplex(4)
    sub = restrict(M, [3, 1])
    assert sub.n == 2 and sub.d(0, 1) == 1
    bigger = sub.extend([Fraction(1, 2), Fraction(1, 2)])
    assert bigger.n == 3
    assert bigger.d(2, 0) == Fraction(1, 2)
    assert bigger.den == 2
    with pytest.raises(InvalidInput):
        restrict(M, [4])


def test_span_space_and_typeset(simplex):
    M = simplex(3)
    t = TypeFunction.of(M, {0: 1, 1: 1})
    assert typeset(M, t) == [2]
    S = span_space(M, t)
    assert S.n == 3 and all(S.d(i, 2) == 1 for i in range(2))
    bad = TypeFunction.of(validate_space([[0, 2], [2, 0]]), {0: '1/2', 1: '1/2'})
    with pytest.raises(NotMetricType):
        span_space(bad.host, bad)


def test_type_function_rejects_zero_value(edge):
    with pytest.raises(InvalidInput):
        TypeFunction.of(edge, {0: 0})


def test_partial_isometry_checks_distances():
    M = validate_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    PartialIsometry.of(M, M, {0: 2, 2: 0})
    with pytest.raises(InvalidInput):
        PartialIsometry.of(M, M, {0: 0, 1: 2})


def test_find_isometry_respects_seed():
    path = validate_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    f = find_isometry(path, path, seed=PartialIsometry.of(path, path, {0: 2}))
    assert f.as_dict() == {0: 2, 1: 1, 2: 0}
    triangle = validate_space([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert find_isometry(path, triangle) is None


def test_find_isometry_cap(simplex):
    with pytest.raises(CapExceeded):
        find_isometry(simplex(9), simplex(9))


def test_equality_across_denominators():
    a = validate_space([[0, '2/4'], ['1/2', 0]])
    b = FiniteMetricSpace.point().extend([Fraction(1, 2)])
    assert a == b


def _embeds_by_permutation(A, B):
    return any(all(A.d(i, j) == B.d(image[i], image[j]) for i in range(A.n) for j in range(i + 1, A.n))
               for image in itertools.permutations(range(B.n), A.n))


def test_find_isometry_agrees_with_permutations(grid_space):
    rng = np.random.default_rng(11)
    for _ in range(150):
        A = grid_space(rng, int(rng.integers(1, 5)), 2)
        B = grid_space(rng, int(rng.integers(1, 6)), 2)
        f = find_isometry(A, B)
        assert (f is not None) == _embeds_by_permutation(A, B)
        if f is not None:
            assert restrict(B, [f(i) for i in range(A.n)]) == A
