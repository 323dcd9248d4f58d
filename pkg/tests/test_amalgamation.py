from fractions import Fraction

import numpy as np
import pytest

from urysohn_sets.amalgamation import (
    amalg_interval, amalgamate, amalgamate_point, completion_values, enumerate_amalgams, gap_instance,
)
from urysohn_sets.distance_sets import FiniteSet
from urysohn_sets.errors import CapExceeded, EmptyChoiceInterval, InvalidInput
from urysohn_sets.four_values import check_finite
from urysohn_sets.metric_core import INF, FiniteMetricSpace, dist_set, is_metric_triple, restrict, validate_space
from urysohn_sets.setexpr import parse_setexpr

HALF = Fraction(1, 2)


def test_amalg_interval_examples():
    assert amalg_interval(1, 1, 1, 1) == (0, 2)
    assert amalg_interval(2, 1, HALF, HALF) == (Fraction(3, 2), Fraction(3, 2))
    assert amalg_interval(2, 1, 1, HALF) == (Fraction(3, 2), 2)


def test_completion_values_match_the_interval():
    grid = [Fraction(p, 4) for p in range(17)]
    assert completion_values(Fraction(2), Fraction(1), Fraction(1), HALF, Fraction(1), grid) == \
        [Fraction(3, 2), Fraction(7, 4), Fraction(2)]


def test_completion_values_exact_on_random_instances():
    rng = np.random.default_rng(7)
    grid = sorted({Fraction(p, q) for q in range(1, 7) for p in range(1, 6 * q + 1)})
    checked = 0
    while checked < 1000:
        x, a, b, c, d = (Fraction(int(p), int(q)) for p, q in zip(rng.integers(1, 13, 5), rng.integers(1, 7, 5)))
        if not (is_metric_triple(x, a, b) and is_metric_triple(x, c, d)):
            continue
        u, l = amalg_interval(a, b, c, d)
        assert completion_values(a, b, c, d, x, grid) == [y for y in grid if u <= y <= l]
        checked += 1


def test_one_point_amalgamation_picks_one_not_zero(edge):
    R = FiniteSet([0, 1, 2])
    result = amalgamate_point(edge, edge, {0: 0}, R)
    assert result.C.n == 3
    assert result.C.d(2, 1) == 1
    assert result.embed_A == {0: 0, 1: 2}
    assert result.identifiable
    assert result.choices[0].u == 0 and result.choices[0].l == 2


def test_shared_everything_returns_b(edge):
    result = amalgamate_point(edge, edge, {0: 0, 1: 1}, FiniteSet([0, 1]))
    assert result.C == edge
    assert result.choices == ()


def test_unit_gap_instance_has_no_amalgam(unit_gap):
    A, B, shared = gap_instance(Fraction(1), Fraction(2), Fraction(1), HALF, HALF)
    with pytest.raises(EmptyChoiceInterval) as exc:
        amalgamate(A, B, shared, unit_gap)
    assert (exc.value.u, exc.value.l) == (Fraction(3, 2), Fraction(3, 2))
    assert enumerate_amalgams(A, B, shared, FiniteSet([0, HALF, 1, 2])) == []


def test_disjoint_points():
    point = validate_space([[0]])
    result = amalgamate(point, point, {}, FiniteSet([0, 1]))
    assert result.C == validate_space([[0, 1], [1, 0]])


def test_triangles_sharing_an_edge(simplex):
    result = amalgamate(simplex(3), simplex(3), {0: 0, 1: 1}, FiniteSet([0, 1]))
    assert result.C == simplex(4)


def test_path_onto_triangle_keeps_both_embeddings(simplex):
    path = validate_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    R = FiniteSet([0, 1, 2])
    result = amalgamate(path, simplex(3), {0: 0, 1: 1}, R)
    C = result.C
    assert C.n == 4
    image = [result.embed_A[p] for p in range(3)]
    assert restrict(C, image) == path
    assert restrict(C, range(3)) == simplex(3)
    assert set(dist_set(C)) <= set(R.values)


def test_amalgamate_checks_distances_and_shared_map(edge):
    with pytest.raises(InvalidInput):
        amalgamate(edge, edge, {0: 0}, FiniteSet([0, 2]))
    path = validate_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    with pytest.raises(InvalidInput):
        amalgamate(path, path, {0: 0, 2: 1}, FiniteSet([0, 1, 2]))


def test_enumerate_amalgams_edge_instance():
    A, B, shared = gap_instance(*map(Fraction, (1, 1, 1, 1, 1)))
    results = enumerate_amalgams(A, B, shared, FiniteSet([0, 1, 2]))
    assert sorted(r.C.d(3, 2) for r in results) == [1, 2]


def test_enumerate_amalgams_shared_all(edge):
    assert len(enumerate_amalgams(edge, edge, {0: 0, 1: 1}, FiniteSet([0, 1]))) == 1


def test_enumerate_amalgams_cap(simplex):
    with pytest.raises(CapExceeded):
        enumerate_amalgams(simplex(4), simplex(4), {0: 0}, FiniteSet([0, 1]), cap=6)


def test_amalgamation_total_over_passing_finite_sets():
    rng = np.random.default_rng(3)
    runs = 0
    while runs < 40:
        values = {Fraction(int(v), 2) for v in rng.integers(1, 9, 4)}
        R = FiniteSet(values | {0})
        if not check_finite(R).holds:
            continue
        positive = [v for v in R.values if v > 0]
        A = _random_space(rng, positive, 3)
        B = _random_space(rng, positive, 3)
        if A is None or B is None:
            continue
        result = amalgamate(A, B, {}, R)
        assert set(dist_set(result.C)) <= set(R.values)
        assert restrict(result.C, [result.embed_A[p] for p in range(A.n)]) == A
        runs += 1


def _random_space(rng, values, n):
    for _ in range(50):
        table = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                table[i][j] = table[j][i] = values[int(rng.integers(len(values)))]
        try:
            return validate_space(table)
        except InvalidInput:
            continue
    return None


def test_disjoint_points_over_unbounded_sum_closure():
    point = validate_space([[0]])
    result = amalgamate(point, point, {}, parse_setexpr('sumclosed(1;inf)'))
    assert result.C == validate_space([[0, 1], [1, 0]])
    assert result.choices[0].l == INF


def _random_finite_set(rng, passing):
    while True:
        size = int(rng.integers(1, 8))
        R = FiniteSet({Fraction(int(v), 2) for v in rng.integers(1, 13, size)} | {0})
        verdict = check_finite(R)
        if verdict.holds is passing:
            return R, verdict


def _grow(rng, M, values, extra):
    """M plus ``extra`` points at distances drawn from the admissible values."""
    for _ in range(extra):
        column = []
        for y in range(M.n):
            lo = max((abs(column[k] - M.d(y, k)) for k in range(len(column))), default=Fraction(0))
            hi = min((column[k] + M.d(y, k) for k in range(len(column))), default=INF)
            window = [v for v in values if lo <= v <= hi]
            if not window:
                return None
            column.append(window[int(rng.integers(len(window)))])
        M = M.extend(column)
    return M


def test_amalgamation_with_shared_points_over_passing_finite_sets():
    rng = np.random.default_rng(5)
    pool = [_random_finite_set(rng, True)[0] for _ in range(40)]
    runs = 0
    while runs < 1000:
        R = pool[int(rng.integers(len(pool)))]
        positive = [v for v in R.values if v > 0]
        B = _grow(rng, FiniteMetricSpace.point(), positive, int(rng.integers(1, 5)))
        if B is None:
            continue
        S = sorted(int(s) for s in rng.choice(B.n, int(rng.integers(1, min(3, B.n) + 1)), replace=False))
        A = _grow(rng, restrict(B, S), positive, int(rng.integers(1, 8 - len(S))))
        if A is None:
            continue
        shared = dict(enumerate(S))
        result = amalgamate(A, B, shared, R)
        C = result.C
        assert set(dist_set(C)) <= set(R.values)
        assert restrict(C, range(B.n)) == B
        assert restrict(C, [result.embed_A[p] for p in range(A.n)]) == A
        assert all(result.embed_A[i] == s for i, s in shared.items())
        runs += 1


def test_failing_finite_sets_have_no_amalgam_on_their_witness():
    rng = np.random.default_rng(9)
    for _ in range(100):
        R, verdict = _random_finite_set(rng, False)
        w = verdict.witness
        A, B, shared = gap_instance(w.x, *w.q)
        assert enumerate_amalgams(A, B, shared, R) == []
        with pytest.raises(EmptyChoiceInterval):
            amalgamate(A, B, shared, R)
