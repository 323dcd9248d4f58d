from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from urysohn_sets.distance_sets import FiniteSet
from urysohn_sets.errors import CapExceeded, InvalidInput, NotRestricted, PreconditionError, Unrealized
from urysohn_sets.four_values import Quadruple
from urysohn_sets.fraisse import (
    ApproximationState, age_classes, ages_equal, audit_extension, batch_size, build, embed_space,
    embeds, extend_isometry, realize_type, saturate, swap_witness_in, type_at,
)
from urysohn_sets.metric_core import (
    PartialIsometry, TypeFunction, dist_set, is_metric_triple, restrict, validate_space,
)
from urysohn_sets.setexpr import parse_setexpr

ONE_TWO = FiniteSet([0, 1, 2])
PATH = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]


def test_schedule_layout():
    values = (Fraction(1), Fraction(2))
    assert batch_size(2, 2, 3) == 18
    assert type_at(2, 0, values, 3) == ((2,), (1,))
    assert type_at(2, 2, values, 3) == ((0, 2), (1, 1))
    assert type_at(2, 17, values, 3) == ((0, 1, 2), (2, 2, 2))
    with pytest.raises(IndexError):
        type_at(2, 18, values, 3)


def test_realize_type_from_a_point():
    state = ApproximationState.start(FiniteSet([0, 1]), [1])
    state = realize_type(state, TypeFunction.of(state.M, {0: 1}))
    assert state.M == validate_space([[0, 1], [1, 0]])
    assert state.log[-1].action == 'realized' and state.log[-1].point == 1


def test_realize_type_on_an_edge_then_skip(edge, simplex):
    state = replace(ApproximationState.start(FiniteSet([0, 1]), [1]), M=edge)
    state = realize_type(state, TypeFunction.of(edge, {0: 1, 1: 1}))
    assert state.M == simplex(3)
    state = realize_type(state, TypeFunction.of(state.M, {0: 1, 1: 1}))
    assert state.M.n == 3
    assert state.log[-1].action == 'skipped'


def test_realize_type_rejects_unrestricted_types():
    R = FiniteSet([0, Fraction(1, 2), 1, 2])
    state = replace(ApproximationState.start(R, R.values), M=validate_space([[0, 2], [2, 0]]))
    with pytest.raises(NotRestricted):
        realize_type(state, TypeFunction.of(state.M, {0: '1/2', 1: '1/2'}))
    with pytest.raises(NotRestricted):
        realize_type(state, TypeFunction.of(state.M, {0: 3}))


@pytest.mark.parametrize('stages', [1, 2, 3])
def test_build_stages_count_realizations(stages, simplex):
    state = build(FiniteSet([0, 1]), stages)
    assert state.stage == stages
    assert state.M == simplex(stages + 1)
    assert sum(e.action == 'realized' for e in state.log) == stages


def test_build_over_single_distance_is_a_simplex(simplex):
    state = build(FiniteSet([0, 1]), 6)
    assert state.exhausted
    assert state.stage == 3
    assert state.M == simplex(4)
    assert dist_set(state.M) == [0, 1]
    report = audit_extension(state, 3, state.values)
    assert report.passed and report.checked == report.realized > 0


def test_build_is_deterministic():
    first = build(ONE_TWO, 12, seed=1)
    second = build(ONE_TWO, 12, seed=1)
    assert first.M == second.M
    assert first.log == second.log
    assert set(dist_set(first.M)) <= {0, 1, 2}


def test_build_refuses_sets_failing_four_values():
    with pytest.raises(PreconditionError):
        build(FiniteSet([0, Fraction(1, 2), 1, 2]), 5)


def test_audit_reports_pending_types_mid_build():
    state = build(ONE_TWO, 2)
    report = audit_extension(state, 3, state.values, points=range(state.M.n))
    assert not report.passed
    assert report.pending
    assert audit_extension(state, 0, state.values).passed


def test_saturation_realizes_every_triangle():
    state = saturate(build(ONE_TWO, 1), size_cap=3)
    triangles = age_classes([1, 2], 3)
    assert len(triangles) == 4
    assert all(embeds(T, state.M) for T in triangles)
    other = saturate(build(ONE_TWO, 1, seed=2), size_cap=3)
    assert ages_equal(state.M, other.M, size_cap=3)


def test_ages_equal_edge_cases(simplex):
    M = simplex(3)
    assert ages_equal(M, M)
    assert not ages_equal(M, validate_space(PATH))
    with pytest.raises(CapExceeded):
        ages_equal(M, M, size_cap=6)


def test_extend_isometry_prefers_the_target(simplex):
    state = replace(ApproximationState.start(FiniteSet([0, 1]), [1]), M=simplex(4))
    swap = PartialIsometry.of(state.M, state.M, {0: 1, 1: 0})
    state, ext = extend_isometry(state, swap, 2)
    assert ext.as_dict() == {0: 1, 1: 0, 2: 2}
    with pytest.raises(InvalidInput):
        extend_isometry(state, swap, 0)


def test_extend_isometry_realizes_missing_point():
    state = replace(ApproximationState.start(ONE_TWO, [1, 2]), M=validate_space(PATH))
    f = PartialIsometry.of(state.M, state.M, {0: 1})
    with pytest.raises(Unrealized):
        extend_isometry(state, f, 2, budget=0)
    state, ext = extend_isometry(state, f, 2)
    assert ext(2) == 3
    assert state.M.d(1, 3) == 2


def test_embed_space_realizes_points_on_demand():
    N = validate_space(PATH)
    state, f = embed_space(ApproximationState.start(ONE_TWO, [1, 2]), N)
    assert restrict(state.M, [f(i) for i in range(N.n)]) == N


def test_swap_witness_in_simplex(simplex):
    one = Fraction(1)
    q = Quadruple(one, one, one, one)
    assert swap_witness_in(simplex(4), one, q) == ((0, 1, 2, 3), 1)
    with pytest.raises(InvalidInput):
        swap_witness_in(simplex(4), Fraction(5), q)


def test_build_over_the_naturals():
    state = build(parse_setexpr('sumclosed(1;inf)'), 4)
    assert state.values == tuple(Fraction(k) for k in range(1, 7))
    assert state.stage == 4
    assert state.M.n == 5
    assert all(v.denominator == 1 for v in dist_set(state.M))


def test_audit_passes_on_settled_points_at_domain_cap_three():
    state = build(ONE_TWO, 30)
    assert state.batch >= 2
    report = audit_extension(state, 3, state.values)
    assert report.passed
    assert report.checked == report.realized > 0


@pytest.fixture(scope='module')
def saturated():
    return saturate(build(ONE_TWO, 1), size_cap=4)


@pytest.mark.slow
def test_ages_agree_on_four_points_across_seeds(saturated):
    other = saturate(build(ONE_TWO, 1, seed=3), size_cap=4)
    assert ages_equal(saturated.M, other.M, size_cap=4)
    assert not ages_equal(saturated.M, build(ONE_TWO, 4).M, size_cap=4)


def test_ages_equal_on_four_point_simplices(simplex):
    assert ages_equal(simplex(4), simplex(5), size_cap=4)
    assert not ages_equal(simplex(4), simplex(3), size_cap=4)


def test_random_partial_isometries_extend():
    base = build(ONE_TWO, 20)
    M = base.M
    rng = np.random.default_rng(13)
    for _ in range(60):
        size = int(rng.integers(1, 3))
        dom = [int(p) for p in rng.choice(M.n, size, replace=False)]
        if size == 1:
            image = [int(rng.integers(M.n))]
        else:
            pairs = [(y, z) for y in range(M.n) for z in range(M.n)
                     if y != z and M.d(y, z) == M.d(dom[0], dom[1])]
            image = list(pairs[int(rng.integers(len(pairs)))])
        f = PartialIsometry.of(M, M, dict(zip(dom, image)))
        target = int(rng.choice([p for p in range(M.n) if p not in dom]))
        state, ext = extend_isometry(base, f, target)
        assert restrict(state.M, range(M.n)) == M
        assert ext.as_dict() == {**f.as_dict(), target: ext(target)}
        assert all(state.M.d(ext(p), ext(target)) == M.d(p, target) for p in dom)


@pytest.mark.slow
def test_swap_witnesses_in_a_saturated_space(saturated):
    one, two = Fraction(1), Fraction(2)
    for x, q in [(one, Quadruple(two, one, one, one)), (one, Quadruple(two, one, two, one)),
                 (two, Quadruple(two, two, one, one))]:
        found = swap_witness_in(saturated.M, x, q)
        assert found is not None
        (v, w, p, r), y = found
        assert saturated.M.d(v, w) == x
        assert y in ONE_TWO.values
        assert is_metric_triple(y, q.a, q.d) and is_metric_triple(y, q.c, q.b)
