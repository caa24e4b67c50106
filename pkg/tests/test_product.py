"""Product distances: sandwich modulus, materialization, closure."""

import random
from itertools import product as iproduct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multifix import (
    DistanceClass,
    FiniteDistanceSpace,
    ProductMode,
    ResourceLimitError,
    SequenceTrace,
    absolute_value_space,
    check_closure,
    check_uniform_equivalence,
    classify_finite,
    decode_index,
    encode_tuple,
    is_cauchy,
    materialize_product,
    product,
)
from multifix.oracle import random_finite_space


def test_product_sup_and_sum_formulas():
    base = absolute_value_space()
    sup = product(base, 2, ProductMode.SUP)
    tot = product(base, 2, ProductMode.SUM)
    assert sup.distance((0.0, 0.0), (1.0, 3.0)) == 3.0
    assert tot.distance((0.0, 0.0), (1.0, 3.0)) == 4.0


def test_product_arity_one_matches_base():
    base = absolute_value_space()
    rng = random.Random(7)
    sup = product(base, 1, ProductMode.SUP)
    tot = product(base, 1, ProductMode.SUM)
    for _ in range(100):
        x, y = rng.uniform(-50, 50), rng.uniform(-50, 50)
        assert sup.dist((x,), (y,)) == base.dist(x, y)
        assert tot.dist((x,), (y,)) == base.dist(x, y)


def test_product_rejects_bad_arity():
    with pytest.raises(ValueError):
        product(absolute_value_space(), 0, ProductMode.SUP)


def test_uniform_equivalence_random_pairs():
    rng = random.Random(11)
    pairs = [
        (
            tuple(rng.uniform(-10, 10) for _ in range(3)),
            tuple(rng.uniform(-10, 10) for _ in range(3)),
        )
        for _ in range(10_000)
    ]
    assert check_uniform_equivalence(absolute_value_space(), 3, pairs)


def test_uniform_equivalence_degenerate_and_single_coordinate():
    base = absolute_value_space()
    x = (1.0, 2.0, 3.0)
    assert check_uniform_equivalence(base, 3, [(x, x)])
    y = (1.0, 2.0, 7.5)  # only the last coordinate differs: sum equals sup
    sup = product(base, 3, ProductMode.SUP)
    tot = product(base, 3, ProductMode.SUM)
    assert sup.dist(x, y) == tot.dist(x, y) == 4.5


def test_encode_decode_lexicographic():
    n, m = 3, 2
    ranks = [encode_tuple(t, n) for t in iproduct(range(n), repeat=m)]
    assert ranks == list(range(n**m))  # first coordinate most significant
    for r in ranks:
        assert encode_tuple(decode_index(r, n, m), n) == r


def test_materialize_product_guard():
    base = FiniteDistanceSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    with pytest.raises(ResourceLimitError):
        materialize_product(base, 13, ProductMode.SUP)  # 3^13 > 10^6


def test_closure_metric_base():
    base = FiniteDistanceSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    report = check_closure(base, 2)
    assert report.ok
    assert report.sup_report.passed(DistanceClass.METRIC)
    assert report.sum_report.passed(DistanceClass.METRIC)
    assert report.sup_report.minimal_s == 1.0
    assert report.sum_report.minimal_s == 1.0


def test_closure_relaxed_triangle_constant_never_grows():
    base = FiniteDistanceSpace([[0, 1, 9], [1, 0, 4], [9, 4, 0]])
    base_report = classify_finite(base)
    assert base_report.minimal_s == pytest.approx(1.8, abs=1e-12)
    report = check_closure(base, 2)
    assert report.ok
    bound = base_report.minimal_s * (1 + 1e-12)
    assert report.sup_report.minimal_s <= bound
    assert report.sum_report.minimal_s <= bound


def test_closure_asymmetric_quasimetric_base():
    base = FiniteDistanceSpace([[0, 1], [2, 0]])
    report = check_closure(base, 2)
    assert report.ok
    for rep in (report.sup_report, report.sum_report):
        assert rep.passed(DistanceClass.QUASIMETRIC)
        assert not rep.passed(DistanceClass.SYMMETRIC)


def test_closure_rejects_invalid_base():
    bad = FiniteDistanceSpace([[0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        check_closure(bad, 2)


def test_closure_random_bases_all_classes():
    rng = random.Random(5)
    for _ in range(10):
        for kwargs in (
            dict(symmetric=True),
            dict(metricize=True),
            dict(symmetric=True, metricize=True),
            dict(positive=True),
        ):
            base = random_finite_space(rng, rng.randint(2, 4), **kwargs)
            assert check_closure(base, 2).ok


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


coords = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5).flatmap(lambda m: st.tuples(
    st.lists(coords, min_size=m, max_size=m),
    st.lists(coords, min_size=m, max_size=m),
)))
def test_sandwich_holds_exactly_even_for_equal_coordinates(pair):
    xs, ys = pair
    m = len(xs)
    base = absolute_value_space()
    sup = product(base, m, ProductMode.SUP)
    tot = product(base, m, ProductMode.SUM)
    x, y = tuple(xs), tuple(ys)
    dsup, dsum = sup.dist(x, y), tot.dist(x, y)
    assert dsup <= dsum <= m * dsup


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 100.0))
def test_sandwich_with_all_equal_coordinates(v):
    # Worst case for the upper bound: the correctly rounded sum of m copies
    # must not exceed the rounded product m * v.
    base = absolute_value_space()
    for m in (2, 3, 5, 7):
        sup = product(base, m, ProductMode.SUP)
        tot = product(base, m, ProductMode.SUM)
        x, y = (0.0,) * m, (v,) * m
        assert sup.dist(x, y) <= tot.dist(x, y) <= m * sup.dist(x, y)


def test_cauchy_agreement_between_modes():
    base = FiniteDistanceSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    m = 2
    sup_space = product(base, m, ProductMode.SUP)
    sum_space = product(base, m, ProductMode.SUM)
    traces = [
        [(0, 0)] * 10,
        [(0, 1), (1, 1)] + [(2, 2)] * 8,
        [(0, 2), (2, 0)] * 5,
    ]
    for pts in traces:
        t_sup = SequenceTrace(sup_space, pts)
        t_sum = SequenceTrace(sum_space, pts)
        for tol in (0.5, 1.0, 1e-9):
            if is_cauchy(t_sup, tol, 4):
                assert is_cauchy(t_sum, m * tol, 4)
            if is_cauchy(t_sum, tol, 4):
                assert is_cauchy(t_sup, tol, 4)


def test_closure_report_roundtrip():
    base = FiniteDistanceSpace([[0, 1], [2, 0]])
    d = check_closure(base, 2).to_dict()
    import json

    assert json.loads(json.dumps(d, sort_keys=True)) == json.loads(
        json.dumps(d, sort_keys=True)
    )
    assert d["ok"] is True
