"""Distance spaces: evaluation, balls, sequence surrogates, classification."""

import math
from itertools import product as iproduct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multifix import (
    CarrierError,
    DistanceClass,
    DistanceSpace,
    FiniteDistanceSpace,
    SequenceTrace,
    absolute_value_space,
    classify_finite,
    euclidean_space,
    is_cauchy,
    is_convergent_to,
    is_strongly_asymptotically_regular,
    squared_difference_space,
)
from multifix.spaces import AxiomReport


# ---------------------------------------------------------------------------
# distance and balls
# ---------------------------------------------------------------------------


def test_distance_absolute_value():
    assert absolute_value_space().distance(1.0, 4.0) == 3.0


def test_distance_squared_difference():
    assert squared_difference_space().distance(1, 3) == 4.0


def test_distance_finite_lookup():
    space = FiniteDistanceSpace([[0, 2], [1, 0]])
    assert space.distance(0, 1) == 2.0


def test_distance_outside_carrier():
    space = FiniteDistanceSpace([[0, 2], [1, 0]])
    with pytest.raises(CarrierError):
        space.distance(0, 2)
    with pytest.raises(CarrierError):
        space.distance(-1, 0)  # no wraparound indexing


def test_euclidean_distance_and_carrier():
    space = euclidean_space(2)
    assert space.distance((0.0, 0.0), (3.0, 4.0)) == 5.0
    with pytest.raises(CarrierError):
        space.distance((0.0,), (3.0, 4.0))


def test_ball_strict_inequality():
    space = absolute_value_space()
    assert space.ball_contains(0.0, 1.0, 0.5)
    assert not space.ball_contains(0.0, 1.0, 1.0)  # boundary excluded
    fin = FiniteDistanceSpace([[0, 2], [1, 0]])
    assert not fin.ball_contains(0, 2.0, 1)
    with pytest.raises(ValueError):
        space.ball_contains(0.0, 0.0, 0.5)


# ---------------------------------------------------------------------------
# sequence surrogates
# ---------------------------------------------------------------------------


def _dyadic_min_space():
    # dist(i, j) = 2^(-min(i, j)) for i != j: a valid distance on {0, 1, 2, ...}.
    return DistanceSpace(
        dist=lambda i, j: 0.0 if i == j else 2.0 ** (-min(i, j)),
        name="dyadic min space",
    )


def test_is_cauchy_tail_below_tolerance():
    trace = SequenceTrace(_dyadic_min_space(), range(30))
    assert is_cauchy(trace, tol=1e-3, window=5)


def test_is_cauchy_alternating_fails():
    space = absolute_value_space()
    trace = SequenceTrace(space, [0.0, 1.0] * 10)
    assert not is_cauchy(trace, tol=0.5, window=4)


def test_is_cauchy_constant_sequence():
    space = absolute_value_space()
    trace = SequenceTrace(space, [3.0] * 12)
    for tol in (1e-300, 1e-10, 1.0):
        assert is_cauchy(trace, tol=tol, window=6)


def test_is_cauchy_window_exceeds_length():
    trace = SequenceTrace(absolute_value_space(), [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        is_cauchy(trace, tol=1.0, window=3)


def test_is_convergent_to_examples():
    space = absolute_value_space()
    points = [1.0 / n for n in range(1, 501)]
    trace = SequenceTrace(space, points)
    assert is_convergent_to(trace, 0.0, tol=1e-2, window=3)
    assert not is_convergent_to(trace, 1.0, tol=1e-2, window=3)


def test_is_convergent_to_orientation_sensitive():
    # d(x, y) = y - x when y >= x, else 1: one-way shrinking distances.
    space = DistanceSpace(
        dist=lambda x, y: y - x if y >= x else 1.0,
        name="one-way space",
    )
    # Distance axioms hold: d >= 0 and the two-way sum is positive iff points differ.
    for x, y in [(0.0, 1.0), (2.0, 0.5), (1.0, 1.0)]:
        assert space.dist(x, y) >= 0
        assert (space.dist(x, y) + space.dist(y, x) == 0) == (x == y)
    points = [1.0 / n for n in range(1, 501)]
    trace = SequenceTrace(space, points)
    # From the candidate limit to the iterates the distances vanish...
    assert is_convergent_to(trace, 0.0, tol=1e-2, window=3)
    # ...while every reversed distance stays at 1.
    assert all(space.dist(p, 0.0) == 1.0 for p in points)


def test_asymptotic_regularity_halving_orbit():
    # Orbit of x -> x/2 from 1: the n-th symmetrized step is 2^(-n).
    space = absolute_value_space()
    points = [2.0**-n for n in range(41)]
    trace = SequenceTrace(space, points)
    assert is_strongly_asymptotically_regular(trace, tol=1e-6, window=5)
    short = SequenceTrace(space, points[:16])
    assert not is_strongly_asymptotically_regular(short, tol=1e-6, window=5)


def test_asymptotic_regularity_translation_fails():
    space = absolute_value_space()
    trace = SequenceTrace(space, [float(n) for n in range(50)])
    assert not is_strongly_asymptotically_regular(trace, tol=0.5, window=8)


def test_asymptotic_regularity_constant_orbit():
    trace = SequenceTrace(absolute_value_space(), [4.0] * 20)
    assert is_strongly_asymptotically_regular(trace, tol=1e-300, window=8)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _violates(space, cls, witness):
    """Re-evaluate a reported counterexample through the distance."""
    d = space.dist
    if cls is DistanceClass.SYMMETRIC:
        i, j = witness
        return d(i, j) != d(j, i)
    if cls in (DistanceClass.QUASIMETRIC, DistanceClass.METRIC):
        if len(witness) == 2:  # metric failed through symmetry
            i, j = witness
            return d(i, j) != d(j, i)
        x, y, z = witness
        return d(x, y) > d(x, z) + d(z, y)
    if cls is DistanceClass.S_DISTANCE:
        x, y, z = witness
        return d(x, y) > 0 and d(x, z) + d(z, y) == 0
    if cls in (DistanceClass.N_DISTANCE, DistanceClass.F_DISTANCE):
        x, y, z, eps = witness
        return d(x, y) == 0 and d(y, z) == 0 and d(x, z) > eps
    if cls in (DistanceClass.H_DISTANCE, DistanceClass.C_DISTANCE):
        x, y, z = witness
        return x != y and d(x, z) == 0 and d(y, z) == 0
    raise AssertionError(f"no recheck for {cls}")


def test_classify_integer_metric():
    space = FiniteDistanceSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    report = classify_finite(space)
    for cls in (
        DistanceClass.SYMMETRIC,
        DistanceClass.QUASIMETRIC,
        DistanceClass.METRIC,
        DistanceClass.N_DISTANCE,
        DistanceClass.F_DISTANCE,
        DistanceClass.H_DISTANCE,
        DistanceClass.C_DISTANCE,
        DistanceClass.S_DISTANCE,
        DistanceClass.COMPLETE,
    ):
        assert report.passed(cls), cls
    assert report.minimal_s == 1.0


def test_classify_squared_differences_on_0_1_3():
    # Brute-force oracle first: scan all triples of the value carrier directly.
    values = [0.0, 1.0, 3.0]
    d = lambda a, b: (a - b) ** 2
    oracle_violations = [
        (x, y, z)
        for x in values
        for y in values
        for z in values
        if d(x, y) > d(x, z) + d(z, y)
    ]
    assert (0.0, 3.0, 1.0) in oracle_violations
    oracle_s = max(
        d(x, y) / (d(x, z) + d(z, y))
        for x in values
        for y in values
        for z in values
        if x != y and d(x, z) + d(z, y) > 0
    )
    assert oracle_s == 1.8

    matrix = [[d(a, b) for b in values] for a in values]
    report = classify_finite(FiniteDistanceSpace(matrix))
    assert not report.passed(DistanceClass.QUASIMETRIC)
    # Index witness (0, 2, 1) names the carrier values (0, 3, 1).
    assert report.counterexample(DistanceClass.QUASIMETRIC) == (0, 2, 1)
    assert report.minimal_s == pytest.approx(1.8, abs=1e-12)
    assert report.passed(DistanceClass.S_DISTANCE)
    assert report.passed(DistanceClass.N_DISTANCE)
    assert report.passed(DistanceClass.H_DISTANCE)
    assert not report.passed(DistanceClass.METRIC)


def test_classify_two_point_asymmetric():
    # Exhaustive triple check done by hand: with d(a,b)=1, d(b,a)=2 every
    # triangle route is at least as long as the direct hop.
    space = FiniteDistanceSpace([[0, 1], [2, 0]])
    report = classify_finite(space)
    assert not report.passed(DistanceClass.SYMMETRIC)
    assert report.counterexample(DistanceClass.SYMMETRIC) == (0, 1)
    assert report.passed(DistanceClass.QUASIMETRIC)
    assert not report.passed(DistanceClass.METRIC)


def test_classify_fundamental_failures():
    diag = FiniteDistanceSpace([[1.0, 1.0], [1.0, 0.0]])
    report = classify_finite(diag)
    assert not report.fundamental.passed
    assert report.fundamental.counterexample == (0, 0)
    assert report.verdicts == {}
    assert report.minimal_s is None

    two_way = FiniteDistanceSpace([[0.0, 0.0], [0.0, 0.0]])
    report = classify_finite(two_way)
    assert not report.fundamental.passed
    assert report.fundamental.counterexample == (0, 1)


def test_classify_counterexamples_reevaluate():
    spaces = [
        FiniteDistanceSpace([[0, 1, 9], [1, 0, 4], [9, 4, 0]]),
        FiniteDistanceSpace([[0, 1], [2, 0]]),
        # Zero one-way hops 0->1->2 with d(0,2)=5: defeats chaining, separation,
        # and every relaxed-triangle multiple.
        FiniteDistanceSpace([[0, 0, 5], [1, 0, 0], [5, 2, 0]]),
    ]
    for space in spaces:
        report = classify_finite(space)
        assert report.fundamental.passed
        for cls, verdict in report.verdicts.items():
            if cls is DistanceClass.COMPLETE:
                continue
            if not verdict.passed:
                assert verdict.counterexample is not None, cls
                assert _violates(space, cls, verdict.counterexample), (cls, verdict)


def test_classify_zero_chain_breaks_n_and_h():
    space = FiniteDistanceSpace([[0, 0, 5], [1, 0, 0], [5, 2, 0]])
    report = classify_finite(space)
    assert not report.passed(DistanceClass.N_DISTANCE)
    assert not report.passed(DistanceClass.F_DISTANCE)
    assert report.n_delta_witness is None
    assert math.isinf(report.minimal_s)
    assert not report.passed(DistanceClass.S_DISTANCE)


def test_n_delta_witnesses_prove_the_implication():
    space = FiniteDistanceSpace([[0, 1, 9], [1, 0, 4], [9, 4, 0]])
    report = classify_finite(space)
    assert report.passed(DistanceClass.N_DISTANCE)
    d = space.dist
    assert report.n_delta_witness
    for x, eps, delta in report.n_delta_witness:
        assert delta > 0
        for y in range(space.n):
            for z in range(space.n):
                if d(x, y) <= delta and d(y, z) <= delta:
                    assert d(x, z) <= eps


def test_axiom_report_roundtrip():
    report = classify_finite(FiniteDistanceSpace([[0, 1, 9], [1, 0, 4], [9, 4, 0]]))
    again = AxiomReport.from_dict(report.to_dict())
    assert again.to_dict() == report.to_dict()


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


def _random_metric_matrix(draw_entries):
    n = len(draw_entries)
    M = [[0.0] * n for _ in range(n)]
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            M[i][j] = M[j][i] = float(draw_entries[i][j])
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if M[i][k] + M[k][j] < M[i][j]:
                    M[i][j] = M[i][k] + M[k][j]
    return M


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 5).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(1, 9), min_size=n, max_size=n), min_size=n, max_size=n
        )
    )
)
def test_metric_spaces_pass_every_weaker_class(rows):
    M = _random_metric_matrix(rows)
    report = classify_finite(FiniteDistanceSpace(M))
    assert report.passed(DistanceClass.METRIC)
    assert report.minimal_s == 1.0
    for cls in (
        DistanceClass.N_DISTANCE,
        DistanceClass.F_DISTANCE,
        DistanceClass.H_DISTANCE,
        DistanceClass.S_DISTANCE,
    ):
        assert report.passed(cls)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(st.integers(0, 6), min_size=3, max_size=3), min_size=3, max_size=3),
    st.sampled_from([0.5, 2.0, 4.0, 3.0]),
)
def test_minimal_s_scale_invariance(rows, c):
    M = [[float(rows[i][j]) if i != j else 0.0 for j in range(3)] for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            if M[i][j] + M[j][i] == 0:
                M[i][j] = 1.0
    base = classify_finite(FiniteDistanceSpace(M))
    scaled = classify_finite(FiniteDistanceSpace([[c * v for v in row] for row in M]))
    if base.minimal_s is None or math.isinf(base.minimal_s):
        assert scaled.minimal_s == base.minimal_s
    else:
        assert scaled.minimal_s == pytest.approx(base.minimal_s, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(st.integers(0, 4), min_size=4, max_size=4), min_size=4, max_size=4)
)
def test_h_verdict_matches_separation_quantity(rows):
    M = [[float(rows[i][j]) if i != j else 0.0 for j in range(4)] for i in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            if M[i][j] + M[j][i] == 0:
                M[i][j] = 1.0
    space = FiniteDistanceSpace(M)
    report = classify_finite(space)
    separated = all(
        min(max(M[x][z], M[y][z]) for z in range(4)) > 0
        for x in range(4)
        for y in range(4)
        if x != y
    )
    assert report.passed(DistanceClass.H_DISTANCE) == separated
    assert report.passed(DistanceClass.C_DISTANCE) == separated


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-12, 1e6), st.integers(2, 6))
def test_constant_tail_is_cauchy_at_any_tolerance(tol, window):
    trace = SequenceTrace(absolute_value_space(), [1.0, 5.0] + [2.0] * (window + 2))
    assert is_cauchy(trace, tol=tol, window=window)
