from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from percolab import (
    CylinderUnionEvent,
    EnumerationCapError,
    Event,
    MonotonicityError,
    build_box_graph,
    connection_event,
    covariance_sum,
    derivative_exact,
    edge_open_event,
    enumerate_probability,
    fkg_slack,
    is_decreasing,
    is_increasing,
    origin_to_boundary_event,
    pivotal_sum,
    random_increasing_event,
    verify_fkg,
    verify_russo,
    verify_support,
)
from percolab.exact import pivotal_probabilities
from percolab.streams import substream


def random_events(seed):
    rng = substream(seed, 100)
    return random_increasing_event(12, rng)


class TestEnumeration:
    def test_single_edge(self):
        A = edge_open_event(0, 4)
        assert enumerate_probability(A, 0.3) == pytest.approx(0.3)
        assert derivative_exact(A, 0.3) == pytest.approx(1.0)

    def test_theta_one_closed_form(self):
        # theta_1(p) = 1 - (1-p)^4 on the 2d box of radius 1
        g = build_box_graph(2, 1)
        A = origin_to_boundary_event(g)
        for p in (0.2, 0.5, 0.8):
            assert enumerate_probability(A, p) == pytest.approx(1 - (1 - p) ** 4)
            assert derivative_exact(A, p) == pytest.approx(4 * (1 - p) ** 3)

    def test_exact_rational(self):
        g = build_box_graph(2, 1)
        A = origin_to_boundary_event(g)
        p = Fraction(1, 2)
        assert enumerate_probability(A, p) == Fraction(15, 16)
        assert derivative_exact(A, p) == Fraction(1, 2)

    def test_two_point_connection(self):
        # neighbors x,y in the 1d path of radius 1: edges (x,y) chains
        g = build_box_graph(1, 1)
        left, mid, right = 0, 1, 2
        A = connection_event(g, left, right)
        assert enumerate_probability(A, 0.5) == pytest.approx(0.25)

    def test_cap(self):
        A = Event(lambda bits: bool(bits[0]), 30)
        with pytest.raises(EnumerationCapError):
            enumerate_probability(A, 0.5)

    def test_empty_and_full(self):
        always = Event(lambda bits: True, 4, support=[])
        never = Event(lambda bits: False, 4, support=[])
        assert enumerate_probability(always, 0.37) == pytest.approx(1.0)
        assert enumerate_probability(never, 0.37) == pytest.approx(0.0)
        assert derivative_exact(always, 0.37) == pytest.approx(0.0)

    def test_probability_matches_sampling_count(self):
        # at p = 1/2 the probability is (# accepting configs) / 2^s
        A = CylinderUnionEvent([[0, 1], [2]], 4)
        count = 0
        for w in range(16):
            bits = np.array([(w >> j) & 1 == 1 for j in range(4)])
            count += A(bits)
        assert enumerate_probability(A, 0.5) == pytest.approx(count / 16)


class TestMonotonicity:
    def test_cylinder_union_is_increasing(self):
        A = CylinderUnionEvent([[0, 2], [1]], 4)
        assert is_increasing(A)
        assert not is_decreasing(A)
        assert is_decreasing(A.complement())

    def test_non_monotone(self):
        parity = Event(lambda bits: bool(bits[0]) != bool(bits[1]), 2)
        assert not is_increasing(parity)
        assert not is_decreasing(parity)

    def test_origin_to_boundary_increasing(self):
        g = build_box_graph(2, 1)
        assert is_increasing(origin_to_boundary_event(g))


class TestSupport:
    def test_declared_support_verified(self):
        A = edge_open_event(2, 6)
        assert verify_support(A)

    def test_wrong_support_detected(self):
        A = Event(lambda bits: bool(bits[0]) and bool(bits[1]), 4, support=[0])
        assert not verify_support(A)


class TestRusso:
    def test_origin_to_boundary(self):
        g = build_box_graph(2, 1)
        A = origin_to_boundary_event(g)
        for p in (0.2, 0.5, 0.8):
            rep = verify_russo(A, p)
            assert rep.passed
            assert rep.residual_pivotal <= 1e-10
            assert rep.residual_covariance <= 1e-10

    def test_pivotal_rational_exact(self):
        g = build_box_graph(2, 1)
        A = origin_to_boundary_event(g)
        p = Fraction(1, 2)
        assert pivotal_sum(A, p) == derivative_exact(A, p) == Fraction(1, 2)

    def test_covariance_form_non_monotone(self):
        # the covariance identity holds for events that are not monotone
        parity = Event(lambda bits: bool(bits[0]) != bool(bits[1]), 2)
        for p in (0.3, 0.7):
            assert covariance_sum(parity, p) == pytest.approx(
                derivative_exact(parity, p), abs=1e-12
            )

    def test_pivotal_sum_rejects_non_monotone(self):
        parity = Event(lambda bits: bool(bits[0]) != bool(bits[1]), 2)
        with pytest.raises(MonotonicityError):
            pivotal_sum(parity, 0.5)

    def test_pivotal_probabilities_outside_support_zero(self):
        A = edge_open_event(1, 5)
        piv = pivotal_probabilities(A, 0.4)
        assert piv[1] == pytest.approx(1.0)
        assert all(piv[e] == 0 for e in (0, 2, 3, 4))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([0.2, 0.5, 0.8]))
    def test_random_increasing_events(self, seed, p):
        A = random_events(seed)
        rep = verify_russo(A, p)
        assert rep.increasing
        assert rep.passed


class TestFkg:
    def test_positive_association(self):
        g = build_box_graph(2, 1)
        A = origin_to_boundary_event(g)
        B = edge_open_event(0, g.n_edges)
        assert verify_fkg(A, B, 0.5) >= 0.0

    def test_independent_supports_zero_slack(self):
        A = edge_open_event(0, 6)
        B = edge_open_event(3, 6)
        assert verify_fkg(A, B, 0.4) == pytest.approx(0.0, abs=1e-15)

    def test_rejects_non_monotone(self):
        parity = Event(lambda bits: bool(bits[0]) != bool(bits[1]), 4)
        with pytest.raises(MonotonicityError):
            verify_fkg(parity, edge_open_event(0, 4), 0.5)

    def test_complement_pair_reversed(self):
        # increasing vs decreasing: the correlation flips sign
        A = CylinderUnionEvent([[0, 1]], 4)
        slack = fkg_slack(A, A.complement(), 0.5)
        assert slack <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.5, 0.7]))
    def test_random_pairs(self, seed, p):
        rng = substream(seed, 101)
        A = random_increasing_event(12, rng)
        B = random_increasing_event(12, rng)
        assert verify_fkg(A, B, p) >= -1e-12
