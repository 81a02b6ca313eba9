import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bnst.feedback import FeedbackOracle
from bnst.learning import (ACQUISITION, EigenbasisEstimate, SweepParams,
                           bnsl_sweep, learning_stage, line_search,
                           next_element, num_stages)
from bnst.matcore import hermitian_eig_oracle, rotation_column
from bnst.tracking import normalized_interference_db, precoder_from

from conftest import exact_null_space, principal_angle, static_channel


def exact_basis(H):
    """Eigenbasis of H* H, ascending, from numpy (independent of the package)."""
    _, V = np.linalg.eigh(H.conj().T @ H)
    return EigenbasisEstimate(V)


class TestSweepParams:
    @pytest.mark.parametrize("kwargs", [
        {"theta_max": 0.0}, {"theta_max": 2.0}, {"theta_tilde": -0.1},
        {"eta": 0.0}, {"eta": 1.0}, {"cycles_per_stage": 3},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            SweepParams(**kwargs)

    def test_acquisition_defaults(self):
        assert ACQUISITION.theta_tilde == pytest.approx(math.pi / 3)
        assert ACQUISITION.theta_max == pytest.approx(math.pi / 2)
        assert ACQUISITION.eta == 0.1


class TestNextElement:
    def test_examples(self):
        # first and third stage of a 3-antenna sweep, indices from zero
        assert next_element(0, 3) == (0, 1)
        assert next_element(1, 3) == (0, 2)
        assert next_element(2, 3) == (1, 2)

    @pytest.mark.parametrize("n", [2, 3, 4, 6])
    def test_covers_pairs_once(self, n):
        pairs = [next_element(k, n) for k in range(num_stages(n))]
        expected = [(l, m) for l in range(n) for m in range(l + 1, n)]
        assert pairs == expected

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            next_element(3, 3)


class TestLineSearch:
    def test_shifted_cosine(self):
        eta = 0.1
        res = line_search(lambda t: 1 - math.cos(t - 0.3), math.pi / 2, eta)
        assert abs(res.angle - 0.3) <= eta * math.pi / 2

    @pytest.mark.parametrize("eta", [0.1, 0.01, 0.001])
    def test_even_function(self, eta):
        res = line_search(lambda t: t * t, 1.0, eta)
        assert abs(res.angle) <= eta

    def test_constant_prefers_centre(self):
        res = line_search(lambda t: 2.0, math.pi, 0.1, periodic=True)
        assert res.angle == 0.0

    def test_periodic_wraps(self):
        # minimum at the seam of [-pi, pi)
        res = line_search(lambda p: 1 + math.cos(p), math.pi, 0.01, periodic=True)
        assert abs(abs(res.angle) - math.pi) <= 0.01 * math.pi
        assert all(-math.pi <= a < math.pi for a, _ in res.probes)

    def test_query_cap(self):
        res = line_search(lambda t: t * t, 1.0, 0.001, max_queries=10)
        assert res.num_queries == 10

    def test_returns_best_probe(self, rng):
        f = lambda t: math.sin(3 * t) ** 2 + 0.1 * t
        res = line_search(f, 1.0, 0.05)
        assert res.value == min(v for _, v in res.probes)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-1.4, 1.4), st.sampled_from([0.1, 0.03, 0.01]))
    def test_unimodal_resolution(self, t0, eta):
        res = line_search(lambda t: 1 - math.cos(t - t0), math.pi / 2, eta)
        assert abs(res.angle - t0) <= eta * math.pi / 2

    def test_matches_closed_form_angle(self, rng):
        # stage objective of a 2x2 problem against the eigen-oracle
        for seed in range(20):
            H = static_channel(1, 2, seed).sample(0.0)
            G = H.conj().T @ H
            lam, _ = hermitian_eig_oracle(G)
            eta = 0.001
            phi = -np.angle(G[0, 1]) + math.pi  # aligns the probe's cross term
            f = lambda t: float(np.linalg.norm(H @ rotation_column(2, 0, 1, t, phi)) ** 2)
            res = line_search(f, math.pi / 2, eta, periodic=True)
            # the minimiser of the stage objective attains the small eigenvalue
            assert res.value <= lam[0] + 4 * (eta * math.pi / 2) ** 2 * lam[-1]
            # and coincides with the eigenvector direction
            r = rotation_column(2, 0, 1, res.angle, phi)
            v = exact_null_space(H)[:, 0]
            assert 1 - abs(np.vdot(v, r)) < 1e-5


class TestLearningStage:
    def test_one_stage_2x1(self):
        for seed in range(20):
            ch = static_channel(1, 2, seed)
            H = ch.sample(0.0)
            W0 = EigenbasisEstimate.identity(2)
            before = np.linalg.norm(H @ W0.w[:, 0]) ** 2
            res = learning_stage(FeedbackOracle(ch), W0, 0, 1,
                                 SweepParams(math.pi / 3, math.pi / 2, 0.01))
            after = np.linalg.norm(H @ res.estimate.w[:, 0]) ** 2
            assert after <= 1e-3 * before

    def test_fixed_point(self):
        ch = static_channel(1, 2, 3)
        res = learning_stage(FeedbackOracle(ch), exact_basis(ch.sample(0.0)),
                             0, 1, ACQUISITION)
        assert abs(res.theta) <= ACQUISITION.eta * ACQUISITION.theta_max

    def test_query_accounting(self):
        ch = static_channel(1, 3, 1)
        o = FeedbackOracle(ch)
        res = learning_stage(o, EigenbasisEstimate.identity(3), 0, 2, ACQUISITION)
        assert o.query_count == res.phi_search.num_queries + res.theta_search.num_queries
        assert o.query_count == res.num_queries

    def test_cycle_cap(self):
        ch = static_channel(1, 3, 1)
        o = FeedbackOracle(ch)
        learning_stage(o, EigenbasisEstimate.identity(3), 0, 1,
                       SweepParams(eta=0.001, cycles_per_stage=12))
        assert o.query_count == 12

    def test_diagonalises_plane(self):
        # blind (theta, phi) match the non-blind rotation: the rotated
        # (l, m) block of W* G W is diagonal and column l holds its
        # smaller eigenvalue, up to the search resolution
        eta = 0.001
        for nt in (2, 3):
            for seed in range(50):
                ch = static_channel(1, nt, 100 + seed)
                H = ch.sample(0.0)
                G = H.conj().T @ H
                o = FeedbackOracle(ch)
                _, stages = bnsl_sweep(o, EigenbasisEstimate.identity(nt),
                                       SweepParams(eta=eta), return_stages=True)
                for st_ in stages:
                    w = st_.estimate.w
                    A = w.conj().T @ G @ w
                    l, m = st_.l, st_.m
                    block = A[np.ix_([l, m], [l, m])]
                    lam = np.linalg.eigvalsh(block)
                    scale = np.trace(G).real
                    assert abs(block[0, 1]) <= 2 * 2 * eta * math.pi / 2 * scale
                    assert block[0, 0].real - lam[0] <= 2 * (eta * math.pi) ** 2 * scale


class TestSweep:
    def test_default_2x1_below_trigger(self):
        for seed in range(50):
            ch = static_channel(1, 2, seed)
            W = bnsl_sweep(FeedbackOracle(ch), EigenbasisEstimate.identity(2),
                           ACQUISITION)
            assert normalized_interference_db(ch.sample(0.0),
                                              precoder_from(W, 1)) <= -20

    def test_fine_sweeps_reach_null_space(self):
        for nt in (2, 3):
            for seed in range(10):
                ch = static_channel(1, nt, seed)
                o = FeedbackOracle(ch)
                W = EigenbasisEstimate.identity(nt)
                for _ in range(2):
                    W = bnsl_sweep(o, W, SweepParams(eta=0.01))
                dist = principal_angle(precoder_from(W, 1),
                                       exact_null_space(ch.sample(0.0)))
                assert dist < 1e-2

    def test_fixed_point(self):
        ch = static_channel(1, 3, 9)
        _, stages = bnsl_sweep(FeedbackOracle(ch), exact_basis(ch.sample(0.0)),
                               ACQUISITION, return_stages=True)
        for s in stages:
            assert abs(s.theta) <= ACQUISITION.eta * ACQUISITION.theta_max

    def test_unitarity_and_order(self):
        for seed in range(20):
            ch = static_channel(1, 3, seed)
            W = bnsl_sweep(FeedbackOracle(ch), EigenbasisEstimate.identity(3),
                           ACQUISITION)
            assert W.unitarity_error() < 1e-8
            assert np.all(np.diff(W.column_power) >= 0)

    def test_monotone_progress(self):
        # precoder interference never increases over a sweep (static)
        for seed in range(100):
            nt = 2 + seed % 2
            ch = static_channel(1, nt, 500 + seed)
            H = ch.sample(0.0)
            W0 = EigenbasisEstimate.identity(nt)
            o = FeedbackOracle(ch)
            W1 = bnsl_sweep(o, W0, ACQUISITION)
            W2 = bnsl_sweep(o, W1, ACQUISITION)
            e1 = np.linalg.norm(H @ precoder_from(W1, 1)) ** 2
            e2 = np.linalg.norm(H @ precoder_from(W2, 1)) ** 2
            e0 = np.linalg.norm(H @ precoder_from(W0, 1)) ** 2
            assert e1 <= e0 + 1e-12
            assert e2 <= e1 * (1 + 1e-6) + 1e-12

    def test_blind(self, monkeypatch):
        # the learner may only touch the channel through the oracle
        ch = static_channel(1, 3, 4)
        o = FeedbackOracle(ch)
        calls = []
        real_query = FeedbackOracle.query

        def spy(self, x):
            calls.append(1)
            return real_query(self, x)

        monkeypatch.setattr(FeedbackOracle, "query", spy)
        W = bnsl_sweep(o, EigenbasisEstimate.identity(3), ACQUISITION)
        assert len(calls) == o.query_count > 0
        import bnst.learning as learning
        assert "channel" not in learning.__dict__
        assert W.unitarity_error() < 1e-8


class TestEstimate:
    def test_sorted_nan_last(self):
        W = EigenbasisEstimate(np.eye(3), [np.nan, 2.0, 1.0])
        s = W.sorted()
        np.testing.assert_array_equal(s.column_power[:2], [1.0, 2.0])
        assert np.isnan(s.column_power[2])
        np.testing.assert_array_equal(s.w[:, 0], np.eye(3)[:, 2])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            EigenbasisEstimate(np.ones((2, 3)))
