import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bnst.entypes import TypeClassCodec
from bnst.feedback import MeasurementModel
from bnst.superpose import (DecodeError, SuperpositionAlphabet,
                            binary_alphabet, decode_frame, decode_symbol,
                            delta_y1_db, receiver_average, superimpose,
                            unit_gain_alphabet, validate_alphabet)

from conftest import crandn, random_unitary

Q1, Q2 = MeasurementModel.Q1, MeasurementModel.Q2
THETA0 = 2 * math.pi / 3


def unit(rng, n):
    v = crandn(rng, n)
    return v / np.linalg.norm(v)


class TestAlphabet:
    def test_reference_binary(self):
        a = binary_alphabet(THETA0)
        assert validate_alphabet(a).ok
        assert a.carrier_gain == pytest.approx(0.5)
        assert sum(abs(1 + c) ** 2 for c in a.symbols) == pytest.approx(2.0)

    def test_quadrature_violates_q1(self):
        report = validate_alphabet(SuperpositionAlphabet((1j, -1j)))
        assert not report
        name, residual = report.violations[0]
        assert residual == pytest.approx(1.0)  # E|1+c|^2 = 2

    def test_binary_pi_over_two(self):
        assert not validate_alphabet(binary_alphabet(math.pi / 2))

    def test_no_data_q2(self):
        assert validate_alphabet(SuperpositionAlphabet((0,), model=Q2))

    def test_theta0_pi_rejected(self):
        with pytest.raises(ValueError):
            binary_alphabet(math.pi)
        with pytest.raises(ValueError):
            binary_alphabet(math.pi - 1e-14)

    def test_priors(self):
        with pytest.raises(ValueError):
            SuperpositionAlphabet((0, 1), priors=(0.5, 0.6))
        with pytest.raises(ValueError):
            SuperpositionAlphabet((0, 1), priors=(1.0, 0.0))

    def test_q1_mean_minus_one(self):
        # E|1+c|^2 = 1 but E{c} = -1 leaves no carrier to decode against
        a = SuperpositionAlphabet((np.exp(1j * math.pi / 2) - 1,
                                   np.exp(-1j * math.pi / 2) - 1,
                                   np.exp(1j * math.pi) - 1,
                                   np.exp(1j * 0.0) - 1))
        assert abs(a.carrier_gain) < 1e-15
        assert not validate_alphabet(a)

    def test_unit_gain_matches_binary(self):
        a = unit_gain_alphabet(2, spread=math.pi / 3)
        np.testing.assert_allclose(a.values, binary_alphabet(THETA0).values, atol=1e-15)

    @pytest.mark.parametrize("m", [2, 3, 4, 8])
    def test_unit_gain_valid(self, m):
        a = unit_gain_alphabet(m)
        assert validate_alphabet(a)
        np.testing.assert_allclose(np.abs(1 + a.values), 1.0, atol=1e-15)


class TestSuperimpose:
    def test_zero_symbol(self, rng):
        r1 = unit(rng, 3)
        f = superimpose(r1, [0] * 5, SuperpositionAlphabet((0,)))
        np.testing.assert_array_equal(f.transmit_vectors, np.tile(r1, (5, 1)))

    def test_per_slot_power(self, rng):
        r1 = unit(rng, 2)
        a = binary_alphabet(THETA0)
        f = superimpose(r1, rng.integers(0, 2, 16), a)
        np.testing.assert_allclose(np.linalg.norm(f.transmit_vectors, axis=1), 1.0,
                                   atol=1e-15)

    def test_exact_construction(self, rng):
        r1 = unit(rng, 3)
        a = binary_alphabet(THETA0)
        idx = [0, 1, 1, 0]
        f = superimpose(r1, idx, a)
        for t, i in enumerate(idx):
            assert np.array_equal(f.transmit_vectors[t], (1 + a.values[i]) * r1)

    def test_length_mismatch(self, rng):
        with pytest.raises(ValueError):
            superimpose(unit(rng, 2), [0, 1, 0], binary_alphabet(THETA0), n_slots=16)

    def test_bad_index(self, rng):
        with pytest.raises(IndexError):
            superimpose(unit(rng, 2), [0, 2], binary_alphabet(THETA0))


class TestReceiver:
    def test_average_constant(self, rng):
        v = crandn(rng, 2)
        np.testing.assert_allclose(receiver_average(np.tile(v, (7, 1))), v)

    def test_average_cancels(self, rng):
        v = crandn(rng, 2)
        assert np.abs(receiver_average(np.array([v, -v] * 3))).max() < 1e-15

    def test_balanced_average(self, rng):
        a = binary_alphabet(THETA0)
        g = crandn(rng, 2)
        seq = TypeClassCodec(16, 2).encode_int(1234)
        y = (1 + a.values[list(seq)])[:, None] * g[None, :]
        np.testing.assert_allclose(receiver_average(y), a.carrier_gain * g,
                                   atol=1e-14)

    def test_binary_hypotheses(self, rng):
        # H_1 = exp(j theta0) / (1 + cos theta0) * ybar
        a = binary_alphabet(THETA0)
        ybar = crandn(rng, 2)
        for i, sign in enumerate((1, -1)):
            h = np.exp(1j * sign * THETA0) / (1 + math.cos(THETA0)) * ybar
            assert decode_symbol(ybar / a.carrier_gain + h, ybar, a) == i

    def test_noiseless_exhaustive(self, rng):
        # every balanced frame of length 8 decodes perfectly
        a = binary_alphabet(THETA0)
        g = crandn(rng, 3)
        for ones in itertools.combinations(range(8), 4):
            seq = np.zeros(8, dtype=int)
            seq[list(ones)] = 1
            y = (1 + a.values[seq])[:, None] * g[None, :]
            np.testing.assert_array_equal(decode_frame(y, a), seq)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 6), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_noiseless_any_alphabet(self, m, reps, seed):
        rng = np.random.default_rng(seed)
        a = unit_gain_alphabet(m, spread=rng.uniform(0.3, 2.0))
        seq = rng.permutation(np.repeat(np.arange(m), reps))
        g = crandn(rng, 2)
        y = (1 + a.values[seq])[:, None] * g[None, :]
        np.testing.assert_array_equal(decode_frame(y, a), seq)

    def test_zero_reference(self):
        a = binary_alphabet(THETA0)
        with pytest.raises(DecodeError):
            decode_symbol(np.ones(2), np.zeros(2), a)

    def test_averaging_error(self, rng):
        # eps(N) = C g - ybar is zero noiselessly and shrinks like 1/sqrt(N)
        a = binary_alphabet(THETA0)
        g = crandn(rng, 2)
        sigma = 0.3
        rms = []
        for n in (16, 64):
            seq = np.repeat([0, 1], n // 2)
            clean = (1 + a.values[seq])[:, None] * g[None, :]
            assert np.abs(a.carrier_gain * g - receiver_average(clean)).max() < 1e-14
            errs = [np.linalg.norm(a.carrier_gain * g
                                   - receiver_average(clean + sigma * crandn(rng, n, 2)))
                    for _ in range(4000)]
            rms.append(math.sqrt(np.mean(np.square(errs))))
        assert rms[1] / rms[0] == pytest.approx(0.5, abs=0.05)

    def test_label_symmetry(self, rng):
        # swapping the two symbols and relabelling gives the same errors
        a = binary_alphabet(THETA0)
        b = SuperpositionAlphabet(a.symbols[::-1])
        g = crandn(rng, 2)
        seq = np.repeat([0, 1], 8)
        noise = 0.6 * crandn(rng, 16, 2)
        ya = (1 + a.values[seq])[:, None] * g + noise
        yb = (1 + b.values[1 - seq])[:, None] * g + noise
        np.testing.assert_array_equal(decode_frame(ya, a), 1 - decode_frame(yb, b))


class TestDeltaY1:
    def setup_method(self):
        rng = np.random.default_rng(5)
        self.H12 = crandn(rng, 1, 3)
        self.T = random_unitary(rng, 3)
        self.r1 = unit(rng, 3)
        self.rng = rng

    def test_noiseless_q1_exact(self):
        a = binary_alphabet(THETA0)
        f = superimpose(self.r1, self.rng.integers(0, 2, 16), a)
        assert abs(delta_y1_db(self.H12, self.T, self.r1, f, 0.0, Q1)) < 1e-14

    def test_noiseless_q2_balanced(self):
        a = SuperpositionAlphabet((0.5, -0.5), model=Q2)
        assert validate_alphabet(a)
        f = superimpose(self.r1, np.repeat([0, 1], 8), a)
        assert abs(delta_y1_db(self.H12, self.T, self.r1, f, 0.0, Q2)) < 1e-10

    def test_noisy_average_small(self):
        a = binary_alphabet(THETA0)
        g2 = np.linalg.norm(self.H12 @ self.T @ self.r1) ** 2
        sigma2 = g2 / 10 ** (4.5 / 10)
        vals = []
        for k in range(500):
            seq = TypeClassCodec(16, 2).encode_int(k)
            f = superimpose(self.r1, seq, a)
            vals.append(delta_y1_db(self.H12, self.T, self.r1, f, sigma2, Q1,
                                    rng=self.rng))
        assert abs(np.mean(vals)) <= 0.5
