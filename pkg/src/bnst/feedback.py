"""
Simulated measurement path at the primary receiver.

The learner never sees the interference channel. It hands a block of N
transmit vectors (one T_FB cycle) to a `FeedbackOracle`, which freezes the
channel for the cycle, adds receiver noise and returns one scalar energy
measurement.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from .matcore import spectral_norm

__all__ = [
    "MeasurementModel",
    "FeedbackOracle",
    "interference_power",
    "measure_q1",
    "measure_q2",
    "measure",
    "complex_noise",
]


class MeasurementModel(enum.Enum):
    """Energy measurement used by the primary receiver."""

    Q1 = "q1"  # mean of per-slot powers
    Q2 = "q2"  # power of the per-cycle mean vector


def interference_power(H, x):
    """Return ``||H x||^2``."""
    H = np.atleast_2d(np.asarray(H))
    x = np.asarray(x)
    if x.ndim != 1 or H.shape[1] != x.shape[0]:
        raise ValueError(
            f"cannot apply a {H.shape} channel to a vector of shape {x.shape}")
    y = H @ x
    return float(np.vdot(y, y).real)


def _as_slots(y):
    y = np.asarray(y)
    if y.ndim == 1:
        y = y[:, None]
    if y.ndim != 2 or y.shape[0] == 0:
        raise ValueError("need a non-empty list of vectors")
    return y


def measure_q1(y):
    """Mean over slots of ``||y(t)||^2``."""
    y = _as_slots(y)
    return float(np.mean(np.sum(np.abs(y) ** 2, axis=1)))


def measure_q2(y):
    """``||mean_t y(t)||^2``."""
    y = _as_slots(y)
    ybar = y.mean(axis=0)
    return float(np.vdot(ybar, ybar).real)


def measure(y, model):
    if MeasurementModel(model) is MeasurementModel.Q1:
        return measure_q1(y)
    return measure_q2(y)


def complex_noise(rng, shape, variance):
    """Circularly-symmetric complex Gaussian samples, E|n|^2 = variance."""
    if variance == 0:
        return np.zeros(shape, dtype=complex)
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _induced(H, x):
    """Worst per-slot ``||H x||^2 / (||x||^2 ||H||^2)`` over nonzero slots."""
    energy = np.sum(np.abs(x) ** 2, axis=1)
    live = energy > 0
    if not np.any(live):
        return 0.0
    gain = np.sum(np.abs(x[live] @ H.T) ** 2, axis=1) / energy[live]
    return float(gain.max() / spectral_norm(H) ** 2)


@dataclass
class FeedbackOracle:
    """
    Scalar-feedback access to an interference channel.

    Parameters
    ----------
    channel : ChannelProcess
        Source of H12(t); sampled once per query at the oracle clock.
    noise_variance : float
        Complex noise variance per receive antenna (E|n|^2).
    t_fb : float
        Feedback cycle length in seconds.
    t_s : float
        Symbol duration in seconds; ``N = ceil(t_fb / t_s)`` slots per cycle.
    model : MeasurementModel
        Energy measurement applied to the received block.
    seed : int
        Seed of the receiver-noise generator.
    clock : float
        Start time.
    quant_bits : int, optional
        If set, the measurement is uniformly quantised in dB with this many
        bits over ``quant_range_db``.
    quant_range_db : (float, float)
        Quantiser range.

    Attributes
    ----------
    query_count : int
        Number of completed queries.
    induced_log : list of (float, float)
        ``(time, normalised interference)`` of every query, computed from the
        noiseless channel. Evaluation bookkeeping only; learners must not read
        it.
    """

    channel: object
    noise_variance: float = 0.0
    t_fb: float = 1e-3
    t_s: float = 66.7e-6
    model: MeasurementModel = MeasurementModel.Q1
    seed: int = 0
    clock: float = 0.0
    quant_bits: int = None
    quant_range_db: tuple = (-80.0, 20.0)
    query_count: int = field(default=0, init=False)
    induced_log: list = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")
        if self.t_fb <= 0 or self.t_s <= 0:
            raise ValueError("t_fb and t_s must be positive")
        self.model = MeasurementModel(self.model)
        self._rng = np.random.default_rng(self.seed)
        self._cache = (None, None)

    @property
    def slots_per_cycle(self):
        # guard against 1e-3 / 1e-4 = 10.000000000000002
        return max(1, math.ceil(round(self.t_fb / self.t_s, 9)))

    @property
    def n_t(self):
        return self.channel.cols

    def _channel_now(self):
        t, H = self._cache
        if t != self.clock:
            H = self.channel.sample(self.clock)
            self._cache = (self.clock, H)
        return H

    def _quantise(self, value):
        if self.quant_bits is None:
            return value
        lo, hi = self.quant_range_db
        levels = 2 ** int(self.quant_bits) - 1
        db = 10 * math.log10(max(value, 1e-300))
        step = (hi - lo) / levels
        q = lo + step * round((min(max(db, lo), hi) - lo) / step)
        return 10 ** (q / 10)

    def query(self, transmit_slots):
        """
        Transmit one cycle and return the primary-side measurement.

        Parameters
        ----------
        transmit_slots : array_like
            N transmit vectors, shape (N, N_t).

        Returns
        -------
        float
        """
        x = np.asarray(transmit_slots, dtype=complex)
        N = self.slots_per_cycle
        if x.ndim != 2 or x.shape[0] != N:
            raise ValueError(f"expected {N} transmit slots, got shape {x.shape}")
        if x.shape[1] != self.n_t:
            raise ValueError(f"transmit vectors must have length {self.n_t}")
        H = self._channel_now()
        y = x @ H.T
        y = y + complex_noise(self._rng, y.shape, self.noise_variance)
        value = self._quantise(measure(y, self.model))
        self.induced_log.append((self.clock, _induced(H, x)))
        self.clock += self.t_fb
        self.query_count += 1
        return value

    def query_vector(self, x):
        """Transmit the same vector `x` in every slot of one cycle."""
        x = np.asarray(x, dtype=complex)
        return self.query(np.broadcast_to(x, (self.slots_per_cycle, x.shape[0])))

    def idle(self):
        """Let one cycle pass without a learning transmission."""
        t = self.clock
        self.clock += self.t_fb
        return t
