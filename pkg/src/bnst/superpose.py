"""
Data transmission superimposed on the learning signal.

During a feedback cycle the transmitter repeats one learning vector r1.
Data rides on it multiplicatively: slot t carries ``(1 + c(t)) r1`` with
``c(t)`` drawn from a small alphabet. The alphabet is chosen so that the
primary receiver's energy measurement is unchanged, and the secondary
receiver recovers the symbols by comparing each slot against the cycle
average.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .feedback import MeasurementModel, complex_noise, measure

__all__ = [
    "DecodeError",
    "SuperpositionAlphabet",
    "AlphabetReport",
    "SuperposedFrame",
    "validate_alphabet",
    "binary_alphabet",
    "unit_gain_alphabet",
    "superimpose",
    "receiver_average",
    "decode_symbol",
    "decode_frame",
    "delta_y1_db",
]

CONSTRAINT_TOL = 1e-12


class DecodeError(ValueError):
    """The receiver has no usable reference to decode against."""


@dataclass(frozen=True)
class SuperpositionAlphabet:
    """
    Symbol set ``{c_i}`` with priors and the measurement model it targets.

    Parameters
    ----------
    symbols : sequence of complex
    priors : sequence of float, optional
        Defaults to uniform.
    model : MeasurementModel
    """

    symbols: tuple
    priors: tuple = None
    model: MeasurementModel = MeasurementModel.Q1

    def __post_init__(self):
        symbols = tuple(complex(c) for c in self.symbols)
        if not symbols:
            raise ValueError("alphabet needs at least one symbol")
        priors = self.priors
        if priors is None:
            priors = (1.0 / len(symbols),) * len(symbols)
        priors = tuple(float(p) for p in priors)
        if len(priors) != len(symbols):
            raise ValueError("one prior per symbol required")
        if any(p <= 0 for p in priors) or abs(sum(priors) - 1.0) > 1e-12:
            raise ValueError("priors must be positive and sum to 1")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "model", MeasurementModel(self.model))

    @property
    def size(self):
        return len(self.symbols)

    @property
    def values(self):
        return np.array(self.symbols, dtype=complex)

    @property
    def mean(self):
        """``E{c}`` under the priors."""
        return complex(np.dot(self.priors, self.values))

    @property
    def carrier_gain(self):
        """``C = 1 + E{c}``, shared by both ends."""
        return 1.0 + self.mean


@dataclass
class AlphabetReport:
    violations: list = field(default_factory=list)  # (name, residual)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_alphabet(a):
    """
    Check the constraints that keep the primary measurement unchanged.

    Q1 needs ``E{|1+c|^2} = 1`` and ``E{c} != -1``; Q2 needs
    ``|1 + E{c}|^2 = 1``.

    Returns
    -------
    AlphabetReport
        Falsy with one ``(constraint, residual)`` entry per violation.
    """
    report = AlphabetReport()
    p = np.asarray(a.priors)
    c = a.values
    if a.model is MeasurementModel.Q1:
        power = float(np.dot(p, np.abs(1 + c) ** 2))
        if abs(power - 1.0) > CONSTRAINT_TOL:
            report.violations.append(("E|1+c|^2 = 1", power - 1.0))
        if abs(a.carrier_gain) <= CONSTRAINT_TOL:
            report.violations.append(("E{c} != -1", abs(a.carrier_gain)))
    else:
        power = abs(a.carrier_gain) ** 2
        if abs(power - 1.0) > CONSTRAINT_TOL:
            report.violations.append(("|1+E{c}|^2 = 1", power - 1.0))
    return report


def binary_alphabet(theta0, model=MeasurementModel.Q1):
    """Two symbols ``exp(+-1j theta0)`` with equal priors; C = 1 + cos(theta0)."""
    if not 0 < theta0 < math.pi:
        raise ValueError("theta0 must lie in (0, pi)")
    if abs(1 + math.cos(theta0)) < 1e-12:
        raise ValueError("theta0 = pi gives C = 0; the receiver cannot decode")
    return SuperpositionAlphabet((np.exp(1j * theta0), np.exp(-1j * theta0)),
                                 model=model)


def unit_gain_alphabet(m, spread=None, model=MeasurementModel.Q1):
    """
    `m` symbols with ``|1 + c_i| = 1``: ``1 + c_i = exp(1j beta_i)`` for
    ``beta_i`` evenly spaced on [spread, -spread].

    Every slot then carries exactly the power of the bare learning vector.
    `spread` defaults to pi/3 for two symbols, which is
    ``binary_alphabet(2 pi / 3)``, and to pi/2 otherwise.
    """
    if m < 2:
        raise ValueError("need at least two symbols")
    if spread is None:
        spread = math.pi / 3 if m == 2 else math.pi / 2
    if not 0 < spread < math.pi:
        raise ValueError("spread must lie in (0, pi)")
    beta = np.linspace(spread, -spread, m)
    a = SuperpositionAlphabet(tuple(np.exp(1j * beta) - 1), model=model)
    if abs(a.carrier_gain) < 1e-9:
        raise ValueError("spread gives C = 0; the receiver cannot decode")
    return a


@dataclass
class SuperposedFrame:
    r1: np.ndarray
    c_sequence: np.ndarray  # symbol indices, one per slot
    transmit_vectors: np.ndarray  # shape (N, len(r1))

    def __len__(self):
        return len(self.c_sequence)


def superimpose(r1, symbol_indices, a, n_slots=None):
    """
    Build the transmit block ``(1 + c_idx[t]) * r1``.

    Parameters
    ----------
    r1 : array_like
        Learning vector.
    symbol_indices : sequence of int
    a : SuperpositionAlphabet
    n_slots : int, optional
        Required frame length; checked when given.
    """
    r1 = np.asarray(r1, dtype=complex)
    idx = np.asarray(symbol_indices, dtype=int)
    if n_slots is not None and idx.size != n_slots:
        raise ValueError(f"frame needs {n_slots} symbols, got {idx.size}")
    if idx.size and (idx.min() < 0 or idx.max() >= a.size):
        raise IndexError("symbol index outside the alphabet")
    gains = 1 + a.values[idx]
    return SuperposedFrame(r1, idx, gains[:, None] * r1[None, :])


def receiver_average(y2):
    """Mean of the received vectors over the frame."""
    y2 = np.asarray(y2)
    if y2.size == 0:
        raise ValueError("nothing to average")
    return y2.mean(axis=0)


def _distances(y2, ybar, a):
    """Distances to each hypothesis, shape (..., M)."""
    C = a.carrier_gain
    if abs(C) == 0:
        raise DecodeError("alphabet has C = 0")
    if not np.any(ybar):
        raise DecodeError("zero frame average; no reference direction")
    delta = y2 - ybar / C
    hyp = (a.values / C)[:, None] * ybar[None, :]
    return np.linalg.norm(delta[..., None, :] - hyp, axis=-1)


def decode_symbol(y2_t, ybar, a):
    """
    Minimum-distance decision for one slot.

    ``dy = y2_t - ybar / C`` is compared with the hypotheses
    ``(c_i / C) ybar``; ties go to the lowest index.
    """
    d = _distances(np.asarray(y2_t), np.asarray(ybar), a)
    return int(np.argmin(d))


def decode_frame(y2, a):
    """Decode every slot of a received frame (shape (N, N_rx))."""
    y2 = np.asarray(y2)
    return np.argmin(_distances(y2, receiver_average(y2), a), axis=-1)


def delta_y1_db(H12, T, r1, frame, noise_variance, model, rng=None):
    """
    Change of the primary measurement caused by the superimposed data.

    The plain block ``T r1`` and the superposed block go through the same
    channel and the same noise realisation; the result is
    ``10 log10(Q(y1) / Q(y1_plain))``.
    """
    model = MeasurementModel(model)
    rng = rng if rng is not None else np.random.default_rng(0)
    H12 = np.atleast_2d(np.asarray(H12))
    A = H12 @ np.asarray(T)
    n = len(frame)
    plain = np.broadcast_to(A @ np.asarray(r1), (n, A.shape[0]))
    sup = frame.transmit_vectors @ A.T
    noise = complex_noise(rng, plain.shape, noise_variance)
    return float(10 * np.log10(measure(sup + noise, model)
                               / measure(plain + noise, model)))
