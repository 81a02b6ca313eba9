"""
Time-varying flat MIMO channels.

Each entry of the channel matrix is an independent Clarke (isotropic
scattering) Rayleigh process realised as a sum of sinusoids::

    h(t) = P**-0.5 * sum_p exp(1j * (2*pi*F_d*cos(alpha_p)*t + psi_p))

with arrival angles ``alpha_p`` and phases ``psi_p`` drawn once per entry.
A process is a deterministic function of (seed, t), so any instant can be
sampled in any order.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize, special

from .matcore import null_space, spectral_norm

__all__ = [
    "ClarkeConfig",
    "ClarkeFading",
    "ChannelProcess",
    "sample_siso",
    "sample_matrix",
    "autocorrelation",
    "theoretical_autocorrelation",
    "coherence_time",
    "dmi",
    "entry_seed",
]

DEFAULT_PATHS = 40


def entry_seed(base_seed, *key):
    """Seed sequence for one entry / stream, mixed from the base seed."""
    return np.random.SeedSequence(int(base_seed) & (2**64 - 1),
                                  spawn_key=tuple(int(k) for k in key))


@dataclass(frozen=True)
class ClarkeConfig:
    doppler_hz: float
    num_paths: int = DEFAULT_PATHS
    seed: int = 0

    def __post_init__(self):
        if self.doppler_hz < 0:
            raise ValueError("doppler_hz must be >= 0")
        if self.num_paths < 1:
            raise ValueError("num_paths must be >= 1")


class ClarkeFading:
    """
    One SISO sum-of-sinusoids fading process.

    Parameters
    ----------
    doppler_hz : float
        Maximum Doppler frequency.
    num_paths : int
        Number of sinusoids.
    seed : int or np.random.SeedSequence
        Source of the path angles and phases.
    """

    def __init__(self, doppler_hz, num_paths=DEFAULT_PATHS, seed=0):
        rng = np.random.default_rng(seed)
        self.doppler_hz = float(doppler_hz)
        self.num_paths = int(num_paths)
        alpha = rng.uniform(0.0, 2 * np.pi, self.num_paths)
        self.psi = rng.uniform(0.0, 2 * np.pi, self.num_paths)
        self.omega = 2 * np.pi * self.doppler_hz * np.cos(alpha)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        phase = np.multiply.outer(t, self.omega) + self.psi
        return np.exp(1j * phase).sum(axis=-1) / math.sqrt(self.num_paths)


def sample_siso(cfg, t):
    """Sample the Clarke process described by `cfg` at time(s) `t`."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    return ClarkeFading(cfg.doppler_hz, cfg.num_paths, cfg.seed)(t)


@dataclass
class ChannelProcess:
    """
    An N_r x N_t matrix of independent Clarke processes.

    Parameters
    ----------
    rows, cols : int
        Receive and transmit antenna counts.
    doppler_hz : float
        Maximum Doppler frequency shared by all entries.
    seed : int
        Base seed; entry (i, j) draws from ``entry_seed(seed, stream, i, j)``.
    num_paths : int
        Sinusoids per entry.
    sample_period : float
        Symbol duration T_s, kept for bookkeeping.
    stream : int
        Distinguishes several processes built from one base seed
        (e.g. the primary and secondary links).
    """

    rows: int
    cols: int
    doppler_hz: float
    seed: int = 0
    num_paths: int = DEFAULT_PATHS
    sample_period: float = 66.7e-6
    stream: int = 0
    _omega: np.ndarray = field(init=False, repr=False)
    _psi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("channel dimensions must be positive")
        ClarkeConfig(self.doppler_hz, self.num_paths, 0)  # validation
        omega = np.empty((self.rows, self.cols, self.num_paths))
        psi = np.empty_like(omega)
        for i in range(self.rows):
            for j in range(self.cols):
                f = ClarkeFading(self.doppler_hz, self.num_paths,
                                 entry_seed(self.seed, self.stream, i, j))
                omega[i, j] = f.omega
                psi[i, j] = f.psi
        self._omega = omega
        self._psi = psi

    @property
    def shape(self):
        return (self.rows, self.cols)

    def entry_config(self, i, j):
        """Return the (i, j) entry as a standalone SISO process."""
        f = ClarkeFading.__new__(ClarkeFading)
        f.doppler_hz = self.doppler_hz
        f.num_paths = self.num_paths
        f.omega = self._omega[i, j]
        f.psi = self._psi[i, j]
        return f

    def sample(self, t):
        """Channel matrix at time `t` (seconds)."""
        if t < 0:
            raise ValueError("t must be >= 0")
        phase = self._omega * float(t) + self._psi
        return np.exp(1j * phase).sum(axis=-1) / math.sqrt(self.num_paths)

    def sample_series(self, times):
        """Stack of channel matrices, shape (len(times), rows, cols)."""
        times = np.asarray(times, dtype=float)
        if np.any(times < 0):
            raise ValueError("t must be >= 0")
        phase = times[:, None, None, None] * self._omega + self._psi
        return np.exp(1j * phase).sum(axis=-1) / math.sqrt(self.num_paths)


def sample_matrix(ch, t):
    return ch.sample(t)


def theoretical_autocorrelation(doppler_hz, delta_t):
    """Clarke autocorrelation J0(2 pi F_d dt)."""
    return special.j0(2 * np.pi * doppler_hz * np.asarray(delta_t, float))


def autocorrelation(source, delta_t, num_samples=200, rng=None):
    """
    Estimate the normalised autocorrelation ``E{h(t) h(t+dt)*} / E{|h|^2}``.

    Parameters
    ----------
    source : ClarkeConfig or ChannelProcess
        With a config, `num_samples` independent realisations are spawned
        from its seed (ensemble average). With a channel process, every
        entry is used at `num_samples` anchor times (time and entry
        average).
    delta_t : float
        Lag in seconds.
    num_samples : int
        Number of realisations or anchor times.
    rng : np.random.Generator, optional
        Source of anchor times; defaults to one seeded from the source.

    Returns
    -------
    complex
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if isinstance(source, ClarkeConfig):
        seed = source.seed
        rng = rng if rng is not None else np.random.default_rng(
            entry_seed(seed, 0xAC))
        span = 10.0 / source.doppler_hz if source.doppler_hz > 0 else 1.0
        num = 0j
        den = 0.0
        for k in range(num_samples):
            f = ClarkeFading(source.doppler_hz, source.num_paths,
                             entry_seed(seed, 0xAC, k))
            t0 = rng.uniform(0.0, span)
            h0 = f(t0)
            h1 = f(t0 + delta_t)
            num += h0 * np.conj(h1)
            den += abs(h0) ** 2
        return complex(num / den)
    ch = source
    rng = rng if rng is not None else np.random.default_rng(
        entry_seed(ch.seed, ch.stream, 0xAC))
    span = 10.0 / ch.doppler_hz if ch.doppler_hz > 0 else 1.0
    t0 = rng.uniform(0.0, span, num_samples)
    H0 = ch.sample_series(t0)
    H1 = ch.sample_series(t0 + delta_t)
    return complex(np.sum(H0 * H1.conj()) / np.sum(np.abs(H0) ** 2))


def coherence_time(doppler_hz, x_percent=50.0, method="numeric"):
    """
    Lag at which the Clarke autocorrelation falls to ``x_percent / 100``.

    Parameters
    ----------
    doppler_hz : float
        Maximum Doppler frequency, > 0.
    x_percent : float
        Correlation level in percent, 0 < x < 100.
    method : {'numeric', 'formula'}
        ``'numeric'`` solves ``J0(2 pi F_d dt) = x/100`` for the smallest
        positive root. ``'formula'`` is the textbook rule of thumb
        ``9 / (16 pi F_d)`` and only exists for x = 50.

    Returns
    -------
    float
        Lag in seconds.
    """
    if doppler_hz <= 0:
        raise ValueError("doppler_hz must be > 0")
    if not 0 < x_percent < 100:
        raise ValueError("x_percent must lie in (0, 100)")
    if method == "formula":
        if x_percent != 50:
            raise ValueError("the closed-form rule is only defined for x = 50")
        return 9.0 / (16.0 * np.pi * doppler_hz)
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")
    target = x_percent / 100.0
    # J0 decreases monotonically from 1 to 0 up to its first zero
    first_zero = special.jn_zeros(0, 1)[0]
    root = optimize.brentq(lambda z: special.j0(z) - target,
                           0.0, first_zero, xtol=1e-14, rtol=1e-12)
    return root / (2 * np.pi * doppler_hz)


def dmi(ch, delta_t, num_draws=200, t0=0.0, tol=1e-6):
    """
    Null-space drift metric in dB.

    The average, over independent realisations, of
    ``||H(t+dt) N(H(t))|| / ||H(t+dt)||`` (spectral norms), converted
    with ``10 log10`` after averaging.

    Parameters
    ----------
    ch : ChannelProcess
        Template process; realisation k reuses its dimensions, Doppler and
        path count with seed stream ``(ch.seed, ch.stream, k)``.
    delta_t : float
        Lag in seconds.
    num_draws : int
        Number of realisations.
    t0 : float
        Anchor time.
    tol : float
        Null-space threshold passed to `null_space`.

    Returns
    -------
    float
    """
    if ch.cols <= ch.rows:
        raise ValueError("dmi needs more transmit than receive antennas")
    if num_draws < 1:
        raise ValueError("num_draws must be >= 1")
    ratios = np.empty(num_draws)
    for k in range(num_draws):
        draw = ChannelProcess(ch.rows, ch.cols, ch.doppler_hz,
                              seed=ch.seed, num_paths=ch.num_paths,
                              sample_period=ch.sample_period,
                              stream=(ch.stream << 32) + k + 1)
        H0, H1 = draw.sample_series([t0, t0 + delta_t])
        N = null_space(H0, tol)
        ratios[k] = spectral_norm(H1 @ N) / spectral_norm(H1)
    with np.errstate(divide="ignore"):
        return float(10 * np.log10(ratios.mean()))
