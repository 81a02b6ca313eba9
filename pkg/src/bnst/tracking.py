"""
Blind null-space tracking and its interference metrics.

After one acquisition sweep from the identity, the transmitter sends data
through the leading columns of its basis estimate. Whenever the normalised
interference of that precoder rises above a trigger level it runs a
modified sweep that starts from the current estimate and only searches
small rotation angles.

Every feedback cycle becomes one slot of a `TrackingTrace`. Adaptation
slots record the interference actually caused by the probe; transmission
slots record the worst case over all data vectors, i.e. the spectral norm
ratio.
"""

from dataclasses import dataclass, field, replace
import csv
import io
import math

import numpy as np

from .feedback import FeedbackOracle
from .learning import ACQUISITION, EigenbasisEstimate, SweepParams, bnsl_sweep
from .matcore import spectral_norm

__all__ = [
    "TrackerConfig",
    "TrackingTrace",
    "precoder_from",
    "normalized_interference_db",
    "select_theta_max",
    "modified_sweep",
    "track",
    "metric_px",
    "average_interference_db",
    "TRANSMITTING",
    "ADAPTING",
]

TRANSMITTING = "transmitting"
ADAPTING = "adapting"
# floor for log10 of an exactly-zero interference ratio
_DB_FLOOR = 1e-30


@dataclass(frozen=True)
class TrackerConfig:
    """
    Tracking parameters.

    Parameters
    ----------
    p_tr_db : float
        Adaptation trigger: adapt once the normalised interference exceeds
        this level.
    theta_max_small, theta_max_large : float
        Angle search half-ranges for Doppler up to / above
        `doppler_split_hz`.
    doppler_split_hz : float
        Boundary between the two regimes.
    theta_tilde_track : float
        Fixed angle of the phase search during tracking.
    eta_track : float
        Relative search resolution during tracking.
    acquisition : SweepParams
        Parameters of the initial sweep from the identity.
    escalate : bool
        Widen the angle range (small -> large -> pi/2) while a modified
        sweep leaves the interference above the trigger.
    mode : {'bnst', 'bnsl'}
        ``'bnsl'`` (the baseline) replaces modified sweeps by sweeps with
        the full-range `acquisition` parameters.
    bnsl_from_identity : bool
        Start baseline re-acquisitions from the identity instead of the
        current estimate.
    """

    p_tr_db: float = -20.0
    theta_max_small: float = math.pi / 10
    theta_max_large: float = math.pi / 5
    doppler_split_hz: float = 2.0
    theta_tilde_track: float = math.pi / 20
    eta_track: float = 0.1
    acquisition: SweepParams = ACQUISITION
    escalate: bool = True
    mode: str = "bnst"
    bnsl_from_identity: bool = False

    def __post_init__(self):
        if self.p_tr_db >= 0:
            raise ValueError("p_tr_db must be negative")
        if not 0 < self.theta_max_small <= self.theta_max_large <= math.pi / 2 + 1e-12:
            raise ValueError("need 0 < theta_max_small <= theta_max_large <= pi/2")
        if self.mode not in ("bnst", "bnsl"):
            raise ValueError(f"unknown tracking mode {self.mode!r}")

    def track_params(self, theta_max):
        return SweepParams(self.theta_tilde_track, theta_max, self.eta_track)


@dataclass
class TrackingTrace:
    """Per-slot record of a tracking run."""

    t_fb: float
    time_s: list = field(default_factory=list)
    mode: list = field(default_factory=list)
    interference_db: list = field(default_factory=list)
    precoder_id: list = field(default_factory=list)
    queries_cum: list = field(default_factory=list)
    adaptations: int = 0
    sweeps: int = 0

    def __len__(self):
        return len(self.time_s)

    def append(self, t, mode, value_db, precoder_id, queries):
        self.time_s.append(t)
        self.mode.append(mode)
        self.interference_db.append(value_db)
        self.precoder_id.append(precoder_id)
        self.queries_cum.append(queries)

    def truncate(self, n):
        for name in ("time_s", "mode", "interference_db", "precoder_id",
                     "queries_cum"):
            del getattr(self, name)[n:]

    @property
    def values_db(self):
        return np.asarray(self.interference_db, dtype=float)

    def slots(self, mode):
        return self.values_db[np.asarray(self.mode) == mode]

    def to_csv(self, fh=None, header_comment=None):
        """Write ``time_s,mode,interference_db,queries_cum`` rows."""
        own = fh is None
        fh = io.StringIO() if own else fh
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time_s", "mode", "interference_db", "queries_cum"])
        for row in zip(self.time_s, self.mode, self.interference_db,
                       self.queries_cum):
            t, mode, v, q = row
            writer.writerow([f"{t:.6f}", mode, f"{v:.6f}", q])
        if own:
            return fh.getvalue()


def precoder_from(W, n_r):
    """First ``N_t - n_r`` columns of the (ascending) basis estimate."""
    w = W.w if isinstance(W, EigenbasisEstimate) else np.asarray(W)
    n_t = w.shape[1]
    if not 1 <= n_r < n_t:
        raise ValueError(f"need 1 <= n_r < N_t = {n_t}, got n_r = {n_r}")
    return w[:, : n_t - n_r]


def normalized_interference_db(H, T):
    """``10 log10(||H T||^2 / ||H||^2)`` with spectral norms."""
    H = np.atleast_2d(np.asarray(H))
    norm_h = spectral_norm(H)
    if norm_h == 0:
        raise ValueError("normalised interference undefined for a zero channel")
    ratio = spectral_norm(H @ np.asarray(T)) ** 2 / norm_h ** 2
    return float(10 * np.log10(max(ratio, _DB_FLOOR)))


def select_theta_max(cfg, doppler_hz):
    if doppler_hz <= cfg.doppler_split_hz:
        return cfg.theta_max_small
    return cfg.theta_max_large


def modified_sweep(oracle, W, cfg, doppler_hz, theta_max=None):
    """
    Sweep started from `W` with the tracking search space.

    `theta_max` overrides the Doppler-based choice.
    """
    if W.unitarity_error() > 1e-8:
        raise ValueError("basis estimate is not unitary")
    if theta_max is None:
        theta_max = select_theta_max(cfg, doppler_hz)
    return bnsl_sweep(oracle, W, cfg.track_params(theta_max))


def _escalation(cfg, doppler_hz):
    first = select_theta_max(cfg, doppler_hz)
    ladder = [first]
    for step in (cfg.theta_max_large, math.pi / 2):
        if step > ladder[-1]:
            ladder.append(step)
    return ladder


def track(channel, cfg, duration_slots, n_r=None, oracle=None, doppler_hz=None):
    """
    Track the null space of `channel` for `duration_slots` feedback cycles.

    Parameters
    ----------
    channel : ChannelProcess
        Interference channel H12(t).
    cfg : TrackerConfig
    duration_slots : int
        Length of the trace, acquisition included.
    n_r : int, optional
        Primary receive antennas; defaults to ``channel.rows``.
    oracle : FeedbackOracle, optional
        Measurement path; a noiseless oracle on `channel` by default.
    doppler_hz : float, optional
        Doppler known to the tracker; defaults to the channel's.

    Returns
    -------
    TrackingTrace
    """
    if duration_slots < 1:
        raise ValueError("duration_slots must be >= 1")
    n_r = channel.rows if n_r is None else n_r
    doppler_hz = channel.doppler_hz if doppler_hz is None else doppler_hz
    oracle = oracle if oracle is not None else FeedbackOracle(channel)
    trace = TrackingTrace(oracle.t_fb)
    logged = len(oracle.induced_log)
    precoder_id = 0

    def record_sweep():
        nonlocal logged
        new = oracle.induced_log[logged:]
        # one log entry per query, so the running count is recoverable
        first = oracle.query_count - len(new)
        for j, (t, p) in enumerate(new):
            if len(trace) >= duration_slots:
                break
            trace.append(t, ADAPTING, 10 * math.log10(max(p, _DB_FLOOR)),
                         precoder_id, first + j + 1)
        logged = len(oracle.induced_log)
        trace.sweeps += 1

    def current_db(W):
        return normalized_interference_db(channel.sample(oracle.clock),
                                          precoder_from(W, n_r))

    W = bnsl_sweep(oracle, EigenbasisEstimate.identity(channel.cols),
                   cfg.acquisition)
    record_sweep()
    precoder_id += 1
    while len(trace) < duration_slots:
        level = current_db(W)
        if level > cfg.p_tr_db:
            trace.adaptations += 1
            if cfg.mode == "bnsl":
                start = (EigenbasisEstimate.identity(channel.cols)
                         if cfg.bnsl_from_identity else W)
                W = bnsl_sweep(oracle, start, cfg.acquisition)
                record_sweep()
            else:
                for theta_max in _escalation(cfg, doppler_hz):
                    W = modified_sweep(oracle, W, cfg, doppler_hz, theta_max)
                    record_sweep()
                    if (not cfg.escalate or len(trace) >= duration_slots
                            or current_db(W) <= cfg.p_tr_db):
                        break
            precoder_id += 1
            continue
        t = oracle.idle()
        trace.append(t, TRANSMITTING, level, precoder_id, oracle.query_count)
    trace.truncate(duration_slots)
    return trace


def metric_px(trace, x_percent):
    """
    Level (dB) below which `x_percent` of the slots lie.

    Accepts a `TrackingTrace` or an array of per-slot dB values.
    """
    if not 0 < x_percent < 100:
        raise ValueError("x_percent must lie in (0, 100)")
    values = trace.values_db if isinstance(trace, TrackingTrace) else \
        np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("empty trace")
    return float(np.quantile(values, x_percent / 100.0, method="inverted_cdf"))


def average_interference_db(trace):
    """``10 log10`` of the mean linear interference over all slots."""
    values = trace.values_db if isinstance(trace, TrackingTrace) else \
        np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("empty trace")
    with np.errstate(divide="ignore"):
        return float(10 * np.log10(np.mean(10 ** (values / 10))))
