"""
Monte-Carlo experiments and their CSV outputs.

Four experiments are provided:

``drift``
    Null-space drift d_MI and channel correlation versus lag.
``track``
    One tracking trace.
``compare``
    Interference quantiles of the acquisition-only baseline and of the
    tracker over several Doppler frequencies.
``ber``
    Symbol error rate of superimposed data versus SNR at the secondary
    receiver.

Every random quantity is drawn from a seed stream keyed by the base seed
and the realisation index, and parallel results are merged in index
order, so outputs do not depend on the number of workers.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
import csv
import hashlib
import io
import json
import logging
import math

import numpy as np

from . import entypes
from .channel import ChannelProcess, coherence_time, entry_seed
from .feedback import FeedbackOracle, MeasurementModel
from .learning import SweepParams
from .matcore import null_space, rotation_column, spectral_norm
from .superpose import (binary_alphabet, decode_frame, delta_y1_db,
                        superimpose, unit_gain_alphabet)
from .tracking import (TrackerConfig, average_interference_db, metric_px,
                       track)

__all__ = [
    "ScenarioConfig",
    "run_drift",
    "run_track",
    "run_compare",
    "run_ber",
    "write_csv",
    "csv_text",
    "DRIFT_COLUMNS",
    "COMPARE_COLUMNS",
    "BER_COLUMNS",
    "FRAME_COLUMNS",
]

log = logging.getLogger(__name__)

DRIFT_COLUMNS = ["delta_t", "rho_abs", "dmi_db"]
COMPARE_COLUMNS = ["fd", "algo", "p95", "p90", "p85", "avg",
                   "adaptations", "queries"]
BER_COLUMNS = ["snr_db", "ps", "delta_y1_db", "symbols"]
FRAME_COLUMNS = ["frame", "slot", "tx_index", "rx_index", "snr_db",
                 "payload_hex"]
SNR_DEFINITION = "snr=||H22 T r1||^2/(n_rx*sigma2) per slot"

# stream ids keep the random sources of different roles apart
_H12, _H22, _MISC, _NOISE, _BITS = 1, 2, 3, 4, 5


@dataclass
class ScenarioConfig:
    """
    Parameters shared by all experiments.

    Loaded from JSON (keys are the field names; ``tracker`` is an object
    with `TrackerConfig` field names, angles in radians) and overridden by
    command-line flags.
    """

    nt: int = 2
    nr: int = 1
    fc_hz: float = 700e6
    fd_hz: float = 1.3
    ts_s: float = 66.7e-6
    tfb_s: float = 1e-3
    num_paths: int = 40
    num_channels: int = 20
    num_slots: int = 2000
    noise_variance: float = 0.0
    measurement: str = "q1"
    tracker: dict = field(default_factory=dict)
    theta0: float = 2 * math.pi / 3
    codec_n: int = 16
    codec_m: int = 2
    n_rx: int = None
    frames_per_channel: int = 63
    drift_fractions: list = None
    dopplers_hz: list = field(default_factory=lambda: [1.0, 2.0, 4.0])
    snr_grid_db: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0,
                                                       4.0, 5.0, 6.0, 7.0])
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.nt > self.nr >= 1:
            raise ValueError(f"need nt > nr >= 1, got nt={self.nt}, nr={self.nr}")
        for name in ("ts_s", "tfb_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.fd_hz < 0:
            raise ValueError("fd_hz must be >= 0")
        if self.num_channels < 1 or self.num_slots < 1:
            raise ValueError("num_channels and num_slots must be >= 1")
        if self.codec_n % self.codec_m:
            raise ValueError("codec_m must divide codec_n")
        MeasurementModel(self.measurement)
        slots = math.ceil(round(self.tfb_s / self.ts_s, 9))
        if abs(slots - self.codec_n) > 1:
            raise ValueError(
                f"codec frame of {self.codec_n} slots does not match "
                f"ceil(tfb/ts) = {slots}")
        if slots != self.codec_n:
            log.info("codec frame %d slots vs ceil(tfb/ts) = %d",
                     self.codec_n, slots)
        self.tracker_config()

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def override(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)

    def digest(self):
        """Hash of the configuration, excluding the worker count."""
        data = self.to_dict()
        data.pop("workers")
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def tracker_config(self, **changes):
        data = dict(self.tracker)
        acq = data.pop("acquisition", None)
        if acq is not None:
            data["acquisition"] = SweepParams(**acq)
        data.update(changes)
        return TrackerConfig(**data)

    def alphabet(self):
        model = MeasurementModel(self.measurement)
        if self.codec_m == 2:
            return binary_alphabet(self.theta0, model)
        return unit_gain_alphabet(self.codec_m, model=model)

    @property
    def slots_per_cycle(self):
        return math.ceil(round(self.tfb_s / self.ts_s, 9))

    def channel(self, index=0, stream=_H12, rows=None, doppler_hz=None):
        return ChannelProcess(
            self.nr if rows is None else rows, self.nt,
            self.fd_hz if doppler_hz is None else doppler_hz,
            seed=self.seed, num_paths=self.num_paths, sample_period=self.ts_s,
            stream=(stream << 40) + index)

    def oracle(self, channel, index=0):
        return FeedbackOracle(channel, self.noise_variance, self.tfb_s,
                              self.ts_s, MeasurementModel(self.measurement),
                              seed=entry_seed(self.seed, _NOISE, index))

    def comment(self, extra=""):
        text = f"config_sha256={self.digest()} seed={self.seed}"
        return f"{text} {extra}".strip()


def write_csv(fh, columns, rows, comment=None):
    if comment:
        fh.write(f"# {comment}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def csv_text(columns, rows, comment=None):
    buf = io.StringIO()
    write_csv(buf, columns, rows, comment)
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{float(v):.6g}"
    return str(v)


def _map(fn, jobs, workers):
    """Ordered map, optionally over worker processes."""
    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# --------------------------------------------------------------------------
# drift


def default_drift_fractions():
    return [round(x, 4) for x in np.linspace(0.0, 0.5, 26)]


def _drift_point(job):
    cfg, delta_t = job
    num = 0j
    den = 0.0
    ratios = np.empty(cfg.num_channels)
    for k in range(cfg.num_channels):
        ch = cfg.channel(k)
        H0, H1 = ch.sample_series([0.0, delta_t])
        num += np.sum(H0 * H1.conj())
        den += np.sum(np.abs(H0) ** 2)
        ratios[k] = spectral_norm(H1 @ null_space(H0)) / spectral_norm(H1)
    with np.errstate(divide="ignore"):
        dmi_db = float(10 * np.log10(ratios.mean()))
    return delta_t, abs(num / den), dmi_db


def run_drift(cfg, fractions=None):
    """
    d_MI and |rho| over a lag grid given in fractions of ``1 / fd_hz``.

    Each lag uses `cfg.num_channels` independent realisations (the same
    ones for every lag).

    Returns
    -------
    list of (delta_t, rho_abs, dmi_db)
    """
    if cfg.fd_hz <= 0:
        raise ValueError("drift experiment needs fd_hz > 0")
    fractions = fractions or cfg.drift_fractions or default_drift_fractions()
    jobs = [(cfg, f / cfg.fd_hz) for f in fractions]
    return _map(_drift_point, jobs, cfg.workers)


# --------------------------------------------------------------------------
# tracking


def run_track(cfg, index=0):
    """One tracking run on realisation `index`; returns the trace."""
    ch = cfg.channel(index)
    return track(ch, cfg.tracker_config(), cfg.num_slots, n_r=cfg.nr,
                 oracle=cfg.oracle(ch, index))


def _compare_job(job):
    cfg, fd, algo, index = job
    ch = cfg.channel(index, doppler_hz=fd)
    tr = track(ch, cfg.tracker_config(mode=algo), cfg.num_slots, n_r=cfg.nr,
               oracle=cfg.oracle(ch, index), doppler_hz=fd)
    return tr.values_db, tr.adaptations, tr.queries_cum[-1] if len(tr) else 0


def run_compare(cfg, dopplers=None, algos=("bnsl", "bnst")):
    """
    Pooled interference statistics per Doppler and algorithm.

    Both algorithms see the same channel realisations.

    Returns
    -------
    list of (fd, algo, p95, p90, p85, avg, adaptations, queries)
    """
    dopplers = list(dopplers if dopplers is not None else cfg.dopplers_hz)
    if not dopplers:
        raise ValueError("need at least one Doppler frequency")
    jobs = [(cfg, fd, algo, k) for fd in dopplers for algo in algos
            for k in range(cfg.num_channels)]
    results = _map(_compare_job, jobs, cfg.workers)
    rows = []
    step = cfg.num_channels
    for i in range(0, len(jobs), step):
        _, fd, algo, _ = jobs[i]
        chunk = results[i:i + step]
        values = np.concatenate([r[0] for r in chunk])
        rows.append((fd, algo,
                     metric_px(values, 95), metric_px(values, 90),
                     metric_px(values, 85), average_interference_db(values),
                     sum(r[1] for r in chunk), sum(r[2] for r in chunk)))
    return rows


# --------------------------------------------------------------------------
# BER


def _random_unitary(rng, n):
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _ber_job(job):
    cfg, index, snr_grid, keep_frames = job
    rng = np.random.default_rng(entry_seed(cfg.seed, _MISC, index))
    n_rx = cfg.n_rx or cfg.nt
    H12 = (rng.standard_normal((cfg.nr, cfg.nt))
           + 1j * rng.standard_normal((cfg.nr, cfg.nt))) / math.sqrt(2)
    H22 = (rng.standard_normal((n_rx, cfg.nt))
           + 1j * rng.standard_normal((n_rx, cfg.nt))) / math.sqrt(2)
    T = _random_unitary(rng, cfg.nt)
    l, m = sorted(rng.choice(cfg.nt, 2, replace=False))
    r1 = rotation_column(cfg.nt, l, m, rng.uniform(-math.pi / 2, math.pi / 2),
                         rng.uniform(-math.pi, math.pi))
    alphabet = cfg.alphabet()
    codec = entypes.TypeClassCodec(cfg.codec_n, cfg.codec_m)

    # payloads and noise shapes depend only on (seed, index), never on nt
    bits_rng = np.random.default_rng(entry_seed(cfg.seed, _BITS, index))
    payloads = [int(bits_rng.integers(0, 1 << codec.capacity_bits))
                for _ in range(cfg.frames_per_channel)]
    tx = np.array([codec.encode_int(p) for p in payloads])
    g = H22 @ T @ r1
    gains = 1 + alphabet.values[tx]  # (F, N)
    clean = gains[..., None] * g  # (F, N, n_rx)

    out = []
    frames = []
    for s_i, snr_db in enumerate(snr_grid):
        noise_rng = np.random.default_rng(entry_seed(cfg.seed, _NOISE, index, s_i))
        if math.isinf(snr_db) and snr_db > 0:
            sigma2 = 0.0
        else:
            sigma2 = float(np.vdot(g, g).real) / (n_rx * 10 ** (snr_db / 10))
        unit = (noise_rng.standard_normal(clean.shape)
                + 1j * noise_rng.standard_normal(clean.shape)) / math.sqrt(2)
        y2 = clean + math.sqrt(sigma2) * unit
        rx = np.array([decode_frame(frame, alphabet) for frame in y2])
        errors = int(np.sum(rx != tx))
        dy = 0.0
        for f in range(cfg.frames_per_channel):
            frame = superimpose(r1, tx[f], alphabet)
            dy += delta_y1_db(H12, T, r1, frame, sigma2, alphabet.model,
                              rng=noise_rng)
        out.append((errors, dy))
        if keep_frames:
            for f in range(min(keep_frames, cfg.frames_per_channel)):
                for slot in range(cfg.codec_n):
                    frames.append((f, slot, int(tx[f, slot]), int(rx[f, slot]),
                                   snr_db, f"{payloads[f]:x}"))
    return out, frames


def run_ber(cfg, snr_grid_db=None, frame_log=0):
    """
    Symbol error probability of superimposed data versus SNR.

    For every realisation: Gaussian H12 and H22, a Haar-random unitary T
    and r1 from a random plane rotation. Frames are enumerative codewords
    of random payloads (shared by all SNR points), decoded slot by slot
    against the frame average.

    Returns
    -------
    rows : list of (snr_db, ps, delta_y1_db, symbols)
        ``delta_y1_db`` is the mean over frames of the primary-side
        measurement change.
    frames : list
        Per-slot decode records (`FRAME_COLUMNS`) of the first `frame_log`
        frames of realisation 0.
    """
    grid = list(snr_grid_db if snr_grid_db is not None else cfg.snr_grid_db)
    if not grid:
        raise ValueError("need at least one SNR point")
    jobs = [(cfg, k, grid, frame_log if k == 0 else 0)
            for k in range(cfg.num_channels)]
    results = _map(_ber_job, jobs, cfg.workers)
    symbols = cfg.num_channels * cfg.frames_per_channel * cfg.codec_n
    frames_total = cfg.num_channels * cfg.frames_per_channel
    rows = []
    for s_i, snr_db in enumerate(grid):
        errors = sum(r[0][s_i][0] for r in results)
        dy = sum(r[0][s_i][1] for r in results) / frames_total
        rows.append((snr_db, errors / symbols, dy, symbols))
    return rows, results[0][1] if results else []
