"""
Blind null-space learning.

A sweep visits every coordinate plane (l, m) once. In each plane two
one-dimensional searches driven only by scalar feedback pick the phase and
the angle of a plane rotation; the current basis estimate is then rotated.
The column that ends up in position ``l`` is the lowest-interference
direction found in the plane, so after a sweep the low-interference
columns approximate the null space of the interference channel.

Nothing in this module reads the channel; every measurement goes through
``FeedbackOracle.query``.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .matcore import RotationParams, rotation_column, rotation_matrix

__all__ = [
    "SweepParams",
    "EigenbasisEstimate",
    "LineSearchResult",
    "StageResult",
    "ACQUISITION",
    "num_stages",
    "next_element",
    "line_search",
    "learning_stage",
    "bnsl_sweep",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# probes closer than this (relative to the largest probe) count as ties
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class SweepParams:
    """
    Search-space parameters of a sweep.

    Parameters
    ----------
    theta_tilde : float
        Fixed angle used while searching the phase.
    theta_max : float
        The angle search covers [-theta_max, theta_max].
    eta : float
        Relative resolution of both searches (fraction of the half range).
    cycles_per_stage : int, optional
        Cap on feedback cycles per stage, split evenly between the two
        searches. ``None`` lets `eta` alone set the probe count.
    """

    theta_tilde: float = math.pi / 3
    theta_max: float = math.pi / 2
    eta: float = 0.1
    cycles_per_stage: int = None

    def __post_init__(self):
        if not 0 < self.theta_max <= math.pi / 2 + 1e-12:
            raise ValueError("theta_max must lie in (0, pi/2]")
        if not 0 <= self.theta_tilde <= math.pi / 2 + 1e-12:
            raise ValueError("theta_tilde must lie in [0, pi/2]")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if self.cycles_per_stage is not None and self.cycles_per_stage < 4:
            raise ValueError("cycles_per_stage must allow two probes per search")


ACQUISITION = SweepParams(math.pi / 3, math.pi / 2, 0.1)


@dataclass
class EigenbasisEstimate:
    """
    Unitary basis estimate with per-column interference estimates.

    Columns are kept in ascending order of `column_power` by `bnsl_sweep`,
    so the leading columns are the precoder.
    """

    w: np.ndarray
    column_power: np.ndarray = None
    timestamp: float = 0.0

    def __post_init__(self):
        self.w = np.array(self.w, dtype=complex)
        n = self.w.shape[0]
        if self.w.shape != (n, n):
            raise ValueError("basis estimate must be square")
        if self.column_power is None:
            self.column_power = np.full(n, np.nan)
        else:
            self.column_power = np.array(self.column_power, dtype=float)

    @classmethod
    def identity(cls, n, timestamp=0.0):
        return cls(np.eye(n, dtype=complex), None, timestamp)

    @property
    def n(self):
        return self.w.shape[0]

    def copy(self):
        return EigenbasisEstimate(self.w.copy(), self.column_power.copy(),
                                  self.timestamp)

    def sorted(self):
        """Columns reordered by ascending estimated power (NaN last)."""
        order = np.argsort(np.nan_to_num(self.column_power, nan=np.inf),
                           kind="stable")
        return EigenbasisEstimate(self.w[:, order], self.column_power[order],
                                  self.timestamp)

    def unitarity_error(self):
        return float(np.abs(self.w.conj().T @ self.w - np.eye(self.n)).max())


@dataclass
class LineSearchResult:
    angle: float
    value: float
    probes: list = field(default_factory=list)  # (angle, value) in query order

    @property
    def num_queries(self):
        return len(self.probes)


@dataclass
class StageResult:
    estimate: EigenbasisEstimate
    l: int
    m: int
    theta: float
    phi: float
    phi_search: LineSearchResult
    theta_search: LineSearchResult

    @property
    def num_queries(self):
        return self.phi_search.num_queries + self.theta_search.num_queries


def num_stages(n_t):
    return n_t * (n_t - 1) // 2


def next_element(k, n_t):
    """
    Plane visited at stage `k` (zero based) of a sweep.

    Row-cyclic order: (0, 1), (0, 2), ..., (0, n_t-1), (1, 2), ...
    """
    total = num_stages(n_t)
    if not 0 <= k < total:
        raise ValueError(f"stage index {k} outside [0, {total})")
    l = 0
    row = n_t - 1
    while k >= row:
        k -= row
        l += 1
        row -= 1
    return l, l + 1 + k


def _best(probes, centre):
    values = np.array([v for _, v in probes])
    top = values.max() if values.size else 0.0
    slack = TIE_RTOL * max(abs(top), 1e-300)
    lowest = values.min()
    near = [(abs(a - centre), a, v) for a, v in probes if v <= lowest + slack]
    _, a, v = min(near)
    return a, v


def line_search(w, half_range, eta, periodic=False, centre=0.0,
                max_queries=None):
    """
    Minimise a scalar-feedback objective over ``centre +- half_range``.

    A coarse grid with spacing of at most ``4 * eta * half_range``, always
    containing `centre`, brackets the best probe, then golden-section refinement shrinks the bracket to
    ``eta * half_range``. Every call of `w` is one feedback cycle.

    Parameters
    ----------
    w : callable
        Objective, evaluated at one angle per call.
    half_range : float
        Half width of the search interval.
    eta : float
        Relative resolution.
    periodic : bool
        Treat the interval as a circle (its end points coincide), which is
        the case for the phase search and for a full-range angle search.
    centre : float
        Interval midpoint.
    max_queries : int, optional
        Hard cap on objective evaluations.

    Returns
    -------
    LineSearchResult
        Best probe seen; exact ties go to the probe closest to `centre`.
    """
    if half_range <= 0:
        raise ValueError("half_range must be positive")
    lo = centre - half_range
    span = 2 * half_range
    spacing = 4 * eta * half_range
    # an even interval count puts the centre on the grid, so "no change"
    # is always probed
    intervals = 2 * max(1, math.ceil(span / spacing / 2 - 1e-9))
    step = span / intervals
    grid_index = range(intervals) if periodic else range(intervals + 1)
    grid = [lo + i * step for i in grid_index]
    if max_queries is not None:
        budget = max(2, int(max_queries))
        if len(grid) > budget:
            grid = list(np.linspace(lo, lo + span, budget,
                                    endpoint=not periodic))
            step = grid[1] - grid[0]
    else:
        budget = None

    probes = []

    def probe(a):
        v = float(w(a))
        probes.append((a, v))
        return v

    values = [probe(a) for a in grid]
    i = int(np.argmin(values))
    a_best = grid[i]
    # bracket of one grid step on each side of the best coarse probe
    a = a_best - step
    b = a_best + step
    if not periodic:
        a = max(a, lo)
        b = min(b, lo + span)
    tol = eta * half_range
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1 = f2 = None
    while b - a > tol:
        if budget is not None and len(probes) >= budget:
            break
        if f1 is None:
            f1 = probe(_canon(x1, lo, span, periodic))
            continue
        if f2 is None:
            f2 = probe(_canon(x2, lo, span, periodic))
            continue
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = None
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = None
    angle, value = _best(probes, centre)
    return LineSearchResult(angle, value, probes)


def _canon(x, lo, span, periodic):
    if periodic:
        return lo + (x - lo) % span
    return x


def _fit_sinusoid(probes):
    """Least-squares fit of ``mu + a cos(2t) + b sin(2t)``; None if singular."""
    t = np.array([p[0] for p in probes])
    f = np.array([p[1] for p in probes])
    A = np.column_stack([np.ones_like(t), np.cos(2 * t), np.sin(2 * t)])
    if len(np.unique(np.round(t, 12))) < 3:
        return None
    coef, *_ = np.linalg.lstsq(A, f, rcond=None)
    if np.linalg.cond(A) > 1e8:
        return None
    return coef


def learning_stage(oracle, W, l, m, params):
    """
    One blind rotation in the (l, m) plane.

    The probe transmitted for angles (theta, phi) is ``W @ r`` with ``r``
    column `l` of the plane rotation. The phase is searched on
    [-pi, pi] at ``theta = params.theta_tilde``, then the angle on
    [-theta_max, theta_max] at the chosen phase, and finally
    ``W <- W @ R_lm(theta, phi)``.

    Parameters
    ----------
    oracle : FeedbackOracle
    W : EigenbasisEstimate
    l, m : int
        Plane, ``l < m``.
    params : SweepParams

    Returns
    -------
    StageResult
    """
    n = W.n
    RotationParams(l, m).check_dimension(n)
    w = W.w
    cap = None
    if params.cycles_per_stage is not None:
        cap = params.cycles_per_stage // 2

    def w_phi(phi):
        return oracle.query_vector(w @ rotation_column(n, l, m, params.theta_tilde, phi))

    phi_res = line_search(w_phi, math.pi, params.eta, periodic=True,
                          max_queries=cap)
    phi_hat = phi_res.angle

    def w_theta(theta):
        return oracle.query_vector(w @ rotation_column(n, l, m, theta, phi_hat))

    full = params.theta_max >= math.pi / 2 - 1e-12
    theta_res = line_search(w_theta, params.theta_max, params.eta,
                            periodic=full, max_queries=cap)
    theta_hat = theta_res.angle

    R = rotation_matrix(n, RotationParams(l, m, theta_hat, phi_hat))
    power = W.column_power.copy()
    power[l] = theta_res.value
    # column m of the rotated basis is the probe at theta + pi/2
    coef = _fit_sinusoid(theta_res.probes)
    if coef is not None:
        mu, a, b = coef
        t = 2 * (theta_hat + math.pi / 2)
        power[m] = max(mu + a * math.cos(t) + b * math.sin(t), 0.0)
    new = EigenbasisEstimate(w @ R, power, oracle.clock)
    return StageResult(new, l, m, theta_hat, phi_hat, phi_res, theta_res)


def bnsl_sweep(oracle, W_init, params, return_stages=False):
    """
    Run one sweep over all coordinate planes.

    Parameters
    ----------
    oracle : FeedbackOracle
    W_init : EigenbasisEstimate
    params : SweepParams
    return_stages : bool
        Also return the list of `StageResult`.

    Returns
    -------
    EigenbasisEstimate
        Columns sorted by ascending estimated interference power.
    """
    W = W_init.copy()
    stages = []
    for k in range(num_stages(W.n)):
        l, m = next_element(k, W.n)
        res = learning_stage(oracle, W, l, m, params)
        stages.append(res)
        W = res.estimate
    W = W.sorted()
    W.timestamp = oracle.clock
    if return_stages:
        return W, stages
    return W


def with_theta_max(params, theta_max):
    return replace(params, theta_max=theta_max)
