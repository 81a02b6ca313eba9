"""
Blind null-space learning and tracking for an underlay MIMO secondary
transmitter, with data superimposed on the learning signal.

Modules
-------
matcore
    Plane rotations, spectral norm, Jacobi eigensolver, null spaces.
channel
    Clarke fading processes and null-space drift.
feedback
    Scalar energy feedback from the primary receiver.
learning
    Blind sweeps driven only by that feedback.
tracking
    Triggered re-adaptation and interference metrics.
superpose
    Superimposed data alphabets, modulation and decoding.
entypes
    Enumerative coding of balanced frames.
harness
    Monte-Carlo experiments and CSV output.
"""

from .channel import ChannelProcess, ClarkeConfig, coherence_time, dmi
from .entypes import TypeClassCodec
from .feedback import FeedbackOracle, MeasurementModel
from .learning import EigenbasisEstimate, SweepParams, bnsl_sweep
from .matcore import hermitian_eig_oracle, null_space, rotation_matrix
from .superpose import SuperpositionAlphabet, binary_alphabet, decode_frame
from .tracking import TrackerConfig, metric_px, track

__version__ = "0.1.0"

__all__ = [
    "ChannelProcess",
    "ClarkeConfig",
    "coherence_time",
    "dmi",
    "TypeClassCodec",
    "FeedbackOracle",
    "MeasurementModel",
    "EigenbasisEstimate",
    "SweepParams",
    "bnsl_sweep",
    "hermitian_eig_oracle",
    "null_space",
    "rotation_matrix",
    "SuperpositionAlphabet",
    "binary_alphabet",
    "decode_frame",
    "TrackerConfig",
    "metric_px",
    "track",
]
