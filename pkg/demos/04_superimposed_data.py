"""
Sending data to the secondary receiver while learning.

Every slot of a feedback cycle carries (1 + c) r1 with c = exp(+-2j pi/3).
|1 + c| = 1, so the primary's energy measurement is exactly what it would
be without data. A balanced frame (eight of each symbol) makes the frame
average an exact reference for the secondary decoder.
"""

import numpy as np

from bnst.entypes import TypeClassCodec
from bnst.feedback import MeasurementModel
from bnst.superpose import (binary_alphabet, decode_frame, delta_y1_db,
                            superimpose)

rng = np.random.default_rng(0)
codec = TypeClassCodec(16, 2)
alphabet = binary_alphabet(2 * np.pi / 3)
print(f"{codec.class_size} balanced frames of 16 slots carry "
      f"{codec.capacity_bits} bits (rate loss {codec.rate_loss_bits:.0f} bits)")

payload = 0b1011001110001
frame_symbols = codec.encode_int(payload)
print("payload", bin(payload), "->", "".join(map(str, frame_symbols)))

cn = lambda *s: (rng.standard_normal(s) + 1j * rng.standard_normal(s)) / np.sqrt(2)
H12, H22 = cn(1, 2), cn(2, 2)
T = np.linalg.qr(cn(2, 2))[0]
r1 = np.array([np.cos(0.4), -np.exp(0.3j) * np.sin(0.4)])
frame = superimpose(r1, frame_symbols, alphabet, n_slots=16)

g = H22 @ T @ r1
for snr_db in (np.inf, 8.0, 4.0):
    sigma2 = 0.0 if np.isinf(snr_db) else np.vdot(g, g).real / (2 * 10 ** (snr_db / 10))
    y2 = frame.transmit_vectors @ (H22 @ T).T + np.sqrt(sigma2) * cn(16, 2)
    decoded = decode_frame(y2, alphabet)
    errors = int(np.sum(decoded != np.asarray(frame_symbols)))
    dy1 = delta_y1_db(H12, T, r1, frame, sigma2, MeasurementModel.Q1, rng=rng)
    print(f"SNR {snr_db:>4} dB: {errors:2d} symbol errors, primary sees {dy1:+.4f} dB")
    if errors == 0:
        assert codec.decode_int(tuple(decoded)) == payload

# one frame is noisy; averaged over many frames the primary sees no change
sigma2 = np.vdot(g, g).real / (2 * 10 ** (4.5 / 10))
frames = [superimpose(r1, codec.encode_int(int(p)), alphabet)
          for p in rng.integers(0, 1 << codec.capacity_bits, 2000)]
avg = np.mean([delta_y1_db(H12, T, r1, f, sigma2, "q1", rng=rng) for f in frames])
print(f"average over {len(frames)} frames at 4.5 dB: {avg:+.4f} dB")
