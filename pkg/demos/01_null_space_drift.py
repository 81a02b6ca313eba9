"""
How fast does the null space of a fading channel go stale?

A 3-antenna transmitter nulls a 1-antenna receiver using the null space
measured at time t, then keeps using it while the channel moves on.
"""

import numpy as np

from bnst.channel import ChannelProcess, autocorrelation, coherence_time, dmi

fd = 6.48  # 10 km/h at 700 MHz
ch = ChannelProcess(rows=1, cols=3, doppler_hz=fd, seed=1)

print("Coherence time for 50% correlation")
print(f"  rule of thumb 9/(16 pi Fd): {coherence_time(fd, 50, 'formula') * 1e3:.2f} ms")
print(f"  Bessel root J0 = 0.5:       {coherence_time(fd, 50, 'numeric') * 1e3:.2f} ms")

# The entries are still strongly correlated while the nulling is already
# lost: correlation 0.95 leaves only a few dB of interference reduction.
print("\n lag       |rho|   d_MI (dB)")
for x in (99.9, 99, 95, 90, 50):
    lag = coherence_time(fd, x)
    rho = abs(autocorrelation(ch, lag, num_samples=300))
    print(f"  T[{x / 100:.3f}]  {rho:.3f}   {dmi(ch, lag, num_draws=200):7.2f}")

# A perfect, fresh null space is exact up to rounding
print(f"\nzero lag: {dmi(ch, 0.0, num_draws=20):.1f} dB")
