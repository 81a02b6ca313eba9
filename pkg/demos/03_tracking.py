"""
Tracking a slowly moving null space.

A 2-antenna transmitter nulls a 1-antenna receiver whose channel has a
1.3 Hz Doppler. It re-adapts only when the interference rises above
-20 dB, and then searches only small rotations around its current estimate.
"""

import numpy as np

from bnst.channel import ChannelProcess
from bnst.tracking import (ADAPTING, TrackerConfig, average_interference_db,
                           metric_px, track)

ch = ChannelProcess(rows=1, cols=2, doppler_hz=1.3, seed=2)

for mode in ("bnsl", "bnst"):
    trace = track(ch, TrackerConfig(mode=mode), duration_slots=5000)
    busy = np.mean(np.asarray(trace.mode) == ADAPTING)
    print(f"{mode}: {trace.adaptations:3d} adaptations, {busy:5.1%} of slots probing, "
          f"P95 {metric_px(trace, 95):6.1f} dB, P90 {metric_px(trace, 90):6.1f} dB, "
          f"average {average_interference_db(trace):6.1f} dB")

# the first few hundred milliseconds of the tracking trace
trace = track(ch, TrackerConfig(), duration_slots=400)
print()
print(trace.to_csv().splitlines()[0])
for line in trace.to_csv().splitlines()[1::25]:
    print(line)
