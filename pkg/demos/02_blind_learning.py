"""
Learning a null space from scalar feedback only.

The learner never sees H. Each feedback cycle it transmits one probe and
reads back the interference energy the primary receiver measured.
"""

import numpy as np

from bnst.feedback import FeedbackOracle
from bnst.learning import EigenbasisEstimate, SweepParams, bnsl_sweep
from bnst.channel import ChannelProcess
from bnst.matcore import null_space
from bnst.tracking import normalized_interference_db, precoder_from

ch = ChannelProcess(rows=1, cols=3, doppler_hz=0.0, seed=4)  # static
H = ch.sample(0.0)

oracle = FeedbackOracle(ch)
W = EigenbasisEstimate.identity(3)
for sweep in range(1, 4):
    W = bnsl_sweep(oracle, W, SweepParams(eta=0.05))
    T = precoder_from(W, n_r=1)
    print(f"sweep {sweep}: {oracle.query_count:4d} feedback cycles, "
          f"interference {normalized_interference_db(H, T):7.2f} dB")

# compare with the null space computed from the channel itself
N = null_space(H)
overlap = np.linalg.svd(N.conj().T @ T, compute_uv=False)
print("cosines of principal angles to the true null space:", np.round(overlap, 6))
