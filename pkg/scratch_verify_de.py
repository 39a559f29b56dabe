"""Development verification sweeps: flatness, MET families, a_v6 optima."""
import time

import numpy as np

from scldpc import CoupledEnsemble, Protograph
from scldpc.de import required_channel_for_speed, threshold_flatness, threshold_search

slopes = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]

t0 = time.time()
fams = {
    "kudekar irregular a6=0.2": CoupledEnsemble.from_var_profile({3: 0.8, 6: 0.2}, 0.8, 3, 100),
    "kudekar regular (4,20)": CoupledEnsemble.regular(4, 20, 3, 100),
    "proto (2 1 1 1 1)^3 mu=2": CoupledEnsemble.protograph_chain(
        [Protograph(np.array([[2, 1, 1, 1, 1]]))] * 3, 100),
    "proto (1 2 1 2 1)/(3 2 3 2 3) mu=1": CoupledEnsemble.protograph_chain(
        [Protograph(np.array([[1, 2, 1, 2, 1]])),
         Protograph(np.array([[3, 2, 3, 2, 3]]))], 100),
}
for name, ens in fams.items():
    r = threshold_flatness(ens, slopes, 1e-4)
    ths = " ".join(f"{a}:{e:.5f}" for a, e in r.thresholds.items())
    print(f"[{time.time()-t0:7.1f}s] {name}: spread={r.spread:.5f}  {ths}", flush=True)

unc = CoupledEnsemble.regular(3, 6, 1, 1)
r = threshold_flatness(unc, slopes, 1e-4)
ths = " ".join(f"{a}:{e:.5f}" for a, e in r.thresholds.items())
print(f"[{time.time()-t0:7.1f}s] uncoupled (3,6): spread={r.spread:.5f}  {ths}", flush=True)

# a_v6 sweep at rate 0.8: required eps for I_req=1, and threshold
print("\n-- a_v6 sweep, degree {3,6}, rate 0.8, w=3 L=100 --", flush=True)
for a6 in np.round(np.arange(0.0, 1.01, 0.1), 2):
    prof = {3: 1.0 - a6, 6: a6} if 0 < a6 < 1 else ({6: 1.0} if a6 == 1 else {3: 1.0})
    ens = CoupledEnsemble.from_var_profile(prof, 0.8, 3, 100)
    eps1 = required_channel_for_speed(ens, 1, 1e-3)
    th = threshold_search(ens, 0.0, 1e-3).threshold_epsilon
    print(f"[{time.time()-t0:7.1f}s] a6={a6:.1f} chk={ens.check_node_poly} eps(I_req=1)={eps1:.4f} thr={th:.4f}", flush=True)

print("\n-- a_v4 sweep, degree {3,4}, rate 0.8, w=3 L=100 --", flush=True)
for a4 in np.round(np.arange(0.0, 1.01, 0.1), 2):
    prof = {3: 1.0 - a4, 4: a4} if 0 < a4 < 1 else ({4: 1.0} if a4 == 1 else {3: 1.0})
    ens = CoupledEnsemble.from_var_profile(prof, 0.8, 3, 100)
    eps1 = required_channel_for_speed(ens, 1, 1e-3)
    print(f"[{time.time()-t0:7.1f}s] a4={a4:.1f} eps(I_req=1)={eps1:.4f}", flush=True)

print("\n-- I_req=3 spot checks degree-6 --", flush=True)
for a6 in [0.0, 0.1, 0.2, 0.3, 0.5]:
    prof = {3: 1.0 - a6, 6: a6} if a6 > 0 else {3: 1.0}
    ens = CoupledEnsemble.from_var_profile(prof, 0.8, 3, 100)
    eps3 = required_channel_for_speed(ens, 3, 1e-3)
    print(f"[{time.time()-t0:7.1f}s] a6={a6:.1f} eps(I_req=3)={eps3:.4f}", flush=True)
