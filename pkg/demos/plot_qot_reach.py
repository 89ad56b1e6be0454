"""
Which transponder configuration reaches how far
===============================================

Required SNR comes from the FEC threshold of each QAM format plus an
implementation penalty that grows with symbol rate. Achieved SNR drops with
every 80 km span as ASE and nonlinear interference pile up. Comparing the two
gives the reach of each configuration.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mwsplan.qot import config_table, feasible_configs, path_snr
from mwsplan.txchain import sws_reference_osnr

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
osnr = sws_reference_osnr()

for c in config_table():
    print(f"{c.label:14s} {c.net_rate_gbps:6.0f} Gb/s  {c.channel_width_ghz:6.1f} GHz  needs {c.required_snr_db:5.2f} dB")

# %%
# SNR versus number of spans for every configuration, and the longest feasible path.
spans = np.arange(1, 60)
fig, ax = plt.subplots(figsize=(7, 4))
for c in config_table():
    snr = np.array([path_snr([80.0] * n, c, osnr_tx_db=osnr) for n in spans])
    ok = snr >= c.required_snr_db
    reach = spans[ok].max() * 80 if ok.any() else 0
    print(f"{c.label:14s} reach {reach:5d} km")
    ax.plot(spans * 80, snr - c.required_snr_db, label=c.label)
ax.axhline(0, color="k", lw=0.8)
ax.set_xlabel("path length [km]")
ax.set_ylabel("SNR margin [dB]")
ax.legend(ncol=3, fontsize=7)
fig.tight_layout()
fig.savefig(out / "qot_reach.png", dpi=120)

# %%
# Best configuration at a few typical path lengths.
for km in (80, 400, 1100, 2000):
    best = feasible_configs([80.0] * (km // 80), osnr_tx_db=osnr)
    print(km, "km ->", best[0].label if best else "nothing")
