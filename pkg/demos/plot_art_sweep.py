"""
Lightpaths, lasers and underprovisioning versus traffic
=======================================================

Traffic is scaled from 10 Tb/s until the single-wavelength plan starts to drop
demand. Fixed-FSR sources waste spectrum on idle lines and saturate earlier.
The second panel repeats the flexible MWS plan at increasing transmit-OSNR
penalty and counts the extra lightpaths it needs.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from mwsplan.netmodel import Scenario, bundled_topology
from mwsplan.study import penalty_sweep, run_sweep, sweep_to_saturation

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

topo = bundled_topology("germany")
grid = sweep_to_saturation(topo, 10000.0)
scenarios = [Scenario.sws(), Scenario.flex(3.0), Scenario.fixed(1.0)]
rows = run_sweep(topo, scenarios, grid)

# %%
fig, (ax_lp, ax_up) = plt.subplots(1, 2, figsize=(10, 4))
for sc in scenarios:
    mine = [r for r in rows if r.scenario == sc.label]
    art = [r.art_gbps / 1000 for r in mine]
    ax_lp.plot(art, [r.lightpaths for r in mine], marker="o", label=f"{sc.label} LPs")
    ax_lp.plot(art, [r.lasers for r in mine], ls="--", label=f"{sc.label} lasers")
    ax_up.plot(art, [100 * r.underprovisioning for r in mine], marker="o", label=sc.label)
ax_lp.set_xlabel("ART [Tb/s]")
ax_up.set_xlabel("ART [Tb/s]")
ax_up.set_ylabel("UP [%]")
ax_lp.legend(fontsize=7)
ax_up.legend(fontsize=7)
fig.tight_layout()
fig.savefig(out / "art_sweep.png", dpi=120)

# %%
mid = grid[len(grid) // 2]
for p in penalty_sweep(topo, mid):
    print(f"penalty {p.penalty_db:.1f} dB: +{p.extra_lightpaths_pct:4.1f}% LPs, "
          f"SNR {p.snr_diff_db:.2f} dB below SWS")
