"""
Planning the Germany-like backbone
==================================

One gravity traffic matrix is planned four times: with single-wavelength
sources, with flexible four-line MWS at two transmit penalties, and with
fixed-FSR MWS that must co-propagate. The laser counts show what the comb
saves; the lightpath counts show what the OSNR penalty costs.
"""

# %%
import sys

from mwsplan.netmodel import Scenario, bundled_topology
from mwsplan.rcsa import plan_all, validate_plan, write_plan_csv
from mwsplan.study import cost_breakeven, gravity_demands, laser_count, summarize

topo = bundled_topology("germany")
print(f"{len(topo.nodes)} nodes, {len(topo.links)} links, "
      f"mean shortest path {topo.average_shortest_path_km():.0f} km")

demands = gravity_demands(topo, 70000.0)
print(f"{len(demands)} demands, largest {max(d.gbps for d in demands):.0f} Gb/s")

# %%
results = {}
for sc in (Scenario.sws(), Scenario.flex(1.0), Scenario.flex(3.0), Scenario.fixed(1.0)):
    plan = plan_all(topo, demands, sc)
    validate_plan(plan)
    r = summarize(plan, 70000.0)
    results[sc.label] = r
    print(f"{sc.label:18s} LPs {r.lightpaths:4d}  lasers {r.lasers:4d}  blocks {r.blocks:3d}  "
          f"UP {r.underprovisioning:.2%}  mean SNR {r.mean_snr_db:.2f} dB")

# %%
# An MWS unit is worth buying if it costs less than this many SWS lasers.
print(f"break-even: {cost_breakeven(results['sws'], results['flex_3dB']):.2f}")

# %%
# The first few rows of the fixed-MWS plan file.
plan = plan_all(topo, demands[:3], Scenario.fixed(1.0))
write_plan_csv(plan, sys.stdout, lasers=laser_count(plan))
