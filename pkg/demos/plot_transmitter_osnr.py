"""
Transmit OSNR of a comb-fed transmitter
=======================================

A single laser feeding one modulator reaches about 36 dB OSNR at the
transmitter output. A four-line multi-wavelength source (MWS) shares one comb
amplifier, so each line gets a quarter of the amplifier output and the booster
sees less power. This script sweeps per-line power and OCNR and finds where
the MWS falls 3 dB behind the single-wavelength reference.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mwsplan.txchain import (LightSourceSpec, Scheme, TxArchitecture, min_ocnr_for_penalty,
                             min_p_line_for_penalty, sweep_osnr_tx, sws_reference_osnr, tx_stages)

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

ref = sws_reference_osnr()
print(f"SWS reference OSNR_TX: {ref:.2f} dB")

# %%
# Where the power goes. The booster input sets the OSNR floor of every chain.
for st in tx_stages(LightSourceSpec.mws(45, -10, 4), TxArchitecture(Scheme.JOINT_CA)):
    print(f"{st.name:6s} {st.p_in_dbm:7.2f} -> {st.p_out_dbm:7.2f} dBm   OSNR {st.osnr_db:6.2f} dB")

# %%
# Sweep per-line power (OCNR fixed at 45 dB) and OCNR (power fixed at -10 dBm).
# The lowest powers need more than 40 dB of comb-amplifier gain and log a warning.
fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 7))
for scheme in (Scheme.JOINT_CA, Scheme.PER_LINE_CA):
    arch = TxArchitecture(scheme)
    p, osnr = sweep_osnr_tx(LightSourceSpec.mws(45, -10, 4), arch, "p_line", -30, 10, 0.5)
    top.plot(p, osnr, label=scheme.value)
    o, osnr = sweep_osnr_tx(LightSourceSpec.mws(45, -10, 4), arch, "ocnr", 30, 55, 0.5)
    bottom.plot(o, osnr, label=scheme.value)
for ax, xlabel in ((top, "power per line [dBm]"), (bottom, "OCNR per line [dB]")):
    ax.axhline(ref, color="k", lw=0.8)
    ax.axhline(ref - 3, color="k", ls="--", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("OSNR_TX [dB]")
    ax.legend()
fig.tight_layout()
fig.savefig(out / "transmitter_osnr.png", dpi=120)

# %%
# The 3 dB thresholds for the shared comb amplifier.
joint = TxArchitecture(Scheme.JOINT_CA)
print(f"min power per line (OCNR 45 dB): {min_p_line_for_penalty(joint, 45.0):.2f} dBm")
print(f"min OCNR per line (-10 dBm):     {min_ocnr_for_penalty(joint, -10.0):.2f} dB")
print(f"per-line CA, min power:          {min_p_line_for_penalty(TxArchitecture(Scheme.PER_LINE_CA), 45.0):.2f} dBm")
