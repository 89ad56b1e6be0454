"""Transmit OSNR of single- and multi-wavelength transmitters.

Three transmitter chains are modelled:

* ``SWS_DIRECT``: laser, modulator, mux, booster amplifier (BA).
* ``JOINT_CA``: comb, one comb amplifier (CA) for all lines, demux, modulators,
  mux, BA. The CA output cap is shared by all lines.
* ``PER_LINE_CA``: as ``JOINT_CA`` but each line has its own CA, so the cap
  applies per line.

Every amplifier adds ASE referred to its per-carrier input power, and the
per-carrier OSNR is the inverse-linear sum of the source OCNR and each
amplifier contribution.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants
from scipy.optimize import brentq

from mwsplan.netmodel import db_to_lin, lin_to_db

logger = logging.getLogger(__name__)

REF_FREQUENCY_HZ = 193.414e12
REF_BANDWIDTH_HZ = 12.5e9
# h*nu*B_ref in dBm, about -57.95 dBm
ASE_FLOOR_DBM = lin_to_db(constants.h * REF_FREQUENCY_HZ * REF_BANDWIDTH_HZ * 1e3)
MAX_REALISTIC_GAIN_DB = 40.0


class SourceKind(str, enum.Enum):
    SWS = "SWS"
    MWS = "MWS"


class Scheme(str, enum.Enum):
    SWS_DIRECT = "sws"
    JOINT_CA = "joint"
    PER_LINE_CA = "perline"


@dataclass(frozen=True)
class LightSourceSpec:
    """Optical carrier source: a single laser or an N-line multi-wavelength source."""

    kind: SourceKind
    ocnr_db: float
    p_line_dbm: float
    n_lines: int = 1
    fsr_ghz: float | None = None  # None means flexible spacing

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        if self.n_lines < 1:
            raise ValueError("a source needs at least one line")
        if self.kind is SourceKind.SWS and self.n_lines != 1:
            raise ValueError("a single-wavelength source has exactly one line")
        if not math.isfinite(self.ocnr_db):
            raise ValueError("OCNR must be finite")

    @classmethod
    def sws(cls, ocnr_db: float = 55.0, p_line_dbm: float = 16.0) -> "LightSourceSpec":
        return cls(SourceKind.SWS, ocnr_db, p_line_dbm)

    @classmethod
    def mws(cls, ocnr_db: float = 45.0, p_line_dbm: float = -10.0, n_lines: int = 4,
            fsr_ghz: float | None = None) -> "LightSourceSpec":
        return cls(SourceKind.MWS, ocnr_db, p_line_dbm, n_lines, fsr_ghz)


@dataclass(frozen=True)
class TxArchitecture:
    """Amplifier and loss budget of a transmitter chain (all values in dB / dBm)."""

    scheme: Scheme = Scheme.SWS_DIRECT
    ca_cap_dbm: float = 26.0
    nf_db: float = 5.0
    demux_loss_db: float = 5.0
    mux_loss_db: float = 5.0
    modulation_loss_db: float = 5.0
    insertion_loss_db: float = 23.0
    launch_dbm: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        for name in ("demux_loss_db", "mux_loss_db", "modulation_loss_db", "insertion_loss_db"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Stage:
    """One element of the chain; ``osnr_db`` is ``inf`` for noiseless elements."""

    name: str
    p_in_dbm: float
    p_out_dbm: float
    osnr_db: float = math.inf

    @property
    def gain_db(self) -> float:
        return self.p_out_dbm - self.p_in_dbm


def amp_osnr(p_in_dbm, nf_db):
    """OSNR (0.1 nm) added by an amplifier with the given per-carrier input power."""
    return p_in_dbm - nf_db - ASE_FLOOR_DBM


def cascade_osnr(ocnr_db: float, stage_osnrs_db) -> float:
    """Combine the source OCNR with the stage OSNRs by inverse-linear addition."""
    inv = 1.0 / db_to_lin(ocnr_db) if math.isfinite(ocnr_db) else 0.0
    for osnr in stage_osnrs_db:
        if math.isfinite(osnr):
            inv += 1.0 / db_to_lin(osnr)
    if inv == 0.0:
        return math.inf
    return -lin_to_db(inv)


def _amplifier(name, p_in, p_out, nf):
    stage = Stage(name, p_in, p_out, amp_osnr(p_in, nf))
    if stage.gain_db > MAX_REALISTIC_GAIN_DB:
        logger.warning("unrealistic gain: %s needs %.1f dB (> %.0f dB)", name, stage.gain_db,
                       MAX_REALISTIC_GAIN_DB)
    return stage


def _loss(name, p_in, loss):
    return Stage(name, p_in, p_in - loss)


def tx_stages(source: LightSourceSpec, arch: TxArchitecture) -> list[Stage]:
    """Per-carrier power budget through the transmitter, element by element."""
    p = source.p_line_dbm
    stages: list[Stage] = []
    if arch.scheme is not Scheme.SWS_DIRECT:
        if arch.scheme is Scheme.JOINT_CA:
            target = arch.ca_cap_dbm - lin_to_db(source.n_lines)
        else:
            target = arch.ca_cap_dbm
        # no amplification needed when the source already reaches the cap
        if p < target:
            stages.append(_amplifier("CA", p, target, arch.nf_db))
            p = target
        stages.append(_loss("DEMUX", p, arch.demux_loss_db))
        p = stages[-1].p_out_dbm
    stages.append(_loss("MOD", p, arch.modulation_loss_db))
    stages.append(_loss("TX", stages[-1].p_out_dbm, arch.insertion_loss_db))
    stages.append(_loss("MUX", stages[-1].p_out_dbm, arch.mux_loss_db))
    p = stages[-1].p_out_dbm
    stages.append(_amplifier("BA", p, arch.launch_dbm, arch.nf_db))
    return stages


def osnr_tx(source: LightSourceSpec, arch: TxArchitecture) -> float:
    """Per-carrier transmit OSNR in dB (0.1 nm reference bandwidth)."""
    return cascade_osnr(source.ocnr_db, (s.osnr_db for s in tx_stages(source, arch)))


def sws_reference_osnr(arch: TxArchitecture | None = None, ocnr_db: float = 55.0,
                       p_line_dbm: float = 16.0) -> float:
    """OSNR_TX of the reference single-laser transmitter (about 35.9 dB by default)."""
    arch = replace(arch or TxArchitecture(), scheme=Scheme.SWS_DIRECT)
    return osnr_tx(LightSourceSpec.sws(ocnr_db, p_line_dbm), arch)


def sweep_osnr_tx(source: LightSourceSpec, arch: TxArchitecture, axis: str, start: float,
                  stop: float, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate OSNR_TX over a grid of per-line powers or OCNRs.

    Parameters
    ----------
    source, arch
        Template source and architecture; only ``axis`` is varied.
    axis : {"p_line", "ocnr"}
        Source parameter to sweep.
    start, stop, step
        Inclusive grid bounds in dBm or dB.

    Returns
    -------
    values, osnr : numpy.ndarray
        Swept axis values and the matching OSNR_TX in dB.
    """
    field_name = {"p_line": "p_line_dbm", "ocnr": "ocnr_db"}.get(axis)
    if field_name is None:
        raise ValueError(f"sweep axis must be 'p_line' or 'ocnr', got {axis!r}")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ValueError("sweep range must be finite")
    if not step > 0:
        raise ValueError("sweep step must be positive")
    if stop < start:
        raise ValueError(f"empty sweep range [{start}, {stop}]")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = start + step * np.arange(n)
    osnr = np.array([osnr_tx(replace(source, **{field_name: float(v)}), arch) for v in values])
    return values, osnr


def write_sweep_csv(values, osnr, scheme, fh) -> None:
    fh.write("axis_value,osnr_tx_db,scheme\n")
    label = Scheme(scheme).value
    for v, o in zip(values, osnr):
        fh.write(f"{v:.6g},{o:.6f},{label}\n")


def min_p_line_for_penalty(arch: TxArchitecture, ocnr_db: float, max_penalty_db: float = 3.0,
                           n_lines: int = 4, reference_db: float | None = None,
                           bracket=(-60.0, 30.0)) -> float:
    """Lowest per-line power keeping the MWS within ``max_penalty_db`` of the SWS reference."""
    ref = sws_reference_osnr(arch) if reference_db is None else reference_db

    def excess(p):
        return ref - osnr_tx(LightSourceSpec.mws(ocnr_db, p, n_lines), arch) - max_penalty_db

    return _crossing(excess, bracket, "per-line power")


def min_ocnr_for_penalty(arch: TxArchitecture, p_line_dbm: float, max_penalty_db: float = 3.0,
                         n_lines: int = 4, reference_db: float | None = None,
                         bracket=(10.0, 80.0)) -> float:
    """Lowest OCNR keeping the MWS within ``max_penalty_db`` of the SWS reference."""
    ref = sws_reference_osnr(arch) if reference_db is None else reference_db

    def excess(o):
        return ref - osnr_tx(LightSourceSpec.mws(o, p_line_dbm, n_lines), arch) - max_penalty_db

    return _crossing(excess, bracket, "OCNR")


def _crossing(excess, bracket, what):
    lo, hi = bracket
    # bracket ends deliberately probe unrealistic gains
    disabled, logger.disabled = logger.disabled, True
    try:
        if excess(hi) > 0:
            return math.inf  # penalty target unreachable
        if excess(lo) <= 0:
            raise ValueError(f"{what} bracket {bracket} does not contain the crossing")
        return brentq(excess, lo, hi, xtol=1e-9)
    finally:
        logger.disabled = disabled
