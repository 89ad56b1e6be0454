"""Quality of transmission: required SNR per transponder configuration and achieved
SNR of a lightpath from transmitter noise, span ASE and GN-model nonlinear
interference.

All span noise is accumulated incoherently over identical, fully loaded spans, so
the estimate does not depend on the instantaneous spectrum occupancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

from scipy import constants
from scipy.optimize import bisect

from mwsplan.netmodel import (BAND_GHZ, MODULATIONS, TransponderConfig, config_grid, db_to_lin,
                              lin_to_db)
from mwsplan.txchain import REF_BANDWIDTH_HZ, REF_FREQUENCY_HZ

FEC_BER_THRESHOLD = 0.035
PHOTON_ENERGY_J = constants.h * REF_FREQUENCY_HZ


@dataclass(frozen=True)
class FiberParams:
    """Standard single-mode fibre spans with loss-compensating EDFAs."""

    alpha_db_km: float = 0.2
    beta2_ps2_km: float = -21.3
    gamma_w_km: float = 1.3
    nf_db: float = 5.0

    def __post_init__(self):
        if not self.alpha_db_km > 0:
            raise ValueError("attenuation must be positive")
        if not self.gamma_w_km > 0:
            raise ValueError("nonlinear coefficient must be positive")

    @property
    def alpha_field_km(self) -> float:
        """Field attenuation coefficient in 1/km (half the power coefficient)."""
        return self.alpha_db_km / (20.0 * math.log10(math.e))

    def gain_db(self, length_km: float) -> float:
        return self.alpha_db_km * length_km

    def l_eff_km(self, length_km: float) -> float:
        a2 = 2.0 * self.alpha_field_km
        return (1.0 - math.exp(-a2 * length_km)) / a2

    @property
    def l_eff_asymptotic_km(self) -> float:
        return 1.0 / (2.0 * self.alpha_field_km)


@dataclass(frozen=True)
class LaunchSpec:
    """Launch power spectral density shared by every channel of a run.

    The default is 0 dBm for a 140 GBd carrier.
    """

    psd_dbm_ghz: float = -21.46

    def channel_power_dbm(self, symbol_rate_gbd: float) -> float:
        return self.psd_dbm_ghz + 10.0 * math.log10(symbol_rate_gbd)

    def channel_power_mw(self, symbol_rate_gbd: float) -> float:
        return db_to_lin(self.psd_dbm_ghz) * symbol_rate_gbd

    @property
    def psd_w_hz(self) -> float:
        return db_to_lin(self.psd_dbm_ghz) * 1e-3 / 1e9


DEFAULT_FIBER = FiberParams()
DEFAULT_LAUNCH = LaunchSpec()


def q_function(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def qam_ber(snr_lin: float, order: int) -> float:
    """Gray-coded square M-QAM bit error rate at a linear SNR (M = 4 gives QPSK)."""
    k = math.log2(order)
    return (4.0 / k) * (1.0 - 1.0 / math.sqrt(order)) * q_function(math.sqrt(3.0 * snr_lin / (order - 1)))


@lru_cache(maxsize=None)
def threshold_snr_db(modulation: str, ber: float = FEC_BER_THRESHOLD) -> float:
    """SNR at which the uncoded BER of ``modulation`` equals the FEC threshold."""
    if modulation not in MODULATIONS:
        raise ValueError(f"unsupported modulation {modulation!r}")
    order = MODULATIONS[modulation]
    snr = bisect(lambda s: qam_ber(s, order) - ber, 1e-6, 1e6, xtol=1e-15, rtol=1e-12, maxiter=500)
    return lin_to_db(snr)


def required_snr(config: TransponderConfig) -> float:
    """FEC-threshold SNR of the modulation plus the configuration's implementation penalty."""
    return threshold_snr_db(config.modulation) + config.penalty_db


@lru_cache(maxsize=None)
def config_table() -> tuple[TransponderConfig, ...]:
    """The 12 transponder configurations with their required SNR filled in."""
    return tuple(replace(c, required_snr_db=required_snr(c)) for c in config_grid())


def span_ase_power(length_km: float, channel_width_ghz: float, fiber: FiberParams = DEFAULT_FIBER) -> float:
    """ASE power in mW added by the EDFA that compensates one span, over the channel width."""
    if length_km < 0:
        raise ValueError("span length must be non-negative")
    gain = db_to_lin(fiber.gain_db(length_km))
    return db_to_lin(fiber.nf_db) * PHOTON_ENERGY_J * (gain - 1.0) * channel_width_ghz * 1e9 * 1e3


def span_nli_power(length_km: float, launch: LaunchSpec, channel_width_ghz: float,
                   fiber: FiberParams = DEFAULT_FIBER, band_ghz: float = BAND_GHZ) -> float:
    """Closed-form GN-model NLI power in mW generated in one span over the channel width.

    The whole band is assumed loaded at the launch PSD.
    """
    if fiber.beta2_ps2_km == 0:
        raise ZeroDivisionError("the closed-form GN model is singular at zero dispersion")
    if not launch.psd_w_hz > 0:
        raise ValueError("launch PSD must be positive")
    beta2 = abs(fiber.beta2_ps2_km) * 1e-24  # s^2/km
    l_eff = fiber.l_eff_km(length_km)
    l_eff_a = fiber.l_eff_asymptotic_km
    b_tot = band_ghz * 1e9
    g = launch.psd_w_hz
    g_nli = (8.0 / 27.0) * fiber.gamma_w_km ** 2 * l_eff ** 2 * g ** 3 \
        * math.asinh(0.5 * math.pi ** 2 * beta2 * l_eff_a * b_tot ** 2) / (math.pi * beta2 * l_eff_a)
    return g_nli * channel_width_ghz * 1e9 * 1e3


def tx_snr_db(osnr_tx_db: float, symbol_rate_gbd: float) -> float:
    """Refer an OSNR in the 0.1 nm bandwidth to the signal bandwidth."""
    return osnr_tx_db + 10.0 * math.log10(REF_BANDWIDTH_HZ / 1e9 / symbol_rate_gbd)


@lru_cache(maxsize=4096)
def _span_noise_per_ghz(length_km: float, launch: LaunchSpec, fiber: FiberParams) -> tuple[float, float]:
    return span_ase_power(length_km, 1.0, fiber), span_nli_power(length_km, launch, 1.0, fiber)


def path_noise_mw(spans, channel_width_ghz: float, launch: LaunchSpec = DEFAULT_LAUNCH,
                  fiber: FiberParams = DEFAULT_FIBER) -> tuple[float, float]:
    """Summed (ASE, NLI) power over a list of span lengths."""
    ase = nli = 0.0
    for length in spans:
        a, n = _span_noise_per_ghz(length, launch, fiber)
        ase += a
        nli += n
    return ase * channel_width_ghz, nli * channel_width_ghz


def path_snr(spans, config: TransponderConfig, launch: LaunchSpec = DEFAULT_LAUNCH,
             osnr_tx_db: float = math.inf, fiber: FiberParams = DEFAULT_FIBER) -> float:
    """Achieved SNR in dB of ``config`` over ``spans`` (an empty list is back-to-back)."""
    ase, nli = path_noise_mw(spans, config.channel_width_ghz, launch, fiber)
    inv = (ase + nli) / launch.channel_power_mw(config.symbol_rate_gbd)
    if math.isfinite(osnr_tx_db):
        inv += 1.0 / db_to_lin(tx_snr_db(osnr_tx_db, config.symbol_rate_gbd))
    if inv == 0.0:
        return math.inf
    return -lin_to_db(inv)


def rank_configs(configs) -> list[TransponderConfig]:
    """Sort by net rate descending, then by required SNR ascending."""
    return sorted(configs, key=lambda c: (-c.net_rate_gbps, c.required_snr_db))


def feasible_configs(spans, launch: LaunchSpec = DEFAULT_LAUNCH, osnr_tx_db: float = math.inf,
                     fiber: FiberParams = DEFAULT_FIBER, configs=None) -> list[TransponderConfig]:
    """Configurations whose required SNR is met on the path, best first."""
    configs = config_table() if configs is None else configs
    ok = [c for c in configs if path_snr(spans, c, launch, osnr_tx_db, fiber) >= c.required_snr_db]
    return rank_configs(ok)
