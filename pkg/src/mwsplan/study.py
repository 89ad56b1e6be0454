"""Scenario sweeps over aggregate requested traffic (ART) and the derived metrics:
lightpath and laser counts, underprovisioning, mean SNR, spectral occupancy and
the laser-cost break-even of flexible MWS transponders.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from mwsplan.netmodel import Demand, Scenario, ScenarioKind, Topology
from mwsplan.rcsa import Plan, plan_all

logger = logging.getLogger(__name__)

MIN_DEMAND_GBPS = 25.0
SWS_LASER_COST_SHARE = 0.33


def gravity_demands(topology: Topology, art_gbps: float, weights: dict | None = None,
                    min_gbps: float = MIN_DEMAND_GBPS) -> list[Demand]:
    """Gravity traffic ``d_ij ~ w_i * w_j`` over node pairs, scaled to sum to ``art_gbps``.

    Pairs follow node order in the topology, so the first node of a pair is the
    demand source. Demands smaller than ``min_gbps`` after scaling are raised to
    ``min_gbps``; pairs with a zero weight product get no demand.
    """
    if not art_gbps > 0:
        raise ValueError("aggregate requested traffic must be positive")
    ids = topology.node_ids
    w = {n.id: n.weight for n in topology.nodes}
    if weights:
        unknown = set(weights) - set(ids)
        if unknown:
            raise KeyError(f"weights given for unknown nodes: {sorted(unknown)}")
        w.update({k: float(v) for k, v in weights.items()})
    pairs = [(a, b, w[a] * w[b]) for i, a in enumerate(ids) for b in ids[i + 1:]]
    total = math.fsum(p for *_, p in pairs)
    if not total > 0:
        raise ValueError("gravity model needs at least two nodes with positive weight")
    scale = art_gbps / total
    return [Demand(a, b, max(p * scale, min_gbps)) for a, b, p in pairs if p > 0]


def load_weights(path) -> dict[str, float]:
    """Read a ``node,weight`` CSV file (header optional)."""
    out: dict[str, float] = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("node", "id"):
                continue
            out[row[0].strip()] = float(row[1])
    return out


def laser_count(plan: Plan, group_by: str = "source") -> int:
    """Number of optical power supplies the plan needs.

    SWS lightpaths need one laser each and every fixed-FSR block one laser. Flexible
    MWS lines are pooled per source node (``group_by="source"``) or per node pair
    (``group_by="pair"``) and each pool of up to ``lines`` lightpaths shares a laser.
    """
    sc = plan.scenario
    if sc.kind is ScenarioKind.FLEX_MWS:
        if group_by == "source":
            pools = Counter(lp.demand.src for lp in plan.lightpaths)
        elif group_by == "pair":
            pools = Counter((lp.demand.src, lp.demand.dst) for lp in plan.lightpaths)
        else:
            raise ValueError(f"group_by must be 'source' or 'pair', got {group_by!r}")
        return sum(math.ceil(n / sc.lines) for n in pools.values())
    sws = sum(lp.source == "SWS" for lp in plan.lightpaths)
    return sws + len(plan.blocks)


@dataclass(frozen=True)
class PlanResult:
    """Metrics of one planned (scenario, ART) cell."""

    topology: str
    scenario: str
    penalty_db: float
    art_gbps: float
    requested_gbps: float
    lightpaths: int
    lasers: int
    blocks: int
    served_gbps: float
    underprovisioning: float
    mean_snr_db: float
    occupancy: float


def summarize(plan: Plan, art_gbps: float | None = None, group_by: str = "source") -> PlanResult:
    requested = plan.requested_gbps
    served = requested - plan.unserved_gbps
    snrs = [lp.snr_db for lp in plan.lightpaths]
    return PlanResult(
        topology=plan.topology.name,
        scenario=plan.scenario.label,
        penalty_db=plan.scenario.penalty_db,
        art_gbps=requested if art_gbps is None else art_gbps,
        requested_gbps=requested,
        lightpaths=len(plan.lightpaths),
        lasers=laser_count(plan, group_by),
        blocks=len(plan.blocks),
        served_gbps=served,
        underprovisioning=(requested - served) / requested if requested else 0.0,
        mean_snr_db=float(np.mean(snrs)) if snrs else math.nan,
        occupancy=plan.grid.occupancy(),
    )


def run_cell(topology: Topology, scenario: Scenario, art_gbps: float, weights=None,
             group_by: str = "source", **plan_kwargs) -> PlanResult:
    demands = gravity_demands(topology, art_gbps, weights)
    plan = plan_all(topology, demands, scenario, **plan_kwargs)
    return summarize(plan, art_gbps, group_by)


def _run_cell_args(args):
    return run_cell(*args[:4], group_by=args[4])


def _map(func, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, jobs))
    return [func(j) for j in jobs]


def run_sweep(topology: Topology, scenarios, art_grid, weights=None, group_by: str = "source",
              workers: int | None = None) -> list[PlanResult]:
    """Plan every (scenario, ART) cell; rows come back ordered by scenario, then ART."""
    art_grid = [float(a) for a in art_grid]
    if any(b <= a for a, b in zip(art_grid, art_grid[1:])):
        raise ValueError("ART grid must be strictly ascending")
    jobs = [(topology, sc, art, weights, group_by) for sc in scenarios for art in art_grid]
    return _map(_run_cell_args, jobs, workers)


@dataclass(frozen=True)
class PenaltyRow:
    penalty_db: float
    art_gbps: float
    lightpaths_sws: int
    lightpaths_flex: int
    extra_lightpaths_pct: float
    mean_snr_sws_db: float
    mean_snr_flex_db: float
    snr_diff_db: float  # SWS minus MWS


def penalty_sweep(topology: Topology, art_gbps: float, penalties=None, lines: int = 4, weights=None,
                  workers: int | None = None) -> list[PenaltyRow]:
    """Extra lightpaths and mean-SNR loss of flexible MWS versus SWS at one ART."""
    penalties = list(np.arange(0.0, 3.0 + 1e-9, 0.5)) if penalties is None else list(penalties)
    scenarios = [Scenario.sws()] + [Scenario.flex(float(p), lines) for p in penalties]
    jobs = [(topology, sc, art_gbps, weights, "source") for sc in scenarios]
    base, *flex = _map(_run_cell_args, jobs, workers)
    return [
        PenaltyRow(
            penalty_db=float(p),
            art_gbps=art_gbps,
            lightpaths_sws=base.lightpaths,
            lightpaths_flex=r.lightpaths,
            extra_lightpaths_pct=100.0 * (r.lightpaths - base.lightpaths) / base.lightpaths,
            mean_snr_sws_db=base.mean_snr_db,
            mean_snr_flex_db=r.mean_snr_db,
            snr_diff_db=base.mean_snr_db - r.mean_snr_db,
        )
        for p, r in zip(penalties, flex)
    ]


def laser_saving(sws: PlanResult, other: PlanResult) -> float:
    """Fraction of SWS lasers saved by ``other``."""
    return 1.0 - other.lasers / sws.lasers


def lightpath_inflation(sws: PlanResult, other: PlanResult) -> float:
    """Relative increase in lightpath count of ``other`` over the SWS plan."""
    return other.lightpaths / sws.lightpaths - 1.0


def cost_breakeven(sws: PlanResult, flex: PlanResult, sws_laser_cost_share: float = SWS_LASER_COST_SHARE) -> float:
    """Largest cost of one MWS, in units of an SWS laser, at which the flexible MWS plan
    is no more expensive than the SWS plan.

    Each transponder costs ``share`` for its laser and ``1 - share`` for the rest.
    """
    if flex.lasers <= 0:
        raise ZeroDivisionError("the flexible MWS plan uses no lasers")
    share = sws_laser_cost_share
    rest = 1.0 - share
    sws_cost = sws.lasers * share + sws.lightpaths * rest
    return (sws_cost - flex.lightpaths * rest) / (flex.lasers * share)


def art_grid(start: float, stop: float, step: float) -> list[float]:
    if not step > 0 or stop < start:
        raise ValueError("ART grid needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def saturation_art(topology: Topology, step: float, weights=None, max_steps: int = 200) -> float:
    """First multiple of ``step`` at which the SWS plan can no longer serve all traffic."""
    for i in range(1, max_steps + 1):
        art = i * step
        if run_cell(topology, Scenario.sws(), art, weights).underprovisioning > 0:
            return art
    raise RuntimeError(f"SWS plan still unsaturated at {max_steps * step:g} Gb/s")


def sweep_to_saturation(topology: Topology, step: float, weights=None) -> list[float]:
    """ART grid from ``step`` up to the SWS saturation point."""
    return art_grid(step, saturation_art(topology, step, weights), step)


def _write_rows(rows, cls, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    names = [f.name for f in fields(cls)]
    writer.writerow(names)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[n]) for n in names])


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6f}"
    return v


def write_results_csv(rows, fh) -> None:
    _write_rows(rows, PlanResult, fh)


def write_penalty_csv(rows, fh) -> None:
    _write_rows(rows, PenaltyRow, fh)
