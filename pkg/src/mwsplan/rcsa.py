"""Routing, configuration and spectrum assignment.

Demands are planned one at a time in a fixed order. For every lightpath the
planner looks at the k shortest routes, takes the configurations whose required
SNR is met (with the scenario's transmit-OSNR penalty for MWS carriers) and picks
the placement that carries the most of the remaining rate; spectrum comes from
first-fit.

Tie-breaks, in order: fewer projected lightpaths for the demand, narrower channel,
lower required SNR, shorter route.

Fixed-FSR sources reserve ``lines * fsr`` contiguous slots on a single route for
every block, even when only some lines are lit.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import networkx as nx
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from mwsplan.netmodel import (N_SLOTS, Demand, Scenario, ScenarioKind, Topology,
                              TransponderConfig)
from mwsplan.qot import DEFAULT_FIBER, DEFAULT_LAUNCH, FiberParams, LaunchSpec, config_table, path_snr
from mwsplan.txchain import sws_reference_osnr

logger = logging.getLogger(__name__)

FREE = -1
LENGTH_TIE_DECIMALS = 6


class PlanInvariantError(AssertionError):
    pass


def k_shortest_paths(topology: Topology, src: str, dst: str, k: int = 3) -> list[tuple[str, ...]]:
    """Up to ``k`` loop-free routes ordered by length, ties broken by node-id sequence."""
    if src == dst:
        raise ValueError("source and destination must differ")
    if k < 1:
        return []
    g = topology.graph
    found: list[tuple[float, list[str]]] = []
    try:
        for p in nx.shortest_simple_paths(g, src, dst, weight="length_km"):
            length = round(nx.path_weight(g, p, "length_km"), LENGTH_TIE_DECIMALS)
            # keep collecting paths tied with the k-th so the tie-break sees all of them
            if len(found) >= k and length > found[k - 1][0]:
                break
            found.append((length, p))
    except nx.NetworkXNoPath:
        return []
    found.sort()
    return [tuple(p) for _, p in found[:k]]


def first_fit_mask(free: np.ndarray, width: int) -> int | None:
    """Lowest start index of ``width`` consecutive ``True`` entries, or ``None``."""
    if width < 1:
        raise ValueError("width must be at least one slot")
    if width > free.size:
        return None
    ok = sliding_window_view(free, width).all(axis=1)
    idx = np.flatnonzero(ok)
    return int(idx[0]) if idx.size else None


class SpectrumGrid:
    """Slot ownership per link; ``-1`` marks a free slot."""

    def __init__(self, n_links: int, n_slots: int = N_SLOTS):
        self.owner = np.full((n_links, n_slots), FREE, dtype=np.int64)

    @property
    def n_slots(self) -> int:
        return self.owner.shape[1]

    def free_mask(self, links) -> np.ndarray:
        return (self.owner[list(links)] == FREE).all(axis=0)

    def is_free(self, links, start: int, width: int) -> bool:
        if start < 0 or start + width > self.n_slots:
            return False
        return bool((self.owner[list(links), start:start + width] == FREE).all())

    def allocate(self, links, start: int, width: int, owner: int) -> None:
        if not self.is_free(links, start, width):
            raise PlanInvariantError(f"slots {start}..{start + width - 1} are not free on links {links}")
        self.owner[list(links), start:start + width] = owner

    def occupancy(self) -> float:
        return float((self.owner != FREE).mean())

    def copy(self) -> "SpectrumGrid":
        other = SpectrumGrid.__new__(SpectrumGrid)
        other.owner = self.owner.copy()
        return other


def first_fit(grid: SpectrumGrid, links, width: int) -> int | None:
    """First-fit start slot for a contiguous, continuous allocation; ``None`` when blocked."""
    return first_fit_mask(grid.free_mask(links), width)


def block_owner_code(block_id: int) -> int:
    return -2 - block_id


@dataclass(frozen=True)
class Route:
    nodes: tuple[str, ...]
    links: tuple[int, ...]
    length_km: float
    spans: tuple[float, ...]


@dataclass(frozen=True)
class Lightpath:
    id: int
    demand: Demand
    route: Route
    config: TransponderConfig
    start: int
    source: str  # "SWS", "FlexMWS" or "FixedMWS"
    snr_db: float
    carried_gbps: float
    block_id: int | None = None
    line: int | None = None

    @property
    def slots(self) -> range:
        return range(self.start, self.start + self.config.slots)

    @property
    def path(self) -> tuple[str, ...]:
        return self.route.nodes


@dataclass
class MwsBlock:
    """Spectrum reserved for one fixed-FSR source: ``n_lines`` sub-bands of ``fsr_slots``."""

    id: int
    owner: tuple[str, str]
    route: Route
    start: int
    n_lines: int
    fsr_slots: int
    lines: list = field(default_factory=list)  # lightpath id per line, None while idle

    def __post_init__(self):
        if not self.lines:
            self.lines = [None] * self.n_lines

    @property
    def width(self) -> int:
        return self.n_lines * self.fsr_slots

    def line_start(self, i: int) -> int:
        return self.start + i * self.fsr_slots

    def idle_line(self) -> int | None:
        for i, lp in enumerate(self.lines):
            if lp is None:
                return i
        return None

    @property
    def active_lines(self) -> int:
        return sum(lp is not None for lp in self.lines)


@dataclass(frozen=True)
class DemandOutcome:
    demand: Demand
    lightpath_ids: tuple[int, ...]
    served_gbps: float
    unserved_gbps: float


@dataclass
class Plan:
    topology: Topology
    scenario: Scenario
    lightpaths: list[Lightpath]
    blocks: list[MwsBlock]
    outcomes: list[DemandOutcome]
    grid: SpectrumGrid

    @property
    def requested_gbps(self) -> float:
        return sum(o.demand.gbps for o in self.outcomes)

    @property
    def served_gbps(self) -> float:
        return sum(o.served_gbps for o in self.outcomes)

    @property
    def unserved_gbps(self) -> float:
        return sum(o.unserved_gbps for o in self.outcomes)


@dataclass(frozen=True)
class _Candidate:
    key: tuple
    route: Route
    config: TransponderConfig
    snr_db: float
    start: int
    carried: float


class Planner:
    """Sequential planning state for one scenario on one topology."""

    def __init__(self, topology: Topology, scenario: Scenario, *, k: int = 3,
                 launch: LaunchSpec = DEFAULT_LAUNCH, fiber: FiberParams = DEFAULT_FIBER,
                 osnr_tx_db: float | None = None, configs=None):
        self.topology = topology
        self.scenario = scenario
        self.k = k
        self.launch = launch
        self.fiber = fiber
        self.osnr_tx_db = sws_reference_osnr() if osnr_tx_db is None else osnr_tx_db
        self.configs = tuple(config_table() if configs is None else configs)
        self.grid = SpectrumGrid(len(topology.links))
        self.lightpaths: list[Lightpath] = []
        self.blocks: list[MwsBlock] = []
        self.outcomes: list[DemandOutcome] = []
        self._routes: dict[tuple[str, str], tuple[Route, ...]] = {}
        self._feasible: dict[tuple, tuple[tuple[TransponderConfig, float], ...]] = {}

    def routes(self, src: str, dst: str) -> tuple[Route, ...]:
        key = (src, dst)
        if key not in self._routes:
            self._routes[key] = _routes(self.topology, src, dst, self.k)
        return self._routes[key]

    def feasible(self, route: Route, penalty_db: float) -> tuple[tuple[TransponderConfig, float], ...]:
        """(config, achieved SNR) pairs meeting the required SNR, highest net rate first."""
        key = (route.spans, penalty_db)
        if key not in self._feasible:
            self._feasible[key] = _feasible_table(route.spans, self.osnr_tx_db - penalty_db,
                                                  self.launch, self.fiber, self.configs)
        return self._feasible[key]

    def _best_candidate(self, routes, remaining, penalty_db, max_slots=None) -> _Candidate | None:
        best = None
        for ridx, route in enumerate(routes):
            rows = [r for r in self.feasible(route, penalty_db)
                    if max_slots is None or r[0].slots <= max_slots]
            if not rows:
                continue
            top_rate = rows[0][0].net_rate_gbps
            free = self.grid.free_mask(route.links)
            starts: dict[int, int | None] = {}
            for cfg, snr in rows:
                if cfg.slots not in starts:
                    starts[cfg.slots] = first_fit_mask(free, cfg.slots)
                start = starts[cfg.slots]
                if start is None:
                    continue
                carried = min(cfg.net_rate_gbps, remaining)
                rest = remaining - carried
                projected = 1 + (math.ceil(rest / top_rate) if rest > 0 else 0)
                key = (-carried, projected, cfg.slots, cfg.required_snr_db, route.length_km, ridx)
                if best is None or key < best.key:
                    best = _Candidate(key, route, cfg, snr, start, carried)
        return best

    def _add_lightpath(self, demand, cand: _Candidate, source, block=None, line=None) -> Lightpath:
        lp = Lightpath(len(self.lightpaths), demand, cand.route, cand.config, cand.start, source,
                       cand.snr_db, cand.carried, None if block is None else block.id, line)
        if block is None:
            self.grid.allocate(cand.route.links, cand.start, cand.config.slots, lp.id)
        else:
            block.lines[line] = lp.id
        self.lightpaths.append(lp)
        return lp

    def plan_demand(self, demand: Demand) -> DemandOutcome:
        """Place lightpaths for one demand; whatever cannot be placed is left unserved."""
        routes = self.routes(demand.src, demand.dst)
        if self.scenario.kind is ScenarioKind.FIXED_MWS:
            placed, remaining = self._plan_fixed(demand, routes)
        else:
            source = "SWS" if self.scenario.kind is ScenarioKind.SWS else "FlexMWS"
            placed, remaining = self._plan_greedy(demand, routes, demand.gbps, self.scenario.penalty_db, source)
        outcome = DemandOutcome(demand, tuple(lp.id for lp in placed), demand.gbps - remaining, remaining)
        self.outcomes.append(outcome)
        return outcome

    def _plan_greedy(self, demand, routes, remaining, penalty_db, source, max_lps=None):
        placed = []
        while remaining > 0 and (max_lps is None or len(placed) < max_lps):
            cand = self._best_candidate(routes, remaining, penalty_db)
            if cand is None:
                break
            placed.append(self._add_lightpath(demand, cand, source))
            remaining -= cand.carried
        return placed, remaining

    def _plan_fixed(self, demand, routes):
        sc = self.scenario
        single = self._best_candidate(routes, demand.gbps, 0.0)
        if single is not None and single.carried >= demand.gbps:
            return [self._add_lightpath(demand, single, "SWS")], 0.0

        placed = []
        remaining = demand.gbps
        while remaining > 0:
            block, line = self._idle_line(demand, routes)
            if block is None:
                block = self._open_block(demand, routes, remaining)
                if block is None:
                    break
                line = 0
            rows = [r for r in self.feasible(block.route, sc.penalty_db) if r[0].slots <= sc.fsr_slots]
            cfg, snr = min(rows, key=lambda r: (-min(r[0].net_rate_gbps, remaining), r[0].slots,
                                                r[0].required_snr_db))
            carried = min(cfg.net_rate_gbps, remaining)
            cand = _Candidate((), block.route, cfg, snr, block.line_start(line), carried)
            placed.append(self._add_lightpath(demand, cand, "FixedMWS", block, line))
            remaining -= carried
        return placed, remaining

    def _idle_line(self, demand, routes):
        owner = (demand.src, demand.dst)
        route_set = {r.nodes for r in routes}
        for block in self.blocks:
            if block.owner == owner and block.route.nodes in route_set:
                line = block.idle_line()
                if line is not None:
                    return block, line
        return None, None

    def _open_block(self, demand, routes, remaining) -> MwsBlock | None:
        sc = self.scenario
        width = sc.lines * sc.fsr_slots
        best = None
        for ridx, route in enumerate(routes):
            rows = [r for r in self.feasible(route, sc.penalty_db) if r[0].slots <= sc.fsr_slots]
            if not rows:
                continue
            start = first_fit(self.grid, route.links, width)
            if start is None:
                continue
            capacity = min(sc.lines * rows[0][0].net_rate_gbps, remaining)
            key = (-capacity, route.length_km, ridx)
            if best is None or key < best[0]:
                best = (key, route, start)
        if best is None:
            return None
        _, route, start = best
        block = MwsBlock(len(self.blocks), (demand.src, demand.dst), route, start, sc.lines, sc.fsr_slots)
        self.grid.allocate(route.links, start, width, block_owner_code(block.id))
        self.blocks.append(block)
        return block

    def result(self) -> Plan:
        return Plan(self.topology, self.scenario, list(self.lightpaths), list(self.blocks),
                    list(self.outcomes), self.grid)


@lru_cache(maxsize=8192)
def _routes(topology: Topology, src: str, dst: str, k: int) -> tuple[Route, ...]:
    return tuple(Route(p, topology.path_links(p), topology.path_length(p), topology.path_spans(p))
                 for p in k_shortest_paths(topology, src, dst, k))


@lru_cache(maxsize=65536)
def _feasible_table(spans, osnr_tx_db, launch, fiber, configs):
    rows = []
    for c in configs:
        snr = path_snr(spans, c, launch, osnr_tx_db, fiber)
        if snr >= c.required_snr_db:
            rows.append((c, snr))
    rows.sort(key=lambda r: (-r[0].net_rate_gbps, r[0].required_snr_db))
    return tuple(rows)


def demand_order(demands) -> list[Demand]:
    """Descending requested rate, then by node-id pair."""
    return sorted(demands, key=lambda d: (-d.gbps, d.src, d.dst))


def plan_demand(demand: Demand, planner: Planner) -> DemandOutcome:
    return planner.plan_demand(demand)


def plan_all(topology: Topology, demands, scenario: Scenario, **kwargs) -> Plan:
    """Plan every demand in deterministic order and return the full plan."""
    planner = Planner(topology, scenario, **kwargs)
    for d in demand_order(demands):
        planner.plan_demand(d)
    return planner.result()


def validate_plan(plan: Plan) -> None:
    """Raise :class:`PlanInvariantError` if the plan breaks a spectrum or QoT invariant."""
    n_links = len(plan.topology.links)
    used = np.full((n_links, plan.grid.n_slots), FREE, dtype=np.int64)

    def claim(links, start, width, owner):
        seg = used[list(links), start:start + width]
        if start < 0 or start + width > used.shape[1] or (seg != FREE).any():
            raise PlanInvariantError(f"overlapping allocation for owner {owner}")
        used[list(links), start:start + width] = owner

    blocks = {b.id: b for b in plan.blocks}
    for b in plan.blocks:
        claim(b.route.links, b.start, b.width, block_owner_code(b.id))
    for lp in plan.lightpaths:
        if lp.route.links != plan.topology.path_links(lp.route.nodes):
            raise PlanInvariantError(f"lightpath {lp.id} links do not follow its node path")
        if lp.snr_db < lp.config.required_snr_db:
            raise PlanInvariantError(f"lightpath {lp.id} is below its required SNR")
        if not 0 < lp.carried_gbps <= lp.config.net_rate_gbps:
            raise PlanInvariantError(f"lightpath {lp.id} carries {lp.carried_gbps} Gb/s")
        if lp.block_id is None:
            claim(lp.route.links, lp.start, lp.config.slots, lp.id)
            continue
        b = blocks[lp.block_id]
        if lp.route.nodes != b.route.nodes:
            raise PlanInvariantError(f"lightpath {lp.id} does not co-propagate with block {b.id}")
        lo = b.line_start(lp.line)
        if not (lo <= lp.start and lp.start + lp.config.slots <= lo + b.fsr_slots):
            raise PlanInvariantError(f"lightpath {lp.id} leaves its line sub-band")
        if b.lines[lp.line] != lp.id:
            raise PlanInvariantError(f"block {b.id} line {lp.line} is not bound to lightpath {lp.id}")
    if not np.array_equal(used, plan.grid.owner):
        raise PlanInvariantError("grid state does not match the placed lightpaths and blocks")
    for o in plan.outcomes:
        if o.served_gbps + o.unserved_gbps != o.demand.gbps:
            raise PlanInvariantError(f"served + unserved != requested for {o.demand}")
        carried = sum(plan.lightpaths[i].carried_gbps for i in o.lightpath_ids)
        if not math.isclose(carried, o.served_gbps, rel_tol=1e-12, abs_tol=1e-9):
            raise PlanInvariantError(f"lightpaths of {o.demand} carry {carried}, expected {o.served_gbps}")


PLAN_CSV_COLUMNS = ["src", "dst", "path", "config", "slots", "snr_db", "source_type"]


def write_plan_csv(plan: Plan, fh, lasers: int | None = None) -> None:
    """One row per lightpath followed by a ``#summary`` row."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(PLAN_CSV_COLUMNS)
    for lp in plan.lightpaths:
        source = lp.source if lp.line is None else f"{lp.source}:{lp.line + 1}/{plan.scenario.lines}"
        writer.writerow([lp.demand.src, lp.demand.dst, "-".join(lp.path), lp.config.label,
                         f"{lp.start}-{lp.start + lp.config.slots - 1}", f"{lp.snr_db:.3f}", source])
    summary = [f"lightpaths={len(plan.lightpaths)}", f"blocks={len(plan.blocks)}",
               f"requested_gbps={plan.requested_gbps:g}", f"served_gbps={plan.served_gbps:g}",
               f"unserved_gbps={plan.unserved_gbps:g}"]
    if lasers is not None:
        summary.append(f"lasers={lasers}")
    writer.writerow(["#summary", plan.scenario.label, ";".join(summary), "", "", "", ""])
