"""Network domain types: topology, spectrum grid constants, demands, transponder
configurations and scenarios, plus file ingestion and dB conversions.

Units used throughout the package: powers in dBm or mW, ratios in dB, frequencies
in GHz, distances in km and data rates in Gb/s. OSNR and OCNR values are referred
to a 12.5 GHz (0.1 nm) bandwidth.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

SLOT_WIDTH_GHZ = 12.5
BAND_GHZ = 4800.0
N_SLOTS = int(BAND_GHZ / SLOT_WIDTH_GHZ)
MAX_SPAN_KM = 80.0
ROLLOFF_GUARD = 1.05

SYMBOL_RATES_GBD = (35, 70, 105, 140)
MODULATIONS = {"QPSK": 4, "16QAM": 16, "64QAM": 64}

# implementation penalties in dB, indexed by modulation then symbol rate
IMPLEMENTATION_PENALTY_DB = {
    "QPSK": {35: 1.0, 70: 1.5, 105: 2.0, 140: 2.5},
    "16QAM": {35: 1.5, 70: 2.0, 105: 2.5, 140: 3.0},
    "64QAM": {35: 2.0, 70: 2.5, 105: 3.0, 140: 3.5},
}


class TopologyError(ValueError):
    """Raised when a topology or demand file violates the schema or invariants."""


def db_to_lin(x):
    """Convert a dB value (scalar or array) to a linear ratio."""
    if isinstance(x, (int, float)):
        return 10.0 ** (x / 10.0)
    out = 10.0 ** (np.asarray(x, dtype=float) / 10.0)
    return out if out.ndim else float(out)


def lin_to_db(x):
    """Convert a strictly positive linear ratio (scalar or array) to dB."""
    if isinstance(x, (int, float)):
        if not x > 0:
            raise ValueError(f"lin_to_db needs strictly positive input, got {x!r}")
        return 10.0 * math.log10(x)
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError(f"lin_to_db needs strictly positive input, got {x!r}")
    out = 10.0 * np.log10(arr)
    return out if out.ndim else float(out)


def split_spans(length_km: float, max_span_km: float = MAX_SPAN_KM) -> list[float]:
    """Split a link into ``ceil(length / max_span_km)`` equal spans."""
    if not length_km > 0:
        raise ValueError(f"link length must be positive, got {length_km}")
    n = math.ceil(length_km / max_span_km)
    return [length_km / n] * n


@dataclass(frozen=True)
class Node:
    id: str
    weight: float = 1.0


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    length_km: float
    spans: tuple[float, ...] = ()

    @property
    def key(self) -> frozenset:
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class Topology:
    """Nodes and bidirectional links; each link is pre-split into amplified spans.

    Both directions of a link share one spectrum resource, so links are indexed by
    the unordered node pair.
    """

    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    name: str = ""

    @cached_property
    def _index(self) -> dict[frozenset, int]:
        return {link.key: i for i, link in enumerate(self.links)}

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(n.id for n in self.nodes)
        for link in self.links:
            g.add_edge(link.a, link.b, length_km=link.length_km)
        return g

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def link_index(self, a: str, b: str) -> int:
        try:
            return self._index[frozenset((a, b))]
        except KeyError:
            raise KeyError(f"no link between {a!r} and {b!r}") from None

    def path_links(self, path) -> tuple[int, ...]:
        """Link indices traversed by a node sequence."""
        return tuple(self.link_index(a, b) for a, b in zip(path[:-1], path[1:]))

    def path_spans(self, path) -> tuple[float, ...]:
        spans: list[float] = []
        for i in self.path_links(path):
            spans.extend(self.links[i].spans)
        return tuple(spans)

    def path_length(self, path) -> float:
        return sum(self.links[i].length_km for i in self.path_links(path))

    def average_shortest_path_km(self) -> float:
        """Mean shortest-path length over all unordered node pairs."""
        lengths = dict(nx.all_pairs_dijkstra_path_length(self.graph, weight="length_km"))
        ids = self.node_ids
        vals = [lengths[a][b] for i, a in enumerate(ids) for b in ids[i + 1:]]
        return float(np.mean(vals))


def topology_from_dict(doc: dict, name: str = "") -> Topology:
    """Build and validate a :class:`Topology` from its JSON document form."""
    _warn_unknown(doc, {"nodes", "links"}, "topology")
    errors: list[str] = []
    nodes: list[Node] = []
    seen_nodes: set[str] = set()
    for rec in doc.get("nodes", []):
        _warn_unknown(rec, {"id", "weight"}, "node")
        try:
            node = Node(str(rec["id"]), float(rec.get("weight", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"malformed node {rec!r}: {exc}")
            continue
        if node.id in seen_nodes:
            errors.append(f"duplicate node {node.id!r}")
        elif node.weight < 0 or not math.isfinite(node.weight):
            errors.append(f"node {node.id!r} has invalid weight {node.weight}")
        seen_nodes.add(node.id)
        nodes.append(node)

    links: list[Link] = []
    seen_links: set[frozenset] = set()
    for rec in doc.get("links", []):
        _warn_unknown(rec, {"a", "b", "length_km"}, "link")
        try:
            a, b, length = str(rec["a"]), str(rec["b"]), float(rec["length_km"])
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"malformed link {rec!r}: {exc}")
            continue
        key = frozenset((a, b))
        if a == b:
            errors.append(f"self-loop at {a!r}")
        elif a not in seen_nodes or b not in seen_nodes:
            errors.append(f"link {a}-{b} references an unknown node")
        elif key in seen_links:
            errors.append(f"duplicate link {a}-{b}")
        elif not (length > 0 and math.isfinite(length)):
            errors.append(f"link {a}-{b} has non-positive length {length}")
        else:
            seen_links.add(key)
            links.append(Link(a, b, length, tuple(split_spans(length))))

    if not errors:
        if len(nodes) < 2:
            errors.append("topology needs at least two nodes")
        else:
            g = nx.Graph()
            g.add_nodes_from(n.id for n in nodes)
            g.add_edges_from((l.a, l.b) for l in links)
            if not nx.is_connected(g):
                parts = sorted(sorted(c) for c in nx.connected_components(g))
                errors.append(f"topology is disconnected: components {parts}")
    if errors:
        raise TopologyError("invalid topology:\n  " + "\n  ".join(errors))
    return Topology(tuple(nodes), tuple(links), name)


def load_topology(path) -> Topology:
    """Read a topology JSON file.

    The document has the form
    ``{"nodes": [{"id": str, "weight": float}], "links": [{"a": str, "b": str, "length_km": float}]}``.
    """
    path = Path(path)
    with path.open() as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TopologyError(f"{path}: not valid JSON ({exc})") from exc
    return topology_from_dict(doc, name=path.stem)


def bundled_topology(name: str) -> Topology:
    """Load one of the shipped topologies: ``"germany"`` or ``"eu"``."""
    files = {"germany": "germany_like.json", "eu": "eu_like.json"}
    if name not in files:
        raise KeyError(f"unknown bundled topology {name!r}; choose from {sorted(files)}")
    ref = resources.files("mwsplan") / "data" / files[name]
    doc = json.loads(ref.read_text())
    return topology_from_dict(doc, name=name)


def _warn_unknown(rec, allowed: set[str], what: str) -> None:
    if isinstance(rec, dict):
        extra = set(rec) - allowed
        if extra:
            logger.warning("ignoring unknown %s field(s): %s", what, ", ".join(sorted(extra)))


@dataclass(frozen=True)
class Demand:
    src: str
    dst: str
    gbps: float

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"demand source and destination are both {self.src!r}")
        if not self.gbps > 0:
            raise ValueError(f"demand {self.src}-{self.dst} needs a positive rate, got {self.gbps}")


def load_demands(path, topology: Topology | None = None) -> list[Demand]:
    """Read a ``src,dst,gbps`` CSV file (header optional)."""
    demands: list[Demand] = []
    errors: list[str] = []
    known = set(topology.node_ids) if topology is not None else None
    with Path(path).open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and row[0].strip().lower() == "src":
                if len(row) > 3:
                    logger.warning("ignoring unknown demand column(s): %s", ", ".join(row[3:]))
                continue
            if len(row) < 3:
                errors.append(f"line {lineno}: expected src,dst,gbps, got {row}")
                continue
            try:
                d = Demand(row[0].strip(), row[1].strip(), float(row[2]))
            except ValueError as exc:
                errors.append(f"line {lineno}: {exc}")
                continue
            if known is not None and not {d.src, d.dst} <= known:
                errors.append(f"line {lineno}: unknown node in {d.src}-{d.dst}")
                continue
            demands.append(d)
    if errors:
        raise TopologyError("invalid demands:\n  " + "\n  ".join(errors))
    return demands


def write_demands(demands, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["src", "dst", "gbps"])
    for d in demands:
        writer.writerow([d.src, d.dst, repr(d.gbps)])


def channel_width_ghz(symbol_rate_gbd: float) -> float:
    """Occupied bandwidth rounded up to the slot grid, with a 5% roll-off guard."""
    return math.ceil(round(symbol_rate_gbd * ROLLOFF_GUARD / SLOT_WIDTH_GHZ, 9)) * SLOT_WIDTH_GHZ


def net_rate_gbps(symbol_rate_gbd: float, modulation: str) -> float:
    return 100.0 * (symbol_rate_gbd / 35.0) * (math.log2(MODULATIONS[modulation]) / 2.0)


@dataclass(frozen=True, order=True)
class TransponderConfig:
    """One (symbol rate, modulation) operating point of a transponder."""

    symbol_rate_gbd: float
    modulation: str
    penalty_db: float = field(compare=False)
    net_rate_gbps: float = field(compare=False)
    channel_width_ghz: float = field(compare=False)
    required_snr_db: float | None = field(default=None, compare=False)

    @property
    def order(self) -> int:
        return MODULATIONS[self.modulation]

    @property
    def slots(self) -> int:
        return int(round(self.channel_width_ghz / SLOT_WIDTH_GHZ))

    @property
    def label(self) -> str:
        return f"{self.modulation}@{self.symbol_rate_gbd:g}GBd"


def make_config(symbol_rate_gbd: float, modulation: str) -> TransponderConfig:
    if modulation not in MODULATIONS:
        raise ValueError(f"unsupported modulation {modulation!r}")
    try:
        penalty = IMPLEMENTATION_PENALTY_DB[modulation][int(symbol_rate_gbd)]
    except KeyError:
        raise ValueError(f"unsupported symbol rate {symbol_rate_gbd} GBd") from None
    return TransponderConfig(
        symbol_rate_gbd=float(symbol_rate_gbd),
        modulation=modulation,
        penalty_db=penalty,
        net_rate_gbps=net_rate_gbps(symbol_rate_gbd, modulation),
        channel_width_ghz=channel_width_ghz(symbol_rate_gbd),
    )


def config_grid() -> list[TransponderConfig]:
    """All 12 configurations, ordered by modulation order then symbol rate."""
    return [make_config(sr, mod) for mod in MODULATIONS for sr in SYMBOL_RATES_GBD]


class ScenarioKind(str, enum.Enum):
    SWS = "sws"
    FLEX_MWS = "flex"
    FIXED_MWS = "fixed"


@dataclass(frozen=True)
class Scenario:
    """A planning scenario.

    ``penalty_db`` is the transmit-OSNR penalty of MWS carriers relative to an SWS
    transmitter. ``fsr_ghz`` only matters for fixed-FSR sources.
    """

    kind: ScenarioKind = ScenarioKind.SWS
    penalty_db: float = 0.0
    lines: int = 4
    fsr_ghz: float = 150.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        if self.penalty_db < 0:
            raise ValueError("OSNR_TX penalty must be non-negative")
        if self.kind is ScenarioKind.SWS and self.penalty_db != 0:
            raise ValueError("the SWS scenario carries no OSNR_TX penalty")
        if self.kind is not ScenarioKind.SWS and self.lines < 2:
            raise ValueError("MWS scenarios need at least two lines per source")
        if self.kind is ScenarioKind.FIXED_MWS:
            widest = max(channel_width_ghz(sr) for sr in SYMBOL_RATES_GBD)
            if self.fsr_ghz < widest:
                raise ValueError(f"FSR {self.fsr_ghz} GHz is narrower than the widest channel ({widest} GHz)")
            if abs(self.fsr_ghz / SLOT_WIDTH_GHZ - round(self.fsr_ghz / SLOT_WIDTH_GHZ)) > 1e-9:
                raise ValueError("FSR must be a multiple of the slot width")

    @classmethod
    def sws(cls) -> "Scenario":
        return cls(ScenarioKind.SWS)

    @classmethod
    def flex(cls, penalty_db: float, lines: int = 4) -> "Scenario":
        return cls(ScenarioKind.FLEX_MWS, penalty_db, lines)

    @classmethod
    def fixed(cls, penalty_db: float = 1.0, lines: int = 4, fsr_ghz: float = 150.0) -> "Scenario":
        return cls(ScenarioKind.FIXED_MWS, penalty_db, lines, fsr_ghz)

    @property
    def fsr_slots(self) -> int:
        return int(round(self.fsr_ghz / SLOT_WIDTH_GHZ))

    @property
    def label(self) -> str:
        if self.kind is ScenarioKind.SWS:
            return "sws"
        if self.kind is ScenarioKind.FLEX_MWS:
            return f"flex_{self.penalty_db:g}dB"
        return f"fixed_{self.penalty_db:g}dB_{self.fsr_ghz:g}GHz"
