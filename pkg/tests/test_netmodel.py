import json
import logging
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mwsplan.netmodel import (N_SLOTS, Demand, Scenario, ScenarioKind, TopologyError, bundled_topology,
                              channel_width_ghz, config_grid, db_to_lin, lin_to_db, load_demands,
                              load_topology, make_config, net_rate_gbps, split_spans, write_demands)

from conftest import make_topology


def test_db_conversions_known_points():
    assert db_to_lin(0.0) == 1.0
    assert db_to_lin(3.0103) == pytest.approx(2.0, abs=1e-4)
    assert db_to_lin(55.0) == pytest.approx(316227.77, abs=0.01)
    assert lin_to_db(1.0) == 0.0


def test_db_conversions_accept_arrays():
    arr = np.array([0.0, 10.0, 20.0])
    np.testing.assert_allclose(db_to_lin(arr), [1.0, 10.0, 100.0])
    np.testing.assert_allclose(lin_to_db(db_to_lin(arr)), arr)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, [1.0, 0.0]])
def test_lin_to_db_rejects_non_positive(bad):
    with pytest.raises(ValueError):
        lin_to_db(bad)


@given(st.floats(min_value=1e-30, max_value=1e30))
def test_db_round_trip(x):
    assert db_to_lin(lin_to_db(x)) == pytest.approx(x, rel=1e-12)


@pytest.mark.parametrize("length, expected", [
    (80.0, [80.0]),
    (160.0, [80.0, 80.0]),
    (420.0, [70.0] * 6),
])
def test_split_spans_examples(length, expected):
    assert split_spans(length) == pytest.approx(expected)


def test_split_spans_200km():
    spans = split_spans(200.0)
    assert len(spans) == 3
    assert math.fsum(spans) == pytest.approx(200.0, abs=1e-9)
    assert spans == pytest.approx([200.0 / 3] * 3)


@given(st.floats(min_value=1e-3, max_value=20000.0))
def test_split_spans_properties(length):
    spans = split_spans(length)
    assert abs(math.fsum(spans) - length) <= 1e-9
    assert max(spans) <= 80.0
    assert len(spans) == math.ceil(length / 80.0)


@pytest.mark.parametrize("bad", [0.0, -5.0])
def test_split_spans_rejects_non_positive(bad):
    with pytest.raises(ValueError):
        split_spans(bad)


def test_load_two_node_file(tmp_path):
    p = tmp_path / "two.json"
    p.write_text(json.dumps({"nodes": [{"id": "A", "weight": 1}, {"id": "B", "weight": 2}],
                             "links": [{"a": "A", "b": "B", "length_km": 80}]}))
    topo = load_topology(p)
    assert len(topo.links) == 1
    assert topo.links[0].spans == (80.0,)
    assert topo.name == "two"
    assert [n.weight for n in topo.nodes] == [1.0, 2.0]


@pytest.mark.parametrize("doc, fragment", [
    ({"nodes": [{"id": "A"}, {"id": "B"}, {"id": "C"}], "links": [{"a": "A", "b": "B", "length_km": 10}]},
     "disconnected"),
    ({"nodes": [{"id": "A"}, {"id": "B"}],
      "links": [{"a": "A", "b": "B", "length_km": 10}, {"a": "B", "b": "A", "length_km": 12}]},
     "duplicate link"),
    ({"nodes": [{"id": "A"}, {"id": "B"}], "links": [{"a": "A", "b": "B", "length_km": 0}]},
     "non-positive length"),
    ({"nodes": [{"id": "A"}, {"id": "A"}], "links": []}, "duplicate node"),
    ({"nodes": [{"id": "A"}, {"id": "B"}], "links": [{"a": "A", "b": "Z", "length_km": 5}]}, "unknown node"),
    ({"nodes": [{"id": "A"}, {"id": "B"}], "links": [{"a": "A", "b": "B"}]}, "malformed link"),
])
def test_invalid_topologies(tmp_path, doc, fragment):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(TopologyError, match=fragment):
        load_topology(p)


def test_validation_lists_every_offending_record(tmp_path):
    doc = {"nodes": [{"id": "A"}, {"id": "B"}, {"id": "C"}],
           "links": [{"a": "A", "b": "B", "length_km": -1}, {"a": "B", "b": "C", "length_km": 0}]}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(TopologyError) as err:
        load_topology(p)
    assert "A-B" in str(err.value) and "B-C" in str(err.value)


def test_unknown_fields_warn_but_load(tmp_path, caplog):
    doc = {"nodes": [{"id": "A", "lat": 1}, {"id": "B"}], "links": [{"a": "A", "b": "B", "length_km": 5}],
           "meta": "x"}
    p = tmp_path / "extra.json"
    p.write_text(json.dumps(doc))
    with caplog.at_level(logging.WARNING):
        topo = load_topology(p)
    assert len(topo.nodes) == 2
    assert "lat" in caplog.text and "meta" in caplog.text


def test_malformed_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{nodes:")
    with pytest.raises(TopologyError):
        load_topology(p)


@pytest.mark.parametrize("name, n_nodes, n_links, lo, hi", [
    ("germany", 17, 26, 350.0, 500.0),
    ("eu", 28, 43, 900.0, 1300.0),
])
def test_bundled_topologies(name, n_nodes, n_links, lo, hi):
    topo = bundled_topology(name)
    assert (len(topo.nodes), len(topo.links)) == (n_nodes, n_links)
    # brute-force oracle: Floyd-Warshall over a dense matrix, independent of the Dijkstra helper
    ids = topo.node_ids
    pos = {n: i for i, n in enumerate(ids)}
    d = np.full((len(ids), len(ids)), np.inf)
    np.fill_diagonal(d, 0.0)
    for link in topo.links:
        d[pos[link.a], pos[link.b]] = d[pos[link.b], pos[link.a]] = link.length_km
    for k in range(len(ids)):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    mean = d[np.triu_indices(len(ids), 1)].mean()
    assert np.isfinite(mean)
    assert lo <= mean <= hi
    assert topo.average_shortest_path_km() == pytest.approx(mean)
    for link in topo.links:
        assert math.fsum(link.spans) == pytest.approx(link.length_km)
        assert max(link.spans) <= 80.0


def test_bundled_unknown_name():
    with pytest.raises(KeyError):
        bundled_topology("mars")


def test_every_pair_connected():
    topo = bundled_topology("germany")
    assert nx.is_connected(topo.graph)


def test_path_helpers(triangle):
    assert triangle.path_links(("A", "B", "C")) == (triangle.link_index("A", "B"), triangle.link_index("C", "B"))
    assert triangle.path_length(("A", "B", "C")) == 2.0
    with pytest.raises(KeyError):
        make_topology(["A", "B", "C"], [("A", "B", 1), ("B", "C", 1)]).link_index("A", "C")


def test_demands_csv(tmp_path, two_node):
    p = tmp_path / "d.csv"
    p.write_text("src,dst,gbps\nA,B,400\n\nB,A,25.5\n")
    demands = load_demands(p, two_node)
    assert demands == [Demand("A", "B", 400.0), Demand("B", "A", 25.5)]
    q = tmp_path / "e.csv"
    with q.open("w", newline="") as fh:
        write_demands(demands, fh)
    assert load_demands(q) == demands


@pytest.mark.parametrize("body", ["A,A,10\n", "A,B,-3\n", "A,B\n", "A,Z,10\n", "A,B,abc\n"])
def test_demands_csv_errors(tmp_path, two_node, body):
    p = tmp_path / "d.csv"
    p.write_text(body)
    with pytest.raises(TopologyError):
        load_demands(p, two_node)


def test_channel_widths():
    assert [channel_width_ghz(sr) for sr in (35, 70, 105, 140)] == [37.5, 75.0, 112.5, 150.0]
    for sr in (35, 70, 105, 140):
        w = channel_width_ghz(sr)
        assert w / 12.5 == int(w / 12.5)
        assert w >= 1.05 * sr


def test_net_rates():
    table = {(c.modulation, c.symbol_rate_gbd): c.net_rate_gbps for c in config_grid()}
    assert [table["QPSK", sr] for sr in (35, 70, 105, 140)] == [100, 200, 300, 400]
    assert [table["16QAM", sr] for sr in (35, 70, 105, 140)] == [200, 400, 600, 800]
    assert [table["64QAM", sr] for sr in (35, 70, 105, 140)] == [300, 600, 900, 1200]
    assert net_rate_gbps(35, "QPSK") == 100.0


def test_config_grid_contents():
    grid = config_grid()
    assert len(grid) == 12 and len(set(grid)) == 12
    c = make_config(140, "64QAM")
    assert (c.penalty_db, c.slots, c.label) == (3.5, 12, "64QAM@140GBd")
    assert make_config(35, "QPSK").penalty_db == 1.0
    assert make_config(70, "16QAM").penalty_db == 2.0
    with pytest.raises(ValueError):
        make_config(50, "QPSK")
    with pytest.raises(ValueError):
        make_config(35, "8PSK")


def test_grid_size():
    assert N_SLOTS == 384


def test_scenarios():
    assert Scenario.sws().label == "sws"
    assert Scenario.flex(3.0).label == "flex_3dB"
    fixed = Scenario.fixed()
    assert (fixed.kind, fixed.penalty_db, fixed.lines, fixed.fsr_slots) == (ScenarioKind.FIXED_MWS, 1.0, 4, 12)
    assert Scenario("flex", 0.5).kind is ScenarioKind.FLEX_MWS


@pytest.mark.parametrize("kwargs", [
    dict(kind="flex", penalty_db=-1.0),
    dict(kind="flex", penalty_db=1.0, lines=1),
    dict(kind="fixed", penalty_db=1.0, fsr_ghz=100.0),
    dict(kind="fixed", penalty_db=1.0, fsr_ghz=155.0),
    dict(kind="sws", penalty_db=1.0),
])
def test_scenario_validation(kwargs):
    with pytest.raises(ValueError):
        Scenario(**kwargs)


def test_demand_validation():
    with pytest.raises(ValueError):
        Demand("A", "A", 10)
    with pytest.raises(ValueError):
        Demand("A", "B", 0)
