
import pytest

from cerebro.analysis import GeneratorParams, generate_synthetic_scan
from cerebro.errors import UnknownEdge
from cerebro.flow import compute_flow, edge_depths, flow_color
from cerebro.swc import SegmentForest, SwcRecord, parse_swc
from cerebro.vessel import classify_arteries, contract_chains, reconstruct_cow


def network_for(text):
    return classify_arteries(contract_chains(parse_swc(text)))


def test_unbranched_chain_carries_unit_flow():
    network = network_for(
        "1 2 0 0 0 1.0 -1\n2 2 0 1 0 1.0 1\n3 2 0 2 0 1.0 2\n"
    )
    fa = compute_flow(network)
    assert list(fa.flows.values()) == [1.0]


def test_symmetric_bifurcation_splits_exactly_in_half():
    forest, _ = generate_synthetic_scan(12, GeneratorParams(symmetric=True))
    network = classify_arteries(contract_chains(forest))
    fa = compute_flow(network)
    kids = network.graph.child_edges(network.ba_bifurcation)
    assert [fa.flows[k] for k in kids] == [0.5, 0.5]


def test_radius_ratio_two_to_one():
    # children at equal depth with mean radii 2 and 1: the first link of each
    # child chain is negligibly short, so the shared bifurcation segment
    # contributes nothing to the means
    eps = 1e-9
    text = (
        "1 2 0 0 0 1.0 -1\n"
        "2 2 0 1 0 1.0 1\n"
        "3 2 0 2 0 1.0 2\n"
        f"4 2 {eps} 2 0 2.0 3\n"
        "5 2 2 4 0 2.0 4\n"
        f"6 2 {-eps} 2 0 1.0 3\n"
        "7 2 -2 4 0 1.0 6\n"
    )
    network = network_for(text)
    fa = compute_flow(network)
    graph = network.graph
    wide, narrow = graph.child_edges(3)
    # direct formula: shares proportional to mean radius at equal depth
    m_w = graph.edges[wide].mean_radius
    m_n = graph.edges[narrow].mean_radius
    assert fa.flows[wide] == m_w / (m_w + m_n)
    assert fa.flows[narrow] == m_n / (m_w + m_n)
    assert fa.flows[wide] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert fa.flows[narrow] == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_blockage_zeroes_subtree_and_leaves_rest_identical(network0):
    graph = network0.graph
    baseline = compute_flow(network0)
    target = network0.cerebral_trees["MCA_R"].edge_ids[0]
    blocked = compute_flow(network0, {target})
    zeroed = set(graph.descendant_edges(target))
    for eid, value in baseline.flows.items():
        if eid in zeroed:
            assert blocked.flows[eid] == 0.0
        else:
            assert blocked.flows[eid] == value  # exact, not approximate


def test_conservation_and_budget(network0):
    graph = network0.graph
    fa = compute_flow(network0)
    for node, kids in graph.node_child_edges.items():
        kids = [k for k in kids if not graph.edges[k].dashed]
        parent = graph.node_parent_edge.get(node)
        if parent is None or len(kids) < 2:
            continue
        assert abs(sum(fa.flows[k] for k in kids) - fa.flows[parent]) < 1e-12
    leaves = [
        e
        for e in fa.flows
        if not [
            k
            for k in graph.node_child_edges.get(graph.edges[e].far_node, [])
            if not graph.edges[k].dashed
        ]
    ]
    assert abs(sum(fa.flows[l] for l in leaves) - 1.0) < 1e-9


def test_monotone_dilution(network0):
    graph = network0.graph
    fa = compute_flow(network0)
    for eid, value in fa.flows.items():
        parent = graph.node_parent_edge.get(graph.edges[eid].near_node)
        if parent is not None and parent in fa.flows:
            assert value <= fa.flows[parent] + 1e-15


def test_ring_edges_have_depth_zero(network0):
    depths = edge_depths(network0)
    for eid in network0.cow_cycle:
        if not network0.graph.edges[eid].dashed:
            assert depths[eid] == 0
    for label in ("BA", "IC_L", "IC_R"):
        assert depths[network0.inflow_edges[label]] == 0
    for label, tree in network0.cerebral_trees.items():
        root_edges = network0.tree_child_edges(label, tree.attachment_node)
        for eid in root_edges:
            assert depths[eid] == 1


def test_dashed_edges_carry_no_flow(network0):
    fa = compute_flow(network0)
    for eid in network0.dashed_edges():
        assert eid not in fa.flows


def test_unknown_blocked_edge(network0):
    with pytest.raises(UnknownEdge):
        compute_flow(network0, {10 ** 9})


def test_metric_height_divisor(network0):
    fa = compute_flow(network0, divisor="height")
    assert abs(sum(
        v for e, v in fa.flows.items()
        if not [
            k
            for k in network0.graph.node_child_edges.get(network0.graph.edges[e].far_node, [])
            if not network0.graph.edges[k].dashed
        ]
    ) - 1.0) < 1e-9


def test_flow_color_endpoints_and_midpoint():
    base = (40, 90, 180)
    assert flow_color(0.0, 1.0, base) == (255, 255, 255)
    assert flow_color(1.0, 1.0, base) == base
    mid = flow_color(0.5, 1.0, base)
    expected = tuple(round(255 + (c - 255) * 0.5) for c in base)
    assert mid == expected


def test_flow_color_clamps():
    base = (10, 20, 30)
    assert flow_color(-1.0, 1.0, base) == (255, 255, 255)
    assert flow_color(2.0, 1.0, base) == base
