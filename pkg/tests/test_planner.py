"""Planner tests: propagation arithmetic, decision policies, plans, queries."""

from __future__ import annotations

import pytest

from tnet.errors import TopologyError
from tnet.planner import (
    Decision,
    PathQuery,
    PlannerParams,
    causal_strength,
    decide,
    generalize,
    plan,
    propagate,
)
from tnet.substrate import FiringMode, Network, NodeKind, Params


def feeder(w_max: float = 1.0) -> Network:
    """Two-course feeder: short weak path A-B-C, longer strong path A-D-E.

    Node weights sit at w_max so hop attenuation is purely edge-driven;
    reciprocals carry the same weight as their forward edges.
    """
    net = Network(Params(w_max=w_max), seed=0)
    for nid in "ABCDE":
        net.add_node(nid)
    net.add_node("feed", NodeKind.EFFECTOR)
    net.add_node("food", NodeKind.REWARD)
    for node in net.nodes.values():
        node.weight = w_max
        node.fixated = True
    for src, dst, w in [("A", "B", 0.9), ("B", "C", 0.8), ("C", "feed", 0.2),
                        ("A", "D", 0.5), ("D", "E", 0.8), ("E", "feed", 0.9),
                        ("feed", "food", w_max)]:
        edge = net.ensure_edge(src, dst)
        edge.weight = w
        edge.fixated = True
        back = net.edge(dst, src)
        back.weight = w
        back.fixated = True
    return net


QUERY = PathQuery("A", "food")


# ---------------------------------------------------------------------------
# parameters and propagation
# ---------------------------------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        PlannerParams(t_act=0.0)
    with pytest.raises(ValueError):
        PlannerParams(max_rounds=0)
    with pytest.raises(ValueError):
        PlannerParams(source_strength=4)


def test_propagate_requires_known_nodes_and_rounds():
    net = feeder()
    with pytest.raises(TopologyError):
        propagate(net, PathQuery("A", "ghost"), 1)
    with pytest.raises(ValueError):
        propagate(net, QUERY, 0)


def test_single_chain_forward_pass():
    net = Network(Params(), seed=0)
    for nid in ("A", "B", "G"):
        node = net.add_node(nid)
        node.weight = net.params.w_max
        node.fixated = True
    for s, d in (("A", "B"), ("B", "G")):
        edge = net.ensure_edge(s, d)
        edge.weight = net.params.w_max
        edge.fixated = True
    acts = propagate(net, PathQuery("A", "G"), 1)
    # full-weight chain: B receives the entire drive undiminished
    assert acts["B"] == pytest.approx(1.0 / 3.0)
    assert acts["G"] == pytest.approx(1.0 / 3.0)


def test_feeder_forward_pass_favors_heavier_first_hop():
    acts = propagate(feeder(), QUERY, 1)
    assert acts["B"] > acts["D"]
    assert acts["B"] == pytest.approx(0.3192, abs=1e-4)
    assert acts["D"] == pytest.approx(0.2012, abs=1e-4)


def test_feeder_backward_pass_flips_the_ranking():
    acts = propagate(feeder(), QUERY, 2)
    assert acts["D"] > acts["B"]
    assert acts["B"] == pytest.approx(0.3725, abs=1e-4)
    assert acts["D"] == pytest.approx(0.4412, abs=1e-4)


def test_backward_flow_is_absorbed_at_the_source():
    # without source absorption, value returning through A re-enters the
    # B branch (food-feed-E-D-A-B) and inflates B past D
    net = feeder()
    acts = propagate(net, QUERY, 2)
    assert acts["B"] < 0.44


def test_priming_seeds_propagation():
    net = feeder()
    net.node("B").activation = 0.5
    acts = propagate(net, QUERY, 1)
    assert acts["B"] == pytest.approx(0.5 + 0.3192, abs=1e-4)


# ---------------------------------------------------------------------------
# decisions
# ---------------------------------------------------------------------------

def test_low_threshold_is_impulsive():
    d = decide(feeder(), QUERY, "absolute", PlannerParams(t_act=0.25))
    assert d == Decision(chosen="B", rounds_used=1)


def test_high_threshold_deliberates_to_the_better_path():
    d = decide(feeder(), QUERY, "absolute", PlannerParams(t_act=0.4))
    assert d == Decision(chosen="D", rounds_used=2)


def test_unreachable_threshold_returns_none():
    assert decide(feeder(), QUERY, "absolute",
                  PlannerParams(t_act=0.999, max_rounds=6)) is None


def test_relative_policy_fires_once_separated():
    # the feeder's first forward pass already separates B from D by ~0.118
    d = decide(feeder(), QUERY, "relative", PlannerParams(t_rel=0.1))
    assert d == Decision(chosen="B", rounds_used=1)


def test_relative_policy_waits_for_slow_separation():
    # candidates pull apart a little more each forward pass; a gap too small
    # for round 1 resolves after more rounds
    net = Network(Params(w_max=1.0), seed=0)
    for nid in ("S", "X", "Y", "G"):
        net.add_node(nid).weight = 1.0
    for s, d, w in (("S", "X", 0.3), ("S", "Y", 0.2),
                    ("X", "G", 1.0), ("Y", "G", 1.0)):
        net.ensure_edge(s, d).weight = w
    d = decide(net, PathQuery("S", "G"), "relative",
               PlannerParams(t_rel=0.08, max_rounds=20))
    assert d is not None
    assert d.chosen == "X"
    assert d.rounds_used > 1


def test_symmetric_paths_withhold_under_relative_policy():
    net = Network(Params(), seed=0)
    for nid in ("S", "X", "Y", "G"):
        node = net.add_node(nid)
        node.weight = net.params.w_max
        node.fixated = True
    for s, d in (("S", "X"), ("S", "Y"), ("X", "G"), ("Y", "G")):
        edge = net.ensure_edge(s, d)
        edge.weight = 1.5
        edge.fixated = True
        net.edge(d, s).weight = 1.5
    assert decide(net, PathQuery("S", "G"), "relative",
                  PlannerParams(t_rel=0.1, max_rounds=8)) is None


def test_exact_tie_withholds_deterministically_but_draws_stochastically():
    def tie_net(mode):
        net = Network(Params(), seed=3, mode=mode)
        for nid in ("S", "X", "Y", "G"):
            node = net.add_node(nid)
            node.weight = net.params.w_max
            node.fixated = True
        for s, d in (("S", "X"), ("S", "Y"), ("X", "G"), ("Y", "G")):
            edge = net.ensure_edge(s, d)
            edge.weight = net.params.w_max
            edge.fixated = True
            net.edge(d, s).weight = net.params.w_max
        return net

    det = decide(tie_net(FiringMode.DETERMINISTIC), PathQuery("S", "G"),
                 "absolute", PlannerParams(t_act=0.3))
    assert det is None
    sto = decide(tie_net(FiringMode.STOCHASTIC), PathQuery("S", "G"),
                 "absolute", PlannerParams(t_act=0.3))
    assert sto is not None and sto.chosen in ("X", "Y")


def test_urgency_weakly_decreases_rounds():
    rounds = []
    for strength in (1, 2, 3):
        d = decide(feeder(), QUERY, "absolute",
                   PlannerParams(t_act=0.4, source_strength=strength))
        assert d is not None
        rounds.append(d.rounds_used)
    assert all(b <= a for a, b in zip(rounds, rounds[1:]))


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

def test_plan_chains_to_goal_adjacent_effector():
    assert plan(feeder(), QUERY, PlannerParams(t_act=0.35)) == ["D", "E", "feed"]


def test_plan_empty_when_goal_is_source_or_unreachable():
    net = feeder()
    assert plan(net, PathQuery("A", "A"), PlannerParams(t_act=0.35)) == []
    island = net.add_node("island")
    island.weight = net.params.w_max
    assert plan(net, PathQuery("A", "island"), PlannerParams(t_act=0.35)) == []


def test_every_nonempty_plan_ends_at_effector_with_goal_edge():
    net = feeder()
    hops = plan(net, QUERY, PlannerParams(t_act=0.35))
    assert hops
    last = net.node(hops[-1])
    assert last.kind is NodeKind.EFFECTOR
    assert net.edge(hops[-1], "food").weight > 0.0


# ---------------------------------------------------------------------------
# generalization and causal queries
# ---------------------------------------------------------------------------

def shared_out_net() -> Network:
    net = Network(Params(), seed=0)
    for nid in ("A", "B", "E", "F", "G", "X"):
        net.add_node(nid)
    for s, d in (("A", "E"), ("A", "F"), ("A", "G"), ("A", "X"),
                 ("B", "E"), ("B", "F"), ("B", "G")):
        net.ensure_edge(s, d).weight = 1.0
    return net


def test_generalize_adds_missing_shared_edge():
    net = shared_out_net()
    added = generalize(net, overlap_min=3)
    assert ("B", "X") in added
    assert net.edge("B", "X").weight == pytest.approx(net.params.dw)
    assert net.edge("X", "B").weight == 0.0    # reciprocal at rest


def test_generalize_threshold_and_idempotence():
    net = shared_out_net()
    assert generalize(net, overlap_min=5) == []
    generalize(net, overlap_min=3)
    assert generalize(net, overlap_min=3) == []


def test_causal_strength_hand_values():
    net = Network(Params(w_max=3.0), seed=0)
    for nid in ("act", "var", "out"):
        net.add_node(nid)
    net.ensure_edge("act", "out").weight = 2.7
    net.ensure_edge("var", "out").weight = 0.3
    assert causal_strength(net, "act", "var", "out") == pytest.approx(0.8)
    assert causal_strength(net, "act", "act", "out") == pytest.approx(0.0)
    # missing edges count as zero weight
    assert causal_strength(net, "out", "act", "var") == pytest.approx(0.0)
