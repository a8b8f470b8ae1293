"""Chunker tests: decomposition, allocation, matching, and stream behavior."""

from __future__ import annotations

import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tnet.chunker import (
    Chunker,
    ChunkerParams,
    allocate_chunk_node,
    decompose_units,
    find_candidates,
    match,
    observe_pair,
    order_variants,
)
from tnet.errors import TopologyError
from tnet.substrate import Network, NodeKind, Params


def make_net(**overrides) -> Network:
    return Network(Params(**overrides), seed=0)


def run_stream(stream: str, **param_overrides) -> Chunker:
    net = make_net(**param_overrides)
    chunker = Chunker(net, ChunkerParams())
    chunker.observe_stream(stream)
    return chunker


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def test_params_invariants():
    with pytest.raises(ValueError):
        ChunkerParams(l_min=1)
    with pytest.raises(ValueError):
        ChunkerParams(buffer_len=3, l_min=2)


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

def test_decompose_shares_suffix_block():
    d = decompose_units("98136", "28136", l_min=2)
    assert d is not None
    assert d.shared == ("136",)
    assert set(d.blocks_a) == {"98", "136"}
    assert set(d.blocks_b) == {"28", "136"}


def test_decompose_rejects_short_residue():
    # sharing "8136" would strand single-symbol residues; it must lose to "136"
    d = decompose_units("98136", "28136", l_min=2)
    assert "8136" not in d.shared


def test_decompose_identical_spans_stay_whole():
    d = decompose_units("98136", "98136", l_min=2)
    assert d.shared == ("98136",)
    assert d.blocks_a == ("98136",)


def test_decompose_disjoint_spans_returns_none():
    assert decompose_units("abab", "cdcd", l_min=2) is None


def test_decompose_prefers_longer_shared_total():
    d = decompose_units("abcdef", "zzabcdef", l_min=2)
    assert d is not None
    assert d.shared_length == 6


@given(text=st.text(alphabet="abc", min_size=2, max_size=8))
@settings(max_examples=50)
def test_decompose_self_is_total(text):
    d = decompose_units(text, text, l_min=2)
    assert d is not None
    assert d.shared_length == len(text)


# ---------------------------------------------------------------------------
# chunk allocation
# ---------------------------------------------------------------------------

def test_allocate_creates_member_edges():
    net = make_net()
    for sym in "ab":
        net.add_node(sym, NodeKind.SENSORY)
    label = allocate_chunk_node(net, ["a", "b"], "ab")
    assert net.node(label).kind is NodeKind.CHUNK
    assert net.has_edge("a", "ab")
    assert net.has_edge("b", "ab")
    assert net.has_edge("ab", "a")   # reciprocal


def test_allocate_is_idempotent():
    net = make_net()
    for sym in "ab":
        net.add_node(sym, NodeKind.SENSORY)
    allocate_chunk_node(net, ["a", "b"], "ab")
    node = net.node("ab")
    node.weight = 0.9
    allocate_chunk_node(net, ["a", "b"], "ab")
    assert net.node("ab").weight == pytest.approx(0.9)


def test_allocate_rejects_empty_and_stale_groups():
    net = make_net()
    for sym in "ab":
        net.add_node(sym, NodeKind.SENSORY)
    with pytest.raises(TopologyError):
        allocate_chunk_node(net, [], "x")
    with pytest.raises(TopologyError):
        allocate_chunk_node(net, ["a", "b"], "ab", member_ticks=[0, 10],
                            window_coact=3)


# ---------------------------------------------------------------------------
# candidate scoring and matching
# ---------------------------------------------------------------------------

def test_find_candidates_orders_by_weight_then_count():
    net = make_net()
    chunk = net.add_node("ab", NodeKind.CHUNK)
    chunk.weight = 1.0
    cands = find_candidates("abccdccd", net, l_min=2)
    by_pattern = {c.pattern: c for c in cands}
    assert "ab" in by_pattern and by_pattern["ab"].matched_weight == 1.0
    assert cands[0].pattern == "ab"           # weight beats occurrences
    assert by_pattern["ccd"].occurrences == 2


def test_match_ranks_exact_over_partial():
    net = make_net()
    for label in ("abcd", "abzz"):
        node = net.add_node(label, NodeKind.CHUNK)
        node.weight = 1.0
    ranked = match(net, "abcd")
    assert ranked[0][0] == "abcd"
    assert ranked[0][1] > ranked[1][1]


def test_match_priming_carries_to_next_call():
    net = make_net()
    for label in ("abcd", "abzz"):
        node = net.add_node(label, NodeKind.CHUNK)
        node.weight = 1.0
    match(net, "ab")                      # primes both equally
    net.node("abzz").activation = 0.9     # strong explicit prime
    ranked = match(net, "abcd")
    assert ranked[0][0] == "abzz"         # prior activation wins the tie-break


# ---------------------------------------------------------------------------
# serial order variants
# ---------------------------------------------------------------------------

def test_order_variants_created_once():
    net = make_net()
    net.add_node("a")
    net.add_node("b")
    sim, ab, ba = order_variants(net, "a", "b")
    assert (sim, ab, ba) == ("a+b", "a>b", "b>a")
    assert order_variants(net, "a", "b") == (sim, ab, ba)
    with pytest.raises(TopologyError):
        order_variants(net, "a", "a")


def test_pure_order_fixates_directional_variant_first():
    net = make_net()
    net.add_node("a")
    net.add_node("b")
    for _ in range(3):
        observe_pair(net, "a", "b", "ab")
    assert net.node("a>b").fixated
    assert not net.node("a+b").fixated
    assert not net.node("b>a").fixated


def test_balanced_orders_fixate_simultaneous_variant_first():
    net = make_net()
    net.add_node("a")
    net.add_node("b")
    for order in ("ab", "ba", "ab", "ba"):
        observe_pair(net, "a", "b", order)
    assert net.node("a+b").fixated
    assert not net.node("a>b").fixated
    assert not net.node("b>a").fixated


# ---------------------------------------------------------------------------
# stream behavior
# ---------------------------------------------------------------------------

def test_plain_repetition_forms_single_chunk():
    chunker = run_stream("756756756")
    assert chunker.fixated_chunks() == {"756"}
    assert chunker.net.node("756").weight == pytest.approx(1.2)


def test_one_pass_leaves_no_permanent_trace():
    chunker = run_stream("75648361")
    net = chunker.net
    assert chunker.fixated_chunks() == set()
    for _ in range(200):
        net.end_tick()
    assert all(e.weight == 0.0 for e in net.elements() if not e.fixated)


def test_known_parts_split_composite():
    # pre-train "back" and "pack" as fixated chunks, then hear "backpack"
    net = make_net()
    chunker = Chunker(net, ChunkerParams())
    chunker.observe_stream("back" * 3)
    chunker.observe_stream("pack" * 3)
    assert {"back", "pack"} <= chunker.fixated_chunks()
    chunker.observe_stream("backpack" * 3)
    assert "backpack" not in chunker.fixated_chunks()
    assert net.edge("back", "pack").weight > 0.0


def test_unknown_composite_chunks_whole():
    chunker = run_stream("backpackbackpackbackpack")
    assert "backpack" in chunker.fixated_chunks()


def test_buffer_respects_window():
    net = make_net()
    chunker = Chunker(net, ChunkerParams(buffer_len=8))
    chunker.observe_stream(string.ascii_lowercase)
    assert len(chunker.buffer_text()) <= 8


def test_events_are_logged_with_ticks():
    chunker = run_stream("756756756")
    assert chunker.events
    ticks = [t for t, _, _, _ in chunker.events]
    assert ticks == sorted(ticks)
    kinds = {k for _, k, _, _ in chunker.events}
    assert "chunk" in kinds


@given(stream=st.text(alphabet="abcd", min_size=0, max_size=60))
@settings(max_examples=40, deadline=None)
def test_arbitrary_streams_never_crash(stream):
    chunker = run_stream(stream)
    assert len(chunker.buffer_text()) <= chunker.cp.buffer_len
    # every fixated chunk is at least l_min long and at/above theta
    for label in chunker.fixated_chunks():
        assert len(label) >= chunker.cp.l_min
        assert chunker.net.node(label).weight >= chunker.net.params.theta
