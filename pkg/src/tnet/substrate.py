"""Weighted node/edge substrate with activation dynamics and fixation.

Every element (node or edge) carries a long-term weight and a short-term
activation.  Weights grow when an element is credited, decay slowly when it
is not, and freeze structurally once they cross the fixation threshold: a
fixated element never decays below the threshold and its identity is
immutable.  Activation is fast currency — it rises when signals arrive and
fades multiplicatively every tick.

Signals are small signed integers in ``-3..3``; 0 means absence, negatives
inhibit.  A node receiving a signal gains activation in proportion to its own
weight; a firing node emits along every out-edge; edges relay with one tick
of latency, scaling by their own weight and activation.  A signal returned
against the direction it arrived from attenuates by a floor rule, which is
what guarantees that echoes in cyclic topologies die out.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .errors import FixationError, TopologyError

SIGNAL_MAX = 3


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass
class Params:
    """Global update constants.

    ``dw``            weight credit per observation
    ``boost``         multiplier for contextually supported credits
    ``decay_w``       per-tick weight loss for uncredited, non-fixated elements
    ``theta``         fixation threshold (and post-fixation floor)
    ``beta``          geometric falloff for credits beyond the threshold
    ``w_max``/``a_max`` hard ceilings for weight / activation
    ``decay_a``       multiplicative activation loss per tick
    ``back_factor``   attenuation for signals returned against arrival direction
    ``reset_factor``  fraction of above-threshold excess shed at nightly reset
    ``fire_threshold`` activation needed to fire in deterministic mode
    """

    dw: float = 0.4
    boost: float = 2.0
    decay_w: float = 0.005
    theta: float = 1.0
    beta: float = 0.5
    w_max: float = 3.0
    a_max: float = 1.0
    decay_a: float = 0.2
    back_factor: float = 0.5
    reset_factor: float = 0.8
    fire_threshold: float = 0.5

    def __post_init__(self) -> None:
        if not (0.0 < self.theta <= self.w_max):
            raise ValueError("theta must lie in (0, w_max]")
        for name in ("beta", "back_factor", "reset_factor", "decay_a"):
            if not (0.0 < getattr(self, name) < 1.0):
                raise ValueError(f"{name} must lie in (0, 1)")
        if not (0.0 < self.fire_threshold <= self.a_max):
            raise ValueError("fire_threshold must lie in (0, a_max]")
        for name in ("dw", "boost", "decay_w", "w_max", "a_max"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")


class NodeKind(Enum):
    PLAIN = "plain"
    SENSORY = "sensory"
    CHUNK = "chunk"
    REWARD = "reward"
    EFFECTOR = "effector"


class FiringMode(Enum):
    DETERMINISTIC = "deterministic"
    STOCHASTIC = "stochastic"


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

@dataclass
class Element:
    weight: float = 0.0
    activation: float = 0.0
    fixated: bool = False
    above_credits: int = 0      # credits received while at/above theta
    credited_tick: int = -1     # last tick this element was credited


@dataclass
class Node(Element):
    id: str = ""
    kind: NodeKind = NodeKind.PLAIN
    last_fired: int = -10**9


@dataclass
class Edge(Element):
    src: str = ""
    dst: str = ""

    @property
    def id(self) -> str:
        return f"{self.src}->{self.dst}"


@dataclass
class Event:
    """One line of the run log: what happened to which element, when."""
    tick: int
    kind: str           # fire | relay | deliver | update | reset
    element: str
    value: float


# ---------------------------------------------------------------------------
# signal arithmetic (module-level so tests can probe the formulas directly)
# ---------------------------------------------------------------------------

def clamp_signal(value: int) -> int:
    if value > SIGNAL_MAX:
        return SIGNAL_MAX
    if value < -SIGNAL_MAX:
        return -SIGNAL_MAX
    return value


def activation_gain(signal: int, weight: float, p: Params) -> float:
    """Activation delta for an element of the given weight receiving ``signal``."""
    return signal * (0.2 + 0.3 * weight / p.w_max) / 3.0


def signal_out(signal: int, weight: float, activation: float, p: Params) -> int:
    """Signal re-emitted by a firing element (node or relaying edge).

    Magnitude scales with weight and activation but is floored at 1: a firing
    element always says *something*; sign is preserved.
    """
    if signal == 0:
        return 0
    mag = abs(signal) * (0.5 + 0.5 * weight / p.w_max) * (0.5 + 0.5 * activation / p.a_max)
    mag = max(1, min(SIGNAL_MAX, round(mag)))
    return mag if signal > 0 else -mag


def signal_back(signal: int, p: Params) -> int:
    """Attenuated strength for the return direction; reaches 0 within few hops."""
    mag = math.floor(abs(signal) * p.back_factor)
    return mag if signal > 0 else -mag


def counter_uniform(seed: int, element: str, tick: int) -> float:
    """Deterministic uniform in [0, 1) keyed by (seed, element, tick).

    Hash-based rather than generator-based so draws are independent of
    iteration order and stable under replay and parallel sweeps.
    """
    digest = hashlib.blake2b(f"{seed}:{element}:{tick}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2**64


# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------

class Network:
    """Sparse directed graph of weighted nodes and edges.

    Adjacency is dict-of-dict (``out[src][dst]``) with a mirrored reverse
    index; both point at the same :class:`Edge` objects.  Creating a directed
    edge always creates its reciprocal at weight 0, so traversal code can
    assume reverse reachability and filter by positive weight when it wants
    only strengthened links.
    """

    def __init__(self, params: Params | None = None, *, seed: int = 0,
                 mode: FiringMode = FiringMode.DETERMINISTIC) -> None:
        self.params = params if params is not None else Params()
        self.seed = seed
        self.mode = mode
        self.tick_count = 0
        self.nodes: dict[str, Node] = {}
        self.out: dict[str, dict[str, Edge]] = {}
        self.inc: dict[str, dict[str, Edge]] = {}
        # relays in flight: (edge, strength, against_arrival)
        self._relays: list[tuple[Edge, int, bool]] = []

    # -- topology ----------------------------------------------------------

    def add_node(self, node_id: str, kind: NodeKind = NodeKind.PLAIN) -> Node:
        if node_id in self.nodes:
            raise TopologyError(f"node {node_id!r} already exists")
        node = Node(id=node_id, kind=kind)
        self.nodes[node_id] = node
        self.out[node_id] = {}
        self.inc[node_id] = {}
        return node

    def ensure_node(self, node_id: str, kind: NodeKind = NodeKind.PLAIN) -> Node:
        node = self.nodes.get(node_id)
        return node if node is not None else self.add_node(node_id, kind)

    def has_node(self, node_id: str) -> bool:
        return node_id in self.nodes

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise TopologyError(f"no node {node_id!r}") from None

    def ensure_edge(self, src: str, dst: str) -> Edge:
        """Return the src→dst edge, creating it and its weight-0 reciprocal."""
        if src not in self.nodes or dst not in self.nodes:
            raise TopologyError(f"edge endpoints must exist: {src!r} -> {dst!r}")
        if src == dst:
            raise TopologyError(f"self-edge rejected: {src!r}")
        edge = self.out[src].get(dst)
        if edge is None:
            edge = Edge(src=src, dst=dst)
            self.out[src][dst] = edge
            self.inc[dst][src] = edge
            if src not in self.out[dst]:
                back = Edge(src=dst, dst=src)
                self.out[dst][src] = back
                self.inc[src][dst] = back
        return edge

    def edge(self, src: str, dst: str) -> Edge:
        try:
            return self.out[src][dst]
        except KeyError:
            raise TopologyError(f"no edge {src!r} -> {dst!r}") from None

    def has_edge(self, src: str, dst: str) -> bool:
        return src in self.out and dst in self.out[src]

    def out_edges(self, src: str, *, positive: bool = False) -> dict[str, Edge]:
        edges = self.out.get(src)
        if edges is None:
            raise TopologyError(f"no node {src!r}")
        if positive:
            return {dst: e for dst, e in edges.items() if e.weight > 0.0}
        return dict(edges)

    def in_edges(self, dst: str, *, positive: bool = False) -> dict[str, Edge]:
        edges = self.inc.get(dst)
        if edges is None:
            raise TopologyError(f"no node {dst!r}")
        if positive:
            return {src: e for src, e in edges.items() if e.weight > 0.0}
        return dict(edges)

    def edges(self) -> Iterator[Edge]:
        for adjacency in self.out.values():
            yield from adjacency.values()

    def elements(self) -> Iterable[Element]:
        yield from self.nodes.values()
        yield from self.edges()

    # -- weight and activation updates ------------------------------------

    def update_weight(self, element: Element, *, boost: bool = False) -> float:
        """Credit one element and return its new weight.

        Below the threshold the credit is ``dw`` (times the boost multiplier
        when contextually supported); crossing the threshold fixates the
        element permanently.  At or above the threshold credits follow the
        diminishing schedule ``dw * beta^k`` for the k-th such credit
        (k = 1, 2, ...), ignoring boost.  A credited element skips weight
        decay this tick.
        """
        p = self.params
        if element.weight >= p.theta:
            element.above_credits += 1
            element.weight = min(p.w_max,
                                 element.weight + p.dw * p.beta ** element.above_credits)
        else:
            step = p.dw * (p.boost if boost else 1.0)
            element.weight = min(p.w_max, element.weight + step)
            if element.weight >= p.theta:
                element.fixated = True
        element.credited_tick = self.tick_count
        return element.weight

    def transfer_weight(self, element: Element, weight: float) -> None:
        """Overwrite a non-fixated element's weight (trace rewriting)."""
        if element.fixated:
            raise FixationError("fixated elements are immutable")
        element.weight = min(self.params.w_max, max(0.0, weight))

    def bump_activation(self, element: Element, value: int) -> bool:
        """Apply one signal to an element's activation; True if it rose."""
        p = self.params
        before = element.activation
        a = before + activation_gain(clamp_signal(value), element.weight, p)
        element.activation = min(p.a_max, max(0.0, a))
        return element.activation > before

    def apply_signal(self, node_id: str, value: int) -> bool:
        return self.bump_activation(self.node(node_id), value)

    # -- firing ------------------------------------------------------------

    def fires(self, node: Node) -> bool:
        if self.mode is FiringMode.DETERMINISTIC:
            return node.activation >= self.params.fire_threshold
        draw = counter_uniform(self.seed, node.id, self.tick_count)
        return draw < node.activation / self.params.a_max

    # -- the tick pipeline -------------------------------------------------

    def tick(self, external: Mapping[str, int] | None = None) -> list[Event]:
        """One global step, in fixed phase order.

        1. relays queued last tick deliver — scaled by the edge, or cut by
           the attenuation floor when the signal runs against its arrival
           direction or lands on an already-firing node (echo) — then
           external signals land on sensory nodes; activations update;
        2. nodes fire — deterministically by threshold, or with probability
           equal to relative activation;
        3. every firing node emits along each of its out-edges; those relays
           are queued and land next tick;
        4. every element whose activation rose this tick is credited; edge
           credits into a fixated destination carry the matched-context boost;
        5. decay: uncredited non-fixated weights shrink, all activations fade.
        """
        p = self.params
        events: list[Event] = []
        tick = self.tick_count

        inbox: dict[str, int] = {}
        arrived_from: dict[str, set[str]] = {}
        rose: list[Element] = []

        for edge, strength, against in self._relays:
            # Delivering into a node that is already at firing level is an
            # echo (returning or redundant drive): attenuate by the floor
            # rule.  This is what makes waves in directed cycles die out.
            echo = against or self.nodes[edge.dst].activation >= p.fire_threshold
            out = signal_back(strength, p) if echo else signal_out(
                strength, edge.weight, edge.activation, p)
            if out == 0:
                continue
            if self.bump_activation(edge, out):
                rose.append(edge)
            events.append(Event(tick, "relay", edge.id, out))
            inbox[edge.dst] = clamp_signal(inbox.get(edge.dst, 0) + out)
            arrived_from.setdefault(edge.dst, set()).add(edge.src)
        self._relays = []

        if external:
            for node_id, value in external.items():
                node = self.node(node_id)
                if node.kind is not NodeKind.SENSORY:
                    raise TopologyError(f"external input to non-sensory node {node_id!r}")
                if not isinstance(value, int) or abs(value) > SIGNAL_MAX:
                    raise TopologyError(f"signal {value!r} outside -3..3")
                inbox[node_id] = clamp_signal(inbox.get(node_id, 0) + value)

        for node_id, value in inbox.items():
            node = self.nodes[node_id]
            if self.bump_activation(node, value):
                rose.append(node)
            events.append(Event(tick, "deliver", node_id, value))

        fired: list[Node] = []
        for node in self.nodes.values():
            if node.activation > 0.0 and self.fires(node):
                fired.append(node)

        for node in fired:
            drive = inbox.get(node.id, 0)
            if drive == 0:
                # firing on residual activation alone: emit what the
                # activation itself is worth
                drive = max(1, round(SIGNAL_MAX * node.activation / p.a_max))
            emitted = signal_out(drive, node.weight, node.activation, p)
            events.append(Event(tick, "fire", node.id, emitted))
            came_from = arrived_from.get(node.id, ())
            for dst, edge in self.out[node.id].items():
                self._relays.append((edge, emitted, dst in came_from))
            node.last_fired = tick

        for element in rose:
            boost = isinstance(element, Edge) and self.nodes[element.dst].fixated
            new_w = self.update_weight(element, boost=boost)
            events.append(Event(tick, "update", element.id, new_w))

        self.end_tick()
        return events

    def end_tick(self) -> None:
        """Decay phase: uncredited non-fixated weights shrink, activations fade."""
        p = self.params
        tick = self.tick_count
        for element in self.elements():
            if not element.fixated and element.weight > 0.0 and element.credited_tick != tick:
                element.weight = max(0.0, element.weight - p.decay_w)
            if element.activation > 0.0:
                element.activation *= (1.0 - p.decay_a)
        self.tick_count += 1

    def quiescent(self) -> bool:
        """True when nothing is in flight and nothing can fire."""
        if self._relays:
            return False
        return all(n.activation < self.params.fire_threshold for n in self.nodes.values())

    def nightly_reset(self) -> list[Event]:
        """Sleep consolidation: shed above-threshold excess, clear activations.

        Weights above theta relax toward it by ``reset_factor`` of the excess;
        the diminishing-credit counters restart so consolidated elements can
        strengthen again.
        """
        p = self.params
        events: list[Event] = []
        for element in self.elements():
            if element.weight > p.theta:
                element.weight = element.weight - (element.weight - p.theta) * p.reset_factor
                element.above_credits = 0
                events.append(Event(self.tick_count, "reset", element.id, element.weight))
        for element in self.elements():
            element.activation = 0.0
        return events
