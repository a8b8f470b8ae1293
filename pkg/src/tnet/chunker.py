"""Online stream segmentation: working-memory buffering and chunk formation.

The chunker watches a symbol stream through a small sliding window and grows
chunk nodes in the network three ways:

* a span that repeats inside the window matures into a chunk once the stream
  stops extending it (repeat tracking);
* a span that walks a known chunk's label commits that chunk the moment the
  match completes (prefix matching), and a partial match against a still-
  plastic trace splits the trace into matched prefix and remainder;
* when a run of never-seen symbols confirms that a data era has ended, the
  spans left between committed chunks are consolidated: co-resident units
  that tile into shared blocks are decomposed (the back/pack effect), the
  rest are chunked whole, and the era's chunk-to-chunk transitions are
  credited as sequence edges.

Weight bookkeeping rides on the substrate: every credit is an
``update_weight`` call, every tick ends with the standard decay phase, so
segmentation competes against forgetting exactly like everything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import TopologyError
from .substrate import Network, Node, NodeKind

# ---------------------------------------------------------------------------
# parameters and small records
# ---------------------------------------------------------------------------


@dataclass
class ChunkerParams:
    """Working-memory constants.

    ``buffer_len``    sliding-window size W, in symbols
    ``l_min``         minimum chunk length; shorter spans are never chunked
    ``window_coact``  max tick gap between consecutive members for them to
                      count as co-activated at chunk allocation
    """

    buffer_len: int = 24
    l_min: int = 2
    window_coact: int = 3

    def __post_init__(self) -> None:
        if self.l_min < 2:
            raise ValueError("l_min must be >= 2")
        if self.buffer_len < 2 * self.l_min:
            raise ValueError("buffer_len must be >= 2*l_min")


@dataclass(frozen=True)
class Commit:
    """One committed chunk occurrence in the stream."""
    label: str
    start: int
    end: int


@dataclass(frozen=True)
class Unit:
    """An unconsolidated span between committed chunks."""
    text: str
    start: int
    end: int


@dataclass
class Candidate:
    """A scored segmentation candidate (diagnostic view of the buffer)."""
    pattern: str
    occurrences: int
    matched_weight: float
    leftmost: int


@dataclass
class _Prefix:
    """State of the active label-walking match."""
    start: int
    text: str
    last_completed: Commit | None = None


# ---------------------------------------------------------------------------
# standalone operations
# ---------------------------------------------------------------------------

def _tilings(text: str, l_min: int) -> list[tuple[str, ...]]:
    """All partitions of ``text`` into blocks of length >= l_min, lex order."""
    n = len(text)
    if n == 0:
        return [()]
    out: list[tuple[str, ...]] = []
    for cut in range(l_min, n + 1):
        if n - cut != 0 and n - cut < l_min:
            continue
        head = text[:cut]
        for rest in _tilings(text[cut:], l_min):
            out.append((head,) + rest)
    return out


@dataclass
class Decomposition:
    blocks_a: tuple[str, ...]
    blocks_b: tuple[str, ...]
    shared: tuple[str, ...]

    @property
    def shared_length(self) -> int:
        return sum(len(b) for b in self.shared)


def decompose_units(text_a: str, text_b: str, l_min: int) -> Decomposition | None:
    """Best joint tiling of two spans into blocks with maximal shared length.

    Both tilings must be exact (no leftover symbols) and every block must be
    at least ``l_min`` long; shorter residues invalidate a tiling, which is
    what rejects e.g. a shared "8136" between "98136"/"28136" in favour of
    the shared "136" with residues "98"/"28".  Returns None when no tiling
    shares anything.  Ties prefer more shared blocks, then leftmost (lex
    enumeration order).
    """
    if text_a == text_b:
        block = (text_a,)
        return Decomposition(block, block, block)
    best: Decomposition | None = None
    for ta in _tilings(text_a, l_min):
        counts_a: dict[str, int] = {}
        for b in ta:
            counts_a[b] = counts_a.get(b, 0) + 1
        for tb in _tilings(text_b, l_min):
            counts_b: dict[str, int] = {}
            for b in tb:
                counts_b[b] = counts_b.get(b, 0) + 1
            shared: list[str] = []
            for block, k in counts_a.items():
                shared.extend([block] * min(k, counts_b.get(block, 0)))
            if not shared:
                continue
            cand = Decomposition(ta, tb, tuple(sorted(shared)))
            if (best is None
                    or cand.shared_length > best.shared_length
                    or (cand.shared_length == best.shared_length
                        and len(cand.shared) > len(best.shared))):
                best = cand
    return best


def allocate_chunk_node(net: Network, members: list[str], label: str,
                        member_ticks: list[int] | None = None,
                        window_coact: int = 3) -> str:
    """Locate or create the chunk node bound to an ordered member group.

    Idempotent: a second call with the same label returns the same node.
    Creates in-edges from every member (with weight-0 reciprocals).  Members
    must have been activated closely enough in time to count as one group.
    """
    if not members:
        raise TopologyError("chunk allocation needs at least one member")
    if member_ticks is not None:
        for earlier, later in zip(member_ticks, member_ticks[1:]):
            if later - earlier > window_coact:
                raise TopologyError("members not co-activated within window")
    if net.has_node(label):
        return label
    net.add_node(label, NodeKind.CHUNK)
    for member in dict.fromkeys(members):
        if member != label:
            net.ensure_edge(member, label)
    return label


def find_candidates(buffer_text: str, net: Network, l_min: int = 2) -> list[Candidate]:
    """Scored view of the buffer: repeated spans and trace-matching spans.

    Candidates are substrings of length >= l_min that either occur at least
    twice (non-overlapping) in the buffer or carry positive weight as an
    existing chunk.  Ordering: matched weight desc, occurrences desc, length
    desc, leftmost first.
    """
    seen: dict[str, Candidate] = {}
    n = len(buffer_text)
    for length in range(l_min, n + 1):
        for start in range(0, n - length + 1):
            pattern = buffer_text[start:start + length]
            if pattern in seen:
                continue
            occurrences = 0
            pos = buffer_text.find(pattern)
            first = pos
            while pos != -1:
                occurrences += 1
                pos = buffer_text.find(pattern, pos + length)
            weight = 0.0
            if net.has_node(pattern):
                node = net.node(pattern)
                if node.kind is NodeKind.CHUNK:
                    weight = node.weight
            if occurrences >= 2 or weight > 0.0:
                seen[pattern] = Candidate(pattern, occurrences, weight, first)
    return sorted(seen.values(),
                  key=lambda c: (-c.matched_weight, -c.occurrences,
                                 -len(c.pattern), c.leftmost, c.pattern))


def match(net: Network, fragment: str, prime: float = 0.5) -> list[tuple[str, float]]:
    """Rank chunk nodes by their response to a fragment.

    Response = prior activation + match strength, where match strength is the
    best shared-substring length normalized by the longer of fragment and
    label, scaled by ``prime``.  Exact matches beat partial matches at equal
    prior; higher prior breaks ties.  Side effect: responding chunks gain the
    match contribution as activation (priming).
    """
    results: list[tuple[str, float, float]] = []
    for node in net.nodes.values():
        if node.kind is not NodeKind.CHUNK or node.weight <= 0.0:
            continue
        label = node.id
        best = 0
        for length in range(min(len(fragment), len(label)), 0, -1):
            found = any(fragment[i:i + length] in label
                        for i in range(len(fragment) - length + 1))
            if found:
                best = length
                break
        if best == 0:
            continue
        strength = prime * best / max(len(fragment), len(label))
        prior = node.activation
        node.activation = min(net.params.a_max, prior + strength)
        results.append((label, prior + strength, prior))
    results.sort(key=lambda r: (-r[1], -r[2], r[0]))
    return [(label, response) for label, response, _ in results]


def order_variants(net: Network, a: str, b: str) -> tuple[str, str, str]:
    """Ensure the three order-coding chunk nodes for a pair.

    Returns (simultaneous, a-then-b, b-then-a) node ids.  The directional
    variants respond fully only to their own order; the simultaneous variant
    responds to any pairing, slightly staggered.
    """
    if a == b:
        raise TopologyError("order variants need two distinct nodes")
    net.node(a), net.node(b)
    ids = (f"{a}+{b}", f"{a}>{b}", f"{b}>{a}")
    for node_id in ids:
        if not net.has_node(node_id):
            net.add_node(node_id, NodeKind.CHUNK)
            net.ensure_edge(a, node_id)
            net.ensure_edge(b, node_id)
    return ids


# A pair event one tick apart resolves cleanly for the matching directional
# variant; the order-insensitive variant integrates either order with a
# one-tick stagger loss.
STAGGER_FACTOR = 0.75


def observe_pair(net: Network, a: str, b: str, order: str) -> None:
    """Feed one pair event: ``order`` is 'ab', 'ba', or 'sim'.

    The matching variant is credited fully, the simultaneous variant at the
    stagger factor (or fully for a simultaneous event, with the directional
    variants staggered).  One tick elapses.
    """
    sim, ab, ba = order_variants(net, a, b)
    p = net.params
    full, partial = p.dw, p.dw * STAGGER_FACTOR
    if order == "ab":
        credits = {ab: full, sim: partial}
    elif order == "ba":
        credits = {ba: full, sim: partial}
    elif order == "sim":
        credits = {sim: full, ab: partial, ba: partial}
    else:
        raise ValueError(f"unknown order {order!r}")
    for node_id, amount in credits.items():
        node = net.node(node_id)
        if node.weight >= p.theta:
            net.update_weight(node)
            continue
        node.weight = min(p.w_max, node.weight + amount)
        if node.weight >= p.theta:
            node.fixated = True
        node.credited_tick = net.tick_count
        net.bump_activation(node, 3)
    net.end_tick()


# ---------------------------------------------------------------------------
# the online chunker
# ---------------------------------------------------------------------------

class Chunker:
    """Single-writer online segmenter over one network and one buffer."""

    def __init__(self, net: Network, params: ChunkerParams | None = None) -> None:
        self.net = net
        self.cp = params if params is not None else ChunkerParams()
        self.buf: list[tuple[int, str]] = []
        self.boundary: int = -1          # last consolidated stream position
        self.chain: list[Commit] = []
        self.pending: str | None = None
        self.pending_units: list[Unit] = []
        self.raw_starts: list[int] = []
        self.prefix: _Prefix | None = None
        self.quiet: int = 0
        self._tick_sym: dict[int, str] = {}
        self._sym_count: dict[str, int] = {}
        self._last_wild: bool = False
        self._wild_snapshot: list[tuple[int, str]] | None = None
        self._prev_sym: str | None = None
        self.events: list[tuple[int, str, str, float]] = []

    # -- public API --------------------------------------------------------

    def observe(self, symbol: str) -> None:
        """Consume one stream symbol; exactly one tick elapses."""
        net = self.net
        tick = net.tick_count
        wild = not net.has_node(symbol)

        # Two first-occurrence symbols in a row confirm a noise run: the data
        # era is over, consolidate what it left behind.  The window evaluated
        # is the snapshot taken before the first noise symbol landed — the
        # era's evidence, untouched by eviction.
        if wild and self._last_wild and self._has_content():
            window = self._wild_snapshot if self._wild_snapshot is not None else list(self.buf)
            self._closure(window)
        if wild:
            self._wild_snapshot = list(self.buf)
        else:
            self._wild_snapshot = None
        self._last_wild = wild

        self.buf.append((tick, symbol))
        while len(self.buf) > self.cp.buffer_len:
            self.buf.pop(0)
        self._tick_sym[tick] = symbol
        self._sym_count[symbol] = self._sym_count.get(symbol, 0) + 1

        node = net.ensure_node(symbol, NodeKind.SENSORY)
        net.update_weight(node)
        net.bump_activation(node, 3)
        if self._prev_sym is not None and self._prev_sym != symbol:
            edge = net.ensure_edge(self._prev_sym, symbol)
            net.update_weight(edge)
        self._prev_sym = symbol

        self._prefix_step(symbol, tick)
        self._raw_step(symbol, tick)
        net.end_tick()

    def flush(self) -> None:
        """Stream end: resolve open matches and consolidate the final era."""
        self._finalize_prefix()
        if self._has_content():
            self._closure(list(self.buf))
        self.raw_starts.clear()
        self.quiet = 0
        self._prev_sym = None
        self._last_wild = False
        self._wild_snapshot = None

    def observe_stream(self, symbols: str) -> None:
        for symbol in symbols:
            self.observe(symbol)
        self.flush()

    def fixated_chunks(self) -> set[str]:
        return {n.id for n in self.net.nodes.values()
                if n.kind is NodeKind.CHUNK and n.fixated}

    def buffer_text(self) -> str:
        return "".join(sym for _, sym in self.buf)

    def active_elements(self) -> set[str]:
        """Ids of elements currently holding activation (working memory)."""
        return {e.id for e in self.net.elements() if e.activation > 0.0}

    # -- internals: matching -----------------------------------------------

    def _positive_labels(self) -> list[str]:
        return [n.id for n in self.net.nodes.values()
                if n.kind is NodeKind.CHUNK and n.weight > 0.0]

    def _log(self, kind: str, element: str, value: float) -> None:
        self.events.append((self.net.tick_count, kind, element, value))

    def _has_content(self) -> bool:
        if self.chain or self.pending or self.pending_units:
            return True
        return len(self._tail_span(self.buf)) >= self.cp.l_min

    def _prefix_step(self, symbol: str, tick: int) -> None:
        labels = self._positive_labels()
        if self.prefix is None:
            if tick > self.boundary and any(l.startswith(symbol) for l in labels):
                self.prefix = _Prefix(start=tick, text=symbol)
                self._check_complete(labels, tick)
            return
        extended = self.prefix.text + symbol
        if any(l.startswith(extended) for l in labels):
            self.prefix.text = extended
            self._check_complete(labels, tick)
            return
        self._diverge(symbol, tick, labels)

    def _check_complete(self, labels: list[str], tick: int) -> None:
        run = self.prefix
        if run is None or run.text not in labels:
            return
        longer = any(l != run.text and l.startswith(run.text) for l in labels)
        occurrence = Commit(run.text, run.start, tick)
        if longer:
            run.last_completed = occurrence   # keep walking; commit on divergence
        else:
            self.prefix = None
            self._commit(occurrence)

    def _diverge(self, symbol: str, tick: int, labels: list[str]) -> None:
        run = self.prefix
        assert run is not None
        self.prefix = None
        if run.last_completed is not None:
            done = run.last_completed
            self._commit(done)
            # re-feed what the abandoned extension consumed, then the
            # diverging symbol itself
            for t in range(done.end + 1, tick):
                self._prefix_step(self._symbol_at(t), t)
            self._prefix_step(symbol, tick)
            return
        matched = run.text
        if len(matched) >= self.cp.l_min:
            split_candidates = [
                l for l in labels
                if l.startswith(matched) and len(l) - len(matched) >= self.cp.l_min
                and not self.net.node(l).fixated
            ]
            if split_candidates:
                trace = max(split_candidates, key=lambda l: (self.net.node(l).weight, l))
                self._split_trace(trace, matched, run.start, tick - 1)
                self._prefix_step(symbol, tick)
                return
        # nothing to salvage: retry the match from inside the failed span
        if len(matched) > 1:
            resume = run.start + 1
            for t in range(resume, tick):
                self._prefix_step(self._symbol_at(t), t)
        self._prefix_step(symbol, tick)

    def _split_trace(self, trace: str, matched: str, start: int, end: int) -> None:
        """Partial match against a plastic trace rewrites it into two blocks.

        Both blocks inherit the trace's weight and earn a boosted rewrite
        credit; the trace itself is emptied.  The observed prefix block is
        committed at its position.
        """
        net = self.net
        remainder = trace[len(matched):]
        trace_node = net.node(trace)
        inherited = trace_node.weight
        for block in (matched, remainder):
            self._ensure_chunk(block)
            node = net.node(block)
            if not node.fixated:
                net.transfer_weight(node, node.weight + inherited)
            self._credit_chunk(block, boost=True, occurrence=False)
        edge = net.ensure_edge(matched, remainder)
        net.update_weight(edge, boost=True)
        self._transfer_sequence_edges(trace, first=matched, last=remainder)
        net.transfer_weight(trace_node, 0.0)
        self._log("split", trace, inherited)
        self._commit(Commit(matched, start, end))

    def _finalize_prefix(self) -> None:
        run = self.prefix
        self.prefix = None
        if run is None:
            return
        labels = self._positive_labels()
        if run.text in labels:
            self._commit(Commit(run.text, run.start,
                                run.start + len(run.text) - 1))
        elif run.last_completed is not None:
            self._commit(run.last_completed)

    # -- internals: repeat tracking ----------------------------------------

    def _symbol_at(self, tick: int) -> str:
        for t, sym in self.buf:
            if t == tick:
                return sym
        raise TopologyError(f"tick {tick} evicted from buffer")

    def _text_between(self, window: list[tuple[int, str]], start: int, end: int) -> str:
        return "".join(sym for t, sym in window if start <= t <= end)

    def _occurs_earlier(self, span_start: int, span_end: int) -> bool:
        """Is there a non-overlapping earlier copy of the span, after the
        boundary, inside the window?"""
        text = self._text_between(self.buf, span_start, span_end)
        length = span_end - span_start + 1
        ticks = [t for t, _ in self.buf]
        for i in range(len(ticks)):
            t0 = ticks[i]
            if t0 <= self.boundary:
                continue
            t1 = t0 + length - 1
            if t1 >= span_start:
                break
            if self._text_between(self.buf, t0, t1) == text and t1 - t0 + 1 == length:
                return True
        return False

    def _raw_step(self, symbol: str, tick: int) -> None:
        l_min = self.cp.l_min
        survivors: list[int] = []
        proposal: str | None = None
        for start in self.raw_starts:
            if start <= self.boundary:
                continue
            if self._occurs_earlier(start, tick):
                survivors.append(start)
                continue
            dead_len = tick - start        # span without the new symbol
            if dead_len >= l_min:
                pattern = self._text_between(self.buf, start, tick - 1)
                if len(pattern) == dead_len and (proposal is None or dead_len > len(proposal)):
                    proposal = pattern
        if tick > self.boundary and self._occurs_earlier(tick, tick):
            survivors.append(tick)
        self.raw_starts = survivors

        if proposal is not None and (self.pending is None or len(proposal) > len(self.pending)):
            self.pending = proposal
            self.quiet = 0
        if self.pending is not None:
            longest_live = max((tick - s + 1 for s in survivors), default=0)
            if longest_live > len(self.pending):
                self.pending = None
                self.quiet = 0
            elif longest_live >= l_min:
                self.quiet = 0
            else:
                self.quiet += 1
                if self.quiet >= l_min:
                    self._commit_pending(list(self.buf))
        else:
            self.quiet = 0

    def _commit_pending(self, window: list[tuple[int, str]]) -> None:
        pattern = self.pending
        self.pending = None
        self.quiet = 0
        if pattern is None:
            return
        length = len(pattern)
        ticks = [t for t, _ in window]
        pos = 0
        while pos < len(ticks):
            t0 = ticks[pos]
            if t0 <= self.boundary:
                pos += 1
                continue
            t1 = t0 + length - 1
            if self._text_between(window, t0, t1) == pattern and t1 <= ticks[-1]:
                self._commit(Commit(pattern, t0, t1))
                pos += length
            else:
                pos += 1

    # -- internals: committing ---------------------------------------------

    def _ensure_chunk(self, label: str) -> None:
        if not self.net.has_node(label):
            allocate_chunk_node(self.net, list(label), label,
                                window_coact=self.cp.window_coact)

    def _credit_chunk(self, label: str, *, boost: bool, occurrence: bool = True) -> None:
        """One weight credit to a chunk node and its member edges."""
        net = self.net
        self._ensure_chunk(label)
        node = net.node(label)
        net.update_weight(node, boost=boost)
        net.bump_activation(node, 3)
        for member in dict.fromkeys(label):
            if member != label and net.has_node(member):
                net.update_weight(net.edge(member, label))
        self._log("chunk", label, node.weight)
        if node.fixated and occurrence:
            self._log("fixate", label, node.weight)

    def _preceded_by_fixated(self, start: int) -> bool:
        for commit in self.chain:
            if commit.end == start - 1:
                node = self.net.nodes.get(commit.label)
                if node is not None and node.fixated:
                    return True
        return False

    def _commit(self, occurrence: Commit) -> None:
        """Book one chunk occurrence: credit, record, advance the boundary."""
        if occurrence.start <= self.boundary:
            return
        net = self.net
        self._ensure_chunk(occurrence.label)
        node = net.node(occurrence.label)
        boost = node.weight < net.params.theta and self._preceded_by_fixated(occurrence.start)
        # the gap this commit closes off becomes a pending unit
        if self.chain and occurrence.start > self.chain[-1].end + 1:
            self._record_gap_unit(self.chain[-1].end + 1, occurrence.start - 1)
        self._credit_chunk(occurrence.label, boost=boost)
        self.chain.append(occurrence)
        self.boundary = occurrence.end

    def _record_gap_unit(self, start: int, end: int) -> None:
        ticks = self._trim_noise(start, end, self.buf)
        if ticks and ticks[-1] - ticks[0] + 1 >= self.cp.l_min:
            text = self._text_between(self.buf, ticks[0], ticks[-1])
            if len(text) == ticks[-1] - ticks[0] + 1:
                self.pending_units.append(Unit(text, ticks[0], ticks[-1]))

    def _wild_at(self, tick: int) -> bool:
        """A tick is wild while its symbol has been seen at most once so far."""
        sym = self._tick_sym.get(tick)
        return sym is not None and self._sym_count.get(sym, 0) <= 1

    def _trim_noise(self, start: int, end: int, window: list[tuple[int, str]]) -> list[int]:
        """Drop noise ticks from a span; keep the longest contiguous run.

        A one-off symbol next to another one-off symbol is noise; an isolated
        one flanked by recurring symbols is data.
        """
        present = {t for t, _ in window}
        ticks = [t for t in range(start, end + 1) if t in present]
        keep: list[int] = []
        for t in ticks:
            if self._wild_at(t) and (self._wild_at(t - 1) or self._wild_at(t + 1)):
                continue
            keep.append(t)
        best: list[int] = []
        run: list[int] = []
        for t in keep:
            if run and t != run[-1] + 1:
                if len(run) > len(best):
                    best = run
                run = []
            run.append(t)
        if len(run) > len(best):
            best = run
        return best

    def _tail_span(self, window: list[tuple[int, str]]) -> list[int]:
        if not window:
            return []
        return self._trim_noise(self.boundary + 1, window[-1][0], window)

    # -- internals: closure -------------------------------------------------

    def _transfer_sequence_edges(self, trace: str, *, first: str, last: str) -> None:
        """Move a rewritten trace's chunk-to-chunk edges onto its blocks."""
        net = self.net
        for src, edge in list(net.in_edges(trace, positive=True).items()):
            node = net.nodes[src]
            if node.kind is NodeKind.CHUNK and src not in (first, last):
                target = net.ensure_edge(src, first)
                if not target.fixated:
                    net.transfer_weight(target, target.weight + edge.weight)
                net.transfer_weight(edge, 0.0)
        for dst, edge in list(net.out_edges(trace, positive=True).items()):
            node = net.nodes[dst]
            if node.kind is NodeKind.CHUNK and dst not in (first, last):
                target = net.ensure_edge(last, dst)
                if not target.fixated:
                    net.transfer_weight(target, target.weight + edge.weight)
                net.transfer_weight(edge, 0.0)

    def _rewrite_trace(self, trace: str, tiling: tuple[str, ...]) -> None:
        """Decompose a plastic trace into blocks that inherit its weight."""
        net = self.net
        trace_node = net.node(trace)
        inherited = trace_node.weight
        for block in tiling:
            self._ensure_chunk(block)
            node = net.node(block)
            if not node.fixated:
                net.transfer_weight(node, node.weight + inherited)
            self._credit_chunk(block, boost=True, occurrence=False)
        for left, right in zip(tiling, tiling[1:]):
            if left != right:
                edge = net.ensure_edge(left, right)
                net.update_weight(edge, boost=True)
        self._transfer_sequence_edges(trace, first=tiling[0], last=tiling[-1])
        net.transfer_weight(trace_node, 0.0)
        self._log("split", trace, inherited)

    def _closure(self, window: list[tuple[int, str]]) -> None:
        """Era consolidation over the given window snapshot."""
        net = self.net
        if self.pending is not None:
            self._commit_pending(window)
        tail = self._tail_span(window)
        units = list(self.pending_units)
        self.pending_units = []
        if tail and tail[-1] - tail[0] + 1 >= self.cp.l_min:
            text = self._text_between(window, tail[0], tail[-1])
            if len(text) == tail[-1] - tail[0] + 1:
                units.append(Unit(text, tail[0], tail[-1]))

        groups: dict[str, list[Unit]] = {}
        for unit in units:
            groups.setdefault(unit.text, []).append(unit)

        entries: list[Commit] = list(self.chain)

        # Decomposition: pit unit groups against each other and against
        # still-plastic traces; the pairing sharing the most material wins.
        # Trace pairings are preferred on ties — a known trace explaining a
        # new span beats two new spans explaining each other.
        tilings: dict[str, tuple[str, ...]] = {}
        while True:
            undecided = [text for text in sorted(groups) if text not in tilings]
            best: tuple | None = None
            for text in undecided:
                for trace in sorted(self._positive_labels()):
                    node = net.node(trace)
                    if node.fixated or trace == text or trace in groups:
                        continue
                    dec = decompose_units(text, trace, self.cp.l_min)
                    if dec is None or len(dec.blocks_a) == 1:
                        continue
                    key = (dec.shared_length, len(dec.shared), 1, text, trace)
                    if best is None or key > best[0]:
                        best = (key, "trace", text, trace, dec)
            for text_a, text_b in combinations(undecided, 2):
                dec = decompose_units(text_a, text_b, self.cp.l_min)
                if dec is None or (len(dec.blocks_a) == 1 and len(dec.blocks_b) == 1):
                    continue
                key = (dec.shared_length, len(dec.shared), 0, text_a, text_b)
                if best is None or key > best[0]:
                    best = (key, "pair", text_a, text_b, dec)
            if best is None:
                break
            _, kind, text_a, text_b, dec = best
            if kind == "trace":
                tilings[text_a] = dec.blocks_a
                self._rewrite_trace(text_b, dec.blocks_b)
            else:
                tilings[text_a] = dec.blocks_a
                tilings[text_b] = dec.blocks_b

        for text in sorted(groups):
            occurrences = sorted(groups[text], key=lambda u: u.start)
            if text in tilings:
                for unit in occurrences:
                    pos = unit.start
                    for block in tilings[text]:
                        self._credit_chunk(block, boost=True)
                        entries.append(Commit(block, pos, pos + len(block) - 1))
                        pos += len(block)
            elif len(occurrences) >= 2:
                for unit in occurrences:
                    self._credit_chunk(text, boost=False)
                    entries.append(Commit(text, unit.start, unit.end))
            else:
                unit = occurrences[0]
                boost = self._preceded_by_fixated_entry(entries, unit.start)
                self._credit_chunk(text, boost=boost)
                entries.append(Commit(text, unit.start, unit.end))

        entries.sort(key=lambda c: c.start)
        for left, right in zip(entries, entries[1:]):
            if left.label != right.label and left.end + 1 == right.start:
                edge = net.ensure_edge(left.label, right.label)
                net.update_weight(edge)
                self._log("sequence", edge.id, edge.weight)

        if entries:
            self.boundary = max(self.boundary, entries[-1].end)
        if units:
            self.boundary = max(self.boundary, max(u.end for u in units))
        self.chain = []
        self.raw_starts = []
        self.prefix = None
        self.quiet = 0
        self._log("closure", "era", float(len(entries)))

    def _preceded_by_fixated_entry(self, entries: list[Commit], start: int) -> bool:
        for commit in entries:
            if commit.end == start - 1:
                node = self.net.nodes.get(commit.label)
                if node is not None and node.fixated:
                    return True
        return False
