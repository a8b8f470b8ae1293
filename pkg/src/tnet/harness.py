"""Experiment plumbing: configs, corpora, runs, snapshots, sweeps.

Everything here is deliberately boring: YAML configs in, deterministic runs
through the library modules, JSON/DOT snapshots and line-oriented event logs
out.  A config plus a seed fully determines every output byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import string
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path

import yaml

from .chunker import Chunker, ChunkerParams
from .errors import ConfigError, TnetError
from .learning import InnateSpec, hebbian_episode, inject_innate
from .planner import PathQuery, PlannerParams, decide, plan
from .predictor import build_motif, trial
from .substrate import FiringMode, Network, NodeKind, Params, counter_uniform

SCHEMA_VERSION = 1

FIG1_A = "75648361"
FIG1_B = "75698136"
FIG1_C = "75628136"
_JUNK_POOL = string.ascii_letters + "!@#$%^&*"

GOLDEN_A_LABELS = frozenset({"756", "48361", "98", "136", "28"})
GOLDEN_B_LABELS = frozenset({FIG1_A, FIG1_B, FIG1_C})


# ---------------------------------------------------------------------------
# corpora
# ---------------------------------------------------------------------------

def corpus_fig1(variant: str) -> str:
    """The two segmentation corpora: interleaved (A) or blocked (B) strings.

    Junk separators are 30 symbols each, unique within and across gaps.
    """
    junk = iter(_JUNK_POOL)
    gap1 = "".join(next(junk) for _ in range(30))
    gap2 = "".join(next(junk) for _ in range(30))
    if variant.upper() == "A":
        block = FIG1_A + FIG1_B + FIG1_C
        return block + gap1 + block + gap2 + block
    if variant.upper() == "B":
        return FIG1_A * 3 + gap1 + FIG1_B * 3 + gap2 + FIG1_C * 3
    raise ConfigError(f"unknown fig1 variant {variant!r}")


def read_corpus(path: str | Path) -> list[str]:
    """Parse a corpus file: one symbol per character, blank lines separate
    streams, lines starting with ``#`` are comments."""
    text = Path(path).read_text(encoding="utf-8")
    streams: list[str] = []
    current: list[str] = []
    for line in text.splitlines():
        if line.startswith("#"):
            continue
        if line.strip() == "":
            if current:
                streams.append("".join(current))
                current = []
            continue
        current.append(line)
    if current:
        streams.append("".join(current))
    return streams


def resolve_corpus(source: str) -> list[str]:
    if source in ("fig1a", "fig1A"):
        return [corpus_fig1("A")]
    if source in ("fig1b", "fig1B"):
        return [corpus_fig1("B")]
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"corpus: no such builtin or file: {source!r}")
    return read_corpus(path)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

KINDS = ("segment", "predict", "plan", "hebbian", "custom")


@dataclass
class ExperimentConfig:
    kind: str = "segment"
    corpus: str | None = None
    params: Params = field(default_factory=Params)
    chunker: ChunkerParams = field(default_factory=ChunkerParams)
    planner: PlannerParams = field(default_factory=PlannerParams)
    innate: InnateSpec | None = None
    seed: int = 0
    deterministic: bool = True
    out: str | None = None
    log: str | None = None
    predict: dict = field(default_factory=dict)
    plan: dict = field(default_factory=dict)
    hebbian: dict = field(default_factory=dict)
    version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind: expected one of {KINDS}, got {self.kind!r}")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("seed: must fit in 64 unsigned bits")
        if self.kind == "segment" and self.corpus is None:
            raise ConfigError("corpus: required for kind=segment")


def _build_section(name: str, cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected a mapping")
    valid = set(cls.__dataclass_fields__)
    unknown = set(data) - valid
    if unknown:
        raise ConfigError(f"{name}: unknown fields {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _build_innate(data: dict) -> InnateSpec:
    if not isinstance(data, dict):
        raise ConfigError("innate: expected a mapping")
    unknown = set(data) - {"nodes", "edges", "rewards"}
    if unknown:
        raise ConfigError(f"innate: unknown fields {sorted(unknown)}")
    try:
        nodes = [(n["id"], n.get("kind", "plain"), float(n["weight"]))
                 for n in data.get("nodes", [])]
        edges = [(e["src"], e["dst"], float(e["weight"]))
                 for e in data.get("edges", [])]
        rewards = [(pair[0], pair[1]) for pair in data.get("rewards", [])]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ConfigError(f"innate: {exc}") from exc
    return InnateSpec(nodes=nodes, edges=edges, reward_bindings=rewards)


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate an experiment config; diagnostics name the field."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    return config_from_mapping(raw if raw is not None else {})


def config_from_mapping(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    kwargs: dict = {}
    for key in ("kind", "corpus", "seed", "deterministic", "out", "log", "version"):
        if key in raw:
            kwargs[key] = raw[key]
    if "params" in raw:
        kwargs["params"] = _build_section("params", Params, raw["params"])
    if "chunker" in raw:
        kwargs["chunker"] = _build_section("chunker", ChunkerParams, raw["chunker"])
    if "planner" in raw:
        kwargs["planner"] = _build_section("planner", PlannerParams, raw["planner"])
    if "innate" in raw and raw["innate"] is not None:
        kwargs["innate"] = _build_innate(raw["innate"])
    for key in ("predict", "plan", "hebbian"):
        if key in raw:
            if not isinstance(raw[key], dict):
                raise ConfigError(f"{key}: expected a mapping")
            kwargs[key] = raw[key]
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# snapshots
# ---------------------------------------------------------------------------

def snapshot_from_net(net: Network, seed: int = 0) -> dict:
    """Serializable view of a network; sorted, version-tagged, lossless."""
    nodes = [
        {
            "id": n.id,
            "label": n.id,
            "kind": n.kind.value,
            "weight": n.weight,
            "activation": n.activation,
            "fixated": n.fixated,
        }
        for n in sorted(net.nodes.values(), key=lambda n: n.id)
    ]
    edges = [
        {
            "id": e.id,
            "src": e.src,
            "dst": e.dst,
            "weight": e.weight,
            "activation": e.activation,
            "fixated": e.fixated,
        }
        for e in sorted(net.edges(), key=lambda e: (e.src, e.dst))
    ]
    return {
        "version": SCHEMA_VERSION,
        "tick_count": net.tick_count,
        "seed": seed,
        "params": asdict(net.params),
        "nodes": nodes,
        "edges": edges,
    }


def net_from_snapshot(snap: dict) -> Network:
    if snap.get("version") != SCHEMA_VERSION:
        raise ConfigError(f"snapshot version {snap.get('version')!r} unsupported")
    params = _build_section("params", Params, snap.get("params", {}))
    net = Network(params, seed=int(snap.get("seed", 0)))
    for rec in snap["nodes"]:
        node = net.add_node(rec["id"], NodeKind(rec["kind"]))
        node.weight = rec["weight"]
        node.activation = rec["activation"]
        node.fixated = rec["fixated"]
    for rec in snap["edges"]:
        if not net.has_edge(rec["src"], rec["dst"]):
            net.ensure_edge(rec["src"], rec["dst"])
        edge = net.edge(rec["src"], rec["dst"])
        edge.weight = rec["weight"]
        edge.activation = rec["activation"]
        edge.fixated = rec["fixated"]
    net.tick_count = snap["tick_count"]
    return net


def snapshot_json(snap: dict) -> str:
    # repr-based float serialization keeps the round trip lossless
    return json.dumps(snap, sort_keys=True, indent=2) + "\n"


def snapshot_dot(snap: dict) -> str:
    """DOT view: penwidth tracks weight, fixated nodes double-circled.

    Zero-weight reciprocal edges are omitted — they carry no ink.
    """
    w_max = snap["params"]["w_max"]
    lines = ["digraph tnet {"]
    for rec in snap["nodes"]:
        shape = "doublecircle" if rec["fixated"] else "circle"
        pen = 0.5 + 2.5 * rec["weight"] / w_max
        lines.append(
            f'  "{rec["id"]}" [label="{rec["label"]}", shape={shape}, '
            f"penwidth={pen:.3f}];"
        )
    for rec in snap["edges"]:
        if rec["weight"] <= 0.0:
            continue
        pen = 0.5 + 2.5 * rec["weight"] / w_max
        style = ", style=bold" if rec["fixated"] else ""
        lines.append(
            f'  "{rec["src"]}" -> "{rec["dst"]}" [penwidth={pen:.3f}{style}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_snapshot(snap: dict, fmt: str, path: str | Path) -> None:
    if fmt == "json":
        text = snapshot_json(snap)
    elif fmt == "dot":
        text = snapshot_dot(snap)
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    Path(path).write_text(text, encoding="utf-8")


def import_snapshot(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"snapshot file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"snapshot parse error: {exc}") from exc


# ---------------------------------------------------------------------------
# experiment runner
# ---------------------------------------------------------------------------

def _event_lines(events: list[tuple[int, str, str, float]]) -> list[str]:
    return [f"{tick}\t{kind}\t{element}\t{value!r}" for tick, kind, element, value in events]


def _predict_schedule(cfg: ExperimentConfig) -> list[bool]:
    section = cfg.predict
    if "schedule" in section:
        return [bool(x) for x in section["schedule"]]
    trials = int(section.get("trials", 20))
    probability = section.get("probability")
    if probability is None:
        return [True] * trials
    return [counter_uniform(cfg.seed, "schedule", i) < float(probability)
            for i in range(trials)]


def run_experiment(cfg: ExperimentConfig) -> tuple[dict, list[str]]:
    """Run one experiment; returns (snapshot, event log lines)."""
    mode = FiringMode.DETERMINISTIC if cfg.deterministic else FiringMode.STOCHASTIC
    net = Network(cfg.params, seed=cfg.seed, mode=mode)
    if cfg.innate is not None:
        inject_innate(net, cfg.innate)
    events: list[tuple[int, str, str, float]] = []

    if cfg.kind == "segment":
        chunker = Chunker(net, cfg.chunker)
        for stream in resolve_corpus(cfg.corpus):
            chunker.observe_stream(stream)
        events = chunker.events
    elif cfg.kind == "predict":
        section = cfg.predict
        cue = section.get("cue", "cue")
        outcome = section.get("outcome", "outcome")
        net.ensure_node(cue)
        net.ensure_node(outcome)
        motif = build_motif(net, cue, outcome)
        for i, present in enumerate(_predict_schedule(cfg)):
            error = trial(net, motif, present)
            events.append((net.tick_count, "error", f"trial-{i}", error))
    elif cfg.kind == "plan":
        section = cfg.plan
        try:
            query = PathQuery(source=section["source"], goal=section["goal"],
                              context=frozenset(section.get("context", [])))
        except KeyError as exc:
            raise ConfigError(f"plan: missing field {exc}") from exc
        policy = section.get("policy", "absolute")
        if section.get("full_plan", True):
            for i, hop in enumerate(plan(net, query, cfg.planner, policy)):
                events.append((net.tick_count, "commit", hop, float(i)))
        else:
            decision = decide(net, query, policy, cfg.planner)
            if decision is not None:
                events.append((net.tick_count, "decision", decision.chosen,
                               float(decision.rounds_used)))
    elif cfg.kind == "hebbian":
        section = cfg.hebbian
        try:
            a, b = section["a"], section["b"]
        except KeyError as exc:
            raise ConfigError(f"hebbian: missing field {exc}") from exc
        reps = int(section.get("reps", 3))
        gap = int(section.get("gap_ticks", 0))
        net.ensure_node(a)
        net.ensure_node(b)
        hebbian_episode(net, a, b, reps, gap)
        events.append((net.tick_count, "weight", f"{a}->{b}",
                       net.edge(a, b).weight))
    # custom: innate network only, nothing streamed

    snapshot = snapshot_from_net(net, cfg.seed)
    return snapshot, _event_lines(events)


def write_outputs(cfg: ExperimentConfig, snapshot: dict, log_lines: list[str]) -> None:
    if cfg.out:
        export_snapshot(snapshot, "json", cfg.out)
    if cfg.log:
        Path(cfg.log).write_text("\n".join(log_lines) + ("\n" if log_lines else ""),
                                 encoding="utf-8")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def _fixated_chunk_labels(snapshot: dict) -> set[str]:
    return {rec["id"] for rec in snapshot["nodes"]
            if rec["kind"] == "chunk" and rec["fixated"]}


def label_set_hash(labels: set[str]) -> str:
    digest = hashlib.sha256("\n".join(sorted(labels)).encode("utf-8"))
    return digest.hexdigest()[:16]


def sweep(base: ExperimentConfig, grid: dict[str, list]) -> list[dict]:
    """Cartesian product over Params fields; one result row per cell."""
    valid = set(Params.__dataclass_fields__)
    unknown = set(grid) - valid
    if unknown:
        raise ConfigError(f"grid: unknown Params fields {sorted(unknown)}")
    keys = sorted(grid)
    rows: list[dict] = []
    cells = product(*(grid[k] for k in keys)) if keys else [()]
    for values in cells:
        overrides = dict(zip(keys, values))
        params = _build_section("params", Params,
                                {**asdict(base.params), **overrides})
        cell_cfg = ExperimentConfig(
            kind=base.kind, corpus=base.corpus, params=params,
            chunker=base.chunker, planner=base.planner, innate=base.innate,
            seed=base.seed, deterministic=base.deterministic,
            predict=base.predict, plan=base.plan, hebbian=base.hebbian,
        )
        snapshot, _ = run_experiment(cell_cfg)
        labels = _fixated_chunk_labels(snapshot)
        row = dict(overrides)
        row["fixated_chunks"] = len(labels)
        row["label_hash"] = label_set_hash(labels)
        row["golden_a"] = labels == GOLDEN_A_LABELS
        row["golden_b"] = labels == GOLDEN_B_LABELS
        rows.append(row)
    return rows


def write_sweep_table(rows: list[dict], path: str | Path) -> None:
    if not rows:
        Path(path).write_text("", encoding="utf-8")
        return
    fields = list(rows[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def load_grid(path: str | Path) -> dict[str, list]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"grid file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"grid parse error: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict) or not all(isinstance(v, list) for v in raw.values()):
        raise ConfigError("grid must map param names to value lists")
    return raw
