"""Cognitive network toolkit: transducers, plastic substrate, segmentation."""

from __future__ import annotations

from .errors import (
    TnetError,
    StochasticityError,
    CompositionError,
    TopologyError,
    FixationError,
    ConfigError,
    ZeroDenominatorError,
)
from .transducer import Transducer, compose
from .substrate import (
    Params,
    Network,
    Node,
    Edge,
    Event,
    NodeKind,
    FiringMode,
    counter_uniform,
)
from .chunker import (
    Chunker,
    ChunkerParams,
    Candidate,
    decompose_units,
    allocate_chunk_node,
    find_candidates,
    match,
    order_variants,
    observe_pair,
)
from .learning import (
    InnateSpec,
    Episode,
    inject_innate,
    hebbian_episode,
    reinforce,
    replay,
)
from .predictor import (
    PredictionMotif,
    ActivationSnapshot,
    build_motif,
    prediction_error,
    trial,
    run_schedule,
)
from .planner import (
    PlannerParams,
    PathQuery,
    Decision,
    propagate,
    decide,
    plan,
    generalize,
    causal_strength,
)
from .harness import (
    ExperimentConfig,
    load_config,
    corpus_fig1,
    read_corpus,
    run_experiment,
    snapshot_from_net,
    net_from_snapshot,
    export_snapshot,
    import_snapshot,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "TnetError",
    "StochasticityError",
    "CompositionError",
    "TopologyError",
    "FixationError",
    "ConfigError",
    "Transducer",
    "compose",
    "Params",
    "Network",
    "Node",
    "Edge",
    "Event",
    "NodeKind",
    "FiringMode",
    "counter_uniform",
    "Chunker",
    "ChunkerParams",
    "Candidate",
    "decompose_units",
    "allocate_chunk_node",
    "find_candidates",
    "match",
    "order_variants",
    "observe_pair",
    "InnateSpec",
    "Episode",
    "inject_innate",
    "hebbian_episode",
    "reinforce",
    "replay",
    "ZeroDenominatorError",
    "PredictionMotif",
    "ActivationSnapshot",
    "build_motif",
    "prediction_error",
    "trial",
    "run_schedule",
    "PlannerParams",
    "PathQuery",
    "Decision",
    "propagate",
    "decide",
    "plan",
    "generalize",
    "causal_strength",
    "ExperimentConfig",
    "load_config",
    "corpus_fig1",
    "read_corpus",
    "run_experiment",
    "snapshot_from_net",
    "net_from_snapshot",
    "export_snapshot",
    "import_snapshot",
    "sweep",
    "__version__",
]
