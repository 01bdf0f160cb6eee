"""Online reachability preservers, their verifiers, and a benchmark
harness. Graphs are directed, vertices are 0..n-1, and every online
structure only ever grows."""

from .errors import (
    BoundsError,
    CyclicGraphError,
    InfeasiblePairError,
    MissingEntryError,
    ParameterError,
    ParseError,
    ReachkeepError,
    SizeLimitError,
)
from .graphs import (
    Condensation,
    DirectedGraph,
    condense,
    dump_graph,
    lift_edge,
    load_graph,
    reachable_set,
)
from .harness import (
    FaultySession,
    RunManifest,
    VerificationResult,
    bench_cell,
    bench_sweep,
    canonical_json,
    hash_json,
    hash_text,
    load_manifest,
    primary_rows,
    save_manifest,
    sourcewise_cells,
    verify_all,
)
from .nonadaptive import (
    RESIDUAL,
    WHILE_LOOP,
    ExtremalSurrogate,
    MonitorReport,
    PathTable,
    default_surrogate,
    precompute_index_sensitive,
    precompute_known_p,
    select_entry,
    select_path,
    surrogate_monitor,
)
from .oracle import (
    EXHAUSTIVE_EDGE_LIMIT,
    InstanceFamily,
    generate,
    greedy_adversary_step,
    min_preserver,
)
from .pathsystem import (
    BridgeMonitor,
    BridgeWitness,
    OrderConstraint,
    PathSystem,
    clean,
    dump_path_system,
    find_k_bridge,
    is_acyclic,
    load_path_system,
    r_set,
    reversed_system,
    validate_witness,
    verify_r_ordering,
)
from .preserver import (
    CondensingPreserver,
    EdgeStore,
    GrowthMode,
    PairRecord,
    PreserverSession,
    SessionReport,
    grow_backwards,
    grow_forwards,
    size_envelope_source_restricted,
    verify_session,
)
from .seeding import rng_for, split_seed
from .udsn import (
    FIRST_T,
    HIT,
    THIN,
    TRIVIAL,
    UdsnParams,
    UdsnRecord,
    UdsnSession,
    bfs_route,
    default_handlers,
    hit_by,
    is_thin,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsError",
    "BridgeMonitor",
    "BridgeWitness",
    "Condensation",
    "CondensingPreserver",
    "CyclicGraphError",
    "DirectedGraph",
    "EXHAUSTIVE_EDGE_LIMIT",
    "EdgeStore",
    "ExtremalSurrogate",
    "FIRST_T",
    "FaultySession",
    "GrowthMode",
    "HIT",
    "InfeasiblePairError",
    "InstanceFamily",
    "MissingEntryError",
    "MonitorReport",
    "OrderConstraint",
    "PairRecord",
    "ParameterError",
    "ParseError",
    "PathSystem",
    "PathTable",
    "PreserverSession",
    "RESIDUAL",
    "ReachkeepError",
    "RunManifest",
    "SessionReport",
    "SizeLimitError",
    "THIN",
    "TRIVIAL",
    "UdsnParams",
    "UdsnRecord",
    "UdsnSession",
    "VerificationResult",
    "WHILE_LOOP",
    "bench_cell",
    "bench_sweep",
    "bfs_route",
    "canonical_json",
    "clean",
    "condense",
    "default_handlers",
    "default_surrogate",
    "dump_graph",
    "dump_path_system",
    "find_k_bridge",
    "generate",
    "greedy_adversary_step",
    "grow_backwards",
    "grow_forwards",
    "hash_json",
    "hash_text",
    "hit_by",
    "is_acyclic",
    "is_thin",
    "lift_edge",
    "load_graph",
    "load_manifest",
    "load_path_system",
    "min_preserver",
    "precompute_index_sensitive",
    "precompute_known_p",
    "primary_rows",
    "r_set",
    "reachable_set",
    "reversed_system",
    "rng_for",
    "save_manifest",
    "select_entry",
    "select_path",
    "size_envelope_source_restricted",
    "sourcewise_cells",
    "split_seed",
    "surrogate_monitor",
    "validate_witness",
    "verify_all",
    "verify_r_ordering",
    "verify_session",
]
