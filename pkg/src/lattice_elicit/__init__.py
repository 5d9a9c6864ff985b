"""Constraint-guarded requirements elicitation over formal requirement lattices.

A deterministic validator sits inside the elicitation loop and rejects every
constraint-violating proposal before it can reach the final specification;
interpreter backends (model-served or offline heuristics) only ever suggest.
"""

from .bench import BenchResult, VisionCase, emit_report, load_suite, prf1, run_benchmark
from .errors import (
    CheckpointError,
    ElicitError,
    InvalidSelectionError,
    LatticeParseError,
    LatticeSchemaError,
    LatticeTooLargeError,
    ProposalParseError,
    TransportError,
)
from .fixtures import bench_suite_text, load_family, load_registry
from .interpreter import (
    FaultyBackend,
    InterpreterBackend,
    KeywordBackend,
    ModelServerBackend,
    Proposal,
    RetryPolicy,
    ScriptedBackend,
    keyword_propose,
    parse_proposal,
    propose,
)
from .model import (
    Lattice,
    LatticeRegistry,
    NodeId,
    NodeType,
    RequirementNode,
    SchemaError,
    check_well_formed,
    parse_lattice,
    serialize_lattice,
    topological_order,
)
from .navigator import (
    DONE,
    DecisionContext,
    Frontier,
    advance,
    build_context,
    init_frontier,
    next_decision,
)
from .orchestrator import (
    AgentState,
    RunBudget,
    RunOutcome,
    RunStatus,
    TransitionRecord,
    checkpoint_read,
    checkpoint_write,
    new_state,
    repair,
    resume_elicitation,
    run_elicitation,
)
from .router import (
    EmbeddingVector,
    FamilyCentroid,
    RemoteEmbedder,
    build_centroids,
    embed,
    route,
    similarity_scores,
)
from .scribe import SpecificationDocument, compile_spec
from .synth import generate_lattice
from .validator import (
    SelectionSet,
    Violation,
    ViolationKind,
    enumerate_valid,
    is_complete,
    validate_global,
    validate_node,
)

__version__ = "0.1.0"
