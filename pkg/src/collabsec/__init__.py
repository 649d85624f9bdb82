"""Collaboration-network attack-surface analysis for research institutions."""

from .analysis import (
    CommunityPartition,
    SpanningTree,
    fluid_communities,
    maximum_spanning_tree,
)
from .errors import CollabsecError
from .ingestion import (
    BreachDescriptor,
    BreachReport,
    FixtureBreachClient,
    HttpBreachClient,
    PaperRecord,
    enrich,
    extract_emails,
    parse_records,
)
from .network import (
    CollaborationEdge,
    CollaborationNetwork,
    EmailIdentity,
    NetworkMetrics,
    ResearcherNode,
    breach_histogram,
    build_network,
    compute_metrics,
    largest_component,
)
from .seir import (
    Compartment,
    SeirConfig,
    SimulationTrace,
    VulnerabilityReport,
    aggregate_trends,
    run,
    seed_states,
    step,
    vulnerability,
)

__version__ = "0.1.0"
