"""Topology-guided force-directed graph layout.

Extracts connected-component and cycle features from the descending
edge-weight filtration of a graph, uses the resulting maximal spanning
forest for fast untangled initial layouts, and exposes the cycle features
for interactive highlighting and elliptical untangling forces, with a full
layout-quality metric suite.
"""

from .graph import (
    DistanceMatrix,
    Graph,
    GraphFormat,
    ParseError,
    ParseReport,
    avg_eccentricity,
    bfs_distances,
    jaccard_weights,
    parse_graph,
    to_edge_list_tsv,
    to_graph_json,
)
from .persistence import (
    Barcode,
    CyclePath,
    EdgeComplex,
    H0Event,
    H1Candidate,
    PersistenceResult,
    build_barcode,
    compute_persistence,
    edge_complex,
    extract_cycle,
    is_trivial_cycle,
)
from .initial import (
    AbstractTree,
    Layout,
    abstract_layout,
    choose_roots,
    embed_layered,
    embed_radial,
    initial_layout,
    random_layout,
)
from .simulation import (
    LayoutTrace,
    SimConfig,
    SimState,
    SimulationError,
    add_elliptical_force,
    add_h0_force,
    init_sim,
    remove_force,
    run,
    select_h0_by_threshold,
    step,
)
from .metrics import (
    CoRanking,
    QualityReport,
    TimingReport,
    c_lcmc,
    co_ranking,
    q_ca,
    q_cont,
    q_ec,
    q_lcmc,
    q_mar,
    q_trust,
    quality_report,
    timing,
)

__version__ = "0.1.0"
