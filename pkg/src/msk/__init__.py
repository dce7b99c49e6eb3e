"""Combinatorial Morse-Smale graphs on the sphere, their persistence, and level-set nesting histories."""
from __future__ import annotations

from .barcode import LEVELSET, SUBLEVEL, Bar, Barcode, Endpoint, barcodes_equal
from .complex import (
    MAX,
    MIN,
    SADDLE,
    InvalidGraphError,
    MalformedGraphError,
    MSGraph,
    base_sphere,
    canonical_code,
    euler_characteristic,
    faces,
    is_isomorphic,
    to_dot,
    validate,
)
from .moves import MoveError, MoveInstance, apply_move, census, connect, enumerate_moves, inverse_moves
from .persistence import (
    DecoratedMSGraph,
    betti_profile,
    graph_equivalent,
    homologically_equivalent,
    merge_tree,
    reeb_graph,
    sublevel_barcode,
)
from .realize import (
    UnrealizableError,
    count_classes,
    enumerate_embeddings,
    history_from_reeb,
    is_realizable,
    lower_bound,
    mu,
    reeb_from_barcode,
)
from .slices import (
    EmbeddingHistory,
    Event,
    NestingForest,
    NestingPoset,
    levelset_barcode,
    nesting_poset,
    poset_equivalent,
    zigzag,
)
from .trees import ReebGraph

__version__ = "0.1.0"
