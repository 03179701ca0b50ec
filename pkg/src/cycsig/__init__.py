"""cycsig: topological detection and classification of oscillations in time series.

A long trajectory is lifted to the unit tangent bundle, covered by a cubical
comparison space whose degree-one cohomology provides coordinates, and short
segments are assigned signature subspaces over GF(2) by mapping their
persistent 1-cycles into the comparison space. Statistics of these subspaces
identify oscillations and the transitions between them.
"""

from .gf2 import Gf2Matrix, Gf2Subspace, contains, intersect_dim, rref, span, sum_dim
from .systems import (
    LiftedSeries,
    SystemSpec,
    TimeSeries,
    dadras_rescale,
    dadras_vf,
    doublewell_drift,
    generate_lifted,
    integrate_ode,
    integrate_sde,
    lift,
    lorenz_vf,
    system_preset,
)
from .cubical import (
    ComparisonSpace,
    EdgeTooLongError,
    GridParams,
    build_space,
    build_space_from_boxes,
    cocycle_basis,
    locate_box,
    map_cycle,
    pair,
    route_edge,
)
from .persistence import Barcode, Filtration, SegmentView, bars_alive, build_filtration, persist_h1, utb_distance
from .signatures import SignatureRecord, signature, signature_sweep
from .estimator import CyclingSignatureTransformer

__version__ = "0.1.0"

__all__ = [
    "Gf2Matrix",
    "Gf2Subspace",
    "contains",
    "intersect_dim",
    "rref",
    "span",
    "sum_dim",
    "SystemSpec",
    "TimeSeries",
    "LiftedSeries",
    "lorenz_vf",
    "doublewell_drift",
    "dadras_vf",
    "dadras_rescale",
    "integrate_ode",
    "integrate_sde",
    "lift",
    "generate_lifted",
    "system_preset",
    "GridParams",
    "ComparisonSpace",
    "EdgeTooLongError",
    "locate_box",
    "build_space",
    "build_space_from_boxes",
    "cocycle_basis",
    "route_edge",
    "map_cycle",
    "pair",
    "SegmentView",
    "Filtration",
    "Barcode",
    "utb_distance",
    "build_filtration",
    "persist_h1",
    "bars_alive",
    "SignatureRecord",
    "signature",
    "signature_sweep",
    "CyclingSignatureTransformer",
    "__version__",
]
