"""Grid peeling of lattice sets and the affine curve-shortening flow."""

from .acsf import FrontCurve, StepParams, acsf_step, circle_radius, run_until_area, sample_region_boundary
from .geometry import (
    ConvexChain,
    GeometryError,
    UnimodularMap,
    circumcircle,
    convex_hull,
    diagonal_intersection,
    grid_preserving_normalize,
    hausdorff_distance,
    polygon_area,
)
from .harness import compare_experiment, estimate_c, quadrant_experiment
from .numtheory import LatticeRect, jarnik_ratio, mobius, primitive_count_anchored, primitive_count_rect
from .peeling import (
    LayerRecord,
    RowIntervalSet,
    hull_chain,
    layer_count,
    peel_step,
    peel_until_fraction,
    rasterize,
)
from .quadrant import (
    QuadrantProfile,
    estimate_c_quadrant,
    hyperbola_fit_extent,
    hyperbola_reference,
    k_n,
    quadrant_peel_step,
    quadrant_run,
)
from .regions import BUILTIN, Region, get_region, load_regions

__version__ = "0.1.0"
