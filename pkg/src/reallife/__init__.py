"""Larger-than-Life cellular automata and their continuum limit.

The main entry points are re-exported here; see the submodules for details.
"""

__version__ = "0.1.0"

from ._accel import COMPILED  # noqa: E402
from .automaton import (  # noqa: E402
    AutomatonSpec,
    MarginReport,
    ThresholdQuad,
    conway,
    evans_fig1,
    margin_report,
    preset,
    real_step,
    run,
    step,
    threshold_sets,
    validate_quad,
)
from .conv import convolve, young_bound_check  # noqa: E402
from .grid import (  # noqa: E402
    BinaryConfig,
    Domain,
    PointSet,
    ScalarField,
    boundary_cells,
    coarsen,
    l1_distance,
    shift,
)
from .kernel import (  # noqa: E402
    DiscreteKernel,
    KernelSpec,
    discretize_kernel,
    kernel_l1_distance,
    mollify,
    uniform_kernel,
)
from .lifeform import (  # noqa: E402
    LifeFormReport,
    RibbonThresholds,
    annulus_thresholds,
    construct_ball,
    construct_ribbon,
    curtain_profile,
    detect_lifeform,
    exhaustive_still_search,
    is_still_life,
    pattern,
    ribbon_thresholds,
)
from .metrics import compact_open_distance, d_star, hausdorff, hausdorff_max, stability_report  # noqa: E402
from .shapes import rasterize  # noqa: E402
