"""Multiplicative quiver equations, Borel normal forms, Steinberg fibres and real implosion strata."""
from . import cxmat, kernels
from .errors import *  # noqa: F401,F403
from .jsonio import Report, load_borel, load_matrix, load_quiver, save_borel, save_matrix, save_quiver
from .normal_form import (
    BorelElement,
    borel_of,
    cover_lifts,
    cover_rho,
    lift_roots,
    reconstruct_from_borel,
    reduce_to_standard,
    standard_form_residual,
    tilde_scalars,
)
from .quiver import (
    GaugeElement,
    Quiver,
    ScalarChain,
    act_gauge,
    additive_residuals,
    eigenspace_decompose,
    endo_Y,
    equation_residual,
    gen_random,
    gen_toric,
    infer_scalars,
    minpoly_residual,
    residuals,
    stability_report,
    vdb_moment_map,
    xk_recursion_residual,
)
from .real_implosion import AlcovePoint, alcove_grid, hjs_toric_quiver, stabilizer_check, stratum_of
from .sl2 import SL2Point, sl2_invariants, sl2_quadric_residual, sl2_real_slice, sl2_relation_residual
from .steinberg import (
    DoublePoint,
    TorusLevel,
    centralizer_dim,
    class_functions,
    springer_image,
    steinberg_membership,
)

BACKEND = kernels.BACKEND
__version__ = "0.1.0"
