"""Exact Masur-Veech volumes, Siegel-Veech constants and square-tiled surface statistics."""

from .errors import (
    CacheCorruptError,
    ConsistencyError,
    DivergenceError,
    DomainError,
    NonMonomialDivisorError,
    QuadvolError,
)
from .exact_arith import (
    DIVERGENT,
    PiMonomial,
    ZetaExpr,
    ZetaQuotient,
    bernoulli,
    evaluate_zeta_expr,
    rational_to_decimal,
    zeta_even,
    zeta_numeric,
)
from .correlators import (
    genus0_correlator,
    load_cache,
    psi_correlator,
    store_cache,
    two_point_row,
    warm_from_cache,
)
from .stable_graphs import (
    StableGraph,
    aut_order,
    canonical_encoding,
    enumerate_stable_graphs,
    graph_from_encoding,
    is_bridge,
    to_dot,
)
from .volumes import (
    graph_contribution,
    kontsevich_poly,
    masur_veech_volume,
    masur_veech_volume_symbolic,
    p_gamma,
    volume_breakdown,
    y_op,
    z_op,
    ztilde_op,
)
from .siegel_veech import carea, carea_boundary, carea_direct, lyapunov_sums
from .frequencies import b_gn, c_gamma, c_tilde, sep_nonsep_ratio, six_punctured_sphere_split
from .asymptotics import a_gk, a_gk_row, r_gj, s_g, verified_a_gk_row, vol_delta, vol_gamma1
from .statistics import (
    ExpectationQuery,
    Moment,
    bounded_height_probability,
    cylinder_distribution,
    expectation,
    height_one_probability,
)

__version__ = "1.0.0"
