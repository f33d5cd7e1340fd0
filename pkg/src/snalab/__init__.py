"""snalab: numerics for quasi-periodically forced circle maps.

Skew products (x,y) -> (x+w, g(x)+f(y)) on the 2-torus: orbit iteration,
fibered Lyapunov exponents, critical-set geometry and resonance scales,
invariant-graph (SNA) estimation, SL(2,R) cocycles, and rotation
arithmetic, with a batch CLI.
"""

from .circle import (
    ArcInterval,
    ArcSet,
    MapParams,
    PiecewiseMonotoneCircleMap,
    arc_between,
    circle_dist,
    make_affine_g,
    make_example1_f,
    make_identity_f,
    make_kkho_fiber,
    make_projective_arctan_f,
    verify_A1,
    verify_A2,
    wrap,
)
from .kernels import IMPLEMENTATION
from .skew import (
    OrbitRecord,
    SkewProductMap,
    TorusPoint,
    iterate,
    lyapunov_estimate,
    omega_preset,
    system_preset,
)

__version__ = "0.1.0"

__all__ = [
    "ArcInterval",
    "ArcSet",
    "MapParams",
    "PiecewiseMonotoneCircleMap",
    "arc_between",
    "circle_dist",
    "make_affine_g",
    "make_example1_f",
    "make_identity_f",
    "make_kkho_fiber",
    "make_projective_arctan_f",
    "verify_A1",
    "verify_A2",
    "wrap",
    "IMPLEMENTATION",
    "OrbitRecord",
    "SkewProductMap",
    "TorusPoint",
    "iterate",
    "lyapunov_estimate",
    "omega_preset",
    "system_preset",
    "__version__",
]
