"""Numerical laboratory for the transport geometry of point configurations
over constant-curvature base spaces."""

from .calculus import (
    CylinderFunction,
    Linear,
    PowerSaturated,
    Product,
    TanhComposed,
    TestFunction,
    eval_cylinder,
    gamma2_cylinder,
    gamma_cylinder,
    grad_cylinder,
    laplacian_cylinder,
)
from .configuration import (
    Ball,
    Box,
    Configuration,
    count_ball,
    good_config_witness,
    restrict,
    sample_poisson,
)
from .dynamics import coupled_heat_step, heat_step_config, semigroup_expectation
from .errors import (
    DomainError,
    InfiniteDistanceError,
    InvalidPointError,
    NonUniqueGeodesicError,
    SpaceMismatchError,
    UpsilonLabError,
)
from .seeding import derive_rng
from .space_forms import Euclidean, Hyperbolic2, SpaceForm, Sphere2, make_space
from .transport import (
    ExtendedCost,
    HopfLaxOptions,
    Matching,
    config_geodesic,
    d_upsilon,
    empirical_w2,
    hopf_lax,
    optimal_matching,
)
from .verify import CheckReport

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
