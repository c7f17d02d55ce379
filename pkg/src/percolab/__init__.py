"""percolab: a percolation laboratory.

Bernoulli bond percolation on finite boxes of Z^d and the Poisson-Boolean
continuum model, with exact small-instance verification (FKG, Russo's
formula, the OSSS inequality, revealment bounds) and statistical checks at
Monte Carlo scale (Poisson process laws, Mecke's identity, the sharpness
differential inequality).
"""

__version__ = "0.1.0"

from .bernoulli import (
    Estimate,
    ThetaCurve,
    ThetaRow,
    crossing_probability,
    estimate_pc_crossing,
    estimate_theta_derivative,
    estimate_theta_n,
    theta_curve,
)
from .boolmodel import (
    BallGraph,
    BallTarget,
    BoxTarget,
    PointTarget,
    SphereTarget,
    StarPair,
    TruncationPolicy,
    build_ball_graph,
    connects,
    discretize,
    estimate_annulus,
    estimate_theta_r,
    event_P_x_n,
    insertion_tolerance,
    lambda_scan,
    make_continuum_algorithm,
    moment_check,
    vacancy_probability,
    verify_russo_continuum,
)
from .errors import (
    BudgetExceededError,
    EnumerationCapError,
    MonotonicityError,
    NontrivialityError,
    PercolabError,
)
from .exact import (
    CylinderUnionEvent,
    Event,
    ExactReport,
    connection_event,
    covariance_sum,
    derivative_exact,
    edge_open_event,
    enumerate_probability,
    fkg_slack,
    is_decreasing,
    is_increasing,
    origin_to_boundary_event,
    pivotal_sum,
    random_increasing_event,
    verify_fkg,
    verify_russo,
    verify_support,
)
from .lattice import (
    LatticeGraph,
    build_box_graph,
    connected,
    connected_to_boundary,
    sample_configuration,
)
from .osss import (
    OsssReport,
    QueryAlgorithm,
    RunTrace,
    influence_exact,
    make_exhaustive_algorithm,
    make_sequential_algorithm,
    make_sphere_algorithm,
    osss_differential_check,
    revealment_exact,
    revealment_mc_sphere,
    revealment_sum_bound_check,
    run_algorithm,
    verify_osss,
)
from .ppp import (
    Box,
    IntensitySpec,
    MarkedSample,
    PointSample,
    RadiusDist,
    grid_approximation,
    grid_count_tv,
    sample_marked,
    sample_ppp,
    unit_square,
    verify_count_independence,
    verify_mecke,
    verify_superposition,
    verify_void_probability,
)
from .sharpness import (
    FitResult,
    SumTable,
    check_differential_inequality,
    constant_family,
    fit_exponential_decay,
    fit_linear_growth,
    partial_sums,
    tilted_ramp_family,
    validate_lemma_family,
)
from .streams import substream
