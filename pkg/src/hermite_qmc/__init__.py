"""Gaussian quadrature in Hermite spaces with higher-order digital nets.

The hot loops (Hermite recurrences and moment sums) live in a compiled
extension; a numpy implementation with the same interface is used when the
extension is missing or ``HERMITE_QMC_PURE=1`` is set. ``BACKEND`` tells
which one is active.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .hermite import (
    MAX_DEGREE,
    DegreeOverflowError,
    GaussianDensity,
    gaussian_density,
    hermite,
    hermite_derivative_factor,
    hermite_multi,
    hermite_weighted,
    hermite_weighted_table,
    sigma_bound,
)
from .nets import (
    DigitalNet,
    DirectionNumberError,
    GeneratingMatrices,
    InsufficientDimensionsError,
    InterlacedNetSpec,
    deinterlace_integers,
    elementary_interval_check,
    interlace,
    interlace_integers,
    interlaced_sobol,
    load_direction_numbers,
    net_point,
    parse_direction_numbers,
    radical_inverse,
    sobol_net,
    sobol_t_parameter,
)
from .rules import (
    CubeMap,
    QuadratureRule,
    build_rule,
    cube_map_apply,
    gauss_hermite,
    gauss_hermite_tensor,
    icdf_rule,
    inverse_normal_cdf,
    normal_cdf,
    paper_half_width,
    paper_rule,
)
from .spaces import (
    CoefficientSequence,
    HermiteSpaceParams,
    bernoulli_poly,
    beta_tau,
    hermite_kernel,
    r_alpha,
    r_multi,
    sobolev_kernel,
)
from .wce import (
    WceReport,
    err1_bound,
    hermite_moments,
    inthelp_closed_form,
    inthelp_oracle,
    wce_hermite_1d,
    wce_sobolev,
)
