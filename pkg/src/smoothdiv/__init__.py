"""smoothdiv: the limiting distribution of smooth divisors and its machinery."""

from .arith import (
    SpfSieve,
    build_spf_sieve,
    count_rough,
    count_smooth,
    divisor_cdf,
    mean_distribution,
    smooth_divisors,
    tau_smooth,
)
from .errors import (
    GridAlignmentError,
    GridRangeError,
    QuadratureError,
    SieveLimitError,
)
from .gridfun import (
    EULER,
    EULER_GAMMA,
    EulerGamma,
    GridFunction,
    build_omega,
    build_rho,
    build_rho_k,
    convolve,
)
from .law import (
    LawTable,
    LimitLaw,
    arcsine_cdf,
    make_law_table,
    tail_integral,
)

__version__ = "0.1.0"
