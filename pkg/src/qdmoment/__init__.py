"""qdmoment: numerical verification toolkit for the first moment of the
quadratic Dirichlet L-function family L(s, chi_8d), d odd square-free.

The library checks, at desk scale, the explicit structure behind the moment
asymptotic X P1(log X) + X^(1/3) P2(log X): exact character/Gauss-sum
arithmetic, dual-route L-values, both representations of the double
Dirichlet series A(s,w), its functional equation and residues, the B-series
identities feeding the secondary term, and the accelerated Euler products
that make every constant explicit.
"""

from .arith import (
    PSI0,
    PSI1,
    PSI2,
    PSI_M1,
    PSI_M2,
    CharSpec,
    FactorTable,
    a_t,
    chi_8d,
    gauss_G,
    kronecker,
    kronecker_many,
    squarefree_odd,
    tau_definitional,
)
from .eulerprod import (
    Q2,
    R1,
    R2,
    T,
    EulerProductValue,
    ResidueConstants,
    eval_product,
    eval_Y,
    log_derivative,
    prime_zeta,
)
from .lfun import (
    check_fe_nonprimitive,
    k_series,
    l_central_afe,
    l_general_afe,
    l_oracle,
)
from .mds import (
    A_direct,
    A_via_chars,
    B_double,
    B_pm_consistency,
    B_product_rep,
    SeriesEval,
    check_fe_s,
    residue_A_w1,
    residue_B_closed_form,
    residue_B_numeric,
)
from .moment import (
    DEFAULT_WEIGHT,
    MomentReport,
    WeightSpec,
    build_constants,
    empirical_moment,
    predict_central,
    predict_general,
    residual_report,
)

__version__ = "0.1.0"
