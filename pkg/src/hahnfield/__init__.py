"""Exact arithmetic, logarithm and exponential on truncated Hahn series.

Series have finitely many terms ``c * m`` with exact constants ``c`` and
monomials ``m`` that are either nested omega-powers ``w^x`` (``x`` itself a
series) or free products ``prod t[g]^r`` over a chain, plus an optional
remainder bound ``O(m)``.
"""

from .analytic import ORACLES, TaylorOracle, eval_power_series, eval_restricted_analytic, expm_small, log1p, polynomial_oracle
from .constants import Constant, const_compare, const_exp, const_field_op, const_inv, const_log
from .context import TruncationContext, getcontext, localcontext, setcontext
from .errors import *  # noqa: F401,F403
from .explog import (
    BOOT,
    H0,
    H1,
    H_FUNCTIONS,
    GrowthReport,
    HFunction,
    Witness,
    boot_branch,
    check_growth,
    exp,
    exp_iota,
    exp_mono,
    h_apply,
    h_inverse,
    log,
    log_iota,
    log_mono,
    omega_from_psi,
    omin_witness,
    power,
)
from .monomials import FreeMonomial, Monomial, NestedMonomial, mono_compare, mono_inv, mono_mul, omega_pow
from .series import ONE, Series, compare, decompose, dominance, invert, omega, split, truncate
from .towers import (
    ChainDescriptor,
    ChainEmbedding,
    base_chain,
    cof_calculus,
    eta_step,
    h_functor,
    initial_state,
    iota_step,
    no_omega_verdict,
    run_tower,
)

__version__ = "0.1.0"
