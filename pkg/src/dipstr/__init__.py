"""Forensic likelihood ratios for DIP-STR mixtures when alleles are unseen.

The full Bayesian model puts a symmetric Dirichlet prior on the allele
frequencies of each DIP class with an unknown number of allele types, and a
uniform prior on the total L-class frequency. Two approximations are
provided (plug-in point estimates, and a Good-Turing empirical-Bayes choice of
the number of types), together with an importance-sampling oracle.
"""

from .errors import AlleleParseError, DipStrError, InputError, ModelError, OracleStarvedError
from .genetics import (
    AlleleDatabase,
    AugmentedDatabase,
    CaseInput,
    DipStrAllele,
    Exclusion,
    Genotype,
    NoAllele,
    Observation,
    OneAllele,
    TwoAlleles,
    VictimHeterozygous,
    augment,
    classify_case,
    observe,
    parse_allele,
)
from .lr import (
    LrResult,
    Method,
    Status,
    SweepRow,
    combine_loci,
    compute_lr,
    denominator_full_bayes,
    denominator_plugin,
    empirical_k_hat,
    sensitivity_sweep,
)
from .posterior import (
    Degenerate,
    KPosterior,
    PriorConfig,
    SideStats,
    TruncatedNegBinomial,
    TruncatedPoisson,
    Uniform,
    k_posterior,
    parse_k_prior,
    phi_moments,
    psi_moments,
    side_stats,
    theta_moments,
)

__version__ = "0.1.0"
