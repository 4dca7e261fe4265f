"""Posterior moments of the allele-frequency model given an augmented database.

The population proportions are written as ``theta_L = psi * phi_L`` and
``theta_S = (1 - psi) * phi_S``. A posteriori ``psi`` is Beta distributed
and, for each DIP class, ``phi`` restricted to the observed alleles is a
mixture over the unknown number of types ``k`` of Dirichlet distributions.
Mixture weights are handled in log space throughout: for realistic database
sizes ``Gamma(k*alpha) / Gamma(n + k*alpha)`` is far below the double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np
from scipy import stats as _st
from scipy.special import gammaln, logsumexp

from .errors import InputError, ModelError
from .genetics import AugmentedDatabase, DipStrAllele

# ---------------------------------------------------------------------------
# Priors over the number of allele types


@dataclass(frozen=True)
class Uniform:
    def log_pmf(self, m: int) -> np.ndarray:
        return np.full(m, -np.log(m))

    def __str__(self) -> str:
        return "uniform"


@dataclass(frozen=True)
class TruncatedPoisson:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InputError(f"Poisson rate must be positive, got {self.lam}")

    def log_pmf(self, m: int) -> np.ndarray:
        raw = _st.poisson.logpmf(np.arange(1, m + 1), self.lam)
        return raw - logsumexp(raw)

    def __str__(self) -> str:
        return f"poisson:{self.lam:g}"


@dataclass(frozen=True)
class TruncatedNegBinomial:
    """Negative binomial with ``P(k) ~ C(k+r-1, k) p^r (1-p)^k`` on {1..m}."""

    r: float
    p: float

    def __post_init__(self):
        if not self.r > 0:
            raise InputError(f"negative binomial r must be positive, got {self.r}")
        if not 0 < self.p < 1:
            raise InputError(f"negative binomial p must lie in (0, 1), got {self.p}")

    def log_pmf(self, m: int) -> np.ndarray:
        raw = _st.nbinom.logpmf(np.arange(1, m + 1), self.r, self.p)
        return raw - logsumexp(raw)

    def __str__(self) -> str:
        return f"negbin:{self.r:g},{self.p:g}"


@dataclass(frozen=True)
class Degenerate:
    k0: int

    def log_pmf(self, m: int) -> np.ndarray:
        out = np.full(m, -np.inf)
        out[self.k0 - 1] = 0.0
        return out

    def __str__(self) -> str:
        return f"fixed:{self.k0}"


KPrior = Union[Uniform, TruncatedPoisson, TruncatedNegBinomial, Degenerate]


def parse_k_prior(spec: str) -> KPrior:
    """Parse ``uniform``, ``poisson:<lam>``, ``negbin:<r>,<p>`` or ``fixed:<k0>``."""
    name, _, args = spec.strip().partition(":")
    name = name.lower()
    try:
        if name == "uniform" and not args:
            return Uniform()
        if name == "poisson":
            return TruncatedPoisson(float(args))
        if name == "negbin":
            r, p = args.split(",")
            return TruncatedNegBinomial(float(r), float(p))
        if name == "fixed":
            return Degenerate(int(args))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad k prior specification {spec!r}: {exc}") from None
    raise InputError(
        f"unknown k prior {spec!r}; expected uniform, poisson:<lam>, negbin:<r>,<p> or fixed:<k0>"
    )


@dataclass(frozen=True)
class PriorConfig:
    """Model hyperparameters.

    ``m`` is the number of theoretically possible alleles per DIP class and
    ``alpha`` the common Dirichlet hyperparameter.
    """

    m: int = 100
    alpha: float = 1.0
    k_prior: KPrior = Uniform()

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InputError(f"m must be a positive integer, got {self.m}")
        if not self.alpha > 0 or not np.isfinite(self.alpha):
            raise InputError(f"alpha must be positive, got {self.alpha}")
        if isinstance(self.k_prior, Degenerate) and not 1 <= self.k_prior.k0 <= self.m:
            raise InputError(f"fixed k0={self.k_prior.k0} outside [1, m={self.m}]")

    def log_prior(self) -> np.ndarray:
        """Log p(k) for k = 1..m."""
        return self.k_prior.log_pmf(int(self.m))

    def with_k_prior(self, k_prior: KPrior) -> "PriorConfig":
        return PriorConfig(self.m, self.alpha, k_prior)


# ---------------------------------------------------------------------------
# Sufficient statistics of one DIP class


@dataclass(frozen=True)
class SideStats:
    n_side: int
    counts: Mapping[DipStrAllele, int]
    k_b: int
    n1: int

    @classmethod
    def from_counts(cls, counts, dip: str = "L") -> "SideStats":
        """Build statistics from a plain sequence of positive counts.

        Alleles are labelled ``<dip>1``, ``<dip>2``, ... in order.
        """
        mapping = {DipStrAllele(dip, str(idx + 1)): int(c) for idx, c in enumerate(counts)}
        return cls.from_mapping(mapping)

    @classmethod
    def from_mapping(cls, mapping: Mapping[DipStrAllele, int]) -> "SideStats":
        if any(c < 1 for c in mapping.values()):
            raise InputError("allele counts must be positive")
        values = list(mapping.values())
        return cls(sum(values), dict(mapping), len(values), sum(1 for c in values if c == 1))


def side_stats(adb: AugmentedDatabase, dip: str) -> SideStats:
    return SideStats.from_mapping(adb.counts(dip))


# ---------------------------------------------------------------------------
# Posterior over k


@dataclass(frozen=True)
class KPosterior:
    """Log weights ``log w(k)`` for ``k = k_min .. m``, up to a common constant."""

    k_min: int
    log_weights: np.ndarray
    log_norm: float
    n_side: int

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_min + len(self.log_weights))

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_norm)

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(p) for k, p in zip(self.ks, self.probabilities()) if p > 0}

    def mean(self) -> float:
        return float(np.sum(self.ks * self.probabilities()))

    def log_ratio(self, log_f: np.ndarray) -> float:
        """``log( sum w(k) f(k) / sum w(k) )`` for log-values ``log_f`` on ``ks``."""
        return float(logsumexp(self.log_weights + log_f) - self.log_norm)


def k_posterior(stats: SideStats, prior: PriorConfig) -> KPosterior:
    """Posterior weights ``p(k | b) ~ C(k, k_b) p(k) Gamma(k a) / Gamma(n + k a)``."""
    m, alpha = int(prior.m), float(prior.alpha)
    k_b, n = stats.k_b, stats.n_side
    if m < k_b:
        raise ModelError(
            f"more distinct alleles observed than model allows (k_b={k_b} > m={m})"
        )
    k_min = max(k_b, 1)
    ks = np.arange(k_min, m + 1, dtype=float)
    log_binom = gammaln(ks + 1) - gammaln(k_b + 1) - gammaln(ks - k_b + 1)
    log_pk = prior.log_prior()[k_min - 1 :]
    log_w = log_binom + log_pk + gammaln(ks * alpha) - gammaln(n + ks * alpha)
    top = np.max(log_w)
    if not np.isfinite(top):
        raise ModelError(
            f"more distinct alleles observed than model allows: prior {prior.k_prior} "
            f"puts no mass on k >= k_b={k_b}"
        )
    # shift so the largest weight is 1; keeps log_norm O(log m) and exact to rounding
    log_w = log_w - top
    return KPosterior(k_min, log_w, float(logsumexp(log_w)), n)


# ---------------------------------------------------------------------------
# Moments


@dataclass(frozen=True)
class PsiMoments:
    e_psi: float
    e_one_minus_psi: float
    e_psi_sq: float
    e_one_minus_psi_sq: float
    e_psi_one_minus_psi: float

    def mass(self, dip: str) -> float:
        """Posterior mean of the total frequency of class ``dip``."""
        return self.e_psi if dip == "L" else self.e_one_minus_psi

    def mass_sq(self, dip: str) -> float:
        return self.e_psi_sq if dip == "L" else self.e_one_minus_psi_sq


def psi_moments(n_L: int, n_S: int) -> PsiMoments:
    """Moments of ``Beta(1 + n_L, 1 + n_S)``."""
    if n_L < 0 or n_S < 0:
        raise InputError("class totals must be non-negative")
    a, b = n_L + 1.0, n_S + 1.0
    s = a + b
    ss = s * (s + 1.0)
    return PsiMoments(
        e_psi=a / s,
        e_one_minus_psi=b / s,
        e_psi_sq=a * (a + 1.0) / ss,
        e_one_minus_psi_sq=b * (b + 1.0) / ss,
        e_psi_one_minus_psi=a * b / ss,
    )


@dataclass(frozen=True)
class PhiMoments:
    e_phi_i: float
    e_phi_i_sq: float
    e_phi_i_phi_j: Optional[float] = None


def _count_of(stats: SideStats, allele: DipStrAllele) -> int:
    try:
        return stats.counts[allele]
    except KeyError:
        raise ModelError(
            f"allele {allele} is not in the augmented database; its posterior moments are undefined"
        ) from None


def phi_moments(
    stats: SideStats,
    kpost: KPosterior,
    alpha: float,
    i: DipStrAllele,
    j: Optional[DipStrAllele] = None,
) -> PhiMoments:
    """Moments of the within-class frequencies of observed alleles ``i`` (and ``j``).

    Conditional on ``k`` the observed frequencies follow
    ``Dir(alpha + n_1, ..., alpha + n_kb, (k - k_b) alpha)``; the answer is the
    ``p(k | b)`` average of the Dirichlet moments.
    """
    n_i = _count_of(stats, i)
    total = kpost.ks * alpha + stats.n_side
    log_h = -np.log(total)
    log_g = log_h - np.log(total + 1.0)
    mean_h = math.exp(kpost.log_ratio(log_h))
    mean_g = math.exp(kpost.log_ratio(log_g))
    ai = alpha + n_i
    e_ij = None
    if j is not None:
        if j == i:
            raise InputError("i and j must be distinct alleles")
        e_ij = ai * (alpha + _count_of(stats, j)) * mean_g
    return PhiMoments(e_phi_i=ai * mean_h, e_phi_i_sq=ai * (ai + 1.0) * mean_g, e_phi_i_phi_j=e_ij)


@dataclass(frozen=True)
class ThetaMoments:
    e_theta_i: float
    e_theta_i_sq: float
    e_theta_i_times_othermass: float
    e_theta_i_theta_j: Optional[float] = None


def theta_moments(
    side: str,
    adb: AugmentedDatabase,
    prior: PriorConfig,
    i: DipStrAllele,
    j: Optional[DipStrAllele] = None,
    kpost: Optional[KPosterior] = None,
) -> ThetaMoments:
    """Population-frequency moments of observed alleles of class ``side``.

    ``e_theta_i_times_othermass`` is ``E[theta_i * (1 - psi)]`` for side L and
    ``E[theta_i * psi]`` for side S; both equal ``E[phi_i] E[psi (1 - psi)]``.
    """
    for allele in (i, j):
        if allele is not None and allele.dip != side:
            raise InputError(f"allele {allele} is not of class {side}")
    stats = side_stats(adb, side)
    if kpost is None:
        kpost = k_posterior(stats, prior)
    phi = phi_moments(stats, kpost, prior.alpha, i, j)
    psi = psi_moments(adb.n_L, adb.n_S)
    m2 = psi.mass_sq(side)
    return ThetaMoments(
        e_theta_i=phi.e_phi_i * psi.mass(side),
        e_theta_i_sq=phi.e_phi_i_sq * m2,
        e_theta_i_times_othermass=phi.e_phi_i * psi.e_psi_one_minus_psi,
        e_theta_i_theta_j=None if phi.e_phi_i_phi_j is None else phi.e_phi_i_phi_j * m2,
    )


__all__ = [
    "Degenerate",
    "KPosterior",
    "KPrior",
    "PhiMoments",
    "PriorConfig",
    "PsiMoments",
    "SideStats",
    "ThetaMoments",
    "TruncatedNegBinomial",
    "TruncatedPoisson",
    "Uniform",
    "k_posterior",
    "parse_k_prior",
    "phi_moments",
    "psi_moments",
    "side_stats",
    "theta_moments",
]
