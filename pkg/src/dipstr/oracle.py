"""Monte Carlo and brute-force checks of the closed-form posterior results.

Nothing here uses the mixture-of-Dirichlet simplifications. The importance
sampler draws the full generative model (k, the set of present types t,
phi, psi) from the prior and weights each draw by the probability of the
augmented database; the brute-force routine sums over every type set t.
Both are only practical for tiny instances.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np
from scipy.special import logsumexp

from .errors import InputError, ModelError, OracleStarvedError
from .genetics import (
    AlleleDatabase,
    AugmentedDatabase,
    CaseInput,
    Genotype,
    NoAllele,
    Observation,
    OneAllele,
    TwoAlleles,
    augment,
    classify_case,
    opposite,
)
from .posterior import (
    Degenerate,
    PriorConfig,
    SideStats,
    TruncatedNegBinomial,
    TruncatedPoisson,
    Uniform,
)

BRUTEFORCE_MAX_M = 12


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent, reproducible generator for a (seed, stream) pair."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


# ---------------------------------------------------------------------------
# Prior sampling


@dataclass(frozen=True)
class GenerativeSample:
    k_L: int
    k_S: int
    t_L: tuple[int, ...]
    t_S: tuple[int, ...]
    phi_L: np.ndarray
    phi_S: np.ndarray
    psi: float

    @property
    def theta(self) -> np.ndarray:
        """Frequencies of all 2m alleles, L block first."""
        return np.concatenate([self.phi_L * self.psi, self.phi_S * (1.0 - self.psi)])


def _sample_side(prior: PriorConfig, size: int, rng: np.random.Generator):
    m = int(prior.m)
    p = np.exp(prior.log_prior())
    k = rng.choice(np.arange(1, m + 1), size=size, p=p / p.sum())
    # rank of an iid uniform is a uniform permutation; rank < k is a uniform k-subset
    ranks = np.argsort(np.argsort(rng.random((size, m)), axis=1), axis=1)
    present = ranks < k[:, None]
    g = rng.standard_gamma(prior.alpha, size=(size, m)) * present
    phi = g / g.sum(axis=1, keepdims=True)
    return k, present, phi


def sample_prior_batch(prior: PriorConfig, size: int, rng: np.random.Generator) -> dict:
    """Vectorised draws; arrays are indexed ``[sample, allele]``."""
    k_L, t_L, phi_L = _sample_side(prior, size, rng)
    k_S, t_S, phi_S = _sample_side(prior, size, rng)
    psi = rng.beta(1.0, 1.0, size=size)
    return {"k_L": k_L, "k_S": k_S, "t_L": t_L, "t_S": t_S,
            "phi_L": phi_L, "phi_S": phi_S, "psi": psi}


def sample_prior(prior: PriorConfig, rng_seed: int, stream: int = 0) -> GenerativeSample:
    d = sample_prior_batch(prior, 1, make_rng(rng_seed, stream))
    return GenerativeSample(
        k_L=int(d["k_L"][0]),
        k_S=int(d["k_S"][0]),
        t_L=tuple(int(i) + 1 for i in np.flatnonzero(d["t_L"][0])),
        t_S=tuple(int(i) + 1 for i in np.flatnonzero(d["t_S"][0])),
        phi_L=d["phi_L"][0],
        phi_S=d["phi_S"][0],
        psi=float(d["psi"][0]),
    )


# ---------------------------------------------------------------------------
# Importance sampling of the LR denominator


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    std_error: float
    n_samples: int
    effective_sample_size: float


def _index_alleles(adb: AugmentedDatabase, m: int):
    index, counts = {}, {}
    for dip in ("L", "S"):
        side = adb.counts(dip)
        if len(side) > m:
            raise ModelError(f"more distinct {dip} alleles ({len(side)}) than m={m}")
        for pos, allele in enumerate(side):
            index[allele] = pos
        counts[dip] = (np.arange(len(side)), np.array(list(side.values()), dtype=float))
    return index, counts


def _integrand(kind, index, log_theta):
    """Log of the defence-hypothesis probability of the trace, per sample."""
    lt = log_theta
    if isinstance(kind, NoAllele):
        return 2.0 * lt["mass_" + kind.victim_side]
    side = lt[kind.side]
    if isinstance(kind, TwoAlleles):
        return math.log(2.0) + side[:, index[kind.i]] + side[:, index[kind.j]]
    li = side[:, index[kind.i]]
    return np.logaddexp(2.0 * li, math.log(2.0) + li + lt["mass_" + opposite(kind.side)])


def _chunk_sums(kind, index, counts, prior, size, seed, stream):
    d = sample_prior_batch(prior, size, make_rng(seed, stream))
    with np.errstate(divide="ignore"):
        log_psi = np.log(d["psi"])
        log_1m = np.log1p(-d["psi"])
        lt = {
            "L": np.log(d["phi_L"]) + log_psi[:, None],
            "S": np.log(d["phi_S"]) + log_1m[:, None],
            "mass_L": log_psi,
            "mass_S": log_1m,
        }
    log_w = np.zeros(size)
    for dip in ("L", "S"):
        cols, c = counts[dip]
        if len(cols):
            log_w = log_w + _masked_dot(lt[dip][:, cols], c)
    log_f = _integrand(kind, index, lt)
    return np.array([
        logsumexp(log_w),
        logsumexp(log_w + log_f),
        logsumexp(2 * log_w),
        logsumexp(2 * log_w + log_f),
        logsumexp(2 * log_w + 2 * log_f),
    ])


def _masked_dot(log_theta: np.ndarray, counts: np.ndarray) -> np.ndarray:
    # counts are positive, so any -inf entry makes the row -inf (never nan)
    finite = np.isfinite(log_theta)
    out = np.where(finite, log_theta, 0.0) @ counts
    out[~finite.all(axis=1)] = -np.inf
    return out


def is_denominator(
    case: CaseInput,
    adb: AugmentedDatabase,
    prior: PriorConfig,
    n_samples: int = 1_000_000,
    seed: int = 0,
    chunk_size: int = 100_000,
    workers: Optional[int] = None,
) -> OracleEstimate:
    """Self-normalised importance-sampling estimate of the LR denominator.

    Proposal is the prior; the weight of a draw is ``prod theta(entry)`` over
    the augmented database. Chunk ``c`` uses stream ``c`` of ``seed`` and the
    per-chunk log-sums are combined in chunk order, so the result is the same
    for any ``workers``.
    """
    kind = classify_case(case)
    if not isinstance(kind, (TwoAlleles, OneAllele, NoAllele)):
        raise InputError(f"no denominator for case kind {type(kind).__name__}")
    if n_samples < 1:
        raise InputError("n_samples must be positive")
    index, counts = _index_alleles(adb, int(prior.m))
    sizes = [min(chunk_size, n_samples - start) for start in range(0, n_samples, chunk_size)]
    jobs = [(kind, index, counts, prior, size, seed, stream) for stream, size in enumerate(sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _chunk_sums(*a), jobs))
    else:
        parts = [_chunk_sums(*a) for a in jobs]
    lw, lwf, lw2, lw2f, lw2f2 = np.logaddexp.reduce(np.vstack(parts), axis=0)
    if not np.isfinite(lw):
        raise OracleStarvedError(
            f"oracle starved: none of {n_samples} prior draws is compatible with the "
            "database; use more samples or a smaller instance"
        )
    mu = math.exp(lwf - lw)
    var = math.exp(lw2f2 - 2 * lw) - 2 * mu * math.exp(lw2f - 2 * lw) + mu * mu * math.exp(lw2 - 2 * lw)
    return OracleEstimate(
        value=mu,
        std_error=math.sqrt(max(var, 0.0)),
        n_samples=n_samples,
        effective_sample_size=math.exp(2 * lw - lw2),
    )


# ---------------------------------------------------------------------------
# Exhaustive enumeration of p(k | b)


def _mp_prior(prior: PriorConfig, k: int):
    """Prior mass of k in exact arithmetic, independent of the scipy path."""
    m = int(prior.m)
    kp = prior.k_prior

    def raw(j):
        if isinstance(kp, Uniform):
            return mpmath.mpf(1)
        if isinstance(kp, TruncatedPoisson):
            lam = mpmath.mpf(kp.lam)
            return lam**j * mpmath.exp(-lam) / mpmath.factorial(j)
        if isinstance(kp, TruncatedNegBinomial):
            r, p = mpmath.mpf(kp.r), mpmath.mpf(kp.p)
            return mpmath.gamma(j + r) / (mpmath.factorial(j) * mpmath.gamma(r)) * p**r * (1 - p) ** j
        if isinstance(kp, Degenerate):
            return mpmath.mpf(1 if j == kp.k0 else 0)
        raise TypeError(f"unsupported prior {kp!r}")

    return raw(k) / mpmath.fsum(raw(j) for j in range(1, m + 1))


def exact_k_posterior_bruteforce(stats: SideStats, prior: PriorConfig) -> dict[int, float]:
    """``p(k | b)`` by summing ``p(k) p(t | k) p(b | t)`` over every type set ``t``.

    Observed alleles occupy positions ``0 .. k_b - 1``; ``p(b | t)`` is the
    Dirichlet-multinomial probability of the ordered sample and is zero when
    ``t`` misses an observed position.
    """
    m = int(prior.m)
    if m > BRUTEFORCE_MAX_M:
        raise InputError(f"brute force refused for m={m} > {BRUTEFORCE_MAX_M}")
    if stats.k_b > m:
        raise ModelError(f"more distinct alleles observed than model allows (k_b={stats.k_b} > m={m})")
    with mpmath.workdps(40):
        alpha = mpmath.mpf(prior.alpha)
        counts = list(stats.counts.values()) + [0] * (m - stats.k_b)
        n = stats.n_side
        # per-allele Dirichlet factors Gamma(a + n_i) / Gamma(a), one per distinct count
        factor = {c: mpmath.gamma(alpha + c) / mpmath.gamma(alpha) for c in set(counts)}
        joint = {}
        for k in range(1, m + 1):
            pk = _mp_prior(prior, k)
            p_t = 1 / mpmath.binomial(m, k)
            norm_k = mpmath.gamma(k * alpha) / mpmath.gamma(n + k * alpha)
            total = mpmath.mpf(0)
            for t in itertools.combinations(range(m), k):
                members = set(t)
                if any(counts[i] > 0 and i not in members for i in range(m)):
                    continue
                lik = norm_k
                for i in t:
                    lik *= factor[counts[i]]
                total += lik
            joint[k] = pk * p_t * total
        norm = mpmath.fsum(joint.values())
        if norm == 0:
            raise ModelError("prior puts no mass on any k compatible with the data")
        return {k: float(v / norm) for k, v in joint.items() if v > 0}


# ---------------------------------------------------------------------------
# Built-in validation instances


@dataclass(frozen=True)
class ValidationInstance:
    name: str
    case: CaseInput
    db: AlleleDatabase
    prior: PriorConfig


def builtin_instances() -> list[ValidationInstance]:
    def case(victim, suspect, observed):
        return CaseInput(Genotype.of(*victim), Genotype.of(*suspect), Observation.of(observed))

    uni3 = PriorConfig(3, 1.0, Uniform())
    return [
        ValidationInstance("two_alleles_n0", case(("L1", "L1"), ("S1", "S2"), ["S1", "S2"]),
                           AlleleDatabase(), uni3),
        ValidationInstance("one_allele", case(("L1", "L1"), ("S1", "L2"), ["S1"]),
                           AlleleDatabase.from_labels(["S2"]), uni3),
        ValidationInstance("no_allele", case(("L1", "L1"), ("L1", "L2"), []),
                           AlleleDatabase.from_labels(["S1", "S2"]), uni3),
        ValidationInstance("two_alleles_victim_SS", case(("S1", "S1"), ("L1", "L2"), ["L1", "L2"]),
                           AlleleDatabase.from_labels(["L1"]),
                           PriorConfig(4, 0.5, TruncatedPoisson(2.0))),
        ValidationInstance("one_allele_degenerate", case(("S1", "S2"), ("L1", "S1"), ["L1"]),
                           AlleleDatabase.from_labels(["L2"]),
                           PriorConfig(3, 2.0, Degenerate(2))),
    ]


@dataclass(frozen=True)
class ValidationRow:
    quantity: str
    closed_form: float
    estimate: float
    std_error: float
    ess: float
    verdict: str


def validate_instance(inst: ValidationInstance, n_samples: int, seed: int) -> ValidationRow:
    from .lr import denominator_full_bayes

    adb = augment(inst.db, inst.case.suspect, inst.case.victim)
    closed = denominator_full_bayes(inst.case, adb, inst.prior)
    try:
        est = is_denominator(inst.case, adb, inst.prior, n_samples, seed)
    except OracleStarvedError:
        return ValidationRow(inst.name, closed, math.nan, math.nan, 0.0, "STARVED")
    ok = abs(est.value - closed) <= 3.0 * est.std_error
    return ValidationRow(inst.name, closed, est.value, est.std_error,
                         est.effective_sample_size, "PASS" if ok else "FAIL")
