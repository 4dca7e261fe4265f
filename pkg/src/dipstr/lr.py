"""Likelihood ratios for one locus, several loci, and over hyperparameter grids.

Under the prosecution hypothesis the trace is certain given the suspect, so
the likelihood ratio is ``1 / E[p(o1, o2 | b, theta, h_d) | b]``. The
integrand depends on the victim's DIP class and on how many alleles were
observed:

=============  ===========================================  ===============
observed       victim L-L (side S)                          victim S-S
=============  ===========================================  ===============
(i, j)         2 th_i th_j                                  same, side L
(i,)           th_i^2 + 2 th_i psi                          th_i^2 + 2 th_i (1-psi)
none           psi^2                                        (1-psi)^2
=============  ===========================================  ===============
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Iterable, Optional, Sequence

from .errors import DipStrError, InputError, ModelError
from .genetics import (
    AlleleDatabase,
    AugmentedDatabase,
    CaseInput,
    CaseKind,
    Exclusion,
    NoAllele,
    OneAllele,
    TwoAlleles,
    VictimHeterozygous,
    augment,
    classify_case,
)
from .posterior import (
    Degenerate,
    KPrior,
    PriorConfig,
    SideStats,
    k_posterior,
    psi_moments,
    side_stats,
    theta_moments,
)


class Method(str, Enum):
    FULL_BAYES = "full"
    PLUGIN = "plugin"
    GOOD_TURING = "gt"

    @classmethod
    def parse(cls, text: str) -> "Method":
        aliases = {
            "full": cls.FULL_BAYES,
            "full_bayes": cls.FULL_BAYES,
            "plugin": cls.PLUGIN,
            "plug-in": cls.PLUGIN,
            "gt": cls.GOOD_TURING,
            "good_turing": cls.GOOD_TURING,
        }
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise InputError(f"unknown method {text!r}; expected full, plugin or gt") from None

    def __str__(self) -> str:
        return self.value


class Status(str, Enum):
    OK = "ok"
    EXCLUSION = "exclusion"
    UNINFORMATIVE = "uninformative"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class LrResult:
    """Outcome of one likelihood-ratio evaluation.

    ``denominator`` is NaN for exclusions, where it is never evaluated.
    """

    denominator: float
    lr: float
    log10_lr: float
    method: Method
    status: Status
    diagnostics: dict = field(default_factory=dict)
    locus: str = ""

    @classmethod
    def from_denominator(cls, denominator: float, method: Method, diagnostics=None, locus=""):
        if not 0 < denominator <= 1 + 1e-12:
            raise ModelError(f"denominator {denominator!r} is not a probability in (0, 1]")
        return cls(
            denominator,
            1.0 / denominator,
            -math.log10(denominator),
            method,
            Status.OK,
            dict(diagnostics or {}),
            locus,
        )


def _require_informative(kind: CaseKind) -> None:
    if isinstance(kind, (VictimHeterozygous, Exclusion)):
        raise InputError(f"no denominator for case kind {type(kind).__name__}")


def _full_bayes(kind: CaseKind, adb: AugmentedDatabase, prior: PriorConfig) -> float:
    _require_informative(kind)
    if isinstance(kind, NoAllele):
        return psi_moments(adb.n_L, adb.n_S).mass_sq(kind.victim_side)
    if isinstance(kind, TwoAlleles):
        mom = theta_moments(kind.side, adb, prior, kind.i, kind.j)
        return 2.0 * mom.e_theta_i_theta_j
    mom = theta_moments(kind.side, adb, prior, kind.i)
    return mom.e_theta_i_sq + 2.0 * mom.e_theta_i_times_othermass


def _plugin(kind: CaseKind, adb: AugmentedDatabase, prior: PriorConfig) -> float:
    _require_informative(kind)
    psi = psi_moments(adb.n_L, adb.n_S)
    if isinstance(kind, NoAllele):
        return psi.mass(kind.victim_side) ** 2
    stats = side_stats(adb, kind.side)
    alpha = prior.alpha
    scale = psi.mass(kind.side) / (stats.k_b * alpha + stats.n_side)

    def theta_hat(allele):
        return (alpha + stats.counts[allele]) * scale

    if isinstance(kind, TwoAlleles):
        return 2.0 * theta_hat(kind.i) * theta_hat(kind.j)
    t = theta_hat(kind.i)
    other = psi.mass("S" if kind.side == "L" else "L")
    return t * t + 2.0 * t * other


def denominator_full_bayes(case: CaseInput, adb: AugmentedDatabase, prior: PriorConfig) -> float:
    """Posterior expectation of the defence-hypothesis probability of the trace."""
    return _full_bayes(classify_case(case), adb, prior)


def denominator_plugin(case: CaseInput, adb: AugmentedDatabase, prior: PriorConfig) -> float:
    """The same expression evaluated at posterior-mean frequencies with k fixed at k_b."""
    return _plugin(classify_case(case), adb, prior)


def empirical_k_hat_raw(stats: SideStats, alpha: float) -> float:
    """Solve ``(k - k_b) alpha / (k alpha + n) = n1 / n`` for ``k``; inf if all singletons."""
    n, n1, k_b = stats.n_side, stats.n1, stats.k_b
    if n < 1:
        raise InputError("empirical k estimate needs at least one allele of the class")
    denom = alpha * n - alpha * n1
    if denom == 0:
        return math.inf
    return (n1 * n + k_b * alpha * n) / denom


def empirical_k_hat(stats: SideStats, alpha: float, m: int) -> int:
    """Good-Turing matched number of types, rounded half-up and clamped to [k_b, m]."""
    raw = empirical_k_hat_raw(stats, alpha)
    lo = max(stats.k_b, 1)
    if math.isinf(raw):
        return max(lo, int(m))
    return int(min(max(math.floor(raw + 0.5), lo), m))


def _diagnostics(kind: CaseKind, adb: AugmentedDatabase, prior: PriorConfig) -> dict:
    diag = {"n": adb.n, "n_L": adb.n_L, "n_S": adb.n_S}
    psi = psi_moments(adb.n_L, adb.n_S)
    diag["e_psi"] = psi.e_psi
    diag["e_psi_sq"] = psi.e_psi_sq
    if isinstance(kind, (TwoAlleles, OneAllele)):
        stats = side_stats(adb, kind.side)
        diag["k_b"] = stats.k_b
        diag["n1"] = stats.n1
        diag["k_post_mean"] = k_posterior(stats, prior).mean()
        diag["k_hat_raw"] = empirical_k_hat_raw(stats, prior.alpha)
        diag["k_hat"] = empirical_k_hat(stats, prior.alpha, prior.m)
    return diag


def compute_lr(
    case: CaseInput,
    db: AlleleDatabase,
    prior: PriorConfig = PriorConfig(),
    method: Method = Method.FULL_BAYES,
) -> LrResult:
    method = Method(method)
    kind = classify_case(case)
    if isinstance(kind, Exclusion):
        return LrResult(
            math.nan, 0.0, -math.inf, method, Status.EXCLUSION,
            {"expected_observation": [str(a) for a in kind.expected.alleles]}, case.locus,
        )
    if isinstance(kind, VictimHeterozygous):
        return LrResult(1.0, 1.0, 0.0, method, Status.UNINFORMATIVE, {}, case.locus)

    adb = augment(db, case.suspect, case.victim)
    diag = _diagnostics(kind, adb, prior)
    if method is Method.FULL_BAYES:
        denominator = _full_bayes(kind, adb, prior)
    elif method is Method.PLUGIN:
        denominator = _plugin(kind, adb, prior)
    else:
        if isinstance(kind, NoAllele):
            denominator = _full_bayes(kind, adb, prior)
        else:
            k_hat = empirical_k_hat(side_stats(adb, kind.side), prior.alpha, prior.m)
            denominator = _full_bayes(kind, adb, prior.with_k_prior(Degenerate(k_hat)))
    return LrResult.from_denominator(denominator, method, diag, case.locus)


def combine_loci(results: Sequence[LrResult]) -> LrResult:
    """Multiply per-locus likelihood ratios, assuming independent loci."""
    if not results:
        raise InputError("cannot combine an empty list of results")
    methods = {r.method for r in results}
    if len(methods) != 1:
        raise InputError(f"results mix methods {sorted(map(str, methods))}")
    method = results[0].method
    loci = ",".join(r.locus for r in results)
    if any(r.status is Status.EXCLUSION for r in results):
        return LrResult(math.nan, 0.0, -math.inf, method, Status.EXCLUSION, {}, loci)
    ok = [r for r in results if r.status is Status.OK]
    if not ok:
        return LrResult(1.0, 1.0, 0.0, method, Status.UNINFORMATIVE, {}, loci)
    log10_lr = math.fsum(r.log10_lr for r in ok)
    denominator = math.prod(r.denominator for r in ok)
    return LrResult(
        denominator, 10.0**log10_lr, log10_lr, method, Status.OK,
        {"loci_ok": len(ok), "loci_total": len(results)}, loci,
    )


@dataclass(frozen=True)
class SweepRow:
    method: Method
    alpha: float
    m: int
    k_prior: str
    log10_lr: float
    status: str


def _sweep_cell(args) -> SweepRow:
    case, db, method, alpha, m, k_prior = args
    try:
        prior = PriorConfig(m, alpha, k_prior)
        result = compute_lr(case, db, prior, method)
        return SweepRow(method, alpha, m, str(k_prior), result.log10_lr, str(result.status))
    except DipStrError as exc:
        return SweepRow(method, alpha, m, str(k_prior), math.nan, f"error:{exc}")


def sensitivity_sweep(
    case: CaseInput,
    db: AlleleDatabase,
    alphas: Iterable[float],
    m_values: Iterable[int],
    priors: Iterable[KPrior],
    methods: Iterable[Method],
    workers: Optional[int] = None,
) -> list[SweepRow]:
    """Evaluate every (method, alpha, m, prior) combination.

    Rows are sorted by method name, alpha, m and then prior position, so the
    output does not depend on ``workers``. Failing cells are reported in the
    row status instead of aborting the sweep.
    """
    alphas, m_values = list(alphas), list(m_values)
    priors, methods = list(priors), [Method(x) for x in methods]
    if not (alphas and m_values and priors and methods):
        raise InputError("sweep grids must be non-empty")
    keyed = sorted(
        product(methods, alphas, m_values, enumerate(priors)),
        key=lambda c: (c[0].value, c[1], c[2], c[3][0]),
    )
    cells = [(case, db, meth, float(a), int(m), pr) for meth, a, m, (_, pr) in keyed]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(_sweep_cell, cells))
    return [_sweep_cell(c) for c in cells]
