"""Exit criteria. Each test prints one ``[ACCEPT] <name>: PASS|FAIL`` line.

Run ``pytest tests/test_acceptance.py -s -v`` to see the report.
"""

import io
import itertools
import random
import time

import numpy as np
import pytest

from dipstr.cli import main
from dipstr.genetics import AlleleDatabase, CaseInput, DipStrAllele, Genotype, augment, observe
from dipstr.io import fixture_path
from dipstr.lr import Method, compute_lr, denominator_full_bayes, denominator_plugin, sensitivity_sweep
from dipstr.oracle import exact_k_posterior_bruteforce, is_denominator
from dipstr.posterior import (
    Degenerate,
    PriorConfig,
    SideStats,
    TruncatedNegBinomial,
    TruncatedPoisson,
    Uniform,
    k_posterior,
    psi_moments,
)

from conftest import make_case

pytestmark = pytest.mark.acceptance

DB = str(fixture_path("mid1950_db.txt"))
CASES = {"case1": str(fixture_path("case1.json")), "case2": str(fixture_path("case2.json"))}


def report(name, ok, detail=""):
    print(f"\n[ACCEPT] {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"{name}: {detail}"


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue()


def test_oracle_equivalence(n0_case, empty_db, tiny_prior):
    t0 = time.perf_counter()
    adb = augment(empty_db, n0_case.suspect, n0_case.victim)
    closed = denominator_full_bayes(n0_case, adb, tiny_prior)
    est = is_denominator(n0_case, adb, tiny_prior, 1_000_000, 0)
    elapsed = time.perf_counter() - t0
    z = (est.value - closed) / est.std_error
    ok = abs(closed - 16 / 175) <= 1e-12 * (16 / 175) and abs(z) <= 3 and elapsed < 30
    report("oracle equivalence", ok,
           f"closed={closed:.12g} IS={est.value:.6g}+-{est.std_error:.2g} z={z:.2f} t={elapsed:.1f}s")


def test_beta_moment_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for n_L, n_S in rng.integers(0, 100_000, size=(1000, 2)):
        mom = psi_moments(int(n_L), int(n_S))
        worst = max(worst, abs(mom.e_psi_sq + 2 * mom.e_psi_one_minus_psi + mom.e_one_minus_psi_sq - 1))
    elapsed = time.perf_counter() - t0
    report("beta moment identity", worst <= 1e-12 and elapsed < 1, f"max_err={worst:.2e} t={elapsed:.2f}s")


def test_k_posterior_bruteforce_agreement():
    t0 = time.perf_counter()
    worst, points = 0.0, 0
    priors = [Uniform(), TruncatedPoisson(2.0), TruncatedNegBinomial(2.0, 0.5)]
    for m in range(1, 9):
        for k_b in range(1, m + 1):
            stats = SideStats.from_counts([1 + (i % 3) for i in range(k_b)])
            for alpha, kp in itertools.product([0.5, 1.0, 2.0], priors):
                prior = PriorConfig(m, alpha, kp)
                brute = exact_k_posterior_bruteforce(stats, prior)
                closed = k_posterior(stats, prior).as_dict()
                for k in set(brute) | set(closed):
                    worst = max(worst, abs(brute.get(k, 0.0) - closed.get(k, 0.0)))
                points += 1
    elapsed = time.perf_counter() - t0
    report("k-posterior brute-force agreement", worst <= 1e-10 and elapsed < 10,
           f"grid={points} max_err={worst:.2e} t={elapsed:.2f}s")


def _outcome_sums(adb, victim, prior):
    side = "S" if victim.a1.dip == "L" else "L"
    universe = list(adb.counts(side))
    obs_list = [list(p) for p in itertools.combinations(universe, 2)] + [[a] for a in universe] + [[]]
    full = plug = 0.0
    for obs in obs_list:
        suspect = Genotype(obs[0], obs[-1] if len(obs) == 2 else victim.a1) if obs else victim
        case = CaseInput(victim, suspect, observe(victim, suspect))
        full += denominator_full_bayes(case, adb, prior)
        plug += denominator_plugin(case, adb, prior)
    return full, plug


def test_outcome_normalisation():
    t0 = time.perf_counter()
    rng = random.Random(50)
    worst_full = worst_plug = 0.0
    for _ in range(50):
        victim_dip = rng.choice("LS")
        side = "S" if victim_dip == "L" else "L"
        victim = Genotype(DipStrAllele(victim_dip, rng.choice("123")), DipStrAllele(victim_dip, rng.choice("123")))
        suspect = Genotype(DipStrAllele(side, rng.choice("1234")), DipStrAllele(rng.choice("LS"), rng.choice("1234")))
        base = AlleleDatabase(tuple(DipStrAllele(rng.choice("LS"), rng.choice("123456"))
                                    for _ in range(rng.randint(0, 12))))
        adb = augment(base, suspect, victim)
        kb = adb.k_b(side)
        prior = PriorConfig(kb + rng.randint(0, 5), rng.choice([0.5, 1.0, 2.0]), Degenerate(kb))
        full, plug = _outcome_sums(adb, victim, prior)
        worst_full = max(worst_full, abs(full - 1))
        worst_plug = max(worst_plug, abs(plug - 1))
    elapsed = time.perf_counter() - t0
    ok = worst_full <= 1e-10 and worst_plug <= 1e-12 and elapsed < 5
    report("outcome normalisation", ok, f"full_err={worst_full:.2e} plugin_err={worst_plug:.2e} t={elapsed:.2f}s")


def _stats_values(case_path):
    code, out = run_cli("stats", "--db", DB, "--case", case_path)
    assert code == 0
    return dict(line.split(": ", 1) for line in out.splitlines())


def test_case_summary_counts():
    s1, s2 = _stats_values(CASES["case1"]), _stats_values(CASES["case2"])
    got = [(s["n_L"], s["n1_L"], s["k_b_L"]) for s in (s1, s2)]
    k_hat = s1["k_hat_L"].split()[0]
    ok = got == [("81", "2", "6"), ("80", "2", "6")] and k_hat == str(round(648 / 79)) == "8"
    report("case summary counts", ok, f"(n_L, n1_L, k_b_L)={got} k_hat={k_hat}")


def test_method_proximity():
    from dipstr.io import read_cases, read_database

    t0 = time.perf_counter()
    db = read_database(DB)
    alphas = [round(0.5 + 0.05 * i, 2) for i in range(31)]
    worst = {"plugin": 0.0, "gt": 0.0}
    for path in CASES.values():
        case = read_cases(path)[0]
        rows = sensitivity_sweep(case, db, alphas, [100], [Uniform()], list(Method))
        lr = {(r.method.value, r.alpha): r.log10_lr for r in rows}
        assert all(r.status == "ok" for r in rows)
        for a in alphas:
            for other in worst:
                worst[other] = max(worst[other], abs(lr[("full", a)] - lr[(other, a)]))
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) <= 1 and elapsed < 5
    report("method proximity", ok,
           f"max|full-plugin|={worst['plugin']:.3f} max|full-gt|={worst['gt']:.3f} t={elapsed:.2f}s")


def test_m_insensitivity(mid1950_db, case1):
    t0 = time.perf_counter()
    values = [compute_lr(case1, mid1950_db, PriorConfig(m, 1.0)).log10_lr for m in (50, 100, 200)]
    spread = max(values) - min(values)
    elapsed = time.perf_counter() - t0
    report("m-insensitivity", spread <= 0.5 and elapsed < 5, f"log10_lr={['%.6f' % v for v in values]} spread={spread:.2e}")


def test_symmetry_suite():
    t0 = time.perf_counter()
    rng = random.Random(200)
    ids = ["1", "2", "3", "9", "11", "13"]
    worst, checked = 0.0, 0
    for _ in range(200):
        vd = rng.choice("LS")
        od = "S" if vd == "L" else "L"
        victim = Genotype(DipStrAllele(vd, rng.choice(ids)), DipStrAllele(vd, rng.choice(ids)))
        suspect = Genotype(DipStrAllele(od, rng.choice(ids)), DipStrAllele(rng.choice("LS"), rng.choice(ids)))
        case = CaseInput(victim, suspect, observe(victim, suspect))
        db = AlleleDatabase(tuple(DipStrAllele(rng.choice("LS"), rng.choice(ids)) for _ in range(rng.randint(0, 40))))
        prior = PriorConfig(rng.choice([20, 100]), rng.choice([0.5, 1.0, 2.0]))
        perm = dict(zip(ids, rng.sample(ids, len(ids))))
        for method in Method:
            base = compute_lr(case, db, prior, method).log10_lr
            mirror = compute_lr(case.mirrored(), db.mirrored(), prior, method).log10_lr
            relabel = compute_lr(case.relabel(perm), db.relabel(perm), prior, method).log10_lr
            worst = max(worst, abs(base - mirror), abs(base - relabel))
            checked += 1
    elapsed = time.perf_counter() - t0
    report("symmetry suite", worst <= 1e-12 and elapsed < 10, f"evaluations={checked} max_diff={worst:.2e} t={elapsed:.2f}s")


def test_determinism(tmp_path):
    outputs = []
    for i in range(2):
        path = tmp_path / f"sweep{i}.csv"
        code, _ = run_cli("sweep", "--db", DB, "--case", CASES["case1"], "--alpha-grid", "0.2:5.0:0.2",
                          "--m-grid", "50,100,200", "--out", str(path))
        assert code == 0
        outputs.append(path.read_bytes())
    sweep_same = outputs[0] == outputs[1]
    runs = [run_cli("validate", "--seed", "0") for _ in range(2)]
    validate_same = runs[0] == runs[1] and runs[0][0] == 0
    report("determinism", sweep_same and validate_same, f"sweep_identical={sweep_same} validate_identical={validate_same}")
