"""Likelihood ratios for the two bundled mixture cases.

Both cases share a victim homozygous for S11. In the first the suspect carries
L2, an allele never seen in the database, plus L13; both show up in the
trace. In the second only L2 is observed, so the suspect's S12 is masked by
the victim's S-class alleles.

    python3 demos/01_case_likelihood_ratios.py
"""

from dipstr import Method, PriorConfig, compute_lr
from dipstr.io import fixture_path, read_cases, read_database

db = read_database(fixture_path("mid1950_db.txt"))
prior = PriorConfig(m=100, alpha=1.0)

for name in ("case1.json", "case2.json"):
    case = read_cases(fixture_path(name))[0]
    seen = "+".join(map(str, case.observation.alleles)) or "nothing"
    print(f"{name}: victim {case.victim}, suspect {case.suspect}, observed {seen}")
    for method in Method:
        r = compute_lr(case, db, prior, method)
        print(f"  {method.value:>6}  LR = {r.lr:10.2f}   log10 LR = {r.log10_lr:.4f}")
    d = compute_lr(case, db, prior).diagnostics
    print(f"  n_L = {d['n_L']}, k_b = {d['k_b']}, singletons = {d['n1']}, "
          f"E[k | b] = {d['k_post_mean']:.2f}, Good-Turing k = {d['k_hat']}")
    print()
