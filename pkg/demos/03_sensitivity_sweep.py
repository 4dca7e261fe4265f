"""Sensitivity of the case 1 log10 LR to the Dirichlet concentration and m.

Writes the sweep to ``sweep_case1.csv`` in the current directory and prints a
compact table of the full Bayesian column.
"""

from dipstr import Method, Uniform, TruncatedPoisson, sensitivity_sweep
from dipstr.io import fixture_path, read_cases, read_database, write_sweep_csv

db = read_database(fixture_path("mid1950_db.txt"))
case = read_cases(fixture_path("case1.json"))[0]
alphas = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0]
rows = sensitivity_sweep(case, db, alphas, [50, 100, 200], [Uniform(), TruncatedPoisson(10.0)],
                         list(Method), workers=4)

with open("sweep_case1.csv", "w", newline="") as fh:
    write_sweep_csv(rows, fh)
print(f"wrote {len(rows)} rows to sweep_case1.csv\n")

table = {(r.method, r.alpha, r.m, r.k_prior): r.log10_lr for r in rows}
print("alpha   " + "  ".join(f"{m.value:>7}" for m in Method) + "   (m=100, uniform k)")
for a in alphas:
    print(f"{a:5.2f}   " + "  ".join(f"{table[(m, a, 100, 'uniform')]:7.3f}" for m in Method))
