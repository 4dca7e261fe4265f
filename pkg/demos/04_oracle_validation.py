"""Checking the closed-form denominators against importance sampling.

Parameters are drawn from the prior and weighted by the likelihood of the
augmented database, so the estimator shares no algebra with the closed forms.
"""

from dipstr.oracle import builtin_instances, validate_instance

print(f"{'instance':<24}{'closed':>12}{'estimate':>12}{'z':>7}{'ESS':>11}  verdict")
for inst in builtin_instances():
    row = validate_instance(inst, n_samples=400_000, seed=1)
    z = (row.estimate - row.closed_form) / row.std_error
    print(f"{row.quantity:<24}{row.closed_form:12.6g}{row.estimate:12.6g}{z:7.2f}{row.ess:11.0f}  {row.verdict}")
