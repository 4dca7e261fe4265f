"""How the database shapes the posterior on the number of L-class types.

A handful of singletons leaves room for many unseen types; the same number of
distinct alleles seen many times each pins ``k`` close to ``k_b``.
"""

import numpy as np

from dipstr import PriorConfig, SideStats, TruncatedPoisson, Uniform, k_posterior

prior = PriorConfig(m=30, alpha=1.0, k_prior=Uniform())
databases = {
    "six singletons": [1, 1, 1, 1, 1, 1],
    "mixed (case 1 L side)": [30, 25, 15, 1, 9, 1],
    "six alleles x 40": [40] * 6,
}

for label, counts in databases.items():
    post = k_posterior(SideStats.from_counts(counts), prior)
    p = post.probabilities()
    top = np.argsort(p)[::-1][:3]
    modes = ", ".join(f"k={post.ks[i]} ({p[i]:.3f})" for i in top)
    print(f"{label:>24}: E[k|b] = {post.mean():6.2f}   most likely {modes}")

print("\nSame mixed database under a Poisson(4) prior on k:")
post = k_posterior(SideStats.from_counts(databases["mixed (case 1 L side)"]),
                   prior.with_k_prior(TruncatedPoisson(4.0)))
print(f"  E[k|b] = {post.mean():.2f}")
