"""Point-to-point LPP value against the top GUE eigenvalue at a small size.

Both samples are centred and scaled as W_n; the KS statistic should sit below
the 1% critical value.
"""
from alpp.expt import ExperimentConfig, run

res = run(ExperimentConfig(command="twcheck", n=10, delta=2.0 ** -10, seeds=(0, 300)))
s = res.summary
print(f"KS D = {s['ks_statistic']:.4f} (1% critical {s['ks_critical_1pct']:.4f}, p = {s['ks_pvalue']:.3f})")
print(f"mean W: LPP {s['dp']['mean']:.3f}  GUE {s['gue']['mean']:.3f}")
