"""Probability of two disjoint polymers between short intervals, and its decay.

Estimates P(two disjoint polymers [0, 2e] -> [0, 2e]) at n = 216 for a few e and
fits the power law in e.
"""
from alpp.expt import ExperimentConfig, run

res = run(ExperimentConfig(command="exponent", n=216, eps=(0.25, 0.125, 0.0625), seeds=(0, 400), n_boot=200))
s = res.summary
for e, p, se in zip(s["eps"], s["p"], s["se"]):
    print(f"eps = {e:<7g} P = {p:.4f} +- {se:.4f}")
print(f"fitted exponent {s['exponent']:.3f}, bootstrap CI {s['ci'][0]:.3f}..{s['ci'][1]:.3f}")
