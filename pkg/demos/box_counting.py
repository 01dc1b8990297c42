"""Box-counting slope of the set where Z_n moves, next to two calibration fixtures."""
from alpp.expt import ExperimentConfig, run

for synth in ("linear", "cantor"):
    cfg = ExperimentConfig(command="dimension", eps=tuple(2.0 ** -k for k in range(2, 12)), M=1.0, synthetic=synth)
    print(f"{synth:>8}: slope {run(cfg).summary['slope']:.4f}")
s = run(ExperimentConfig(command="dimension", n=500, M=2.0, seeds=(0, 10))).summary
print(f"  Z_n: slope {s['slope']:.3f}, CI {s['ci'][0]:.3f}..{s['ci'][1]:.3f}, mean counts {s['mean_counts']}")
