#!/usr/bin/env python3
"""Ablations: the noise coefficient and the update strategy.

Two questions about the balancing module, answered on a small synthetic
stream. First, how much noise should pseudo-features carry? Sampling at the
estimated spread (alpha = 1) wins; collapsing to the mean or oversmearing
both cost accuracy. Second, should the balanced classifier be rebuilt from
the real-data-only state each phase (rebase), or keep absorbing its own
pseudo-features (carry)? Rebasing wins at every regularization weight.
"""

import tempfile
from dataclasses import replace
from pathlib import Path

from streamridge import RunConfig, Strategy, run_experiment
from streamridge.synth import generate_stream, generate_validation, driving_imbalance_spec

workdir = Path(tempfile.mkdtemp())
spec = driving_imbalance_spec(d_feat=16, samples_per_task=500, num_tasks=6, seed=7)
generate_stream(spec, workdir / "train.feat")
generate_validation(spec, workdir / "val.feat", per_class=100)

base = RunConfig(
    dataset=str(workdir / "train.feat"),
    val_dataset=str(workdir / "val.feat"),
    gamma=1.0,
    buffer_size=96,
    buffer_seed=0,
    alpha=1.0,
    pfg_seed=0,
)

print("noise coefficient sweep:")
for alpha in [0.0, 0.5, 1.0, 2.0, 4.0]:
    amca = run_experiment(replace(base, alpha=alpha)).amca
    bar = "#" * int(amca * 40)
    print(f"  alpha={alpha:<4} AMCA={amca:.4f} {bar}")

print("\nupdate strategy vs regularization weight:")
for gamma in [0.1, 1.0, 10.0, 100.0]:
    rebase = run_experiment(replace(base, gamma=gamma, strategy=Strategy.REBASE)).amca
    carry = run_experiment(replace(base, gamma=gamma, strategy=Strategy.CARRY)).amca
    print(f"  gamma={gamma:<6} rebase={rebase:.4f}  carry={carry:.4f}"
          f"  ({'rebase' if rebase >= carry else 'carry'} ahead)")
