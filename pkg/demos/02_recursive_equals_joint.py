#!/usr/bin/env python3
"""The weight-invariant property, live.

Feed batches one at a time through the recursive update, then refit the
whole dataset at once with the closed form. The two weight matrices agree
to floating-point precision, no matter how the rows were cut into batches:
that equivalence is what lets the learner stay exemplar-free.
"""

import numpy as np

from streamridge import RidgeState, joint_fit, update

rng = np.random.default_rng(7)
d, C, gamma = 24, 4, 1.0

X = rng.standard_normal((600, d))
Y = rng.standard_normal((600, C))

# Cut the rows into a handful of unequal batches.
cuts = [0, 90, 100, 350, 351, 600]
state = RidgeState.fresh(d, C, gamma)
for lo, hi in zip(cuts[:-1], cuts[1:]):
    state = update(state, X[lo:hi], Y[lo:hi])
    print(f"after rows [{lo:3d}, {hi:3d}): |W| = {np.abs(state.W).max():.6f}")

reference = joint_fit(X, Y, gamma)
gap = np.abs(state.W - reference.W).max()
print(f"\nmax |W_recursive - W_joint| = {gap:.3e}")

# The same holds for the autocorrelation inverse the update maintains.
direct = np.linalg.inv(X.T @ X + gamma * np.eye(d))
print(f"max |R_recursive - inv(X^T X + gamma I)| = {np.abs(state.R - direct).max():.3e}")

# Batch order is irrelevant: the joint solution knows nothing about order.
shuffled = RidgeState.fresh(d, C, gamma)
pairs = list(zip(cuts[:-1], cuts[1:]))
for lo, hi in reversed(pairs):
    shuffled = update(shuffled, X[lo:hi], Y[lo:hi])
print(f"batch order changes W by {np.abs(shuffled.W - state.W).max():.3e}")
