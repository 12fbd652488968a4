"""Explicit 2-layer ReLU network realizing the linearized inverse.

Uses the identity x = ReLU(x) - ReLU(-x): hidden pair (2m, 2m+1)
computes ReLU(+row_m . x) and ReLU(-row_m . x) for the m-th row of the
derivative, and the output layer recombines them as f0 + h+ - h-.
Inputs are raw offsets from the base matrix; outputs are raw inverses.
"""

import numpy as np

from .errors import NearSingular
from .linalg import inverse, nearest_singular_distance
from .linearize import linearize_inverse
from .mlp import MlpModel, forward


def build_two_layer(a0):
    lin = linearize_inverse(a0)
    n2 = lin.n * lin.n
    rows = lin.coeff_matrix()
    w1 = np.zeros((2 * n2, n2))
    w1[0::2] = rows
    w1[1::2] = -rows
    b1 = np.zeros(2 * n2)
    w2 = np.zeros((n2, 2 * n2))
    for m in range(n2):
        w2[m, 2 * m] = 1.0
        w2[m, 2 * m + 1] = -1.0
    b2 = lin.f0.ravel().copy()
    return MlpModel(layers=[(w1, b1), (w2, b2)])


def quadratic_error_sweep(a0, scales, samples_per_scale, seed):
    """Max abs deviation of the network from the true inverse per scale.

    Rows (scale, max_abs_error, skipped) sorted by scale descending;
    skipped counts draws rejected by the inverse's singularity floor.
    """
    a0 = np.asarray(a0, dtype=float)
    dist = nearest_singular_distance(a0)
    for c in scales:
        if not c < dist / 2:
            raise ValueError("scale %g exceeds half the singular distance" % c)
    model = build_two_layer(a0)
    rng = np.random.default_rng(seed)
    n = a0.shape[0]
    rows = []
    for c in sorted(scales, reverse=True):
        worst = 0.0
        skipped = 0
        for _ in range(int(samples_per_scale)):
            aprime = rng.uniform(-c, c, size=(n, n))
            try:
                truth = inverse(a0 + aprime)
            except NearSingular:
                skipped += 1
                continue
            pred = forward(model, aprime.ravel()).reshape(n, n)
            worst = max(worst, float(np.max(np.abs(truth - pred))))
        rows.append((float(c), worst, skipped))
    return rows
