"""First-order expansion of the matrix inverse around a base point.

The derivative of A -> A^{-1} at A0 has the closed form
d(A^{-1})_{kl} / dA_{ij} = -(A0^{-1})_{ki} (A0^{-1})_{jl}.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, inverse, nearest_singular_distance


@dataclass(frozen=True)
class LinearizedInverse:
    base: np.ndarray
    f0: np.ndarray          # constant term, = inverse(base)
    f1: np.ndarray          # (n, n, n, n) array indexed (k, l, i, j)

    @property
    def n(self):
        return self.base.shape[0]

    def coeff_matrix(self):
        """f1 flattened to (n*n outputs) x (n*n inputs), row-major."""
        n = self.n
        return self.f1.reshape(n * n, n * n)


def linearize_inverse(a0):
    a0 = as_matrix(a0)
    inv = inverse(a0)
    # f1[k,l,i,j] = -inv[k,i] * inv[j,l]
    f1 = -np.einsum("ki,jl->klij", inv, inv)
    return LinearizedInverse(base=a0, f0=inv, f1=f1)


def eval_linear(lin, aprime):
    """f0 + f1 . aprime, with aprime the offset from the base matrix."""
    aprime = as_matrix(aprime)
    if aprime.shape != lin.base.shape:
        raise ValueError("offset dimension mismatch")
    return lin.f0 + np.einsum("klij,ij->kl", lin.f1, aprime)


def finite_diff_check(a0, h):
    """Max abs deviation of f1 from a central finite difference at step h."""
    a0 = as_matrix(a0)
    if not 0 < h < 0.1 * nearest_singular_distance(a0):
        raise ValueError("step must satisfy 0 < h < 0.1 * singular distance")
    lin = linearize_inverse(a0)
    n = a0.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            bump = np.zeros((n, n))
            bump[i, j] = h
            est = (inverse(a0 + bump) - inverse(a0 - bump)) / (2.0 * h)
            worst = max(worst, float(np.max(np.abs(est - lin.f1[:, :, i, j]))))
    return worst
