"""Dense small-matrix arithmetic.

Determinants (Leibniz for n <= 4, LU with partial pivoting above),
adjugates, inverses, vectorized norms, rank-deficient constructors and
the smallest singular value via one-sided Jacobi iteration.
"""

import itertools
from enum import Enum

import numpy as np

from .errors import NearSingular, RankConstructionFailed

DET_FLOOR = 1e-14


class NormKind(str, Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


def as_matrix(m):
    """Validate and return a square float64 matrix."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("expected a square matrix, got shape %s" % (a.shape,))
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def norm(m, kind=NormKind.L2):
    """Vectorized norm: the matrix is treated as a flat vector."""
    a = np.asarray(m, dtype=float).ravel()
    kind = NormKind(kind)
    if kind is NormKind.L1:
        return float(np.sum(np.abs(a)))
    if kind is NormKind.L2:
        return float(np.sqrt(np.sum(a * a)))
    return float(np.max(np.abs(a))) if a.size else 0.0


def _lu_factor(m):
    """Doolittle LU with partial pivoting.

    Returns (lu, piv, sign) where lu packs L (unit diagonal, below) and
    U (on/above the diagonal) and sign is the permutation parity.
    """
    a = m.copy()
    n = a.shape[0]
    piv = np.arange(n)
    sign = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            piv[[k, p]] = piv[[p, k]]
            sign = -sign
        if a[k, k] == 0.0:
            continue
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return a, piv, sign


def _lu_solve(lu, piv, b):
    """Solve A x = b for each column of b given the packed factorization."""
    n = lu.shape[0]
    x = b[piv].astype(float, copy=True)
    for k in range(n):  # forward: L y = Pb
        x[k + 1:] -= np.outer(lu[k + 1:, k], x[k])
    for k in range(n - 1, -1, -1):  # back: U x = y
        x[k] /= lu[k, k]
        if k:
            x[:k] -= np.outer(lu[:k, k], x[k])
    return x


def det(m):
    """Determinant: Leibniz sum for n <= 4, LU above."""
    a = as_matrix(m)
    n = a.shape[0]
    if n <= 4:
        total = 0.0
        for perm in itertools.permutations(range(n)):
            sign = 1.0
            prod = 1.0
            seen = list(perm)
            # parity by counting inversions (n <= 4, negligible cost)
            for i in range(n):
                for j in range(i + 1, n):
                    if seen[i] > seen[j]:
                        sign = -sign
            for i in range(n):
                prod *= a[i, perm[i]]
            total += sign * prod
        return float(total)
    lu, _, sign = _lu_factor(a)
    return float(sign * np.prod(np.diag(lu)))


def adjugate(m):
    """Adjugate: entry (i, j) is the (j, i) cofactor."""
    a = as_matrix(m)
    n = a.shape[0]
    if n < 2:
        raise ValueError("adjugate requires n >= 2")
    out = np.empty((n, n))
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = a[np.ix_(rows != j, rows != i)]
            out[i, j] = (-1.0) ** (i + j) * det(minor)
    return out


def inverse(m):
    """Inverse via adjugate/determinant for n <= 4, LU solve above."""
    a = as_matrix(m)
    n = a.shape[0]
    d = det(a)
    if abs(d) <= DET_FLOOR * max(1.0, norm(a, NormKind.LINF) ** n):
        raise NearSingular("determinant %g below invertibility floor" % d)
    if n == 1:
        return np.array([[1.0 / a[0, 0]]])
    if n <= 4:
        return adjugate(a) / d
    lu, piv, _ = _lu_factor(a)
    return _lu_solve(lu, piv, np.eye(n))


def random_rank_deficient(n, rank, seed):
    """Product B @ C with B n-by-rank, C rank-by-n, entries uniform [-1, 1]."""
    if not 0 <= rank < n:
        raise ValueError("need 0 <= rank < n")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        if rank == 0:
            return np.zeros((n, n))
        b = rng.uniform(-1.0, 1.0, size=(n, rank))
        c = rng.uniform(-1.0, 1.0, size=(rank, n))
        m = b @ c
        sv = singular_values(m)
        numerical_rank = int(np.sum(sv > 1e-10 * sv[0])) if sv[0] > 0 else 0
        if numerical_rank == rank:
            return m
    raise RankConstructionFailed("no rank-%d draw in 100 attempts" % rank)


def singular_values(m):
    """All singular values, descending, by one-sided Jacobi iteration."""
    a = as_matrix(m).copy()
    n = a.shape[0]
    tol = 1e-12
    for _ in range(60):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = float(a[:, p] @ a[:, p])
                beta = float(a[:, q] @ a[:, q])
                gamma = float(a[:, p] @ a[:, q])
                if gamma * gamma <= tol * tol * alpha * beta:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                if zeta == 0.0:
                    t = 1.0
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = cs * t
                cp = a[:, p].copy()
                a[:, p] = cs * cp - sn * a[:, q]
                a[:, q] = sn * cp + cs * a[:, q]
        if not rotated:
            break
    sv = np.sqrt(np.sum(a * a, axis=0))
    return np.sort(sv)[::-1]


def nearest_singular_distance(m):
    """Smallest singular value = Frobenius distance to the singular set."""
    sv = singular_values(m)
    return float(sv[-1])


def write_matrix_text(m, path):
    """Text format: first line n, then n rows of space-separated values."""
    a = as_matrix(m)
    lines = [str(a.shape[0])]
    for row in a:
        lines.append(" ".join("%.17g" % v for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_text(path):
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError("empty matrix file: %s" % path)
    n = int(tokens[0])
    vals = [float(t) for t in tokens[1:]]
    if len(vals) != n * n:
        raise ValueError("expected %d values, got %d" % (n * n, len(vals)))
    return np.array(vals).reshape(n, n)
