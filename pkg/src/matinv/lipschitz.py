"""Executable algebra of polynomial Lipschitz bounds.

A bound certifies ||f(x) - f(y)|| <= sum_i f_i(||x||, ||y||) * d^i with
d = ||x - y||. Bivariate polynomials f_i are coefficient maps
{(exp_x, exp_y): coeff}; univariate value bounds ||g(x)|| <= V(||x||)
are maps {exp: coeff}. All norms are L2 and all coefficients are kept
nonnegative, so every algebraic step is a monotone over-approximation.
"""

import math
from dataclasses import dataclass, field

import numpy as np


def _clean(poly):
    return {k: v for k, v in poly.items() if v != 0.0}


def _add(p, q):
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0.0) + v
    return _clean(out)


def _mul1(p, q):
    """Univariate product."""
    out = {}
    for a, ca in p.items():
        for b, cb in q.items():
            out[a + b] = out.get(a + b, 0.0) + ca * cb
    return _clean(out)


def _pow1(p, k):
    out = {0: 1.0}
    for _ in range(k):
        out = _mul1(out, p)
    return out


def _mul2(p, q):
    """Bivariate product."""
    out = {}
    for (ax, ay), ca in p.items():
        for (bx, by), cb in q.items():
            key = (ax + bx, ay + by)
            out[key] = out.get(key, 0.0) + ca * cb
    return _clean(out)


def _eval1(p, t):
    return sum(c * t ** e for e, c in p.items())


def _eval2(p, nx, ny):
    return sum(c * nx ** ex * ny ** ey for (ex, ey), c in p.items())


@dataclass(frozen=True)
class PolyLipBound:
    degree: int
    terms: dict = field(default_factory=dict)  # i -> {(ex, ey): coeff}
    norm_kind: str = "l2"

    def __post_init__(self):
        for i, poly in self.terms.items():
            if not 0 <= i <= self.degree:
                raise ValueError("term power %d outside degree %d" % (i, self.degree))
            for coeff in poly.values():
                if not (math.isfinite(coeff) and coeff >= 0):
                    raise ValueError("coefficients must be finite and >= 0")


def lipschitz_bound(k):
    """Plain K-Lipschitz function as a degree-1 bound."""
    return PolyLipBound(degree=1, terms={1: {(0, 0): float(k)}})


def eval_bound(bound, nx, ny, d):
    if min(nx, ny, d) < 0:
        raise ValueError("norm arguments must be nonnegative")
    return sum(_eval2(poly, nx, ny) * d ** i for i, poly in bound.terms.items())


def compose(f, g, g_value_bound):
    """Bound for f o g.

    g_value_bound is a univariate polynomial {exp: coeff} dominating
    ||g(x)|| in terms of ||x||. f's norm arguments are substituted by
    the value bound and f's distance argument by g's bound; the result
    has degree exactly n_f * n_g.
    """
    if f.norm_kind != g.norm_kind:
        raise ValueError("norm kinds must match")
    v = _clean(dict(g_value_bound))
    # g's bound as a polynomial in d with bivariate coefficients
    g_poly = {j: dict(poly) for j, poly in g.terms.items()}
    result = {}
    g_power = {0: {(0, 0): 1.0}}  # (g bound)^0
    for i in range(0, f.degree + 1):
        if i > 0:
            nxt = {}
            for j1, p1 in g_power.items():
                for j2, p2 in g_poly.items():
                    prod = _mul2(p1, p2)
                    if j1 + j2 in nxt:
                        nxt[j1 + j2] = _add(nxt[j1 + j2], prod)
                    else:
                        nxt[j1 + j2] = prod
            g_power = nxt
        if i not in f.terms:
            continue
        # f_i evaluated at (V(nx), V(ny))
        fi = {}
        for (ex, ey), c in f.terms[i].items():
            vx = _pow1(v, ex)
            vy = _pow1(v, ey)
            for ax, cx in vx.items():
                for ay, cy in vy.items():
                    key = (ax, ay)
                    fi[key] = fi.get(key, 0.0) + c * cx * cy
        for j, poly in g_power.items():
            scaled = _mul2(fi, poly)
            result[j] = _add(result.get(j, {}), scaled)
    return PolyLipBound(degree=f.degree * g.degree,
                        terms={i: p for i, p in result.items() if p},
                        norm_kind=f.norm_kind)


def concat(f, g):
    """Bound for x -> (f(x), g(x)): coefficient-wise sum."""
    if f.norm_kind != g.norm_kind:
        raise ValueError("norm kinds must match")
    terms = {}
    for src in (f.terms, g.terms):
        for i, poly in src.items():
            terms[i] = _add(terms.get(i, {}), poly)
    return PolyLipBound(degree=max(f.degree, g.degree), terms=terms,
                        norm_kind=f.norm_kind)


def from_jacobian_poly(p, in_dim, out_dim):
    """Bound from a polynomial dominating every Jacobian entry.

    Mean value theorem along the segment: the gradient norm of each
    output is at most sqrt(in_dim) * p(||y|| + d), and the out_dim
    outputs aggregate with another sqrt(out_dim) under L2.
    """
    p = _clean(dict(p))
    if any(c < 0 for c in p.values()):
        raise ValueError("p coefficients must be >= 0")
    factor = math.sqrt(out_dim) * math.sqrt(in_dim)
    terms = {}
    for m, coeff in p.items():
        for k in range(m + 1):
            i = k + 1  # one extra power of d from the segment length
            poly = {(0, m - k): coeff * math.comb(m, k) * factor}
            terms[i] = _add(terms.get(i, {}), poly)
    degree = (max(p) if p else 0) + 1
    return PolyLipBound(degree=degree, terms=terms)


# ---------------------------------------------------------------- blocks

class FullyConnected:
    def __init__(self, weights, bias):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = np.asarray(bias, dtype=float)

    def apply(self, x):
        return self.weights @ x + self.bias

    def operator_norm(self, tol=1e-8, max_iter=10000):
        """sqrt of the largest eigenvalue of W^T W by power iteration."""
        w = self.weights
        gram = w.T @ w
        v = np.ones(gram.shape[0]) / math.sqrt(gram.shape[0])
        last = 0.0
        for _ in range(max_iter):
            v = gram @ v
            lam = float(np.sqrt(v @ v))
            if lam == 0.0:
                return 0.0
            v /= lam
            if abs(lam - last) <= tol * max(lam, 1.0):
                break
            last = lam
        return math.sqrt(lam)

    def bound(self):
        return lipschitz_bound(self.operator_norm())

    def value_bound(self):
        b = float(np.sqrt(np.sum(self.bias ** 2)))
        return _clean({1: self.operator_norm(), 0: b})


class ReLU:
    def apply(self, x):
        return np.maximum(x, 0.0)

    def bound(self):
        return lipschitz_bound(1.0)

    def value_bound(self):
        return {1: 1.0}


class Tanh:
    def apply(self, x):
        return np.tanh(x)

    def bound(self):
        return lipschitz_bound(1.0)

    def value_bound(self):
        return {1: 1.0}


class Sigmoid:
    def __init__(self, dim=1):
        self.dim = dim

    def apply(self, x):
        return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))

    def bound(self):
        return lipschitz_bound(1.0)

    def value_bound(self):
        return {1: 1.0, 0: 0.5 * math.sqrt(self.dim)}


class ElementwisePower:
    def __init__(self, n):
        if n < 1:
            raise ValueError("power must be >= 1")
        self.n = int(n)

    def apply(self, x):
        return np.asarray(x, dtype=float) ** self.n

    def bound(self):
        # f_1 = sum_{i=0}^{n-1} ||x||^i ||y||^{n-1-i}
        poly = {(i, self.n - 1 - i): 1.0 for i in range(self.n)}
        return PolyLipBound(degree=1, terms={1: poly})

    def value_bound(self):
        return {self.n: 1.0}


class Residual:
    """y = x + f(x) with f a chain of inner blocks."""

    def __init__(self, inner):
        self.inner = list(inner)

    def apply(self, x):
        y = np.asarray(x, dtype=float)
        return y + apply_chain(self.inner, y)

    def bound(self):
        inner_bound, _ = chain_bound(self.inner)
        return concat(inner_bound, lipschitz_bound(1.0))

    def value_bound(self):
        _, inner_value = chain_bound(self.inner)
        return _add({1: 1.0}, inner_value)


def bound_for_block(block):
    return block.bound()


def apply_chain(blocks, x):
    y = np.asarray(x, dtype=float)
    for block in blocks:
        y = block.apply(y)
    return y


def chain_bound(blocks):
    """(PolyLipBound, value bound) for a left-to-right block chain."""
    if not blocks:
        raise ValueError("empty chain")
    bound = blocks[0].bound()
    value = _clean(dict(blocks[0].value_bound()))
    for block in blocks[1:]:
        bound = compose(block.bound(), bound, value)
        value = _substitute1(_clean(dict(block.value_bound())), value)
    return bound, value


def _substitute1(outer, inner):
    """outer(inner(t)) for univariate coefficient maps."""
    out = {}
    for e, c in outer.items():
        powed = _pow1(inner, e)
        for k, v in powed.items():
            out[k] = out.get(k, 0.0) + c * v
    return _clean(out)


def check_bound_numeric(blocks, bound, n_pairs, value_range, seed, dim=None):
    """Count sampled pairs violating the bound (must be 0 when sound)."""
    blocks = list(blocks)
    if dim is None:
        dim = next((b.weights.shape[1] for b in blocks
                    if isinstance(b, FullyConnected)), 1)
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(int(n_pairs)):
        x = rng.uniform(-value_range, value_range, size=dim)
        y = rng.uniform(-value_range, value_range, size=dim)
        actual = float(np.sqrt(np.sum((apply_chain(blocks, x)
                                       - apply_chain(blocks, y)) ** 2)))
        nx = float(np.sqrt(x @ x))
        ny = float(np.sqrt(y @ y))
        d = float(np.sqrt((x - y) @ (x - y)))
        allowed = eval_bound(bound, nx, ny, d)
        if actual > allowed * (1.0 + 1e-9) + 1e-12:
            violations += 1
    return violations


def format_bound(bound):
    """Canonical text: sum over i of [poly_i(|x|,|y|)]*d^i, sorted."""
    pieces = []
    for i in sorted(bound.terms):
        poly = bound.terms[i]
        terms = []
        for (ex, ey) in sorted(poly):
            c = poly[(ex, ey)]
            part = "%.12g" % c
            if ex:
                part += "*|x|^%d" % ex
            if ey:
                part += "*|y|^%d" % ey
            terms.append(part)
        pieces.append("[%s]*d^%d" % (" + ".join(terms) if terms else "0", i))
    return " + ".join(pieces) if pieces else "[0]*d^0"
