"""Geometry around the singular set.

Box regions for training data, clearance certification against the
eps-neighborhood of singular matrices, dataset sampling, and grid
emission for the 2x2 slice/surface figures.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import RegionUnsafe
from .linalg import as_matrix, det, inverse, nearest_singular_distance, singular_values

REJECT_FLOOR = 1e-6


@dataclass(frozen=True)
class BoxRegion:
    """Per-entry box [center_ij - half_width, center_ij + half_width]."""

    center: np.ndarray
    half_width: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_matrix(self.center))
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def n(self):
        return self.center.shape[0]

    def contains(self, m):
        return bool(np.all(np.abs(as_matrix(m) - self.center) <= self.half_width + 1e-15))


def _corners(region, cap=4096):
    n2 = region.n * region.n
    if 2 ** n2 > cap:
        return
    flat = region.center.ravel()
    for signs in itertools.product((-1.0, 1.0), repeat=n2):
        yield (flat + region.half_width * np.array(signs)).reshape(region.center.shape)


def box_clearance(region, grid_per_axis_budget, seed):
    """Upper bound on the box's distance to the singular set.

    Minimum of nearest_singular_distance over the box corners (when
    enumerable) plus `grid_per_axis_budget` seeded uniform interior
    samples.
    """
    rng = np.random.default_rng(seed)
    best = nearest_singular_distance(region.center)
    for corner in _corners(region):
        best = min(best, nearest_singular_distance(corner))
    n = region.n
    for _ in range(int(grid_per_axis_budget)):
        offset = rng.uniform(-region.half_width, region.half_width, size=(n, n))
        best = min(best, nearest_singular_distance(region.center + offset))
    return float(best)


def clearance_lower_bound(region):
    """Analytic bound: sigma_min(center) - half_width * n.

    A per-entry perturbation of magnitude <= c has Frobenius norm <= c*n.
    """
    sv = singular_values(region.center)
    return float(sv[-1] - region.half_width * region.n)


def certify_region(region, eps, budget=64, seed=0):
    """True when both the sampled and analytic clearance checks pass."""
    if clearance_lower_bound(region) <= eps:
        return False
    return box_clearance(region, budget, seed) > 2.0 * eps


def _batch_inverse_2x2(flat):
    """Vectorized adjugate/determinant inverse for a (k, 4) batch.

    Bit-identical to inverse() on each row (same operation order).
    """
    a, b, c, d = flat[:, 0], flat[:, 1], flat[:, 2], flat[:, 3]
    dets = a * d - b * c
    out = np.empty_like(flat)
    out[:, 0] = d / dets
    out[:, 1] = -b / dets
    out[:, 2] = -c / dets
    out[:, 3] = a / dets
    return out, dets


def sample_dataset(region, count, seed, eps=1e-3):
    """`count` pairs (A, inverse(A)) uniform in the box, seeded.

    Samples closer than REJECT_FLOOR to the singular set are redrawn.
    """
    if not certify_region(region, eps, seed=seed):
        raise RegionUnsafe("box around center failed clearance certification")
    rng = np.random.default_rng(seed)
    n = region.n
    pairs = []
    if n == 2:
        flat0 = region.center.ravel()
        while len(pairs) < count:
            todo = count - len(pairs)
            x = flat0 + rng.uniform(-region.half_width, region.half_width, size=(todo, 4))
            inv, dets = _batch_inverse_2x2(x)
            # cheap sufficient screen: sigma_min >= |det| / sigma_max
            fro = np.sqrt(np.sum(x * x, axis=1))
            safe = np.abs(dets) / np.maximum(fro, 1e-300) >= REJECT_FLOOR
            for i in np.flatnonzero(~safe):
                safe[i] = nearest_singular_distance(x[i].reshape(2, 2)) >= REJECT_FLOOR
            for i in np.flatnonzero(safe):
                pairs.append((x[i].reshape(2, 2), inv[i].reshape(2, 2)))
        return pairs
    while len(pairs) < count:
        a = region.center + rng.uniform(-region.half_width, region.half_width, size=(n, n))
        if nearest_singular_distance(a) < REJECT_FLOOR:
            continue
        pairs.append((a, inverse(a)))
    return pairs


_ENTRY_INDEX = {"a11": (0, 0), "a12": (0, 1), "a21": (1, 0), "a22": (1, 1)}

_DET_GRAD = {  # d det / d entry for [[a11,a12],[a21,a22]]
    "a11": lambda m: m[1, 1],
    "a12": lambda m: -m[1, 0],
    "a21": lambda m: -m[0, 1],
    "a22": lambda m: m[0, 0],
}


def emit_meps_slice_2d(fixed, free, value_range, resolution, eps):
    """2D slice of the 2x2 singular set neighborhood.

    fixed: dict of two entry names ("a11".."a22") to values; free: the
    remaining two entry names, in (x, y) plot order. Returns a list of
    (x, y, det, in_meps) rows in row-major grid order. Distance to the
    det = 0 variety is estimated first-order as |det| / ||grad det||
    restricted to the two free entries.
    """
    if len(fixed) != 2 or len(free) != 2 or set(fixed) & set(free):
        raise ValueError("need two fixed and two distinct free entries")
    lo, hi = value_range
    ticks = np.linspace(lo, hi, int(resolution))
    rows = []
    for y in ticks:
        for x in ticks:
            m = np.zeros((2, 2))
            for name, val in fixed.items():
                m[_ENTRY_INDEX[name]] = val
            m[_ENTRY_INDEX[free[0]]] = x
            m[_ENTRY_INDEX[free[1]]] = y
            d = det(m)
            g = np.hypot(_DET_GRAD[free[0]](m), _DET_GRAD[free[1]](m))
            if g == 0.0:
                in_meps = abs(d) < eps
            else:
                in_meps = abs(d) / g < eps
            rows.append((float(x), float(y), float(d), bool(in_meps)))
    return rows


def emit_meps_surface_3d(a11, value_range, resolution):
    """The det = 0 sheet a22 = a12 * a21 / a11 over an (a12, a21) grid."""
    if a11 == 0:
        raise ValueError("a11 must be nonzero")
    lo, hi = value_range
    ticks = np.linspace(lo, hi, int(resolution))
    rows = []
    for a21 in ticks:
        for a12 in ticks:
            rows.append((float(a12), float(a21), float(a12 * a21 / a11)))
    return rows


def save_dataset(path, region, pairs, seed):
    """CSV dataset: header comment, then flattened input + label per line."""
    n = region.n
    center = ",".join("%.17g" % v for v in region.center.ravel())
    with open(path, "w") as fh:
        fh.write("# n=%d count=%d seed=%d half_width=%.17g center=%s\n"
                 % (n, len(pairs), seed, region.half_width, center))
        fh.write(",".join(["x%d" % i for i in range(n * n)]
                          + ["y%d" % i for i in range(n * n)]) + "\n")
        for a, label in pairs:
            vals = list(a.ravel()) + list(label.ravel())
            fh.write(",".join("%.17g" % v for v in vals) + "\n")


def load_dataset(path):
    """Returns (region, seed, pairs) from a dataset CSV."""
    with open(path) as fh:
        header = fh.readline().strip()
        fh.readline()  # column names
        body = fh.read().split()
    if not header.startswith("# "):
        raise ValueError("missing dataset header in %s" % path)
    meta = dict(item.split("=", 1) for item in header[2:].split())
    n = int(meta["n"])
    center = np.array([float(v) for v in meta["center"].split(",")]).reshape(n, n)
    region = BoxRegion(center, float(meta["half_width"]))
    pairs = []
    for line in body:
        vals = [float(v) for v in line.split(",")]
        pairs.append((np.array(vals[: n * n]).reshape(n, n),
                      np.array(vals[n * n:]).reshape(n, n)))
    if len(pairs) != int(meta["count"]):
        raise ValueError("dataset record count mismatch")
    return region, int(meta["seed"]), pairs
