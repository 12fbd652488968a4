"""Activation-region analysis of 2-layer ReLU networks.

Decomposes a one-hidden-layer network over a box into activation
patterns, extracts the exact affine map per pattern, compares it to the
linearized inverse, and bounds the deviation by linear programming.

Inputs are offsets from the box center. Models carrying a
normalization block operate on offsets divided by the half width, so
their analysis box is [-1, 1]^(n^2) and LP gap values are rescaled by
the half width back to raw units.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyRegion
from .simplex import OPTIMAL, solve_lp


@dataclass(frozen=True)
class ActivationPattern:
    units: tuple            # indices of live hidden units
    active: tuple           # bool per live unit
    frequency: float = None

    def label(self):
        return "".join("h%d%s" % (u, "+" if a else "-")
                       for u, a in zip(self.units, self.active))


@dataclass(frozen=True)
class AffineMap:
    coefficients: np.ndarray  # out_dim x in_dim
    bias: np.ndarray          # out_dim


def _check_two_layer(model):
    if len(model.layers) != 2:
        raise ValueError("region analysis requires exactly one hidden layer")


def live_units(model):
    """Hidden units that are not dead (zero weight row and zero bias)."""
    _check_two_layer(model)
    w1, b1 = model.layers[0]
    return tuple(u for u in range(w1.shape[0])
                 if np.any(w1[u] != 0.0) or b1[u] != 0.0)


def _analysis_frame(model, region):
    """(input half width, output scale) in model input units."""
    if model.normalization is not None:
        center, hw = model.normalization
        if region is not None:
            if not np.allclose(center, region.center) or not np.isclose(
                    hw, region.half_width):
                raise ValueError("region does not match the model normalization")
        return 1.0, hw
    return (region.half_width if region is not None else 1.0), 1.0


def sample_patterns(model, region, count, seed):
    """Histogram of activation patterns over uniform box samples.

    Returns ActivationPattern entries with frequencies summing to 1,
    sorted by decreasing frequency (ties by pattern bits).
    """
    _check_two_layer(model)
    units = live_units(model)
    box, _ = _analysis_frame(model, region)
    w1, b1 = model.layers[0]
    rng = np.random.default_rng(seed)
    x = rng.uniform(-box, box, size=(int(count), w1.shape[1]))
    signs = (x @ w1[list(units)].T + b1[list(units)]) > 0
    pats, counts = np.unique(signs, axis=0, return_counts=True)
    order = np.lexsort((*[pats[:, i] for i in range(pats.shape[1])], -counts))
    total = float(counts.sum())
    return [ActivationPattern(units=units,
                              active=tuple(bool(v) for v in pats[i]),
                              frequency=counts[i] / total)
            for i in order]


def affine_map_for_pattern(model, pattern):
    """Exact affine function on the pattern's open region."""
    _check_two_layer(model)
    w1, b1 = model.layers[0]
    w2, b2 = model.layers[1]
    mask = np.zeros(w1.shape[0])
    for u, a in zip(pattern.units, pattern.active):
        mask[u] = 1.0 if a else 0.0
    return AffineMap(coefficients=(w2 * mask) @ w1, bias=(w2 * mask) @ b1 + b2)


def coeff_distance(amap, lin):
    """Max abs coefficient deviation from f1 (bias excluded)."""
    f1 = lin.coeff_matrix()
    if amap.coefficients.shape != f1.shape:
        raise ValueError("coefficient shape mismatch")
    return float(np.max(np.abs(amap.coefficients - f1)))


def _pattern_constraints(model, pattern):
    """Halfspaces of the pattern, relaxed to closed: rows A x <= b."""
    w1, b1 = model.layers[0]
    a_rows, b_vals = [], []
    for u, active in zip(pattern.units, pattern.active):
        s = 1.0 if active else -1.0
        a_rows.append(-s * w1[u])
        b_vals.append(s * b1[u])
    return np.array(a_rows), np.array(b_vals)


def max_gap_lp(model, pattern, region, lin, output_index, mode="two_sided"):
    """LP bound on the affine map's deviation from the linearization.

    The feasible set is the box intersected with the pattern's (closed)
    halfspaces. mode "two_sided" maximizes |gap| via two LPs (max gap,
    max -gap); mode "one_sided" maximizes the gap only and reports its
    absolute value, the convention the published per-pattern deviation
    tables use. Values are in raw output units.
    """
    _check_two_layer(model)
    box, out_scale = _analysis_frame(model, region)
    amap = affine_map_for_pattern(model, pattern)
    f1 = lin.coeff_matrix()
    dc = amap.coefficients[output_index] - f1[output_index]
    db = float(amap.bias[output_index])
    if model.normalization is None:
        # raw-unit model approximates the inverse itself, constant f0
        db -= float(lin.f0.ravel()[output_index])
    a_ub, b_ub = _pattern_constraints(model, pattern)
    bounds = [(-box, box)] * dc.size

    res_pos = solve_lp(dc, a_ub, b_ub, bounds)
    if res_pos.status != OPTIMAL:
        raise EmptyRegion("pattern region does not meet the box")
    if mode == "one_sided":
        return abs(res_pos.value + db) * out_scale
    if mode != "two_sided":
        raise ValueError("mode must be 'two_sided' or 'one_sided'")
    res_neg = solve_lp(-dc, a_ub, b_ub, bounds)
    if res_neg.status != OPTIMAL:
        raise EmptyRegion("pattern region does not meet the box")
    return max(res_pos.value + db, res_neg.value - db) * out_scale


def enumerate_nonempty_patterns(model, region):
    """All sign patterns over live units whose open region meets the box.

    Feasibility of each pattern is decided by an interior-slack LP:
    maximize t subject to sign_u (w1_u . x + b1_u) >= t on the box; the
    open region is nonempty exactly when the optimum is positive.
    """
    _check_two_layer(model)
    units = live_units(model)
    if len(units) > 24:
        raise ValueError("hidden width cap (24 live units) exceeded")
    box, _ = _analysis_frame(model, region)
    w1, b1 = model.layers[0]
    n_in = w1.shape[1]
    slack_cap = float(np.max(np.sum(np.abs(w1[list(units)]), axis=1) * box
                             + np.abs(b1[list(units)]))) + 1.0
    out = []
    for bits in range(2 ** len(units)):
        active = tuple(bool((bits >> (len(units) - 1 - i)) & 1)
                       for i in range(len(units)))
        pattern = ActivationPattern(units=units, active=active)
        a_ub, b_ub = _pattern_constraints(model, pattern)
        # variables (x, t): -s w1_u x + t <= s b1_u, maximize t
        a = np.hstack([a_ub, np.ones((a_ub.shape[0], 1))])
        c = np.zeros(n_in + 1)
        c[-1] = 1.0
        res = solve_lp(c, a, b_ub, [(-box, box)] * n_in + [(0.0, slack_cap)])
        if res.status == OPTIMAL and res.value > 1e-9:
            out.append(pattern)
    return out


def region_report(model, region, lin, sample_count=10**5, seed=0,
                  gap_mode="one_sided"):
    """Rows (pattern_label, frequency, output_index, coeff_distance, max_gap)."""
    freq = {p.active: p.frequency
            for p in sample_patterns(model, region, sample_count, seed)}
    rows = []
    for pattern in enumerate_nonempty_patterns(model, region):
        amap = affine_map_for_pattern(model, pattern)
        dist = coeff_distance(amap, lin)
        for out_idx in range(amap.coefficients.shape[0]):
            gap = max_gap_lp(model, pattern, region, lin, out_idx, mode=gap_mode)
            rows.append((pattern.label(), freq.get(pattern.active, 0.0),
                         out_idx, dist, gap))
    return rows
