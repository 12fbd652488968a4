"""Empirical probes of the inversion impossibility results.

Near a rank n-1 singular matrix the inverse grows like 1/distance, so
(a) r * ||inverse|| stays bounded below along shrinking radii, (b) any
fixed model can be defeated pointwise by walking toward the singular
matrix, and (c) ball expectations of the error blow up (and for large
powers have no finite mean at all).
"""

import numpy as np

from .errors import (NearSingular, RankPreconditionFailed, SearchExhausted)
from .linalg import NormKind, adjugate, det, inverse, nearest_singular_distance, norm
from .mlp import MlpModel, forward, predict_matrix

DET_REJECT_FLOOR = 1e-12


def _predictor(model):
    if isinstance(model, MlpModel):
        if model.normalization is not None:
            return lambda a: predict_matrix(model, a)
        return lambda a: forward(model, np.asarray(a, float).ravel()).reshape(
            np.asarray(a).shape)
    if callable(model):
        return model
    raise TypeError("model must be an MlpModel or a callable")


def _require_rank_witness(a0):
    a0 = np.asarray(a0, dtype=float)
    if np.max(np.abs(adjugate(a0))) <= 1e-12:
        raise RankPreconditionFailed("adjugate vanishes; witness is not rank n-1")
    return a0


def _unit_direction(rng, n):
    while True:
        d = rng.standard_normal((n, n))
        length = norm(d, NormKind.L2)
        if length > 1e-12:
            return d / length


def verify_inverse_blowup(a0, radii, samples_per_radius, norm_kind, seed):
    """Rows (radius, min over samples of radius * ||inverse(a0 + r D)||)."""
    a0 = _require_rank_witness(a0)
    rng = np.random.default_rng(seed)
    n = a0.shape[0]
    rows = []
    for r in radii:
        best = np.inf
        got = 0
        while got < samples_per_radius:
            a = a0 + r * _unit_direction(rng, n)
            try:
                inv = inverse(a)
            except NearSingular:
                continue
            best = min(best, r * norm(inv, norm_kind))
            got += 1
        rows.append((float(r), float(best)))
    return rows


def adversarial_point(model, a0, threshold, seed=0):
    """Point x near the singular witness where the model's error beats
    the threshold. Returns (x, error, t)."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    a0 = _require_rank_witness(a0)
    predict = _predictor(model)
    rng = np.random.default_rng(seed)
    n = a0.shape[0]
    for _ in range(10):
        d = _unit_direction(rng, n)
        t = 0.1
        while t >= 1e-12:
            x = a0 + t * d
            try:
                err = norm(inverse(x) - predict(x), NormKind.LINF)
            except NearSingular:
                t /= 2.0
                continue
            if err > threshold:
                if nearest_singular_distance(x) <= 0:
                    break  # degenerate direction; try another
                return x, float(err), float(t)
            t /= 2.0
    raise SearchExhausted("no violating point before t underflow")


def _ball_points(rng, a0, eps, count):
    n = a0.shape[0]
    d = n * n
    dirs = rng.standard_normal((count, d))
    dirs /= np.sqrt(np.sum(dirs * dirs, axis=1, keepdims=True))
    radii = eps * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / d)
    return a0.ravel() + dirs * radii


def expected_error_ball(model, a0, eps_list, k, n_samples, norm_kind, seed,
                        relative=None):
    """Monte Carlo E[||inverse(x) - model(x)||^k] over balls B(a0, eps).

    Rows (eps, estimate, standard_error, rejected). With `relative`
    = {"kprime": p}, each term is divided by ||x||^p.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps values must be strictly decreasing")
    a0 = np.asarray(a0, dtype=float)
    predict = _predictor(model)
    kprime = relative["kprime"] if relative else 0.0
    rows = []
    for idx, eps in enumerate(eps_list):
        rng = np.random.default_rng([seed, idx])
        flats = _ball_points(rng, a0, eps, int(n_samples))
        terms = []
        rejected = 0
        for flat in flats:
            x = flat.reshape(a0.shape)
            if abs(det(x)) < DET_REJECT_FLOOR:
                rejected += 1
                continue
            term = norm(inverse(x) - predict(x), norm_kind) ** k
            if kprime:
                term /= norm(x, norm_kind) ** kprime
            terms.append(term)
        terms = np.array(terms)
        estimate = float(terms.mean()) if terms.size else 0.0
        stderr = float(terms.std(ddof=1) / np.sqrt(terms.size)) if terms.size > 1 else 0.0
        rows.append((float(eps), estimate, stderr, rejected))
    return rows


def divergence_report(model, a0, k, eps, sample_schedule, seed):
    """Running ball-expectation estimates with a heavy-tail flag.

    Rows (n_samples, running_estimate, max_single_contribution,
    flagged). A checkpoint is flagged when the largest single
    contribution exceeds half the running sum; the returned flag is the
    one at the final sample count.
    """
    a0 = np.asarray(a0, dtype=float)
    predict = _predictor(model)
    rng = np.random.default_rng(seed)
    schedule = sorted(int(s) for s in sample_schedule)
    total = schedule[-1]
    flats = _ball_points(rng, a0, eps, total)
    running_sum = 0.0
    max_contrib = 0.0
    used = 0
    rows = []
    checkpoints = iter(schedule)
    target = next(checkpoints)
    for i in range(total):
        x = flats[i].reshape(a0.shape)
        used += 1
        if abs(det(x)) >= DET_REJECT_FLOOR:
            term = norm(inverse(x) - predict(x), NormKind.L2) ** k
            running_sum += term
            max_contrib = max(max_contrib, term)
        if used == target:
            here = bool(running_sum > 0 and max_contrib > 0.5 * running_sum)
            rows.append((used, running_sum / used, max_contrib, here))
            target = next(checkpoints, None)
            if target is None:
                break
    return rows, rows[-1][3] if rows else False
