"""From-scratch fully connected networks with ReLU hidden layers.

Forward/backward passes in numpy, Adam with cosine warm restarts, and
JSON checkpoint I/O. Models trained on inversion boxes carry a
normalization block: inputs are offsets from the box center divided by
the half width, outputs are inverse offsets on the same scale.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteLoss, SchemaError
from .linalg import as_matrix, inverse


@dataclass
class MlpModel:
    """layers: list of (weights out_dim x in_dim, bias out_dim)."""

    layers: list
    normalization: tuple = None  # (center matrix, half_width) or None

    @property
    def in_dim(self):
        return self.layers[0][0].shape[1]

    @property
    def out_dim(self):
        return self.layers[-1][0].shape[0]

    def hidden_width(self):
        return self.layers[0][0].shape[0]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 5e-5
    weight_decay: float = 1e-7
    batch_size: int = 128
    epochs: int = 20
    steps_per_epoch: int = 0  # 0: one pass over the dataset per epoch
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    warm_restart_t0: float = 3.0
    warm_restart_tmult: int = 2
    eta_min: float = 1e-6
    seed: int = 0
    hidden_dims: tuple = (32,)

    def __post_init__(self):
        if not self.learning_rate > self.eta_min >= 0:
            raise ValueError("need learning_rate > eta_min >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def init_model(in_dim, hidden_dims, out_dim, seed):
    """Uniform fan-in init: each layer in [-1/sqrt(in), +1/sqrt(in)]."""
    rng = np.random.default_rng(seed)
    dims = [in_dim] + list(hidden_dims) + [out_dim]
    layers = []
    for fin, fout in zip(dims[:-1], dims[1:]):
        s = 1.0 / np.sqrt(fin)
        layers.append((rng.uniform(-s, s, (fout, fin)), rng.uniform(-s, s, fout)))
    return MlpModel(layers=layers)


def forward(model, x):
    """Evaluate on a flat vector or a (batch, in_dim) array."""
    a = np.asarray(x, dtype=float)
    squeeze = a.ndim == 1
    if squeeze:
        a = a[None, :]
    if a.shape[1] != model.in_dim:
        raise ValueError("input dim %d != model dim %d" % (a.shape[1], model.in_dim))
    for w, b in model.layers[:-1]:
        a = np.maximum(a @ w.T + b, 0.0)
    w, b = model.layers[-1]
    a = a @ w.T + b
    return a[0] if squeeze else a


def predict_matrix(model, a):
    """Raw-unit prediction of inverse(a) for a normalized model."""
    if model.normalization is None:
        raise ValueError("model has no normalization block")
    center, hw = model.normalization
    x = (as_matrix(a) - center).ravel() / hw
    out = forward(model, x)
    return inverse(center) + hw * out.reshape(center.shape)


def loss_and_grads(model, x, y):
    """Batch MSE (mean over batch and output entries) and its gradients.

    ReLU subgradient at exactly 0 is 0. Gradients are returned as a
    list of (dW, db) matching model.layers.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[0] == 0:
        raise ValueError("empty batch")
    acts = [x]
    pres = []
    a = x
    for w, b in model.layers[:-1]:
        h = a @ w.T + b
        pres.append(h)
        a = np.maximum(h, 0.0)
        acts.append(a)
    w, b = model.layers[-1]
    out = a @ w.T + b
    diff = out - y
    mse = float(np.mean(diff * diff))
    d = 2.0 * diff / diff.size
    grads = [None] * len(model.layers)
    grads[-1] = (d.T @ acts[-1], d.sum(axis=0))
    for li in range(len(model.layers) - 2, -1, -1):
        d = (d @ model.layers[li + 1][0]) * (pres[li] > 0)
        grads[li] = (d.T @ acts[li], d.sum(axis=0))
    return mse, grads


def lr_at(config, epoch_progress):
    """Cosine annealing with warm restarts (cycles T0, T0*Tmult, ...)."""
    if epoch_progress < 0:
        raise ValueError("epoch_progress must be >= 0")
    start, length = 0.0, float(config.warm_restart_t0)
    while epoch_progress >= start + length:
        start += length
        length *= config.warm_restart_tmult
    frac = (epoch_progress - start) / length
    return config.eta_min + 0.5 * (config.learning_rate - config.eta_min) * (
        1.0 + math.cos(math.pi * frac))


def _epoch_indices(rng, count, needed):
    """Seeded index stream: whole permutations concatenated then trimmed."""
    chunks = []
    have = 0
    while have < needed:
        perm = rng.permutation(count)
        chunks.append(perm)
        have += count
    return np.concatenate(chunks)[:needed]


def train(config, dataset, model=None):
    """Adam training; returns (model, per-epoch mean loss trace).

    dataset: (X, Y) arrays of shape (count, in_dim) / (count, out_dim).
    Deterministic per seed when run single-threaded.
    """
    x, y = np.asarray(dataset[0], dtype=float), np.asarray(dataset[1], dtype=float)
    if x.shape[0] == 0:
        raise ValueError("dataset must be nonempty")
    if model is None:
        model = init_model(x.shape[1], config.hidden_dims, y.shape[1], config.seed)
    params = []
    for w, b in model.layers:
        params.extend([w.astype(float, copy=True), b.astype(float, copy=True)])
    mom = [np.zeros_like(p) for p in params]
    vel = [np.zeros_like(p) for p in params]
    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_eps
    count = x.shape[0]
    spe = config.steps_per_epoch or max(count // config.batch_size, 1)
    shuffle_rng = np.random.default_rng(config.seed + 1)
    trace = []
    step = 0
    live = MlpModel(layers=[(params[2 * i], params[2 * i + 1])
                            for i in range(len(model.layers))],
                    normalization=model.normalization)
    for epoch in range(config.epochs):
        idx = _epoch_indices(shuffle_rng, count, spe * config.batch_size)
        epoch_loss = 0.0
        for i in range(spe):
            batch = idx[i * config.batch_size:(i + 1) * config.batch_size]
            mse, grads = loss_and_grads(live, x[batch], y[batch])
            epoch_loss += mse
            step += 1
            lr = lr_at(config, epoch + i / spe)
            flat = [g for pair in grads for g in pair]
            for j, (p, g) in enumerate(zip(params, flat)):
                g = g + config.weight_decay * p  # coupled decay
                mom[j] = b1 * mom[j] + (1 - b1) * g
                vel[j] = b2 * vel[j] + (1 - b2) * g * g
                p -= lr * (mom[j] / (1 - b1 ** step)) / (
                    np.sqrt(vel[j] / (1 - b2 ** step)) + eps)
        trace.append(epoch_loss / spe)
        if not np.isfinite(trace[-1]):
            raise NonFiniteLoss("loss diverged at epoch %d" % epoch, trace)
    return live, trace


def to_training_arrays(region, pairs):
    """Scale (A, A^{-1}) pairs into the box-normalized training frame."""
    center = region.center
    center_inv = inverse(center)
    hw = region.half_width
    x = np.array([(a - center).ravel() / hw for a, _ in pairs])
    y = np.array([(lab - center_inv).ravel() / hw for _, lab in pairs])
    return x, y


def attach_normalization(model, region):
    return replace_normalization(model, (region.center.copy(), float(region.half_width)))


def replace_normalization(model, normalization):
    return MlpModel(layers=model.layers, normalization=normalization)


def avg_abs_error(model, testset):
    """Mean per-entry absolute error of a predictor over (A, label) pairs.

    `model` may be an MlpModel (normalized models predict in raw units)
    or any callable Matrix -> Matrix.
    """
    if not testset:
        raise ValueError("empty testset")
    if isinstance(model, MlpModel):
        if model.normalization is not None:
            center, hw = model.normalization
            center_inv = inverse(center)
            xs = np.array([(a - center).ravel() / hw for a, _ in testset])
            preds = center_inv.ravel() + hw * forward(model, xs)
            labels = np.array([lab.ravel() for _, lab in testset])
            return float(np.mean(np.abs(preds - labels)))
        predictor = lambda a: forward(model, a.ravel()).reshape(a.shape)
    else:
        predictor = model
    total = 0.0
    entries = 0
    for a, label in testset:
        p = predictor(a)
        total += float(np.sum(np.abs(np.asarray(p) - label)))
        entries += label.size
    return total / entries


def save_checkpoint(model, path):
    doc = {
        "activation": "relu",
        "layers": [{
            "in": int(w.shape[1]),
            "out": int(w.shape[0]),
            "weights": [[float(v) for v in row] for row in w],
            "bias": [float(v) for v in b],
        } for w, b in model.layers],
    }
    if model.normalization is not None:
        center, hw = model.normalization
        doc["normalization"] = {"center": [[float(v) for v in row] for row in center],
                                "half_width": float(hw)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _expect(cond, path, message):
    if not cond:
        raise SchemaError("%s: %s" % (path, message))


def load_checkpoint(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise SchemaError("checkpoint: %s" % exc)
    _expect(isinstance(doc, dict), "$", "expected object")
    _expect(doc.get("activation") == "relu", "$.activation", "must be 'relu'")
    raw_layers = doc.get("layers")
    _expect(isinstance(raw_layers, list) and raw_layers, "$.layers", "nonempty list required")
    layers = []
    prev_out = None
    for i, layer in enumerate(raw_layers):
        where = "$.layers[%d]" % i
        _expect(isinstance(layer, dict), where, "expected object")
        for key in ("in", "out", "weights", "bias"):
            _expect(key in layer, where + "." + key, "missing")
        w = np.array(layer["weights"], dtype=float)
        b = np.array(layer["bias"], dtype=float)
        _expect(w.ndim == 2 and w.shape == (layer["out"], layer["in"]),
                where + ".weights", "shape must be out x in")
        _expect(b.shape == (layer["out"],), where + ".bias", "length must be out")
        _expect(np.all(np.isfinite(w)) and np.all(np.isfinite(b)),
                where, "parameters must be finite")
        if prev_out is not None:
            _expect(layer["in"] == prev_out, where + ".in",
                    "dims chain broken (%d != %d)" % (layer["in"], prev_out))
        prev_out = layer["out"]
        layers.append((w, b))
    normalization = None
    if "normalization" in doc:
        block = doc["normalization"]
        _expect(isinstance(block, dict) and "center" in block and "half_width" in block,
                "$.normalization", "needs center and half_width")
        center = np.array(block["center"], dtype=float)
        _expect(center.ndim == 2 and center.shape[0] == center.shape[1],
                "$.normalization.center", "must be square")
        normalization = (center, float(block["half_width"]))
    return MlpModel(layers=layers, normalization=normalization)
