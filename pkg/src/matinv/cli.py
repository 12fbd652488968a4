"""Command-line testbed wiring all modules together.

Every command reads an optional key=value config file, lets flags
override it, writes its result files into --out-dir, and drops a
run-manifest JSON next to them. Exit codes: 0 success, 2 config error,
3 region unsafe, 4 numeric failure, 5 infeasible LP region.
"""

import argparse
import json
import os
import platform
import sys
import time
from importlib import resources

import numpy as np

from . import __version__
from .analytic import quadratic_error_sweep
from .config import ConfigError, get_typed, load_config, merged
from .errors import (EmptyRegion, MatinvError, NearSingular, NonFiniteLoss,
                     RankConstructionFailed, RankPreconditionFailed,
                     RegionUnsafe, SchemaError, SearchExhausted)
from .limits import (adversarial_point, divergence_report,
                     expected_error_ball, verify_inverse_blowup)
from .linalg import NormKind, read_matrix_text
from .linearize import eval_linear, linearize_inverse
from .lipschitz import (FullyConnected, ReLU, chain_bound,
                        check_bound_numeric, format_bound)
from .mlp import (TrainConfig, attach_normalization, avg_abs_error, forward,
                  init_model, load_checkpoint, save_checkpoint,
                  to_training_arrays, train)
from .presets import PRESET_NAMES, REFERENCE_STEPS_PER_EPOCH, preset_region
from .region_analysis import region_report
from .regions import (BoxRegion, box_clearance, clearance_lower_bound,
                      certify_region, emit_meps_slice_2d,
                      emit_meps_surface_3d, load_dataset, sample_dataset,
                      save_dataset)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REGION = 3
EXIT_NUMERIC = 4
EXIT_LP = 5


def bundled_model_path():
    """Path of the pre-trained 2x2 reference checkpoint."""
    return str(resources.files("matinv.data") / "pretrained_2x2.json")


def _out_dir(cfg):
    d = cfg.get("out_dir") or os.environ.get("MATINV_OUT_DIR", ".")
    os.makedirs(d, exist_ok=True)
    return d


def _write_csv(path, header, rows):
    def fmt(v):
        if isinstance(v, bool):
            return "1" if v else "0"
        if isinstance(v, float):
            return "%.17g" % v
        return str(v)

    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _manifest(cfg, command, out_dir, started):
    doc = {
        "command": command,
        "config": dict(sorted(cfg.items())),
        "seed": cfg.get("seed"),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "matinv": __version__,
        },
        "wall_time_s": round(time.time() - started, 3),
    }
    with open(os.path.join(out_dir, "%s_manifest.json" % command), "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _region_from_cfg(cfg):
    preset = cfg.get("preset")
    if preset:
        return preset_region(preset)
    center_file = cfg.get("center_file")
    if not center_file:
        raise ConfigError("need preset= or center_file=")
    center = read_matrix_text(center_file)
    return BoxRegion(center, get_typed(cfg, "half_width", float, 0.01))


def _train_config(cfg):
    hidden = tuple(int(v) for v in cfg.get("hidden_dims", "32").split(",") if v)
    return TrainConfig(
        learning_rate=get_typed(cfg, "learning_rate", float, 5e-5),
        weight_decay=get_typed(cfg, "weight_decay", float, 1e-7),
        batch_size=get_typed(cfg, "batch_size", int, 128),
        epochs=get_typed(cfg, "epochs", int, 20),
        steps_per_epoch=get_typed(cfg, "steps_per_epoch", int, 0),
        adam_beta1=get_typed(cfg, "adam_beta1", float, 0.9),
        adam_beta2=get_typed(cfg, "adam_beta2", float, 0.999),
        adam_eps=get_typed(cfg, "adam_eps", float, 1e-8),
        warm_restart_t0=get_typed(cfg, "warm_restart_t0", float, 3.0),
        warm_restart_tmult=get_typed(cfg, "warm_restart_tmult", int, 2),
        eta_min=get_typed(cfg, "eta_min", float, 1e-6),
        seed=get_typed(cfg, "seed", int, 0),
        hidden_dims=hidden,
    )


def cmd_gen_data(cfg):
    out_dir = _out_dir(cfg)
    region = _region_from_cfg(cfg)
    count = get_typed(cfg, "count", int, 1000)
    seed = get_typed(cfg, "seed", int, 0)
    eps = get_typed(cfg, "eps", float, 1e-3)
    pairs = sample_dataset(region, count, seed, eps=eps)
    out = cfg.get("out") or os.path.join(out_dir, "dataset.csv")
    save_dataset(out, region, pairs, seed)
    return EXIT_OK


def cmd_train(cfg):
    out_dir = _out_dir(cfg)
    tc = _train_config(cfg)
    dataset_path = cfg.get("dataset")
    if not dataset_path:
        raise ConfigError("need dataset=<path>")
    region, _, pairs = load_dataset(dataset_path)
    arrays = to_training_arrays(region, pairs)
    if get_typed(cfg, "reference_schedule", bool, True) and not tc.steps_per_epoch:
        # keep the full-scale optimizer step budget per schedule epoch
        tc = _train_config(merged(cfg, {
            "steps_per_epoch": REFERENCE_STEPS_PER_EPOCH}))
    n2 = region.n * region.n
    if tc.epochs == 0:
        model = init_model(n2, tc.hidden_dims, n2, tc.seed)
        trace = []
    else:
        model, trace = train(tc, arrays)
    model = attach_normalization(model, region)
    save_checkpoint(model, os.path.join(out_dir, "model.json"))
    _write_csv(os.path.join(out_dir, "loss_trace.csv"), "epoch,mean_loss",
               [(i, v) for i, v in enumerate(trace)])
    return EXIT_OK


def _predictor_from_cfg(cfg, region):
    kind = cfg.get("predictor", "model")
    if kind == "model":
        path = cfg.get("model") or bundled_model_path()
        return load_checkpoint(path)
    if kind == "linear":
        lin = linearize_inverse(region.center)
        return lambda a: eval_linear(lin, a - region.center)
    if kind == "constant":
        lin = linearize_inverse(region.center)
        return lambda a: lin.f0
    raise ConfigError("predictor must be model, linear or constant")


def cmd_eval(cfg):
    out_dir = _out_dir(cfg)
    dataset_path = cfg.get("dataset")
    if not dataset_path:
        raise ConfigError("need dataset=<path>")
    region, _, pairs = load_dataset(dataset_path)
    predictor = _predictor_from_cfg(cfg, region)
    err = avg_abs_error(predictor, pairs)
    _write_csv(os.path.join(out_dir, "metrics.csv"), "metric,value",
               [("avg_abs_error", err)])
    return EXIT_OK


def cmd_probe(cfg):
    out_dir = _out_dir(cfg)
    kind = cfg.get("kind")
    seed = get_typed(cfg, "seed", int, 0)
    witness_file = cfg.get("witness_file")
    witness = (read_matrix_text(witness_file) if witness_file
               else np.array([[1.0, 1.0], [1.0, 1.0]]))
    norm_kind = NormKind(cfg.get("norm", "l2"))
    if kind == "blowup":
        radii = [float(v) for v in cfg.get("radii", "1e-2,1e-3,1e-4").split(",")]
        rows = verify_inverse_blowup(
            witness, radii, get_typed(cfg, "samples", int, 200), norm_kind, seed)
        _write_csv(os.path.join(out_dir, "blowup.csv"),
                   "radius,min_radius_times_inverse_norm", rows)
        return EXIT_OK
    if kind == "sweep":
        region = _region_from_cfg(cfg)
        scales = [float(v) for v in cfg.get("scales", "0.02,0.01").split(",")]
        rows = quadratic_error_sweep(region.center, scales,
                                     get_typed(cfg, "samples", int, 1000), seed)
        _write_csv(os.path.join(out_dir, "sweep.csv"),
                   "scale,max_abs_error,skipped", rows)
        return EXIT_OK
    model = load_checkpoint(cfg.get("model") or bundled_model_path())
    if kind == "adversarial":
        threshold = get_typed(cfg, "threshold", float, 1e3)
        x, err, t = adversarial_point(model, witness, threshold, seed=seed)
        rows = [(threshold, t, err) + tuple(float(v) for v in x.ravel())]
        n2 = x.size
        _write_csv(os.path.join(out_dir, "adversarial.csv"),
                   "threshold,t,error," + ",".join("x%d" % i for i in range(n2)),
                   rows)
        return EXIT_OK
    if kind == "ball":
        eps_list = [float(v) for v in cfg.get("eps_list", "1e-1,1e-2,1e-3").split(",")]
        relative = None
        if cfg.get("kprime"):
            relative = {"kprime": float(cfg["kprime"])}
        rows = expected_error_ball(
            model, witness, eps_list, get_typed(cfg, "k", float, 1.0),
            get_typed(cfg, "samples", int, 2000), norm_kind, seed,
            relative=relative)
        _write_csv(os.path.join(out_dir, "ball.csv"),
                   "eps,estimate,stderr,rejected", rows)
        return EXIT_OK
    if kind == "divergence":
        schedule = [int(v) for v in
                    cfg.get("schedule", "100,1000,10000").split(",")]
        rows, flagged = divergence_report(
            model, witness, get_typed(cfg, "k", float, 5.0),
            get_typed(cfg, "eps", float, 1e-2), schedule, seed)
        _write_csv(os.path.join(out_dir, "divergence.csv"),
                   "n_samples,running_estimate,max_contribution,flagged", rows)
        return EXIT_OK
    raise ConfigError("kind must be blowup, adversarial, ball or divergence")


def cmd_regions(cfg):
    out_dir = _out_dir(cfg)
    region = _region_from_cfg(cfg)
    eps = get_typed(cfg, "eps", float, 1e-3)
    seed = get_typed(cfg, "seed", int, 0)
    budget = get_typed(cfg, "budget", int, 64)
    clearance = box_clearance(region, budget, seed)
    lower = clearance_lower_bound(region)
    certified = certify_region(region, eps, budget=budget, seed=seed)
    _write_csv(os.path.join(out_dir, "clearance.csv"),
               "eps,clearance_upper,analytic_lower,certified",
               [(eps, clearance, lower, certified)])
    return EXIT_OK


def cmd_analyze(cfg):
    out_dir = _out_dir(cfg)
    model = load_checkpoint(cfg.get("model") or bundled_model_path())
    if model.normalization is not None:
        region = BoxRegion(*model.normalization)
    else:
        region = _region_from_cfg(cfg)
    lin = linearize_inverse(region.center)
    rows = region_report(
        model, region, lin,
        sample_count=get_typed(cfg, "samples", int, 10**5),
        seed=get_typed(cfg, "seed", int, 0),
        gap_mode=cfg.get("gap_mode", "one_sided"))
    _write_csv(os.path.join(out_dir, "region_report.csv"),
               "pattern,frequency,output_index,coeff_distance,max_gap", rows)
    return EXIT_OK


def cmd_lipschitz(cfg):
    out_dir = _out_dir(cfg)
    model = load_checkpoint(cfg.get("model") or bundled_model_path())
    blocks = []
    for i, (w, b) in enumerate(model.layers):
        blocks.append(FullyConnected(w, b))
        if i < len(model.layers) - 1:
            blocks.append(ReLU())
    bound, value = chain_bound(blocks)
    violations = check_bound_numeric(
        blocks, bound, get_typed(cfg, "pairs", int, 1000),
        get_typed(cfg, "range", float, 1.0), get_typed(cfg, "seed", int, 0))
    with open(os.path.join(out_dir, "bound.txt"), "w") as fh:
        fh.write(format_bound(bound) + "\n")
    _write_csv(os.path.join(out_dir, "lipschitz_check.csv"),
               "pairs,range,violations",
               [(get_typed(cfg, "pairs", int, 1000),
                 get_typed(cfg, "range", float, 1.0), violations)])
    return EXIT_OK


def _parse_fixed(text):
    out = {}
    for item in text.split(","):
        key, value = item.split("=", 1)
        out[key.strip()] = float(value)
    return out


def cmd_figures(cfg):
    out_dir = _out_dir(cfg)
    mode = cfg.get("mode", "slice")
    lo, hi = (float(v) for v in cfg.get("range", "-3,3").split(","))
    resolution = get_typed(cfg, "resolution", int, 50)
    if mode == "slice":
        fixed = _parse_fixed(cfg.get("fixed", "a11=1,a12=2"))
        free = [v.strip() for v in cfg.get("free", "a21,a22").split(",")]
        rows = emit_meps_slice_2d(fixed, free, (lo, hi), resolution,
                                  get_typed(cfg, "eps", float, 0.2))
        _write_csv(os.path.join(out_dir, "slice.csv"), "x,y,value,in_meps", rows)
        return EXIT_OK
    if mode == "surface":
        rows = emit_meps_surface_3d(get_typed(cfg, "a11", float, 1.0),
                                    (lo, hi), resolution)
        _write_csv(os.path.join(out_dir, "surface.csv"), "x,y,z", rows)
        return EXIT_OK
    raise ConfigError("mode must be slice or surface")


def cmd_bench(cfg):
    out_dir = _out_dir(cfg)
    path = cfg.get("model") or bundled_model_path()
    model = load_checkpoint(path)
    batches = [int(v) for v in cfg.get("batches", "1,100").split(",")]
    rng = np.random.default_rng(get_typed(cfg, "seed", int, 0))
    rows = []
    for batch in batches:
        x = rng.uniform(-1, 1, size=(batch, model.in_dim))
        start = time.perf_counter()
        reps = max(1, 1000 // batch)
        for _ in range(reps):
            forward(model, x)
        rows.append((os.path.basename(path), batch,
                     (time.perf_counter() - start) / reps))
    _write_csv(os.path.join(out_dir, "bench.csv"), "model,batch,seconds", rows)
    return EXIT_OK


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "probe": cmd_probe,
    "regions": cmd_regions,
    "analyze": cmd_analyze,
    "lipschitz": cmd_lipschitz,
    "figures": cmd_figures,
    "bench": cmd_bench,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="matinv",
        description="Matrix-inversion learnability testbed")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--out-dir", dest="out_dir")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker count (1 guarantees bit-reproducibility)")
    parser.add_argument("--set", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    parser.add_argument("--seed", type=int)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    started = time.time()
    try:
        cfg = load_config(args.config) if args.config else {}
        overrides = {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError("--set expects KEY=VALUE, got %r" % item)
            key, value = item.split("=", 1)
            overrides[key.strip()] = value
        if args.out_dir is not None:
            overrides["out_dir"] = args.out_dir
        if args.seed is not None:
            overrides["seed"] = args.seed
        overrides["threads"] = args.threads
        cfg = merged(cfg, overrides)
        code = _COMMANDS[args.command](cfg)
        _manifest(cfg, args.command, _out_dir(cfg), started)
        return code
    except (ConfigError, SchemaError, KeyError, ValueError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except RegionUnsafe as exc:
        print("region unsafe: %s" % exc, file=sys.stderr)
        return EXIT_REGION
    except EmptyRegion as exc:
        print("infeasible LP region: %s" % exc, file=sys.stderr)
        return EXIT_LP
    except (NearSingular, NonFiniteLoss, RankConstructionFailed,
            RankPreconditionFailed, SearchExhausted) as exc:
        print("numeric failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except MatinvError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
