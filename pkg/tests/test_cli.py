import numpy as np
import pytest

from matinv.cli import main, bundled_model_path
from matinv.linalg import write_matrix_text
from matinv.mlp import load_checkpoint
from matinv.regions import load_dataset


def run(*args):
    return main(list(args))


def read(path):
    with open(path) as fh:
        return fh.read()


@pytest.fixture()
def dataset(tmp_path):
    out = tmp_path / "data"
    assert run("gen-data", "--out-dir", str(out), "--seed", "3",
               "--set", "preset=2x2-first", "--set", "count=200") == 0
    return str(out / "dataset.csv")


def test_gen_data_writes_dataset(dataset):
    region, seed, pairs = load_dataset(dataset)
    assert seed == 3
    assert len(pairs) == 200
    assert np.array_equal(region.center, [[2, 2], [2, 3]])


def test_gen_data_manifest(tmp_path):
    out = tmp_path / "o"
    assert run("gen-data", "--out-dir", str(out),
               "--set", "preset=2x2-first", "--set", "count=1") == 0
    assert (out / "gen-data_manifest.json").exists()


def test_gen_data_count_zero(tmp_path):
    out = tmp_path / "o"
    assert run("gen-data", "--out-dir", str(out),
               "--set", "preset=2x2-first", "--set", "count=0") == 0
    _, _, pairs = load_dataset(out / "dataset.csv")
    assert pairs == []


def test_gen_data_second_and_3x3_presets(tmp_path):
    for preset in ("2x2-second", "3x3"):
        out = tmp_path / preset
        assert run("gen-data", "--out-dir", str(out),
                   "--set", "preset=%s" % preset, "--set", "count=3") == 0


def test_gen_data_region_unsafe_exit_code(tmp_path):
    center = tmp_path / "center.txt"
    write_matrix_text(np.ones((2, 2)), center)
    assert run("gen-data", "--out-dir", str(tmp_path / "o"),
               "--set", "center_file=%s" % center, "--set", "count=1") == 3


def test_bad_preset_exit_code(tmp_path):
    assert run("gen-data", "--out-dir", str(tmp_path / "o"),
               "--set", "preset=nope") == 2


def test_bad_set_syntax(tmp_path):
    assert run("gen-data", "--out-dir", str(tmp_path / "o"), "--set", "oops") == 2


def test_train_and_eval(tmp_path, dataset):
    out = tmp_path / "run"
    assert run("train", "--out-dir", str(out), "--seed", "0",
               "--set", "dataset=%s" % dataset,
               "--set", "epochs=2", "--set", "steps_per_epoch=5") == 0
    model = load_checkpoint(out / "model.json")
    assert model.normalization is not None
    trace = read(out / "loss_trace.csv").strip().splitlines()
    assert trace[0] == "epoch,mean_loss" and len(trace) == 3

    assert run("eval", "--out-dir", str(out),
               "--set", "dataset=%s" % dataset,
               "--set", "model=%s" % (out / "model.json")) == 0
    metrics = read(out / "metrics.csv").splitlines()
    assert metrics[0] == "metric,value"
    assert metrics[1].startswith("avg_abs_error,")


def test_train_zero_epochs_saves_initial_model(tmp_path, dataset):
    out = tmp_path / "run0"
    assert run("train", "--out-dir", str(out),
               "--set", "dataset=%s" % dataset, "--set", "epochs=0") == 0
    model = load_checkpoint(out / "model.json")
    assert model.in_dim == 4 and model.out_dim == 4


def test_train_missing_dataset(tmp_path):
    assert run("train", "--out-dir", str(tmp_path / "o")) == 2


def test_eval_linear_predictor_reference_value(tmp_path):
    data = tmp_path / "d"
    assert run("gen-data", "--out-dir", str(data), "--seed", "5",
               "--set", "preset=2x2-first", "--set", "count=5000") == 0
    out = tmp_path / "e"
    assert run("eval", "--out-dir", str(out),
               "--set", "dataset=%s" % (data / "dataset.csv"),
               "--set", "predictor=linear") == 0
    value = float(read(out / "metrics.csv").splitlines()[1].split(",")[1])
    assert 0.7 * 1.97e-4 <= value <= 1.3 * 1.97e-4


def test_probe_blowup(tmp_path):
    out = tmp_path / "o"
    assert run("probe", "--out-dir", str(out), "--seed", "1",
               "--set", "kind=blowup", "--set", "samples=50") == 0
    lines = read(out / "blowup.csv").strip().splitlines()
    assert lines[0] == "radius,min_radius_times_inverse_norm"
    assert len(lines) == 4


def test_probe_sweep(tmp_path):
    out = tmp_path / "o"
    assert run("probe", "--out-dir", str(out), "--seed", "1",
               "--set", "kind=sweep", "--set", "preset=2x2-first",
               "--set", "samples=200") == 0
    lines = read(out / "sweep.csv").strip().splitlines()
    assert lines[0] == "scale,max_abs_error,skipped"


def test_probe_adversarial(tmp_path):
    out = tmp_path / "o"
    assert run("probe", "--out-dir", str(out), "--seed", "0",
               "--set", "kind=adversarial", "--set", "threshold=1000") == 0
    lines = read(out / "adversarial.csv").strip().splitlines()
    assert lines[0].startswith("threshold,t,error,x0")
    error = float(lines[1].split(",")[2])
    assert error > 1000


def test_probe_ball_and_divergence(tmp_path):
    out = tmp_path / "o"
    assert run("probe", "--out-dir", str(out), "--seed", "0",
               "--set", "kind=ball", "--set", "samples=200") == 0
    assert read(out / "ball.csv").splitlines()[0] == "eps,estimate,stderr,rejected"
    assert run("probe", "--out-dir", str(out), "--seed", "0",
               "--set", "kind=divergence", "--set", "schedule=100,500") == 0
    lines = read(out / "divergence.csv").strip().splitlines()
    assert lines[0] == "n_samples,running_estimate,max_contribution,flagged"
    assert lines[-1].split(",")[-1] == "1"  # k=5 > n^2 flags


def test_probe_outputs_byte_identical_across_reruns(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run("probe", "--out-dir", str(out), "--seed", "0",
                   "--set", "kind=ball", "--set", "samples=300") == 0
        outs.append(read(out / "ball.csv"))
    assert outs[0] == outs[1]


def test_regions_command(tmp_path):
    out = tmp_path / "o"
    assert run("regions", "--out-dir", str(out), "--seed", "0",
               "--set", "preset=2x2-first") == 0
    lines = read(out / "clearance.csv").strip().splitlines()
    assert lines[0] == "eps,clearance_upper,analytic_lower,certified"
    assert lines[1].endswith(",1")


def test_analyze_command(tmp_path):
    out = tmp_path / "o"
    assert run("analyze", "--out-dir", str(out), "--seed", "0",
               "--set", "samples=2000") == 0
    lines = read(out / "region_report.csv").strip().splitlines()
    assert lines[0] == "pattern,frequency,output_index,coeff_distance,max_gap"
    assert len(lines) == 1 + 14 * 4


def test_lipschitz_command(tmp_path):
    out = tmp_path / "o"
    assert run("lipschitz", "--out-dir", str(out), "--seed", "0",
               "--set", "pairs=500") == 0
    assert "]*d^" in read(out / "bound.txt")
    lines = read(out / "lipschitz_check.csv").strip().splitlines()
    assert lines[1].split(",")[-1] == "0"


def test_figures_slice_and_surface(tmp_path):
    out = tmp_path / "o"
    assert run("figures", "--out-dir", str(out),
               "--set", "mode=slice", "--set", "resolution=11") == 0
    lines = read(out / "slice.csv").strip().splitlines()
    assert lines[0] == "x,y,value,in_meps"
    assert len(lines) == 1 + 121
    assert run("figures", "--out-dir", str(out),
               "--set", "mode=surface", "--set", "resolution=7") == 0
    assert read(out / "surface.csv").splitlines()[0] == "x,y,z"


def test_bench_command(tmp_path):
    out = tmp_path / "o"
    assert run("bench", "--out-dir", str(out),
               "--set", "batches=1,100") == 0
    lines = read(out / "bench.csv").strip().splitlines()
    assert lines[0] == "model,batch,seconds"
    assert len(lines) == 3
    for line in lines[1:]:
        assert float(line.split(",")[2]) > 0


def test_bundled_model_loads():
    model = load_checkpoint(bundled_model_path())
    assert model.in_dim == 4 and model.out_dim == 4
    assert model.hidden_width() == 8
