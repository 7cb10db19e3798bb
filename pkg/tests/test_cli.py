import numpy as np
import pytest

from nstlab.cli import EXIT_INPUT, EXIT_OK, EXIT_USAGE, EXIT_WEIGHTS, main
from nstlab.evaluation import ssim
from nstlab.imageio import read_image, write_png

from .conftest import block16_image, multiscale_image


@pytest.fixture()
def images(tmp_path):
    c = tmp_path / "content.png"
    s = tmp_path / "style.png"
    write_png(c, multiscale_image(70))
    write_png(s, multiscale_image(71))
    return str(c), str(s), tmp_path


def _run(argv):
    try:
        return main(argv)
    except SystemExit as e:
        return e.code


def test_stylize_success_default_size(images, weights_file):
    c, s, tmp = images
    out = tmp / "out.png"
    code = _run([
        "stylize", "--method", "adain", "--weights", weights_file,
        "--content", c, "--style", s, "--out", str(out),
    ])
    assert code == EXIT_OK
    img = read_image(out)
    assert img.data.shape == (450, 600, 3)


def test_stylize_custom_size_and_alpha(images, weights_file):
    c, s, tmp = images
    out = tmp / "out.png"
    code = _run([
        "stylize", "--method", "ust-wct4", "--weights", weights_file,
        "--content", c, "--style", s, "--out", str(out),
        "--size", "96x64", "--alpha", "0.3",
    ])
    assert code == EXIT_OK
    assert read_image(out).data.shape == (64, 96, 3)


def test_stylize_deterministic_bytes(images, weights_file, tmp_path):
    c, s, tmp = images
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    argv = [
        "stylize", "--method", "adain", "--weights", weights_file,
        "--content", c, "--style", s, "--size", "96x64",
    ]
    assert _run(argv + ["--out", str(a)]) == EXIT_OK
    assert _run(argv + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_missing_content_is_input_error(images, weights_file):
    _, s, tmp = images
    code = _run([
        "stylize", "--method", "adain", "--weights", weights_file,
        "--content", str(tmp / "nope.png"), "--style", s,
        "--out", str(tmp / "o.png"),
    ])
    assert code == EXIT_INPUT


def test_corrupt_weights_is_weight_error(images, tmp_path):
    c, s, tmp = images
    bad = tmp_path / "bad.nstw"
    bad.write_bytes(b"XXXX junk")
    code = _run([
        "stylize", "--method", "adain", "--weights", str(bad),
        "--content", c, "--style", s, "--out", str(tmp / "o.png"),
    ])
    assert code == EXIT_WEIGHTS


def test_missing_weight_file_is_weight_error(images):
    c, s, tmp = images
    code = _run([
        "stylize", "--method", "adain", "--weights", str(tmp / "nope.nstw"),
        "--content", c, "--style", s, "--out", str(tmp / "o.png"),
    ])
    assert code == EXIT_WEIGHTS


def test_no_weight_source_is_usage_error(images, monkeypatch):
    c, s, tmp = images
    monkeypatch.delenv("NST_WEIGHTS", raising=False)
    code = _run([
        "stylize", "--method", "adain",
        "--content", c, "--style", s, "--out", str(tmp / "o.png"),
    ])
    assert code == EXIT_USAGE


def test_env_var_supplies_weights(images, weights_file, monkeypatch):
    c, s, tmp = images
    monkeypatch.setenv("NST_WEIGHTS", weights_file)
    code = _run([
        "stylize", "--method", "adain",
        "--content", c, "--style", s, "--out", str(tmp / "o.png"),
        "--size", "96x64",
    ])
    assert code == EXIT_OK


def test_unknown_method_is_usage_error(images, weights_file):
    c, s, tmp = images
    code = _run([
        "stylize", "--method", "gatys", "--weights", weights_file,
        "--content", c, "--style", s, "--out", str(tmp / "o.png"),
    ])
    assert code == EXIT_USAGE


def test_bad_alpha_is_usage_error(images, weights_file):
    c, s, tmp = images
    code = _run([
        "stylize", "--method", "adain", "--weights", weights_file,
        "--content", c, "--style", s, "--out", str(tmp / "o.png"),
        "--alpha", "1.5",
    ])
    assert code == EXIT_USAGE


def test_bad_size_is_usage_error(images, weights_file):
    c, s, tmp = images
    code = _run([
        "stylize", "--method", "adain", "--weights", weights_file,
        "--content", c, "--style", s, "--out", str(tmp / "o.png"),
        "--size", "banana",
    ])
    assert code == EXIT_USAGE


def test_evaluate_on_directories(weights_file, tmp_path, capsys):
    cdir, sdir = tmp_path / "content", tmp_path / "style"
    cdir.mkdir(), sdir.mkdir()
    for i in range(2):
        write_png(cdir / f"c{i}.png", multiscale_image(80 + i))
        write_png(sdir / f"s{i}.png", multiscale_image(90 + i))
    report = tmp_path / "report.csv"
    code = _run([
        "evaluate", "--weights", weights_file,
        "--content", str(cdir), "--style", str(sdir),
        "--methods", "adain,ust-wct4", "--size", "96x64",
        "--report", str(report),
    ])
    assert code == EXIT_OK
    lines = report.read_text().strip().split("\n")
    assert len(lines) == 3  # header + one row per method
    assert lines[0].startswith("method,")
    out = capsys.readouterr().out
    assert "adain" in out and "ust-wct4" in out


def test_evaluate_empty_directory_is_input_error(weights_file, tmp_path):
    cdir, sdir = tmp_path / "content", tmp_path / "style"
    cdir.mkdir(), sdir.mkdir()
    code = _run([
        "evaluate", "--weights", weights_file,
        "--content", str(cdir), "--style", str(sdir), "--size", "96x64",
    ])
    assert code == EXIT_INPUT


def test_bench_csv_row_count(images, weights_file, tmp_path, capsys):
    c, s, _ = images
    report = tmp_path / "bench.csv"
    code = _run([
        "bench", "--weights", weights_file, "--method", "adain",
        "--content", c, "--style", s, "--reps", "2",
        "--size", "96x64", "--report", str(report),
    ])
    assert code == EXIT_OK
    lines = report.read_text().strip().split("\n")
    assert len(lines) == 2
    assert lines[1].split(",")[0] == "adain"
    assert lines[1].split(",")[4] == "2"


def test_reconstruct_level1_high_fidelity(weights_file, tmp_path):
    src = tmp_path / "src.png"
    out = tmp_path / "rec.png"
    write_png(src, block16_image(77))
    code = _run([
        "reconstruct", "--weights", weights_file, "--content", str(src),
        "--level", "1", "--out", str(out), "--size", "96x64",
    ])
    assert code == EXIT_OK
    assert ssim(read_image(out), read_image(src)) >= 0.9


def test_reconstruct_bad_level_is_usage_error(weights_file, tmp_path):
    src = tmp_path / "src.png"
    write_png(src, block16_image(78))
    code = _run([
        "reconstruct", "--weights", weights_file, "--content", str(src),
        "--level", "9", "--out", str(tmp_path / "o.png"),
    ])
    assert code == EXIT_USAGE


def test_no_subcommand_is_usage_error():
    assert _run([]) == EXIT_USAGE
