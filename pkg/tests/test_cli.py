import csv
import json
from pathlib import Path

import pytest

from musicmarket.cli import main, parse_cli
from musicmarket.metrics import METRIC_NAMES
from musicmarket.output import MANIFEST_NAME, ROBUSTNESS_HEADER

TINY = "n_agents = 12\nn_songs = 16\nn_steps = 4\npool_size = 6\nsongs_per_step = 2\n"


@pytest.fixture
def tiny_cfg(tmp_path):
    path = tmp_path / "tiny.cfg"
    # Shared-size overrides only; scenario keys stay with the presets.
    path.write_text(
        "n_agents = 12\nn_songs = 16\nn_steps = 4\npool_size = 6\nsongs_per_step = 2\n"
    )
    return path


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_parse_robust_command():
    plan = parse_cli(
        "--mode robust --seed 123 --replicates 200 --n_agents_cc 100 --show_bands".split()
    )
    assert plan.mode == "robust"
    assert plan.base_seed == 123
    assert plan.replicates == 200
    assert plan.n_agents_cc == 100
    assert plan.show_bands


def test_parse_paper_defaults():
    plan = parse_cli(["--mode", "paper"])
    assert plan.replicates == 1
    assert not plan.show_bands
    assert plan.scenarios == ("sanremo", "brazil", "kpop", "uk")
    assert plan.entropy_base == "cum"


def test_robust_default_replicates():
    assert parse_cli(["--mode", "robust"]).replicates == 200


def test_bad_usage_exits_1(capsys):
    assert main(["--replicates", "0"]) == 1
    assert main(["--mode", "nonsense"]) == 1
    assert main(["--no-such-flag"]) == 1
    assert main(["--replicates", "many"]) == 1


def test_alpha_grid_parsing():
    plan = parse_cli(["--alpha-grid", "0.0,0.3,0.9"])
    assert plan.alpha_grid == (0.0, 0.3, 0.9)
    with pytest.raises(SystemExit):
        parse_cli(["--alpha-grid", "0.0,zebra"])


def test_paper_mode_output_tree(tmp_path, tiny_cfg):
    outdir = tmp_path / "paper"
    rc = main([
        "--mode", "paper", "--outdir", str(outdir), "--seed", "5",
        "--config", str(tiny_cfg), "--alpha-grid", "0.0,0.9",
        "--n_agents_cc", "8", "--jobs", "1",
    ])
    assert rc == 0
    rows = read_rows(outdir / "timeseries_scenarios.csv")
    # 4 scenarios x n_steps x metric count, single replicate.
    assert len(rows) == 4 * 4 * len(METRIC_NAMES)
    assert not (outdir / "bands.csv").exists()        # no bands in paper mode
    assert not (outdir / "robustness.csv").exists()   # robustness is a robust-mode product
    assert (outdir / "snapshot.csv").exists()
    manifest = json.loads((outdir / MANIFEST_NAME).read_text())
    listed = {f["path"] for f in manifest["files"]}
    on_disk = {p.name for p in outdir.iterdir() if p.name != MANIFEST_NAME}
    assert listed == on_disk  # every output listed exactly once, nothing orphaned
    assert MANIFEST_NAME not in listed
    assert manifest["parameters"]["shared_params"]["lambda"] == 0.5


def test_snapshot_schema(tmp_path, tiny_cfg):
    outdir = tmp_path / "snap"
    main(["--mode", "paper", "--outdir", str(outdir), "--config", str(tiny_cfg),
          "--alpha-grid", "0.0,0.9", "--n_agents_cc", "8", "--jobs", "1",
          "--scenario", "sanremo", "--scenario", "brazil"])
    rows = read_rows(outdir / "snapshot.csv")
    kinds = {(r["scenario"], r["kind"]) for r in rows}
    assert ("sanremo", "song") in kinds and ("brazil", "agent") in kinds
    songs = [r for r in rows if r["kind"] == "song" and r["scenario"] == "sanremo"]
    assert len(songs) == 16
    assert all(r["plays"] != "" for r in songs)


def test_robust_mode_determinism_and_verification(tmp_path, tiny_cfg):
    args = ["--mode", "robust", "--seed", "9", "--replicates", "2",
            "--config", str(tiny_cfg), "--alpha-grid", "0.0,0.9",
            "--n_agents_cc", "8", "--jobs", "1"]
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(args + ["--outdir", str(out1)]) == 0
    assert main(args + ["--outdir", str(out2)]) == 0

    names = [p.name for p in sorted(out1.iterdir()) if p.name != MANIFEST_NAME]
    assert "bands.csv" in names and "robustness.csv" in names
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    hashes1 = {f["path"]: f["sha256"] for f in json.loads((out1 / MANIFEST_NAME).read_text())["files"]}
    hashes2 = {f["path"]: f["sha256"] for f in json.loads((out2 / MANIFEST_NAME).read_text())["files"]}
    assert hashes1 == hashes2

    assert main(["--verify", "--outdir", str(out1)]) == 0
    # One flipped byte must fail verification and name the file.
    victim = out1 / "robustness.csv"
    data = bytearray(victim.read_bytes())
    data[40] ^= 0xFF
    victim.write_bytes(bytes(data))
    assert main(["--verify", "--outdir", str(out1)]) == 2


def test_verify_missing_manifest(tmp_path):
    assert main(["--verify", "--outdir", str(tmp_path / "nowhere")]) == 2


def test_robustness_csv_contract(tmp_path, tiny_cfg):
    outdir = tmp_path / "rob"
    main(["--mode", "robust", "--seed", "3", "--replicates", "2",
          "--config", str(tiny_cfg), "--alpha-grid", "0.0,0.9",
          "--n_agents_cc", "8", "--jobs", "1", "--outdir", str(outdir)])
    text = (outdir / "robustness.csv").read_text(encoding="utf-8")
    assert text.splitlines()[0] == ",".join(ROBUSTNESS_HEADER)
    rows = read_rows(outdir / "robustness.csv")
    assert [(r["prediction"], r["measure"]) for r in rows] == sorted(
        (r["prediction"], r["measure"]) for r in rows
    )
    # Shortest-roundtrip floats parse back to the written values exactly.
    for r in rows:
        value = float(r["estimate"])
        assert repr(value) == r["estimate"]


def test_cc_metrics_present(tmp_path, tiny_cfg):
    outdir = tmp_path / "cc"
    main(["--mode", "paper", "--outdir", str(outdir), "--config", str(tiny_cfg),
          "--alpha-grid", "0.0,0.9", "--n_agents_cc", "8", "--jobs", "1"])
    rows = read_rows(outdir / "timeseries_cultural_capital.csv")
    metrics = {r["metric"] for r in rows}
    assert "indiv_entropy_mean_highcc" in metrics
    assert "indiv_entropy_mean_lowcc" in metrics


def test_unknown_config_key_is_usage_error(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("frobnicate = 3\n")
    assert main(["--config", str(bad), "--outdir", str(tmp_path / "x")]) == 1


def test_custom_scenario_from_config(tmp_path):
    cfg = tmp_path / "custom.cfg"
    cfg.write_text(TINY + "name = garage\nconformity = 0.2\nalpha = 0.4\n")
    outdir = tmp_path / "custom"
    rc = main(["--mode", "paper", "--outdir", str(outdir), "--config", str(cfg),
               "--alpha-grid", "0.0,0.9", "--n_agents_cc", "8", "--jobs", "1",
               "--scenario", "sanremo", "--scenario", "brazil"])
    assert rc == 0
    rows = read_rows(outdir / "timeseries_scenarios.csv")
    assert {r["scenario"] for r in rows} == {"sanremo", "brazil", "garage"}


def test_aif_demo(capsys):
    assert main(["--aif-demo"]) == 0
    out = capsys.readouterr().out
    for label in ("inverted_u", "monotonic_decline", "never_rewarding"):
        assert label in out
