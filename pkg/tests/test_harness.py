from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from entdyn.harness import ConfigError, SweepRow, emit_csv, emit_svg, load_config, parse_config, run_sweep
from entdyn.harness.cli import main
from entdyn.harness.emit import CSV_HEADER, rows_to_svg
from entdyn.states import ScenarioKind

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def base_config(**overrides):
    cfg = {
        "scenario": {"kind": "PureAlpha", "alpha_sq": 0.2},
        "channel": {"type": "amplitude", "epsilon_grid": [0.0, 0.5, 1.0]},
    }
    cfg.update(overrides)
    return cfg


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def test_parse_minimal():
    cfg = parse_config(base_config())
    assert cfg.scenario.kind is ScenarioKind.PURE_ALPHA
    assert cfg.channel.grid == (0.0, 0.5, 1.0)
    assert cfg.tomography is None


def test_linspace_grid_and_slabs():
    cfg = parse_config(base_config(channel={"type": "amplitude", "slab_pairs": [0, 1, 3]}))
    assert np.allclose(cfg.channel.grid, [0.0, 0.46, 0.842536])
    cfg = parse_config(base_config(channel={"type": "phase", "dephasing_grid": {"start": 0, "stop": 1, "num": 5}}))
    assert cfg.channel.grid == (0.0, 0.25, 0.5, 0.75, 1.0)


def test_complex_kappa_a():
    cfg = parse_config(base_config(scenario={"kind": "MixedQ1", "kappa_a": [0.3, 0.1]}))
    assert cfg.scenario.kappa_a == complex(0.3, 0.1)


@pytest.mark.parametrize(
    "cfg, fragment",
    [
        (base_config(extra=1), "unknown key"),
        (base_config(channel={"type": "amplitude", "epsilon_grid": [0.0, 2.0]}), "[0, 1]"),
        (base_config(channel={"type": "amplitude", "epsilon_grid": [0.5, 0.1]}), "epsilon_grid[1]"),
        (base_config(channel={"type": "amplitude", "epsilon_grid": [0.1, "x"]}), "epsilon_grid[1]"),
        (base_config(channel={"type": "loss", "epsilon_grid": [0.1]}), "channel.type"),
        (base_config(scenario={"kind": "PureAlpha"}), "alpha_sq"),
        (base_config(scenario={"kind": "MixedQ1", "kappa_a": 2.0}), "kappa_a"),
        (base_config(tomography={"n_total": 100, "seed": -1}), "tomography.seed"),
        (base_config(tomography={"n_total": 100, "estimator": "bayes"}), "estimator"),
        (
            base_config(channel={"type": "phase", "retardation_grid": [0, 1], "spectrum": {"kind": "Lorentz"}}),
            "channel.spectrum",
        ),
    ],
)
def test_config_errors_name_the_field(cfg, fragment):
    with pytest.raises(ConfigError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        parse_config(cfg)


def test_invalid_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"scenario": \n  {"kind": }\n}')
    with pytest.raises(ConfigError, match=r"bad.json:2:\d+"):
        load_config(path)


@pytest.mark.parametrize("name", sorted(p.name for p in FIXTURES.glob("fig*.json")))
def test_fixtures_parse(name):
    load_config(FIXTURES / name)


def test_sweep_rows_follow_laws():
    rows = run_sweep(parse_config(base_config()))
    assert [r.param for r in rows] == [0.0, 0.5, 1.0]
    for r in rows:
        assert abs(r.c_left - 0.8 * np.sqrt(1 - r.param)) < 1e-12
        assert abs(r.c_left - r.c_right) < 1e-9


def test_noiseless_mle_tomography_tracks_theory():
    cfg = parse_config(
        base_config(
            scenario={"kind": "MixedHWP1Q1"},
            channel={"type": "phase", "dephasing_grid": [0.0, 0.3, 0.8]},
            tomography={"n_total": 1e4, "noise": "none"},
        )
    )
    for r in run_sweep(cfg):
        assert r.c_left <= r.c_right + 1e-9
        assert abs(r.c_left_tomo - r.c_left) < 1e-5


def test_empty_rows_csv_is_header_only(tmp_path):
    path = tmp_path / "sub" / "rows.csv"
    emit_csv([], path)
    assert path.read_text() == CSV_HEADER + "\n"


def test_svg_needs_rows(tmp_path):
    with pytest.raises(ValueError):
        emit_svg([], tmp_path / "x.svg")


def test_constant_rows_give_two_flat_polylines():
    svg = rows_to_svg([SweepRow(x, 0.5, 0.5, 0.5) for x in (0.0, 1.0, 2.0)])
    polys = [line for line in svg.splitlines() if line.startswith("<polyline")]
    assert len(polys) == 2
    for line in polys:
        ys = {pt.split(",")[1] for pt in line.split('"')[1].split()}
        assert len(ys) == 1
    assert 'width="800" height="600"' in svg


def test_cli_sweep_writes_outputs(tmp_path, capsys):
    cfg = base_config(outputs={"csv_path": str(tmp_path / "o.csv"), "svg_path": str(tmp_path / "o.svg")})
    assert main(["sweep", "--config", str(write(tmp_path, cfg))]) == 0
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 4
    assert (tmp_path / "o.svg").read_text().startswith("<?xml")


def test_cli_sweep_without_outputs_prints_csv(tmp_path, capsys):
    assert main(["sweep", "--config", str(write(tmp_path, base_config()))]) == 0
    assert capsys.readouterr().out.startswith(CSV_HEADER)


def test_cli_missing_config(capsys):
    assert main(["sweep", "--config", "missing.json"]) == 2
    assert "missing.json" in capsys.readouterr().err


def test_cli_unknown_key_exit_2(tmp_path):
    assert main(["sweep", "--config", str(write(tmp_path, base_config(bogus=True)))]) == 2


def test_cli_usage_errors():
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["sweep", "--help"]) == 0


def test_cli_verify_passes(capsys):
    assert main(["verify", "--samples", "1000", "--seed", "7"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 5 and all(line.startswith("[PASS]") for line in out)


def test_cli_esd_found(tmp_path, capsys):
    cfg = base_config(scenario={"kind": "MixedHWP1Q1"}, channel={"type": "phase", "dephasing_grid": {"start": 0, "stop": 1, "num": 11}})
    assert main(["esd", "--config", str(write(tmp_path, cfg))]) == 0
    t = float(capsys.readouterr().out.split()[1])
    assert abs(t - 4 / 7) < 1e-6


def test_cli_esd_absent(tmp_path, capsys):
    cfg = base_config(scenario={"kind": "MixedQ1", "kappa_a": 1.0}, channel={"type": "phase", "dephasing_grid": [0.0, 0.5, 0.9]})
    assert main(["esd", "--config", str(write(tmp_path, cfg))]) == 1
    assert "no ESD in range" in capsys.readouterr().out


def test_cli_tomo_round_trip(tmp_path, capsys):
    cfg = base_config(tomography={"n_total": 1e4, "seed": 3})
    path = write(tmp_path, cfg)
    counts = tmp_path / "counts.csv"
    assert main(["tomo", "--config", str(path), "--index", "1", "--counts-out", str(counts)]) == 0
    first = capsys.readouterr().out
    assert main(["tomo", "--config", str(path), "--index", "1", "--counts-in", str(counts)]) == 0
    second = capsys.readouterr().out
    assert first.split("\n", 1)[1] == second
    fid = float(next(line for line in second.splitlines() if line.startswith("fidelity")).split()[1])
    assert fid > 0.98


def test_cli_tomo_bad_index(tmp_path):
    cfg = base_config(tomography={"n_total": 1e4})
    assert main(["tomo", "--config", str(write(tmp_path, cfg)), "--index", "9"]) == 2
