import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def run_script(name, *args, cwd=None):
    proc = subprocess.run([sys.executable, str(SCRIPTS / name), *map(str, args)],
                          capture_output=True, text=True, cwd=cwd, check=False)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def test_lpf_response_table():
    out = run_script("lpf_response.py", "--cutoffs", "0.1", "--taps", "101")
    row = out.splitlines()[1].split()
    assert row[:2] == ["101", "0.10"]
    assert float(row[6]) == pytest.approx(0.1, abs=1e-3)


def test_eval_demo_writes_report(tmp_path):
    out = run_script("eval_demo.py", "--out", tmp_path / "ev")
    assert "pooled by attack" in out
    assert (tmp_path / "ev" / "report.json").exists()


def test_demo_corpus_runs_through_cli(tmp_path):
    run_script("make_demo_corpus.py", tmp_path / "demo", "--speakers", "2", "--per-speaker", "2", "--no-codec")
    from spoofaug.cli import main

    assert main(["augment", "--config", str(tmp_path / "demo" / "augment.toml")]) == 0
    assert len(list((tmp_path / "demo" / "wav_aug").rglob("*.wav"))) == 4


def test_mask_shape_figure(tmp_path):
    pytest.importorskip("matplotlib")
    run_script("plot_mask_shapes.py", "-o", tmp_path / "m.png")
    assert (tmp_path / "m.png").stat().st_size > 0
