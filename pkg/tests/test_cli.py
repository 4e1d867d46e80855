import json
import math
import subprocess
import sys

from unclone.cli import main
from unclone.games import CURVE_CSV_HEADER


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGameCommand:
    def test_breidbart_report(self, capsys):
        code, out, _ = run_cli(
            ["game", "--scheme", "ce", "--lambda", "2", "--attack", "breidbart",
             "--mode", "exact"],
            capsys,
        )
        assert code == 0
        data = json.loads(out)
        assert abs(data["value"] - ((2 + math.sqrt(2)) / 4) ** 2) < 1e-9
        assert data["seed"] == 0
        assert "config_hash" in data

    def test_min_entropy_distribution(self, capsys):
        code, out, _ = run_cli(
            ["game", "--scheme", "ce", "--lambda", "2", "--attack", "breidbart",
             "--dist", "min-entropy:1", "--mode", "exact"],
            capsys,
        )
        assert code == 0
        data = json.loads(out)
        assert data["game"] == "cloning(min-entropy)"
        assert data["bound_satisfied"] is True

    def test_missing_required_flags(self, capsys):
        code, _, err = run_cli(["game", "--scheme", "ce"], capsys)
        assert code == 2
        assert "needs" in err

    def test_capacity_exit_code(self, capsys):
        code, _, err = run_cli(
            ["game", "--scheme", "ce", "--lambda", "8", "--attack", "guess",
             "--mode", "exact"],
            capsys,
        )
        assert code == 3
        assert "capacity" in err.lower()

    def test_incompatible_attack_is_config_error(self, capsys):
        code, _, err = run_cli(
            ["game", "--scheme", "ce", "--lambda", "2", "--attack", "copy",
             "--mode", "exact"],
            capsys,
        )
        assert code == 2

    def test_env_var_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("UNCLONE_SEED", "17")
        code, out, _ = run_cli(
            ["game", "--scheme", "ce", "--lambda", "1", "--attack", "breidbart",
             "--mode", "exact"],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["seed"] == 17

    def test_config_file(self, capsys, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps(
            {"scheme": "ce", "lam": 2, "attack": "breidbart", "mode": "exact"}
        ))
        code, out, _ = run_cli(["--config", str(config), "game"], capsys)
        assert code == 0
        assert abs(json.loads(out)["value"] - 0.7285533905932737) < 1e-9

    def test_unknown_config_key_rejected(self, capsys, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({"scheme": "ce", "lam": 2, "turbo": True}))
        code, _, err = run_cli(["--config", str(config), "game"], capsys)
        assert code == 2
        assert "unknown config keys" in err

    def test_flags_override_config(self, capsys, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps(
            {"scheme": "ce", "lam": 1, "attack": "breidbart", "mode": "exact"}
        ))
        code, out, _ = run_cli(
            ["--config", str(config), "game", "--lambda", "2"], capsys
        )
        assert code == 0
        assert json.loads(out)["lam"] == 2


class TestCurveCommand:
    def test_header_and_rows(self, capsys):
        code, out, _ = run_cli(["curve", "--min", "1", "--max", "10"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,classical,ideal,conjugate,qprf,measured_attack,measured_value"
        assert len(lines) == 11
        row5 = lines[5].split(",")
        assert row5[0] == "5"
        assert abs(float(row5[2]) - 2.0 ** -5) < 1e-12
        assert abs(float(row5[4]) - 0.28125) < 1e-12

    def test_rows_match_closed_forms(self, capsys):
        code, out, _ = run_cli(["curve", "--min", "1", "--max", "10"], capsys)
        for line in out.strip().splitlines()[1:]:
            parts = line.split(",")
            n = int(parts[0])
            assert float(parts[1]) == 1.0
            assert abs(float(parts[2]) - 2.0 ** -n) < 1e-12
            assert abs(float(parts[3]) - (0.5 + 0.5 / math.sqrt(2)) ** n) < 1e-12
            assert abs(float(parts[4]) - min(1.0, 9.0 * 2.0 ** -n)) < 1e-12
            assert float(parts[6]) <= float(parts[3]) + 1e-9

    def test_file_outputs_with_figure(self, capsys, tmp_path):
        out_csv = tmp_path / "curve.csv"
        code, _, _ = run_cli(
            ["curve", "--min", "1", "--max", "5", "--out", str(out_csv)], capsys
        )
        assert code == 0
        assert out_csv.exists()
        assert (tmp_path / "curve.meta.json").exists()
        assert (tmp_path / "curve.png").exists()
        meta = json.loads((tmp_path / "curve.meta.json").read_text())
        assert "config_hash" in meta and "seed" in meta

    def test_no_plot_flag(self, capsys, tmp_path):
        out_csv = tmp_path / "curve.csv"
        code, _, _ = run_cli(
            ["curve", "--min", "1", "--max", "3", "--out", str(out_csv), "--no-plot"],
            capsys,
        )
        assert code == 0
        assert not (tmp_path / "curve.png").exists()

    def test_reruns_are_byte_identical(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        run_cli(["curve", "--min", "1", "--max", "6", "--out", str(a), "--no-plot"],
                capsys)
        run_cli(["curve", "--min", "1", "--max", "6", "--out", str(b), "--no-plot"],
                capsys)
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.meta.json").read_bytes() == (
            tmp_path / "b.meta.json"
        ).read_bytes()


class TestMoeCommand:
    def test_search_output(self, capsys):
        code, out, _ = run_cli(
            ["moe", "--lambda", "1", "--seeds", "3", "--iters", "100"], capsys
        )
        assert code == 0
        data = json.loads(out)
        assert data["bound_satisfied"] is True
        assert 0.85 <= data["best_value"] <= data["bound"] + 1e-9
        assert len(data["runs"]) == 3


class TestVerifyCommand:
    def test_fast_verify_passes(self, capsys):
        code, out, _ = run_cli(["verify", "--fast"], capsys)
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith("[")]
        assert len(lines) == 9
        assert all(l.startswith("[PASS]") for l in lines)


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "unclone.cli", "curve", "--min", "1", "--max", "2"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith(CURVE_CSV_HEADER)
