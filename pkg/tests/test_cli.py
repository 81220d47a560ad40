import pytest

from critnls.cli import build_parser, main


def test_parser_knows_all_subcommands():
    p = build_parser()
    for cmd in ("evolve", "semiclassical", "critical-point", "painleve1", "painleve12", "match", "scaling",
                "blowup", "nongeneric-eta"):
        args = p.parse_args([cmd, "--threads", "2"])
        assert args.command == cmd and args.threads == 2
    with pytest.raises(SystemExit):
        p.parse_args(["unknown"])


def test_critical_point_command(tmp_path, capsys):
    assert main(["critical-point", "--case", "quintic_defoc_sech", "--output", str(tmp_path)]) == 0
    text = (tmp_path / "critical_point.txt").read_text()
    assert "t0 = 1.29903810568" in text
    assert "config.case.name = quintic_defoc_sech" in (tmp_path / "metadata.txt").read_text()


def test_unknown_key_is_reported(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("epsilonn: [0.1]\n")
    assert main(["scaling", "--config", str(cfg), "--output", str(tmp_path / "o")]) == 2
    assert "epsilonn" in capsys.readouterr().err


def test_study_mismatch_is_reported(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("study: blowup\n")
    assert main(["scaling", "--config", str(cfg)]) == 2
    assert "does not match" in capsys.readouterr().err


def test_painleve1_command(tmp_path):
    assert main(["painleve1", "--output", str(tmp_path)]) == 0
    meta = dict(line.split(" = ", 1) for line in (tmp_path / "metadata.txt").read_text().splitlines())
    assert float(meta["pole"]) == pytest.approx(-2.3841687, abs=1e-5)
    assert float(meta["ray.residual"]) < 1e-10
    assert (tmp_path / "p1_ray.tsv").read_text().startswith("s\tre_xi")
