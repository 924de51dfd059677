from afdm.cli import main
from afdm.harness import BER_HEADER, EST_HEADER


BASE = """\
schema_version = 1
waveform = afdm
n = 16
alphabet = bpsk
detector = lmmse
p_paths = 2
l_max = 1
alpha_max = 1
doppler_mode = integer-uniform
snr_db = 0, 4, 8
trials = 64
seed = 7
"""


def write_cfg(tmp_path, text, name="sim.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_simulate_writes_csv(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE)
    out = str(tmp_path / "ber.csv")
    assert main(["simulate", "--config", cfg, "--out", out]) == 0
    assert "wrote 3 records" in capsys.readouterr().out
    lines = open(out).read().splitlines()
    assert lines[0] == BER_HEADER
    assert len(lines) == 4


def test_seed_override_changes_hash(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    main(["simulate", "--config", cfg, "--out", out1])
    main(["simulate", "--config", cfg, "--out", out2, "--seed", "99"])
    h1 = open(out1).read().splitlines()[1].split(",")[0]
    h2 = open(out2).read().splitlines()[1].split(",")[0]
    assert h1 != h2


def test_missing_config_file_exits_2(tmp_path, capsys):
    out = str(tmp_path / "x.csv")
    assert main(["simulate", "--config", str(tmp_path / "nope.cfg"),
                 "--out", out]) == 2
    assert "error:" in capsys.readouterr().err


def test_invalid_config_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE + "bogus_key = 1\n")
    assert main(["simulate", "--config", cfg,
                 "--out", str(tmp_path / "x.csv")]) == 2
    assert "bogus_key" in capsys.readouterr().err


def test_infeasible_search_exits_3(tmp_path, capsys):
    text = BASE.replace("n = 16", "n = 32").replace("alphabet = bpsk",
                                                    "alphabet = qpsk")
    cfg = write_cfg(tmp_path, text.replace("detector = lmmse", "detector = ml"))
    assert main(["simulate", "--config", cfg,
                 "--out", str(tmp_path / "x.csv")]) == 3


def test_estimate_command(tmp_path, capsys):
    text = BASE + "estimation = integer\nsnr_p_db = 35\n"
    cfg = write_cfg(tmp_path, text)
    out = str(tmp_path / "est.csv")
    assert main(["estimate", "--config", cfg, "--out", out]) == 0
    stdout = capsys.readouterr().out
    assert "exact_rate=" in stdout
    lines = open(out).read().splitlines()
    assert lines[0] == EST_HEADER
    assert len(lines) == 2


def test_estimate_rejects_ideal_csi_config(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE)
    assert main(["estimate", "--config", cfg,
                 "--out", str(tmp_path / "x.csv")]) == 2


def test_diversity_check_output(tmp_path, capsys):
    text = BASE.replace("n = 16", "n = 8").replace("trials = 64", "trials = 3")
    cfg = write_cfg(tmp_path, text)
    assert main(["diversity-check", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "channel 0: min_rank=" in out
    assert "full diversity in" in out


def test_convergence_check_output(tmp_path, capsys):
    text = BASE.replace("detector = lmmse", "detector = mrc-dfe")
    text = text.replace("trials = 64", "trials = 8")
    cfg = write_cfg(tmp_path, text)
    assert main(["convergence-check", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert out.startswith("channel_id,rho,iterations,final_delta")
    assert "max rho =" in out
