import math

import pytest

from squeezamp import cli


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


P1 = "protocol=single\nalpha=1\neta=0.01\ng=0.5\nT=4\ntau=2\n"
M1 = "# eight segments\nprotocol=msp\nalpha=1\neta=0.01\ng=0.8\ntau=1\nT=8\n"


def test_parse_config_comments_and_lists():
    cfg = cli.parse_config("protocol = msp  # trailing\n\ng_list=1, 2 3\nT_list=4\n")
    assert cfg.protocol == "msp" and cfg.g_list == [1.0, 2.0, 3.0] and cfg.T_list == [4.0]


@pytest.mark.parametrize("text", ["bogus=1\n", "alpha\n", "alpha=x\n", "protocol=triple\n",
                                  "g_list=1,a\n", "format=json\n", "dim=-1\n",
                                  "sign_table=++,--\n"])
def test_bad_configs(text):
    with pytest.raises(cli.ConfigError):
        cli.parse_config(text)


def test_sign_table_key():
    cfg = cli.parse_config("sign_table=+-,++,++,+-,--,-+,-+,--\n")
    assert cfg.sign_table == ((1, -1), (1, 1), (1, 1), (1, -1), (-1, -1), (-1, 1), (-1, 1), (-1, -1))


def test_fmt_number():
    assert cli.fmt_number(0.1) == "0.1"
    assert cli.fmt_number(1 / 3) == "0.333333333"
    assert cli.fmt_number(2.0) == "2.0"
    assert cli.fmt_number(math.nan) == "nan"
    assert cli.fmt_number(123456789012.0) == "123456789000.0"


def test_simulate_p1(tmp_path, capsys):
    assert cli.main(["simulate", "--config", _write(tmp_path, "p1.cfg", P1)]) == 0
    out = capsys.readouterr().out
    assert "signal_phase        0.1149251" in out
    assert "P_down oracle       0.9967017" in out


def test_simulate_m1(tmp_path, capsys):
    assert cli.main(["simulate", "--config", _write(tmp_path, "m1.cfg", M1)]) == 0
    assert "signal_phase        0.3943661" in capsys.readouterr().out


def test_simulate_forced_small_dim(tmp_path, capsys):
    code = cli.main(["simulate", "--config", _write(tmp_path, "p1.cfg", P1), "--dim", "16"])
    assert code == 3
    assert "truncation too small" in capsys.readouterr().out


def test_simulate_runaway_table_exits_3(tmp_path, capsys):
    # a non-disentangling table keeps amplifying the force displacement
    bad = M1.replace("g=0.8", "g=2") + "sign_table=++,++,++,++,--,--,--,--\n"
    assert cli.main(["simulate", "--config", _write(tmp_path, "bad.cfg", bad)]) == 3
    assert "truncation too small" in capsys.readouterr().out


def test_simulate_mismatch_exits_4(tmp_path, monkeypatch, capsys):
    from squeezamp import engine
    monkeypatch.setattr(engine, "PHASE_SIGN", -engine.PHASE_SIGN)
    assert cli.main(["simulate", "--config", _write(tmp_path, "p1.cfg", P1)]) == 4
    assert "mismatch" in capsys.readouterr().out


def test_custom_segments_file(tmp_path, capsys):
    seg = _write(tmp_path, "segs.txt", "# dur eta sdf alpha pd g\n2 0.01 1 1 1 0.5\n2 0.01 -1 1 -1 0.5\n")
    cfg = _write(tmp_path, "c.cfg", f"protocol=custom-file\nsegments_file={seg}\n")
    assert cli.main(["simulate", "--config", cfg]) == 0
    assert "0.1149251" in capsys.readouterr().out


def test_missing_config_file(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_sweep_empty_grid(tmp_path):
    cfg = _write(tmp_path, "s.cfg", "protocol=single\nT_list=1,2\n")
    assert cli.main(["sweep", "--config", cfg]) == 2


def test_sweep_csv_deterministic(tmp_path):
    cfg = _write(tmp_path, "s.cfg", "protocol=single\nalpha=1\neta=0.01\n"
                 "g_list=0.1,0.5,1,2\nT_list=1,2.5,5,10\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert cli.main(["sweep", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "protocol,alpha,eta,g,T,delta_eta,delta_beta,n_bar,sql,hl,gain_db,k,flags"
    assert len(lines) == 17
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[6]) > float(cells[8])


def test_sweep_tsv_and_gain_row(tmp_path):
    from squeezamp.metrology import msp_T_for_nbar
    T = msp_T_for_nbar(1.0, 4.0, 1e3)
    cfg = _write(tmp_path, "s.cfg", f"protocol=msp\nalpha=1\ng_list=4\nT_list={T!r}\n")
    out = tmp_path / "o.tsv"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out), "--format", "tsv"]) == 0
    header, row = out.read_text().splitlines()
    cells = dict(zip(header.split("\t"), row.split("\t")))
    assert float(cells["gain_db"]) >= 8.8
    assert "sub_sql" in cells["flags"]


def test_qfi_command(capsys):
    assert cli.main(["qfi"]) == 0
    assert "29.5562244" in capsys.readouterr().out


def test_validate_perturbed_table_exit_1(tmp_path, monkeypatch, capsys):
    from squeezamp import validation
    # only the equivalence criterion matters here; skip the slower ones
    monkeypatch.setattr(validation, "criteria", lambda table, base: [
        lambda: validation.crit_equivalence(table), validation.crit_qfi])
    cfg = _write(tmp_path, "v.cfg", "sign_table=+-,++,++,+-,-+,--,--,-+\n")
    assert cli.main(["validate", "--config", cfg]) == 1
    out = capsys.readouterr().out
    assert "[FAIL]  1" in out and "[PASS] 11" in out and "PASS 1/2" in out


def test_validate_low_trotter(monkeypatch, capsys):
    from squeezamp import validation
    monkeypatch.setattr(validation, "criteria", lambda table, base: [
        lambda: validation.crit_trotter(base)])
    assert cli.main(["validate", "--trotter", "4"]) == 0
    assert "PASS 1/1" in capsys.readouterr().out
