import subprocess
import sys

import pytest

from pdu_forge.circuit import format_netlist, parse_netlist
from pdu_forge.cli import EXIT_INPUT, EXIT_OK, EXIT_SIMULATION, main, parse_angle


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def netfile(tmp_path, capsys):
    def make(*argv):
        path = tmp_path / f"{argv[0]}_{len(list(tmp_path.iterdir()))}.net"
        code, _, _ = run(capsys, "generate", *argv, "-o", str(path))
        assert code == EXIT_OK
        return path

    return make


# -- design ----------------------------------------------------------------------------


def test_design_summary_headlines(capsys):
    code, out, _ = run(capsys, "design", "--config", "calibration", "--summary")
    assert code == EXIT_OK
    assert "Q_SLM: 2.7e+04" in out
    assert "Q_DPDC: 4.11e+07" in out
    assert "P_DPUC: 0.008 W" in out


def test_design_raw_precision(capsys):
    _, out, _ = run(capsys, "design", "--summary", "--raw")
    line = next(l for l in out.splitlines() if l.startswith("Q_SLM"))
    assert len(line.split()[1]) > 6


def test_design_sweep_row_count(capsys):
    code, out, _ = run(capsys, "design", "--sweep", "eta_pdc", "--qmin", "1e5", "--qmax", "2e8", "--points", "500")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "Q,eta"
    assert len(lines) == 501


def test_design_sweep_to_file_and_force(capsys, tmp_path):
    out = tmp_path / "q.csv"
    args = ["design", "--sweep", "q_vs_radius", "--points", "10", "-o", str(out)]
    assert run(capsys, *args)[0] == EXIT_OK
    assert len(out.read_text().splitlines()) == 11
    code, _, err = run(capsys, *args)
    assert code == EXIT_INPUT and "--force" in err
    assert run(capsys, *args, "--force")[0] == EXIT_OK


def test_design_eta_puc_grid(capsys):
    _, out, _ = run(capsys, "design", "--sweep", "eta_puc", "--points", "4", "--lpoints", "3")
    assert len(out.splitlines()) == 1 + 12


def test_design_empty_config(capsys, tmp_path):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("")
    code, _, err = run(capsys, "design", "--config", str(cfg))
    assert code == EXIT_INPUT
    assert "missing required keys" in err and "chi2" in err


def test_design_bad_config_line(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("chi2 = 1\nwhat is this\n")
    code, _, err = run(capsys, "design", "--config", str(cfg))
    assert code == EXIT_INPUT and "line 2" in err


def test_design_missing_config(capsys):
    assert run(capsys, "design", "--config", "/nonexistent.cfg")[0] == EXIT_INPUT


# -- generate ----------------------------------------------------------------------------


def test_generate_fock_pdu_lines(capsys):
    code, out, _ = run(capsys, "generate", "fock", "--stages", "2")
    assert code == EXIT_OK
    assert sum(1 for l in out.splitlines() if l.startswith("pdu ")) == 3


def test_generate_round_trip_byte_identical(capsys):
    for argv in (["fock", "--stages", "3"], ["ghz", "--stages", "2", "--phi", "pi/3"], ["cluster4"]):
        _, out, _ = run(capsys, "generate", *argv)
        assert format_netlist(parse_netlist(out)) == out


def test_generate_invalid_parameters(capsys):
    assert run(capsys, "generate", "fock", "--stages", "9")[0] == EXIT_INPUT
    assert run(capsys, "generate", "fock", "--eta-pdc", "1.5")[0] == EXIT_INPUT
    assert run(capsys, "generate", "tree")[0] == EXIT_INPUT
    assert run(capsys, "generate", "ghz", "--phi", "banana")[0] == EXIT_INPUT


def test_generate_cluster_phase_options(capsys):
    _, default, _ = run(capsys, "generate", "cluster4")
    _, published, _ = run(capsys, "generate", "cluster4", "--published-phases")
    _, custom, _ = run(capsys, "generate", "cluster4", "--phases", "3pi/2", "3pi/2", "3pi/2", "0")
    assert default == custom
    assert published != default


def test_parse_angle():
    assert parse_angle("pi/2") == pytest.approx(1.5707963267948966)
    assert parse_angle("-pi") == pytest.approx(-3.141592653589793)
    assert parse_angle("7pi/4") == pytest.approx(5.497787143782138)
    assert parse_angle("0.25") == 0.25


# -- simulate ---------------------------------------------------------------------------


def test_simulate_fock(capsys, netfile):
    code, out, _ = run(capsys, "simulate", str(netfile("fock", "--stages", "1")))
    assert code == EXIT_OK
    assert "photons: {2: 1.0}" in out
    assert "success_probability: 1.000000" in out


def test_simulate_ghz_target(capsys, netfile):
    code, out, _ = run(capsys, "simulate", str(netfile("ghz", "--stages", "2", "--phi", "0")), "--target", "ghz:4:0")
    assert code == EXIT_OK
    assert "fidelity: 1.000000" in out
    assert "leakage: 0.000000" in out


def test_simulate_cluster_target(capsys, netfile):
    _, out, _ = run(capsys, "simulate", str(netfile("cluster4")), "--target", "cluster4")
    assert "fidelity: 1.000000" in out


def test_simulate_postselect_lossy(capsys, netfile):
    path = netfile("ghz", "--stages", "1", "--eta-pdc", "0.9", "--eta-puc-s", "0.8")
    _, out, _ = run(capsys, "simulate", str(path), "--postselect", "--target", "ghz:2:0")
    assert "success_probability: 0.720000" in out
    assert "fidelity: 1.000000" in out


def test_simulate_is_deterministic(capsys, netfile, tmp_path):
    path = netfile("ghz", "--stages", "2", "--eta-pdc", "0.7")
    first = run(capsys, "simulate", str(path), "--terms-csv", str(tmp_path / "a.csv"))
    second = run(capsys, "simulate", str(path), "--terms-csv", str(tmp_path / "b.csv"))
    assert first == second
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_simulate_two_photons_into_pdu(capsys, tmp_path):
    path = tmp_path / "two.net"
    path.write_text("mode 0 in Pump\nmode 1 s Pump\nmode 2 i Pump\nsource 0\nsource 0\npdu 0 1 2 1.0 1.0 1.0\n")
    code, out, err = run(capsys, "simulate", str(path))
    assert code == EXIT_SIMULATION
    assert out == ""
    assert "PumpOccupancyUnsupported" in err
    assert "line 6: pdu 0 1 2" in err


def test_simulate_input_errors(capsys, tmp_path, netfile):
    assert run(capsys, "simulate", str(tmp_path / "missing.net"))[0] == EXIT_INPUT
    bad = tmp_path / "bad.net"
    bad.write_text("mode 0 a Pump\nbs 0\n")
    code, _, err = run(capsys, "simulate", str(bad))
    assert code == EXIT_INPUT and "line 2" in err
    invalid = tmp_path / "invalid.net"
    invalid.write_text("mode 0 a Pump\nsource 3\n")
    assert run(capsys, "simulate", str(invalid))[0] == EXIT_INPUT
    ghz = str(netfile("ghz", "--stages", "1"))
    assert run(capsys, "simulate", ghz, "--target", "ghz:4:0")[0] == EXIT_INPUT
    assert run(capsys, "simulate", ghz, "--target", "w:2")[0] == EXIT_INPUT


def test_nmax_env_var(capsys, tmp_path, monkeypatch):
    path = tmp_path / "hom.net"
    path.write_text("mode 0 a Pump\nmode 1 b Pump\nsource 0\nsource 1\nbs 0 1 0.7853981633974483\n")
    assert run(capsys, "simulate", str(path))[0] == EXIT_OK
    monkeypatch.setenv("PDU_FORGE_NMAX", "1")
    code, _, err = run(capsys, "simulate", str(path))
    assert code == EXIT_SIMULATION and "OccupancyOverflow" in err


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pdu_forge", "generate", "fock", "--stages", "1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.count("pdu ") == 1
