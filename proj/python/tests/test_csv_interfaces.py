"""The plotting layer reads these files; their layout is fixed here."""

import textwrap

import pytest

import opweight
from opweight import CSV_HEADERS, read_csv


def write_config(tmp_path, body):
    path = tmp_path / "run.toml"
    out = tmp_path / "out"
    path.write_text(textwrap.dedent(body).format(out=out.as_posix()))
    return str(path), out


def check_provenance(table):
    assert len(table.config_hash) == 16
    assert table.version == opweight.__version__


def test_tempmap_csv(tmp_path):
    cfg, out = write_config(
        tmp_path,
        """
        [model]
        L = 6
        [tempmap]
        dtheta_deg = 45
        dphi_deg = 90
        [output]
        dir = "{out}"
        """,
    )
    opweight.run("tempmap", cfg)
    t = read_csv(out / "tempmap.csv")
    check_provenance(t)
    assert t.columns == CSV_HEADERS["tempmap.csv"]
    assert len(t.rows) == 5 * 4
    assert t.rows[0]["theta_deg"] == 0.0


def test_evolve_csvs(tmp_path):
    cfg, out = write_config(
        tmp_path,
        """
        [model]
        L = 6
        [evolution]
        dt = 0.05
        t_max = 0.5
        chi_max = 16
        [initial]
        theta_deg = 45
        phi_deg = 180
        operator = "x"
        [analysis]
        omega_star = [3, 4]
        [output]
        dir = "{out}"
        stride = 2
        """,
    )
    opweight.run("evolve", cfg)
    dens = read_csv(out / "densities.csv")
    assert dens.columns == CSV_HEADERS["densities.csv"]
    assert set(dens.column("kind")) == {"c", "nc"}
    assert len(dens.rows) == 6 * 2 * 7
    contrib = read_csv(out / "contributions.csv")
    assert len(contrib.rows) == 6 * 7
    owe = read_csv(out / "owe.csv")
    assert owe.columns == ["t", "omega_star", "owe", "p1", "p2", "p3", "p4"]
    assert len(owe.rows) == 6 * 2
    first = owe.rows[0]
    assert first["t"] == 0.0 and first["owe"] == 0.0 and first["p1"] is None
    obs = read_csv(out / "observables.csv")
    assert obs.columns == CSV_HEADERS["observables.csv"]
    assert obs.config_hash == dens.config_hash == owe.config_hash


def test_backflow_csv(tmp_path):
    cfg, out = write_config(
        tmp_path,
        """
        [model]
        L = 6
        [evolution]
        dt = 0.01
        t_max = 1.0
        [analysis]
        omega_perp = [2, 3]
        [output]
        dir = "{out}"
        """,
    )
    opweight.run("backflow", cfg)
    t = read_csv(out / "backflow.csv")
    assert t.columns == CSV_HEADERS["backflow.csv"]
    assert {r["omega_perp"] for r in t.rows} == {2.0, 3.0}
    assert all(r["t"] >= r["t0"] for r in t.rows)


def test_sweep_csv(tmp_path):
    cfg, out = write_config(
        tmp_path,
        """
        [model]
        L = 6
        [evolution]
        dt = 0.05
        t_max = 0.5
        chi_max = 16
        [analysis]
        omega_star = [3]
        [sweep]
        theta_deg = [0, 90]
        phi_deg = [0]
        operators = ["x", "z"]
        ed_sites = 6
        [output]
        dir = "{out}"
        """,
    )
    opweight.run("sweep", cfg)
    t = read_csv(out / "sweep.csv")
    assert t.columns == CSV_HEADERS["sweep.csv"]
    assert len(t.rows) == 2 * 2
    assert set(t.column("operator")) == {"x", "z"}


def test_header_mismatch_is_rejected(tmp_path):
    p = tmp_path / "tempmap.csv"
    p.write_text("# config_hash=0123456789abcdef version=0\ntheta,phi\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(p)


def test_unknown_command(tmp_path):
    with pytest.raises(opweight.OpweightError):
        opweight.run("plot", out_dir=str(tmp_path))
