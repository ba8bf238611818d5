import math

import pytest

from quadcoherence import cli
from quadcoherence.figures import FigureCheckError, make_figure
from quadcoherence.numquad import IntegrationConfig


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def record(out):
    return dict(line.split("=", 1) for line in out.strip().splitlines())


def read_csv(path):
    lines = path.read_text().splitlines()
    body = [line for line in lines if not line.startswith("#")]
    return body[0].split(","), [[float(v) for v in line.split(",")] for line in body[1:]]


@pytest.mark.parametrize(
    "spec, value",
    [("vacuum", math.sqrt(2 * math.pi)), ("thermal:nbar=1", math.sqrt(2 * math.pi / 3)), ("fock:n=1", 4 * math.sqrt(2 / math.pi))],
)
def test_coherence_command(capsys, spec, value):
    code, out, _ = run(capsys, "coherence", "--state", spec)
    rec = record(out)
    assert code == 0
    assert float(rec["C"]) == pytest.approx(value, rel=1e-8)
    if spec != "fock:n=1":
        assert float(rec["rel_diff"]) < 1e-4
    else:
        assert "C_analytic" not in rec


def test_parse_error_exit_2(capsys):
    code, out, err = run(capsys, "coherence", "--state", "gaussian:sigma=oops")
    assert code == 2 and out == ""
    assert "sigma" in err


def test_bad_t_exit_2(capsys):
    code, _, err = run(capsys, "condition", "--t", "1.5", "--x0p", "0")
    assert code == 2 and "t must lie" in err


def test_missing_outcome_exit_2(capsys):
    assert run(capsys, "condition", "--state", "vacuum")[0] == 2


def test_integration_failure_exit_3(capsys, monkeypatch):
    from quadcoherence.numquad import IntegrationError

    def boom(*args, **kwargs):
        raise IntegrationError((0.5,), math.nan)

    monkeypatch.setattr(cli, "l1_coherence", boom)
    code, _, err = run(capsys, "coherence", "--state", "vacuum")
    assert code == 3 and "0.5" in err


def test_condition_thermal(capsys):
    code, out, _ = run(capsys, "condition", "--state", "thermal:nbar=1", "--x0p", "0.5")
    rec = record(out)
    assert code == 0
    assert float(rec["Cp"]) == pytest.approx(math.sqrt(math.pi), rel=1e-7)
    assert float(rec["Cp_analytic"]) == pytest.approx(math.sqrt(math.pi), rel=1e-7)
    assert float(rec["ratio"]) == pytest.approx(math.sqrt(1.5), rel=1e-7)


def test_condition_transparent(capsys):
    code, out, _ = run(capsys, "condition", "--state", "fock:n=2", "--ancilla", "thermal:nbar=1", "--t", "1", "--x0p", "0.3")
    rec = record(out)
    assert code == 0
    assert float(rec["ratio"]) == pytest.approx(1.0, rel=1e-8)
    p0 = 1 / math.sqrt(2 * math.pi * 0.75) * math.exp(-0.09 / 1.5)
    assert float(rec["p"]) == pytest.approx(p0, rel=1e-8)


def test_condition_single_photon(capsys):
    code, out, _ = run(capsys, "condition", "--state", "fock:n=1", "--x0p", "0")
    assert code == 0 and float(record(out)["ratio"]) == pytest.approx(1.0, rel=1e-8)


def test_negligible_outcome_exit_4(capsys):
    code, out, err = run(capsys, "condition", "--state", "fock:n=1", "--x0p", "10")
    assert code == 4 and "x0'=10" in err


def test_config_precedence(capsys, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\nstate = thermal:nbar=1\nrel-tol = 1e-6\nx0p = 0.5\n")
    code, out, _ = run(capsys, "coherence", "--config", str(conf))
    assert record(out)["state"] == "thermal:nbar=1"
    code, out, _ = run(capsys, "condition", "--config", str(conf), "--state", "vacuum")
    rec = record(out)
    assert code == 0 and rec["state"] == "vacuum" and rec["x0p"] == "0.5"


def test_config_file_errors(capsys, tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = blue\n")
    code, _, err = run(capsys, "coherence", "--config", str(conf))
    assert code == 2 and "colour" in err
    code, _, err = run(capsys, "coherence", "--config", str(tmp_path / "missing.conf"))
    assert code == 2


def test_integration_flags_reach_config():
    args = cli.build_parser().parse_args(["coherence", "--half-width", "10", "--rel-tol", "1e-5", "--abs-tol", "1e-9", "--depth", "9"])
    cfg = cli.integration_config(cli.resolve(args))
    assert cfg == IntegrationConfig(half_width=10, rel_tol=1e-5, abs_tol=1e-9, max_depth=9)


def test_figure_csv_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "figure", "fig3", "-o", str(a))[0] == 0
    assert run(capsys, "figure", "fig3", "-o", str(b), "--workers", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = read_csv(a)
    assert header == ["n", "C"]
    assert [r[0] for r in rows] == list(range(11))
    assert rows[0][1] == pytest.approx(math.sqrt(2 * math.pi), rel=1e-8)
    assert all(b[1] > a[1] for a, b in zip(rows, rows[1:]))


def test_figure_default_path(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(capsys, "figure", "fig2")[0] == 0
    header, rows = read_csv(tmp_path / "fig2.csv")
    assert header == ["t", "Cp_minus_C_dx0.25", "Cp_minus_C_dx1"]
    assert rows[-1] == pytest.approx([1.0, 0.0, 0.0], abs=1e-8)
    # Vacuum ancilla helps the squeezed (less coherent) input and hurts the wide one.
    assert all(r[1] >= -1e-9 and r[2] <= 1e-9 for r in rows)


def test_fig4_fig6_at_origin():
    fig4 = make_figure("fig4")
    assert fig4.columns == ["x0p", "ratio_n1", "ratio_n2", "ratio_n3"]
    assert fig4.rows[0][0] == 0 and fig4.rows[0][1] == pytest.approx(1.0, rel=1e-8)
    fig6 = make_figure("fig6")
    assert fig6.columns[0] == "x0p" and fig6.columns[1] == "p_ratio_n1"


def test_fig5_symmetric_mass():
    fig = make_figure("fig5")
    assert fig.columns == ["x0p", "p_n1", "p_n2", "p_n3"]
    assert all(v >= 0 for row in fig.rows for v in row[1:])


def test_partial_figure_is_not_written(capsys, tmp_path, monkeypatch):
    import quadcoherence.figures as figures

    def broken(cfg, workers, nodes):
        raise FigureCheckError("fig5: mirrored density for n=1 integrates to 0.9")

    monkeypatch.setitem(figures.FIGURES, "fig5", broken)
    out = tmp_path / "fig5.csv"
    code, _, err = run(capsys, "figure", "fig5", "-o", str(out))
    assert code == 3 and not out.exists()


def test_fig8_ratio_at_vacuum():
    fig = make_figure("fig8")
    assert fig.columns == ["n", "ratio"]
    assert fig.rows[0][1] == pytest.approx(1.0, rel=1e-6)


def test_fig9_endpoints():
    fig = make_figure("fig9")
    assert fig.columns == ["t", "S_avg", "S_red"]
    for t, avg, red in (fig.rows[0], fig.rows[-1]):
        assert abs(avg - red) <= 1e-4
    assert all(avg >= red - 1e-9 for _, avg, red in fig.rows)


def test_verify_subset_passes(capsys):
    code, out, _ = run(capsys, "verify", "--only", "gaussian", "--only", "output_law")
    assert code == 0
    assert out.count("[PASS]") == 2


def test_verify_negative_control(capsys):
    code, out, _ = run(capsys, "verify", "--only", "output_law", "--perturb-r")
    assert code == 1
    assert "[FAIL] output_l1" in out


LAWS_EXCEPT_IDENTITY = ["gaussian", "thermal", "output_law", "gain", "photon_kernel", "fock", "uncertainty", "entropy", "normalization"]


def test_verify_loose_tolerance_same_pattern(capsys):
    args = ["verify"] + [a for name in LAWS_EXCEPT_IDENTITY for a in ("--only", name)]
    code, tight, _ = run(capsys, *args)
    code_loose, loose, _ = run(capsys, *args, "--rel-tol", "1e-2")
    assert code == code_loose == 0
    status = lambda text: [line[:6] for line in text.splitlines() if line.startswith("[")]
    assert status(tight) == status(loose)

