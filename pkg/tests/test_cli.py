import json
from pathlib import Path

import pytest

from dbmatch import cli
from dbmatch import netlist as nl

SYNTH = [
    "synthesize",
    "--fl", "28g", "--fh", "38g",
    "--ropt", "50", "--rl", "50",
    "--cp", "150f", "--cs", "150f",
]


def run(argv, capsys=None):
    code = cli.main(argv)
    if capsys is None:
        return code
    out = capsys.readouterr()
    return code, out.out, out.err


def test_synthesize_writes_outputs(tmp_path, capsys):
    out = tmp_path / "d"
    code, stdout, stderr = run(SYNTH + ["--out", str(out), "--json"], capsys)
    assert code == 0
    design = out.with_suffix(".design.json")
    cir = out.with_suffix(".cir")
    assert design.exists() and cir.exists()
    doc = json.loads(design.read_text())
    assert doc["spec"]["f_low"] == 28e9
    assert doc["transformer"]["l_primary"] == pytest.approx(107.7e-12, rel=0.01)
    assert json.loads(stdout) == doc  # --json mirrors the file
    net = nl.parse(cir.read_text())
    assert {e.name for e in net.elements} >= {"Lp1", "Lp2", "Ls1", "Ls2", "Cts", "Cts1", "Lts"}
    assert len(net.ports) == 2


def test_synthesize_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert run(SYNTH + ["--out", str(a)]) == 0
    assert run(SYNTH + ["--out", str(b)]) == 0
    assert a.with_suffix(".design.json").read_bytes() == b.with_suffix(".design.json").read_bytes()
    assert a.with_suffix(".cir").read_bytes() == b.with_suffix(".cir").read_bytes()


def test_swapped_bands_is_usage_error(tmp_path, capsys):
    argv = list(SYNTH)
    argv[argv.index("--fl") + 1] = "38g"
    argv[argv.index("--fh") + 1] = "28g"
    code, _, stderr = run(argv + ["--out", str(tmp_path / "x")], capsys)
    assert code == 2
    assert "usage error" in stderr


def test_infeasible_lts_is_analysis_error(tmp_path, capsys):
    code, _, stderr = run(
        SYNTH + ["--lts", "30p", "--out", str(tmp_path / "x")], capsys
    )
    assert code == 1
    assert "infeasible L_ts" in stderr
    assert "C_ts >" in stderr  # the message names the feasibility bound


def test_bad_value_token_is_usage_error(tmp_path, capsys):
    argv = list(SYNTH)
    argv[argv.index("--fl") + 1] = "28gq"
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_analyze_netlist(tmp_path, capsys):
    out = tmp_path / "d"
    assert run(SYNTH + ["--out", str(out)]) == 0
    capsys.readouterr()
    aout = tmp_path / "a"
    code, stdout, _ = run(
        ["analyze", str(out.with_suffix(".cir")), "--out", str(aout), "--json", "--touchstone"],
        capsys,
    )
    assert code == 0
    doc = json.loads(stdout)
    m = doc["metrics"]
    assert m["il_low"] == pytest.approx(0.0, abs=1e-3)
    assert m["f_notch"] == pytest.approx(32.619e9, rel=1e-3)
    assert "suppression" in doc["metadata"]["suppression_definition"]
    assert aout.with_suffix(".metrics.json").exists()
    s2p = aout.with_suffix(".s2p").read_text()
    assert s2p.splitlines()[1] == "# HZ S RI R 50"


def test_analyze_missing_file(tmp_path, capsys):
    code, _, stderr = run(["analyze", str(tmp_path / "nope.cir")], capsys)
    assert code == 1
    assert "error" in stderr


def test_analyze_parse_error_names_file(tmp_path, capsys):
    bad = tmp_path / "bad.cir"
    bad.write_text("t\nR1 a\n.end\n")
    code, _, stderr = run(["analyze", str(bad)], capsys)
    assert code == 1
    assert "bad.cir" in stderr


def test_sweep_outputs(tmp_path, capsys):
    out = tmp_path / "d"
    assert run(SYNTH + ["--out", str(out)]) == 0
    capsys.readouterr()
    sw = tmp_path / "s"
    code, stdout, _ = run(
        [
            "sweep", "qxfmr",
            "--base", str(out.with_suffix(".design.json")),
            "--values", "10,20,50",
            "--out", str(sw),
            "--grid", "201,20g,45g",
        ],
        capsys,
    )
    assert code == 0
    csv_path = Path(f"{sw}.sweep_qxfmr.csv")
    summary_path = Path(f"{sw}.sweep_qxfmr.summary.json")
    assert csv_path.exists() and summary_path.exists()
    header = csv_path.read_text().splitlines()[0]
    assert header.startswith("freq_hz,")
    assert header.count(",") == 3
    summary = json.loads(summary_path.read_text())
    assert summary["kind"] == "qxfmr"
    ils = [
        summary["curves"][k]["band_metrics"]["il_low"] for k in sorted(summary["curves"])
    ]
    assert len(ils) == 3
    # lower Q means more loss
    by_q = {k: v["band_metrics"]["il_low"] for k, v in summary["curves"].items()}
    assert by_q["qxfmr=10"] > by_q["qxfmr=50"]


def test_sweep_rejects_nonpositive(tmp_path, capsys):
    out = tmp_path / "d"
    assert run(SYNTH + ["--out", str(out)]) == 0
    capsys.readouterr()
    code, _, stderr = run(
        [
            "sweep", "qt",
            "--base", str(out.with_suffix(".design.json")),
            "--values", "10,-5",
            "--out", str(tmp_path / "s"),
        ],
        capsys,
    )
    assert code == 1
    assert "nonpositive" in stderr


def test_pz_from_flags(capsys):
    code, stdout, _ = run(
        ["pz", "--lts", "8p", "--cts", "4.039p", "--cts1", "5.263p"], capsys
    )
    assert code == 0
    doc = json.loads(stdout)
    assert doc["topology"] == "III"
    assert doc["ordering"] == "pole_above_zero"
    assert doc["poles_hz"][1] == pytest.approx(28e9, rel=1e-3)
    assert not doc["degenerate"]


def test_pz_needs_arguments(capsys):
    code, _, stderr = run(["pz"], capsys)
    assert code == 2
    assert "--base or all of" in stderr


def test_pz_from_design(tmp_path, capsys):
    out = tmp_path / "d"
    assert run(SYNTH + ["--out", str(out)]) == 0
    capsys.readouterr()
    code, stdout, _ = run(["pz", "--base", str(out.with_suffix(".design.json"))], capsys)
    assert code == 0
    doc = json.loads(stdout)
    assert doc["zeros_hz"][0] < doc["poles_hz"][1]


def test_check_valid_and_json(tmp_path, capsys):
    out = tmp_path / "d"
    assert run(SYNTH + ["--out", str(out)]) == 0
    capsys.readouterr()
    cir = str(out.with_suffix(".cir"))
    code, stdout, _ = run(["check", cir], capsys)
    assert code == 0
    assert stdout.startswith("OK:")
    code, stdout, _ = run(["check", cir, "--json"], capsys)
    assert code == 0
    doc = json.loads(stdout)
    assert doc["ok"] is True
    assert doc["ports"] == 2


def test_check_invalid(tmp_path, capsys):
    bad = tmp_path / "bad.cir"
    bad.write_text("t\nR1 a 0 50\nR2 b c 50\nP1 a 0 50\n.ac lin 2 1g 2g\n.end\n")
    code, stdout, _ = run(["check", str(bad), "--json"], capsys)
    assert code == 1
    doc = json.loads(stdout)
    assert doc["ok"] is False
    assert "floating" in doc["error"]


def test_bundled_netlists_check(capsys):
    import dbmatch

    pkg_dir = Path(dbmatch.__file__).parent / "netlists"
    names = sorted(p.name for p in pkg_dir.glob("*.cir"))
    assert names == [
        "combiner_parallel_series.cir",
        "input_splitter.cir",
        "xfmr_dual_band.cir",
    ]
    for p in pkg_dir.glob("*.cir"):
        assert run(["check", str(p)]) == 0
