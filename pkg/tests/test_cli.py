"""End-to-end runs of the command line front end."""

import json

import pytest

from multsys import __version__, rademacher, symmetric_system
from multsys.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


@pytest.fixture()
def dup_system(tmp_path):
    sys_obj = symmetric_system([rademacher(1), rademacher(1)])
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(sys_obj.to_json()))
    return str(path)


def test_analyze_reports_mu_and_moments(capsys):
    code, report = run(capsys, "analyze", "--system", "rademacher:3", "--no-meta")
    assert code == 0
    assert report["mu"] == "0"
    assert report["multiplicative"] is True
    assert report["n"] == 3
    assert len(report["moments"]) == 7
    assert "meta" not in report


def test_analyze_meta_and_family_cap(capsys):
    code, report = run(capsys, "analyze", "--system", "rademacher:4", "--family", "l=2")
    assert code == 0
    assert report["meta"] == {"tool": "multsys", "version": __version__}
    assert report["config"]["family"] == "l=2"
    assert len(report["moments"]) == 4 + 6


def test_analyze_explicit_family_and_csv(capsys, tmp_path):
    fam_path = tmp_path / "fam.json"
    fam_path.write_text("[[1], [1, 2]]")
    csv_path = tmp_path / "table.csv"
    code, report = run(
        capsys,
        "analyze",
        "--system",
        "rademacher:2",
        "--family",
        str(fam_path),
        "--csv",
        str(csv_path),
        "--no-meta",
    )
    assert code == 0
    assert report["config"]["family"] == "explicit(2 subsets)"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "subset;moment;normalized"
    assert len(lines) == 3


def test_analyze_of_dependent_system_still_exits_zero(capsys, dup_system):
    code, report = run(capsys, "analyze", "--system", dup_system, "--no-meta")
    assert code == 0
    assert report["mu"] == "1"
    assert report["multiplicative"] is False


def test_reduce_full_pipeline(capsys, dup_system):
    code, report = run(
        capsys, "reduce", "--system", dup_system, "--full-trace", "--no-meta"
    )
    assert code == 0
    assert report["mu"] == "1"
    assert report["xi_multiplicative"] is True
    assert report["independence"]["independent"] is True
    assert report["independence"]["marginals"] == ["1/2", "1/2"]
    assert report["domination"]["holds"] is True
    assert report["domination"]["exact"] is True
    assert report["trace"]["mu"] == "1"


def test_reduce_accepts_coeffs_and_phi(capsys):
    code, report = run(
        capsys,
        "reduce",
        "--system",
        "rademacher:3",
        "--coeffs",
        "1,-1/2,1/3",
        "--phi",
        "exp:1.0",
        "--no-meta",
    )
    assert code == 0
    assert report["config"]["coeffs"] == ["1", "-1/2", "1/3"]
    assert report["domination"]["exact"] is False
    assert report["domination"]["holds"] is True


def test_khintchine_even_mode_is_exact(capsys):
    code, report = run(
        capsys,
        "khintchine",
        "--system",
        "rademacher:4",
        "-p",
        "4",
        "--mode",
        "even_integer",
        "--no-meta",
    )
    assert code == 0
    assert report["config"]["p"] == 4
    assert report["lhs_pth_power"] == "40"
    assert report["rhs_pth_power"] == "48"
    assert report["exact"] is True
    assert report["holds"] is True


def test_khintchine_general_mode(capsys):
    code, report = run(
        capsys, "khintchine", "--system", "rademacher:5", "-p", "3.5", "--no-meta"
    )
    assert code == 0
    assert report["exact"] is False
    assert report["holds"] is True


def test_tail_matches_binomial_count(capsys):
    code, report = run(
        capsys,
        "tail",
        "--system",
        "rademacher:10",
        "--level",
        "4",
        "--mu",
        "0",
        "--no-meta",
    )
    assert code == 0
    assert report["exact_measure"] == "7/128"
    assert report["holds"] is True


def test_tail_flags_a_lying_mu(capsys, dup_system):
    code, report = run(
        capsys,
        "tail",
        "--system",
        dup_system,
        "--level",
        "19/10",
        "--mu",
        "0",
        "--no-meta",
    )
    assert code == 1
    assert report["holds"] is False
    assert report["exact_measure"] == "1/2"


def test_lacunary_geometric(capsys):
    code, report = run(
        capsys,
        "lacunary",
        "--lam",
        "3",
        "--tau1",
        "2",
        "--n",
        "4",
        "--no-meta",
    )
    assert code == 0
    assert report["config"]["tau"] == [2.0, 6.0, 18.0, 54.0]
    assert report["config"]["nu_max"] == 3
    assert report["holds"] is True
    assert report["violations"] == []
    assert report["analytic_tail"]["approx"] is True


def test_lacunary_explicit_with_split(capsys):
    code, report = run(
        capsys,
        "lacunary",
        "--lam",
        "2.5",
        "--tau1",
        "1.3",
        "--n",
        "6",
        "--nu-max",
        "2",
        "--split-target",
        "3",
        "--no-meta",
    )
    assert code == 0
    assert len(report["split"]) == 2
    for part in report["split"]:
        assert part["lam"] >= 3


def test_lacunary_needs_a_frequency_source(capsys):
    code = main(["lacunary", "--lam", "3"])
    err = capsys.readouterr().err
    assert code == 2
    assert err.startswith("error:")


def test_select_certificate_is_consistent(capsys):
    code, report = run(
        capsys,
        "select",
        "--system",
        "walsh:6",
        "--rho",
        "2",
        "--steps",
        "3",
        "--no-meta",
    )
    assert code == 0
    assert report["chosen_indices"] == [1, 2, 4, 8]
    assert report["certificate_consistent"] is True
    assert report["bound_satisfied"] == [True, True, True]
    assert report["recomputed_mu"] == "0"


def test_rubinshtein_inline_seed(capsys):
    code, report = run(
        capsys,
        "rubinshtein",
        "--seed",
        "step:1,-1/2",
        "--n",
        "3",
        "--no-meta",
    )
    assert code == 0
    assert report["mu"] == "0"
    assert report["multiplicative"] is True
    assert report["domination"]["lhs"] == "285/32"
    assert report["tail"]["exact_measure"] == "3/16"


def test_rubinshtein_seed_from_file(capsys, tmp_path):
    from multsys import make_step

    seed = make_step([0, "1/8", "1/4"], [1, "-1/2"])
    path = tmp_path / "seed.json"
    path.write_text(json.dumps(seed.to_json()))
    code, report = run(
        capsys, "rubinshtein", "--seed", str(path), "--n", "2", "--no-meta"
    )
    assert code == 0
    assert report["multiplicative"] is True


def test_out_writes_the_report_to_a_file(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code = main(
        ["analyze", "--system", "rademacher:2", "--out", str(out_path), "--no-meta"]
    )
    assert code == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out_path.read_text())
    assert report["mu"] == "0"


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--system", "rademacher:"],
        ["analyze", "--system", "rademacher:0"],
        ["analyze", "--system", "rademacher:25"],
        ["analyze", "--system", "walsh:13"],
        ["analyze", "--system", "/no/such/file.json"],
        ["analyze", "--system", "rademacher:2", "--family", "l=abc"],
        ["tail", "--system", "rademacher:2", "--level", "zero"],
        ["reduce", "--system", "rademacher:2", "--phi", "weird:1"],
        ["rubinshtein", "--seed", "step:1,-1/2", "--n", "13"],
    ],
)
def test_malformed_inputs_exit_two(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    assert code == 2
    assert captured.err.startswith("error:")


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"multsys {__version__}"
