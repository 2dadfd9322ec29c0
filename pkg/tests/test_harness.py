"""Suite runner, config grammar, report emission, and the CLI surface.

Determinism here means byte-identical files; each emission test writes
twice into fresh directories and compares raw bytes.
"""

import json
import os
from fractions import Fraction

import pytest

from setgrowth.structure import ConstantLedger, LedgerError
from setgrowth.suites import (
    CSV_HEADER,
    DEFAULT_SEED,
    SUITE_NAMES,
    Report,
    ReportRow,
    SuiteConfig,
    SuiteJob,
    config_text,
    default_config,
    default_job,
    emit_report,
    parse_suite_config,
    render_value,
    run_named_suite,
    run_suite,
)
from setgrowth import cli


# ------------------------------------------------------------- rendering

def test_render_value_rules():
    assert render_value(None) == ""
    assert render_value(True) == "true"
    assert render_value(False) == "false"
    assert render_value(7) == "7"
    assert render_value(Fraction(22, 7)) == "22/7"
    assert render_value(0.1) == "0.1"
    assert render_value(2.0**0.5) == "1.41421356237"


def test_render_big_integers_verbatim():
    big = 3**400
    assert render_value(big) == str(big)


# --------------------------------------------------------------- reports

def test_report_rows_sort_and_sequence():
    rep = Report("demo")
    rep.add("m", "op-b", "row", "hard", passed=True)
    rep.add("m", "op-a", "row", "hard", passed=True)
    rep.add("m", "op-a", "row2", "hard", passed=True)
    rows = rep.sorted_rows()
    assert [r.operation for r in rows] == ["op-a", "op-a", "op-b"]
    assert rows[0].seq < rows[1].seq


def test_report_exit_codes():
    rep = Report("demo")
    rep.add("m", "op", "good", "hard", passed=True)
    assert rep.exit_code() == 0
    rep.add("m", "op", "soft-miss", "soft", passed=False)
    assert rep.exit_code() == 0  # measured rows never fail the run
    rep.add("m", "op", "bad", "hard", passed=False)
    assert rep.exit_code() == 1
    assert [r.name for r in rep.hard_failures()] == ["bad"]


def test_report_summary_counts():
    rep = Report("demo")
    rep.add("m", "op", "a", "hard", passed=True)
    rep.add("m", "op", "b", "soft", passed=False)
    rep.add("m", "op", "c", "info")
    s = rep.summary()
    assert s["total"] == 3
    assert s["hard"] == 1
    assert s["soft"] == 1
    assert s["info"] == 1
    assert s["soft_failures"] == 1
    assert s["hard_failures"] == 0


def test_merge_ledger_and_failure():
    led = ConstantLedger("unit")
    led.compare("fine", 1, "<=", 2)
    led.info("measured", Fraction(3, 2))
    rep = Report("demo")
    rep.merge_ledger("m", "op", led)
    stats = {r.name: r.status for r in rep.sorted_rows()}
    assert stats == {"fine": "pass", "measured": "info"}

    bad = ConstantLedger("unit")
    bad.compare("broken", 3, "<=", 2)
    try:
        bad.check()
    except LedgerError as exc:
        rep.merge_failure("m", "op2", exc)
    assert rep.exit_code() == 1
    assert any(r.name == "broken" and r.status == "fail"
               for r in rep.sorted_rows())


# ---------------------------------------------------------------- config

def test_config_round_trip():
    cfg = SuiteConfig(jobs=(
        SuiteJob(name="covering", groups=("cyclic(24)",),
                 families=("subgroup(2)",), n=4, seed=5, count=3),
    ), out="reports")
    text = config_text(cfg)
    again = parse_suite_config(text)
    assert again == cfg


def test_parse_minimal_config():
    cfg = parse_suite_config("""
    [suite]
    name = covering
    groups = cyclic(24), dihedral(6)
    families = subgroup(2); coset(2;1)
    count = 4
    """)
    job = cfg.jobs[0]
    assert job.name == "covering"
    assert job.groups == ("cyclic(24)", "dihedral(6)")
    assert job.families == ("subgroup(2)", "coset(2;1)")
    assert job.count == 4
    assert job.seed == DEFAULT_SEED


def test_parse_rejects_bad_lines():
    with pytest.raises(ValueError, match="line 3"):
        parse_suite_config("[suite]\nname = covering\nwhat even is this\n")
    with pytest.raises(ValueError, match="unknown key"):
        parse_suite_config("[suite]\nname = covering\ncolour = blue\n")
    with pytest.raises(ValueError, match="name"):
        parse_suite_config("[suite]\ngroups = cyclic(4)\n")


def test_default_config_covers_every_suite():
    cfg = default_config()
    assert tuple(j.name for j in cfg.jobs) == SUITE_NAMES


def test_run_suite_empty_config():
    rep = run_suite(SuiteConfig(jobs=()))
    assert rep.title == "suite-empty"
    assert rep.exit_code() == 0
    assert rep.summary()["total"] == 0


def test_run_suite_rejects_unknown_name():
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(jobs=(SuiteJob(name="mystery"),)))


def test_run_named_covering_suite():
    rep = run_named_suite("covering")
    assert rep.exit_code() == 0
    assert not rep.hard_failures()
    assert rep.summary()["hard"] >= 12


# -------------------------------------------------------------- emission

def test_emit_empty_report(tmp_path):
    rep = Report("empty-demo")
    (path,) = emit_report(rep, format="csv", out=str(tmp_path))
    lines = open(path).read().splitlines()
    assert lines == [",".join(CSV_HEADER)]


def test_emit_single_row_exact_integers(tmp_path):
    rep = Report("single-demo")
    big = 3**300
    rep.add("m", "op", "row", "hard", lhs=big, rel="<=", rhs=big + 1,
            passed=True)
    csv_path, json_path = emit_report(rep, format="both", out=str(tmp_path))
    text = open(csv_path).read()
    assert str(big) in text
    data = json.loads(open(json_path).read())
    assert data["rows"][0]["lhs"] == str(big)
    assert data["summary"]["hard"] == 1


def test_emission_is_byte_stable(tmp_path):
    job = default_job("covering")
    rep1 = run_suite(SuiteConfig(jobs=(job,)))
    rep2 = run_suite(SuiteConfig(jobs=(job,)))
    d1, d2 = str(tmp_path / "a"), str(tmp_path / "b")
    paths1 = emit_report(rep1, format="both", out=d1)
    paths2 = emit_report(rep2, format="both", out=d2)
    for p1, p2 in zip(paths1, paths2):
        assert open(p1, "rb").read() == open(p2, "rb").read()


# ------------------------------------------------------------------- cli

def test_cli_group_info(capsys):
    assert cli.main(["group", "info", "cyclic(12)"]) == 0
    out = capsys.readouterr().out
    assert "order" in out and "12" in out


def test_cli_group_info_bad_spec(capsys):
    assert cli.main(["group", "info", "cyclic(0)"]) == 1
    assert capsys.readouterr().err


def test_cli_set_gen(capsys):
    assert cli.main(["set", "gen", "cyclic(12)", "subgroup(4)"]) == 0
    out = capsys.readouterr().out
    assert "0" in out and "4" in out and "8" in out


def test_cli_set_gen_seed_changes_random_dense(capsys):
    assert cli.main(["--seed", "3", "set", "gen", "cyclic(40)",
                     "random_dense(density=1/2;seed=1)"]) == 0
    first = capsys.readouterr().out
    assert cli.main(["--seed", "4", "set", "gen", "cyclic(40)",
                     "random_dense(density=1/2;seed=1)"]) == 0
    second = capsys.readouterr().out
    assert first != second


def test_cli_verify_unknown_suite(capsys):
    assert cli.main(["verify", "mystery"]) == 2
    assert capsys.readouterr().err


def test_cli_verify_covering(capsys):
    assert cli.main(["verify", "covering"]) == 0
    out = capsys.readouterr().out
    assert "hard" in out


def test_cli_bsg_run_worked_instance(capsys):
    code = cli.main(["bsg", "run", "--group", "cyclic(16)",
                     "--set", "geometric_progression(1,4)", "--infer-k",
                     "--trace"])
    out = capsys.readouterr().out
    assert code == 0
    assert "|C| = 5" in out
    assert "|A'''·B'''| = 7" in out


def test_cli_bsg_run_writes_report(tmp_path, capsys):
    code = cli.main(["bsg", "run", "--group", "cyclic(16)",
                     "--set", "geometric_progression(1,4)", "--infer-k",
                     "--out", str(tmp_path), "--format", "csv"])
    capsys.readouterr()
    assert code == 0
    files = os.listdir(tmp_path)
    assert any(f.endswith(".csv") for f in files)


def test_cli_heisen_run(capsys):
    code = cli.main(["heisen", "run", "--group",
                     "heisenberg(z=Zp^2,p=3;w=Zp^1,p=3;pairing=symplectic)",
                     "--set", "subgroup(1)", "--infer-k"])
    capsys.readouterr()
    assert code == 0


def test_cli_heisen_rejects_plain_group(capsys):
    code = cli.main(["heisen", "run", "--group", "cyclic(12)",
                     "--set", "subgroup(4)", "--infer-k"])
    assert code == 2
    assert capsys.readouterr().err


def test_cli_entropy_sweep_word_carrier(capsys):
    code = cli.main(["entropy", "sweep", "--carrier", "word:cyclic(30):1,7"])
    out = capsys.readouterr().out
    assert code == 0
    assert "sandwich" in out or "hard" in out


def test_cli_suite_run_with_config(tmp_path, capsys):
    cfg = tmp_path / "suite.cfg"
    cfg.write_text("""
    out = {0}
    [suite]
    name = covering
    groups = cyclic(24)
    families = subgroup(2); coset(2;1)
    count = 2
    """.format(tmp_path / "reports"))
    code = cli.main(["suite", "run", "--config", str(cfg), "--format", "both"])
    capsys.readouterr()
    assert code == 0
    files = os.listdir(tmp_path / "reports")
    assert any(f.endswith(".csv") for f in files)
    assert any(f.endswith(".json") for f in files)
