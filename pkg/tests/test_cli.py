import io

import pytest

from diffduality import twovar
from diffduality.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, GALLERY, main
from diffduality.fileformat import parse_operator, print_operator
from diffduality.gallery import lie_operator, metric_make


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def d1_file(tmp_path):
    p = tmp_path / "d1.op"
    p.write_text(print_operator(twovar.system()))
    return str(p)


def test_adjoint(d1_file):
    code, out = run("adjoint", d1_file)
    assert code == EXIT_OK
    assert parse_operator(out).equal_entries(twovar.adjoint_displayed())


def test_compose(tmp_path, d1_file):
    d = tmp_path / "d.op"
    d.write_text(print_operator(twovar.parametrization_displayed()))
    code, out = run("compose", d1_file, str(d))
    assert code == EXIT_OK and parse_operator(out).is_zero()


def test_cc_depth(tmp_path, d1_file):
    code, out = run("cc", d1_file, "--depth", "2")
    assert code == EXIT_OK and "# level 1" in out
    assert run("cc", d1_file, "--depth", "0")[0] == EXIT_USAGE


def test_paramtest(d1_file):
    code, out = run("paramtest", d1_file, "--show")
    assert code == EXIT_OK and "parametrizable: true" in out and "# parametrization" in out


def test_rank_and_difftrd(d1_file):
    assert run("rank", d1_file) == (EXIT_OK, "rank: 1\n")
    assert run("difftrd", d1_file) == (EXIT_OK, "diff_trd: 1\n")


def test_gallery_all_names():
    for name in GALLERY:
        n = "3" if name not in ("bar-inv", "ricci-to-elation") else "4"
        code, out = run("gallery", name, "--n", n, "--metric", "euclid")
        assert code == EXIT_OK, name
        parse_operator(out)


def test_gallery_errors(tmp_path):
    assert run("gallery", "nope", "--n", "3")[0] == EXIT_USAGE
    assert run("gallery", "bar-inv", "--n", "2")[0] == EXIT_USAGE
    metric = tmp_path / "g.metric"
    metric.write_text("vars: x1,x2\nomega 1 1: 1\nomega 2 2: x1^2\n")
    code, out = run("gallery", "killing", "--n", "2", "--metric", str(metric))
    assert code == EXIT_OK
    assert run("gallery", "ricci", "--n", "2", "--metric", str(metric))[0] == EXIT_USAGE


def test_killing_gallery_matches_constructor():
    code, out = run("gallery", "killing", "--n", "4")
    assert parse_operator(out) == lie_operator(metric_make("minkowski", 4))


def test_dims():
    code, out = run("dims", "--n", "4")
    assert code == EXIT_OK and "F1: 20" in out and "F2hat: 0" in out and "false" not in out


def test_check_single_and_all():
    code, out = run("check", "ricci-killing-zero", "--n", "3", "--no-timing")
    assert code == EXIT_OK and "result: pass" in out and "elapsed" not in out
    code, out = run("check", "--all", "--n", "3", "--metric", "euclid", "--no-timing")
    assert code == EXIT_OK and "summary: 17 passed, 0 failed" in out
    code, out = run("check", "--all", "--n", "2", "--no-timing")
    assert code == EXIT_OK and "not applicable" in out


def test_check_usage_errors():
    assert run("check")[0] == EXIT_USAGE
    assert run("check", "nope")[0] == EXIT_USAGE
    assert run("check", "gauge-reduce", "--n", "2")[0] == EXIT_USAGE


def test_deterministic_output():
    a = run("check", "--all", "--n", "3", "--no-timing")
    b = run("--no-timing", "check", "--all", "--n", "3")
    assert a == b


def test_budget_exit_code(d1_file):
    code, _ = run("--budget", "0", "paramtest", d1_file)
    assert code == EXIT_BUDGET
    code, _ = run("cc", d1_file, "--budget", "0")
    assert code == EXIT_BUDGET


def test_bad_document(tmp_path):
    p = tmp_path / "bad.op"
    p.write_text("vars: x1\nin: u[1]\nout: v[1]\nentry 1 1: d{1} x1\n")
    assert run("adjoint", str(p))[0] == EXIT_USAGE
    assert run("adjoint", str(tmp_path / "missing.op"))[0] == EXIT_USAGE


def test_props():
    code, out = run("props", "--count", "5", "--seed", "3")
    assert code == EXIT_OK and "result: pass" in out


def test_exit_fail_is_distinct():
    assert len({EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET}) == 4
