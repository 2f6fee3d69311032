"""
Tests for the hier-tree command line: outputs and exit codes
"""

import json

import pytest

from src.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from src.serialization import dumps
from src.sphero import identity
from src.suite_runner import PROPERTIES


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def identity_file(tmp_path):
    """The identity spheromorphism written to disk"""
    path = tmp_path / "id.json"
    path.write_text(dumps(identity()), encoding="utf-8")
    return str(path)


@pytest.mark.integration
class TestSpheroCommand:
    """Test the sphero subcommand on the built-in E1"""

    @pytest.mark.parametrize("vertex,expected", [
        ("3", "4"),
        ("eps", "eps"),
        ("1.3", "1.2"),
        ("1.1.5", "2.5"),
    ])
    def test_apply(self, capsys, vertex, expected):
        """Test vertex images are printed as addresses"""
        code, out, _ = run(capsys, "sphero", "apply", "e1", "--vertex", vertex)
        assert code == EXIT_OK
        assert out.strip() == expected

    def test_validate(self, capsys):
        """Test the fixture validates"""
        code, out, _ = run(capsys, "sphero", "validate", "e1")
        assert code == EXIT_OK
        assert out.strip() == "ok"

    def test_equals_self(self, capsys):
        """Test E1 equals itself"""
        code, out, _ = run(capsys, "sphero", "equals", "e1", "e1")
        assert code == EXIT_OK
        assert out.strip() == "true"

    def test_equals_identity(self, capsys, identity_file):
        """Test E1 differs from the identity with exit code 1"""
        code, out, _ = run(capsys, "sphero", "equals", "e1", identity_file)
        assert code == EXIT_FAILURE
        assert out.strip() == "false"

    def test_invert_json(self, capsys):
        """Test JSON output carries the type tag"""
        code, out, _ = run(capsys, "sphero", "invert", "e1", "--json")
        assert code == EXIT_OK
        assert json.loads(out)["type"] == "Spheromorphism"

    def test_apply_without_vertex(self, capsys):
        """Test a missing option is a usage error"""
        code, _, err = run(capsys, "sphero", "apply", "e1")
        assert code == EXIT_USAGE
        assert "error:" in err


@pytest.mark.integration
class TestOtherCommands:
    """Test bitree, cf, mobius and kernel subcommands"""

    def test_bitree_dot(self, capsys):
        """Test the E1 bi-tree as DOT"""
        code, out, _ = run(capsys, "bitree", "of", "e1", "--dot")
        assert code == EXIT_OK
        assert out.startswith("graph G {")
        assert out.count(" -- ") == 3

    def test_bitree_anchors_need_both(self, capsys):
        """Test --I without --J is rejected"""
        code, _, _ = run(capsys, "bitree", "of", "e1", "--I", "eps")
        assert code == EXIT_USAGE

    @pytest.mark.parametrize("argv,expected", [
        (["cf", "expand", "13/5"], "[2; 1, 1, 2]"),
        (["cf", "value", "2", "1", "1", "2"], "13/5"),
        (["mobius", "decompose", "S"], "S"),
        (["mobius", "decompose", "T^-1"], "T^-1"),
        (["mobius", "decompose", "1,0,0,1"], "id"),
        (["mobius", "apply", "T", "--point", "1/2"], "3/2"),
    ])
    def test_text_output(self, capsys, argv, expected):
        """Test one-line text results"""
        code, out, _ = run(capsys, *argv)
        assert code == EXIT_OK
        assert out.strip() == expected

    def test_region_and_back(self, capsys, tmp_path):
        """Test an interval survives region export and re-import"""
        code, out, _ = run(capsys, "cf", "region", "0", "1", "--json")
        assert code == EXIT_OK
        path = tmp_path / "region.json"
        path.write_text(out, encoding="utf-8")
        code, out, _ = run(capsys, "cf", "back", str(path))
        assert code == EXIT_OK
        assert out.strip() == "(0, 1)"

    @pytest.mark.parametrize("argv,expected", [
        (["xi", "addr", "(0,1)", "1", "2"], "4.2"),
        (["xi", "addr", "(1,inf)", "3"], "2.3"),
        (["xi", "inv", "4.2"], "(0,1) [1, 2]"),
        (["xi", "inv", "eps"], "(0,1) []"),
        (["cf", "xi-addr", "(0,1)", "1", "2"], "4.2"),
    ])
    def test_xi(self, capsys, argv, expected):
        """Test the xi command and its cf alias"""
        code, out, _ = run(capsys, *argv)
        assert code == EXIT_OK
        assert out.strip() == expected

    def test_interval_region_and_back(self, capsys, tmp_path):
        """Test the interval command exports a region and reads it back"""
        code, out, _ = run(capsys, "interval", "region", "0", "1", "--json")
        assert code == EXIT_OK
        assert json.loads(out)["type"] == "BoundaryRegion"
        path = tmp_path / "region.json"
        path.write_text(out, encoding="utf-8")
        code, out, _ = run(capsys, "interval", "back", str(path))
        assert code == EXIT_OK
        assert out.strip() == "(0, 1)"

    def test_interval_needs_two_endpoints(self, capsys):
        """Test a single endpoint is a usage error"""
        code, _, _ = run(capsys, "interval", "region", "0")
        assert code == EXIT_USAGE

    def test_bad_determinant(self, capsys):
        """Test a non-unimodular matrix is a domain error"""
        code, _, err = run(capsys, "mobius", "decompose", "2,0,0,1")
        assert code == EXIT_USAGE
        assert "error:" in err

    def test_kernel_psd(self, capsys):
        """Test a small Gram matrix is reported positive semidefinite"""
        code, out, _ = run(capsys, "kernel", "psd", "--lam", "0.5", "--vertices", "eps,1,2")
        assert code == EXIT_OK
        assert out.startswith("psd")

    def test_kernel_gram_json(self, capsys):
        """Test the Gram matrix with labels"""
        code, out, _ = run(capsys, "kernel", "gram", "--lam", "0.5", "--vertices", "eps,1,2", "--json")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["labels"] == ["eps", "1", "2"]
        assert data["matrix"][1][2] == pytest.approx(0.25)


@pytest.mark.integration
class TestSuiteAndErrors:
    """Test the suite command and generic failures"""

    def test_list(self, capsys):
        """Test every registered property is listed"""
        code, out, _ = run(capsys, "suite", "--list")
        assert code == EXIT_OK
        assert out.split() == list(PROPERTIES)

    def test_small_run(self, capsys):
        """Test a single property passes"""
        code, out, _ = run(capsys, "suite", "--only", "relabel_laws", "--trials", "2", "--seed", "1")
        assert code == EXIT_OK
        assert "relabel_laws" in out

    def test_unknown_property(self, capsys):
        """Test an unknown property name is a usage error"""
        code, _, _ = run(capsys, "suite", "--only", "no_such_property")
        assert code == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["sphero", "validate", "/no/such/file.json"],
    ])
    def test_usage_errors(self, capsys, argv):
        """Test bad subcommands and missing files exit with 2"""
        code, _, _ = run(capsys, *argv)
        assert code == EXIT_USAGE

    def test_export_dot_needs_graph(self, capsys, identity_file):
        """Test DOT export of a spheromorphism is refused"""
        code, _, _ = run(capsys, "export", identity_file, "--dot")
        assert code == EXIT_USAGE
