import io
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from covlang.cli import main
from covlang.fsa import enumerate_words
from covlang.textio import parse_fsa, parse_net, print_net
from covlang.families import bpp_power_instance, rackoff_counterexample


def run_cli(argv, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    old_stdin = sys.stdin
    sys.stdin = io.StringIO(stdin_text)
    try:
        with redirect_stdout(out), redirect_stderr(err):
            try:
                code = main(argv)
            except SystemExit as stop:
                code = stop.code
    finally:
        sys.stdin = old_stdin
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def power2_doc():
    return print_net(bpp_power_instance(2))


@pytest.fixture
def rackoff_doc():
    return print_net(rackoff_counterexample())


class TestPipelines:
    def test_gen_then_down_closure(self):
        code, doc, _ = run_cli(["gen", "bpp-power", "2"])
        assert code == 0
        code, out, _ = run_cli(["closure", "--dir", "down"], stdin_text=doc)
        assert code == 0
        body = "\n".join(
            line for line in out.splitlines() if not line.startswith("#")
        )
        fsa = parse_fsa(body)
        assert enumerate_words(fsa, 5) == {("a",) * k for k in range(5)}

    def test_member_up(self, rackoff_doc):
        code, out, _ = run_cli(
            ["member", "--mode", "up", "-w", "aab"], stdin_text=rackoff_doc
        )
        assert code == 0 and "member" in out
        code, _, _ = run_cli(
            ["member", "--mode", "up", "-w", "b"], stdin_text=rackoff_doc
        )
        assert code == 1

    def test_sre_in_down_fails(self, power2_doc):
        code, out, _ = run_cli(
            ["sre-in", "--dir", "down", "-e", "{a}*"], stdin_text=power2_doc
        )
        assert code == 1 and "fails" in out

    def test_sre_in_routes_agree(self, power2_doc):
        for route in ("pn", "bpp"):
            code, _, _ = run_cli(
                ["sre-in", "--dir", "down", "-e", "a.a.a.a", "--route", route],
                stdin_text=power2_doc,
            )
            assert code == 0

    def test_cover(self, rackoff_doc):
        code, out, _ = run_cli(["cover"], stdin_text=rackoff_doc)
        assert code == 0 and "rt_a" in out

    def test_is_closed(self, power2_doc):
        code, out, _ = run_cli(["is-closed", "--dir", "down"], stdin_text=power2_doc)
        assert code == 1 and "not-closed" in out

    def test_suppn(self, rackoff_doc):
        code, _, _ = run_cli(["suppn", "-X", "temp"], stdin_text=rackoff_doc)
        assert code == 0
        code, _, _ = run_cli(["suppn", "-X", "stop"], stdin_text=rackoff_doc)
        assert code == 1

    def test_km(self, rackoff_doc):
        code, out, _ = run_cli(["km"], stdin_text=rackoff_doc)
        assert code == 0
        assert any("temp:w" in line for line in out.splitlines())

    def test_reg_in(self, rackoff_doc, tmp_path):
        doc = "alphabet a b c\nstate q0 initial\nstate q1\nstate q2 final\nedge q0 a q1\nedge q1 b q2\n"
        path = tmp_path / "ab.fsa"
        path.write_text(doc)
        code, out, _ = run_cli(["reg-in", "-a", str(path)], stdin_text=rackoff_doc)
        assert code == 0 and "included" in out

    def test_bounds(self, power2_doc):
        code, out, _ = run_cli(["bound", "bpp-cutoff"], stdin_text=power2_doc)
        assert code == 0 and "1728" in out
        code, out, _ = run_cli(["bound", "bpp-short"], stdin_text=power2_doc)
        assert code == 0 and "32" in out
        code, out, _ = run_cli(["bound", "rackoff"], stdin_text=power2_doc)
        assert code == 0 and "rackoff_f" in out and "rackoff_g" in out


class TestExportAndErrors:
    def test_export_dot_net(self, power2_doc):
        code, out, _ = run_cli(["export", "--dot"], stdin_text=power2_doc)
        assert code == 0 and out.startswith("digraph")

    def test_export_smt2(self, power2_doc, tmp_path):
        code, out, _ = run_cli(
            [
                "export",
                "--smt2",
                "--dir",
                "down",
                "-e",
                "{a}*",
                "-o",
                str(tmp_path),
            ],
            stdin_text=power2_doc,
        )
        assert code == 0
        emitted = list(tmp_path.glob("*.smt2"))
        assert emitted and "(check-sat)" in emitted[0].read_text()

    def test_usage_error(self):
        code, _, err = run_cli(["member"])  # missing -w
        assert code == 64

    def test_parse_error(self):
        code, _, err = run_cli(["cover"], stdin_text="trans t pre q:1\n")
        assert code == 3 and "parse error" in err

    def test_gen_writes_parseable_documents(self):
        for family, params in [
            ("rackoff-ce", []),
            ("bpp-power", ["3"]),
            ("ackermann", ["1", "1"]),
        ]:
            code, out, _ = run_cli(["gen", family, *params])
            assert code == 0
            parse_net(out)

    def test_console_script_entry(self):
        proc = subprocess.run(
            [sys.executable, "-m", "covlang.cli", "gen", "bpp-power", "1"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "place p0" in proc.stdout


class TestDeterminism:
    def test_closure_output_stable(self, power2_doc):
        outputs = {
            run_cli(["closure", "--dir", "down"], stdin_text=power2_doc)[1]
            for _ in range(3)
        }
        assert len(outputs) == 1
