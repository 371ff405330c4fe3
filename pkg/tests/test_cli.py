"""End-to-end exercises of the command-line front end via main(argv)."""

import csv
import io
import json
import pathlib

import pytest

from termrw.cli import CSV_COLUMNS, main
from termrw.demo import SHIPPED_CONJECTURES, SHIPPED_RULESETS

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# ---------------------------------------------------------------------------
# check-rules


def test_check_rules_ok(tmp_path, capsys):
    rc = main(["check-rules", write(tmp_path, "r.lsp", SHIPPED_RULESETS["arith"])])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.strip() == "checked 6 rule(s): ok"


def test_check_rules_reports_violations(tmp_path, capsys):
    rc = main(["check-rules", write(tmp_path, "r.lsp", "(def-rp-rule r (equal (if x y z) x))")])
    out = capsys.readouterr().out
    assert rc == 1
    # an if-headed left side trips both the reserved-head and no-if checks
    assert "r: lhs" in out and "2 violation(s) in 1 rule(s)" in out


def test_check_rules_parse_error_is_usage(tmp_path, capsys):
    rc = main(["check-rules", write(tmp_path, "r.lsp", "(def-rp-rule r (equal")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_check_rules_missing_file(capsys):
    rc = main(["check-rules", "/nonexistent/rules.lsp"])
    assert rc == 2


def test_check_rules_attach_error_is_semantic(tmp_path, capsys):
    text = "(def-rp-rule r (equal (f x) x))\n(rp-attach-sc r no-such-rule)"
    rc = main(["check-rules", write(tmp_path, "r.lsp", text)])
    assert rc == 1


def test_check_rules_strict_passes_sound_file(tmp_path, capsys):
    rc = main(
        ["check-rules", write(tmp_path, "r.lsp", SHIPPED_RULESETS["arith"]), "--strict", "--samples", "150"]
    )
    assert rc == 0
    assert "ok" in capsys.readouterr().out


def test_check_rules_strict_catches_false_rule(tmp_path, capsys):
    text = "(def-rp-rule bogus (equal (binary-+ x y) (binary-+ x x)))"
    rc = main(["check-rules", write(tmp_path, "r.lsp", text), "--strict", "--samples", "200"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "soundness sample failed" in out and "witness:" in out


def test_check_rules_strict_notes_unregistered(tmp_path, capsys):
    text = "(def-rp-rule r (equal (mystery x) (mystery x)))"
    rc = main(["check-rules", write(tmp_path, "r.lsp", text), "--strict", "--samples", "50"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "unregistered functions" in captured.err


# ---------------------------------------------------------------------------
# prove


def test_prove_success(tmp_path, capsys):
    rc = main(
        [
            "prove",
            "--rules",
            write(tmp_path, "r.lsp", SHIPPED_RULESETS["arith"]),
            "--conjecture",
            write(tmp_path, "c.lsp", SHIPPED_CONJECTURES["three-round-to-evens"]),
        ]
    )
    assert rc == 0
    assert capsys.readouterr().out.strip() == "proved"


def test_prove_failure_prints_residual(tmp_path, capsys):
    rc = main(
        [
            "prove",
            "--rules",
            write(tmp_path, "r.lsp", SHIPPED_RULESETS["arith"]),
            "--conjecture",
            write(tmp_path, "c.lsp", SHIPPED_CONJECTURES["three-round-to-evens"]),
            "--no-side-conditions",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 1
    assert out.startswith("not proved")
    assert "final term: (equal (d2" in out


def test_prove_step_limit(tmp_path, capsys):
    rc = main(
        [
            "prove",
            "--rules",
            write(tmp_path, "r.lsp", SHIPPED_RULESETS["arith"]),
            "--conjecture",
            write(tmp_path, "c.lsp", SHIPPED_CONJECTURES["three-round-to-evens"]),
            "--step-limit",
            "10",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 1
    assert "step limit (10) exceeded" in out


def test_prove_stats_json(tmp_path, capsys):
    stats_file = tmp_path / "stats.json"
    rc = main(
        [
            "prove",
            "--rules",
            write(tmp_path, "r.lsp", SHIPPED_RULESETS["arith"]),
            "--conjecture",
            write(tmp_path, "c.lsp", SHIPPED_CONJECTURES["three-round-to-evens"]),
            "--stats",
            str(stats_file),
        ]
    )
    assert rc == 0
    stats = json.loads(stats_file.read_text())
    assert stats["rewrite_calls"] == 113
    assert stats["rule_attempts"] == 146
    assert stats["rule_applications"] == 19
    capsys.readouterr()


def test_prove_verify(tmp_path, capsys):
    rc = main(
        [
            "prove",
            "--rules",
            write(tmp_path, "r.lsp", SHIPPED_RULESETS["arith"]),
            "--conjecture",
            write(tmp_path, "c.lsp", SHIPPED_CONJECTURES["three-round-to-evens"]),
            "--verify",
            "100",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "verified on 100 sample(s)" in out


def test_prove_trace_goes_to_stderr(tmp_path, capsys):
    from termrw.demo import tree_conjecture
    from termrw.terms import format_term

    rc = main(
        [
            "prove",
            "--rules",
            write(tmp_path, "r.lsp", SHIPPED_RULESETS["tree"]),
            "--conjecture",
            write(tmp_path, "c.lsp", format_term(tree_conjecture(2))),
            "--trace",
        ]
    )
    captured = capsys.readouterr()
    assert rc == 0
    assert "trace: logand-to-4vec-bitand" in captured.err
    assert "trace: integerp-of-iassoc" in captured.err


def test_prove_bad_conjecture_file(tmp_path, capsys):
    rc = main(
        [
            "prove",
            "--rules",
            write(tmp_path, "r.lsp", SHIPPED_RULESETS["bitand"]),
            "--conjecture",
            write(tmp_path, "c.lsp", "(equal (f a"),
        ]
    )
    assert rc == 2


# ---------------------------------------------------------------------------
# bench-tree


def test_bench_tree_csv_shape_and_counts(capsys):
    rc = main(["bench-tree", "--depths", "3", "--modes", "enabled,disabled"])
    out = capsys.readouterr().out
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == CSV_COLUMNS + ["status"]
    assert [r["mode"] for r in rows] == ["enabled", "disabled"]
    assert int(rows[0]["rule_attempts"]) == 16
    assert int(rows[1]["rule_attempts"]) == 66
    assert all(r["status"] == "ok" for r in rows)


def test_bench_tree_rejects_bad_mode(capsys):
    assert main(["bench-tree", "--depths", "3", "--modes", "sideways"]) == 2


def test_bench_tree_rejects_bad_depth(capsys):
    assert main(["bench-tree", "--depths", "1"]) == 2


def test_bench_tree_rejects_bad_repetitions(capsys):
    assert main(["bench-tree", "--depths", "3", "--repetitions", "0"]) == 2


# ---------------------------------------------------------------------------
# bench-falist


def test_bench_falist_csv_shape(capsys):
    rc = main(["bench-falist", "--sizes", "20", "--modes", "on,off"])
    captured = capsys.readouterr()
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(captured.out)))
    assert list(rows[0]) == CSV_COLUMNS + ["fa_probes", "fa_node_visits", "status"]
    on, off = rows
    assert on["mode"] == "on" and off["mode"] == "off"
    # shadowed lookups probe once per lookup and never walk the chain
    assert int(on["fa_probes"]) == 20
    assert int(on["fa_node_visits"]) == 0
    assert int(off["fa_probes"]) == 0
    assert int(off["fa_node_visits"]) > 20
    assert "# falist N=20 M=20 mode=on" in captured.err


def test_bench_falist_lookup_count_override(capsys):
    rc = main(["bench-falist", "--sizes", "10", "--lookups", "3", "--modes", "on"])
    captured = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(captured.out)))
    assert rc == 0
    assert int(rows[0]["fa_probes"]) == 3


def test_bench_falist_rejects_bad_mode(capsys):
    assert main(["bench-falist", "--sizes", "10", "--modes", "fast"]) == 2


# ---------------------------------------------------------------------------
# shipped demo files stay in sync with the canonical texts


def test_demo_rule_files_match_constants():
    for name, text in SHIPPED_RULESETS.items():
        assert (DEMOS / "rules" / f"{name}.lsp").read_text() == text


def test_demo_conjecture_files_match_constants():
    for name, text in SHIPPED_CONJECTURES.items():
        assert (DEMOS / "conjectures" / f"{name}.lsp").read_text() == text
