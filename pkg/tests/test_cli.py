"""Command-line interface smoke tests.

Most cases drive cli.main() in-process and parse the JSON envelope;
a few go through a real subprocess to pin down exit codes and the
byte-level determinism of the output.
"""

import json
import subprocess
import sys

import pytest

from cosetx import cli
from cosetx.complexes import loads_complex, save_complex
from cosetx import fixtures as fx

ENVELOPE_KEYS = {"tool", "version", "command", "params", "caps", "seed",
                 "result"}


def run_json(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture(scope="module")
def torus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cplx") / "torus.jsonl"
    save_complex(fx.torus_7(), path)
    return str(path)


@pytest.fixture(scope="module")
def triangle_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cplx") / "tri.jsonl"
    save_complex(fx.single_triangle(), path)
    return str(path)


# ---------------------------------------------------------------------------
# envelopes and formats


def test_ring_parse_envelope(capsys):
    code, env = run_json(capsys, ["ring", "parse", "1+t", "--p", "3",
                                  "--s", "2"])
    assert code == 0
    assert ENVELOPE_KEYS <= set(env)
    assert env["tool"] == "cosetx" and env["command"] == "ring parse"
    assert env["result"]["coeffs"] == [1, 1]
    assert env["result"]["compact"] == "[1,1]@3,2"
    assert "timings" not in env


def test_ring_parse_text_format(capsys):
    code = cli.main(["ring", "parse", "1+t", "--p", "3", "--s", "2",
                     "--format", "text"])
    out = capsys.readouterr().out
    assert code == 0 and "[1,1]@3,2" in out


def test_ring_op(capsys):
    code, env = run_json(capsys, ["ring", "op", "--op", "mul",
                                  "[1,1]@3,2", "[1,2]@3,2"])
    assert code == 0
    # (1+t)(1+2t) = 1 + 3t + ... = 1 mod (3, t^2)
    assert env["result"]["compact"] == "[1,0]@3,2"


def test_timings_are_opt_in(capsys):
    _, env = run_json(capsys, ["propagate", "--n", "3", "--timings"])
    assert "timings" in env and env["timings"]["wall_s"] >= 0
    _, env = run_json(capsys, ["propagate", "--n", "3"])
    assert "timings" not in env


def test_out_file_writes_only_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code = cli.main(["ring", "parse", "t", "--p", "2", "--s", "2",
                     "--out", str(path)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text())["result"]["coeffs"] == [0, 1]


# ---------------------------------------------------------------------------
# group enumeration


def test_group_enum_dump(capsys):
    code = cli.main(["group", "enum", "--n", "1", "--p", "2", "--s", "1"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert out[0] == "1 2 1 6"              # SL_2(F_2)
    assert len(out) == 7
    assert len(set(out[1:])) == 6           # distinct packed elements


def test_group_enum_json(capsys):
    code, env = run_json(capsys, ["group", "enum", "--n", "1", "--p", "3",
                                  "--s", "2", "--format", "json"])
    assert code == 0
    assert env["result"]["order"] == 648
    assert len(env["result"]["elements"]) == 648
    assert env["result"]["d"] == 1          # defaulted to s - 1


# ---------------------------------------------------------------------------
# complexes


def test_complex_build_and_stats(capsys, tmp_path):
    path = tmp_path / "ko.jsonl"
    code, env = run_json(capsys, ["complex", "build", "--preset", "ko",
                                  "--n", "2", "--p", "2", "--s", "2",
                                  "--d", "1", "--out", str(path)])
    assert code == 0
    assert env["result"]["f_vector"] == [2016, 32256, 43008]

    code, env = run_json(capsys, ["complex", "stats", str(path)])
    assert code == 0
    r = env["result"]
    assert r["f_vector"] == [2016, 32256, 43008]
    assert r["connected"] and r["partite"] and r["n_colors"] == 3
    assert r["weights_ok"]
    assert set(r["weight_totals"].values()) == {"1"}


def test_complex_build_raw_dump(capsys):
    code = cli.main(["complex", "build", "--preset", "ko", "--n", "2",
                     "--p", "2", "--s", "2", "--d", "1", "--out", "-"])
    out = capsys.readouterr().out
    assert code == 0
    X = loads_complex(out)
    assert X.f_vector() == (2016, 32256, 43008)


def test_complex_stats_missing_file(capsys):
    # OSError maps to the usage exit code
    assert cli.main(["complex", "stats", "/nonexistent/x.jsonl"]) == 2


# ---------------------------------------------------------------------------
# cohomology and expansion


def test_cohomology_h1_gauge(capsys, torus_file):
    code, env = run_json(capsys, ["cohomology", "h1", "--complex",
                                  torus_file, "--lambda", "zmod:2"])
    assert code == 0
    r = env["result"]
    assert r["trivial"] is False and r["mode"] == "gauge"
    assert r["witness_support"]
    assert all(len(t) == 3 for t in r["witness_support"])


def test_cohomology_h1_brute_census(capsys, torus_file):
    code, env = run_json(capsys, ["cohomology", "h1", "--complex",
                                  torus_file, "--lambda", "zmod:2",
                                  "--mode", "brute"])
    assert code == 0
    assert env["result"]["classes"] == 4


def test_cohomology_h1_resource_exit(capsys, torus_file):
    # 3**21 1-cochains blow the default cap
    code = cli.main(["cohomology", "h1", "--complex", torus_file,
                     "--lambda", "zmod:3", "--mode", "brute"])
    assert code == 3
    assert "resource cap exceeded" in capsys.readouterr().err


def test_expansion_h0(capsys, triangle_file):
    code, env = run_json(capsys, ["expansion", "h0", "--complex",
                                  triangle_file, "--lambda", "zmod:2"])
    assert code == 0 and env["result"]["h0_cobound"] == "2"
    code, env = run_json(capsys, ["expansion", "h0", "--complex",
                                  triangle_file, "--lambda", "zmod:3"])
    assert env["result"]["h0_cobound"] == "3/2"


def test_expansion_h1_exact(capsys, torus_file):
    code, env = run_json(capsys, ["expansion", "h1", "--complex",
                                  torus_file, "--lambda", "zmod:2"])
    assert code == 0
    r = env["result"]
    assert (r["h1_cobound"], r["h1_cosys"], r["min_systole"]) == \
        ("0", "1", "2/7")
    assert r["exact"] is True and "note" not in r


def test_expansion_h1_search_notes_bound(capsys, torus_file):
    code, env = run_json(capsys, ["expansion", "h1", "--complex",
                                  torus_file, "--lambda", "zmod:2",
                                  "--mode", "search", "--seed", "5"])
    assert code == 0
    assert env["result"]["exact"] is False
    assert "upper bound" in env["result"]["note"]
    assert env["seed"] == 5


# ---------------------------------------------------------------------------
# propagation, relations, spectra


def test_propagate_complete(capsys):
    code, env = run_json(capsys, ["propagate", "--n", "3"])
    assert code == 0
    assert env["result"]["complete"] is True
    assert env["result"]["uncovered_per_stage"][-1] == 0


def test_propagate_text(capsys):
    code = cli.main(["propagate", "--n", "4", "--format", "text"])
    out = capsys.readouterr().out
    assert code == 0 and "COMPLETE" in out


def test_relations_emit(capsys):
    code, env = run_json(capsys, ["relations", "emit", "--preset", "sl",
                                  "--n", "3", "--p", "2", "--d", "1"])
    assert code == 0
    r = env["result"]
    assert r["relation_count"] == 1644
    assert r["generator_count"] == 48
    assert sum(r["counts_by_kind"].values()) == 1644
    assert len(r["relations"]) == 1644
    first = r["relations"][0]
    assert set(first) == {"kind", "pair", "lhs", "rhs"}


def test_relations_verify(capsys):
    code, env = run_json(capsys, ["relations", "verify", "--preset", "sl",
                                  "--n", "3", "--p", "2", "--d", "1",
                                  "--target-s", "3"])
    assert code == 0
    assert env["result"]["violations"] == 0
    assert env["result"]["checked"] == 1644


def test_spectral_links_threshold_exit(capsys, torus_file):
    code, env = run_json(capsys, ["spectral", "links", "--complex",
                                  torus_file, "--threshold", "0.51"])
    assert code == 0 and env["result"]["passed"] is True
    code, env = run_json(capsys, ["spectral", "links", "--complex",
                                  torus_file, "--threshold", "0.4"])
    assert code == 1 and env["result"]["passed"] is False


def test_spectral_links_needs_threshold_with_file(capsys, torus_file):
    code = cli.main(["spectral", "links", "--complex", torus_file])
    assert code == 2


# ---------------------------------------------------------------------------
# suite and error mapping


def test_suite_quick_all_pass(capsys):
    code, env = run_json(capsys, ["suite", "--quick"])
    assert code == 0
    checks = env["result"]["checks"]
    assert len(checks) >= 15
    assert env["result"]["passed"] is True
    assert all(c["passed"] for c in checks)


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["ring"])                   # missing subcommand
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2
    # domain validation also maps to 2, but without raising
    assert cli.main(["ring", "parse", "t", "--p", "4", "--s", "2"]) == 2
    assert "error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# subprocess behavior


def run_proc(argv):
    return subprocess.run([sys.executable, "-m", "cosetx.cli", *argv],
                          capture_output=True, text=True, timeout=300)


def test_subprocess_exit_codes():
    assert run_proc(["propagate", "--n", "3"]).returncode == 0
    r = run_proc(["ring", "parse", "t", "--p", "4", "--s", "2"])
    assert r.returncode == 2 and r.stdout == ""


def test_subprocess_output_deterministic():
    argv = ["ring", "parse", "1+t+t^2", "--p", "5", "--s", "3"]
    a, b = run_proc(argv), run_proc(argv)
    assert a.stdout == b.stdout and a.stdout
    assert json.loads(a.stdout)["result"]["coeffs"] == [1, 1, 1]


def test_console_script_installed():
    r = subprocess.run(["cosetx", "--version"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "cosetx" in r.stdout
