import os
import shutil
import subprocess
import sys

import pytest

from acel.cli import main
from acel.corpus import shipped_corpus_dir
from acel.io import parse_complex_event

CORPUS = shipped_corpus_dir()


def corpus_file(*parts):
    return os.path.join(CORPUS, *parts)


MAX_QUERY = corpus_file("queries", "stocks_max_intel.acel")
STOCKS = corpus_file("streams", "stocks.jsonl")
STOCK_SCHEMA = corpus_file("schemas", "stocks.json")


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_run_max_query_with_both_engines(capsys):
    code = main(["run", "--query", MAX_QUERY, "--stream", STOCKS,
                 "--schema", STOCK_SCHEMA, "--engine", "diff"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0 and len(out) == 2
    ces = [parse_complex_event(line) for line in out]
    assert [(c.start, c.end) for c in ces] == [(0, 4), (1, 4)]
    assert all(next(iter(c["M"])).get("MAX") == 80 for c in ces)


@pytest.mark.parametrize("engine", ["oracle", "acea", "diff"])
def test_output_is_deterministic(capsys, engine):
    argv = ["run", "--query", MAX_QUERY, "--stream", STOCKS, "--engine", engine]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_output_round_trips(capsys):
    query = corpus_file("queries", "nested_sum.acel")
    stream = corpus_file("streams", "blocks.jsonl")
    assert main(["run", "--query", query, "--stream", stream]) == 0
    out = capsys.readouterr().out
    expected = open(corpus_file("expected", "nested_sum.jsonl"), encoding="utf-8").read()
    assert out == expected
    assert len([parse_complex_event(line) for line in out.splitlines()]) == 8


def test_max_results_and_out_file(tmp_path, capsys):
    target = tmp_path / "out.jsonl"
    assert main(["run", "--query", MAX_QUERY, "--stream", STOCKS,
                 "--max-results", "1", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert len(target.read_text().splitlines()) == 1


def test_malformed_stream_reports_the_line(tmp_path, capsys):
    bad = write(tmp_path, "bad.jsonl", '{"type": "SELL", "price": 1}\n{"price": 2}\n')
    assert main(["run", "--query", MAX_QUERY, "--stream", bad]) == 2
    assert "line 2" in capsys.readouterr().err


def test_invalid_json_and_nan_are_stream_errors(tmp_path, capsys):
    bad = write(tmp_path, "bad.jsonl", '{"type": "SELL"\n')
    assert main(["validate", "--stream", bad, "--schema", STOCK_SCHEMA]) == 2
    nan = write(tmp_path, "nan.jsonl", '{"type": "SELL", "price": NaN}\n')
    assert main(["validate", "--stream", nan, "--schema", STOCK_SCHEMA]) == 2
    assert "line 1" in capsys.readouterr().err


def test_stream_outside_the_schema(tmp_path, capsys):
    odd = write(tmp_path, "odd.jsonl", '{"type": "SELL", "name": "X", "volume": 3}\n')
    assert main(["validate", "--stream", odd, "--schema", STOCK_SCHEMA]) == 2
    assert main(["validate", "--stream", STOCKS, "--schema", STOCK_SCHEMA]) == 0
    assert "ok: 10 events" in capsys.readouterr().out


def test_multiset_query_is_unsupported_by_the_automaton(capsys):
    query = corpus_file("queries", "q21_heart_rate.acel")
    stream = corpus_file("streams", "heart.jsonl")
    assert main(["run", "--query", query, "--stream", stream, "--engine", "acea"]) == 4
    err = capsys.readouterr().err
    assert "multiset predicate" in err


def test_diff_falls_back_to_the_oracle(capsys):
    query = corpus_file("queries", "q21_heart_rate.acel")
    stream = corpus_file("streams", "heart.jsonl")
    assert main(["run", "--query", query, "--stream", stream, "--engine", "diff"]) == 0
    captured = capsys.readouterr()
    assert "fell back to the oracle" in captured.err
    assert len(captured.out.splitlines()) == 7


def test_parse_error_exits_with_one(tmp_path, capsys):
    q = write(tmp_path, "q.acel", "SELL ;\n")
    assert main(["run", "--query", q, "--stream", STOCKS]) == 1
    assert "parse error" in capsys.readouterr().err


def test_evaluation_error_exits_with_one(tmp_path, capsys):
    q = write(tmp_path, "q.acel", "AGG M[a <- avg intel(price)](SELL)\n")
    assert main(["run", "--query", q, "--stream", STOCKS]) == 1
    assert "evaluation error" in capsys.readouterr().err


def test_usage_errors_exit_with_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--query", MAX_QUERY])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["run", "--query", MAX_QUERY, "--stream", STOCKS, "--engine", "fast"])
    assert info.value.code == 1
    assert main(["compile", "--query", MAX_QUERY]) == 1


def test_compile_emits_the_automaton(tmp_path, capsys):
    assert main(["compile", "--query", MAX_QUERY, "--schema", STOCK_SCHEMA]) == 0
    text = capsys.readouterr().out
    assert text.startswith("ACEA\n") and "transition" in text
    target = tmp_path / "a.txt"
    assert main(["compile", "--query", MAX_QUERY, "--stream", STOCKS,
                 "--emit-automaton", str(target)]) == 0
    assert target.read_text() == text


def test_run_can_also_emit_the_automaton(tmp_path, capsys):
    target = tmp_path / "a.txt"
    assert main(["run", "--query", MAX_QUERY, "--stream", STOCKS,
                 "--emit-automaton", str(target)]) == 0
    assert target.read_text().startswith("ACEA\n")


def test_fuzz_agrees(capsys):
    assert main(["fuzz", "--query", MAX_QUERY, "--streams", "20", "--seed", "3"]) == 0
    assert "ok: 20 streams agree (seed 3)" in capsys.readouterr().out


def test_empty_corpus_passes(tmp_path, capsys):
    assert main(["corpus", str(tmp_path)]) == 0
    assert "0/0 fixtures passed" in capsys.readouterr().out


def test_corrupted_expected_file_is_an_error(tmp_path, capsys):
    for part in ("queries", "streams", "schemas", "expected"):
        (tmp_path / part).mkdir()
    d = str(tmp_path)
    shutil.copy(MAX_QUERY, os.path.join(d, "queries", "stocks_max_intel.acel"))
    shutil.copy(STOCKS, os.path.join(d, "streams", "stocks.jsonl"))
    shutil.copy(STOCK_SCHEMA, os.path.join(d, "schemas", "stocks.json"))
    write(tmp_path / "expected", "stocks_max_intel.jsonl", "{not json\n")
    write(tmp_path, "manifest.json", """[{"name": "broken",
        "query": "queries/stocks_max_intel.acel", "stream": "streams/stocks.jsonl",
        "schema": "schemas/stocks.json", "expected": "expected/stocks_max_intel.jsonl"}]""")
    assert main(["corpus", d]) != 0
    out = capsys.readouterr().out
    assert "ERROR" in out and "broken" in out and "0/1 fixtures passed" in out


def test_shipped_corpus_passes(capsys):
    assert main(["corpus", CORPUS]) == 0
    assert "25/25 fixtures passed" in capsys.readouterr().out


def test_console_script_is_installed():
    exe = shutil.which("acel")
    if exe is None:
        pytest.skip("acel is not on PATH")
    proc = subprocess.run([exe, "run", "--query", MAX_QUERY, "--stream", STOCKS],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and len(proc.stdout.splitlines()) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "acel.cli", "validate", "--stream",
                           STOCKS, "--schema", STOCK_SCHEMA],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "ok: 10 events"
