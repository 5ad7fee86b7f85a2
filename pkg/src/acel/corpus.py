"""Running a directory of (query, stream, expected results) fixtures.

A directory either holds a ``manifest.json`` listing fixtures, or query
files ``NAME.acel`` next to ``NAME.jsonl`` (the stream) and
``NAME.expected.jsonl``.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

from .engine import run_engine
from .errors import AcelError
from .io import check_stream, infer_schema_strict, read_results, read_schema, read_stream
from .parser import parse_query
from .syntax import has_multiset_filter


@dataclass
class Fixture:
    name: str
    query: str
    stream: str
    expected: str
    schema: Optional[str] = None
    engine: Optional[str] = None


@dataclass
class FixtureResult:
    name: str
    status: str  # "pass", "fail" or "error"
    detail: str = ""


@dataclass
class CorpusReport:
    results: List[FixtureResult]

    @property
    def ok(self):
        return all(r.status == "pass" for r in self.results)

    def summary(self):
        lines = [f"{r.status.upper():5} {r.name}" + (f": {r.detail}" if r.detail else "")
                 for r in self.results]
        passed = sum(r.status == "pass" for r in self.results)
        lines.append(f"{passed}/{len(self.results)} fixtures passed")
        return "\n".join(lines)


def load_fixtures(directory):
    manifest = os.path.join(directory, "manifest.json")
    if os.path.exists(manifest):
        with open(manifest, encoding="utf-8") as fh:
            entries = json.load(fh)
        return [Fixture(**{k: (os.path.join(directory, v)
                               if k in ("query", "stream", "expected", "schema") and v
                               else v)
                           for k, v in e.items() if k != "note"})
                for e in entries]
    fixtures = []
    for fn in sorted(os.listdir(directory)):
        if fn.endswith(".acel"):
            stem = os.path.join(directory, fn[:-5])
            fixtures.append(Fixture(fn[:-5], stem + ".acel", stem + ".jsonl",
                                    stem + ".expected.jsonl"))
    return fixtures


def run_fixture(fx):
    try:
        with open(fx.query, encoding="utf-8") as fh:
            f = parse_query(fh.read())
        stream = read_stream(fx.stream)
        schema = read_schema(fx.schema) if fx.schema else infer_schema_strict(stream)
        check_stream(stream, schema)
        expected = read_results(fx.expected)
    except (AcelError, OSError, ValueError, KeyError, TypeError) as exc:
        return FixtureResult(fx.name, "error", f"{type(exc).__name__}: {exc}")
    engine = fx.engine or ("oracle" if has_multiset_filter(f) else "diff")
    try:
        out = run_engine(f, stream, schema, engine)
    except AcelError as exc:
        return FixtureResult(fx.name, "error", f"{type(exc).__name__}: {exc}")
    if not out.agrees:
        return FixtureResult(fx.name, "fail",
                             f"engines disagree ({len(out.missing)} missing, {len(out.extra)} extra)")
    if out.results != expected:
        return FixtureResult(fx.name, "fail",
                             f"{len(out.results)} results, expected {len(expected)} "
                             f"({len(expected - out.results)} missing, "
                             f"{len(out.results - expected)} unexpected)")
    return FixtureResult(fx.name, "pass", f"{len(expected)} results, engine {engine}")


def run_corpus(directory, workers=4):
    """Run every fixture; fixtures are independent and run in a thread pool."""
    fixtures = load_fixtures(directory)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return CorpusReport(list(pool.map(run_fixture, fixtures)))


def shipped_corpus_dir():
    return os.path.join(os.path.dirname(__file__), "corpus")
