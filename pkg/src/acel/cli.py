"""The ``acel`` command line."""

import argparse
import random
import sys

from .automata import acea_enumerate, dump_acea
from .compiler import compile_formula
from .corpus import run_corpus
from .engine import ENGINES, run_engine, run_oracle
from .errors import (EvaluationError, ParseError, StreamError,
                     UnsupportedFeature)
from .io import (check_stream, dump_complex_event, dump_results,
                 infer_schema_strict, read_schema, read_stream, sorted_results)
from .parser import parse_query
from .testing import random_stream, seed_from_env, stream_profile

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STREAM = 2
EXIT_MISMATCH = 3
EXIT_UNSUPPORTED = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="acel", description="Evaluate ACEL queries over event streams.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="evaluate a query over a stream")
    r.add_argument("--query", required=True)
    r.add_argument("--stream", required=True)
    r.add_argument("--schema")
    r.add_argument("--engine", choices=ENGINES, default="oracle")
    r.add_argument("--emit-automaton", metavar="PATH")
    r.add_argument("--out", metavar="PATH")
    r.add_argument("--max-results", type=int, metavar="N")

    c = sub.add_parser("compile", help="compile a query and print its automaton")
    c.add_argument("--query", required=True)
    c.add_argument("--schema")
    c.add_argument("--stream", help="infer the schema from this stream")
    c.add_argument("--emit-automaton", metavar="PATH",
                   help="write the dump here instead of standard output")

    k = sub.add_parser("corpus", help="run every fixture in a corpus directory")
    k.add_argument("directory")

    v = sub.add_parser("validate", help="check a stream against a schema")
    v.add_argument("--stream", required=True)
    v.add_argument("--schema", required=True)

    z = sub.add_parser("fuzz", help="compare both engines on random streams")
    z.add_argument("--query", required=True)
    z.add_argument("--streams", type=int, default=200)
    z.add_argument("--length", type=int, default=8)
    z.add_argument("--seed", type=int, help="defaults to ACEL_SEED")
    return p


def _fail(code, message):
    print(f"acel: {message}", file=sys.stderr)
    return code


def _read_query(path):
    with open(path, encoding="utf-8") as fh:
        return parse_query(fh.read())


def _stream_and_schema(stream_path, schema_path):
    stream = read_stream(stream_path)
    schema = read_schema(schema_path) if schema_path else infer_schema_strict(stream)
    check_stream(stream, schema)
    return stream, schema


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _stream_error(exc):
    where = f" (event {exc.index})" if getattr(exc, "index", None) is not None else ""
    return _fail(EXIT_STREAM, f"stream error{where}: {exc}")


def cmd_run(args):
    try:
        f = _read_query(args.query)
    except OSError as exc:
        return _fail(EXIT_USAGE, str(exc))
    try:
        stream, schema = _stream_and_schema(args.stream, args.schema)
    except StreamError as exc:
        return _stream_error(exc)
    except OSError as exc:
        return _fail(EXIT_STREAM, str(exc))
    try:
        out = run_engine(f, stream, schema, args.engine)
        automaton = out.automaton
        if args.emit_automaton and automaton is None and out.only_oracle is None:
            automaton = compile_formula(f, schema, warn=False)
    except UnsupportedFeature as exc:
        return _fail(EXIT_UNSUPPORTED, f"unsupported by the {args.engine} engine: {exc}")
    except EvaluationError as exc:
        return _fail(EXIT_USAGE, f"evaluation error: {exc}")
    if out.only_oracle is not None:
        print(f"acel: diff fell back to the oracle only: {out.only_oracle}", file=sys.stderr)
    if args.emit_automaton and automaton is not None:
        _write(args.emit_automaton, dump_acea(automaton))
    if not out.agrees:
        first = sorted_results(out.missing | out.extra)[0]
        side = "oracle only" if first in out.missing else "automaton only"
        print(f"acel: engines disagree: {len(out.missing)} results only from the oracle, "
              f"{len(out.extra)} only from the automaton", file=sys.stderr)
        print(f"first divergent ({side}): {dump_complex_event(first)}", file=sys.stderr)
        return EXIT_MISMATCH
    results = sorted_results(out.results)
    if args.max_results is not None:
        results = results[:args.max_results]
    _write(args.out, dump_results(results))
    return EXIT_OK


def cmd_compile(args):
    try:
        f = _read_query(args.query)
        if args.schema:
            schema = read_schema(args.schema)
        elif args.stream:
            schema = infer_schema_strict(read_stream(args.stream))
        else:
            return _fail(EXIT_USAGE, "compile needs --schema or --stream")
    except StreamError as exc:
        return _stream_error(exc)
    except OSError as exc:
        return _fail(EXIT_USAGE, str(exc))
    try:
        a = compile_formula(f, schema)
    except UnsupportedFeature as exc:
        return _fail(EXIT_UNSUPPORTED, f"unsupported by the compiler: {exc}")
    _write(args.emit_automaton, dump_acea(a))
    return EXIT_OK


def cmd_corpus(args):
    report = run_corpus(args.directory)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_validate(args):
    try:
        stream, _ = _stream_and_schema(args.stream, args.schema)
    except StreamError as exc:
        return _stream_error(exc)
    except OSError as exc:
        return _fail(EXIT_STREAM, str(exc))
    print(f"ok: {len(stream)} events")
    return EXIT_OK


def cmd_fuzz(args):
    try:
        f = _read_query(args.query)
    except OSError as exc:
        return _fail(EXIT_USAGE, str(exc))
    seed = seed_from_env() if args.seed is None else args.seed
    schema, domains = stream_profile(f)
    try:
        a = compile_formula(f, schema, warn=False)
    except UnsupportedFeature as exc:
        return _fail(EXIT_UNSUPPORTED, f"unsupported by the compiler: {exc}")
    rng = random.Random(f"{seed}/fuzz")
    checked = 0
    for n in range(args.streams):
        stream = random_stream(rng, schema, domains, rng.randint(0, args.length))
        try:
            expected = run_oracle(f, stream)
        except EvaluationError:
            continue
        got = acea_enumerate(a, stream)
        checked += 1
        if got != expected:
            first = sorted_results(got ^ expected)[0]
            print(f"stream {n} differs; first divergent: {dump_complex_event(first)}",
                  file=sys.stderr)
            for e in stream:
                print(f"  {dict(e.attrs)}", file=sys.stderr)
            return EXIT_MISMATCH
    print(f"ok: {checked} streams agree (seed {seed})")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compile": cmd_compile, "corpus": cmd_corpus,
            "validate": cmd_validate, "fuzz": cmd_fuzz}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        return _fail(EXIT_USAGE, f"parse error: {exc}")


if __name__ == "__main__":
    sys.exit(main())
