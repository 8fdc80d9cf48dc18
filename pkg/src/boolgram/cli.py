"""Command-line front end.

Exit status contract: 0 all expectations met, 1 verdict mismatch against an
expectation file, 2 grammar or input load failure, 3 invalid grammar
semantics, 4 enumeration budget exceeded. Reports are plain text or
line-delimited JSON (``--format json``); except under ``bench`` they carry
no wall-clock fields, so identical inputs yield identical reports.
"""

from __future__ import annotations

import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import __version__
from .ambiguity import check_ambiguity
from .core import BoolgramError, Grammar
from .cyk import bench as run_bench
from .cyk import extract_dag, fit_loglog_slope, recognize
from .dsl import DslError, dsl_parse, dsl_print
from .modellang import normalize_whitespace, return_sum_program
from .normalize import BinaryGrammar, NormalizeError, binarize, stats as grammar_stats
from .oracle import (
    BudgetExceededError,
    InvalidGrammarError,
    UndeterminedError,
    enumerate_strings,
    member,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_LOAD = 2
EXIT_INVALID = 3
EXIT_BUDGET = 4

REPORT_SCHEMA = "boolgram-report/1"


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


def _load_grammar(path: str) -> tuple[Grammar, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _Failure(EXIT_LOAD, f"cannot read grammar: {exc}")
    try:
        g = dsl_parse(text, path)
    except DslError as exc:
        raise _Failure(EXIT_LOAD, f"grammar load failed: {exc}")
    return g, hashlib.sha256(text.encode()).hexdigest()


def _binarize(g: Grammar) -> BinaryGrammar:
    try:
        return binarize(g)
    except InvalidGrammarError as exc:
        raise _Failure(EXIT_INVALID, str(exc))
    except NormalizeError as exc:
        raise _Failure(EXIT_INVALID, f"normalization failed: {exc}")


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(report, sort_keys=True))
    else:
        kind = report.get("kind", "")
        if kind == "verdict":
            status = "accept" if report["accept"] else "reject"
            extra = ""
            if "expected" in report and report["expected"] is not None:
                extra = "  (as expected)" if report["matches_expectation"] else "  (EXPECTED OTHERWISE)"
            oracle_note = ""
            if report.get("oracle_checked"):
                oracle_note = "  oracle=agree" if report["oracle_agrees"] else "  oracle=DISAGREES"
            click.echo(f"{report['input']}: {status}{extra}{oracle_note}")
        else:
            click.echo(json.dumps(report, sort_keys=True))


def _grammar_header(path: str, digest: str, fmt: str, command: str, argv: list[str]) -> None:
    if fmt == "json":
        click.echo(
            json.dumps(
                {
                    "schema": REPORT_SCHEMA,
                    "kind": "header",
                    "command": command,
                    "args": argv,
                    "grammar": path,
                    "sha256": digest,
                    "version": __version__,
                },
                sort_keys=True,
            )
        )


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Conjunctive and Boolean grammar toolkit."""


def _read_program(path: str, raw: bool) -> str:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _Failure(EXIT_LOAD, f"cannot read input: {exc}")
    return text if raw else normalize_whitespace(text)


@main.command("check")
@click.argument("grammar_path")
@click.argument("inputs", nargs=-1)
@click.option("--string", "strings", multiple=True, help="check a literal string instead of a file")
@click.option("--oracle", is_flag=True, help="cross-check with the reference semantics")
@click.option("--raw", is_flag=True, help="do not normalize whitespace to spaces")
@click.option("--jobs", default=1, show_default=True, help="parallel input processing")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_check(grammar_path, inputs, strings, oracle, raw, jobs, fmt):
    """Accept/reject each input program via the table recognizer.

    For file inputs, a sibling expect.toml supplies the expected verdict;
    a mismatch sets exit status 1.
    """
    try:
        g, digest = _load_grammar(grammar_path)
        bg = _binarize(g)
        _grammar_header(grammar_path, digest, fmt, "check", list(inputs))

        work: list[tuple[str, str, object]] = []
        for path in inputs:
            text = _read_program(path, raw)
            expected = _expected_verdict(Path(path))
            work.append((path, text, expected))
        for s in strings:
            work.append((f"<string:{s}>", s if raw else normalize_whitespace(s), None))
        if not work:
            raise _Failure(EXIT_LOAD, "no inputs given")

        def run(item):
            label, text, expected = item
            table = recognize(bg, text)
            accept = table.accepts()
            rec = {
                "schema": REPORT_SCHEMA,
                "kind": "verdict",
                "input": label,
                "accept": accept,
                "expected": expected,
                "matches_expectation": None if expected is None else (accept == (expected == "accept")),
            }
            if oracle:
                verdict = member(g, text)
                rec["oracle_checked"] = True
                rec["oracle_agrees"] = verdict == accept
            return rec

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                records = list(pool.map(run, work))
        else:
            records = [run(item) for item in work]

        status = EXIT_OK
        for rec in records:
            _emit(rec, fmt)
            if rec.get("oracle_checked") and not rec["oracle_agrees"]:
                raise _Failure(EXIT_INVALID, f"oracle disagrees with recognizer on {rec['input']}")
            if rec["matches_expectation"] is False:
                status = EXIT_MISMATCH
        sys.exit(status)
    except _Failure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)
    except (InvalidGrammarError, UndeterminedError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    except BudgetExceededError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BUDGET)


def _expected_verdict(program_path: Path):
    expect = program_path.parent / "expect.toml"
    if not expect.exists():
        return None
    import sys as _sys

    if _sys.version_info >= (3, 11):
        import tomllib as toml
    else:
        import tomli as toml
    try:
        return toml.loads(expect.read_text()).get("verdict")
    except Exception:
        return None


@main.command("parse")
@click.argument("grammar_path")
@click.argument("input_path", required=False)
@click.option("--string", "string", default=None)
@click.option("--raw", is_flag=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_parse(grammar_path, input_path, string, raw, fmt):
    """Print the parse DAG of an accepted input."""
    try:
        g, digest = _load_grammar(grammar_path)
        bg = _binarize(g)
        if (input_path is None) == (string is None):
            raise _Failure(EXIT_LOAD, "give exactly one of INPUT_PATH or --string")
        text = _read_program(input_path, raw) if input_path else (
            string if raw else normalize_whitespace(string)
        )
        table = recognize(bg, text)
        if not table.accepts():
            click.echo("reject: no parse to extract", err=True)
            sys.exit(EXIT_MISMATCH)
        dag = extract_dag(table, bg)
        if fmt == "json":
            _grammar_header(grammar_path, digest, fmt, "parse", [input_path or "<string>"])
            click.echo(json.dumps(dag.to_json_obj(), sort_keys=True))
        else:
            click.echo(dag.to_text(), nl=False)
        sys.exit(EXIT_OK)
    except _Failure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)
    except (InvalidGrammarError, UndeterminedError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)


@main.command("enumerate")
@click.argument("grammar_path")
@click.option("--nt", default=None, help="nonterminal (default: start symbol)")
@click.option("--alphabet", default=None, help="enumeration alphabet (default: grammar alphabet)")
@click.option("--maxlen", default=4, show_default=True)
@click.option("--budget", default=None, type=int, help="string-count budget override")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_enumerate(grammar_path, nt, alphabet, maxlen, budget, fmt):
    """All derived strings up to a length bound, length-then-lex."""
    try:
        g, digest = _load_grammar(grammar_path)
        words = enumerate_strings(g, nt or g.start, alphabet, maxlen, budget)
        if fmt == "json":
            _grammar_header(grammar_path, digest, fmt, "enumerate", [])
            click.echo(json.dumps({"kind": "enumeration", "nt": nt or g.start, "strings": words}))
        else:
            for word in words:
                click.echo(word if word else "(empty string)")
        sys.exit(EXIT_OK)
    except _Failure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)
    except BudgetExceededError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    except (InvalidGrammarError, UndeterminedError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)


@main.command("ambiguity")
@click.argument("grammar_path")
@click.argument("inputs", nargs=-1, required=True)
@click.option("--string", "strings", multiple=True)
@click.option("--raw", is_flag=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_ambiguity(grammar_path, inputs, strings, raw, fmt):
    """Rule-choice and split findings over the inputs' substrings."""
    try:
        g, digest = _load_grammar(grammar_path)
        bg = _binarize(g)
        texts = [_read_program(p, raw) for p in inputs]
        texts += [s if raw else normalize_whitespace(s) for s in strings]
        findings = check_ambiguity(g, texts, bg)
        _grammar_header(grammar_path, digest, fmt, "ambiguity", list(inputs))
        for f in findings:
            if fmt == "json":
                click.echo(
                    json.dumps(
                        {
                            "kind": "finding",
                            "finding_kind": f.kind,
                            "site": f.site,
                            "witness": f.witness,
                            "detail": list(f.detail),
                            "span": list(f.span),
                            "input_index": f.input_index,
                        },
                        sort_keys=True,
                    )
                )
            else:
                click.echo(str(f))
        if fmt == "text":
            click.echo(f"{len(findings)} finding(s)")
        sys.exit(EXIT_OK)
    except _Failure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)
    except (InvalidGrammarError, UndeterminedError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)


@main.command("stats")
@click.argument("grammar_path")
@click.option("--target", default=None, help="expected counts as NONTERMINALS,RULES")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_stats(grammar_path, target, fmt):
    """Counts after template expansion, with an optional reference delta."""
    try:
        g, digest = _load_grammar(grammar_path)
        s = grammar_stats(g)
        record = {"schema": REPORT_SCHEMA, "kind": "stats", **s.to_dict()}
        from .modellang import REFERENCE_STATS

        reference = None
        if target:
            try:
                nts, rules = (int(x) for x in target.split(","))
                reference = {"nonterminals": nts, "rules": rules}
            except ValueError:
                raise _Failure(EXIT_LOAD, "--target must be NONTERMINALS,RULES")
        elif g.name in REFERENCE_STATS:
            reference = REFERENCE_STATS[g.name]
        if reference:
            record["reference"] = reference
            record["delta"] = {
                "nonterminals": s.nonterminals - reference["nonterminals"],
                "rules": s.rules - reference["rules"],
            }
        if fmt == "json":
            click.echo(json.dumps(record, sort_keys=True))
        else:
            click.echo(f"grammar {s.name}: {s.nonterminals} nonterminals, {s.rules} rules")
            click.echo(
                f"  conjuncts: {s.positive_conjuncts} positive, {s.negative_conjuncts} negative; "
                f"terminals used: {s.terminals_used}/{s.alphabet_size}"
            )
            if reference:
                click.echo(
                    f"  reference: {reference['nonterminals']}/{reference['rules']}; "
                    f"delta {record['delta']['nonterminals']:+d} nonterminals, "
                    f"{record['delta']['rules']:+d} rules (see docs/grammar-stats.md)"
                )
        sys.exit(EXIT_OK)
    except _Failure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)


@main.command("normalize")
@click.argument("grammar_path")
@click.option("--output", "-o", default=None, help="write the binarized grammar here")
def cmd_normalize(grammar_path, output):
    """Emit the span-stratified binary form as grammar text."""
    try:
        g, _digest = _load_grammar(grammar_path)
        bg = _binarize(g)
        text = dsl_print(bg.grammar)
        if output:
            Path(output).write_text(text)
            click.echo(f"wrote {output}")
        else:
            click.echo(text, nl=False)
        sys.exit(EXIT_OK)
    except _Failure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)


@main.command("bench")
@click.argument("grammar_path")
@click.option("--family", type=click.Choice(["return-sum"]), default="return-sum", show_default=True)
@click.option("--sizes", default="8,16,32,64", show_default=True)
@click.option("--reps", default=3, show_default=True)
@click.option("--backend", type=click.Choice(["auto", "python", "c", "both"]), default="auto")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cmd_bench(grammar_path, family, sizes, reps, backend, fmt):
    """Recognition timings over a program family, with a log-log slope."""
    try:
        g, digest = _load_grammar(grammar_path)
        bg = _binarize(g)
        try:
            size_list = [int(s) for s in sizes.split(",")]
        except ValueError:
            raise _Failure(EXIT_LOAD, "--sizes must be comma-separated integers")
        inputs = [(f"{family}-{n}", return_sum_program(n)) for n in size_list]
        backends = ["python", "c"] if backend == "both" else [backend]
        _grammar_header(grammar_path, digest, fmt, "bench", [family, sizes])
        for be in backends:
            records = run_bench(bg, inputs, repetitions=reps, backend=be)
            slope = fit_loglog_slope(records)
            for r in records:
                rec = {"schema": REPORT_SCHEMA, "kind": "timing", **r.to_dict()}
                if fmt == "json":
                    click.echo(json.dumps(rec, sort_keys=True))
                else:
                    click.echo(f"  {r.label:18} n={r.length:5}  {r.seconds*1e3:9.2f} ms  [{r.backend}]")
            summary = {"schema": REPORT_SCHEMA, "kind": "slope", "backend": records[0].backend, "slope": slope}
            if fmt == "json":
                click.echo(json.dumps(summary, sort_keys=True))
            else:
                click.echo(f"fitted log-log slope [{records[0].backend}]: {slope:.2f}")
        sys.exit(EXIT_OK)
    except _Failure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)
    except RuntimeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_LOAD)


if __name__ == "__main__":
    main()
