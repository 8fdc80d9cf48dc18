"""The model programming language as data.

Two grammar builds over the same 54-character alphabet: the Boolean grammar
(negation for token maximality and duplicate checks) and its negation-free
unambiguous rewrite. Both are assembled from checked-in source files; the
rewrite additionally receives generated rule families: the identifier
automata (tId: identifiers minus the five keywords, with trailing
whitespace; tIdNotMain: identifiers other than ``main``, bare) and the
statement-shape variants, all emitted from single sources here so the
variants cannot drift apart.

The program corpus lives in one directory per case (program text plus
expected verdict and, for rejects, a minimal accepted edit).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .core import Grammar
from .dfa import dfa_to_rules, identifier_dfa
from .dsl import dsl_parse, dsl_print

LETTERS = "abcdefghijklmnopqrstuvwxyz"
DIGITS = "0123456789"
PUNCTUATORS = "(){},;+-*/%&|!=<>"
ALPHABET = LETTERS + DIGITS + " " + PUNCTUATORS  # 54 characters

KEYWORDS = ("var", "if", "else", "while", "return")

_DATA = Path(__file__).parent / "data"
_MODEL = _DATA / "model"
_CORPUS = _DATA / "corpus"

REJECTION_REASONS = (
    "undeclared-variable",
    "duplicate-variable",
    "scope-violation",
    "undeclared-function",
    "duplicate-function",
    "arity-mismatch",
    "no-main",
    "duplicate-main",
    "token-split",
    "not-returning",
    "syntax",
)


def normalize_whitespace(text: str) -> str:
    """All whitespace characters are treated as the space character."""
    for c in "\t\n\r\v\f":
        text = text.replace(c, " ")
    return text


# ---------------------------------------------------------------------------
# Statement-shape table shared by the three statement nonterminals of the
# negation-free grammar. 'if-then' is the else-less conditional; excluding
# it before an else resolves the dangling-else choice.

_STATEMENT_SHAPES = (
    ("expr", "Expr tSemicolon"),
    ("compound", "tLeftBrace Statements tRightBrace"),
    ("if-then", "tIf tLeftPar Expr tRightPar Statement"),
    ("if-else", "tIf tLeftPar Expr tRightPar StatementNotIfThen tElse Statement"),
    ("while", "tWhile tLeftPar Expr tRightPar Statement"),
    ("var", "StatementVar"),
    ("return", "StatementReturn"),
)


def _statement_family(head: str, exclude: tuple[str, ...]) -> str:
    lines = [f"{head} -> {body};" for tag, body in _STATEMENT_SHAPES if tag not in exclude]
    return "\n".join(lines)


def _rules_to_dsl(rules) -> str:
    from .dsl import _print_conjunct  # canonical conjunct formatting

    out = []
    for rule in rules:
        out.append(f"{rule.head} -> " + " & ".join(_print_conjunct(c) for c in rule.conjuncts) + ";")
    return "\n".join(out)


def identifier_token_rules() -> str:
    """DSL text for tId: keyword-free identifiers with trailing whitespace."""
    dfa = identifier_dfa(LETTERS, DIGITS, KEYWORDS)
    rules, names = dfa_to_rules(dfa, "tId-dfa", suffix_nonterminal="WS")
    start = names[dfa.initial]
    return f"tId -> {start};\n" + _rules_to_dsl(rules)


def not_main_token_rules() -> str:
    """DSL text for tIdNotMain: identifiers other than ``main``, bare."""
    dfa = identifier_dfa(LETTERS, DIGITS, KEYWORDS + ("main",))
    rules, names = dfa_to_rules(dfa, "tIdNotMain-dfa")
    start = names[dfa.initial]
    return f"tIdNotMain -> {start};\n" + _rules_to_dsl(rules)


@lru_cache(maxsize=None)
def build_boolean_grammar() -> Grammar:
    """The Boolean grammar for the model language."""
    src = (_MODEL / "src" / "model-boolean.bgr").read_text()
    return dsl_parse(src, "model-boolean.bgr")


@lru_cache(maxsize=None)
def build_unambiguous_grammar() -> Grammar:
    """The negation-free unambiguous grammar for the model language."""
    src = (_MODEL / "src" / "model-unamb.bgr").read_text()
    parts = [
        src,
        "\n# ---- generated: statement families ----\n",
        _statement_family("Statement", exclude=()),
        _statement_family("StatementNotIfThen", exclude=("if-then",)),
        _statement_family("StatementNotVar", exclude=("var",)),
        "\n# ---- generated: identifier automata ----\n",
        identifier_token_rules(),
        not_main_token_rules(),
    ]
    return dsl_parse("\n".join(parts), "model-unamb.bgr")


# Reference sizes these grammars are expected to reproduce; divergences are
# listed with justifications in docs/grammar-stats.md.
REFERENCE_STATS = {
    "model-boolean": {"nonterminals": 117, "rules": 361},
    "model-unamb": {"nonterminals": 187, "rules": 3828},
}


def write_complete_files(directory: Path | None = None) -> list[Path]:
    """Emit the canonical, fully expanded .bgr files next to the sources."""
    directory = _MODEL if directory is None else directory
    out = []
    for g in (build_boolean_grammar(), build_unambiguous_grammar()):
        path = directory / f"{g.name}.bgr"
        path.write_text(dsl_print(g))
        out.append(path)
    return out


# ---------------------------------------------------------------------------
# Corpus.


@dataclass(frozen=True)
class CorpusCase:
    name: str
    program: str  # raw text, newlines preserved
    expected: str  # "accept" | "reject"
    reason: Optional[str]  # rejection reason tag
    note: str
    fix_program: Optional[str]  # for rejects: minimal edit that accepts
    fix_note: Optional[str]
    path: Path

    @property
    def normalized(self) -> str:
        return normalize_whitespace(self.program)

    @property
    def accept(self) -> bool:
        return self.expected == "accept"


class CorpusError(Exception):
    pass


def corpus(directory: Path | None = None) -> list[CorpusCase]:
    """Load and validate all corpus cases, sorted by name."""
    directory = _CORPUS if directory is None else directory
    cases = []
    for case_dir in sorted(p for p in directory.iterdir() if p.is_dir()):
        program_path = case_dir / "program.txt"
        expect_path = case_dir / "expect.toml"
        if not program_path.exists() or not expect_path.exists():
            raise CorpusError(f"{case_dir.name}: incomplete case directory")
        program = program_path.read_text()
        meta = _toml.loads(expect_path.read_text())
        expected = meta.get("verdict")
        if expected not in ("accept", "reject"):
            raise CorpusError(f"{case_dir.name}: verdict must be accept or reject")
        reason = meta.get("reason")
        note = meta.get("note", "")
        fix = meta.get("fix", {})
        fix_program = fix.get("program")
        fix_note = fix.get("note")
        if expected == "reject":
            if reason not in REJECTION_REASONS:
                raise CorpusError(f"{case_dir.name}: bad rejection reason {reason!r}")
            if not fix_program:
                raise CorpusError(f"{case_dir.name}: reject case lacks a minimal fix")
        elif reason is not None:
            raise CorpusError(f"{case_dir.name}: accept case carries a rejection reason")
        normalized = normalize_whitespace(program)
        stray = set(normalized) - set(ALPHABET)
        if stray:
            raise CorpusError(f"{case_dir.name}: characters outside the alphabet: {sorted(stray)}")
        cases.append(
            CorpusCase(
                name=case_dir.name,
                program=program,
                expected=expected,
                reason=reason,
                note=note,
                fix_program=fix_program,
                fix_note=fix_note,
                path=case_dir,
            )
        )
    if not cases:
        raise CorpusError(f"no corpus cases under {directory}")
    return cases


# ---------------------------------------------------------------------------
# Benchmark input family.


def return_sum_program(n_terms: int) -> str:
    """main(x) { return x+x+...+x; } with the given number of summands."""
    if n_terms < 1:
        raise ValueError("need at least one summand")
    return "main(x) { return " + "+".join(["x"] * n_terms) + "; }"
