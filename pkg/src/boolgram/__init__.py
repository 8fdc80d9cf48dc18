"""boolgram: a toolkit for conjunctive and Boolean grammars.

Pieces: an in-memory grammar representation with validation (`core`), a text
format with rule-family templates and a DFA-to-rules generator (`dsl`,
`dfa`), bounded reference semantics by language-equation evaluation
(`oracle`), a span-stratified binarizer (`normalize`), a cubic table
recognizer with parse-DAG extraction (`cyk`), a bounded ambiguity checker
(`ambiguity`), the model programming language grammars and program corpus
(`modellang`), and a command-line front end (`cli`).
"""

from .core import (
    BOOLEAN,
    CONJUNCTIVE,
    ORDINARY,
    BoolgramError,
    Conjunct,
    Diagnostic,
    Grammar,
    Origin,
    Rule,
    Symbol,
    classify,
    grammar,
    nonterm,
    reachability_report,
    term,
    validate,
)
from .dsl import DslError, dsl_parse, dsl_print

__version__ = "0.1.0"

__all__ = [
    "BOOLEAN",
    "CONJUNCTIVE",
    "ORDINARY",
    "BoolgramError",
    "Conjunct",
    "Diagnostic",
    "DslError",
    "Grammar",
    "Origin",
    "Rule",
    "Symbol",
    "classify",
    "dsl_parse",
    "dsl_print",
    "grammar",
    "nonterm",
    "reachability_report",
    "term",
    "validate",
]
