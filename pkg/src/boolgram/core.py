"""Grammar representation and structural analysis.

A grammar here is the Boolean kind: every rule is a set of signed conjuncts,
each conjunct a (possibly empty) sequence of terminals and nonterminals.
Ordinary and conjunctive grammars are the special cases with no negative
conjuncts (and, for ordinary, a single conjunct per rule).

Values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

ORDINARY = "ordinary"
CONJUNCTIVE = "conjunctive"
BOOLEAN = "boolean"


class BoolgramError(Exception):
    """Base class for errors raised by this package."""


@dataclass(frozen=True)
class Origin:
    """Source location attached to rules and diagnostics."""

    path: str
    line: int

    def __str__(self) -> str:
        return f"{self.path}:{self.line}"


@dataclass(frozen=True)
class Symbol:
    """One occurrence of a terminal character or a nonterminal name."""

    kind: str  # "t" or "n"
    value: str

    def __post_init__(self) -> None:
        if self.kind not in ("t", "n"):
            raise ValueError(f"bad symbol kind {self.kind!r}")
        if self.kind == "t" and len(self.value) != 1:
            raise ValueError(f"terminal must be a single character, got {self.value!r}")

    @property
    def is_terminal(self) -> bool:
        return self.kind == "t"

    def __str__(self) -> str:
        if self.kind == "t":
            c = self.value.replace("\\", "\\\\").replace("'", "\\'")
            return f"'{c}'"
        return self.value


def term(c: str) -> Symbol:
    return Symbol("t", c)


def nonterm(name: str) -> Symbol:
    return Symbol("n", name)


@dataclass(frozen=True)
class Conjunct:
    """A signed concatenation; an empty body is the epsilon conjunct."""

    positive: bool
    body: tuple[Symbol, ...]

    @property
    def is_epsilon(self) -> bool:
        return not self.body

    def __str__(self) -> str:
        text = " ".join(str(s) for s in self.body) if self.body else "eps"
        return text if self.positive else f"~ {text}"


@dataclass(frozen=True)
class Rule:
    """One rule: head plus a nonempty ordered conjunct list.

    Conjunct order is preserved; the parse-DAG extractor and the canonical
    printer rely on it.
    """

    head: str
    conjuncts: tuple[Conjunct, ...]
    origin: Optional[Origin] = None

    def __str__(self) -> str:
        return f"{self.head} -> " + " & ".join(str(c) for c in self.conjuncts)

    def key(self) -> tuple:
        """Structural identity, ignoring the origin."""
        return (self.head, self.conjuncts)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str
    origin: Optional[Origin] = None

    def __str__(self) -> str:
        where = f"{self.origin}: " if self.origin else ""
        return f"{where}{self.severity}: {self.message}"


@dataclass(frozen=True)
class Grammar:
    """An immutable grammar over an explicit, ordered alphabet.

    ``nonterminals`` is ordered (declaration order); ``start`` must be a
    member. Terminals outside ``alphabet`` are validation errors, never
    silently added.
    """

    name: str
    alphabet: tuple[str, ...]
    nonterminals: tuple[str, ...]
    rules: tuple[Rule, ...]
    start: str

    def __post_init__(self) -> None:
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet contains duplicate characters")
        if len(set(self.nonterminals)) != len(self.nonterminals):
            raise ValueError("duplicate nonterminal declarations")

    @property
    def classification(self) -> str:
        has_negative = False
        multi_positive = False
        for rule in self.rules:
            npos = sum(1 for c in rule.conjuncts if c.positive)
            nneg = len(rule.conjuncts) - npos
            if nneg:
                has_negative = True
            if npos != 1:
                multi_positive = True
        if has_negative:
            return BOOLEAN
        if multi_positive:
            return CONJUNCTIVE
        return ORDINARY

    def rules_for(self, head: str) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.head == head)

    def symbols_used(self) -> set[Symbol]:
        used: set[Symbol] = set()
        for rule in self.rules:
            for conj in rule.conjuncts:
                used.update(conj.body)
        return used


def grammar(
    rules: Iterable[Rule],
    alphabet: Iterable[str],
    start: str,
    name: str = "g",
    extra_nonterminals: Iterable[str] = (),
) -> Grammar:
    """Convenience constructor: nonterminals are the rule heads in first-use
    order, plus any extra (possibly rule-less) names."""
    rules = tuple(rules)
    nts: list[str] = []
    seen = set()
    for r in rules:
        if r.head not in seen:
            seen.add(r.head)
            nts.append(r.head)
    for name_ in extra_nonterminals:
        if name_ not in seen:
            seen.add(name_)
            nts.append(name_)
    if start not in seen:
        nts.append(start)
    return Grammar(name, tuple(alphabet), tuple(nts), rules, start)


def validate(g: Grammar) -> list[Diagnostic]:
    """Structural well-formedness check.

    Returns an empty list iff the grammar is well-formed. Duplicate rules
    are reported as warnings, not errors.
    """
    out: list[Diagnostic] = []
    if not g.alphabet:
        out.append(Diagnostic("error", "alphabet is empty"))
    declared = set(g.nonterminals)
    if g.start not in declared:
        out.append(Diagnostic("error", f"start symbol {g.start} is not declared"))
    alpha = set(g.alphabet)
    for rule in g.rules:
        if rule.head not in declared:
            out.append(Diagnostic("error", f"rule head {rule.head} is not declared", rule.origin))
        if not rule.conjuncts:
            out.append(Diagnostic("error", "rule must have at least one conjunct", rule.origin))
        for conj in rule.conjuncts:
            for sym in conj.body:
                if sym.is_terminal and sym.value not in alpha:
                    out.append(
                        Diagnostic(
                            "error",
                            f"terminal {sym} is not in the declared alphabet",
                            rule.origin,
                        )
                    )
                elif not sym.is_terminal and sym.value not in declared:
                    out.append(
                        Diagnostic(
                            "error",
                            f"unresolved nonterminal {sym.value}",
                            rule.origin,
                        )
                    )
    seen_rules: set[tuple] = set()
    for rule in g.rules:
        k = rule.key()
        if k in seen_rules:
            out.append(Diagnostic("warning", f"duplicate rule: {rule}", rule.origin))
        seen_rules.add(k)
    return out


def errors(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


def classify(g: Grammar) -> str:
    return g.classification


@dataclass(frozen=True)
class ReachabilityReport:
    unreachable: frozenset[str]
    unproductive: frozenset[str]
    probe_length: int


def reachability_report(g: Grammar, probe_length: int = 6, budget: int | None = None) -> ReachabilityReport:
    """Hygiene analysis: unreachable and (probe-bounded) unproductive symbols.

    Productivity is decided on the positive-conjunct skeleton only: negative
    conjuncts are dropped before probing, so a symbol counted productive here
    may still have an empty language in the full grammar. The probe runs the
    oracle up to ``probe_length``.
    """
    from . import oracle  # local import: oracle depends on core

    reach: set[str] = set()
    frontier = [g.start]
    by_head: dict[str, list[Rule]] = {}
    for r in g.rules:
        by_head.setdefault(r.head, []).append(r)
    while frontier:
        a = frontier.pop()
        if a in reach:
            continue
        reach.add(a)
        for r in by_head.get(a, ()):
            for conj in r.conjuncts:
                for sym in conj.body:
                    if not sym.is_terminal and sym.value not in reach:
                        frontier.append(sym.value)
    unreachable = frozenset(set(g.nonterminals) - reach)

    skeleton_rules = []
    for r in g.rules:
        pos = tuple(c for c in r.conjuncts if c.positive)
        if pos:
            skeleton_rules.append(Rule(r.head, pos, r.origin))
    skeleton = Grammar(g.name + "-skeleton", g.alphabet, g.nonterminals, tuple(skeleton_rules), g.start)
    kwargs = {} if budget is None else {"budget": budget}
    facts = oracle.evaluate_layered(skeleton, g.alphabet, probe_length, **kwargs)
    unproductive = frozenset(
        nt for nt in g.nonterminals if not any(facts.truth(nt, w) for w in facts.strings())
    )
    return ReachabilityReport(unreachable, unproductive, probe_length)
