"""Span-stratified binary form for the table recognizer.

Binarization rewrites every conjunct body into one of: epsilon, a single
terminal, a single nonterminal, or a pair of nonterminals. Terminals in
multi-symbol bodies are replaced by fresh single-rule nonterminals; longer
bodies are right-folded through fresh nonterminals named by a stable hash of
the folded suffix, so identical suffixes share one nonterminal and repeated
runs produce byte-identical output. Languages of all original nonterminals
are unchanged.

Unit conjuncts and pairs with a nullable side make a span's value depend on
the same span; those dependencies form the signed unit graph. The recognizer
resolves each span by processing the graph's strongly connected components
in dependency order, taking a least fixpoint inside each component. A
negative edge inside a component would make that unsound, so construction
fails on it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

from . import oracle
from .core import BoolgramError, Conjunct, Grammar, Rule, Symbol, nonterm, term

FRESH_TERM_PREFIX = "__bin_t_"
FRESH_FOLD_PREFIX = "__bin_f_"


class NormalizeError(BoolgramError):
    pass


def _fresh_terminal_name(c: str) -> str:
    if c.isalnum():
        return FRESH_TERM_PREFIX + c
    return FRESH_TERM_PREFIX + "x%02x" % ord(c)


def _fresh_fold_name(suffix: tuple[Symbol, ...]) -> str:
    text = "\x00".join(f"{s.kind}:{s.value}" for s in suffix)
    digest = hashlib.sha256(text.encode()).hexdigest()[:12]
    return FRESH_FOLD_PREFIX + digest


@dataclass(frozen=True)
class BinaryGrammar:
    """Binarized grammar plus the analyses the recognizer needs."""

    grammar: Grammar  # every conjunct body has length <= 2; pairs are nonterminal-only
    base: Grammar
    nullable: frozenset[str]
    # signed same-span dependency edges (head, dep, positive)
    unit_edges: tuple[tuple[str, str, bool], ...]
    # strongly connected components, dependencies first
    scc_order: tuple[tuple[str, ...], ...]
    eps_true: frozenset[str]  # nonterminals whose language contains epsilon (= nullable)


def binarize(g: Grammar) -> BinaryGrammar:
    from .core import errors, validate

    if errors(validate(g)):
        raise NormalizeError("grammar does not validate; run validate() for diagnostics")

    for rule in g.rules:
        if not any(c.positive for c in rule.conjuncts):
            raise NormalizeError(
                f"rule with no positive conjunct is not supported by the recognizer: {rule}"
            )

    fresh_rules: dict[str, Rule] = {}
    fresh_order: list[str] = []

    def fresh(name: str, rule: Rule) -> str:
        if name not in fresh_rules:
            fresh_rules[name] = rule
            fresh_order.append(name)
        return name

    def term_nt(c: str) -> str:
        name = _fresh_terminal_name(c)
        return fresh(name, Rule(name, (Conjunct(True, (term(c),)),)))

    def fold(symbols: tuple[Symbol, ...]) -> tuple[Symbol, ...]:
        # symbols are all nonterminals here, length >= 2
        if len(symbols) == 2:
            return symbols
        suffix = symbols[1:]
        name = _fresh_fold_name(suffix)
        if name not in fresh_rules:
            fresh(name, Rule(name, (Conjunct(True, fold(suffix)),)))
        return (symbols[0], nonterm(name))

    new_rules: list[Rule] = []
    for rule in g.rules:
        conjuncts = []
        for conj in rule.conjuncts:
            body = conj.body
            if len(body) <= 1:
                conjuncts.append(conj)
                continue
            lifted = tuple(
                nonterm(term_nt(s.value)) if s.is_terminal else s for s in body
            )
            conjuncts.append(Conjunct(conj.positive, fold(lifted)))
        new_rules.append(Rule(rule.head, tuple(conjuncts), rule.origin))
    for name in fresh_order:
        new_rules.append(fresh_rules[name])

    nts = list(g.nonterminals) + [n for n in fresh_order]
    bg = Grammar(g.name, g.alphabet, tuple(nts), tuple(new_rules), g.start)

    eps_facts = oracle.evaluate_layered(bg, bg.alphabet, 0)
    if eps_facts.verdict != "ok":
        raise NormalizeError("nullability analysis left unknowns undetermined")
    nullable = frozenset(nt for nt in bg.nonterminals if eps_facts.truth(nt, ""))

    edges: set[tuple[str, str, bool]] = set()
    for rule in bg.rules:
        for conj in rule.conjuncts:
            body = conj.body
            if len(body) == 1 and not body[0].is_terminal:
                edges.add((rule.head, body[0].value, conj.positive))
            elif len(body) == 2:
                b, c = body[0].value, body[1].value
                if c in nullable:
                    edges.add((rule.head, b, conj.positive))
                if b in nullable:
                    edges.add((rule.head, c, conj.positive))

    sccs = _tarjan(bg.nonterminals, edges)
    comp_of = {}
    for k, comp in enumerate(sccs):
        for name in comp:
            comp_of[name] = k
    for head, dep, positive in edges:
        if not positive and comp_of[head] == comp_of[dep]:
            cycle = sccs[comp_of[head]]
            raise NormalizeError(
                "negative same-span dependency closes a cycle through "
                + ", ".join(sorted(cycle))
            )

    return BinaryGrammar(
        grammar=bg,
        base=g,
        nullable=nullable,
        unit_edges=tuple(sorted(edges)),
        scc_order=tuple(tuple(c) for c in sccs),
        eps_true=nullable,
    )


def _tarjan(
    nodes: Iterable[str], edges: set[tuple[str, str, bool]]
) -> list[tuple[str, ...]]:
    """SCCs emitted dependencies-first (a component appears after everything
    it points to)."""
    adj: dict[str, list[str]] = {n: [] for n in nodes}
    for head, dep, _sign in edges:
        adj[head].append(dep)
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[tuple[str, ...]] = []
    counter = [0]

    for root in adj:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack.add(node)
            recurse = False
            neighbors = adj[node]
            while ei < len(neighbors):
                nxt = neighbors[ei]
                ei += 1
                if nxt not in index:
                    work.append((node, ei))
                    work.append((nxt, 0))
                    recurse = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if recurse:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    x = stack.pop()
                    on_stack.discard(x)
                    comp.append(x)
                    if x == node:
                        break
                out.append(tuple(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return out


@dataclass(frozen=True)
class GrammarStats:
    name: str
    nonterminals: int
    rules: int
    positive_conjuncts: int
    negative_conjuncts: int
    terminals_used: int
    alphabet_size: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "nonterminals": self.nonterminals,
            "rules": self.rules,
            "positive_conjuncts": self.positive_conjuncts,
            "negative_conjuncts": self.negative_conjuncts,
            "terminals_used": self.terminals_used,
            "alphabet_size": self.alphabet_size,
        }


def stats(g: Grammar) -> GrammarStats:
    """Exact counts after template expansion, before binarization."""
    pos = sum(1 for r in g.rules for c in r.conjuncts if c.positive)
    neg = sum(1 for r in g.rules for c in r.conjuncts if not c.positive)
    terms = {s.value for s in g.symbols_used() if s.is_terminal}
    return GrammarStats(
        name=g.name,
        nonterminals=len(g.nonterminals),
        rules=len(g.rules),
        positive_conjuncts=pos,
        negative_conjuncts=neg,
        terminals_used=len(terms),
        alphabet_size=len(g.alphabet),
    )
