"""Deterministic finite automata and their right-linear grammar encoding.

Used to express regular token sets (identifiers minus keywords, identifiers
other than one word) without negation: one nonterminal per useful state, one
rule per transition, and a termination rule at each accepting state, either
into a suffix nonterminal or epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .core import BoolgramError, Conjunct, Rule, nonterm, term


class DfaError(BoolgramError):
    pass


@dataclass(frozen=True)
class DfaSpec:
    """Total deterministic automaton over an explicit character set."""

    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    charset: tuple[str, ...]
    transitions: dict[tuple[str, str], str]

    def validate(self) -> None:
        states = set(self.states)
        if self.initial not in states:
            raise DfaError(f"initial state {self.initial!r} not declared")
        if not self.accepting <= states:
            raise DfaError("accepting set contains undeclared states")
        for s in self.states:
            for c in self.charset:
                t = self.transitions.get((s, c))
                if t is None:
                    raise DfaError(f"transition table not total: missing ({s!r}, {c!r})")
                if t not in states:
                    raise DfaError(f"transition to undeclared state {t!r}")
        if len(self.transitions) != len(self.states) * len(self.charset):
            raise DfaError("transition table has entries outside states x charset")

    def accepts(self, word: str) -> bool:
        s = self.initial
        for c in word:
            if c not in set(self.charset):
                return False
            s = self.transitions[(s, c)]
        return s in self.accepting


def minimize(dfa: DfaSpec) -> DfaSpec:
    """Partition refinement; also drops states unreachable from the start."""
    dfa.validate()
    reachable = {dfa.initial}
    work = [dfa.initial]
    while work:
        s = work.pop()
        for c in dfa.charset:
            t = dfa.transitions[(s, c)]
            if t not in reachable:
                reachable.add(t)
                work.append(t)
    states = [s for s in dfa.states if s in reachable]

    # refine {accepting, rejecting} until transitions respect the partition
    block: dict[str, int] = {s: (0 if s in dfa.accepting else 1) for s in states}
    while True:
        signature = {
            s: (block[s], tuple(block[dfa.transitions[(s, c)]] for c in dfa.charset))
            for s in states
        }
        renumber: dict[tuple, int] = {}
        new_block = {}
        for s in states:
            sig = signature[s]
            if sig not in renumber:
                renumber[sig] = len(renumber)
            new_block[s] = renumber[sig]
        if new_block == block:
            break
        block = new_block

    # canonical names in BFS order from the initial block
    rep: dict[int, str] = {}
    for s in states:
        rep.setdefault(block[s], s)
    order = []
    seen = set()
    queue = [block[dfa.initial]]
    while queue:
        b = queue.pop(0)
        if b in seen:
            continue
        seen.add(b)
        order.append(b)
        for c in dfa.charset:
            queue.append(block[dfa.transitions[(rep[b], c)]])
    names = {b: f"q{k}" for k, b in enumerate(order)}
    transitions = {
        (names[b], c): names[block[dfa.transitions[(rep[b], c)]]]
        for b in order
        for c in dfa.charset
    }
    accepting = frozenset(names[b] for b in order if rep[b] in dfa.accepting)
    return DfaSpec(
        states=tuple(names[b] for b in order),
        initial=names[block[dfa.initial]],
        accepting=accepting,
        charset=dfa.charset,
        transitions=transitions,
    )


def dfa_to_rules(
    dfa: DfaSpec, name_prefix: str, suffix_nonterminal: Optional[str] = None
) -> tuple[list[Rule], dict[str, str]]:
    """Right-linear rules simulating the automaton.

    One nonterminal per useful state (reachable and able to reach an
    accepting state), a rule per transition between useful states, and a
    termination rule at each accepting state: into ``suffix_nonterminal``
    when given, an epsilon rule otherwise. The start-state nonterminal then
    derives exactly L(dfa) concatenated with the suffix's language.

    Returns the rules and the state -> nonterminal name map.
    """
    dfa.validate()

    reachable = {dfa.initial}
    work = [dfa.initial]
    while work:
        s = work.pop()
        for c in dfa.charset:
            t = dfa.transitions[(s, c)]
            if t not in reachable:
                reachable.add(t)
                work.append(t)
    # states that can reach acceptance (drop dead sinks and their rules)
    inverse: dict[str, set[str]] = {s: set() for s in dfa.states}
    for (s, c), t in dfa.transitions.items():
        inverse[t].add(s)
    useful = set(dfa.accepting)
    work = list(dfa.accepting)
    while work:
        t = work.pop()
        for s in inverse[t]:
            if s not in useful:
                useful.add(s)
                work.append(s)
    useful &= reachable
    if dfa.initial not in useful:
        raise DfaError("automaton accepts nothing; refusing to emit rules")

    order = [s for s in dfa.states if s in useful]
    names = {s: f"{name_prefix}-{k}" for k, s in enumerate(order)}
    rules: list[Rule] = []
    for s in order:
        for c in dfa.charset:
            t = dfa.transitions[(s, c)]
            if t in useful:
                rules.append(
                    Rule(names[s], (Conjunct(True, (term(c), nonterm(names[t]))),))
                )
        if s in dfa.accepting:
            body = (nonterm(suffix_nonterminal),) if suffix_nonterminal else ()
            rules.append(Rule(names[s], (Conjunct(True, body),)))
    return rules, names


def identifier_dfa(
    letters: Iterable[str], digits: Iterable[str], excluded_words: Iterable[str]
) -> DfaSpec:
    """Identifiers (a letter followed by letters/digits) minus the given
    words, as a minimized total DFA over letters+digits.

    Built as the product of the shape automaton with the complement of the
    word trie, then minimized; callers interested in the state count should
    look at ``len(result.states)``.
    """
    letters = tuple(letters)
    digits = tuple(digits)
    charset = letters + digits
    words = sorted(set(excluded_words))
    for word in words:
        if not word or word[0] not in letters or any(c not in charset for c in word):
            raise DfaError(f"excluded word {word!r} is not an identifier")

    prefixes = {""}
    for word in words:
        for k in range(1, len(word) + 1):
            prefixes.add(word[:k])
    word_set = set(words)

    # states: "" (nothing read), each trie prefix, plus other-identifier and dead
    OTHER = "\x00other"
    DEAD = "\x00dead"
    states = [""] + sorted(p for p in prefixes if p) + [OTHER, DEAD]
    transitions: dict[tuple[str, str], str] = {}
    for c in charset:
        transitions[("", c)] = (c if c in prefixes else OTHER) if c in letters else DEAD
        transitions[(OTHER, c)] = OTHER
        transitions[(DEAD, c)] = DEAD
    for p in prefixes:
        if not p:
            continue
        for c in charset:
            nxt = p + c
            transitions[(p, c)] = nxt if nxt in prefixes else OTHER
    accepting = frozenset(
        [OTHER] + [p for p in prefixes if p and p not in word_set]
    )
    dfa = DfaSpec(
        states=tuple(states),
        initial="",
        accepting=accepting,
        charset=charset,
        transitions=transitions,
    )
    return minimize(dfa)
