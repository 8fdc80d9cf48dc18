"""Bounded ambiguity detection, witness-driven over supplied inputs.

Two requirements are checked for every substring of every input:

  I. rule choice: no two distinct rules of one nonterminal may be
     simultaneously satisfied (all positive conjunct concatenations hold,
     no negative one does);
  II. split uniqueness: every conjunct body occurring in the grammar,
     positive or negative alike, admits at most one partition of the
     substring into its symbols' languages.

This is a detector, not a decision procedure: an empty finding list means
no witness among the inputs, not a proof of unambiguity.

Span truths come from the table recognizer (two-valued; agreement with the
reference semantics is property-tested separately). Partition counting is
saturating matrix arithmetic: entries are capped at 2, which is exact for
the at-most-one question.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import Conjunct, Grammar, Rule, Symbol
from .cyk import recognize
from .normalize import BinaryGrammar, binarize


@dataclass(frozen=True)
class AmbiguityFinding:
    kind: str  # "rule-choice" | "split"
    site: str  # nonterminal name, or the conjunct body
    witness: str
    detail: tuple[str, str]  # the two rules, or the two partitions
    span: tuple[int, int]
    input_index: int

    def key(self) -> tuple:
        return (self.kind, self.site, self.witness)

    def __str__(self) -> str:
        a, b = self.detail
        return (
            f"{self.kind} at {self.site}: witness {self.witness!r} "
            f"(span {self.span}): {a}  /  {b}"
        )


def _body_text(body: tuple[Symbol, ...]) -> str:
    return " ".join(str(s) for s in body) if body else "eps"


def _bit(packed: np.ndarray, flat_index: int) -> bool:
    return bool(packed[flat_index >> 3] & (0x80 >> (flat_index & 7)))


class _InputChecker:
    def __init__(self, g: Grammar, bg: BinaryGrammar, text: str, input_index: int):
        self.g = g
        self.text = text
        self.input_index = input_index
        self.n = len(text)
        table = recognize(bg, text)
        m = self.n + 1

        # boolean span matrix per symbol; diagonal from nullability
        self.mats: dict[tuple[str, str], np.ndarray] = {}
        idx = {name: k for k, name in enumerate(table.nts)}
        for name in g.nonterminals:
            mat = np.zeros((m, m), dtype=bool)
            k = idx[name]
            for i in range(self.n):
                row = mat[i]
                for j in range(i + 1, m):
                    if table.rows[i * m + j] >> k & 1:
                        row[j] = True
            if name in bg.nullable:
                np.fill_diagonal(mat, True)
            self.mats[("n", name)] = mat
        for c in set(text):
            mat = np.zeros((m, m), dtype=bool)
            for i, ch in enumerate(text):
                if ch == c:
                    mat[i, i + 1] = True
            self.mats[("t", c)] = mat

        self._counts: dict[tuple, np.ndarray] = {}  # body -> capped counts (float32)

    def _symbol_matrix(self, sym: Symbol) -> np.ndarray:
        key = (sym.kind, sym.value)
        mat = self.mats.get(key)
        if mat is None:  # terminal absent from this input
            mat = np.zeros((self.n + 1, self.n + 1), dtype=bool)
            self.mats[key] = mat
        return mat

    def counts(self, body: tuple[Symbol, ...]) -> np.ndarray:
        """Partition counts per span, saturated at 2."""
        key = tuple((s.kind, s.value) for s in body)
        cached = self._counts.get(key)
        if cached is not None:
            return cached
        m = self.n + 1
        if not body:
            out = np.zeros((m, m), dtype=np.float32)
            np.fill_diagonal(out, 1.0)
        else:
            out = self._symbol_matrix(body[0]).astype(np.float32)
            for sym in body[1:]:
                out = out @ self._symbol_matrix(sym).astype(np.float32)
                np.clip(out, 0.0, 2.0, out=out)
        self._counts[key] = out
        return out

    def partitions(self, body: tuple[Symbol, ...], i: int, j: int, limit: int = 2):
        """Up to ``limit`` partitions (tuples of substrings), leftmost first."""
        out: list[tuple[str, ...]] = []

        def rec(pos: int, t: int, parts: list[str]) -> bool:
            if t == len(body):
                if pos == j:
                    out.append(tuple(parts))
                    return len(out) >= limit
                return False
            mat = self._symbol_matrix(body[t])
            for q in range(pos, j + 1):
                if mat[pos, q]:
                    parts.append(self.text[pos:q])
                    if rec(q, t + 1, parts):
                        return True
                    parts.pop()
            return False

        rec(i, 0, [])
        return out

    def rule_satisfied(self, rule: Rule, i: int, j: int) -> bool:
        m = self.n + 1
        for conj in rule.conjuncts:
            cnt = self.counts(conj.body)[i, j]
            if conj.positive and cnt < 1:
                return False
            if not conj.positive and cnt >= 1:
                return False
        return True


def check_ambiguity(
    g: Grammar,
    inputs: Iterable[str],
    bg: Optional[BinaryGrammar] = None,
) -> list[AmbiguityFinding]:
    """Findings for both ambiguity requirements over every substring of
    every input, deduplicated by (kind, site, witness)."""
    bg = binarize(g) if bg is None else bg
    findings: list[AmbiguityFinding] = []
    seen: set[tuple] = set()

    bodies: dict[tuple, tuple[Symbol, ...]] = {}
    for rule in g.rules:
        for conj in rule.conjuncts:
            if len(conj.body) >= 2:
                bodies.setdefault(tuple((s.kind, s.value) for s in conj.body), conj.body)

    rules_by_head: dict[str, list[Rule]] = {}
    for rule in g.rules:
        rules_by_head.setdefault(rule.head, []).append(rule)

    for input_index, text in enumerate(inputs):
        checker = _InputChecker(g, bg, text, input_index)
        m = checker.n + 1

        # clause II: split uniqueness per distinct conjunct body
        for body in bodies.values():
            cnt = checker.counts(body)
            hot = np.argwhere(cnt >= 2.0)
            for i, j in hot:
                parts = checker.partitions(body, int(i), int(j))
                if len(parts) < 2:
                    continue  # saturation artifact is impossible, but stay safe
                witness = text[int(i) : int(j)]
                site = _body_text(body)
                key = ("split", site, witness)
                if key in seen:
                    continue
                seen.add(key)
                findings.append(
                    AmbiguityFinding(
                        "split",
                        site,
                        witness,
                        (" | ".join(repr(p) for p in parts[0]), " | ".join(repr(p) for p in parts[1])),
                        (int(i), int(j)),
                        input_index,
                    )
                )

        # clause I: rule-choice disjointness per nonterminal
        for head, rules in rules_by_head.items():
            if len(rules) < 2:
                continue
            first = np.zeros((m, m), dtype=bool)
            second = np.zeros((m, m), dtype=bool)
            for rule in rules:
                sat = np.ones((m, m), dtype=bool)
                for conj in rule.conjuncts:
                    cnt = checker.counts(conj.body)
                    sat &= (cnt >= 1.0) if conj.positive else (cnt < 1.0)
                second |= first & sat
                first |= sat
            for i, j in np.argwhere(second):
                witness = text[int(i) : int(j)]
                key = ("rule-choice", head, witness)
                if key in seen:
                    continue
                seen.add(key)
                hits = [r for r in rules if checker.rule_satisfied(r, int(i), int(j))]
                findings.append(
                    AmbiguityFinding(
                        "rule-choice",
                        head,
                        witness,
                        (str(hits[0]), str(hits[1])),
                        (int(i), int(j)),
                        input_index,
                    )
                )
    return findings
