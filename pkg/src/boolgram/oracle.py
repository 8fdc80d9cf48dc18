"""Reference semantics by bounded evaluation of the language-equation system.

Every nonterminal A induces an equation: the union, over its rules, of the
intersection of the positive conjuncts' concatenations with the complements
of the negative ones. This module evaluates that system layer by layer
(layer = string length), three-valued: a fact (A, w) becomes true when some
rule is definitely satisfied, false when every rule is definitely refuted,
and stays unknown otherwise. Unknowns that survive the fixpoint are resolved
by brute force over all true/false assignments; zero consistent assignments,
or several with no pointwise-least one, makes the grammar invalid.

The check is sound but incomplete: a grammar may be rejected (or reported
undetermined) even though a more refined semantics would accept it. All
shipped grammars resolve with no residual unknowns except the degenerate
fixtures used to exercise the validity gate itself.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .core import BoolgramError, Conjunct, Grammar, Rule, Symbol

UNKNOWN = 0
TRUE = 1
FALSE = 2

DEFAULT_BUDGET = 2_000_000
MAX_ISLAND_UNKNOWNS = 20


def default_budget() -> int:
    raw = os.environ.get("BOOLGRAM_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_BUDGET


class BudgetExceededError(BoolgramError):
    """Requested enumeration is larger than the configured budget."""


class InvalidGrammarError(BoolgramError):
    """The equation system has no solution, or several, at some layer."""

    def __init__(self, layer, island, consistent_count: int, detail: str = ""):
        self.layer = layer
        self.island = island
        self.consistent_count = consistent_count
        what = "no consistent assignment" if consistent_count == 0 else (
            f"{consistent_count} consistent assignments with no least one"
        )
        super().__init__(
            f"grammar invalid at layer {layer!r} ({island!r}): {what}"
            + (f"; {detail}" if detail else "")
        )


class UndeterminedError(BoolgramError):
    """Too many residual unknowns to resolve; no verdict is issued."""


# ---------------------------------------------------------------------------
# Compiled form shared by both evaluators.


class _Compiled:
    def __init__(self, g: Grammar):
        self.grammar = g
        self.nts = g.nonterminals
        self.idx = {name: i for i, name in enumerate(self.nts)}
        bodies: dict[tuple[Symbol, ...], int] = {}
        self.body_list: list[tuple[Symbol, ...]] = []

        def body_id(body: tuple[Symbol, ...]) -> int:
            if body not in bodies:
                bodies[body] = len(self.body_list)
                self.body_list.append(body)
            return bodies[body]

        # rules_by_nt[i] = list of (positive body ids, negative body ids, Rule)
        self.rules_by_nt: list[list[tuple[tuple[int, ...], tuple[int, ...], Rule]]] = [
            [] for _ in self.nts
        ]
        for rule in g.rules:
            pos = tuple(body_id(c.body) for c in rule.conjuncts if c.positive)
            neg = tuple(body_id(c.body) for c in rule.conjuncts if not c.positive)
            self.rules_by_nt[self.idx[rule.head]].append((pos, neg, rule))


def _and3(a: int, b: int) -> int:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == UNKNOWN or b == UNKNOWN:
        return UNKNOWN
    return TRUE


def _not3(a: int) -> int:
    if a == TRUE:
        return FALSE
    if a == FALSE:
        return TRUE
    return UNKNOWN


# ---------------------------------------------------------------------------
# String-universe evaluation (full enumeration up to a length bound).


@dataclass
class LayeredFacts:
    """Truth table for (nonterminal, string) up to a length bound.

    ``verdict`` is "ok" when every fact up to ``max_len`` was determined,
    "undetermined" when resolution was abandoned at ``undetermined_at``.
    """

    alphabet: tuple[str, ...]
    max_len: int
    nts: tuple[str, ...]
    verdict: str = "ok"
    undetermined_at: Optional[tuple[int, str]] = None
    _idx: dict[str, int] = field(default_factory=dict)
    _facts: dict[str, bytearray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._idx = {name: i for i, name in enumerate(self.nts)}

    def status(self, nt: str, w: str) -> int:
        row = self._facts.get(w)
        if row is None:
            raise KeyError(f"string {w!r} was not evaluated")
        return row[self._idx[nt]]

    def truth(self, nt: str, w: str) -> Optional[bool]:
        s = self.status(nt, w)
        return None if s == UNKNOWN else s == TRUE

    def strings(self) -> Iterable[str]:
        return self._facts.keys()


def _check_budget(alphabet_size: int, max_len: int, budget: int) -> None:
    total = 0
    power = 1
    for _ in range(max_len + 1):
        total += power
        if total > budget:
            raise BudgetExceededError(
                f"enumeration of {alphabet_size}^<= {max_len} strings exceeds budget {budget}"
            )
        power *= alphabet_size


def evaluate_layered(
    g: Grammar,
    alphabet: Iterable[str] | None = None,
    max_len: int = 0,
    budget: int | None = None,
) -> LayeredFacts:
    """Evaluate the equation system for all strings of length <= max_len."""
    alphabet = tuple(alphabet) if alphabet is not None else g.alphabet
    extra = set(alphabet) - set(g.alphabet)
    if extra:
        raise ValueError(f"enumeration alphabet not within grammar alphabet: {sorted(extra)}")
    budget = default_budget() if budget is None else budget
    _check_budget(max(len(alphabet), 1), max_len, budget)

    comp = _Compiled(g)
    facts = LayeredFacts(alphabet, max_len, comp.nts)
    store = facts._facts

    def lookup(nt_i: int, s: str) -> int:
        row = store.get(s)
        return FALSE if row is None else row[nt_i]

    def body_status(body: tuple[Symbol, ...], w: str) -> int:
        # frontier: position -> 1 (definitely reachable) or 0 (maybe); dead
        # positions are absent. Merging keeps the stronger status.
        frontier = {0: 1}
        n = len(w)
        for sym in body:
            new: dict[int, int] = {}
            if sym.is_terminal:
                c = sym.value
                for p, st in frontier.items():
                    if p < n and w[p] == c:
                        if new.get(p + 1, -1) < st:
                            new[p + 1] = st
            else:
                nt_i = comp.idx[sym.value]
                for p, st in frontier.items():
                    for q in range(p, n + 1):
                        v = lookup(nt_i, w[p:q])
                        if v == FALSE:
                            continue
                        combined = 1 if (st == 1 and v == TRUE) else 0
                        if new.get(q, -1) < combined:
                            new[q] = combined
            frontier = new
            if not frontier:
                return FALSE
        end = frontier.get(len(w))
        if end is None:
            return FALSE
        return TRUE if end == 1 else UNKNOWN

    def fact_value(nt_i: int, w: str) -> int:
        value = FALSE
        for pos, neg, _rule in comp.rules_by_nt[nt_i]:
            rv = TRUE
            for b in pos:
                rv = _and3(rv, body_status(comp.body_list[b], w))
                if rv == FALSE:
                    break
            if rv != FALSE:
                for b in neg:
                    rv = _and3(rv, _not3(body_status(comp.body_list[b], w)))
                    if rv == FALSE:
                        break
            if rv == TRUE:
                return TRUE
            if rv == UNKNOWN:
                value = UNKNOWN
        return value

    n_nts = len(comp.nts)
    for length in range(max_len + 1):
        layer = ["".join(t) for t in itertools.product(alphabet, repeat=length)] if length else [""]
        for w in layer:
            store[w] = bytearray(n_nts)
        # three-valued iteration to fixpoint within the layer
        changed = True
        while changed:
            changed = False
            for w in layer:
                row = store[w]
                for nt_i in range(n_nts):
                    if row[nt_i] != UNKNOWN:
                        continue
                    v = fact_value(nt_i, w)
                    if v != UNKNOWN:
                        row[nt_i] = v
                        changed = True
        # resolve residual unknowns string by string (splits of w only ever
        # reference w itself at this length, so strings are independent)
        for w in layer:
            row = store[w]
            unknowns = [i for i in range(n_nts) if row[i] == UNKNOWN]
            if not unknowns:
                continue
            if len(unknowns) > MAX_ISLAND_UNKNOWNS:
                facts.verdict = "undetermined"
                facts.undetermined_at = (length, w)
                return facts
            _resolve_island(
                unknowns,
                row,
                lambda nt_i, w=w: fact_value_two_valued(comp, store, nt_i, w),
                layer=length,
                island=w,
            )
    return facts


def fact_value_two_valued(comp: _Compiled, store: dict[str, bytearray], nt_i: int, w: str) -> bool:
    """Re-evaluate one equation with all facts read as booleans (UNKNOWN -> the
    candidate values already written into the store)."""

    def body_holds(body: tuple[Symbol, ...], w: str) -> bool:
        frontier = {0}
        n = len(w)
        for sym in body:
            new: set[int] = set()
            if sym.is_terminal:
                for p in frontier:
                    if p < n and w[p] == sym.value:
                        new.add(p + 1)
            else:
                i = comp.idx[sym.value]
                for p in frontier:
                    for q in range(p, n + 1):
                        row = store.get(w[p:q])
                        if row is not None and row[i] == TRUE:
                            new.add(q)
            frontier = new
            if not frontier:
                return False
        return len(w) in frontier

    for pos, neg, _rule in comp.rules_by_nt[nt_i]:
        if all(body_holds(comp.body_list[b], w) for b in pos) and not any(
            body_holds(comp.body_list[b], w) for b in neg
        ):
            return True
    return False


def _resolve_island(
    unknowns: list[int],
    row: bytearray,
    equation: Callable[[int], bool],
    layer,
    island,
) -> None:
    """Brute-force the residual unknowns of one independent island.

    A candidate assignment is consistent when re-evaluating every unknown's
    equation (two-valued) reproduces the assignment. Exactly one consistent
    assignment is adopted directly; among several, the pointwise-least one is
    adopted when it exists (the natural reading of the monotone fragment,
    where self-supporting facts like S -> S stay false); otherwise, or with
    none, the grammar is invalid.
    """
    consistent: list[tuple[bool, ...]] = []
    for assignment in itertools.product((False, True), repeat=len(unknowns)):
        for i, val in zip(unknowns, assignment):
            row[i] = TRUE if val else FALSE
        if all(equation(i) == (row[i] == TRUE) for i in unknowns):
            consistent.append(assignment)
    if not consistent:
        for i in unknowns:
            row[i] = UNKNOWN
        raise InvalidGrammarError(layer, island, 0)
    if len(consistent) == 1:
        chosen = consistent[0]
    else:
        # pointwise minimum; adopt only if itself consistent
        least = tuple(min(vals) for vals in zip(*consistent))
        if least not in consistent:
            for i in unknowns:
                row[i] = UNKNOWN
            raise InvalidGrammarError(layer, island, len(consistent))
        chosen = least
    for i, val in zip(unknowns, chosen):
        row[i] = TRUE if val else FALSE


# ---------------------------------------------------------------------------
# Substring-restricted evaluation (membership for one string).


@dataclass
class SpanFacts:
    """Truth table over the spans of one input string."""

    text: str
    nts: tuple[str, ...]
    _idx: dict[str, int] = field(default_factory=dict)
    rows: list[bytearray] = field(default_factory=list)  # indexed i * (n + 1) + j

    def __post_init__(self) -> None:
        self._idx = {name: i for i, name in enumerate(self.nts)}

    def span_id(self, i: int, j: int) -> int:
        return i * (len(self.text) + 1) + j

    def status(self, nt: str, i: int, j: int) -> int:
        return self.rows[self.span_id(i, j)][self._idx[nt]]

    def truth(self, nt: str, i: int, j: int) -> Optional[bool]:
        s = self.status(nt, i, j)
        return None if s == UNKNOWN else s == TRUE


def span_facts(g: Grammar, w: str) -> SpanFacts:
    """Evaluate the equation system restricted to the substrings of ``w``.

    This is sound because every conjunct evaluated on a span only ever
    queries spans inside it (asserted below at runtime), so the restricted
    system is closed. Verdicts agree with full enumeration whenever both
    are feasible.
    """
    bad = set(w) - set(g.alphabet)
    if bad:
        raise ValueError(f"input contains characters outside the alphabet: {sorted(bad)}")
    comp = _Compiled(g)
    n = len(w)
    n_nts = len(comp.nts)
    facts = SpanFacts(w, comp.nts)
    facts.rows = [bytearray(n_nts) for _ in range((n + 1) * (n + 1))]

    # width 0: one evaluation of the empty string, shared by all (i, i)
    eps = evaluate_layered(g, g.alphabet, 0)
    eps_row = bytearray(
        TRUE if eps.truth(nt, "") else FALSE for nt in comp.nts
    )
    for i in range(n + 1):
        facts.rows[facts.span_id(i, i)][:] = eps_row

    def body_status(body: tuple[Symbol, ...], i: int, j: int) -> int:
        frontier = {i: 1}
        for sym in body:
            new: dict[int, int] = {}
            if sym.is_terminal:
                c = sym.value
                for p, st in frontier.items():
                    if p < j and w[p] == c:
                        if new.get(p + 1, -1) < st:
                            new[p + 1] = st
            else:
                nt_i = comp.idx[sym.value]
                for p, st in frontier.items():
                    row_base = p * (n + 1)
                    for q in range(p, j + 1):
                        assert i <= p <= q <= j  # closure of the restricted system
                        v = facts.rows[row_base + q][nt_i]
                        if v == FALSE:
                            continue
                        combined = 1 if (st == 1 and v == TRUE) else 0
                        if new.get(q, -1) < combined:
                            new[q] = combined
            frontier = new
            if not frontier:
                return FALSE
        end = frontier.get(j)
        if end is None:
            return FALSE
        return TRUE if end == 1 else UNKNOWN

    def fact_value(nt_i: int, i: int, j: int) -> int:
        value = FALSE
        for pos, neg, _rule in comp.rules_by_nt[nt_i]:
            rv = TRUE
            for b in pos:
                rv = _and3(rv, body_status(comp.body_list[b], i, j))
                if rv == FALSE:
                    break
            if rv != FALSE:
                for b in neg:
                    rv = _and3(rv, _not3(body_status(comp.body_list[b], i, j)))
                    if rv == FALSE:
                        break
            if rv == TRUE:
                return TRUE
            if rv == UNKNOWN:
                value = UNKNOWN
        return value

    def body_holds(body: tuple[Symbol, ...], i: int, j: int) -> bool:
        frontier = {i}
        for sym in body:
            new: set[int] = set()
            if sym.is_terminal:
                for p in frontier:
                    if p < j and w[p] == sym.value:
                        new.add(p + 1)
            else:
                nt_i = comp.idx[sym.value]
                for p in frontier:
                    row_base = p * (n + 1)
                    for q in range(p, j + 1):
                        if facts.rows[row_base + q][nt_i] == TRUE:
                            new.add(q)
            frontier = new
            if not frontier:
                return False
        return j in frontier

    for width in range(1, n + 1):
        for i in range(n - width + 1):
            j = i + width
            row = facts.rows[facts.span_id(i, j)]
            changed = True
            while changed:
                changed = False
                for nt_i in range(n_nts):
                    if row[nt_i] != UNKNOWN:
                        continue
                    v = fact_value(nt_i, i, j)
                    if v != UNKNOWN:
                        row[nt_i] = v
                        changed = True
            unknowns = [k for k in range(n_nts) if row[k] == UNKNOWN]
            if unknowns:
                if len(unknowns) > MAX_ISLAND_UNKNOWNS:
                    raise UndeterminedError(
                        f"span ({i},{j}) of {w!r} left {len(unknowns)} unknowns"
                    )

                def equation(nt_i: int, i=i, j=j) -> bool:
                    value = False
                    for pos, neg, _rule in comp.rules_by_nt[nt_i]:
                        if all(body_holds(comp.body_list[b], i, j) for b in pos) and not any(
                            body_holds(comp.body_list[b], i, j) for b in neg
                        ):
                            value = True
                            break
                    return value

                _resolve_island(unknowns, row, equation, layer=width, island=(i, j))
    return facts


def member(g: Grammar, w: str) -> bool:
    """Truth of (start symbol, w) under the reference semantics."""
    facts = span_facts(g, w)
    return facts.status(g.start, 0, len(w)) == TRUE


def enumerate_strings(
    g: Grammar,
    nt: str,
    alphabet: Iterable[str] | None = None,
    max_len: int = 0,
    budget: int | None = None,
) -> list[str]:
    """All strings of length <= max_len derived by ``nt``, length-then-lex."""
    if nt not in g.nonterminals:
        raise ValueError(f"unknown nonterminal {nt}")
    alphabet = tuple(alphabet) if alphabet is not None else g.alphabet
    facts = evaluate_layered(g, alphabet, max_len, budget)
    if facts.verdict != "ok":
        raise UndeterminedError(f"evaluation undetermined at {facts.undetermined_at}")
    out = []
    for length in range(max_len + 1):
        layer = ["".join(t) for t in itertools.product(alphabet, repeat=length)] if length else [""]
        out.extend(s for s in layer if facts.truth(nt, s))
    return out


# ---------------------------------------------------------------------------
# Bounded derivation search for conjunctive grammars.
#
# Terms are nested lists: ("str", s) for a terminal string (possibly empty),
# ("nt", name, i, j) for an unexpanded nonterminal pinned to a span of the
# target, and ("conj", [seq, ...]) for a bracketed conjunction of
# concatenations. One step either rewrites a nonterminal atom by a rule's
# right-hand side in brackets, or collapses a bracket whose members are all
# the same terminal string.


@dataclass
class DerivationTrace:
    status: str  # "found" | "none" | "unknown"
    target: str
    steps: list[str] = field(default_factory=list)
    ops: list[tuple] = field(default_factory=list)


def _term_text(nodes) -> str:
    parts = []
    for node in nodes:
        if node[0] == "str":
            parts.append(node[1] if node[1] else "eps")
        elif node[0] == "nt":
            parts.append(node[1])
        else:
            parts.append("( " + " & ".join(_term_text(seq) for seq in node[1]) + " )")
    return " ".join(parts) if parts else "eps"


def derive_conjunctive(g: Grammar, w: str, step_budget: int = 10000) -> DerivationTrace:
    """A replayable rewriting derivation of ``w``, if one exists.

    Only for grammars without negative conjuncts. The search is guided by
    the substring-restricted facts, so "none" is an exhaustive answer;
    "unknown" only means the step budget ran out while printing the trace.
    """
    if g.classification not in ("ordinary", "conjunctive"):
        raise ValueError("derivation traces are defined for conjunctive grammars only")
    facts = span_facts(g, w)
    if facts.status(g.start, 0, len(w)) != TRUE:
        return DerivationTrace("none", w)

    comp = _Compiled(g)
    rules_of: dict[str, list] = {}
    for nt_i, name in enumerate(comp.nts):
        rules_of[name] = comp.rules_by_nt[nt_i]

    def leftmost_split(body, i: int, j: int):
        """Leftmost assignment of body symbols to subspans, by the facts."""
        if not body:
            return () if i == j else None
        sym = body[0]
        if sym.is_terminal:
            if i < j and w[i] == sym.value:
                rest = leftmost_split(body[1:], i + 1, j)
                if rest is not None:
                    return ((sym, i, i + 1),) + rest
            return None
        nt_i = comp.idx[sym.value]
        for mid in range(i, j + 1):
            if facts.rows[i * (len(w) + 1) + mid][nt_i] == TRUE:
                rest = leftmost_split(body[1:], mid, j)
                if rest is not None:
                    return ((sym, i, mid),) + rest
        return None

    def instantiate(name: str, i: int, j: int):
        """First satisfied rule in grammar order, with leftmost splits."""
        for pos, neg, rule in rules_of[name]:
            assert not neg
            groups = []
            ok = True
            for b in pos:
                split = leftmost_split(comp.body_list[b], i, j)
                if split is None:
                    ok = False
                    break
                seq = []
                for sym, a, bb in split:
                    if sym.is_terminal:
                        seq.append(("str", sym.value))
                    else:
                        seq.append(("nt", sym.value, a, bb))
                groups.append(seq if seq else [("str", "")])
            if ok:
                return rule, groups
        return None, None

    term = [("nt", g.start, 0, len(w))]
    trace = DerivationTrace("found", w, [_term_text(term)])

    def find_nt(nodes, path):
        for k, node in enumerate(nodes):
            if node[0] == "nt":
                return path + (k,), node
            if node[0] == "conj":
                for gi, seq in enumerate(node[1]):
                    hit = find_nt(seq, path + (k, gi))
                    if hit:
                        return hit
        return None

    def find_collapsible(nodes, path):
        for k, node in enumerate(nodes):
            if node[0] == "conj":
                inner = None
                for gi, seq in enumerate(node[1]):
                    inner = inner or find_collapsible(seq, path + (k, gi))
                if inner:
                    return inner
                texts = set()
                pure = True
                for seq in node[1]:
                    if all(n[0] == "str" for n in seq):
                        texts.add("".join(n[1] for n in seq))
                    else:
                        pure = False
                if pure and len(texts) == 1:
                    return path + (k,)
        return None

    def locate(path):
        # paths alternate node-index / group-index
        nodes = term
        idx = 0
        while idx < len(path) - 1:
            nodes = nodes[path[idx]][1][path[idx + 1]]
            idx += 2
        return nodes, path[-1]

    steps = 0
    while True:
        if steps > step_budget:
            return DerivationTrace("unknown", w, trace.steps, trace.ops)
        hit = find_collapsible(term, ())
        if hit is not None:
            nodes, k = locate(hit)
            text = "".join(n[1] for n in nodes[k][1][0])
            nodes[k] = ("str", text)
            trace.ops.append(("collapse", hit))
            trace.steps.append(_term_text(term))
            steps += 1
            continue
        hit = find_nt(term, ())
        if hit is None:
            break
        path, node = hit
        _, name, i, j = node
        rule, groups = instantiate(name, i, j)
        if rule is None:  # cannot happen when facts are consistent
            return DerivationTrace("unknown", w, trace.steps, trace.ops)
        nodes, k = locate(path)
        nodes[k] = ("conj", groups)
        serialized = tuple(
            tuple(
                n if n[0] == "str" else ("nt", n[1], n[2], n[3]) for n in seq
            )
            for seq in groups
        )
        trace.ops.append(("expand", path, name, (i, j), serialized))
        trace.steps.append(_term_text(term))
        steps += 1

    final = trace.steps[-1]
    if final != (w if w else "eps"):
        return DerivationTrace("unknown", w, trace.steps, trace.ops)
    return trace


def replay_derivation(g: Grammar, trace: DerivationTrace) -> bool:
    """Re-execute the recorded operations, verifying each against the
    grammar: every expansion must instantiate a rule of the grammar with
    conjunct groups tiling the atom's span and terminals matching the
    target; every collapse must merge a bracket of identical strings. The
    printed steps must reproduce the trace exactly."""
    if trace.status != "found":
        return False
    w = trace.target
    rule_shapes: dict[str, list[tuple[tuple, ...]]] = {}
    for rule in g.rules:
        shape = tuple(
            tuple(("t", s.value) if s.is_terminal else ("n", s.value) for s in c.body)
            for c in rule.conjuncts
            if c.positive
        )
        if any(not c.positive for c in rule.conjuncts):
            continue
        rule_shapes.setdefault(rule.head, []).append(shape)

    term: list = [("nt", g.start, 0, len(w))]
    printed = [_term_text(term)]

    def locate(path):
        nodes = term
        idx = 0
        while idx < len(path) - 1:
            nodes = nodes[path[idx]][1][path[idx + 1]]
            idx += 2
        return nodes, path[-1]

    for op in trace.ops:
        if op[0] == "expand":
            _, path, head, (i, j), groups = op
            nodes, k = locate(path)
            if nodes[k] != ("nt", head, i, j):
                return False
            shape = []
            for seq in groups:
                body = []
                pos = i
                for n in seq:
                    if n[0] == "str":
                        if n[1] == "":
                            continue  # epsilon marker inside a group
                        if w[pos : pos + len(n[1])] != n[1]:
                            return False
                        body.extend(("t", c) for c in n[1])
                        pos += len(n[1])
                    else:
                        _, name, a, b = n
                        if a != pos or not (i <= a <= b <= j):
                            return False
                        body.append(("n", name))
                        pos = b
                if pos != j:
                    return False
                shape.append(tuple(body))
            if tuple(shape) not in rule_shapes.get(head, []):
                return False
            nodes[k] = ("conj", [list(seq) for seq in groups])
        else:
            _, path = op
            nodes, k = locate(path)
            node = nodes[k]
            if node[0] != "conj":
                return False
            texts = set()
            for seq in node[1]:
                if not all(n[0] == "str" for n in seq):
                    return False
                texts.add("".join(n[1] for n in seq))
            if len(texts) != 1:
                return False
            nodes[k] = ("str", texts.pop())
        printed.append(_term_text(term))
    return printed == trace.steps and printed[-1] == (w if w else "eps")
