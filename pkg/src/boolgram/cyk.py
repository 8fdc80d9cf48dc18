"""Cubic table recognizer over the span-stratified binary form.

The table is filled by increasing span width. For one span, pair conjuncts
are first decided from proper splits (the kernel's job: one AND of two
bitsets per split point), then the span's same-span dependencies are
resolved by walking the unit graph's strongly connected components in
dependency order, taking a least fixpoint inside each component. Negative
conjuncts only ever read finalized values, which the normalizer's
no-negative-cycle guarantee makes total.

Rule checks are trigger-driven: a rule is (re)examined only when one of its
positive conjuncts might have just become satisfiable on this span.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import BoolgramError, Conjunct, Grammar, Rule
from .kernel import make_pair_table
from .normalize import BinaryGrammar

_PAIR, _UNIT, _TERM, _EPS = 0, 1, 2, 3


class _CRule:
    __slots__ = ("head", "pos", "neg", "span_usable", "rule", "index")

    def __init__(self, head: int, pos, neg, span_usable: bool, rule: Rule, index: int):
        self.head = head
        self.pos = pos
        self.neg = neg
        self.span_usable = span_usable  # false when a positive conjunct is epsilon
        self.rule = rule
        self.index = index


class _Compiled:
    def __init__(self, bg: BinaryGrammar):
        g = bg.grammar
        self.bg = bg
        self.nts = g.nonterminals
        self.idx = {name: i for i, name in enumerate(self.nts)}
        self.nullable_mask = 0
        for name in bg.nullable:
            self.nullable_mask |= 1 << self.idx[name]

        pair_ids: dict[tuple[int, int], int] = {}
        self.pairs: list[tuple[int, int]] = []

        def pair_id(b: int, c: int) -> int:
            key = (b, c)
            if key not in pair_ids:
                pair_ids[key] = len(self.pairs)
                self.pairs.append(key)
            return pair_ids[key]

        nullable = bg.nullable
        rules: list[_CRule] = []
        self.pair_listen: dict[int, list[int]] = {}
        self.unit_listen: dict[int, list[int]] = {}
        self.term_listen: dict[str, list[int]] = {}

        for rule in g.rules:
            head = self.idx[rule.head]
            pos = []
            neg = []
            span_usable = True
            for conj in rule.conjuncts:
                body = conj.body
                if not body:
                    if conj.positive:
                        span_usable = False  # epsilon holds on empty spans only
                    # negative epsilon conjunct always holds on nonempty spans
                    continue
                if len(body) == 1:
                    sym = body[0]
                    if sym.is_terminal:
                        desc = (_TERM, sym.value)
                    else:
                        desc = (_UNIT, self.idx[sym.value])
                else:
                    b = self.idx[body[0].value]
                    c = self.idx[body[1].value]
                    desc = (
                        _PAIR,
                        pair_id(b, c),
                        b,
                        c,
                        body[0].value in nullable,
                        body[1].value in nullable,
                    )
                (pos if conj.positive else neg).append(desc)
            rid = len(rules)
            rules.append(_CRule(head, tuple(pos), tuple(neg), span_usable, rule, rid))
            if not span_usable:
                continue
            for desc in pos:
                if desc[0] == _PAIR:
                    self.pair_listen.setdefault(desc[1], []).append(rid)
                    if desc[5]:  # right side nullable: fires when left lights up
                        self.unit_listen.setdefault(desc[2], []).append(rid)
                    if desc[4]:
                        self.unit_listen.setdefault(desc[3], []).append(rid)
                elif desc[0] == _UNIT:
                    self.unit_listen.setdefault(desc[1], []).append(rid)
                elif desc[0] == _TERM:
                    self.term_listen.setdefault(desc[1], []).append(rid)
        self.rules = rules

        scc_index = {}
        for k, comp in enumerate(bg.scc_order):
            for name in comp:
                scc_index[name] = k
        self.n_sccs = len(bg.scc_order)
        self.scc_of_nt = [scc_index[name] for name in self.nts]
        self.scc_of_rule = [self.scc_of_nt[r.head] for r in rules]

        # left/right pair-role masks per nonterminal
        self.left_masks = [0] * len(self.nts)
        self.right_masks = [0] * len(self.nts)
        for pid, (b, c) in enumerate(self.pairs):
            self.left_masks[b] |= 1 << pid
            self.right_masks[c] |= 1 << pid
        self.words = max(1, (len(self.pairs) + 63) // 64)


def _compiled(bg: BinaryGrammar) -> _Compiled:
    comp = getattr(bg, "_compiled", None)
    if comp is None:
        comp = _Compiled(bg)
        object.__setattr__(bg, "_compiled", comp)
    return comp


@dataclass
class ParseTable:
    """Recognizer table: per span, the set of nonterminals deriving it.

    Spans are half-open (i, j) over the input; empty spans are answered from
    the nullable set. Entries are finalized strictly by increasing width.
    """

    text: str
    nts: tuple[str, ...]
    rows: list[int]
    nullable_mask: int
    start: str
    backend_name: str
    _idx: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._idx = {name: i for i, name in enumerate(self.nts)}

    def mask(self, i: int, j: int) -> int:
        if i == j:
            return self.nullable_mask
        return self.rows[i * (len(self.text) + 1) + j]

    def contains(self, i: int, j: int, name: str) -> bool:
        return bool(self.mask(i, j) >> self._idx[name] & 1)

    def nonterminals_at(self, i: int, j: int) -> tuple[str, ...]:
        m = self.mask(i, j)
        return tuple(name for k, name in enumerate(self.nts) if m >> k & 1)

    def accepts(self) -> bool:
        return self.contains(0, len(self.text), self.start)


def recognize(bg: BinaryGrammar, w: str, backend: str = "auto") -> ParseTable:
    """Fill the span table for ``w``; the (0, n, start) entry is the verdict."""
    bad = set(w) - set(bg.grammar.alphabet)
    if bad:
        raise ValueError(f"input contains characters outside the alphabet: {sorted(bad)}")
    comp = _compiled(bg)
    n = len(w)
    stride = n + 1
    table = make_pair_table(n, comp.words, backend)
    rows = [0] * (stride * stride)

    rules = comp.rules
    pair_listen = comp.pair_listen
    unit_listen = comp.unit_listen
    scc_of_rule = comp.scc_of_rule
    left_masks = comp.left_masks
    right_masks = comp.right_masks
    n_sccs = comp.n_sccs

    for width in range(1, n + 1):
        for i in range(n - width + 1):
            j = i + width
            pairsat = table.pair_satisfaction(i, j) if width > 1 else 0
            row = 0

            pending: list[list[int]] = [[] for _ in range(n_sccs)]
            ps = pairsat
            while ps:
                low = ps & -ps
                pid = low.bit_length() - 1
                ps ^= low
                for rid in pair_listen.get(pid, ()):
                    pending[scc_of_rule[rid]].append(rid)
            if width == 1:
                for rid in comp.term_listen.get(w[i], ()):
                    pending[scc_of_rule[rid]].append(rid)

            for k in range(n_sccs):
                bucket = pending[k]
                while bucket:
                    rid = bucket.pop()
                    rule = rules[rid]
                    head = rule.head
                    if row >> head & 1:
                        continue
                    if _rule_sat(rule, row, pairsat, i, j, width, w):
                        row |= 1 << head
                        for rid2 in unit_listen.get(head, ()):
                            pending[scc_of_rule[rid2]].append(rid2)

            rows[i * stride + j] = row
            lmask = 0
            rmask = 0
            rr = row
            while rr:
                low = rr & -rr
                nt_i = low.bit_length() - 1
                rr ^= low
                lmask |= left_masks[nt_i]
                rmask |= right_masks[nt_i]
            table.finalize(i, j, lmask, rmask)

    return ParseTable(
        w, comp.nts, rows, comp.nullable_mask, bg.grammar.start, getattr(table, "backend_name", "?")
    )


def _rule_sat(rule: _CRule, row: int, pairsat: int, i: int, j: int, width: int, w: str) -> bool:
    for desc in rule.pos:
        kind = desc[0]
        if kind == _PAIR:
            _, pid, b, c, b_null, c_null = desc
            if pairsat >> pid & 1:
                continue
            if c_null and row >> b & 1:
                continue
            if b_null and row >> c & 1:
                continue
            return False
        if kind == _UNIT:
            if not row >> desc[1] & 1:
                return False
        else:  # _TERM
            if width != 1 or w[i] != desc[1]:
                return False
    for desc in rule.neg:
        kind = desc[0]
        if kind == _PAIR:
            _, pid, b, c, b_null, c_null = desc
            if (
                pairsat >> pid & 1
                or (c_null and row >> b & 1)
                or (b_null and row >> c & 1)
            ):
                return False
        elif kind == _UNIT:
            if row >> desc[1] & 1:
                return False
        else:
            if width == 1 and w[i] == desc[1]:
                return False
    return True


# ---------------------------------------------------------------------------
# Parse-DAG extraction.


@dataclass
class DagNode:
    id: int
    span: tuple[int, int]
    nt: Optional[str] = None  # None for leaves
    rule: Optional[Rule] = None
    char: Optional[str] = None
    groups: tuple[tuple[int, ...], ...] = ()  # one per positive conjunct


@dataclass
class ParseDag:
    """Shared acyclic parse structure.

    One internal node carries a child group for every positive conjunct of
    its rule; every group re-derives the node's span. Negative conjuncts are
    not represented. Subresults are shared by (nonterminal, span).
    """

    text: str
    nodes: list[DagNode]
    root: int

    def node(self, node_id: int) -> DagNode:
        return self.nodes[node_id]

    def replay(self, table: ParseTable, bg: BinaryGrammar) -> bool:
        """Re-check every node against the table: rule satisfied, and every
        child group tiles the node's span exactly."""
        for node in self.nodes:
            i, j = node.span
            if node.char is not None:
                if j != i + 1 or self.text[i] != node.char:
                    return False
                continue
            assert node.rule is not None
            pos_conjuncts = [c for c in node.rule.conjuncts if c.positive]
            if len(pos_conjuncts) != len(node.groups):
                return False
            if not table.contains(i, j, node.nt):
                return False
            for conj, group in zip(pos_conjuncts, node.groups):
                pos = i
                if len(group) != len(conj.body):
                    return False
                for sym, child_id in zip(conj.body, group):
                    child = self.nodes[child_id]
                    ci, cj = child.span
                    if ci != pos:
                        return False
                    if sym.is_terminal:
                        if child.char != sym.value:
                            return False
                    else:
                        if child.nt != sym.value:
                            return False
                    pos = cj
                if pos != j:
                    return False
        return True

    def to_json_obj(self) -> dict:
        nodes = []
        for node in self.nodes:
            if node.char is not None:
                nodes.append(
                    {"id": node.id, "kind": "leaf", "char": node.char, "span": list(node.span)}
                )
            else:
                nodes.append(
                    {
                        "id": node.id,
                        "kind": "node",
                        "nt": node.nt,
                        "rule": str(node.rule),
                        "span": list(node.span),
                        "groups": [list(g) for g in node.groups],
                    }
                )
        return {"text": self.text, "root": self.root, "nodes": nodes}

    def to_text(self) -> str:
        out: list[str] = []
        seen: set[int] = set()

        def emit(node_id: int, depth: int) -> None:
            node = self.nodes[node_id]
            pad = "  " * depth
            i, j = node.span
            if node.char is not None:
                out.append(f"{pad}{node.char!r} [{i},{j})")
                return
            if node_id in seen:
                out.append(f"{pad}{node.nt} [{i},{j}) (shared, node {node_id})")
                return
            seen.add(node_id)
            out.append(f"{pad}{node.rule} [{i},{j}) #node {node_id}")
            for gi, group in enumerate(node.groups):
                if len(node.groups) > 1:
                    out.append(f"{pad}  &conjunct {gi}")
                    inner = depth + 2
                else:
                    inner = depth + 1
                for child in group:
                    emit(child, inner)

        emit(self.root, 0)
        return "\n".join(out) + "\n"


class DagExtractionError(BoolgramError):
    pass


def extract_dag(table: ParseTable, bg: BinaryGrammar) -> ParseDag:
    """Deterministic single parse DAG for an accepted input.

    Rule choice is the first satisfying rule in grammar order; splits take
    the leftmost valid point (empty sides permitted for nullable symbols).
    Same-span unit recursion is resolved by skipping choices that would
    close a cycle; the span's least-fixpoint construction guarantees an
    acyclic support exists.
    """
    if not table.accepts():
        raise DagExtractionError("input was not accepted; no DAG to extract")
    g = bg.grammar
    rules_by_head: dict[str, list[Rule]] = {}
    for rule in g.rules:
        rules_by_head.setdefault(rule.head, []).append(rule)

    nodes: list[DagNode] = []
    memo: dict[tuple, int] = {}
    in_progress: set[tuple[str, int, int]] = set()
    nullable = bg.nullable

    def derives(name: str, i: int, j: int) -> bool:
        if i == j:
            return name in nullable
        return table.contains(i, j, name)

    def body_splits(body, i: int, j: int):
        """Leftmost-first assignments of body symbols to subspans."""
        if not body:
            if i == j:
                yield ()
            return
        sym = body[0]
        if sym.is_terminal:
            if i < j and table.text[i] == sym.value:
                for rest in body_splits(body[1:], i + 1, j):
                    yield ((sym, i, i + 1),) + rest
            return
        for mid in range(i, j + 1):
            if derives(sym.value, i, mid):
                for rest in body_splits(body[1:], mid, j):
                    yield ((sym, i, mid),) + rest
                    return  # leftmost split only
        return

    def leaf(i: int) -> int:
        key = ("leaf", i)
        if key not in memo:
            node = DagNode(len(nodes), (i, i + 1), char=table.text[i])
            nodes.append(node)
            memo[key] = node.id
        return memo[key]

    def conjunct_holds(conj: Conjunct, i: int, j: int) -> bool:
        found = next(body_splits(conj.body, i, j), None) is not None
        return found if conj.positive else not found

    def derive(name: str, i: int, j: int) -> Optional[int]:
        key = (name, i, j)
        if key in memo:
            return memo[key]
        if key in in_progress:
            return None
        if not derives(name, i, j):
            return None
        in_progress.add(key)
        try:
            for rule in rules_by_head.get(name, ()):
                if not all(conjunct_holds(c, i, j) for c in rule.conjuncts):
                    continue
                groups: list[tuple[int, ...]] = []
                ok = True
                for conj in rule.conjuncts:
                    if not conj.positive:
                        continue
                    group = _build_group(conj, i, j)
                    if group is None:
                        ok = False
                        break
                    groups.append(group)
                if not ok:
                    continue
                node = DagNode(len(nodes), (i, j), nt=name, rule=rule, groups=tuple(groups))
                nodes.append(node)
                memo[key] = node.id
                return node.id
            return None
        finally:
            in_progress.discard(key)

    def _build_group(conj: Conjunct, i: int, j: int) -> Optional[tuple[int, ...]]:
        # try successive splits; a split can fail if it needs an in-progress
        # same-span derivation
        for assignment in _all_splits(conj.body, i, j):
            ids = []
            ok = True
            for sym, a, b in assignment:
                if sym.is_terminal:
                    ids.append(leaf(a))
                else:
                    child = derive(sym.value, a, b)
                    if child is None:
                        ok = False
                        break
                    ids.append(child)
            if ok:
                return tuple(ids)
        return None

    def _all_splits(body, i: int, j: int):
        if not body:
            if i == j:
                yield ()
            return
        sym = body[0]
        if sym.is_terminal:
            if i < j and table.text[i] == sym.value:
                for rest in _all_splits(body[1:], i + 1, j):
                    yield ((sym, i, i + 1),) + rest
            return
        for mid in range(i, j + 1):
            if derives(sym.value, i, mid):
                for rest in _all_splits(body[1:], mid, j):
                    yield ((sym, i, mid),) + rest

    root = derive(g.start, 0, len(table.text))
    if root is None:
        raise DagExtractionError("table accepts but no rule support was reconstructible")

    # drop nodes orphaned by backtracking, renumber in original order
    reachable: set[int] = set()
    stack = [root]
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        for group in nodes[nid].groups:
            stack.extend(group)
    remap: dict[int, int] = {}
    kept: list[DagNode] = []
    for node in nodes:
        if node.id in reachable:
            remap[node.id] = len(kept)
            kept.append(node)
    for node in kept:
        node.id = remap[node.id]
        node.groups = tuple(tuple(remap[c] for c in group) for group in node.groups)
    return ParseDag(table.text, kept, remap[root])


# ---------------------------------------------------------------------------
# Timing instrumentation.


@dataclass
class TimingRecord:
    label: str
    length: int
    seconds: float
    backend: str

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "length": self.length,
            "seconds": self.seconds,
            "backend": self.backend,
        }


def bench(
    bg: BinaryGrammar,
    inputs: Iterable[tuple[str, str]],
    repetitions: int = 3,
    backend: str = "auto",
    warmup: bool = True,
) -> list[TimingRecord]:
    """Wall-time of ``recognize`` per (label, text) input; best of reps.

    The warmup pass runs the first input untimed so one-time costs (grammar
    compilation, allocator and import effects) do not distort the smallest
    measurements.
    """
    inputs = list(inputs)
    if warmup and inputs:
        recognize(bg, inputs[0][1], backend)
    best: list[float] = [float("inf")] * len(inputs)
    backend_name = "?"
    # round-robin over the inputs so a slow machine phase cannot poison the
    # measurements of one size only; the minimum per input survives
    for _ in range(max(1, repetitions)):
        for k, (_label, text) in enumerate(inputs):
            t0 = time.perf_counter()
            table = recognize(bg, text, backend)
            dt = time.perf_counter() - t0
            backend_name = table.backend_name
            if dt < best[k]:
                best[k] = dt
    return [
        TimingRecord(label, len(text), best[k], backend_name)
        for k, (label, text) in enumerate(inputs)
    ]


def fit_loglog_slope(records: Iterable[TimingRecord]) -> float:
    """Least-squares slope of log(seconds) against log(length)."""
    import math

    pts = [(math.log(r.length), math.log(max(r.seconds, 1e-9))) for r in records]
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two records to fit a slope")
    mx = sum(x for x, _ in pts) / n
    my = sum(y for _, y in pts) / n
    num = sum((x - mx) * (y - my) for x, y in pts)
    den = sum((x - mx) ** 2 for x, y in pts)
    return num / den
