"""Text format for grammars (.bgr files).

Surface, mirroring the usual written notation one-to-one:

    grammar name;
    alphabet "ab";
    start S;

    S -> S A & C 'b' | A;          # '|' separates alternatives, '&' conjuncts
    A -> 'a' A | 'b';              # terminals are single quoted characters
    E -> eps;                      # empty body
    N -> X & ~ C 'b';              # '~' prefixes a negative conjunct
    forall s in [ab]: X_{s} -> '{s}';            # rule family template
    forall s, t in [ab] where s != t: D -> C_{s} '{t}';

Escapes inside quotes: \\ and \' (and \" in the alphabet string). A template
placeholder {v} is substituted in nonterminal names and quoted terminals for
every assignment of the binders to their character classes, minus the tuples
excluded by the distinctness constraints. The canonical printer emits LF
line endings, one rule statement per line with consecutive rules for the
same head merged into alternatives; its output is byte-stable and parses
back to a structurally identical grammar.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    BoolgramError,
    Conjunct,
    Diagnostic,
    Grammar,
    Origin,
    Rule,
    Symbol,
    errors,
    nonterm,
    term,
    validate,
)

_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CHARS = _NAME_START | set("0123456789")
_KEYWORDS = {"grammar", "alphabet", "start", "forall", "in", "where", "eps"}


class DslError(BoolgramError):
    def __init__(self, message: str, path: str, line: int, col: int = 0):
        self.path = path
        self.line = line
        self.col = col
        super().__init__(f"{path}:{line}:{col}: {message}")


@dataclass
class _Token:
    kind: str  # NAME TERM STRING CLASS PUNCT EOF
    value: str
    line: int
    col: int


class _Lexer:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, msg: str) -> DslError:
        return DslError(msg, self.path, self.line, self.col)

    def _advance(self, k: int = 1) -> None:
        for _ in range(k):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def tokens(self) -> list[_Token]:
        out = []
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in " \t\r\n":
                self._advance()
                continue
            if c == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance()
                continue
            line, col = self.line, self.col
            if c in _NAME_START or (c == "{" and self._placeholder_len(self.pos)):
                out.append(_Token("NAME", self._lex_name(), line, col))
                continue
            if c == "'":
                out.append(_Token("TERM", self._lex_terminal(), line, col))
                continue
            if c == '"':
                out.append(_Token("STRING", self._lex_string(), line, col))
                continue
            if c == "[":
                out.append(_Token("CLASS", self._lex_class(), line, col))
                continue
            if text.startswith("->", self.pos):
                out.append(_Token("PUNCT", "->", line, col))
                self._advance(2)
                continue
            if text.startswith("!=", self.pos):
                out.append(_Token("PUNCT", "!=", line, col))
                self._advance(2)
                continue
            if c in "|&~;:,":
                out.append(_Token("PUNCT", c, line, col))
                self._advance()
                continue
            raise self.error(f"unexpected character {c!r}")
        out.append(_Token("EOF", "", self.line, self.col))
        return out

    def _placeholder_len(self, pos: int) -> int:
        """Length of a {var} group at pos, or 0."""
        text = self.text
        if pos >= len(text) or text[pos] != "{":
            return 0
        end = pos + 1
        while end < len(text) and (text[end] in _NAME_CHARS):
            end += 1
        if end > pos + 1 and end < len(text) and text[end] == "}":
            return end - pos + 1
        return 0

    def _lex_name(self) -> str:
        start = self.pos
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in _NAME_CHARS:
                self._advance()
            elif c == "{":
                k = self._placeholder_len(self.pos)
                if not k:
                    break
                self._advance(k)
            elif c == "-" and self.pos + 1 < len(text) and (
                text[self.pos + 1] in _NAME_CHARS or self._placeholder_len(self.pos + 1)
            ):
                self._advance()
            else:
                break
        return text[start : self.pos]

    def _lex_quoted_char(self, quote: str) -> str:
        text = self.text
        c = text[self.pos]
        if c == "\\":
            if self.pos + 1 >= len(text):
                raise self.error("dangling escape")
            esc = text[self.pos + 1]
            if esc not in ("\\", quote):
                raise self.error(f"unknown escape \\{esc}")
            self._advance(2)
            return esc
        self._advance()
        return c

    def _lex_terminal(self) -> str:
        self._advance()  # opening '
        text = self.text
        if self.pos >= len(text):
            raise self.error("unterminated terminal")
        k = self._placeholder_len(self.pos)
        if k and self.pos + k < len(text) and text[self.pos + k] == "'":
            value = text[self.pos : self.pos + k]
            self._advance(k + 1)
            return value
        value = self._lex_quoted_char("'")
        if self.pos >= len(text) or text[self.pos] != "'":
            raise self.error("terminal must be a single character")
        self._advance()
        return value

    def _lex_string(self) -> str:
        self._advance()  # opening "
        chars = []
        text = self.text
        while self.pos < len(text) and text[self.pos] != '"':
            chars.append(self._lex_quoted_char('"'))
        if self.pos >= len(text):
            raise self.error("unterminated string")
        self._advance()
        return "".join(chars)

    def _lex_class(self) -> str:
        start = self.pos
        self._advance()  # [
        text = self.text
        while self.pos < len(text) and text[self.pos] != "]":
            self._advance()
        if self.pos >= len(text):
            raise self.error("unterminated character class")
        self._advance()
        return text[start : self.pos]


def _expand_class(spec: str, line: int, path: str) -> list[str]:
    """[a-z0-9] style class; explicit characters and ranges."""
    body = spec[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        c = body[i]
        if i + 2 < len(body) and body[i + 1] == "-":
            lo, hi = c, body[i + 2]
            if ord(lo) > ord(hi):
                raise DslError(f"bad range {lo}-{hi}", path, line)
            out.extend(chr(k) for k in range(ord(lo), ord(hi) + 1))
            i += 3
        else:
            out.append(c)
            i += 1
    if not out:
        raise DslError("empty character class", path, line)
    return out


@dataclass
class _RuleStmt:
    head: str
    alternatives: list[list[tuple[bool, list]]]  # per alt: (positive, raw body items)
    line: int


class _Parser:
    def __init__(self, tokens: list[_Token], path: str):
        self.toks = tokens
        self.i = 0
        self.path = path

    @property
    def cur(self) -> _Token:
        return self.toks[self.i]

    def error(self, msg: str) -> DslError:
        t = self.cur
        return DslError(msg, self.path, t.line, t.col)

    def eat(self, kind: str, value: Optional[str] = None) -> _Token:
        t = self.cur
        if t.kind != kind or (value is not None and t.value != value):
            want = value or kind
            raise self.error(f"expected {want!r}, found {t.value!r}")
        self.i += 1
        return t

    def at_punct(self, value: str) -> bool:
        return self.cur.kind == "PUNCT" and self.cur.value == value

    def parse(self) -> Grammar:
        name = None
        alphabet: Optional[str] = None
        start: Optional[str] = None
        rules: list[Rule] = []
        warnings: list[Diagnostic] = []
        seen_rules: set[tuple] = set()

        def add_rule(rule: Rule) -> None:
            k = rule.key()
            if k in seen_rules:
                warnings.append(Diagnostic("warning", f"duplicate rule dropped: {rule}", rule.origin))
                return
            seen_rules.add(k)
            rules.append(rule)

        while self.cur.kind != "EOF":
            t = self.cur
            if t.kind == "NAME" and t.value == "grammar":
                if name is not None:
                    raise self.error("duplicate grammar declaration")
                self.i += 1
                name = self.eat("NAME").value
                self.eat("PUNCT", ";")
            elif t.kind == "NAME" and t.value == "alphabet":
                if alphabet is not None:
                    raise self.error("duplicate alphabet declaration")
                self.i += 1
                alphabet = self.eat("STRING").value
                self.eat("PUNCT", ";")
            elif t.kind == "NAME" and t.value == "start":
                if start is not None:
                    raise self.error("duplicate start declaration")
                self.i += 1
                start = self.eat("NAME").value
                self.eat("PUNCT", ";")
            elif t.kind == "NAME" and t.value == "forall":
                for rule in self._parse_template():
                    add_rule(rule)
            elif t.kind == "NAME":
                for rule in self._rules_from_stmt(self._parse_rule_stmt(), binders=None):
                    add_rule(rule)
            else:
                raise self.error(f"unexpected {t.value!r}")

        if alphabet is None:
            raise DslError("missing alphabet declaration", self.path, 1)
        if start is None:
            raise DslError("missing start declaration", self.path, 1)
        nts: list[str] = []
        seen_nt = set()
        for r in rules:
            if r.head not in seen_nt:
                seen_nt.add(r.head)
                nts.append(r.head)
        if start not in seen_nt:
            nts.append(start)
        g = Grammar(name or "g", tuple(alphabet), tuple(nts), tuple(rules), start)
        diags = validate(g)
        errs = errors(diags)
        if errs:
            first = errs[0]
            where = first.origin or Origin(self.path, 0)
            raise DslError(
                f"{first.message}" + (f" (+{len(errs) - 1} more)" if len(errs) > 1 else ""),
                where.path,
                where.line,
            )
        all_warnings = warnings + [d for d in diags if d.severity == "warning"]
        object.__setattr__(g, "_warnings", all_warnings)  # frozen dataclass sidecar
        return g

    def _parse_rule_stmt(self) -> _RuleStmt:
        head_tok = self.eat("NAME")
        if head_tok.value in _KEYWORDS:
            raise self.error(f"{head_tok.value!r} is a reserved word")
        self.eat("PUNCT", "->")
        alternatives = []
        while True:
            alternatives.append(self._parse_alternative())
            if self.at_punct("|"):
                self.i += 1
                continue
            break
        self.eat("PUNCT", ";")
        return _RuleStmt(head_tok.value, alternatives, head_tok.line)

    def _parse_alternative(self) -> list[tuple[bool, list]]:
        conjuncts = []
        while True:
            positive = True
            if self.at_punct("~"):
                positive = False
                self.i += 1
            conjuncts.append((positive, self._parse_body()))
            if self.at_punct("&"):
                self.i += 1
                continue
            break
        return conjuncts

    def _parse_body(self) -> list:
        items: list = []
        if self.cur.kind == "NAME" and self.cur.value == "eps":
            self.i += 1
            return items
        while True:
            t = self.cur
            if t.kind == "NAME" and t.value not in _KEYWORDS:
                items.append(("n", t.value, t.line))
                self.i += 1
            elif t.kind == "TERM":
                items.append(("t", t.value, t.line))
                self.i += 1
            else:
                break
        if not items:
            raise self.error("empty conjunct body (use eps)")
        return items

    def _parse_template(self) -> list[Rule]:
        self.eat("NAME", "forall")
        binders: list[tuple[str, list[str]]] = []
        while True:
            # one group: NAME (',' NAME)* 'in' CLASS; a ',' after the class
            # starts the next group
            names = [self.eat("NAME").value]
            while self.at_punct(","):
                self.i += 1
                names.append(self.eat("NAME").value)
            self.eat("NAME", "in")
            cls_tok = self.eat("CLASS")
            chars = _expand_class(cls_tok.value, cls_tok.line, self.path)
            for nm in names:
                binders.append((nm, chars))
            if self.at_punct(","):
                self.i += 1
                continue
            break
        constraints: list[tuple[str, str]] = []
        if self.cur.kind == "NAME" and self.cur.value == "where":
            self.i += 1
            while True:
                a = self.eat("NAME").value
                self.eat("PUNCT", "!=")
                b = self.eat("NAME").value
                constraints.append((a, b))
                if self.at_punct(","):
                    self.i += 1
                    continue
                break
        self.eat("PUNCT", ":")
        stmt = self._parse_rule_stmt()
        bound = {nm for nm, _ in binders}
        for nm, _ in constraints:
            if nm not in bound:
                raise DslError(f"constraint names unbound variable {nm}", self.path, stmt.line)
        out: list[Rule] = []
        import itertools

        names = [nm for nm, _ in binders]
        for combo in itertools.product(*[chars for _, chars in binders]):
            env = dict(zip(names, combo))
            if any(env[a] == env[b] for a, b in constraints):
                continue
            out.extend(self._rules_from_stmt(stmt, binders=env))
        return out

    def _rules_from_stmt(self, stmt: _RuleStmt, binders: Optional[dict[str, str]]) -> list[Rule]:
        def subst_name(name: str, line: int) -> str:
            if "{" not in name:
                return name
            out = []
            i = 0
            while i < len(name):
                if name[i] == "{":
                    end = name.index("}", i)
                    var = name[i + 1 : end]
                    if binders is None or var not in binders:
                        raise DslError(
                            f"placeholder {{{var}}} outside its binder scope", self.path, line
                        )
                    out.append(binders[var])
                    i = end + 1
                else:
                    out.append(name[i])
                    i += 1
            return "".join(out)

        def subst_term(value: str, line: int) -> str:
            if value.startswith("{") and value.endswith("}"):
                var = value[1:-1]
                if binders is None or var not in binders:
                    raise DslError(
                        f"placeholder {{{var}}} outside its binder scope", self.path, line
                    )
                return binders[var]
            return value

        head = subst_name(stmt.head, stmt.line)
        rules = []
        for alt in stmt.alternatives:
            conjuncts = []
            for positive, items in alt:
                body = []
                for kind, value, line in items:
                    if kind == "n":
                        body.append(nonterm(subst_name(value, line)))
                    else:
                        body.append(term(subst_term(value, line)))
                conjuncts.append(Conjunct(positive, tuple(body)))
            rules.append(Rule(head, tuple(conjuncts), Origin(self.path, stmt.line)))
        return rules


def dsl_parse(text: str, path: str = "<string>") -> Grammar:
    """Parse DSL text into a validated grammar (templates expanded)."""
    return _Parser(_Lexer(text, path).tokens(), path).parse()


def parse_warnings(g: Grammar) -> list[Diagnostic]:
    return list(getattr(g, "_warnings", []))


def _print_terminal(c: str) -> str:
    if c == "\\":
        return "'\\\\'"
    if c == "'":
        return "'\\''"
    return f"'{c}'"


def _print_alphabet(chars: tuple[str, ...]) -> str:
    out = []
    for c in chars:
        if c == "\\":
            out.append("\\\\")
        elif c == '"':
            out.append('\\"')
        else:
            out.append(c)
    return '"' + "".join(out) + '"'


def _print_conjunct(c: Conjunct) -> str:
    body = " ".join(_print_terminal(s.value) if s.is_terminal else s.value for s in c.body)
    if not c.body:
        body = "eps"
    return body if c.positive else f"~ {body}"


def dsl_print(g: Grammar) -> str:
    """Canonical text: LF endings, one rule statement per line, consecutive
    rules for the same head merged into alternatives. Parsing the output
    yields a structurally identical grammar."""
    lines = [f"grammar {g.name};", f"alphabet {_print_alphabet(g.alphabet)};", f"start {g.start};", ""]
    i = 0
    rules = g.rules
    while i < len(rules):
        head = rules[i].head
        alts = []
        while i < len(rules) and rules[i].head == head:
            alts.append(" & ".join(_print_conjunct(c) for c in rules[i].conjuncts))
            i += 1
        lines.append(f"{head} -> " + " | ".join(alts) + ";")
    return "\n".join(lines) + "\n"
