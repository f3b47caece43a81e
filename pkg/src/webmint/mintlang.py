"""The MINT query language: parser, canonical printer and validator."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

KEYWORDS = {"select", "from", "node", "as", "template", "where", "and",
            "contains", "endswith", "url", "occurrence", "occurence", "support"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"[^"]*")
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<cmp>>=|<=|=)
  | (?P<sym>[#,.;()\[\]/])
    """,
    re.VERBOSE,
)


class MintSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


@dataclass(frozen=True)
class Token:
    kind: str  # string | number | ident | cmp | sym | eof
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise MintSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind != "ws":
            tokens.append(Token(kind, raw, line, col))  # type: ignore[arg-type]
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass(frozen=True)
class Wildcard:
    lower: int
    upper: int

    def __str__(self) -> str:
        return f"[{self.lower};{self.upper}]"


@dataclass(frozen=True)
class TemplateExpr:
    anchored: bool
    variables: tuple[str, ...]
    wildcards: tuple[Wildcard, ...]  # one between each pair of variables


@dataclass(frozen=True)
class UrlConstraint:
    variable: str
    op: str  # contains | endswith | equals
    literal: str


@dataclass(frozen=True)
class OccurrenceConstraint:
    variable: str
    value: int


@dataclass(frozen=True)
class SupportConstraint:
    variable: str
    cmp: str  # >= | <= | =
    value: Fraction


@dataclass(frozen=True)
class RatioConstraint:
    numerator: str
    denominator: str
    cmp: str  # >= | <=
    value: Fraction


Constraint = UrlConstraint | OccurrenceConstraint | SupportConstraint | RatioConstraint


@dataclass(frozen=True)
class MintQuery:
    selected: str
    variables: tuple[str, ...]
    template: TemplateExpr
    constraints: tuple[Constraint, ...]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[min(self.pos, len(self.tokens) - 1)]

    def error(self, message: str) -> MintSyntaxError:
        return MintSyntaxError(message, self.cur.line, self.cur.column)

    def advance(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        return self.cur.kind == "ident" and self.cur.text.lower() == word

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise self.error(f"expected {word!r}, found {self.cur.text!r}")
        return self.advance()

    def expect(self, kind: str, text: str | None = None) -> Token:
        if self.cur.kind != kind or (text is not None and self.cur.text != text):
            want = text if text is not None else kind
            raise self.error(f"expected {want!r}, found {self.cur.text or 'end of query'!r}")
        return self.advance()

    def expect_name(self) -> Token:
        if self.cur.kind != "ident" or self.cur.text.lower() in KEYWORDS:
            raise self.error(f"expected a name, found {self.cur.text or 'end of query'!r}")
        return self.advance()

    def parse(self) -> MintQuery:
        self.expect_keyword("select")
        selected = self.expect_name().text
        self.expect_keyword("from")
        self.expect_keyword("node")
        self.expect_keyword("as")
        variables = [self.expect_name().text]
        while self.cur.kind == "ident" and self.cur.text.lower() not in KEYWORDS:
            variables.append(self.advance().text)
        if self.cur.kind == "sym" and self.cur.text == ",":
            self.advance()
        self.expect_keyword("template")
        template = self.parse_template()
        self.expect_keyword("as")
        alias_tok = self.cur
        alias = self.expect_name().text
        constraints: list[Constraint] = []
        if self.at_keyword("where"):
            self.advance()
            constraints.append(self.parse_constraint())
            while self.at_keyword("and"):
                self.advance()
                constraints.append(self.parse_constraint())
        self.expect("eof")

        if alias != selected:
            raise MintSyntaxError(
                f"selected template {selected!r} does not match alias {alias!r}",
                alias_tok.line, alias_tok.column)
        if len(set(variables)) != len(variables):
            raise self.error("duplicate variable names")
        if tuple(variables) != template.variables:
            raise self.error(
                "template variables must match the declared variable list in order")
        known = set(variables)
        for c in constraints:
            for var in _constraint_vars(c):
                if var not in known:
                    raise self.error(f"unknown variable {var!r} in where-clause")
        return MintQuery(selected, tuple(variables), template, tuple(constraints))

    def parse_template(self) -> TemplateExpr:
        anchored = False
        if self.cur.kind == "sym" and self.cur.text == "#":
            anchored = True
            self.advance()
        variables = [self.expect_name().text]
        wildcards: list[Wildcard] = []
        while self.cur.kind == "sym" and self.cur.text == "[":
            wildcards.append(self.parse_wildcard())
            variables.append(self.expect_name().text)
        return TemplateExpr(anchored, tuple(variables), tuple(wildcards))

    def parse_wildcard(self) -> Wildcard:
        open_tok = self.expect("sym", "[")
        lower = int(self.expect("number").text)
        self.expect("sym", ";")
        upper = int(self.expect("number").text)
        self.expect("sym", "]")
        if lower > upper:
            raise MintSyntaxError(f"wildcard [{lower};{upper}] has lower > upper",
                                  open_tok.line, open_tok.column)
        return Wildcard(lower, upper)

    def parse_constraint(self) -> Constraint:
        parens = 0
        while self.cur.kind == "sym" and self.cur.text == "(":
            parens += 1
            self.advance()
        var = self.expect_name().text
        self.expect("sym", ".")
        if self.cur.kind != "ident":
            raise self.error("expected url, occurrence or support")
        attr = self.advance().text.lower()

        if attr == "url":
            if self.at_keyword("contains") or self.at_keyword("endswith"):
                op = self.advance().text.lower()
            elif self.cur.kind == "cmp" and self.cur.text == "=":
                self.advance()
                op = "equals"
            else:
                raise self.error("expected contains, endswith or = after .url")
            literal = self.expect("string").text[1:-1]
            constraint: Constraint = UrlConstraint(var, op, literal)
        elif attr in ("occurrence", "occurence"):
            self.expect("cmp", "=")
            value = self.expect("number").text
            if "." in value or int(value) < 1:
                raise self.error("occurrence must be a positive integer")
            constraint = OccurrenceConstraint(var, int(value))
        elif attr == "support":
            if self.cur.kind == "sym" and self.cur.text == "/":
                self.advance()
                den = self.expect_name().text
                self.expect("sym", ".")
                self.expect_keyword("support")
                while self.cur.kind == "sym" and self.cur.text == ")" and parens:
                    parens -= 1
                    self.advance()
                cmp_tok = self.expect("cmp")
                if cmp_tok.text not in (">=", "<="):
                    raise MintSyntaxError("ratio comparisons support >= and <= only",
                                          cmp_tok.line, cmp_tok.column)
                num_tok = self.expect("number")
                value_frac = Fraction(num_tok.text)
                if not 0 <= value_frac <= 1:
                    raise MintSyntaxError("ratio threshold must be in [0,1]",
                                          num_tok.line, num_tok.column)
                constraint = RatioConstraint(var, den, cmp_tok.text, value_frac)
            else:
                cmp_tok = self.expect("cmp")
                constraint = SupportConstraint(
                    var, cmp_tok.text, Fraction(self.expect("number").text))
        else:
            raise self.error(f"unknown attribute {attr!r}")

        while self.cur.kind == "sym" and self.cur.text == ")" and parens:
            parens -= 1
            self.advance()
        if parens:
            raise self.error("unbalanced parentheses in constraint")
        return constraint


def _constraint_vars(c: Constraint) -> tuple[str, ...]:
    if isinstance(c, RatioConstraint):
        return (c.numerator, c.denominator)
    return (c.variable,)


def parse_query(text: str) -> MintQuery:
    """Parse MINT query text into an AST; raises MintSyntaxError with position."""
    return _Parser(_tokenize(text)).parse()


def _fmt_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    # parsed numbers are decimal literals, so this always terminates
    num, den, digits = value.numerator, value.denominator, 0
    while num % den:
        num *= 10
        digits += 1
    whole = num // den
    text = str(whole).rjust(digits + 1, "0")
    return f"{text[:-digits]}.{text[-digits:]}"


def _fmt_constraint(c: Constraint) -> str:
    if isinstance(c, UrlConstraint):
        if c.op == "equals":
            return f'{c.variable}.url = "{c.literal}"'
        return f'{c.variable}.url {c.op} "{c.literal}"'
    if isinstance(c, OccurrenceConstraint):
        return f"{c.variable}.occurrence = {c.value}"
    if isinstance(c, SupportConstraint):
        return f"{c.variable}.support {c.cmp} {_fmt_number(c.value)}"
    return (f"( {c.numerator}.support / {c.denominator}.support ) "
            f"{c.cmp} {_fmt_number(c.value)}")


def print_query(q: MintQuery) -> str:
    """Canonical single-line rendering; reparsing yields an equal AST."""
    t = q.template
    parts = ["#"] if t.anchored else []
    parts.append(t.variables[0])
    for wc, var in zip(t.wildcards, t.variables[1:]):
        parts.append(str(wc))
        parts.append(var)
    text = (f"select {q.selected} from node as {' '.join(q.variables)}, "
            f"template {' '.join(parts)} as {q.selected}")
    if q.constraints:
        text += " where " + " and ".join(_fmt_constraint(c) for c in q.constraints)
    return text


def _literal_matches(op: str, literal: str, concept: str) -> bool:
    if op == "contains":
        return literal in concept
    if op == "endswith":
        return concept.endswith(literal)
    return concept == literal


def validate_query(q: MintQuery, h) -> list[str]:
    """Non-fatal checks of a query against a concept hierarchy."""
    warnings = []
    for c in q.constraints:
        if isinstance(c, UrlConstraint):
            if not any(_literal_matches(c.op, c.literal, cid) for cid in h.concepts):
                warnings.append(
                    f'url literal "{c.literal}" ({c.op}) matches no concept '
                    f"in the hierarchy")
        elif isinstance(c, RatioConstraint):
            order = {v: i for i, v in enumerate(q.template.variables)}
            if order[c.numerator] <= order[c.denominator]:
                warnings.append(
                    f"ratio constraint {c.numerator}/{c.denominator}: numerator "
                    f"does not come after denominator in template order")
    return warnings
