"""Parse and emit the digraph interchange format for causal loop diagrams.

The format is a small DOT subset: a `digraph { ... }` block whose only
statements are quoted edges carrying an arrowhead attribute, vee for a
positive link and tee for a negative one:

    digraph {
    "births" -> "rabbit population" [arrowhead = vee]
    }

Also extracts such a block out of free-form completion text and emits a
renderer-ready DOT variant with optional loop-label annotations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .model import (
    CausalLoopDiagram,
    Link,
    LoopKind,
    Polarity,
    VariableName,
    build_diagram,
    enumerate_loops,
)

__all__ = [
    "ParseMode",
    "Severity",
    "ParseDiagnostic",
    "DigraphSyntaxError",
    "NoDigraphFound",
    "parse_digraph",
    "emit_digraph",
    "extract_digraph_block",
    "emit_render_dot",
]


class ParseMode(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class Severity(Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: Severity

    def __str__(self) -> str:
        return f"{self.severity.value.lower()}: line {self.line}, col {self.column}: {self.message}"


class DigraphSyntaxError(Exception):
    """Strict-mode grammar violation, located by line and column."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, col {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class NoDigraphFound(Exception):
    """Completion text contains no extractable digraph block."""


# --- tokenizer ---------------------------------------------------------------

_WORD = "word"
_QSTRING = "qstring"
_PUNCT = {"{": "lbrace", "}": "rbrace", "[": "lbracket", "]": "rbracket",
          "=": "equals", ";": "semi"}
_ARROW = "arrow"
_EOF = "eof"


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> tuple[list[_Token], list[ParseDiagnostic]]:
    """Scan text into tokens, tolerating junk (reported, not raised)."""
    tokens: list[_Token] = []
    problems: list[ParseDiagnostic] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def advance(ch: str) -> None:
        nonlocal line, col
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance(ch)
            i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            chars: list[str] = []
            advance(ch)
            i += 1
            closed = False
            while i < n:
                c = text[i]
                if c == "\\" and i + 1 < n and text[i + 1] == '"':
                    chars.append('"')
                    advance(c)
                    advance('"')
                    i += 2
                    continue
                if c == '"':
                    advance(c)
                    i += 1
                    closed = True
                    break
                chars.append(c)
                advance(c)
                i += 1
            if not closed:
                problems.append(ParseDiagnostic(
                    start_line, start_col, "unterminated quoted string",
                    Severity.ERROR))
            tokens.append(_Token(_QSTRING, "".join(chars), start_line, start_col))
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(_Token(_ARROW, "->", start_line, start_col))
            advance("-")
            advance(">")
            i += 2
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, start_line, start_col))
            advance(ch)
            i += 1
            continue
        m = re.match(r"[A-Za-z0-9_]+", text[i:])
        if m:
            word = m.group(0)
            tokens.append(_Token(_WORD, word, start_line, start_col))
            for c in word:
                advance(c)
            i += len(word)
            continue
        problems.append(ParseDiagnostic(
            start_line, start_col, f"unexpected character {ch!r}", Severity.ERROR))
        advance(ch)
        i += 1

    tokens.append(_Token(_EOF, "", line, col))
    return tokens, problems


# --- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token], strict: bool):
        self.tokens = tokens
        self.pos = 0
        self.strict = strict
        self.diagnostics: list[ParseDiagnostic] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != _EOF:
            self.pos += 1
        return tok

    def fail(self, tok: _Token, message: str) -> None:
        if self.strict:
            raise DigraphSyntaxError(tok.line, tok.column, message)
        self.diagnostics.append(
            ParseDiagnostic(tok.line, tok.column, message, Severity.WARNING))

    def warn(self, tok: _Token, message: str) -> None:
        self.diagnostics.append(
            ParseDiagnostic(tok.line, tok.column, message, Severity.WARNING))

    def skip_statement(self) -> None:
        """Panic-mode recovery: drop tokens until a plausible statement start."""
        while True:
            tok = self.peek()
            if tok.kind in (_EOF, "rbrace"):
                return
            if tok.kind == _QSTRING and self.tokens[self.pos + 1].kind == _ARROW:
                return
            self.pos += 1

    def parse_edge(self) -> Link | None:
        """Parse one edge statement; None means the statement was skipped."""
        src = self.take()
        if src.kind != _QSTRING:
            self.fail(src, f"expected quoted variable name, found {src.text!r}")
            self.skip_statement()
            return None
        arrow = self.take()
        if arrow.kind != _ARROW:
            self.fail(arrow, f"expected '->', found {arrow.text!r}")
            self.skip_statement()
            return None
        dst = self.take()
        if dst.kind != _QSTRING:
            self.fail(dst, f"expected quoted variable name, found {dst.text!r}")
            self.skip_statement()
            return None
        lbracket = self.take()
        if lbracket.kind != "lbracket":
            self.fail(lbracket, f"expected '[', found {lbracket.text!r}")
            self.skip_statement()
            return None
        polarity = self.parse_attr_list(lbracket)
        if polarity is None:
            return None
        if self.peek().kind == "semi":
            self.take()
        source = VariableName.of(src.text)
        target = VariableName.of(dst.text)
        if not source.normalized or not target.normalized:
            self.fail(src, "variable name is empty")
            return None
        return Link(source=source, target=target, polarity=polarity)

    def parse_attr_list(self, open_tok: _Token) -> Polarity | None:
        """Parse `arrowhead = vee|tee ]`, leniently scavenging near misses."""
        if self.strict:
            name = self.take()
            if name.kind != _WORD or name.text != "arrowhead":
                raise DigraphSyntaxError(
                    name.line, name.column,
                    f"expected 'arrowhead', found {name.text!r}")
            eq = self.take()
            if eq.kind != "equals":
                raise DigraphSyntaxError(
                    eq.line, eq.column, f"expected '=', found {eq.text!r}")
            value = self.take()
            if value.kind != _WORD or value.text not in ("vee", "tee"):
                raise DigraphSyntaxError(
                    value.line, value.column,
                    f"expected arrowhead value 'vee' or 'tee', found {value.text!r}")
            close = self.take()
            if close.kind != "rbracket":
                raise DigraphSyntaxError(
                    close.line, close.column, f"expected ']', found {close.text!r}")
            return Polarity.POSITIVE if value.text == "vee" else Polarity.NEGATIVE

        # Lenient: scan key=value pairs up to ']', keep the arrowhead if any.
        polarity: Polarity | None = None
        saw_arrowhead = False
        while True:
            tok = self.take()
            if tok.kind == "rbracket":
                break
            if tok.kind in (_EOF, "rbrace"):
                self.warn(tok, "attribute list is not closed")
                break
            if tok.kind in (_WORD, _QSTRING) and self.peek().kind == "equals":
                key = tok.text
                self.take()  # '='
                value = self.take()
                if key != "arrowhead":
                    self.warn(tok, f"ignoring unknown attribute {key!r}")
                    continue
                saw_arrowhead = True
                if value.text == "vee":
                    polarity = Polarity.POSITIVE
                elif value.text == "tee":
                    polarity = Polarity.NEGATIVE
                else:
                    self.warn(value,
                              f"unknown arrowhead value {value.text!r}; "
                              "defaulting link to positive")
                    polarity = Polarity.POSITIVE
                continue
            self.warn(tok, f"ignoring stray token {tok.text!r} in attribute list")
        if not saw_arrowhead and polarity is None:
            self.warn(open_tok, "attribute list lacks an arrowhead; "
                                "defaulting link to positive")
            polarity = Polarity.POSITIVE
        return polarity


def parse_digraph(
    text: str, mode: ParseMode = ParseMode.STRICT
) -> tuple[CausalLoopDiagram, list[ParseDiagnostic]]:
    """Parse digraph text into a diagram plus diagnostics.

    Strict mode raises DigraphSyntaxError on any grammar violation or
    duplicate ordered pair. Lenient mode never raises: it keeps the first
    link per ordered pair, skips malformed statements, and defaults unknown
    arrowhead values to positive, each with a warning diagnostic. An empty
    graph is valid in both modes.
    """
    strict = mode is ParseMode.STRICT
    tokens, scan_problems = _tokenize(text)
    if strict:
        for p in scan_problems:
            raise DigraphSyntaxError(p.line, p.column, p.message)
    parser = _Parser(tokens, strict=strict)
    parser.diagnostics.extend(scan_problems)

    header = parser.peek()
    has_header = header.kind == _WORD and header.text == "digraph"
    if has_header:
        parser.take()
        if parser.peek().kind == _WORD:
            parser.take()  # optional graph identifier
        brace = parser.take()
        if brace.kind != "lbrace":
            parser.fail(brace, f"expected '{{', found {brace.text!r}")
            if not strict:
                parser.skip_statement()
    else:
        parser.fail(header, "expected 'digraph' header")
        if not strict:
            parser.skip_statement()

    links: list[Link] = []
    seen: dict[tuple[str, str], Link] = {}
    closed = not has_header
    while True:
        tok = parser.peek()
        if tok.kind == _EOF:
            if has_header and not closed:
                parser.fail(tok, "missing closing '}'")
            break
        if tok.kind == "rbrace":
            parser.take()
            closed = True
            trailing = parser.peek()
            if trailing.kind != _EOF:
                parser.fail(trailing,
                            f"unexpected content after closing '}}': {trailing.text!r}")
                if not strict:
                    break
            break
        if tok.kind == "semi":
            if strict:
                parser.fail(tok, "stray ';' without a preceding edge")
            parser.take()
            continue
        stmt_tok = tok
        lk = parser.parse_edge()
        if lk is None:
            continue
        if lk.key in seen:
            if strict:
                raise DigraphSyntaxError(
                    stmt_tok.line, stmt_tok.column,
                    f"duplicate link {lk.source.normalized!r} -> "
                    f"{lk.target.normalized!r}")
            parser.warn(stmt_tok,
                        f"duplicate link {lk.source.normalized!r} -> "
                        f"{lk.target.normalized!r}; keeping the first occurrence")
            continue
        seen[lk.key] = lk
        links.append(lk)

    return build_diagram(links), parser.diagnostics


# --- emitters ----------------------------------------------------------------


def _quote(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


def emit_digraph(d: CausalLoopDiagram) -> str:
    """Emit the canonical digraph text: one edge per line, in link order.

    Deterministic byte-for-byte: equal diagrams produce identical text, and
    strict parsing of the output reproduces the diagram.
    """
    lines = ["digraph {"]
    for lk in d.links:
        lines.append(
            f"{_quote(lk.source.raw)} -> {_quote(lk.target.raw)} "
            f"[arrowhead = {lk.polarity.arrowhead}]"
        )
    lines.append("}")
    return "\n".join(lines)


_DIGRAPH_TOKEN = re.compile(r"\bdigraph\b")
_IDENTIFIER = re.compile(r"[A-Za-z0-9_]+")


def extract_digraph_block(completion: str) -> str:
    """Extract the first digraph block from free-form completion text.

    Returns the substring from a `digraph` token through its brace-balanced
    closing `}` (quote-aware, so braces inside names do not count).
    Surrounding prose and code-fence markers fall away with the slice.
    Raises NoDigraphFound for prose-only completions.
    """
    for m in _DIGRAPH_TOKEN.finditer(completion):
        i = m.end()
        while i < len(completion) and completion[i].isspace():
            i += 1
        ident = _IDENTIFIER.match(completion, i)
        if ident:
            i = ident.end()
            while i < len(completion) and completion[i].isspace():
                i += 1
        if i >= len(completion) or completion[i] != "{":
            continue
        depth = 0
        in_string = False
        j = i
        while j < len(completion):
            c = completion[j]
            if in_string:
                if c == "\\" and j + 1 < len(completion) and completion[j + 1] == '"':
                    j += 2
                    continue
                if c == '"':
                    in_string = False
            elif c == '"':
                in_string = True
            elif c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    return completion[m.start(): j + 1]
            j += 1
        # Unbalanced block: try the next digraph token.
    raise NoDigraphFound("no digraph block found in completion text")


def emit_render_dot(d: CausalLoopDiagram, annotate_loops: bool = False) -> str:
    """Emit renderer-consumable DOT using each variable's display spelling.

    With annotate_loops, every enumerated feedback loop adds a plaintext
    label node ("R1", "B1", ...) preceded by a comment naming the loop's
    member path; renderers that ignore unknown statements degrade cleanly.
    """
    display = {v.normalized: v.raw for v in d.variables}
    lines = ["digraph {"]
    for lk in d.links:
        lines.append(
            f"{_quote(display[lk.source.normalized])} -> "
            f"{_quote(display[lk.target.normalized])} "
            f"[arrowhead = {lk.polarity.arrowhead}]"
        )
    if annotate_loops:
        counters = {LoopKind.REINFORCING: 0, LoopKind.BALANCING: 0}
        for loop in enumerate_loops(d):
            counters[loop.kind] += 1
            label = ("R" if loop.kind is LoopKind.REINFORCING else "B") + str(
                counters[loop.kind])
            path = " -> ".join(
                display[name] for name in loop.member_names + (loop.member_names[0],))
            lines.append(f"// loop {label}: {path}")
            lines.append(f'"{label}" [shape = plaintext]')
    lines.append("}")
    return "\n".join(lines)
