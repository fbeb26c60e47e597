"""Temporal sequence queries over {correct, incorrect, hint} event streams.

Pattern language (whitespace-insensitive)::

    pattern := alt
    alt     := seq ("|" seq)*
    seq     := rep+
    rep     := atom quant?
    atom    := "C" | "I" | "H" | "." | "(" alt ")"
    quant   := "+" | "*" | "{" int ("," int?)? "}"

Matching is non-overlapping leftmost-longest: scan left to right, at each
position take the longest possible match, then resume immediately after it.
Empty matches are never reported. The engine compiles the pattern tree to an
epsilon-NFA and scans streams linearly.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Mapping, Sequence, Union

from .provenance import Attempt, SegmentKind, attempt_id

ALPHABET = ("C", "I", "H")

_KIND_TO_SYMBOL = {
    SegmentKind.CORRECT: "C",
    SegmentKind.INCORRECT: "I",
    SegmentKind.HINT: "H",
}


class PatternSyntaxError(ValueError):
    """Unparseable pattern text; carries the byte offset of the failure."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"at offset {offset}: {message}")
        self.offset = offset
        self.message = message


class SemanticError(ValueError):
    """Well-formed syntax with an impossible meaning (e.g. {3,2})."""


# ---------------------------------------------------------------------------
# Pattern tree


@dataclass(frozen=True)
class Literal:
    symbol: str


@dataclass(frozen=True)
class Wildcard:
    pass


@dataclass(frozen=True)
class Concat:
    parts: tuple["Node", ...]


@dataclass(frozen=True)
class Alternation:
    options: tuple["Node", ...]


@dataclass(frozen=True)
class Repeat:
    node: "Node"
    min: int
    max: int | None  # None = unbounded


Node = Union[Literal, Wildcard, Concat, Alternation, Repeat]


@dataclass(frozen=True)
class SequencePattern:
    root: Node
    scope: str = "attempt"  # attempt | student
    same_step: bool = False


@dataclass(frozen=True)
class EventToken:
    symbol: str  # C | I | H
    step: str = ""
    at: datetime | None = None


@dataclass(frozen=True)
class Match:
    stream_id: str
    start: int
    end: int  # inclusive
    symbols: str


# ---------------------------------------------------------------------------
# Parser

_ATOM_START = "CIH.("


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> PatternSyntaxError:
        return PatternSyntaxError(self.pos, message)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip_ws()
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def take(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        return ch

    def parse(self) -> Node:
        node = self.parse_alt()
        if self.peek() is not None:
            raise self.error(f"unexpected {self.text[self.pos]!r}")
        return node

    def parse_alt(self) -> Node:
        options = [self.parse_seq()]
        while self.peek() == "|":
            self.take()
            options.append(self.parse_seq())
        if len(options) == 1:
            return options[0]
        return Alternation(tuple(options))

    def parse_seq(self) -> Node:
        parts: list[Node] = []
        while self.peek() is not None and self.peek() in _ATOM_START:
            parts.append(self.parse_rep())
        if not parts:
            raise self.error("expected 'C', 'I', 'H', '.' or '('")
        if len(parts) == 1:
            return parts[0]
        return Concat(tuple(parts))

    def parse_rep(self) -> Node:
        atom = self.parse_atom()
        ch = self.peek()
        if ch == "+":
            self.take()
            return Repeat(atom, 1, None)
        if ch == "*":
            self.take()
            return Repeat(atom, 0, None)
        if ch == "{":
            self.take()
            low = self.parse_int()
            high: int | None = low
            if self.peek() == ",":
                self.take()
                ch = self.peek()
                high = self.parse_int() if ch is not None and ch.isdigit() else None
            if self.peek() != "}":
                raise self.error("expected '}'")
            self.take()
            if high is not None and low > high:
                raise SemanticError(f"repetition bounds out of order: {{{low},{high}}}")
            return Repeat(atom, low, high)
        return atom

    def parse_atom(self) -> Node:
        ch = self.peek()
        if ch is None:
            raise self.error("expected 'C', 'I', 'H', '.' or '('")
        if ch in "CIH":
            self.take()
            return Literal(ch)
        if ch == ".":
            self.take()
            return Wildcard()
        if ch == "(":
            self.take()
            inner = self.parse_alt()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.take()
            return inner
        raise self.error(f"expected 'C', 'I', 'H', '.' or '(', got {ch!r}")

    def parse_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected integer")
        return int(self.text[start:self.pos])


def parse_pattern(text: str, scope: str = "attempt", same_step: bool = False) -> SequencePattern:
    """Compile pattern text; raises PatternSyntaxError / SemanticError."""
    if scope not in ("attempt", "student"):
        raise SemanticError(f"unknown scope: {scope!r}")
    root = _Parser(text).parse()
    return SequencePattern(root=root, scope=scope, same_step=same_step)


def pretty_print(node: Node) -> str:
    """Render a pattern tree back to source text (re-parses to an equal tree)."""
    if isinstance(node, Literal):
        return node.symbol
    if isinstance(node, Wildcard):
        return "."
    if isinstance(node, Concat):
        return "".join(_wrap(part, in_concat=True) for part in node.parts)
    if isinstance(node, Alternation):
        return "|".join(
            f"({pretty_print(opt)})" if isinstance(opt, Alternation) else pretty_print(opt)
            for opt in node.options
        )
    if isinstance(node, Repeat):
        body = _wrap(node.node, in_repeat=True)
        if node.min == 1 and node.max is None:
            return body + "+"
        if node.min == 0 and node.max is None:
            return body + "*"
        if node.max is None:
            return f"{body}{{{node.min},}}"
        if node.min == node.max:
            return f"{body}{{{node.min}}}"
        return f"{body}{{{node.min},{node.max}}}"
    raise TypeError(f"not a pattern node: {node!r}")


def _wrap(node: Node, in_concat: bool = False, in_repeat: bool = False) -> str:
    text = pretty_print(node)
    needs_parens = (
        isinstance(node, Alternation)
        or (in_repeat and isinstance(node, (Concat, Repeat)))
        or (in_concat and isinstance(node, Concat))
    )
    return f"({text})" if needs_parens else text


# ---------------------------------------------------------------------------
# NFA engine

_EPSILON = None


class _Nfa:
    """Epsilon-NFA over the three-symbol alphabet; states are ints."""

    def __init__(self):
        self.transitions: list[list[tuple[str | None, int]]] = []
        self.start = self.new_state()
        self.accept = self.new_state()

    def new_state(self) -> int:
        self.transitions.append([])
        return len(self.transitions) - 1

    def add(self, src: int, label: str | None, dst: int) -> None:
        self.transitions[src].append((label, dst))

    def closure(self, states: set[int]) -> frozenset[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            state = stack.pop()
            for label, dst in self.transitions[state]:
                if label is _EPSILON and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return frozenset(seen)

    def step(self, states: frozenset[int], symbol: str) -> set[int]:
        out: set[int] = set()
        for state in states:
            for label, dst in self.transitions[state]:
                if label is not _EPSILON and (label == "." or label == symbol):
                    out.add(dst)
        return out


def _compile_into(nfa: _Nfa, node: Node) -> tuple[int, int]:
    """Thompson construction; returns (entry, exit) states for the fragment."""
    if isinstance(node, Literal):
        entry, exit_ = nfa.new_state(), nfa.new_state()
        nfa.add(entry, node.symbol, exit_)
        return entry, exit_
    if isinstance(node, Wildcard):
        entry, exit_ = nfa.new_state(), nfa.new_state()
        nfa.add(entry, ".", exit_)
        return entry, exit_
    if isinstance(node, Concat):
        entry, cursor = None, None
        for part in node.parts:
            p_entry, p_exit = _compile_into(nfa, part)
            if entry is None:
                entry = p_entry
            else:
                nfa.add(cursor, _EPSILON, p_entry)
            cursor = p_exit
        assert entry is not None and cursor is not None
        return entry, cursor
    if isinstance(node, Alternation):
        entry, exit_ = nfa.new_state(), nfa.new_state()
        for option in node.options:
            o_entry, o_exit = _compile_into(nfa, option)
            nfa.add(entry, _EPSILON, o_entry)
            nfa.add(o_exit, _EPSILON, exit_)
        return entry, exit_
    if isinstance(node, Repeat):
        # Expand counted repetition: min mandatory copies, then either a star
        # loop (unbounded) or max-min optional copies.
        entry = nfa.new_state()
        cursor = entry
        for _ in range(node.min):
            c_entry, c_exit = _compile_into(nfa, node.node)
            nfa.add(cursor, _EPSILON, c_entry)
            cursor = c_exit
        if node.max is None:
            loop_entry, loop_exit = _compile_into(nfa, node.node)
            hub = nfa.new_state()
            nfa.add(cursor, _EPSILON, hub)
            nfa.add(hub, _EPSILON, loop_entry)
            nfa.add(loop_exit, _EPSILON, hub)
            return entry, hub
        for _ in range(node.max - node.min):
            c_entry, c_exit = _compile_into(nfa, node.node)
            skip = nfa.new_state()
            nfa.add(cursor, _EPSILON, c_entry)
            nfa.add(cursor, _EPSILON, skip)
            nfa.add(c_exit, _EPSILON, skip)
            cursor = skip
        return entry, cursor
    raise TypeError(f"not a pattern node: {node!r}")


def compile_nfa(root: Node) -> _Nfa:
    nfa = _Nfa()
    entry, exit_ = _compile_into(nfa, root)
    nfa.add(nfa.start, _EPSILON, entry)
    nfa.add(exit_, _EPSILON, nfa.accept)
    return nfa


def _longest_match_end(nfa: _Nfa, symbols: Sequence[str], start: int, limit: int) -> int | None:
    """Exclusive end of the longest match beginning at ``start``, or None."""
    states = nfa.closure({nfa.start})
    best = start if nfa.accept in states else None
    pos = start
    while pos < limit:
        moved = nfa.step(states, symbols[pos])
        if not moved:
            break
        states = nfa.closure(moved)
        pos += 1
        if nfa.accept in states:
            best = pos
    return best


def find_matches(
    pattern: SequencePattern,
    streams: Mapping[str, Sequence[EventToken]],
) -> list[Match]:
    """Non-overlapping leftmost-longest matches, ordered by (stream id, start).

    With ``same_step`` set, a match may only span tokens that share one
    selection id. Empty matches are skipped.
    """
    nfa = compile_nfa(pattern.root)
    matches: list[Match] = []
    for stream_id in sorted(streams):
        tokens = streams[stream_id]
        symbols = [token.symbol for token in tokens]
        n = len(symbols)
        i = 0
        while i < n:
            limit = n
            if pattern.same_step:
                limit = i + 1
                while limit < n and tokens[limit].step == tokens[i].step:
                    limit += 1
            end = _longest_match_end(nfa, symbols, i, limit)
            if end is not None and end > i:
                matches.append(
                    Match(
                        stream_id=stream_id,
                        start=i,
                        end=end - 1,
                        symbols="".join(symbols[i:end]),
                    )
                )
                i = end
            else:
                i += 1
    return matches


# ---------------------------------------------------------------------------
# Token streams from provenance


def tokenize(attempt: Attempt) -> list[EventToken]:
    """One token per graded/hint segment in time order; start/done emit none."""
    return [
        EventToken(symbol=_KIND_TO_SYMBOL[segment.kind], step=step.selection, at=segment.at)
        for step, segment in attempt.chronological_segments()
    ]


def build_streams(attempts: Iterable[Attempt], scope: str) -> dict[str, list[EventToken]]:
    """Group attempts into per-attempt or per-student token streams."""
    if scope == "attempt":
        return {attempt_id(a.key): tokenize(a) for a in attempts}
    if scope == "student":
        streams: dict[str, list[EventToken]] = {}
        for attempt in attempts:
            streams.setdefault(attempt.key.user_id, []).extend(tokenize(attempt))
        for tokens in streams.values():
            tokens.sort(key=lambda t: t.at)  # stable: ties keep attempt order
        return streams
    raise SemanticError(f"unknown scope: {scope!r}")
