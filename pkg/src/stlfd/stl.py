"""Signal temporal logic: syntax, parsing, and quantitative robustness.

Formulas are built from predicates over named signal channels and the
connectives not/and/or/->, the bounded temporal operators G (always),
F (eventually), and U (until).  Robustness follows the usual max/min
semantics: a predicate evaluates to a signed margin, negation flips the
sign, conjunction takes min, disjunction max, G takes the window min,
F the window max, and U the max over switch points of the min between
the right operand there and the left operand before it.

A signal is a finite sequence of samples, so temporal windows are
clipped to the available samples by default.  A G over an empty clipped
window is vacuously true and yields +cap; an F or U over an empty
window yields -cap.  Robustness values are capped to +-ROB_CAP at the
boundary; the uncapped value is kept alongside.

Satisfaction is robustness at t=0 being >= 0.  Note that a margin of
exactly 0 therefore counts as satisfied, which is the natural reading
for >= and <= predicates but is slightly generous for > and <.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

ROB_CAP = 1e6

COMPARATORS = (">", ">=", "<", "<=", "==")


class StlError(Exception):
    """Base class for errors raised by this module."""


class ParseError(StlError):
    """Syntax error with source position and the tokens that were legal."""

    def __init__(self, message: str, line: int, column: int, expected: Sequence[str] = ()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(detail)


class EvaluationError(StlError):
    """Raised for unknown channels, bad sample indices, or strict-window misses."""


# --------------------------------------------------------------------------
# Syntax
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Inclusive time window [lo, hi] in sample steps."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not (isinstance(self.lo, int) and isinstance(self.hi, int)):
            raise StlError(f"interval bounds must be integers, got [{self.lo},{self.hi}]")
        if self.lo < 0:
            raise StlError(f"interval bounds must be non-negative, got [{self.lo},{self.hi}]")
        if self.lo > self.hi:
            raise StlError(f"empty interval [{self.lo},{self.hi}]: lower bound exceeds upper")

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


class Formula:
    """Base class for formula nodes.  Subclasses are frozen dataclasses."""

    def __str__(self) -> str:
        return format_formula(self)

    def children(self) -> tuple["Formula", ...]:
        return ()

    def walk(self) -> Iterator["Formula"]:
        yield self
        for child in self.children():
            yield from child.walk()

    def channels(self) -> frozenset[str]:
        """All channel names referenced anywhere in the formula."""
        return frozenset(n.channel for n in self.walk() if isinstance(n, Predicate))


@dataclass(frozen=True)
class Predicate(Formula):
    channel: str
    op: str
    threshold: float

    def __post_init__(self) -> None:
        if self.op not in COMPARATORS:
            raise StlError(f"unknown comparator {self.op!r}")
        object.__setattr__(self, "threshold", float(self.threshold))


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Always(Formula):
    interval: Interval
    arg: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Eventually(Formula):
    interval: Interval
    arg: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Until(Formula):
    interval: Interval
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)


def format_formula(f: Formula) -> str:
    """Render a formula to surface syntax that parses back to the same tree.

    Compound operands are parenthesized unconditionally, which keeps the
    printer trivially round-trip safe at the cost of some noise.
    """
    if isinstance(f, Predicate):
        return f"{f.channel} {f.op} {_format_number(f.threshold)}"
    if isinstance(f, Not):
        return f"not ({format_formula(f.arg)})"
    if isinstance(f, And):
        return f"({format_formula(f.left)}) and ({format_formula(f.right)})"
    if isinstance(f, Or):
        return f"({format_formula(f.left)}) or ({format_formula(f.right)})"
    if isinstance(f, Implies):
        return f"({format_formula(f.left)}) -> ({format_formula(f.right)})"
    if isinstance(f, Always):
        return f"G{f.interval}({format_formula(f.arg)})"
    if isinstance(f, Eventually):
        return f"F{f.interval}({format_formula(f.arg)})"
    if isinstance(f, Until):
        return f"({format_formula(f.left)}) U{f.interval} ({format_formula(f.right)})"
    raise StlError(f"not a formula: {f!r}")


def _format_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

_KEYWORDS = {"not", "and", "or", "G", "F", "U"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|>=|<=|==|[><\[\],()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'number' | 'ident' | keyword text | operator text | 'eof'
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup == "ws":
            newlines = lexeme.count("\n")
            if newlines:
                line += newlines
                col = len(lexeme) - lexeme.rfind("\n")
            else:
                col += len(lexeme)
            pos = m.end()
            continue
        if m.lastgroup == "number":
            kind = "number"
        elif m.lastgroup == "ident":
            kind = lexeme if lexeme in _KEYWORDS else "ident"
        else:
            kind = lexeme
        tokens.append(_Token(kind, lexeme, line, col))
        col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    """Recursive descent with precedence not > G/F/U > and > or > ->."""

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: Sequence[str]) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"unexpected {_describe(tok)}", tok.line, tok.column, expected
            )
        return self.next()

    def parse(self) -> Formula:
        f = self.implies()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(
                f"unexpected {_describe(tok)}",
                tok.line,
                tok.column,
                ["and", "or", "->", "U", "end of input"],
            )
        return f

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.next()
            right = self.implies()  # right associative
            return Implies(left, right)
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek().kind == "or":
            self.next()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.peek().kind == "and":
            self.next()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        if self.peek().kind == "U":
            self.next()
            interval = self.interval()
            right = self.until()  # right associative
            return Until(interval, left, right)
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "not":
            self.next()
            return Not(self.unary())
        if tok.kind in ("G", "F"):
            self.next()
            interval = self.interval()
            self.expect("(", ["("])
            arg = self.implies()
            self.expect(")", [")"])
            return Always(interval, arg) if tok.kind == "G" else Eventually(interval, arg)
        if tok.kind == "(":
            self.next()
            f = self.implies()
            self.expect(")", [")"])
            return f
        if tok.kind == "ident":
            return self.predicate()
        raise ParseError(
            f"unexpected {_describe(tok)}",
            tok.line,
            tok.column,
            ["not", "G", "F", "(", "identifier"],
        )

    def predicate(self) -> Formula:
        name = self.next()
        op = self.peek()
        if op.kind not in COMPARATORS:
            raise ParseError(
                f"unexpected {_describe(op)}", op.line, op.column, list(COMPARATORS)
            )
        self.next()
        num = self.expect("number", ["number"])
        return Predicate(name.text, op.kind, float(num.text))

    def interval(self) -> Interval:
        self.expect("[", ["["])
        lo = self.interval_bound()
        self.expect(",", [","])
        hi = self.interval_bound()
        close = self.expect("]", ["]"])
        if lo > hi:
            raise ParseError(
                f"empty interval [{lo},{hi}]: lower bound exceeds upper",
                close.line,
                close.column,
            )
        return Interval(lo, hi)

    def interval_bound(self) -> int:
        tok = self.expect("number", ["non-negative integer"])
        if not tok.text.isdigit():
            raise ParseError(
                f"interval bound {tok.text!r} is not a non-negative integer",
                tok.line,
                tok.column,
                ["non-negative integer"],
            )
        return int(tok.text)


def _describe(tok: _Token) -> str:
    return "end of input" if tok.kind == "eof" else f"token {tok.text!r}"


def parse_formula(text: str) -> Formula:
    """Parse surface syntax into a formula tree.

    Raises ParseError with line, column, and the set of expected tokens on
    malformed input, including intervals whose lower bound exceeds the upper.
    """
    return _Parser(_tokenize(text)).parse()


# --------------------------------------------------------------------------
# Signals
# --------------------------------------------------------------------------


class Signal:
    """A finite multi-channel discrete-time signal.

    Channels map names to equal-length sequences of floats, one value per
    sample step.  Sample index 0 is the start of the signal.
    """

    __slots__ = ("channels", "length")

    def __init__(self, channels: Mapping[str, Sequence[float]]):
        if not channels:
            raise StlError("signal needs at least one channel")
        converted: dict[str, tuple[float, ...]] = {}
        length = None
        for name, values in channels.items():
            vals = tuple(float(v) for v in values)
            if length is None:
                length = len(vals)
            elif len(vals) != length:
                raise StlError(
                    f"channel {name!r} has {len(vals)} samples, expected {length}"
                )
            converted[name] = vals
        if length == 0:
            raise StlError("signal must contain at least one sample")
        self.channels: dict[str, tuple[float, ...]] = converted
        self.length: int = length  # type: ignore[assignment]

    def __len__(self) -> int:
        return self.length

    def value(self, channel: str, t: int) -> float:
        try:
            series = self.channels[channel]
        except KeyError:
            raise EvaluationError(
                f"formula references channel {channel!r}; signal has "
                f"{sorted(self.channels)}"
            ) from None
        return series[t]

    def prefix(self, length: int) -> "Signal":
        if not (1 <= length <= self.length):
            raise StlError(f"prefix length {length} outside 1..{self.length}")
        return Signal({k: v[:length] for k, v in self.channels.items()})


# --------------------------------------------------------------------------
# Quantitative semantics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Robustness:
    """A robustness degree: `value` is capped to +-cap, `raw` is not.

    `raw` is +-inf exactly when a vacuous window made the verdict trivial.
    """

    raw: float
    value: float

    @property
    def satisfied(self) -> bool:
        return self.value >= 0.0


def predicate_margin(op: str, sample: float, threshold: float) -> float:
    """Signed satisfaction margin of `sample <op> threshold`."""
    if op in (">", ">="):
        return sample - threshold
    if op in ("<", "<="):
        return threshold - sample
    if op == "==":
        return -abs(sample - threshold)
    raise StlError(f"unknown comparator {op!r}")


def robustness(
    formula: Formula,
    signal: Signal,
    t: int = 0,
    *,
    clip: bool = True,
    cap: float = ROB_CAP,
    squash_scale: float | None = None,
) -> Robustness:
    """Robustness of `formula` over `signal` at sample index `t`.

    With clip=True (the default) temporal windows are truncated to the
    samples the signal actually has.  With clip=False a window reaching
    past the end of the signal raises EvaluationError instead.

    squash_scale, when given, maps the capped value through
    tanh(value / squash_scale) so robustness from formulas over channels
    with very different ranges can be combined on one scale.  The default
    leaves values untouched.
    """
    if not isinstance(t, int) or not (0 <= t < signal.length):
        raise EvaluationError(f"sample index {t} outside 0..{signal.length - 1}")
    raw = _rho(formula, signal, t, clip)
    value = max(-cap, min(cap, raw))
    if squash_scale is not None:
        if squash_scale <= 0:
            raise StlError(f"squash_scale must be positive, got {squash_scale}")
        value = math.tanh(value / squash_scale)
    return Robustness(raw=raw, value=value)


def satisfies(formula: Formula, signal: Signal) -> bool:
    """Whether the signal satisfies the formula at its start."""
    return robustness(formula, signal, 0).satisfied


def robustness_prefix(formula: Formula, partial: Signal, *, cap: float = ROB_CAP) -> Robustness:
    """Robustness of the formula over an incomplete signal.

    The prefix is treated as the whole signal and windows are clipped, so
    the verdict may still change as more samples arrive.  Useful for
    monitoring a trajectory while it is being produced.
    """
    return robustness(formula, partial, 0, clip=True, cap=cap)


def _window(interval: Interval, t: int, length: int, clip: bool) -> range:
    lo = t + interval.lo
    hi = t + interval.hi
    if not clip and hi > length - 1:
        raise EvaluationError(
            f"window [{lo},{hi}] reaches past the last sample {length - 1} "
            "and clipping is disabled"
        )
    return range(lo, min(hi, length - 1) + 1)


def _rho(f: Formula, sig: Signal, t: int, clip: bool) -> float:
    if isinstance(f, Predicate):
        return predicate_margin(f.op, sig.value(f.channel, t), f.threshold)
    if isinstance(f, Not):
        return -_rho(f.arg, sig, t, clip)
    if isinstance(f, And):
        return min(_rho(f.left, sig, t, clip), _rho(f.right, sig, t, clip))
    if isinstance(f, Or):
        return max(_rho(f.left, sig, t, clip), _rho(f.right, sig, t, clip))
    if isinstance(f, Implies):
        return max(-_rho(f.left, sig, t, clip), _rho(f.right, sig, t, clip))
    if isinstance(f, Always):
        window = _window(f.interval, t, sig.length, clip)
        return min((_rho(f.arg, sig, tau, clip) for tau in window), default=math.inf)
    if isinstance(f, Eventually):
        window = _window(f.interval, t, sig.length, clip)
        return max((_rho(f.arg, sig, tau, clip) for tau in window), default=-math.inf)
    if isinstance(f, Until):
        window = _window(f.interval, t, sig.length, clip)
        best = -math.inf
        for tau1 in window:
            here = _rho(f.right, sig, tau1, clip)
            before = min(
                (_rho(f.left, sig, tau2, clip) for tau2 in range(t, tau1)),
                default=math.inf,
            )
            best = max(best, min(here, before))
        return best
    raise StlError(f"not a formula: {f!r}")
