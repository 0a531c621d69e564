"""SPICE-subset netlist parsing and serialization.

The grammar is line oriented: a free-text title line, then one statement
per line.  Supported cards are R/L/C two-terminal elements (L and C take
an optional ``Q=<value>``), K mutual-coupling entries referencing two
inductors, ``P<idx>`` port declarations with a real reference impedance,
a single ``.ac lin <count> <start> <stop>`` sweep card and ``.end``.
Lines beginning with ``*`` and trailing ``; ...`` comments are preserved
through serialization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class NetlistError(ValueError):
    """Parse or validation failure, carrying the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message}, line {line}"
        super().__init__(message)


_SUFFIXES = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "meg": 1e6,
    "g": 1e9,
    "t": 1e12,
}

_VALUE_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([a-zA-Z]*)$")


def parse_value(token: str) -> float:
    """Parse a numeric token with an optional SI suffix.

    ``m`` is milli and ``meg`` is 1e6, following SPICE convention; suffixes
    are case-insensitive.
    """
    m = _VALUE_RE.match(token.strip())
    if not m:
        raise ValueError(f"malformed value {token!r}")
    mantissa, suffix = m.group(1), m.group(2).lower()
    if suffix == "":
        return float(mantissa)
    if suffix not in _SUFFIXES:
        raise ValueError(f"unknown suffix {suffix!r} in {token!r}")
    return float(mantissa) * _SUFFIXES[suffix]


# Suffix table for rendering, ordered by magnitude.
_RENDER_SUFFIXES = [
    (1e12, "t"),
    (1e9, "g"),
    (1e6, "meg"),
    (1e3, "k"),
    (1.0, ""),
    (1e-3, "m"),
    (1e-6, "u"),
    (1e-9, "n"),
    (1e-12, "p"),
    (1e-15, "f"),
]


def render_value(value: float) -> str:
    """Render a value with an SI suffix, keeping >= 12 significant digits."""
    if value == 0:
        return "0"
    mag = abs(value)
    for scale, suffix in _RENDER_SUFFIXES:
        if mag >= scale:
            mant = value / scale
            if abs(mant) < 1000 or suffix == "t":
                text = f"{mant:.12g}"
                # the mantissa may round up to 1000 at the suffix
                # boundary; re-render the rounded value so the emitted
                # text is already in canonical form
                if abs(float(text)) >= 1000 and suffix != "t":
                    return render_value(float(text) * scale)
                return f"{text}{suffix}"
    # below 1e-15: render femto with a small mantissa
    return f"{value / 1e-15:.12g}f"


@dataclass(frozen=True)
class Element:
    """Two-terminal R/L/C element."""

    name: str
    kind: str  # "R", "L" or "C"
    nodes: tuple[str, str]
    value: float
    q: float | None = None
    comment: str | None = None


@dataclass(frozen=True)
class Coupling:
    """Mutual coupling between two named inductors, |k| <= 1."""

    name: str
    l1: str
    l2: str
    k: float
    comment: str | None = None


@dataclass(frozen=True)
class Port:
    """Numbered port between two nodes with a real reference impedance."""

    index: int
    nodes: tuple[str, str]
    ref: float
    comment: str | None = None


@dataclass(frozen=True)
class AcSweep:
    """Linear frequency sweep: ``.ac lin count start stop``."""

    count: int
    start: float
    stop: float

    def frequencies(self):
        import numpy as np

        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class CommentLine:
    text: str


@dataclass
class Netlist:
    title: str
    statements: list = field(default_factory=list)  # declaration order
    ac: AcSweep | None = None

    @property
    def elements(self) -> list[Element]:
        return [s for s in self.statements if isinstance(s, Element)]

    @property
    def couplings(self) -> list[Coupling]:
        return [s for s in self.statements if isinstance(s, Coupling)]

    @property
    def ports(self) -> list[Port]:
        return sorted(
            (s for s in self.statements if isinstance(s, Port)),
            key=lambda p: p.index,
        )

    def nodes(self) -> list[str]:
        seen: dict[str, None] = {}
        for s in self.statements:
            if isinstance(s, (Element, Port)):
                for n in s.nodes:
                    seen.setdefault(n, None)
        return list(seen)


def _split_comment(line: str) -> tuple[str, str | None]:
    if ";" in line:
        body, comment = line.split(";", 1)
        return body.rstrip(), comment.strip()
    return line.rstrip(), None


def parse(text: str) -> Netlist:
    """Parse netlist text; raises NetlistError with a line number on failure."""
    raw_lines = text.splitlines()
    if not raw_lines or not raw_lines[0].strip():
        raise NetlistError("missing title line", 1)
    net = Netlist(title=raw_lines[0].rstrip())
    names: dict[str, int] = {}
    inductors: dict[str, str] = {}
    ended = False

    for lineno, raw in enumerate(raw_lines[1:], start=2):
        line = raw.rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("*"):
            net.statements.append(CommentLine(line.strip()))
            continue
        if ended:
            raise NetlistError(f"statement after .end: {line.strip()!r}", lineno)
        body, comment = _split_comment(line)
        tokens = body.split()
        if not tokens:
            if comment is not None:
                net.statements.append(CommentLine("; " + comment))
            continue
        head = tokens[0]

        if head.lower() == ".ac":
            if net.ac is not None:
                raise NetlistError("duplicate .ac card", lineno)
            if len(tokens) != 5 or tokens[1].lower() != "lin":
                raise NetlistError(f"malformed .ac card {body.strip()!r}", lineno)
            try:
                count = int(tokens[2])
                start = parse_value(tokens[3])
                stop = parse_value(tokens[4])
            except ValueError as exc:
                raise NetlistError(str(exc), lineno) from exc
            if count < 1 or start <= 0 or stop < start:
                raise NetlistError("invalid .ac range", lineno)
            net.ac = AcSweep(count, start, stop)
            continue
        if head.lower() == ".end":
            ended = True
            continue
        if head.startswith("."):
            raise NetlistError(f"unknown directive {head!r}", lineno)

        kind = head[0].upper()
        if kind in "RLC":
            if len(tokens) not in (4, 5):
                raise NetlistError(f"malformed {kind} card {body.strip()!r}", lineno)
            name = head
            key = name.lower()
            if key in names:
                raise NetlistError(f"duplicate element name {name!r}", lineno)
            try:
                value = parse_value(tokens[3])
            except ValueError as exc:
                raise NetlistError(str(exc), lineno) from exc
            q = None
            if len(tokens) == 5:
                if kind == "R" or not tokens[4].lower().startswith("q="):
                    raise NetlistError(f"unexpected token {tokens[4]!r}", lineno)
                try:
                    q = parse_value(tokens[4][2:])
                except ValueError as exc:
                    raise NetlistError(str(exc), lineno) from exc
                if q <= 0:
                    raise NetlistError(f"nonpositive Q {tokens[4]!r}", lineno)
            if value < 0 or (kind in "RL" and value == 0):
                raise NetlistError(f"nonpositive value for {name!r}", lineno)
            names[key] = lineno
            if kind == "L":
                inductors[key] = name
            net.statements.append(
                Element(name, kind, (tokens[1], tokens[2]), value, q, comment)
            )
        elif kind == "K":
            if len(tokens) != 4:
                raise NetlistError(f"malformed K card {body.strip()!r}", lineno)
            name = head
            if name.lower() in names:
                raise NetlistError(f"duplicate element name {name!r}", lineno)
            try:
                k = parse_value(tokens[3])
            except ValueError as exc:
                raise NetlistError(str(exc), lineno) from exc
            if abs(k) > 1:
                raise NetlistError(f"coupling |k| > 1 in {name!r}", lineno)
            names[name.lower()] = lineno
            net.statements.append(
                Coupling(name, tokens[1], tokens[2], k, comment)
            )
        elif kind == "P":
            if len(tokens) != 4:
                raise NetlistError(f"malformed port card {body.strip()!r}", lineno)
            try:
                index = int(head[1:])
            except ValueError as exc:
                raise NetlistError(f"malformed port index {head!r}", lineno) from exc
            if head.lower() in names:
                raise NetlistError(f"duplicate element name {head!r}", lineno)
            try:
                ref = parse_value(tokens[3])
            except ValueError as exc:
                raise NetlistError(str(exc), lineno) from exc
            if ref <= 0:
                raise NetlistError(f"nonpositive port reference {tokens[3]!r}", lineno)
            names[head.lower()] = lineno
            net.statements.append(Port(index, (tokens[1], tokens[2]), ref, comment))
        else:
            raise NetlistError(f"unknown element kind {head!r}", lineno)

    # cross-statement validation
    for s in net.statements:
        if isinstance(s, Coupling):
            for ref in (s.l1, s.l2):
                if ref.lower() not in inductors:
                    raise NetlistError(
                        f"dangling K reference {ref!r} in {s.name!r}",
                        _statement_line(raw_lines, s.name),
                    )
    if net.ac is None:
        raise NetlistError("missing .ac card")
    if "0" not in net.nodes():
        raise NetlistError("missing ground node 0")
    ports = net.ports
    if ports:
        indices = [p.index for p in ports]
        if sorted(indices) != list(range(1, len(indices) + 1)):
            raise NetlistError(f"ports not numbered contiguously from 1: {sorted(indices)}")
    return net


def _statement_line(raw_lines: list[str], name: str) -> int | None:
    for i, raw in enumerate(raw_lines, start=1):
        tokens = raw.split()
        if tokens and tokens[0] == name:
            return i
    return None


def serialize(net: Netlist) -> str:
    """Canonical text form; parse(serialize(n)) is structurally equal to n."""
    out = [net.title]
    for s in net.statements:
        if isinstance(s, CommentLine):
            out.append(s.text)
            continue
        if isinstance(s, Element):
            line = f"{s.name} {s.nodes[0]} {s.nodes[1]} {render_value(s.value)}"
            if s.q is not None:
                line += f" Q={render_value(s.q)}"
        elif isinstance(s, Coupling):
            line = f"{s.name} {s.l1} {s.l2} {render_value(s.k)}"
        elif isinstance(s, Port):
            line = f"P{s.index} {s.nodes[0]} {s.nodes[1]} {render_value(s.ref)}"
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {s!r}")
        if getattr(s, "comment", None):
            line += f" ; {s.comment}"
        out.append(line)
    if net.ac is not None:
        out.append(
            f".ac lin {net.ac.count} {render_value(net.ac.start)} "
            f"{render_value(net.ac.stop)}"
        )
    out.append(".end")
    return "\n".join(out) + "\n"
