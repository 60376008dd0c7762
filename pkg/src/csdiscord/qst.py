"""Reader and writer for ``qst1`` two-qubit state files.

Grammar (UTF-8, ``#`` starts a comment, blank lines ignored)::

    format qst1
    kind matrix | cs | x
    <payload>

The payload is whitespace-separated decimal reals on any number of lines:
32 numbers for ``matrix`` (row-major ``re im`` pairs of the 16 entries) or
7 numbers for ``cs`` (p1..p7) and ``x`` (q1..q7).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidState, ParseError
from .states import CsParams, DensityMatrix, XParams, cs_to_matrix, x_to_matrix

KINDS = ("matrix", "cs", "x")
PAYLOAD_SIZE = {"matrix": 32, "cs": 7, "x": 7}
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")


@dataclass(frozen=True)
class StateFile:
    kind: str
    matrix: DensityMatrix
    params: CsParams | XParams | None = None


def _tokens(text):
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        for m in re.finditer(r"\S+", body):
            yield m.group(), lineno, m.start() + 1


def parse_state(text) -> StateFile:
    toks = list(_tokens(text))
    pos = 0

    def expect(word):
        nonlocal pos
        if pos >= len(toks):
            raise ParseError(f"unexpected end of input, expected {word!r}")
        tok, line, col = toks[pos]
        if tok != word:
            raise ParseError(f"expected {word!r}, got {tok!r}", line, col)
        pos += 1
        return toks[pos] if pos < len(toks) else None

    expect("format")
    if pos >= len(toks):
        raise ParseError("missing format tag")
    tag, line, col = toks[pos]
    if tag != "qst1":
        raise ParseError(f"unsupported format {tag!r}", line, col)
    pos += 1
    expect("kind")
    if pos >= len(toks):
        raise ParseError("missing kind")
    kind, line, col = toks[pos]
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", line, col)
    pos += 1

    values = []
    for tok, line, col in toks[pos:]:
        if not _NUMBER.match(tok):
            raise ParseError(f"not a decimal number: {tok!r}", line, col)
        values.append(float(tok))
    if len(values) != PAYLOAD_SIZE[kind]:
        last = toks[-1]
        raise ParseError(f"kind {kind} needs {PAYLOAD_SIZE[kind]} numbers, got {len(values)}", last[1])

    if kind == "cs":
        p = CsParams(*values)
        return StateFile(kind, cs_to_matrix(p), p)
    if kind == "x":
        q = XParams(*values)
        return StateFile(kind, x_to_matrix(q), q)
    m = np.array(values[0::2]) + 1j * np.array(values[1::2])
    return StateFile(kind, DensityMatrix(m.reshape(4, 4)))


def read_state(path) -> StateFile:
    return parse_state(Path(path).read_text(encoding="utf-8"))


def _fmt(v):
    v = float(v)
    return "%.17g" % (0.0 if v == 0 else v)


def format_state(obj, comments=()) -> str:
    """Serialize a DensityMatrix (or matrix), CsParams or XParams as qst1 text."""
    lines = ["format qst1"]
    if isinstance(obj, CsParams):
        lines += ["kind cs", " ".join(_fmt(v) for v in obj.as_tuple())]
    elif isinstance(obj, XParams):
        lines += ["kind x", " ".join(_fmt(v) for v in obj.as_tuple())]
    else:
        m = np.asarray(obj, dtype=np.complex128)
        if m.shape != (4, 4):
            raise InvalidState("state matrix must be 4x4", "finite")
        lines.append("kind matrix")
        for row in m:
            lines.append("  ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in row))
    lines += [f"# {c}" if c else "#" for c in comments]
    return "\n".join(lines) + "\n"
