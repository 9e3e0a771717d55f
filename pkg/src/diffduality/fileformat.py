"""Line-oriented text format for operators and metrics.

Operator documents::

    vars: x1,x2
    in: eta[2] weights=1,1 labels=eta1,eta2
    out: zeta[1]
    entry 1 1: d{1,0} - x2
    entry 1 2: d{0,1}

Rows and columns are 1-based.  A term is an optional coefficient followed by
an optional ``d{e1,...,eN}``; a missing coefficient means 1 and a missing
derivative part means order 0.  ``#`` starts a comment line.

Metric documents list ``omega I J: expr`` lines after ``vars:``; the
dimension is the number of variables and omitted entries are zero.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .coefficients import ExprSyntaxError, RatFunc, _Parser, tokenize
from .diffop import DiffOp, SpaceSpec, graded_lex_key


class DocumentError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        where = f"line {line}" + (f", column {col}" if col else "") + ": " if line is not None else ""
        super().__init__(where + message)


class DimensionMismatch(DocumentError):
    pass


_SPACE = re.compile(r"^\s*([^\s\[\]]+)\[(\d+)\]((?:\s+\w+=\S+)*)\s*$")
_ENTRY = re.compile(r"^entry\s+(\d+)\s+(\d+)\s*:(.*)$")
_OMEGA = re.compile(r"^omega\s+(\d+)\s+(\d+)\s*:(.*)$")


def _parse_vars(text: str, lineno: int) -> int:
    names = [v.strip() for v in text.split(",") if v.strip()]
    if not names:
        raise DocumentError("no variables declared", lineno)
    for k, v in enumerate(names):
        if v != f"x{k + 1}":
            raise DocumentError(f"variables must be x1..xN in order, got {v!r}", lineno)
    return len(names)


def _parse_space(text: str, lineno: int) -> SpaceSpec:
    m = _SPACE.match(text)
    if not m:
        raise DocumentError(f"malformed space declaration {text.strip()!r}", lineno)
    name, dim, opts = m.group(1), int(m.group(2)), m.group(3)
    weights = labels = None
    for opt in opts.split():
        key, _, val = opt.partition("=")
        items = val.split(",")
        if key == "weights":
            try:
                weights = [Fraction(w) for w in items]
            except (ValueError, ZeroDivisionError):
                raise DocumentError(f"bad weights {val!r}", lineno) from None
        elif key == "labels":
            labels = items
        else:
            raise DocumentError(f"unknown option {key!r}", lineno)
    for what, vals in (("weights", weights), ("labels", labels)):
        if vals is not None and len(vals) != dim:
            raise DimensionMismatch(f"{len(vals)} {what} for dimension {dim}", lineno)
    try:
        return SpaceSpec.make(name, dim, labels, weights)
    except ValueError as exc:
        raise DocumentError(str(exc), lineno) from None


def _split_terms(tokens):
    """Split a token list at top-level ``+``/``-``; returns ``(sign, tokens)`` pairs."""
    terms, cur, depth, sign = [], [], 0, 1
    prev = None
    for tok in tokens:
        kind, val, _ = tok
        if kind == "op" and val in "+-" and depth == 0 and not (prev and prev[0] == "op" and prev[1] in "^*/("):
            if cur:
                terms.append((sign, cur))
            cur = []
            sign = -1 if val == "-" else 1
            prev = tok
            continue
        if kind == "op" and val == "(":
            depth += 1
        elif kind == "op" and val == ")":
            depth -= 1
        cur.append(tok)
        prev = tok
    if cur:
        terms.append((sign, cur))
    return terms


def parse_entry(text: str, nvars: int, lineno: int | None = None, offset: int = 0) -> dict:
    """Parse ``TERM (+ TERM)*`` into ``{mu: RatFunc}``."""
    try:
        tokens = tokenize(text)[:-1]
    except ExprSyntaxError as exc:
        raise DocumentError(exc.args[0].split(": ", 1)[-1], lineno, (exc.col or 0) + offset) from None
    if not tokens:
        raise DocumentError("empty entry", lineno, offset + 1)
    out: dict = {}
    for sign, toks in _split_terms(tokens):
        mu = (0,) * nvars
        if toks[-1][0] == "dop":
            kind, val, col = toks.pop()
            try:
                mu = tuple(int(e) for e in val[2:-1].split(","))
            except ValueError:
                raise DocumentError(f"bad derivative {val!r}", lineno, col + offset) from None
            if len(mu) != nvars or any(e < 0 for e in mu):
                raise DocumentError(f"derivative {val!r} needs {nvars} nonnegative exponents", lineno, col + offset)
            if toks and toks[-1][0] == "op" and toks[-1][1] == "*":
                toks.pop()
        for kind, val, col in toks:
            if kind == "dop":
                raise DocumentError("derivative must end its term", lineno, col + offset)
        if toks:
            p = _Parser(toks + [("end", None, toks[-1][2] + 1)], nvars)
            try:
                coeff = p.expr()
                kind, val, col = p.peek()
                if kind != "end":
                    raise ExprSyntaxError(f"unexpected token {val!r}", col=col)
            except ExprSyntaxError as exc:
                raise DocumentError(exc.args[0].split(": ", 1)[-1], lineno, (exc.col or 0) + offset) from None
        else:
            coeff = RatFunc.one(nvars)
        if sign < 0:
            coeff = -coeff
        out[mu] = out[mu] + coeff if mu in out else coeff
    return {mu: c for mu, c in out.items() if c}


def parse_operator(text: str) -> DiffOp:
    nvars = src = dst = None
    entries: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, rest = line.partition(":")
        if head == "vars":
            nvars = _parse_vars(rest, lineno)
        elif head == "in":
            src = _parse_space(rest, lineno)
        elif head == "out":
            dst = _parse_space(rest, lineno)
        elif head.startswith("entry"):
            m = _ENTRY.match(line)
            if not m:
                raise DocumentError("malformed entry line", lineno)
            if nvars is None or src is None or dst is None:
                raise DocumentError("entry before vars/in/out declarations", lineno)
            r, c = int(m.group(1)), int(m.group(2))
            if not (1 <= r <= dst.dim and 1 <= c <= src.dim):
                raise DimensionMismatch(f"entry {r} {c} outside a {dst.dim}x{src.dim} operator", lineno)
            e = parse_entry(m.group(3), nvars, lineno, m.start(3))
            cur = entries.setdefault((r - 1, c - 1), {})
            for mu, a in e.items():
                cur[mu] = cur[mu] + a if mu in cur else a
        else:
            raise DocumentError(f"unrecognized line {line!r}", lineno)
    for what, val in (("vars", nvars), ("in", src), ("out", dst)):
        if val is None:
            raise DocumentError(f"missing '{what}:' declaration")
    return DiffOp(src, dst, nvars, entries)


def _fmt_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def _fmt_space(s: SpaceSpec) -> str:
    if s.dim == 0:
        return f"{s.name}[0]"
    return (f"{s.name}[{s.dim}] weights={','.join(_fmt_weight(w) for w in s.weights)} "
            f"labels={','.join(s.labels)}")


def _is_negative(c: RatFunc) -> bool:
    return c.num.leading_coefficient() < 0


def format_entry(e: dict) -> str:
    """Terms by descending graded-lex order on ``mu``."""
    parts = []
    for mu in sorted(e, key=graded_lex_key, reverse=True):
        c = e[mu]
        neg = _is_negative(c)
        a = -c if neg else c
        dpart = "d{" + ",".join(str(k) for k in mu) + "}" if any(mu) else ""
        if a == 1:
            body = dpart or "1"
        else:
            body = f"({a})" + (f" {dpart}" if dpart else "")
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def print_operator(d: DiffOp) -> str:
    lines = [
        "vars: " + ",".join(f"x{i + 1}" for i in range(d.nvars)),
        "in: " + _fmt_space(d.src),
        "out: " + _fmt_space(d.dst),
    ]
    for (r, c) in sorted(d.entries):
        lines.append(f"entry {r + 1} {c + 1}: {format_entry(d.entries[(r, c)])}")
    return "\n".join(lines) + "\n"


def parse_metric(text: str):
    from .gallery import metric_make

    nvars = None
    vals: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(":")
        if head == "vars":
            nvars = _parse_vars(rest, lineno)
            continue
        m = _OMEGA.match(line)
        if not m:
            raise DocumentError(f"unrecognized line {line!r}", lineno)
        if nvars is None:
            raise DocumentError("omega entry before 'vars:'", lineno)
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        if not (0 <= i < nvars and 0 <= j < nvars):
            raise DimensionMismatch(f"omega {i + 1} {j + 1} outside a {nvars}x{nvars} metric", lineno)
        e = parse_entry(m.group(3), nvars, lineno, m.start(3))
        if any(any(mu) for mu in e):
            raise DocumentError("metric entries cannot contain derivatives", lineno)
        c = e.get((0,) * nvars, RatFunc.zero(nvars))
        for key in {(i, j), (j, i)}:
            if key in vals and vals[key] != c:
                raise DocumentError("metric must be symmetric", lineno)
            vals[key] = c
    if nvars is None:
        raise DocumentError("missing 'vars:' declaration")
    entries = [[vals.get((i, j), RatFunc.zero(nvars)) for j in range(nvars)] for i in range(nvars)]
    return metric_make("custom", nvars, entries)


def print_metric(m) -> str:
    lines = ["vars: " + ",".join(f"x{i + 1}" for i in range(m.n))]
    for i in range(m.n):
        for j in range(i, m.n):
            c = m.omega[i][j]
            if c:
                lines.append(f"omega {i + 1} {j + 1}: {format_entry({(0,) * m.n: c})}")
    return "\n".join(lines) + "\n"
