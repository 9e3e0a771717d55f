"""Exact multivariate polynomials and rational functions over Q.

Variables are identified by 0-based index; the text layer maps ``x1..xN`` to
indices ``0..N-1``.  Every value is immutable and kept in canonical form:
no zero coefficients in a :class:`MultiPoly`, and a :class:`RatFunc` is a
reduced fraction whose denominator has leading coefficient 1 under the
graded-lex order.  Equality is therefore structural.

Polynomial gcds are delegated to sympy's sparse polynomial rings; everything
else is done on plain dicts of :class:`fractions.Fraction`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

Exponent = tuple  # tuple[int, ...]


class CoefficientError(ArithmeticError):
    pass


class ZeroDivisorError(CoefficientError, ZeroDivisionError):
    pass


class PoleError(CoefficientError):
    pass


def _grlex_key(e):
    return (sum(e), e)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not a rational constant: {c!r}")


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Fraction] | None = None, *, _trusted=False):
        self.nvars = nvars
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for e, c in (terms or {}).items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                c = _as_fraction(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
            self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def constant(cls, c, nvars: int) -> "MultiPoly":
        c = _as_fraction(c)
        return cls(nvars, {(0,) * nvars: c} if c else {}, _trusted=True)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "MultiPoly":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)}, _trusted=True)

    # -- predicates -------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def is_one(self) -> bool:
        return self.is_constant() and self.constant_value() == 1

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- structure --------------------------------------------------------
    def leading_exponent(self):
        return max(self.terms, key=_grlex_key)

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_exponent()] if self.terms else Fraction(0)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other, self.nvars)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return MultiPoly(self.nvars, t, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Fraction) -> "MultiPoly":
        if not c:
            return MultiPoly(self.nvars, {}, _trusted=True)
        return MultiPoly(self.nvars, {e: v * c for e, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check(other)
        if other.is_constant():
            return self.scale(other.constant_value())
        if self.is_constant():
            return other.scale(self.constant_value())
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, {e: c for e, c in t.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent on a polynomial")
        result = MultiPoly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derive(self, i: int) -> "MultiPoly":
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                t[e2] = c * e[i]
        return MultiPoly(self.nvars, t, _trusted=True)

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [_as_fraction(p) for p in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for p, k in zip(pt, e):
                if k:
                    v *= p ** k
            total += v
        return total

    # -- gcd via sympy ----------------------------------------------------
    def _to_sympy(self):
        R = _sympy_ring(self.nvars)
        return R.from_dict({e: R.domain.convert(c) for e, c in self.terms.items()}) if self.terms else R.zero

    @classmethod
    def _from_sympy(cls, p, nvars):
        return cls(nvars, {e: Fraction(int(c.numerator), int(c.denominator)) for e, c in p.items()}, _trusted=True)

    def cofactors(self, other: "MultiPoly"):
        """Return ``(g, self/g, other/g)`` with ``g`` the polynomial gcd."""
        self._check(other)
        g, a, b = self._to_sympy().cofactors(other._to_sympy())
        n = self.nvars
        return MultiPoly._from_sympy(g, n), MultiPoly._from_sympy(a, n), MultiPoly._from_sympy(b, n)

    # -- printing ---------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k)
            mag = abs(c)
            if not mono:
                body = _fmt_q(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_fmt_q(mag)}*{mono}"
            if not out:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"MultiPoly({self})"


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@lru_cache(maxsize=None)
def _sympy_ring(nvars):
    from sympy import QQ
    from sympy.polys.orderings import grlex
    from sympy.polys.rings import ring

    R, *_ = ring([f"x{i + 1}" for i in range(nvars)], QQ, grlex)
    return R


class RatFunc:
    """Element of Q(x1, ..., xn) as a reduced fraction with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, _canonical=False):
        if den is None:
            den = MultiPoly.constant(1, num.nvars)
        if _canonical:
            self.num, self.den = num, den
            return
        num._check(den)
        if not den:
            raise ZeroDivisorError("zero divisor")
        self.num, self.den = _normalize(num, den)

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def constant(cls, c, nvars: int) -> "RatFunc":
        return cls(MultiPoly.constant(c, nvars), MultiPoly.constant(1, nvars), _canonical=True)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "RatFunc":
        return cls(MultiPoly.variable(i, nvars), MultiPoly.constant(1, nvars), _canonical=True)

    @classmethod
    def zero(cls, nvars: int) -> "RatFunc":
        return cls.constant(0, nvars)

    @classmethod
    def one(cls, nvars: int) -> "RatFunc":
        return cls.constant(1, nvars)

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc.constant(other, self.nvars)
        if isinstance(other, MultiPoly):
            return RatFunc(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other:
            return self
        if not self:
            return other
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num + other.num, self.den, _canonical=True)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self or not other:
            return RatFunc.zero(self.nvars)
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num * other.num, self.den, _canonical=True)
        if other.is_constant():
            return RatFunc(self.num.scale(other.constant_value()), self.den, _canonical=True)
        if self.is_constant():
            return RatFunc(other.num.scale(self.constant_value()), other.den, _canonical=True)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self:
            raise ZeroDivisorError("zero divisor")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other:
            raise ZeroDivisorError("zero divisor")
        if other.is_constant():
            return RatFunc(self.num.scale(1 / other.constant_value()), self.den, _canonical=True)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k, _canonical=True)

    def derive(self, i: int) -> "RatFunc":
        """Partial derivative with respect to variable ``i`` (0-based)."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        if self.den.is_one():
            return RatFunc(self.num.derive(i), self.den, _canonical=True)
        # quotient rule
        n, d = self.num, self.den
        return RatFunc(n.derive(i) * d - n * d.derive(i), d * d)

    def derive_multi(self, mu: Sequence[int]) -> "RatFunc":
        out = self
        for i, k in enumerate(mu):
            for _ in range(k):
                out = out.derive(i)
        return out

    def evaluate(self, point: Sequence) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise PoleError("pole at evaluation point")
        return self.num.evaluate(point) / d

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFunc({self})"


def _normalize(num: MultiPoly, den: MultiPoly):
    n = num.nvars
    if not num:
        return MultiPoly.constant(0, n), MultiPoly.constant(1, n)
    if den.is_constant():
        return num.scale(1 / den.constant_value()), MultiPoly.constant(1, n)
    if not num.is_constant():
        g, num, den = num.cofactors(den)
    lc = den.leading_coefficient()
    if lc != 1:
        inv = 1 / lc
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def ratfunc_arith(a: RatFunc, b: RatFunc, kind: str) -> RatFunc:
    if a.nvars != b.nvars:
        raise ValueError("variable count mismatch")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def ratfunc_derive(a: RatFunc, i: int) -> RatFunc:
    return a.derive(i)


def ratfunc_eval(a: RatFunc, point: Sequence) -> Fraction:
    return a.evaluate(point)


# ---------------------------------------------------------------------------
# coefficient expression grammar: integers, x1..xN, + - * / ^, parentheses

class ExprSyntaxError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        where = ""
        if line is not None:
            where = f"line {line}, column {col}: "
        elif col is not None:
            where = f"column {col}: "
        super().__init__(where + message)


_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+)|(d\{[^}]*\})|([-+*/^()]))")


def tokenize(text: str):
    """Yield ``(kind, value, column)`` triples; column is 1-based."""
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ExprSyntaxError(f"unexpected character {text[col - 1]!r}", col=col)
        col = m.start(m.lastindex) + 1
        kind = ("int", "var", "dop", "op")[m.lastindex - 1]
        out.append((kind, m.group(m.lastindex), col))
        pos = m.end()
    out.append(("end", None, len(text) + 1))
    return out


class _Parser:
    def __init__(self, tokens, nvars):
        self.toks = tokens
        self.i = 0
        self.nvars = nvars

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        kind, val, col = self.take()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}, got {val!r}", col=col)

    def at_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def expr(self):
        sign = 1
        if self.at_op("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.at_op("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.at_op("*", "/"):
            op = self.take()[1]
            col = self.peek()[2]
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if not rhs:
                    raise ExprSyntaxError("zero denominator", col=col)
                value = value / rhs
        return value

    def factor(self):
        base = self.atom()
        if self.at_op("^"):
            self.take()
            sign = 1
            if self.at_op("-"):
                self.take()
                sign = -1
            kind, val, col = self.take()
            if kind != "int":
                raise ExprSyntaxError("exponent must be an integer literal", col=col)
            k = sign * int(val)
            if k < 0 and not base:
                raise ExprSyntaxError("zero denominator", col=col)
            base = base ** k
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "int":
            return RatFunc.constant(int(val), self.nvars)
        if kind == "var":
            idx = int(val[1:]) - 1
            if not 0 <= idx < self.nvars:
                raise ExprSyntaxError(f"unknown variable {val!r}", col=col)
            return RatFunc.variable(idx, self.nvars)
        if kind == "op" and val == "(":
            v = self.expr()
            self.expect_op(")")
            return v
        raise ExprSyntaxError(f"unexpected token {val!r}" if val else "unexpected end of input", col=col)


def parse_coefficient(text: str, nvars: int) -> RatFunc:
    """Parse a coefficient expression such as ``(x2^2 - 3/2*x1)/x1``."""
    p = _Parser(tokenize(text), nvars)
    value = p.expr()
    kind, val, col = p.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected token {val!r}", col=col)
    return value


def ratfunc_from_terms(nvars: int, terms: Iterable) -> RatFunc:
    """Build a polynomial RatFunc from ``(exponent, coefficient)`` pairs."""
    return RatFunc(MultiPoly(nvars, dict(terms)), _canonical=False)
