"""Linear differential operators with rational-function coefficients.

A :class:`DiffOp` is a ``dst.dim x src.dim`` matrix whose entries are finite
sums ``a_mu * d^mu`` (coefficient on the left).  Composition follows the
Leibniz rule ``d_i o a = a d_i + (d_i a)``; the formal adjoint integrates by
parts and is conjugated by the pairing weights of the two spaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Mapping, Sequence

from .coefficients import RatFunc

MultiIndex = tuple  # tuple[int, ...]
Entry = dict  # dict[MultiIndex, RatFunc]


class SpaceMismatchError(ValueError):
    pass


def unit(i: int, n: int) -> MultiIndex:
    return tuple(1 if k == i else 0 for k in range(n))


def madd(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def msub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


def mdivides(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


def sub_indices(mu: MultiIndex):
    return product(*(range(k + 1) for k in mu))


def mbinom(mu: MultiIndex, kappa: MultiIndex) -> int:
    out = 1
    for m, k in zip(mu, kappa):
        out *= comb(m, k)
    return out


def graded_lex_key(mu: MultiIndex):
    return (sum(mu), mu)


@dataclass(frozen=True)
class SpaceSpec:
    """A named component space with labels and positive pairing weights."""

    name: str
    labels: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.weights):
            raise ValueError("labels and weights must have the same length")
        if any(Fraction(w) <= 0 for w in self.weights):
            raise ValueError("pairing weights must be positive")
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def make(cls, name: str, dim: int, labels: Sequence[str] | None = None, weights=None) -> "SpaceSpec":
        if labels is None:
            labels = [f"{name}{i + 1}" for i in range(dim)]
        if weights is None:
            weights = [1] * dim
        if len(labels) != dim:
            raise ValueError(f"{name}: {len(labels)} labels for dimension {dim}")
        return cls(name, tuple(labels), tuple(weights))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def dual(self) -> "SpaceSpec":
        name = self.name[:-1] if self.name.endswith("*") else self.name + "*"
        return SpaceSpec(name, self.labels, self.weights)

    def compatible(self, other: "SpaceSpec") -> bool:
        return self.labels == other.labels and self.weights == other.weights

    def sub(self, columns: Sequence[int], name: str | None = None) -> "SpaceSpec":
        return SpaceSpec(name or self.name, tuple(self.labels[c] for c in columns),
                         tuple(self.weights[c] for c in columns))


# ---------------------------------------------------------------------------
# scalar operators: dict multi-index -> RatFunc

def _prune(e: Mapping) -> Entry:
    return {mu: c for mu, c in e.items() if c}


def entry_add(a: Mapping, b: Mapping, scale=None) -> Entry:
    out = dict(a)
    for mu, c in b.items():
        if scale is not None:
            c = scale * c
        s = out.get(mu)
        s = c if s is None else s + c
        if s:
            out[mu] = s
        else:
            out.pop(mu, None)
    return out


class _DerivCache:
    def __init__(self, coeff: RatFunc):
        self.c = coeff
        self.cache = {}

    def get(self, alpha):
        if not any(alpha):
            return self.c
        d = self.cache.get(alpha)
        if d is None:
            # build from a smaller derivative
            i = next(k for k, v in enumerate(alpha) if v)
            d = self.get(alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]).derive(i)
            self.cache[alpha] = d
        return d


def entry_compose(p: Mapping, q: Mapping) -> Entry:
    """Return the scalar operator ``p o q``."""
    out: dict = {}
    for beta, b in q.items():
        db = None if b.is_constant() else _DerivCache(b)
        for alpha, a in p.items():
            if db is None:
                key = madd(alpha, beta)
                term = a * b
                s = out.get(key)
                out[key] = term if s is None else s + term
                continue
            for kappa in sub_indices(alpha):
                deriv = db.get(msub(alpha, kappa))
                if not deriv:
                    continue
                key = madd(kappa, beta)
                term = a * deriv * mbinom(alpha, kappa)
                s = out.get(key)
                out[key] = term if s is None else s + term
    return _prune(out)


def entry_adjoint(p: Mapping) -> Entry:
    """Formal adjoint of ``sum a_mu d^mu``: ``lam -> sum (-1)^|mu| d^mu (a_mu lam)``."""
    out: dict = {}
    for mu, a in p.items():
        sign = -1 if sum(mu) % 2 else 1
        if a.is_constant():
            term = a * sign
            s = out.get(mu)
            out[mu] = term if s is None else s + term
            continue
        da = _DerivCache(a)
        for kappa in sub_indices(mu):
            deriv = da.get(msub(mu, kappa))
            if not deriv:
                continue
            term = deriv * (sign * mbinom(mu, kappa))
            s = out.get(kappa)
            out[kappa] = term if s is None else s + term
    return _prune(out)


def entry_apply(p: Mapping, f: RatFunc) -> RatFunc:
    total = RatFunc.zero(f.nvars)
    if not f:
        return total
    df = _DerivCache(f)
    for mu, a in p.items():
        total = total + a * df.get(mu)
    return total


def entry_order(p: Mapping) -> int:
    return max((sum(mu) for mu in p), default=-1)


# ---------------------------------------------------------------------------

class DiffOp:
    """Matrix of scalar differential operators mapping ``src`` to ``dst``.

    ``entries`` maps ``(row, col)`` (0-based) to a dict ``{mu: RatFunc}``;
    zero coefficients and empty entries are never stored.  Values are
    treated as immutable.
    """

    __slots__ = ("src", "dst", "nvars", "entries")

    def __init__(self, src: SpaceSpec, dst: SpaceSpec, nvars: int, entries: Mapping | None = None):
        self.src, self.dst, self.nvars = src, dst, nvars
        clean = {}
        for (r, c), e in (entries or {}).items():
            if not (0 <= r < dst.dim and 0 <= c < src.dim):
                raise SpaceMismatchError(f"entry ({r + 1}, {c + 1}) outside {dst.dim}x{src.dim}")
            e = _prune(e)
            for mu, coeff in e.items():
                if len(mu) != nvars or coeff.nvars != nvars:
                    raise ValueError("entry does not match the declared variable count")
            if e:
                clean[(r, c)] = e
        self.entries = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, src: SpaceSpec, dst: SpaceSpec, nvars: int) -> "DiffOp":
        return cls(src, dst, nvars, {})

    @classmethod
    def identity(cls, space: SpaceSpec, nvars: int, dst: SpaceSpec | None = None) -> "DiffOp":
        one = RatFunc.one(nvars)
        z = (0,) * nvars
        return cls(space, dst or space, nvars, {(i, i): {z: one} for i in range(space.dim)})

    @classmethod
    def from_rows(cls, src: SpaceSpec, dst: SpaceSpec, nvars: int, rows: Sequence[Mapping]) -> "DiffOp":
        """Build from rows given as ``{(col, mu): coeff}`` dicts."""
        entries: dict = {}
        for r, row in enumerate(rows):
            for (c, mu), coeff in row.items():
                entries.setdefault((r, c), {})[mu] = coeff
        return cls(src, dst, nvars, entries)

    @classmethod
    def multiplication(cls, coeff: RatFunc, space: SpaceSpec) -> "DiffOp":
        z = (0,) * coeff.nvars
        return cls(space, space, coeff.nvars, {(i, i): {z: coeff} for i in range(space.dim)})

    # -- structure --------------------------------------------------------
    @property
    def shape(self):
        return (self.dst.dim, self.src.dim)

    @property
    def order(self) -> int:
        return max((entry_order(e) for e in self.entries.values()), default=-1)

    def entry(self, r: int, c: int) -> Entry:
        return self.entries.get((r, c), {})

    def row(self, r: int) -> dict:
        out = {}
        for c in range(self.src.dim):
            for mu, coeff in self.entry(r, c).items():
                out[(c, mu)] = coeff
        return out

    def rows(self):
        return [self.row(r) for r in range(self.dst.dim)]

    def is_zero(self) -> bool:
        return not self.entries

    def is_constant(self) -> bool:
        return all(c.is_constant() for e in self.entries.values() for c in e.values())

    def coefficients(self):
        for e in self.entries.values():
            yield from e.values()

    # -- comparisons ------------------------------------------------------
    def equal_entries(self, other: "DiffOp") -> bool:
        return self.shape == other.shape and self.nvars == other.nvars and self.entries == other.entries

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and self.equal_entries(other)

    __hash__ = None

    # -- linear structure -------------------------------------------------
    def _check_same(self, other: "DiffOp"):
        if self.shape != other.shape or self.nvars != other.nvars:
            raise SpaceMismatchError(f"cannot combine {self.shape} and {other.shape} operators")

    def __add__(self, other: "DiffOp") -> "DiffOp":
        return op_linear_combine([(1, self), (1, other)])

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return op_linear_combine([(1, self), (-1, other)])

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, c) -> "DiffOp":
        """Left multiplication of every entry by the scalar ``c``."""
        if not isinstance(c, RatFunc):
            c = RatFunc.constant(c, self.nvars)
        return DiffOp(self.src, self.dst, self.nvars,
                      {k: {mu: c * a for mu, a in e.items()} for k, e in self.entries.items()})

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return op_compose(self, other)

    def retarget(self, src: SpaceSpec | None = None, dst: SpaceSpec | None = None) -> "DiffOp":
        src = src or self.src
        dst = dst or self.dst
        if src.dim != self.src.dim or dst.dim != self.dst.dim:
            raise SpaceMismatchError("retarget must preserve dimensions")
        return DiffOp(src, dst, self.nvars, self.entries)

    def select_columns(self, cols: Sequence[int]) -> "DiffOp":
        cols = list(cols)
        pos = {c: i for i, c in enumerate(cols)}
        return DiffOp(self.src.sub(cols), self.dst, self.nvars,
                      {(r, pos[c]): e for (r, c), e in self.entries.items() if c in pos})

    def select_rows(self, rows: Sequence[int], dst: SpaceSpec | None = None) -> "DiffOp":
        rows = list(rows)
        pos = {r: i for i, r in enumerate(rows)}
        return DiffOp(self.src, dst or self.dst.sub(rows), self.nvars,
                      {(pos[r], c): e for (r, c), e in self.entries.items() if r in pos})

    def __repr__(self):
        return f"<DiffOp {self.src.name}[{self.src.dim}] -> {self.dst.name}[{self.dst.dim}], order {self.order}>"


def vstack(ops: Sequence[DiffOp], dst: SpaceSpec | None = None) -> DiffOp:
    """Stack operators sharing a source into one operator."""
    src = ops[0].src
    nvars = ops[0].nvars
    entries = {}
    offset = 0
    labels, weights = [], []
    for op in ops:
        if not op.src.compatible(src) or op.nvars != nvars:
            raise SpaceMismatchError("vstack needs a common source space")
        for (r, c), e in op.entries.items():
            entries[(r + offset, c)] = e
        offset += op.dst.dim
        labels.extend(op.dst.labels)
        weights.extend(op.dst.weights)
    if dst is None:
        dst = SpaceSpec("+".join(op.dst.name for op in ops), tuple(labels), tuple(weights))
    return DiffOp(src, dst, nvars, entries)


def op_compose(d2: DiffOp, d1: DiffOp) -> DiffOp:
    """Return ``d2 o d1``."""
    if not d2.src.compatible(d1.dst) or d2.nvars != d1.nvars:
        raise SpaceMismatchError(
            f"cannot compose: {d1.dst.name}{list(d1.dst.labels)} does not match {d2.src.name}{list(d2.src.labels)}")
    by_row: dict = {}
    for (r, c), e in d1.entries.items():
        by_row.setdefault(r, []).append((c, e))
    out: dict = {}
    for (i, r), p in d2.entries.items():
        for c, q in by_row.get(r, ()):
            prod_ = entry_compose(p, q)
            if prod_:
                out[(i, c)] = entry_add(out.get((i, c), {}), prod_)
    return DiffOp(d1.src, d2.dst, d1.nvars, out)


def op_linear_combine(terms: Iterable) -> DiffOp:
    """Entrywise ``sum c_k * D_k`` for scalars ``c_k`` (rational or RatFunc)."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty combination")
    first = terms[0][1]
    out: dict = {}
    for c, op in terms:
        if op.shape != first.shape or op.nvars != first.nvars:
            raise SpaceMismatchError("linear combination needs operators of the same shape")
        if not (op.src.compatible(first.src) and op.dst.compatible(first.dst)):
            raise SpaceMismatchError("linear combination needs operators between the same spaces")
        if not isinstance(c, RatFunc):
            c = RatFunc.constant(c, first.nvars)
        if not c:
            continue
        for k, e in op.entries.items():
            out[k] = entry_add(out.get(k, {}), e, scale=c)
    return DiffOp(first.src, first.dst, first.nvars, out)


def op_apply(d: DiffOp, f: Sequence[RatFunc]) -> tuple:
    if len(f) != d.src.dim:
        raise SpaceMismatchError(f"expected {d.src.dim} functions, got {len(f)}")
    if any(g.nvars != d.nvars for g in f):
        raise ValueError("variable count mismatch")
    out = [RatFunc.zero(d.nvars) for _ in range(d.dst.dim)]
    for (r, c), e in d.entries.items():
        out[r] = out[r] + entry_apply(e, f[c])
    return tuple(out)


def op_adjoint(d: DiffOp) -> DiffOp:
    """Formal adjoint with respect to the weighted pairings of ``src`` and ``dst``.

    Entry ``(c, r)`` of the result is ``w_src[c]^-1 * ad(D[r, c]) * w_dst[r]``;
    the result maps ``dst*`` to ``src*``.
    """
    out = {}
    for (r, c), e in d.entries.items():
        scale = d.dst.weights[r] / d.src.weights[c]
        adj = entry_adjoint(e)
        if scale != 1:
            adj = {mu: a * scale for mu, a in adj.items()}
        out[(c, r)] = adj
    return DiffOp(d.dst.dual(), d.src.dual(), d.nvars, out)


# ---------------------------------------------------------------------------
# jet expressions and the Euler operator

class JetExpression:
    """Polynomial in formal jet symbols ``(field, mu)`` with RatFunc coefficients.

    Monomials are sorted tuples of jet symbols (with repetition).
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping | None = None):
        self.nvars = nvars
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def symbol(cls, field: str, mu: MultiIndex | None = None, nvars: int | None = None) -> "JetExpression":
        if mu is None:
            mu = (0,) * nvars
        n = len(mu)
        return cls(n, {((field, tuple(mu)),): RatFunc.one(n)})

    @classmethod
    def constant(cls, c: RatFunc) -> "JetExpression":
        return cls(c.nvars, {(): c})

    def __bool__(self):
        return bool(self.terms)

    def _combine(self, other, sign):
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c * sign if s is None else s + c * sign
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return JetExpression(self.nvars, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(RatFunc.constant(-1, self.nvars))

    def scale(self, c: RatFunc) -> "JetExpression":
        return JetExpression(self.nvars, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                v = c1 * c2
                s = out.get(m)
                out[m] = v if s is None else s + v
        return JetExpression(self.nvars, out)

    def symbols(self):
        return {s for m in self.terms for s in m}

    def fields(self):
        return {f for f, _ in self.symbols()}

    def total_derivative(self, i: int) -> "JetExpression":
        out: dict = {}

        def add(m, v):
            s = out.get(m)
            out[m] = v if s is None else s + v

        for m, c in self.terms.items():
            dc = c.derive(i)
            if dc:
                add(m, dc)
            for k, (f, mu) in enumerate(m):
                bumped = (f, mu[:i] + (mu[i] + 1,) + mu[i + 1:])
                add(tuple(sorted(m[:k] + (bumped,) + m[k + 1:])), c)
        return JetExpression(self.nvars, out)

    def total_derivative_multi(self, mu: MultiIndex) -> "JetExpression":
        out = self
        for i, k in enumerate(mu):
            for _ in range(k):
                out = out.total_derivative(i)
        return out

    def partial(self, sym) -> "JetExpression":
        out: dict = {}
        for m, c in self.terms.items():
            k = m.count(sym)
            if not k:
                continue
            idx = m.index(sym)
            rest = m[:idx] + m[idx + 1:]
            v = c * k
            s = out.get(rest)
            out[rest] = v if s is None else s + v
        return JetExpression(self.nvars, out)

    def euler(self, field: str) -> "JetExpression":
        """``sum_mu (-1)^|mu| D^mu (de/d field_mu)``."""
        total = JetExpression(self.nvars)
        for sym in sorted(s for s in self.symbols() if s[0] == field):
            mu = sym[1]
            term = self.partial(sym).total_derivative_multi(mu)
            total = total - term if sum(mu) % 2 else total + term
        return total

    def __repr__(self):
        return f"<JetExpression with {len(self.terms)} terms>"


def jet_fields(prefix: str, dim: int, nvars: int) -> list:
    z = (0,) * nvars
    return [JetExpression.symbol(f"{prefix}{k + 1}", z) for k in range(dim)]


def op_apply_jets(d: DiffOp, fields: Sequence[str]) -> list:
    """Apply ``d`` to formal unknowns named ``fields`` (one per source component)."""
    if len(fields) != d.src.dim:
        raise SpaceMismatchError("one field name per source component is required")
    out = [JetExpression(d.nvars) for _ in range(d.dst.dim)]
    for (r, c), e in d.entries.items():
        expr = JetExpression(d.nvars, {((fields[c], mu),): a for mu, a in e.items()})
        out[r] = out[r] + expr
    return out


def jet_pairing(left: Sequence[JetExpression], right: Sequence[JetExpression], weights: Sequence) -> JetExpression:
    nvars = left[0].nvars
    total = JetExpression(nvars)
    for a, b, w in zip(left, right, weights):
        total = total + (a * b).scale(RatFunc.constant(w, nvars))
    return total


def euler_divergence_test(e: JetExpression) -> bool:
    """True iff ``e`` is a total divergence (all Euler derivatives vanish)."""
    return all(not e.euler(f) for f in e.fields())


def divergence_certificate(d: DiffOp, lam: str = "lam", eta: str = "eta") -> JetExpression:
    """The integrand ``<lam, D eta>_w - <ad(D) lam, eta>_w`` on formal unknowns."""
    lam_f = [f"{lam}{k + 1}" for k in range(d.dst.dim)]
    eta_f = [f"{eta}{k + 1}" for k in range(d.src.dim)]
    z = (0,) * d.nvars
    lam_j = [JetExpression.symbol(f, z) for f in lam_f]
    eta_j = [JetExpression.symbol(f, z) for f in eta_f]
    lhs = jet_pairing(lam_j, op_apply_jets(d, eta_f), d.dst.weights)
    rhs = jet_pairing(op_apply_jets(op_adjoint(d), lam_f), eta_j, d.src.weights)
    return lhs - rhs
