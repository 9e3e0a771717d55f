"""Left Groebner bases for row modules over the rational Weyl algebra.

Rows of an operator ``D: E -> F`` are elements of the free left module
``B^m`` (``m = E.dim``) over ``B = Q(x)<d_1..d_n>``.  A row is stored as a
dict ``{(component, mu): coeff}``.  The module order is position over term
with graded reverse lexicographic order on ``mu``.

When every coefficient is constant the engine runs on :class:`Fraction`
coefficients and left multiplication by ``d^nu`` is a plain shift; otherwise
coefficients stay :class:`RatFunc` and the Leibniz expansion is used.  Either
way the leading term of ``d^nu * v`` is ``lc(v) d^(mu+nu)``, which is all
Buchberger's algorithm needs.

On the RatFunc path rows are kept fraction-free: denominators are cleared,
a reduction step multiplies the target by a polynomial instead of dividing
by the reducer's leading coefficient, and polynomial content is removed
when a generator is stored.  Left multiplication by a nonzero function is
invertible, so the module is unchanged.  During completion only leading
terms are reduced; public normal forms are fully reduced and rescaled.
"""

from __future__ import annotations

import contextlib
import heapq
import time
from contextvars import ContextVar
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coefficients import RatFunc
from .diffop import DiffOp, SpaceMismatchError, SpaceSpec, madd, mbinom, mdivides, msub, op_compose, sub_indices


class BudgetExceeded(RuntimeError):
    """Raised when a Groebner computation runs past the active time budget."""


_deadline: ContextVar = ContextVar("groebner_deadline", default=None)


@contextlib.contextmanager
def time_budget(seconds: float | None):
    """Bound every Groebner computation inside the block to ``seconds``."""
    if seconds is None:
        yield
        return
    token = _deadline.set(time.monotonic() + seconds)
    try:
        yield
    finally:
        _deadline.reset(token)


def _check_budget():
    dl = _deadline.get()
    if dl is not None and time.monotonic() > dl:
        raise BudgetExceeded("budget exceeded")


@dataclass(frozen=True)
class TermOrder:
    """POT module order.

    ``priority`` lists components from most to least significant; components
    not listed follow in natural order.  Within a component, monomials
    ``d^mu`` are compared by graded reverse lexicographic order.
    """

    priority: tuple = ()

    def positions(self, m: int) -> list:
        pos = [None] * m
        k = 0
        for c in self.priority:
            if 0 <= c < m and pos[c] is None:
                pos[c] = k
                k += 1
        for c in range(m):
            if pos[c] is None:
                pos[c] = k
                k += 1
        return pos

    def sort_key(self, m: int):
        """Key function; larger key means larger module monomial."""
        pos = self.positions(m)

        def key(term):
            c, mu = term
            return (-pos[c], sum(mu), tuple(-e for e in reversed(mu)))

        return key


DEFAULT_ORDER = TermOrder()


# ---------------------------------------------------------------------------
# row arithmetic

def _is_const(a) -> bool:
    return isinstance(a, Fraction) or a.is_constant()


def _sub_shifted(target: dict, vec: dict, nu, coef, new_terms: list | None = None):
    """In place: ``target -= coef * d^nu * vec``."""
    zero_nu = not any(nu)
    for (c, mu), a in vec.items():
        if zero_nu or _is_const(a):
            items = (((c, madd(mu, nu) if not zero_nu else mu), a),)
        else:
            items = []
            for kappa in sub_indices(nu):
                beta = msub(nu, kappa)
                da = a.derive_multi(beta) if any(beta) else a
                if da:
                    items.append(((c, madd(mu, kappa)), da * mbinom(nu, kappa)))
        for key, val in items:
            val = coef * val
            old = target.get(key)
            if old is None:
                target[key] = -val
                if new_terms is not None:
                    new_terms.append(key)
            else:
                s = old - val
                if s:
                    target[key] = s
                else:
                    del target[key]


def _shifted(vec: dict, nu, coef) -> dict:
    out: dict = {}
    _sub_shifted(out, vec, nu, -coef)
    return out


def _scale(vec: dict, coef) -> dict:
    return {k: coef * a for k, a in vec.items()}


def _row_order(vec: dict) -> int:
    return max((sum(mu) for _, mu in vec), default=-1)


# ---------------------------------------------------------------------------
# fraction-free helpers for the RatFunc path: rows are kept with polynomial
# coefficients and reduction multiplies the target instead of dividing

def _common_den(vec: dict):
    L = None
    for a in vec.values():
        if a.den.is_one():
            continue
        if L is None:
            L = a.den
        else:
            _, _, b = L.cofactors(a.den)
            L = L * b
    return None if L is None else RatFunc(L)


def _ff_split(c, lc):
    """Return ``(m, q)`` with ``m * c == q * lc``; ``m`` is None when it would be 1."""
    if _is_const(lc) or not (c.den.is_one() and lc.den.is_one()):
        return None, c / lc
    _, a, b = c.num.cofactors(lc.num)
    if b.is_constant():
        return None, RatFunc(a.scale(1 / b.constant_value()), _canonical=True)
    return RatFunc(b, _canonical=True), RatFunc(a, _canonical=True)


def _scale_inplace(vec: dict, m):
    for k in vec:
        vec[k] = m * vec[k]


def _content(vec: dict):
    """Polynomial gcd of the coefficients times a rational making the leading one monic."""
    g = None
    for a in vec.values():
        if not a.den.is_one():
            return None
        g = a.num if g is None else g.cofactors(a.num)[0]
        if g.is_constant():
            break
    return None if g is None or g.is_constant() else RatFunc(g, _canonical=True)


class _Gen:
    __slots__ = ("vec", "lead", "cof")

    def __init__(self, vec, lead, cof):
        self.vec, self.lead, self.cof = vec, lead, cof


class _Engine:
    """Incremental Buchberger state with optional cofactor tracking."""

    def __init__(self, m: int, order: TermOrder, track: bool, nvars: int = 0, fraction_free: bool = False):
        self.m = m
        self.nvars = nvars
        self.ff = fraction_free
        self.order = order
        self.key = order.sort_key(m)
        pos = order.positions(m)
        self._hk = lambda t: (pos[t[0]], -sum(t[1]), tuple(reversed(t[1])))
        self.track = track
        self.gens: list = []
        self.by_comp: dict = {}
        self.pairs: list = []
        self.syzygies: list = []

    def lead(self, vec):
        return max(vec, key=self.key)

    def find_reducer(self, term):
        c, mu = term
        for g in self.by_comp.get(c, ()):
            if mdivides(g.lead[1], mu):
                return g
        return None

    def reduce(self, vec: dict, cof: dict | None = None, quotient: dict | None = None):
        """Full reduction.  Cofactor updates go to ``cof`` (``-=``) or ``quotient`` (``+=``).

        On the fraction-free path the result and ``quotient`` are divided by
        the accumulated multiplier, so the output matches monic reduction.
        """
        r, s = self._reduce(vec, cof, quotient, top=False)
        if s is not None:
            inv = 1 / s
            r = _scale(r, inv)
            if quotient is not None:
                _scale_inplace(quotient, inv)
        return r

    def _reduce(self, vec, cof, quotient, top):
        """Returns ``(r, s)`` with ``s * vec = r + (reducers)``; ``s`` None means 1.

        ``cof`` is kept consistent with the scaled row.  With ``top`` only
        leading terms are reduced.
        """
        v = dict(vec)
        s = None
        if self.ff:
            s = _common_den(v)
            if s is not None:
                _scale_inplace(v, s)
                if cof is not None:
                    _scale_inplace(cof, s)
        result = {}
        hk = self._hk
        heap = [(hk(t), t) for t in v]
        heapq.heapify(heap)
        while heap:
            _, t = heapq.heappop(heap)
            c = v.get(t)
            if c is None:
                continue
            g = self.find_reducer(t)
            if g is None:
                if top:
                    break
                result[t] = c
                del v[t]
                continue
            nu = msub(t[1], g.lead[1])
            if self.ff:
                mult, c = _ff_split(c, g.vec[g.lead])
                if mult is not None:
                    _scale_inplace(v, mult)
                    _scale_inplace(result, mult)
                    s = mult if s is None else s * mult
                    if cof is not None:
                        _scale_inplace(cof, mult)
                    if quotient is not None:
                        _scale_inplace(quotient, mult)
            new = []
            _sub_shifted(v, g.vec, nu, c, new)
            v.pop(t, None)
            for nt in new:
                heapq.heappush(heap, (hk(nt), nt))
            if g.cof is not None:
                if cof is not None:
                    _sub_shifted(cof, g.cof, nu, c)
                if quotient is not None:
                    _sub_shifted(quotient, g.cof, nu, -c)
        if top:
            return v, s
        return result, s

    def add(self, vec: dict, cof: dict | None):
        lt = self.lead(vec)
        if self.ff:
            g = _content(vec)
            if g is not None:
                vec = {k: a / g for k, a in vec.items()}
            k = 1 / vec[lt].num.leading_coefficient()
            if k != 1:
                vec = _scale(vec, k)
            if cof is not None and (g is not None or k != 1):
                cof = _scale(cof, (1 / g) * k if g is not None else k)
            lc = 1
        else:
            lc = vec[lt]
        if lc != 1:
            inv = 1 / lc
            vec = _scale(vec, inv)
            vec[lt] = _one_like(lc)
            if cof is not None:
                cof = _scale(cof, inv)
        g = _Gen(vec, lt, cof)
        idx = len(self.gens)
        for j, h in enumerate(self.gens):
            if h.lead[0] == lt[0]:
                lcm = tuple(max(a, b) for a, b in zip(lt[1], h.lead[1]))
                heapq.heappush(self.pairs, (self.key((lt[0], lcm)), idx, j))
        self.gens.append(g)
        self.by_comp.setdefault(lt[0], []).append(g)
        return g

    def insert(self, vec: dict, cof: dict | None = None):
        """Reduce and add ``vec``; record a syzygy when it reduces to zero."""
        _check_budget()
        cof = dict(cof) if cof is not None else None
        r, _ = self._reduce(vec, cof, None, top=self.ff)
        if r:
            self.add(r, cof)
            return True
        if cof:
            self.syzygies.append(cof)
        return False

    def complete(self):
        while self.pairs:
            _check_budget()
            _, i, j = heapq.heappop(self.pairs)
            gi, gj = self.gens[i], self.gens[j]
            lcm = tuple(max(a, b) for a, b in zip(gi.lead[1], gj.lead[1]))
            nu_i, nu_j = msub(lcm, gi.lead[1]), msub(lcm, gj.lead[1])
            # a * lc_i == b * lc_j; both are 1 on the monic path
            a = b = _one_like(gi.vec[gi.lead])
            if self.ff:
                m, b = _ff_split(gi.vec[gi.lead], gj.vec[gj.lead])
                if m is not None:
                    a = m
            s = _shifted(gi.vec, nu_i, a)
            _sub_shifted(s, gj.vec, nu_j, b)
            cof = None
            if self.track:
                cof = _shifted(gi.cof, nu_i, a)
                _sub_shifted(cof, gj.cof, nu_j, b)
            r, _ = self._reduce(s, cof, None, top=self.ff)
            if r:
                self.add(r, cof)
            elif cof:
                self.syzygies.append(cof)


def _one_like(c):
    if isinstance(c, Fraction):
        return Fraction(1)
    return RatFunc.one(c.nvars)


# ---------------------------------------------------------------------------
# conversion between DiffOp rows and engine rows

def _all_constant(ops) -> bool:
    return all(op.is_constant() for op in ops)


def _internal_row(row: dict, commutative: bool) -> dict:
    if commutative:
        return {k: a.constant_value() for k, a in row.items()}
    return dict(row)


def _external_row(row: dict, nvars: int) -> dict:
    out = {}
    for k, a in row.items():
        if isinstance(a, (Fraction, int)):
            a = RatFunc.constant(a, nvars)
        if a:
            out[k] = a
    return out


@dataclass
class GroebnerBasis:
    """Left Groebner basis of a row module, with cofactors and raw syzygies.

    ``cofactors[k]`` expresses ``generators[k]`` as a left combination of the
    input rows: ``generators[k] = sum_j cofactors[k][(j, mu)] d^mu input[j]``.
    ``syzygies`` are the cofactor vectors of every reduction to zero
    (Schreyer); together they generate the left kernel of the input rows.
    """

    rank: int
    ninputs: int
    nvars: int
    order: TermOrder
    commutative: bool
    generators: list
    cofactors: list | None
    syzygies: list = field(default_factory=list)
    _engine: _Engine | None = field(default=None, repr=False)

    def leading_terms(self):
        return [g.lead for g in self._engine.gens]

    def leading_components(self):
        return sorted({c for c, _ in self.leading_terms()})

    def _prep(self, row: dict) -> dict:
        if self.commutative and all(a.is_constant() for a in row.values()):
            return {k: a.constant_value() for k, a in row.items()}
        return dict(row)

    def normal_form_row(self, row: dict) -> dict:
        return _external_row(self._engine.reduce(self._prep(row)), self.nvars)

    def reduce_with_quotient(self, row: dict):
        """Return ``(nf, q)`` with ``row = nf + sum_j q[(j, mu)] d^mu input[j]``."""
        if self.cofactors is None:
            raise ValueError("basis was computed without cofactor tracking")
        q: dict = {}
        nf = self._engine.reduce(self._prep(row), quotient=q)
        return _external_row(nf, self.nvars), _external_row(q, self.nvars)

    def contains_row(self, row: dict) -> bool:
        return not self._engine.reduce(self._prep(row))

    def generator_ops(self, src: SpaceSpec, name: str = "gb") -> DiffOp:
        rows = [_external_row(r, self.nvars) for r in self.generators]
        return DiffOp.from_rows(src, SpaceSpec.make(name, len(rows)), self.nvars, rows)


def _rows_of(rows_or_op) -> tuple:
    if isinstance(rows_or_op, DiffOp):
        return rows_or_op.rows(), rows_or_op.src.dim, rows_or_op.nvars, rows_or_op.is_constant()
    raise TypeError("expected a DiffOp")


def gb_compute(d: DiffOp, order: TermOrder | None = None, track: bool = True) -> GroebnerBasis:
    """Groebner basis of the left module generated by the rows of ``d``."""
    order = order or DEFAULT_ORDER
    rows, m, nvars, commutative = _rows_of(d)
    eng = _Engine(m, order, track, nvars, fraction_free=not commutative)
    one = Fraction(1) if commutative else RatFunc.one(nvars)
    zero_mu = (0,) * nvars
    for j, row in enumerate(rows):
        cof = {(j, zero_mu): one} if track else None
        eng.insert(_internal_row(row, commutative), cof)
    eng.complete()
    return GroebnerBasis(
        rank=m, ninputs=len(rows), nvars=nvars, order=order, commutative=commutative,
        generators=[g.vec for g in eng.gens],
        cofactors=[g.cof for g in eng.gens] if track else None,
        syzygies=list(eng.syzygies), _engine=eng,
    )


def gb_normal_form(v: DiffOp, gb: GroebnerBasis) -> DiffOp:
    """Reduce every row of ``v`` modulo ``gb``."""
    if v.src.dim != gb.rank:
        raise SpaceMismatchError(f"row length {v.src.dim} does not match module rank {gb.rank}")
    return DiffOp.from_rows(v.src, v.dst, v.nvars, [gb.normal_form_row(r) for r in v.rows()])


def autoreduce_rows(rows: Sequence[dict], m: int, nvars: int, order: TermOrder | None = None) -> list:
    """Drop rows lying in the module generated by the previously kept ones.

    Candidates are visited by increasing order, then size, then position, so
    low-order generators are preferred.
    """
    order = order or DEFAULT_ORDER
    rows = [_external_row(r, nvars) for r in rows]
    rows = [r for r in rows if r]
    commutative = all(a.is_constant() for r in rows for a in r.values())
    idx = sorted(range(len(rows)), key=lambda k: (_row_order(rows[k]), len(rows[k]), k))
    eng = _Engine(m, order, track=False, nvars=nvars, fraction_free=not commutative)
    kept = []
    for k in idx:
        r = _internal_row(rows[k], commutative)
        if eng.reduce(r):
            eng.insert(r)
            eng.complete()
            kept.append(rows[k])
    return kept


def syzygy_module(d: DiffOp, order: TermOrder | None = None, name: str = "cc") -> DiffOp:
    """Generators of the left kernel of ``d``: an operator ``S`` with ``S o d = 0``.

    The returned rows generate every row ``t`` with ``t o d = 0``.  They are
    auto-reduced (no row lies in the module of the lower ones) but not
    promised minimal.  An injective ``d`` gives an operator with no rows.
    """
    gb = gb_compute(d, order, track=True)
    kept = autoreduce_rows(gb.syzygies, d.dst.dim, d.nvars, order)
    return DiffOp.from_rows(d.dst, SpaceSpec.make(name, len(kept)), d.nvars, kept)


def module_equal(a: DiffOp, b: DiffOp, order: TermOrder | None = None) -> bool:
    """True iff the rows of ``a`` and ``b`` generate the same left module."""
    if a.src.dim != b.src.dim or a.nvars != b.nvars:
        raise SpaceMismatchError("module_equal needs operators on the same source space")
    return module_contains(b, a, order) and module_contains(a, b, order)


def module_contains(big: DiffOp, small: DiffOp, order: TermOrder | None = None) -> bool:
    """True iff every row of ``small`` lies in the row module of ``big``."""
    rows = small.rows()
    if not any(rows):
        return True
    gb = gb_compute(big, order, track=False)
    return all(gb.contains_row(r) for r in rows)


def op_rank(d: DiffOp) -> int:
    """Generic rank of the row module: number of leading components in a POT basis."""
    if d.is_zero():
        return 0
    return len(gb_compute(d, track=False).leading_components())


def left_factor(l: DiffOp, d: DiffOp) -> DiffOp | None:
    """Return ``G`` with ``l = G o d`` if every row of ``l`` lies in ``d``'s row module."""
    if l.src.dim != d.src.dim or l.nvars != d.nvars:
        raise SpaceMismatchError("left_factor needs a common source space")
    if not d.is_zero():
        gb = gb_compute(d, track=True)
    elif not l.is_zero():
        return None
    rows = []
    for row in l.rows():
        if not row:
            rows.append({})
            continue
        nf, q = gb.reduce_with_quotient(row)
        if nf:
            return None
        rows.append(q)
    g = DiffOp.from_rows(d.dst, l.dst, l.nvars, rows)
    if not op_compose(g, d).equal_entries(l):
        raise ArithmeticError("cofactor identity failed in left_factor")
    return g
