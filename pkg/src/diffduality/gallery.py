"""Operators of the linearized gravity chain over a metric.

Symmetric 2-tensors are stored packed: components ``(i, j)`` with ``i <= j``
in lexicographic order, pairing weight 1 on the diagonal and 2 off it, so the
packed pairing equals the full contraction over all index pairs.  Formulas
below are written with full (unpacked) indices; ``Omega_ij`` and
``Omega_ji`` both address the same packed component.

Public curvature operators are the tensors themselves (Christoffel, Ricci,
Einstein), not twice them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from sympy import integer_nthroot

from .coefficients import RatFunc
from .diffop import DiffOp, SpaceSpec, madd, op_adjoint, op_compose, op_linear_combine, unit
from .groebner import left_factor


class MetricError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact linear algebra over Q(x)

def _det_and_inverse(mat):
    n = len(mat)
    a = [list(row) + [RatFunc.one(row[0].nvars) if i == j else RatFunc.zero(row[0].nvars) for j in range(n)]
         for i, row in enumerate(mat)]
    det = RatFunc.one(mat[0][0].nvars)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise MetricError("singular metric")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        inv = p.inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det, tuple(tuple(row[n:]) for row in a)


def _rational_root(q: Fraction, n: int):
    if q <= 0:
        return None
    num, exact_n = integer_nthroot(q.numerator, n)
    den, exact_d = integer_nthroot(q.denominator, n)
    if exact_n and exact_d:
        return Fraction(int(num), int(den))
    return None


@dataclass(frozen=True)
class Metric:
    """Symmetric non-degenerate ``omega`` with inverse, determinant and density."""

    n: int
    omega: tuple
    inverse: tuple
    det: RatFunc
    density: tuple | None
    kind: str = "custom"

    @property
    def nvars(self) -> int:
        return self.n

    def is_constant(self) -> bool:
        return all(c.is_constant() for row in self.omega for c in row)

    def constant(self):
        """``(omega, omega^-1)`` as Fraction matrices; refuses variable metrics."""
        if not self.is_constant():
            raise MetricError("flat background required")
        return ([[c.constant_value() for c in row] for row in self.omega],
                [[c.constant_value() for c in row] for row in self.inverse])


def metric_make(kind: str, n: int, entries: Sequence[Sequence] | None = None) -> Metric:
    """``minkowski`` is ``diag(1, -1, ..., -1)``; ``euclid`` the identity."""
    if n < 1:
        raise MetricError("dimension must be positive")
    if kind == "minkowski":
        entries = [[(1 if i == 0 else -1) if i == j else 0 for j in range(n)] for i in range(n)]
    elif kind == "euclid":
        entries = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    elif kind != "custom":
        raise MetricError(f"unknown metric kind {kind!r}")
    if entries is None or len(entries) != n or any(len(row) != n for row in entries):
        raise MetricError(f"metric needs an {n}x{n} matrix")
    omega = tuple(tuple(c if isinstance(c, RatFunc) else RatFunc.constant(c, n) for c in row) for row in entries)
    for i in range(n):
        for j in range(n):
            if omega[i][j] != omega[j][i]:
                raise MetricError("metric must be symmetric")
    det, inv = _det_and_inverse(omega)
    density = None
    if det.is_constant():
        root = _rational_root(abs(det.constant_value()), n)
        if root is not None:
            s = 1 / root
            density = tuple(tuple(c * s for c in row) for row in omega)
    return Metric(n, omega, inv, det, density, kind)


# ---------------------------------------------------------------------------
# packed symmetric tensors

def sym_pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym_index(n: int) -> dict:
    idx = {}
    for k, (i, j) in enumerate(sym_pairs(n)):
        idx[(i, j)] = idx[(j, i)] = k
    return idx


def sym_space(name: str, prefix: str, n: int) -> SpaceSpec:
    pairs = sym_pairs(n)
    return SpaceSpec(name, tuple(f"{prefix}{i + 1}{j + 1}" for i, j in pairs),
                     tuple(1 if i == j else 2 for i, j in pairs))


def vector_space(name: str, prefix: str, n: int) -> SpaceSpec:
    return SpaceSpec.make(name, n, [f"{prefix}{i + 1}" for i in range(n)])


def tangent_space(n):
    return vector_space("T", "xi", n)


def f0_space(n):
    return sym_space("F0", "Om", n)


def scalar_space(name="tr", label="tr"):
    return SpaceSpec.make(name, 1, [label])


class _Builder:
    """Accumulates ``coeff * d^mu`` contributions into operator entries."""

    def __init__(self, src: SpaceSpec, dst: SpaceSpec, nvars: int):
        self.src, self.dst, self.nvars = src, dst, nvars
        self.entries: dict = {}
        self.zero = (0,) * nvars

    def add(self, row: int, col: int, coeff, mu=None):
        if not isinstance(coeff, RatFunc):
            if not coeff:
                return
            coeff = RatFunc.constant(coeff, self.nvars)
        elif not coeff:
            return
        mu = self.zero if mu is None else tuple(mu)
        e = self.entries.setdefault((row, col), {})
        s = e.get(mu)
        e[mu] = coeff if s is None else s + coeff

    def build(self) -> DiffOp:
        return DiffOp(self.src, self.dst, self.nvars, self.entries)


def _d(n, *idx):
    mu = (0,) * n
    for i in idx:
        mu = madd(mu, unit(i, n))
    return mu


# ---------------------------------------------------------------------------
# Lie operators (variable metric allowed)

def lie_operator(m: Metric, conformal: bool = False, full: bool = False) -> DiffOp:
    """Killing operator ``xi -> L(xi) omega`` in Medolaghi form.

    With ``conformal=True`` the density ``omega_hat`` replaces ``omega`` and the
    term ``-(2/n) omega_hat_ij d_r xi^r`` is added.  The conformal output is
    trace free; by default its last diagonal component is dropped so the
    target has dimension ``n(n+1)/2 - 1``.  ``full=True`` keeps all packed
    components.
    """
    n = m.n
    if conformal:
        if m.density is None:
            raise MetricError("metric density unavailable: |det| is not an exact n-th power")
        w = m.density
    else:
        w = m.omega
    pairs = sym_pairs(n)
    T = tangent_space(n)
    dst = sym_space("F0hat", "Omh", n) if conformal else f0_space(n)
    b = _Builder(T, dst, n)
    for k, (i, j) in enumerate(pairs):
        for r in range(n):
            b.add(k, r, w[r][j], _d(n, i))
            b.add(k, r, w[i][r], _d(n, j))
            b.add(k, r, w[i][j].derive(r))
            if conformal:
                b.add(k, r, w[i][j] * Fraction(-2, n), _d(n, r))
    op = b.build()
    if conformal and not full:
        keep = list(range(len(pairs) - 1))
        op = op.select_rows(keep, SpaceSpec(dst.name, dst.labels[:-1], dst.weights[:-1]))
    return op


# ---------------------------------------------------------------------------
# linearized curvature over a flat background

def _gamma_terms(g, ginv, n, k, i, j):
    """Full-index terms of Gamma^k_ij as (coeff, packed input, mu)."""
    idx = sym_index(n)
    out = []
    for r in range(n):
        c = ginv[k][r] / 2
        if not c:
            continue
        out.append((c, idx[(r, j)], _d(n, i)))
        out.append((c, idx[(i, r)], _d(n, j)))
        out.append((-c, idx[(i, j)], _d(n, r)))
    return out


def riemann_indices(n: int):
    """Independent components ``((k, l), (i, j))`` of a curvature-type tensor.

    Pairs are strictly increasing, pair-symmetric (``P <= Q``) and for four
    distinct indices ``a<b<c<d`` the component ``((a,d),(b,c))`` is dropped
    (it is fixed by the cyclic identity).
    """
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    out = []
    for p in pairs:
        for q in pairs:
            if q < p:
                continue
            a, d = p
            b, c = q
            if a < b < c < d:
                continue
            out.append((p, q))
    return out


def linearized_curvature(m: Metric, kind: str) -> DiffOp:
    """Christoffel, Riemann, Ricci, scalar curvature ('trace'), Einstein or box.

    All act on packed ``Omega`` except ``dalembertian`` which is ``box x id`` on
    packed symmetric tensors.
    """
    g, ginv = m.constant()
    n = m.n
    F0 = f0_space(n)
    idx = sym_index(n)
    pairs = sym_pairs(n)
    if kind == "christoffel":
        labels, weights, rows = [], [], []
        for k in range(n):
            for i, j in pairs:
                labels.append(f"Gam{k + 1}_{i + 1}{j + 1}")
                weights.append(1 if i == j else 2)
                rows.append(_gamma_terms(g, ginv, n, k, i, j))
        b = _Builder(F0, SpaceSpec("Gam", tuple(labels), tuple(weights)), n)
        for r, terms in enumerate(rows):
            for c, col, mu in terms:
                b.add(r, col, c, mu)
        return b.build()
    if kind == "riemann":
        comps = riemann_indices(n)
        dst = SpaceSpec.make("Riem", len(comps),
                             [f"Rm{k + 1}{l + 1}_{i + 1}{j + 1}" for (k, l), (i, j) in comps])
        b = _Builder(F0, dst, n)
        for row, ((k, l), (i, j)) in enumerate(comps):
            # R_kl,ij = omega_km (d_i Gamma^m_lj - d_j Gamma^m_li)
            for mm in range(n):
                if not g[k][mm]:
                    continue
                for c, col, mu in _gamma_terms(g, ginv, n, mm, l, j):
                    b.add(row, col, g[k][mm] * c, madd(mu, _d(n, i)))
                for c, col, mu in _gamma_terms(g, ginv, n, mm, l, i):
                    b.add(row, col, -g[k][mm] * c, madd(mu, _d(n, j)))
        return b.build()
    if kind == "ricci":
        b = _Builder(F0, sym_space("Ric", "R", n), n)
        for row, (i, j) in enumerate(pairs):
            for r in range(n):
                for s in range(n):
                    c = ginv[r][s] / 2
                    if not c:
                        continue
                    b.add(row, idx[(r, s)], c, _d(n, i, j))
                    b.add(row, idx[(i, j)], c, _d(n, r, s))
                    b.add(row, idx[(s, j)], -c, _d(n, r, i))
                    b.add(row, idx[(r, i)], -c, _d(n, s, j))
        return b.build()
    if kind == "trace":
        # tr(R) = omega^ij d_ij tr(Omega) - omega^ru omega^sv d_rs Omega_uv
        b = _Builder(F0, scalar_space("Scal", "trR"), n)
        for i in range(n):
            for j in range(n):
                if not ginv[i][j]:
                    continue
                for u in range(n):
                    for v in range(n):
                        b.add(0, idx[(u, v)], ginv[i][j] * ginv[u][v], _d(n, i, j))
        for r in range(n):
            for u in range(n):
                for s in range(n):
                    for v in range(n):
                        c = ginv[r][u] * ginv[s][v]
                        if c:
                            b.add(0, idx[(u, v)], -c, _d(n, r, s))
        return b.build()
    if kind == "einstein":
        ric = linearized_curvature(m, "ricci")
        E = sym_space("Ein", "E", n)
        ric = ric.retarget(dst=E)
        tr_ric = op_compose(trace_map(m, E), ric)
        return op_linear_combine([(1, ric), (Fraction(-1, 2), op_compose(metric_embed(m, E), tr_ric))])
    if kind == "dalembertian":
        return box_identity(m, sym_space("F0bar", "Ob", n), sym_space("Ein", "E", n))
    raise ValueError(f"unknown curvature kind {kind!r}")


def ricci_from_christoffel(m: Metric) -> DiffOp:
    """Ricci rebuilt by contracting the linearized Riemann tensor: ``d_i Gamma^r_rj - d_r Gamma^r_ij``.

    Reproduces ``linearized_curvature(m, "ricci")``; the opposite contraction
    gives its negative under this sign convention.
    """
    n = m.n
    gam = linearized_curvature(m, "christoffel")
    pos = {}
    for k, (r, (i, j)) in enumerate((r, p) for r in range(n) for p in sym_pairs(n)):
        pos[(r, i, j)] = pos[(r, j, i)] = k
    b = _Builder(gam.dst, sym_space("Ric", "R", n), n)
    for row, (i, j) in enumerate(sym_pairs(n)):
        for r in range(n):
            b.add(row, pos[(r, r, j)], 1, _d(n, i))
            b.add(row, pos[(r, i, j)], -1, _d(n, r))
    return op_compose(b.build(), gam)


def box_identity(m: Metric, src: SpaceSpec, dst: SpaceSpec) -> DiffOp:
    """``box = omega^ij d_ij`` acting componentwise."""
    g, ginv = m.constant()
    n = m.n
    b = _Builder(src, dst, n)
    for k in range(src.dim):
        for i in range(n):
            for j in range(n):
                b.add(k, k, ginv[i][j], _d(n, i, j))
    return b.build()


def trace_map(m: Metric, src: SpaceSpec | None = None) -> DiffOp:
    """``Omega -> omega^ij Omega_ij`` on packed tensors."""
    n = m.n
    src = src or f0_space(n)
    idx = sym_index(n)
    b = _Builder(src, scalar_space(), n)
    for i in range(n):
        for j in range(n):
            b.add(0, idx[(i, j)], m.inverse[i][j])
    return b.build()


def metric_embed(m: Metric, dst: SpaceSpec | None = None) -> DiffOp:
    """``f -> f * omega_ij``."""
    n = m.n
    dst = dst or f0_space(n)
    b = _Builder(scalar_space(), dst, n)
    for k, (i, j) in enumerate(sym_pairs(n)):
        b.add(k, 0, m.omega[i][j])
    return b.build()


# ---------------------------------------------------------------------------
# zero-order maps

def _sym_affine(m: Metric, src: SpaceSpec, dst: SpaceSpec, a, c) -> DiffOp:
    """``X_ij -> a X_ij + c omega_ij tr(X)``."""
    embed = metric_embed(m, dst)
    tr = trace_map(m, src)
    ident = DiffOp.identity(src, m.n, dst)
    return op_linear_combine([(a, ident), (c, op_compose(embed, tr))])


def skew_pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def algebraic_map(m: Metric, kind: str) -> DiffOp:
    """Zero-order maps between tensor spaces.

    ``bar``: ``Omega - 1/2 omega tr``; ``bar_inv``: ``X - 1/(n-2) omega tr``;
    ``trace_free``: ``Omega - 1/n omega tr``; ``elation_to_ricci``:
    ``(n-2) A + omega tr(A)``; ``ricci_to_elation`` its inverse;
    ``decompose_t2``: full 2-tensor to (symmetric part, skew part).
    """
    n = m.n
    F0 = f0_space(n)
    Ob = sym_space("F0bar", "Ob", n)
    if kind == "bar":
        return _sym_affine(m, F0, Ob, 1, Fraction(-1, 2))
    if kind == "bar_inv":
        if n == 2:
            raise MetricError("degenerate at n=2")
        return _sym_affine(m, Ob, F0, 1, Fraction(-1, n - 2))
    if kind == "trace_free":
        return _sym_affine(m, F0, sym_space("F0hat", "Omh", n), 1, Fraction(-1, n))
    if kind == "elation_to_ricci":
        return _sym_affine(m, sym_space("Ela", "A", n), sym_space("Ric", "R", n), n - 2, 1)
    if kind == "ricci_to_elation":
        if n == 2:
            raise MetricError("degenerate at n=2")
        # A = (R - omega tr(R) / (2(n-1))) / (n-2)
        return _sym_affine(m, sym_space("Ric", "R", n), sym_space("Ela", "A", n),
                           Fraction(1, n - 2), Fraction(-1, 2 * (n - 1) * (n - 2)))
    if kind == "decompose_t2":
        full = [(i, j) for i in range(n) for j in range(n)]
        src = SpaceSpec.make("T2", n * n, [f"A{i + 1}{j + 1}" for i, j in full])
        sp, kp = sym_pairs(n), skew_pairs(n)
        dst = SpaceSpec("S2+L2", tuple([f"S{i + 1}{j + 1}" for i, j in sp] + [f"F{i + 1}{j + 1}" for i, j in kp]),
                        tuple([1 if i == j else 2 for i, j in sp] + [2] * len(kp)))
        b = _Builder(src, dst, n)
        pos = {p: k for k, p in enumerate(full)}
        half = Fraction(1, 2)
        for k, (i, j) in enumerate(sp):
            b.add(k, pos[(i, j)], half)
            b.add(k, pos[(j, i)], half)
        for k, (i, j) in enumerate(kp):
            b.add(len(sp) + k, pos[(i, j)], half)
            b.add(len(sp) + k, pos[(j, i)], -half)
        return b.build()
    raise ValueError(f"unknown algebraic map {kind!r}")


def reassemble_t2(m: Metric) -> DiffOp:
    """Inverse of ``decompose_t2``: ``A_ij = S_ij + F_ij`` with ``F_ji = -F_ij``."""
    dec = algebraic_map(m, "decompose_t2")
    n = m.n
    sp, kp = sym_pairs(n), skew_pairs(n)
    spos = {p: k for k, p in enumerate(sp)}
    kpos = {p: len(sp) + k for k, p in enumerate(kp)}
    b = _Builder(dec.dst, dec.src, n)
    for r, (i, j) in enumerate((i, j) for i in range(n) for j in range(n)):
        b.add(r, spos[(min(i, j), max(i, j))], 1)
        if i < j:
            b.add(r, kpos[(i, j)], 1)
        elif i > j:
            b.add(r, kpos[(j, i)], -1)
    return b.build()


# ---------------------------------------------------------------------------
# dual side

def dual_operator(m: Metric, kind: str) -> DiffOp:
    """``cauchy`` = ad(Killing); ``div``: ``E -> omega^ti d_t E_ij``; ``adricci_sigma``."""
    n = m.n
    if kind == "cauchy":
        return op_adjoint(lie_operator(m, conformal=False))
    g, ginv = m.constant()
    idx = sym_index(n)
    if kind == "div":
        b = _Builder(sym_space("Ein", "E", n), vector_space("Div", "c", n), n)
        for j in range(n):
            for t in range(n):
                for i in range(n):
                    b.add(j, idx[(i, j)], ginv[t][i], _d(n, t))
        return b.build()
    if kind == "adricci_sigma":
        # sigma^rs = box lb^rs + omega^rs d_ij lb^ij - omega^sj d_ij lb^ri - omega^ri d_ij lb^sj
        b = _Builder(sym_space("Lbar", "lb", n), sym_space("Sig", "sig", n), n)
        for row, (r, s) in enumerate(sym_pairs(n)):
            for i in range(n):
                for j in range(n):
                    b.add(row, idx[(r, s)], ginv[i][j], _d(n, i, j))
                    b.add(row, idx[(i, j)], ginv[r][s], _d(n, i, j))
                    b.add(row, idx[(r, i)], -ginv[s][j], _d(n, i, j))
                    b.add(row, idx[(s, j)], -ginv[r][i], _d(n, i, j))
        return b.build()
    raise ValueError(f"unknown dual operator {kind!r}")


def upper_divergence(m: Metric, src: SpaceSpec, name: str = "Con", prefix: str = "k") -> DiffOp:
    """``X -> (d_i X^{ri})_r`` on packed symmetric tensors (no metric involved)."""
    n = m.n
    idx = sym_index(n)
    b = _Builder(src, vector_space(name, prefix, n), n)
    for r in range(n):
        for i in range(n):
            b.add(r, idx[(r, i)], 1, _d(n, i))
    return b.build()


def gauge_divergence(m: Metric, src: SpaceSpec | None = None) -> DiffOp:
    """``Ob -> (d_r Ob^r_i)_i = (omega^rs d_r Ob_si)_i``."""
    g, ginv = m.constant()
    n = m.n
    src = src or sym_space("F0bar", "Ob", n)
    idx = sym_index(n)
    b = _Builder(src, vector_space("Gauge", "g", n), n)
    for i in range(n):
        for r in range(n):
            for s in range(n):
                b.add(i, idx[(s, i)], ginv[r][s], _d(n, r))
    return b.build()


@dataclass
class GaugeReduction:
    lhs: DiffOp         # 2 * einstein o bar_inv
    box_part: DiffOp
    remainder: DiffOp
    gauge_div: DiffOp
    factor: DiffOp      # remainder = factor o gauge_div


def gauge_reduce_einstein(m: Metric) -> GaugeReduction:
    """Split ``2 E o bar_inv`` into ``box x id`` plus a term through the gauge divergence."""
    if m.n < 3:
        raise MetricError("degenerate at n=2")
    ein = linearized_curvature(m, "einstein")
    lhs = op_compose(ein, algebraic_map(m, "bar_inv")).scaled(2)
    box = box_identity(m, lhs.src, lhs.dst)
    remainder = lhs - box
    gdiv = gauge_divergence(m, lhs.src)
    factor = left_factor(remainder, gdiv)
    if factor is None:
        raise ArithmeticError("remainder does not factor through the gauge divergence")
    return GaugeReduction(lhs, box, remainder, gdiv, factor)


def constraint_coherence_check(m: Metric, sigma: DiffOp | None = None) -> bool:
    """Does ``d_r sigma^{rs}`` vanish modulo the constraints ``d_i lambda^{ri} = 0``?

    ``sigma`` carries upper indices, so its divergence needs no metric.
    """
    sigma = sigma if sigma is not None else dual_operator(m, "adricci_sigma")
    lhs = op_compose(upper_divergence(m, sigma.dst, "DivSig", "s"), sigma)
    constraint = upper_divergence(m, sigma.src)
    return left_factor(lhs, constraint) is not None


# ---------------------------------------------------------------------------
# unpacked form (used to cross-check self-adjointness)

def unpacked(op: DiffOp, n: int) -> DiffOp:
    """Conjugate a packed-to-packed operator to full ``n^2`` components, weight 1."""
    full = [(i, j) for i in range(n) for j in range(n)]
    idx = sym_index(n)
    src_full = SpaceSpec.make(op.src.name + "_full", n * n, [f"{op.src.name}_{i + 1}{j + 1}" for i, j in full])
    dst_full = SpaceSpec.make(op.dst.name + "_full", n * n, [f"{op.dst.name}_{i + 1}{j + 1}" for i, j in full])
    pack = _Builder(src_full, op.src, n)
    for c, (i, j) in enumerate(full):
        pack.add(idx[(i, j)], c, Fraction(1, 2) if i != j else 1)
    unpack = _Builder(op.dst, dst_full, n)
    for r, (i, j) in enumerate(full):
        unpack.add(r, idx[(i, j)], 1)
    return op_compose(unpack.build(), op_compose(op, pack.build()))


def index_map(m: Metric, src: SpaceSpec, dst: SpaceSpec, lower: bool = False, packed: bool = True) -> DiffOp:
    """``X^ij -> omega_ia omega_jb X^ab`` (``lower``) or the raising map with ``omega^-1``."""
    n = m.n
    g = m.omega if lower else m.inverse
    if packed:
        rows, col = sym_pairs(n), sym_index(n)
    else:
        rows = [(i, j) for i in range(n) for j in range(n)]
        col = {p: k for k, p in enumerate(rows)}
    b = _Builder(src, dst, n)
    for r, (i, j) in enumerate(rows):
        for a in range(n):
            for c in range(n):
                b.add(r, col[(a, c)], g[i][a] * g[j][c])
    return b.build()


def identified_transpose(op: DiffOp, m: Metric, packed: bool = True) -> DiffOp:
    """``raise o op o lower``: ``op`` read as a map between upper-index spaces."""
    lower = index_map(m, op.dst.dual(), op.src, lower=True, packed=packed)
    raise_ = index_map(m, op.dst, op.src.dual(), lower=False, packed=packed)
    return op_compose(raise_, op_compose(op, lower))


def is_self_adjoint(op: DiffOp, m: Metric) -> bool:
    """``ad(op)`` equals ``op`` once upper and lower indices are identified through ``omega``.

    For the Euclidean metric the identification is the identity and this is
    literal entrywise equality.
    """
    return op_adjoint(op).equal_entries(identified_transpose(op, m))


def is_self_adjoint_unpacked(op: DiffOp, m: Metric) -> bool:
    """Same test on the full ``n^2`` components with unit weights."""
    full = unpacked(op, m.n)
    return op_adjoint(full).equal_entries(identified_transpose(full, m, packed=False))


# ---------------------------------------------------------------------------
# dimension bookkeeping

@dataclass(frozen=True)
class DimsTable:
    n: int
    T: int
    F0: int
    F0hat: int
    F1: int
    F1hat: int
    F2: int
    F2hat: int
    g1: int
    g1hat: int
    g2hat: int
    sym: tuple      # dim S_q T*, q = 0..4
    forms: tuple    # dim wedge^r T*, r = 0..n

    def S(self, q):
        return comb(self.n + q - 1, q)

    def L(self, r):
        return comb(self.n, r) if 0 <= r <= self.n else 0

    def identities(self) -> dict:
        n, T = self.n, self.T
        S, L = self.S, self.L
        return {
            "F1 = S2(F0) - S3(T)": self.F1 == S(2) * self.F0 - S(3) * T,
            "F1 = L2(g1) - L3(T)": self.F1 == L(2) * self.g1 - L(3) * T,
            "F2 = S4(T) - S3(F0) + T*(F1)": self.F2 == S(4) * T - S(3) * self.F0 + T * self.F1,
            "F2 = L3(g1) - L4(T)": self.F2 == L(3) * self.g1 - L(4) * T,
            "F1hat = S2(F0hat) - S3(T)": self.F1hat == S(2) * self.F0hat - S(3) * T,
            "F1hat = F1 - S2": self.F1hat == self.F1 - S(2),
            "F1 - F1hat = n(n+1)/2": self.F1 - self.F1hat == n * (n + 1) // 2,
            "F2hat = S4(T) - S3(F0hat) + T*(F1hat)": self.F2hat == S(4) * T - S(3) * self.F0hat + T * self.F1hat,
            "F2hat = L3(g1hat) - L4(T) - L2(g2hat)": self.F2hat == L(3) * self.g1hat - L(4) * T - L(2) * self.g2hat,
            "F0 - F0hat = 1": self.F0 - self.F0hat == 1,
        }

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "T", "F0", "F0hat", "F1", "F1hat", "F2", "F2hat",
                                              "g1", "g1hat", "g2hat")}


def dims_table(n: int) -> DimsTable:
    if n < 2:
        raise ValueError("dimension must be at least 2")
    F0 = n * (n + 1) // 2
    g1 = n * (n - 1) // 2
    return DimsTable(
        n=n, T=n, F0=F0, F0hat=F0 - 1,
        F1=n * n * (n * n - 1) // 12,
        F1hat=n * (n + 1) * (n + 2) * (n - 3) // 12,
        F2=n * n * (n * n - 1) * (n - 2) // 24,
        F2hat=n * (n * n - 1) * (n + 2) * (n - 4) // 24,
        g1=g1, g1hat=g1 + 1, g2hat=n,
        sym=tuple(comb(n + q - 1, q) for q in range(5)),
        forms=tuple(comb(n, r) for r in range(n + 1)),
    )
